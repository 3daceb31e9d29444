"""Named boolean checks shared by every verifier."""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Check:
    name: str
    verdict: bool
    basis: str
    residual_nonzero: int = 0
    detail: str = ""

    def to_json(self) -> dict:
        out = asdict(self)
        if not out["detail"]:
            del out["detail"]
        return out


def all_pass(checks) -> bool:
    return all(c.verdict for c in checks)
