"""Regenerate the bundled fixture corpus and its manifest.

Expected verdicts are fixed by construction: Meusers triples and constant
curvature triples are members, the zero triple is a member, and every
``*_perturbed`` file adds 1 to a single connection entry of a member.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from ahs import io
from ahs.families import MeusersParams, constant_curvature_triple, meusers_triple
from ahs.kstructures import model_su
from ahs.triples import Triple

OUT = Path(__file__).resolve().parent.parent / "src" / "ahs" / "fixtures"


def perturbed(t: Triple, index=(0, 0, 1)) -> Triple:
    A = t.A.to_rats()
    A[index] += Fraction(1)
    return Triple.from_rats(A, t.R.to_rats(), t.T.to_rats())


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    for old in OUT.glob("*.json"):
        old.unlink()
    expected: dict[str, bool] = {}

    def emit(name: str, doc: dict, verdict: bool) -> None:
        io.write_json(OUT / name, doc)
        expected[name] = verdict

    for m in (5, 6, 7, 8):
        t, pair = meusers_triple(MeusersParams.default(m))
        emit(f"meusers_m{m}.json", io.triple_to_json(t), True)
        emit(f"meusers_m{m}_perturbed.json", io.triple_to_json(perturbed(t)), False)
        if m == 5:
            emit("meusers_m5_pair.json", io.lie_pair_to_json(pair), True)
    for n in (2, 3, 4):
        t = constant_curvature_triple(n, 1)
        emit(f"constant_curvature_n{n}.json", io.triple_to_json(t), True)
        emit(f"constant_curvature_n{n}_perturbed.json", io.triple_to_json(perturbed(t)), False)
    emit("zero_n3.json", io.triple_to_json(Triple.zero(3)), True)
    emit("su_model_n2.json", io.su_to_json(model_su(2)), True)
    io.write_json(OUT / "manifest.json", {"format": io.FORMAT, "expected": dict(sorted(expected.items()))})


if __name__ == "__main__":
    main()
