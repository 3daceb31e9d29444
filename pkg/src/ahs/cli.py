"""Command-line interface.

Every subcommand writes a JSON report (``--out`` or stdout) and a short human
summary to stderr. Exit status: 0 when the primary verdict holds, 1 when it
does not, 2 on malformed input.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from . import io
from .families import (
    MeusersParams,
    meusers_filtration_prediction,
    meusers_predictions,
    meusers_triple,
    random_member,
    random_triple,
    so_metric,
)
from .filtration import (
    joint_stabilizer_filtration,
    membership,
    membership_direct,
    membership_variant,
    stabilizer_filtration,
)
from .kstructures import KAlgebra, membership_k, model_su, verify_su_structure
from .linalg import identity, to_rat
from .report import Check, all_pass
from .skew import LiePairError, assemble_g, triple_from_lie_pair
from .spencer import (
    CommutationError,
    build_comodule,
    coboundary_squares_vanish,
    spencer_cohomology,
    verify_contact,
    verify_contact_defn,
)
from .triples import ricci


class _Timer:
    def __init__(self):
        self.times: dict[str, float] = {}

    def __call__(self, label: str):
        timer = self

        class _Ctx:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                timer.times[label] = round(time.perf_counter() - self.t0, 6)

        return _Ctx()


def _checks_json(checks) -> list[dict]:
    return [c.to_json() for c in checks]


def _load(path: str, kind: str):
    doc, digest = io.read_json(path)
    found = io.detect_kind(doc)
    if found != kind:
        raise io.SchemaError(f"expected a {kind} document, found {found}", "/kind")
    return doc, digest


def _load_triple(path: str):
    doc, digest = _load(path, "triple")
    return io.triple_from_json(doc), digest


def _ambient(args, n: int) -> KAlgebra | None:
    choice = getattr(args, "ambient", "gl")
    if choice == "gl":
        return None
    if choice == "so":
        metric = identity(n)
        if getattr(args, "metric", None):
            doc, _ = io.read_json(args.metric)
            metric = io.matrix_from_json(doc)
            if metric.shape != (n, n):
                raise io.SchemaError(f"metric must be {n} x {n}", "/matrix")
        return KAlgebra.so(metric)
    doc, _ = io.read_json(choice)
    mats, dim = io.algebra_from_json(doc)
    if dim != n:
        raise io.SchemaError(f"algebra acts on dimension {dim}, triple has dimension {n}", "/dim")
    return KAlgebra.custom(mats, dim)


def _ambient_name(args) -> str:
    a = getattr(args, "ambient", "gl")
    return a if a in ("gl", "so") else "custom"


def _report(command: str, inputs: dict, checks, **extra) -> dict:
    out = {"format": io.FORMAT, "command": command, "inputs": inputs, "checks": _checks_json(checks)}
    out["verdict"] = all_pass(checks)
    out.update(extra)
    return out


# --- subcommands --------------------------------------------------------------------


def cmd_check(args, timer) -> dict:
    t, digest = _load_triple(args.triple)
    inputs = {args.triple: digest}
    extra = {}
    with timer("membership"):
        if args.variant:
            rep = membership_variant(t, args.variant, r_max=args.r_max)
        else:
            k = _ambient(args, t.n)
            rep = membership(t) if k is None else membership_k(t, k)
            extra["ambient"] = _ambient_name(args)
    if rep.filtration is not None:
        extra["filtration"] = io.filtration_to_json(rep.filtration)
    if args.direct:
        with timer("direct_equations"):
            direct = membership_direct(t, args.r_max)
        extra["direct_route"] = {
            "checks": _checks_json(direct.checks),
            "verdict": direct.verdict,
            "orders_checked": direct.extra["orders_checked"],
            "agrees_with_congruence": direct.verdict == rep.verdict if not args.variant else None,
        }
    return _report("check", inputs, rep.checks, **extra)


def cmd_filtration(args, timer) -> dict:
    t, digest = _load_triple(args.triple)
    k = _ambient(args, t.n)
    amb = None if k is None else k.subspace
    with timer("recursive"):
        f = stabilizer_filtration(t, amb)
    checks = []
    extra = {"filtration": io.filtration_to_json(f, with_bases=args.bases), "ambient": _ambient_name(args)}
    if args.joint:
        r_max = args.r_max if args.r_max is not None else max(f.singer, 0) + 2
        with timer("joint"):
            j = joint_stabilizer_filtration(t, amb, r_max)
        agree = all(f.step(r) == j.step(r) for r in range(r_max + 1))
        checks.append(Check("joint_agrees", agree, "recursive steps equal the joint stabilizers of R, T and their covariant derivatives"))
        extra["joint"] = io.filtration_to_json(j)
    return _report("filtration", {args.triple: digest}, checks, **extra)


def cmd_spencer(args, timer) -> dict:
    t, digest = _load_triple(args.triple)
    k = _ambient(args, t.n)
    amb = None if k is None else k.subspace
    with timer("filtration"):
        f = stabilizer_filtration(t, amb)
    with timer("comodule"):
        c = build_comodule(t, f, strict=False)
    checks = [Check("derivatives_commute", c.commutes, "directional derivatives of the filtration comodule commute")]
    extra = {"filtration": io.filtration_to_json(f), "comodule_dims": c.dims, "ambient": _ambient_name(args)}
    if c.commutes:
        with timer("cohomology"):
            table = spencer_cohomology(c, args.k_max)
        checks.append(Check("coboundary_squared_zero", coboundary_squares_vanish(c), "B o B = 0 in every bidegree"))
        h0 = all(table.dims[(r, 0)] == 0 for r in range(1, table.top + 1))
        checks.append(Check("h_r0_vanishes", h0, "H^{r,0} = 0 for every r > 0"))
        extra["cohomology"] = [[r, kk, d] for (r, kk), d in sorted(table.dims.items())]
        extra["tangent_dims"] = table.column(1) if table.k_max >= 1 else []
    return _report("spencer", {args.triple: digest}, checks, **extra)


def _parse_params(text: str | None, m: int) -> MeusersParams:
    if not text:
        return MeusersParams.default(m)
    return MeusersParams(m, tuple(to_rat(x) for x in text.split(",")))


def cmd_meusers(args, timer) -> dict:
    p = _parse_params(args.params, args.m)
    with timer("build"):
        t, pair = meusers_triple(p)
    checks = [Check("lie_algebra_route_agrees", True, "closed-form triple equals the triple of the solvable Lie algebra")]
    extra = {"m": p.m, "params": [io.rat_to_json(x) for x in p.f]}
    if args.emit:
        io.write_json(args.emit, io.triple_to_json(t))
    if args.emit_pair:
        io.write_json(args.emit_pair, io.lie_pair_to_json(pair))
    if args.predictions:
        with timer("predictions"):
            pred = meusers_predictions(p)
            f = stabilizer_filtration(t, so_metric(identity(p.m)))
            c = build_comodule(t, f)
            table = spencer_cohomology(c, k_max=1)
        expected = meusers_filtration_prediction(p)
        checks.append(Check("filtration_subspaces", list(f.steps) == expected, "h_r = so{e_(r+4), ..., e_m} inside so(m)"))
        checks.append(Check("singer", f.singer == pred["singer"], "Singer invariant equals m - 4", detail=f"computed {f.singer}"))
        k1 = {r: table.dims[(r, 1)] for r in range(1, table.top + 1)}
        checks.append(Check("spencer_k1_ones", k1 == pred["spencer_k1_dims"], "dim H^{r,1} = 1 for r = 1..m-4"))
        extra["predictions"] = {
            "filtration_dims": pred["filtration_dims"],
            "singer": pred["singer"],
            "spencer_k1_dims": [pred["spencer_k1_dims"][r] for r in sorted(pred["spencer_k1_dims"])],
            "ricci_charpoly_distinct_count": pred["ricci_charpoly_distinct_count"],
        }
        extra["computed"] = {"filtration_dims": f.dims, "singer": f.singer, "spencer_k1_dims": [k1[r] for r in sorted(k1)]}
        extra["ricci"] = io.rats_to_json(ricci(t))
    return _report("meusers", {}, checks, **extra)


def cmd_from_lie(args, timer) -> dict:
    doc, digest = _load(args.pair, "lie_pair")
    pair = io.lie_pair_from_json(doc)
    with timer("triple"):
        t = triple_from_lie_pair(pair)
    with timer("membership"):
        rep = membership(t)
    if args.emit:
        io.write_json(args.emit, io.triple_to_json(t))
    return _report("from-lie", {args.pair: digest}, rep.checks, filtration=io.filtration_to_json(rep.filtration))


def cmd_contact(args, timer) -> dict:
    t1, d1 = _load_triple(args.t1)
    t2, d2 = _load_triple(args.t2)
    inputs = {args.t1: d1, args.t2: d2}
    if args.map:
        doc, dm = io.read_json(args.map)
        F = io.matrix_from_json(doc)
        inputs[args.map] = dm
    else:
        F = identity(t1.n)
    if F.shape != (t1.n, t1.n):
        raise io.SchemaError(f"map must be {t1.n} x {t1.n}", "/matrix")
    with timer("contact"):
        rep = verify_contact(t1, t2, F, args.order)
    checks = [
        Check("torsion_pulls_back", rep.torsion_matches, "F* T2 = T1"),
        Check("curvature_pulls_back", rep.curvature_matches, "F* R2 = R1"),
        Check("connection_congruent", rep.holds, f"F* A2 - A1 takes values in h_(d-1) of the first triple, d = {args.order}"),
    ]
    extra = {
        "order": args.order,
        "max_order": "all" if rep.max_order is None else rep.max_order,
        "all_orders": rep.all_orders,
        "singer": rep.singer,
    }
    if args.defn:
        with timer("definition"):
            defn = verify_contact_defn(t1, t2, F, args.order)
        extra["definition_agrees"] = defn == rep.holds
    return _report("contact", inputs, checks, **extra)


def cmd_su_verify(args, timer) -> dict:
    if args.structure:
        doc, digest = _load(args.structure, "su_structure")
        s, n = io.su_from_json(doc)
        inputs = {args.structure: digest}
    else:
        n = args.n
        s = model_su(n)
        inputs = {}
    with timer("verify"):
        rep = verify_su_structure(s, n)
    if args.emit:
        io.write_json(args.emit, io.su_to_json(s))
    return _report("su-verify", inputs, rep["checks"], n_complex=n, norm=io.rat_to_json(rep["norm"]))


def cmd_assemble(args, timer) -> dict:
    t, digest = _load_triple(args.triple)
    with timer("membership"):
        rep = membership(t)
    checks = list(rep.checks)
    extra = {"filtration": io.filtration_to_json(rep.filtration)}
    if rep.verdict:
        with timer("assemble"):
            pair = assemble_g(rep.filtration.h_infinity, t)
            back = triple_from_lie_pair(pair)
        checks.append(Check("jacobi", True, "assembled algebra satisfies the Jacobi identity"))
        checks.append(Check("round_trip", back == t, "the assembled Lie pair reproduces the triple"))
        extra["dim_g"] = pair.dim_g
        if args.emit:
            io.write_json(args.emit, io.lie_pair_to_json(pair))
    return _report("assemble", {args.triple: digest}, checks, **extra)


def _corpus_entry(path: str) -> dict:
    name = Path(path).name
    try:
        doc, digest = io.read_json(path)
        kind = io.detect_kind(doc)
        if kind == "triple":
            rep = membership(io.triple_from_json(doc))
            checks = rep.checks
        elif kind == "lie_pair":
            rep = membership(triple_from_lie_pair(io.lie_pair_from_json(doc)))
            checks = rep.checks
        elif kind == "su_structure":
            s, n = io.su_from_json(doc)
            checks = verify_su_structure(s, n)["checks"]
        else:
            raise io.SchemaError(f"unsupported document kind {kind!r}", "/kind")
    except (io.SchemaError, LiePairError, ValueError) as exc:
        err = exc.to_json() if isinstance(exc, io.SchemaError) else {"error": type(exc).__name__, "message": str(exc)}
        return {"file": name, "error": err}
    return {
        "file": name,
        "kind": kind,
        "digest": digest,
        "verdict": all_pass(checks),
        "failing": [c.name for c in checks if not c.verdict],
    }


def corpus(directory, jobs: int = 1) -> dict:
    """Run the matching verifier on every JSON document in ``directory``."""
    directory = Path(directory)
    files = sorted(str(p) for p in directory.glob("*.json") if p.name != "manifest.json")
    if jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(_corpus_entry, files))
    else:
        entries = [_corpus_entry(f) for f in files]
    entries.sort(key=lambda e: e["file"])
    counts = {
        "total": len(entries),
        "positive": sum(1 for e in entries if e.get("verdict") is True),
        "negative": sum(1 for e in entries if e.get("verdict") is False),
        "errors": sum(1 for e in entries if "error" in e),
    }
    out = {"files": entries, "counts": counts}
    manifest = directory / "manifest.json"
    if manifest.exists():
        expected, _ = io.read_json(manifest)
        mismatches = []
        for e in entries:
            want = expected.get("expected", {}).get(e["file"])
            got = "error" if "error" in e else e["verdict"]
            if want is not None and want != got:
                mismatches.append({"file": e["file"], "expected": want, "got": got})
        out["manifest_mismatches"] = mismatches
    return out


def bundled_fixtures() -> Path:
    return Path(str(resources.files("ahs") / "fixtures"))


def cmd_corpus(args, timer) -> dict:
    directory = bundled_fixtures() if args.bundled else Path(args.directory)
    if not directory.is_dir():
        raise io.SchemaError(f"not a directory: {directory}")
    with timer("corpus"):
        agg = corpus(directory, args.jobs)
    checks = []
    if "manifest_mismatches" in agg:
        checks.append(Check("manifest", not agg["manifest_mismatches"], "every verdict matches the fixture manifest"))
    else:
        checks.append(Check("no_errors", agg["counts"]["errors"] == 0, "every document loaded and was checked"))
    return _report("corpus", {}, checks, **agg)


def cmd_crosscheck(args, timer) -> dict:
    rng = np.random.default_rng(args.seed)
    disagree_direct, disagree_joint, members = [], [], 0
    with timer("crosscheck"):
        for i in range(args.count):
            t = random_member(rng, args.dim) if i % 2 else random_triple(rng, args.dim)
            rep = membership(t)
            members += rep.verdict
            if membership_direct(t).verdict != rep.verdict:
                disagree_direct.append(i)
            f = rep.filtration
            r_max = max(f.singer, 0) + 2
            j = joint_stabilizer_filtration(t, None, r_max)
            if any(f.step(r) != j.step(r) for r in range(r_max + 1)):
                disagree_joint.append(i)
    checks = [
        Check("congruence_vs_direct", not disagree_direct, "congruence verdict equals the direct equation verdict",
              len(disagree_direct)),
        Check("recursive_vs_joint", not disagree_joint, "recursive filtration equals the joint stabilizer filtration",
              len(disagree_joint)),
    ]
    return _report("crosscheck", {}, checks, seed=args.seed, count=args.count, dim=args.dim, members=members)


# --- entry point -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ahs", description="Exact verification of connection-curvature-torsion triples.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--timings", action="store_true", help="add a timings section to the report")
    common.add_argument("--quiet", action="store_true", help="no summary on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def ambient_flags(p):
        p.add_argument("--ambient", default="gl", help="gl, so, or a path to an algebra document")
        p.add_argument("--metric", help="metric matrix for --ambient so (default: identity)")

    p = sub.add_parser("check", parents=[common], help="variety membership of a triple")
    p.add_argument("triple")
    ambient_flags(p)
    p.add_argument("--variant", choices=["tf", "red"])
    p.add_argument("--r-max", type=int, default=None)
    p.add_argument("--direct", action="store_true", help="also evaluate the direct equation families")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("filtration", parents=[common], help="stabilizer filtration and Singer invariant")
    p.add_argument("triple")
    ambient_flags(p)
    p.add_argument("--joint", action="store_true", help="cross-check against joint stabilizers")
    p.add_argument("--r-max", type=int, default=None)
    p.add_argument("--bases", action="store_true", help="include echelon bases of every step")
    p.set_defaults(handler=cmd_filtration)

    p = sub.add_parser("spencer", parents=[common], help="Spencer cohomology of the filtration comodule")
    p.add_argument("triple")
    ambient_flags(p)
    p.add_argument("--k-max", type=int, default=None)
    p.set_defaults(handler=cmd_spencer)

    p = sub.add_parser("meusers", parents=[common], help="build a member of the tridiagonal solvable family")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--params", help="comma separated f_1..f_m (default 1,0,1,...,1)")
    p.add_argument("--emit", help="write the triple here")
    p.add_argument("--emit-pair", help="write the Lie pair here")
    p.add_argument("--predictions", action="store_true", help="compare against the closed-form predictions")
    p.set_defaults(handler=cmd_meusers)

    p = sub.add_parser("from-lie", parents=[common], help="triple of a Lie pair")
    p.add_argument("pair")
    p.add_argument("--emit")
    p.set_defaults(handler=cmd_from_lie)

    p = sub.add_parser("contact", parents=[common], help="contact order of two triples through a frame change")
    p.add_argument("t1")
    p.add_argument("t2")
    p.add_argument("--map", help="matrix document for F (default: identity)")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--defn", action="store_true", help="also compare pulled-back covariant derivatives")
    p.set_defaults(handler=cmd_contact)

    p = sub.add_parser("su-verify", parents=[common], help="check the SU(n) structure equations")
    p.add_argument("structure", nargs="?")
    p.add_argument("--n", type=int, default=2, help="complex dimension of the model when no file is given")
    p.add_argument("--emit")
    p.set_defaults(handler=cmd_su_verify)

    p = sub.add_parser("assemble", parents=[common], help="assemble the Lie algebra of a member triple")
    p.add_argument("triple")
    p.add_argument("--emit")
    p.set_defaults(handler=cmd_assemble)

    p = sub.add_parser("corpus", parents=[common], help="check every document in a directory")
    p.add_argument("directory", nargs="?")
    p.add_argument("--bundled", action="store_true", help="use the fixtures shipped with the package")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(handler=cmd_corpus)

    p = sub.add_parser("crosscheck", parents=[common], help="randomized dual-route oracle checks")
    p.add_argument("--seed", type=int, default=20240611)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--dim", type=int, default=3)
    p.set_defaults(handler=cmd_crosscheck)
    return parser


def _summary(report: dict) -> str:
    lines = [f"ahs {report['command']}"]
    for c in report.get("checks", []):
        mark = "PASS" if c["verdict"] else "FAIL"
        lines.append(f"  [{mark}] {c['name']}: {c['basis']}")
    if "filtration" in report:
        f = report["filtration"]
        lines.append(f"  filtration dims {f['dims']}, singer {f['singer']}")
    lines.append(f"  verdict: {report['verdict']}")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "corpus" and not args.bundled and not args.directory:
        parser.error("corpus needs a directory or --bundled")
    timer = _Timer()
    try:
        report = args.handler(args, timer)
    except io.SchemaError as exc:
        report = {"format": io.FORMAT, "command": args.command, **exc.to_json()}
        print(f"ahs {args.command}: malformed input at {exc.pointer}: {exc.message}", file=sys.stderr)
        _emit(args, report)
        return 2
    except (LiePairError, CommutationError, ValueError, FileNotFoundError) as exc:
        err = {"error": getattr(exc, "invariant", type(exc).__name__), "message": str(exc)}
        report = {"format": io.FORMAT, "command": args.command, **err}
        print(f"ahs {args.command}: {exc}", file=sys.stderr)
        _emit(args, report)
        return 2
    if args.timings:
        report["timings"] = timer.times
    _emit(args, report)
    if not args.quiet:
        print(_summary(report), file=sys.stderr)
    return 0 if report["verdict"] else 1


def _emit(args, report: dict) -> None:
    text = io.dump_json(report)
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    sys.exit(main())
