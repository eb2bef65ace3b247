"""Command-line front end.

Each command reads one JSON document (a file path, ``-`` for stdin, or an
inline JSON object), runs one library check and prints a single JSON report.
Exit codes: 0 for a true/success verdict, 1 for a false verdict, 2 for errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from . import core, functionals, relations, subspaces, transversality
from .core import SsdbSpace, Tolerance
from .errors import ParseError, SpaceMismatch, SsdbError

DEFAULT_SEED = 42


# --------------------------------------------------------------------------
# documents


def load_doc(ref: str, base: Optional[Path] = None) -> Dict[str, Any]:
    """Parse a document given as inline JSON, ``-`` (stdin) or a path."""
    text = ref.strip()
    try:
        if text.startswith("{"):
            return json.loads(text)
        if text == "-":
            return json.load(sys.stdin)
        path = Path(ref)
        if base is not None and not path.is_absolute():
            path = base / path
        return json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read document {ref!r}: {exc}") from exc


def _matrix(value, what: str) -> np.ndarray:
    try:
        M = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{what}: expected a numeric matrix") from exc
    if M.ndim != 2 or not np.all(np.isfinite(M)):
        raise ParseError(f"{what}: expected a finite 2-d array")
    return M


def _vector(value, what: str) -> np.ndarray:
    try:
        v = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{what}: expected a numeric vector") from exc
    if v.ndim != 1 or not np.all(np.isfinite(v)):
        raise ParseError(f"{what}: expected a finite 1-d array")
    return v


def parse_point(text: str) -> np.ndarray:
    try:
        return _vector([float(t) for t in text.split(",")], "--point")
    except ValueError as exc:
        raise ParseError(f"cannot parse point {text!r}") from exc


def space_from_doc(doc, tol: Tolerance, base: Optional[Path] = None) -> SsdbSpace:
    if isinstance(doc, str):
        return space_from_doc(load_doc(doc, base), tol, base)
    if not isinstance(doc, dict):
        raise ParseError("space document must be a JSON object")
    if "builder" in doc:
        name = doc["builder"]
        if name not in core.BUILDERS:
            raise ParseError(f"unknown builder {name!r}; choose from {sorted(core.BUILDERS)}")
        if name == "paper_r3":
            return core.BUILDERS[name](doc.get("n", 3))
        if "n" not in doc:
            raise ParseError(f"builder {name!r} needs 'n'")
        return core.BUILDERS[name](doc["n"])
    if "pairing" not in doc:
        raise ParseError("space document needs 'pairing' or 'builder'")
    P = _matrix(doc["pairing"], "pairing")
    if "dim" in doc and doc["dim"] != P.shape[0]:
        raise ParseError(f"dim={doc['dim']} but pairing has {P.shape[0]} rows")
    return core.validate_space(P, tol)


def _resolve_space(doc: dict, override: Optional[SsdbSpace], tol: Tolerance, base) -> SsdbSpace:
    inner = doc.get("space")
    if inner is None:
        if override is None:
            raise ParseError("document has no 'space' and no --space was given")
        return override
    S = space_from_doc(inner, tol, base)
    if override is not None and not override.same_as(S, tol):
        raise SpaceMismatch("--space disagrees with the document's space")
    return S


def subspace_from_doc(doc: dict, S: SsdbSpace, tol: Tolerance) -> subspaces.Subspace:
    gens = doc.get("generators", [])
    rows = [_vector(g, "generators") for g in gens]
    return subspaces.make_subspace(S, rows, tol)


def functional_from_doc(doc: dict, S: SsdbSpace, tol: Tolerance) -> functionals.QuadraticFunctional:
    kind = doc.get("kind")
    if kind == "qA":
        sub = doc.get("subspace")
        if not isinstance(sub, dict):
            raise ParseError("qA functional needs a 'subspace' object")
        A = subspace_from_doc(sub, S, tol)
        if not subspaces.is_q_positive(A, tol):
            raise subspaces.NotQPositive("q_A is only convex on a q-positive subspace")
        return functionals.make_qA(A)
    if kind == "quadratic":
        n = S.n
        H = _matrix(doc.get("H", np.zeros((n, n)).tolist()), "H")
        dom = doc.get("dom", {"generators": np.eye(n).tolist()})
        D = subspace_from_doc(dom, S, tol)
        offset = _vector(dom.get("offset", [0.0] * n), "dom.offset")
        l = _vector(doc.get("l", [0.0] * n), "l")
        if H.shape != (n, n):
            raise ParseError(f"H must be {n}x{n}")
        if float(np.max(np.abs(H - H.T), initial=0.0)) > tol.atol * (1 + float(np.max(np.abs(H), initial=0.0))):
            raise ParseError("H must be symmetric")
        return functionals.QuadraticFunctional(S, D.basis, offset, H, l, float(doc.get("kappa", 0.0)))
    raise ParseError(f"unknown functional kind {kind!r}; expected 'qA' or 'quadratic'")


def relation_from_doc(doc: dict, tol: Tolerance) -> relations.LinearRelation:
    if "n" not in doc:
        raise ParseError("relation document needs 'n'")
    n = int(doc["n"])
    if "graph" in doc:
        M = _matrix(doc["graph"], "graph")
        if M.shape != (n, n):
            raise ParseError(f"graph must be {n}x{n}")
        return relations.relation_from_graph(M, tol)
    if "pairs" in doc:
        return relations.relation_from_pairs(n, [_vector(p, "pairs") for p in doc["pairs"]], tol)
    raise ParseError("relation document needs 'graph' or 'pairs'")


# --------------------------------------------------------------------------
# reports


def digest(payload) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def _num(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return float(x)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    return obj


def dumps(obj) -> str:
    """JSON with floats written to 17 significant digits and sorted keys."""

    def enc(v):
        if isinstance(v, bool) or v is None:
            return json.dumps(v)
        if isinstance(v, float):
            return format(v, ".17g")
        if isinstance(v, (int, str)):
            return json.dumps(v)
        if isinstance(v, list):
            return "[" + ", ".join(enc(x) for x in v) + "]"
        if isinstance(v, dict):
            return "{" + ", ".join(f"{json.dumps(k)}: {enc(v[k])}" for k in sorted(v)) + "}"
        raise TypeError(f"cannot serialize {type(v).__name__}")

    return enc(_clean(obj))


def make_report(command, inputs, tol: Tolerance, seed: int, verdict, label=None,
                witnesses=None, residuals=None, details=None) -> Dict[str, Any]:
    report = {
        "command": command,
        "inputs_digest": digest(inputs),
        "verdict": verdict,
        "seed": seed,
        "tolerance": {"atol": tol.atol, "rank": tol.rank},
        "residuals": residuals or {},
    }
    if label is not None:
        report["label"] = label
    if witnesses is not None:
        report["witnesses"] = witnesses
    if details:
        report["details"] = details
    return _clean(report)


def error_report(command: str, exc: Exception) -> Dict[str, Any]:
    return {"command": command, "verdict": None, "error": type(exc).__name__, "message": str(exc)}


def exit_code(report: Dict[str, Any]) -> int:
    if "error" in report:
        return 2
    return 0 if report.get("verdict") is True else 1


# --------------------------------------------------------------------------
# commands (each returns a report dict or raises SsdbError)


def cmd_validate(doc, opts) -> Dict[str, Any]:
    S = space_from_doc(doc, opts.tol, opts.base)
    lam = np.linalg.eigvalsh(S.P)
    details = {"dim": S.n, "plus": int(np.sum(lam > 0)), "minus": int(np.sum(lam < 0))}
    return make_report("validate", {"space": doc}, opts.tol, opts.seed, True, details=details)


def cmd_check_positive(doc, opts) -> Dict[str, Any]:
    S = _resolve_space(doc, opts.space, opts.tol, opts.base)
    inputs = {"doc": doc, "space": opts.space_doc}
    if "points" in doc:
        PS = subspaces.PointSet(S, [_vector(p, "points") for p in doc["points"]])
        ok, w = subspaces.is_q_positive_pointset(PS, opts.tol)
        if ok:
            return make_report("check-positive", inputs, opts.tol, opts.seed, True, label="q-positive")
        pair = [PS.points[w.i], PS.points[w.j]]
        return make_report("check-positive", inputs, opts.tol, opts.seed, False, label="not q-positive",
                           witnesses=pair, residuals={"q_difference": w.value},
                           details={"pair": [w.i, w.j]})
    A = subspace_from_doc(doc, S, opts.tol)
    ok = subspaces.is_q_positive(A, opts.tol)
    lam = np.linalg.eigvalsh(A.reduced_form()) if A.k else np.zeros(0)
    res = {"min_reduced_eigenvalue": float(lam[0])} if lam.size else {}
    label = "q-positive" if ok else "not q-positive"
    return make_report("check-positive", inputs, opts.tol, opts.seed, ok, label=label, residuals=res,
                       details={"dim": A.k})


def cmd_complement(doc, opts) -> Dict[str, Any]:
    S = _resolve_space(doc, opts.space, opts.tol, opts.base)
    A = subspace_from_doc(doc, S, opts.tol)
    C = subspaces.q_complement(A, opts.tol)
    details = {
        "dim": C.k,
        "basis": C.basis.T,
        "q_negative": subspaces.is_q_negative(C, opts.tol),
        "q_positive": subspaces.is_q_positive(C, opts.tol),
    }
    return make_report("complement", {"doc": doc, "space": opts.space_doc}, opts.tol, opts.seed, True,
                       details=details)


def cmd_check_maximal(doc, opts) -> Dict[str, Any]:
    S = _resolve_space(doc, opts.space, opts.tol, opts.base)
    A = subspace_from_doc(doc, S, opts.tol)
    method = opts.method or "theorem"
    if method == "theorem":
        v = subspaces.is_maximal_q_positive(A, opts.tol)
    elif method == "oracle":
        v = subspaces.maximality_oracle(A, opts.trials, opts.seed, opts.tol)
    else:
        raise ParseError(f"unknown method {method!r} for check-maximal; use theorem or oracle")
    witnesses, residuals = None, {}
    if v.witness is not None:
        witnesses = [v.witness]
        residuals = {
            "witness_q": core.q(S, v.witness),
            "witness_inf_q_translate": subspaces.inf_q_over_translate(A, v.witness, opts.tol),
        }
    inputs = {"doc": doc, "space": opts.space_doc, "method": method, "trials": opts.trials}
    return make_report("check-maximal", inputs, opts.tol, opts.seed, v.maximal, label=v.label,
                       witnesses=witnesses, residuals=residuals,
                       details={"method": method, "trials": opts.trials if method == "oracle" else None})


def cmd_decompose(doc, opts) -> Dict[str, Any]:
    S = _resolve_space(doc, opts.space, opts.tol, opts.base)
    A = subspace_from_doc(doc, S, opts.tol)
    if opts.point is None:
        raise ParseError("decompose needs --point")
    c = parse_point(opts.point)
    r = transversality.decompose(S, A, c, opts.tol, force=opts.force)
    details = {"a": r.a, "n": r.nvec, "d": r.d, "failed": r.failed, "forced": r.forced,
               "in_subdiff_domain": subspaces.contains(A, r.a, opts.tol)}
    inputs = {"doc": doc, "space": opts.space_doc, "point": opts.point, "force": opts.force}
    return make_report("decompose", inputs, opts.tol, opts.seed, r.ok,
                       label="decomposed" if r.ok else "postconditions failed",
                       witnesses=[r.a, r.nvec], residuals=r.residuals, details=details)


def cmd_conjugate(doc, opts) -> Dict[str, Any]:
    S = _resolve_space(doc, opts.space, opts.tol, opts.base)
    f = functional_from_doc(doc, S, opts.tol)
    if opts.at is None:
        raise ParseError("conjugate needs --at")
    d = parse_point(opts.at)
    cv = functionals.conjugate(f, core.as_vector(S, d), opts.tol)
    classical = functionals.euclidean_conjugate_eval(f, core.iota(S, d), opts.tol)
    agree = (math.isinf(cv.value) and math.isinf(classical)) or (
        math.isfinite(cv.value) and math.isfinite(classical)
        and abs(cv.value - classical) <= 1e-8 * (1 + abs(cv.value)))
    details = {"value": cv.value, "euclidean_route": classical, "routes_agree": agree}
    witnesses = [cv.maximizer] if cv.maximizer is not None else None
    inputs = {"doc": doc, "space": opts.space_doc, "at": opts.at}
    return make_report("conjugate", inputs, opts.tol, opts.seed, True,
                       label="finite" if math.isfinite(cv.value) else "infinite",
                       witnesses=witnesses, details=details)


def cmd_relation(doc, opts) -> Dict[str, Any]:
    R = relation_from_doc(doc, opts.tol)
    action = opts.action
    inputs = {"doc": doc, "action": action, "method": opts.method}
    if action == "adjoint":
        Rs = relations.adjoint(R, opts.tol)
        return make_report("relation", inputs, opts.tol, opts.seed, True, label="adjoint",
                           details={"dim": Rs.sub.k, "basis": Rs.sub.basis.T})
    if action == "monotone":
        ok = relations.is_monotone(R, opts.tol)
        return make_report("relation", inputs, opts.tol, opts.seed, ok,
                           label="monotone" if ok else "not monotone")
    if action == "maximal":
        method = opts.method or "via_complement"
        if method == "all":
            verdicts = {m: relations.is_maximal_monotone(R, opts.tol, m).maximal for m in relations.METHODS}
            if len(set(verdicts.values())) != 1:
                raise SsdbError(f"methods disagree: {verdicts}")
            ok = next(iter(verdicts.values()))
            return make_report("relation", inputs, opts.tol, opts.seed, ok,
                               label="maximal monotone" if ok else "not maximal", details=verdicts)
        v = relations.is_maximal_monotone(R, opts.tol, method)
        witnesses = [v.witness] if v.witness is not None else None
        return make_report("relation", inputs, opts.tol, opts.seed, v.maximal,
                           label="maximal monotone" if v.maximal else "not maximal",
                           witnesses=witnesses, details={"method": method})
    raise ParseError(f"unknown relation action {action!r}")


def cmd_demo(opts) -> Dict[str, Any]:
    """Replay the worked examples and report each against its expected outcome."""
    tol = opts.tol
    items = {}
    R3 = core.r3_swap()

    def helix(lam, thetas):
        return subspaces.PointSet(R3, [[math.cos(t), math.sin(t), lam * t] for t in thetas])

    ok, _ = subspaces.is_q_positive_pointset(helix(1.0, [0.5 * i for i in range(13)]), tol)
    items["helix_q_positive"] = {"value": ok, "expected": True, "match": ok}

    thetas = [0.0, math.pi / 2, math.pi, 3 * math.pi / 2]
    ok, w = subspaces.is_q_positive_pointset(helix(0.5, thetas), tol)
    expected = -1 + math.pi**2 / 32
    match = (not ok) and (w.i, w.j) == (0, 1) and abs(w.value - expected) <= 1e-6
    items["half_helix_violation"] = {"value": w.value if w else None, "pair_thetas": [thetas[w.i], thetas[w.j]] if w else None,
                                     "expected": expected, "match": match}

    A = subspaces.make_subspace(R3, [[1.0, -1.0, 2.0]], tol)
    pos = subspaces.is_q_positive(A, tol)
    items["line_q_positive"] = {"value": pos, "expected": True, "match": pos}
    mx = subspaces.is_maximal_q_positive(A, tol)
    items["line_maximal"] = {"value": mx.maximal, "witness": mx.witness, "expected": False, "match": not mx.maximal}
    inf_val = subspaces.inf_q_over_translate(A, [1.0, 1.0, 0.0], tol)
    items["line_inf_translate"] = {"value": inf_val, "expected": 1.0, "match": abs(inf_val - 1.0) <= 1e-9}

    proj = subspaces.PointSet(core.product(1), [[t, -t] for t in (-1.0, 0.0, 1.0)])
    ok, _ = subspaces.is_q_positive_pointset(proj, tol)
    items["line_projection_monotone"] = {"value": ok, "expected": False, "match": not ok}

    pts = [[m1, m2, t] for (m1, m2) in [(0.0, 0.0), (1.0, 1.0)] for t in (-2.0, 0.0, 3.0)]
    ok, _ = subspaces.is_q_positive_pointset(subspaces.PointSet(R3, pts), tol)
    items["monotone_times_line_q_positive"] = {"value": ok, "expected": True, "match": ok}

    G = relations.relation_from_graph(np.eye(1), tol)
    mx = subspaces.is_maximal_q_positive(G.sub, tol)
    items["identity_graph_maximal"] = {"value": mx.maximal, "expected": True, "match": mx.maximal}

    all_match = all(item["match"] for item in items.values())
    return make_report("demo", {"demo": sorted(items)}, tol, opts.seed, all_match,
                       label="all examples reproduced" if all_match else "mismatch", details=items)


COMMANDS = {
    "validate": cmd_validate,
    "check-positive": cmd_check_positive,
    "complement": cmd_complement,
    "check-maximal": cmd_check_maximal,
    "decompose": cmd_decompose,
    "conjugate": cmd_conjugate,
    "relation": cmd_relation,
}


def run_command(command: str, doc_ref: Optional[str], opts) -> Dict[str, Any]:
    """Run one command and always return a report (errors become error reports)."""
    try:
        if command == "demo":
            return cmd_demo(opts)
        doc = load_doc(doc_ref, None)
        opts.base = Path(doc_ref).parent if doc_ref and not doc_ref.strip().startswith("{") and doc_ref != "-" else None
        return COMMANDS[command](doc, opts)
    except (SsdbError, ValueError) as exc:
        return error_report(command, exc)


def cmd_batch(directory: str, command: str, opts) -> Dict[str, Any]:
    files = sorted(Path(directory).glob("*.json"))
    if not files:
        raise ParseError(f"no *.json documents in {directory!r}")

    def one(path: Path):
        local = argparse.Namespace(**vars(opts))
        return path.name, run_command(command, str(path), local)

    with ThreadPoolExecutor(max_workers=opts.jobs) as pool:
        results = dict(pool.map(one, files))
    codes = {name: exit_code(r) for name, r in results.items()}
    verdict = all(code == 0 for code in codes.values())
    report = make_report("batch", {"command": command, "files": sorted(results)}, opts.tol, opts.seed, verdict,
                         details={"exit_codes": codes})
    report["reports"] = results
    if any(code == 2 for code in codes.values()):
        report["error"] = "BatchErrors"
        report["message"] = "one or more documents failed"
    return report


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="base tolerance (default 1e-9)")
    common.add_argument("--rank-tol", type=float, default=argparse.SUPPRESS, help="rank cutoff (default 1e-10)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help=f"oracle seed (default {DEFAULT_SEED})")
    common.add_argument("--space", default=argparse.SUPPRESS, help="space document overriding/supplying 'space'")

    parser = argparse.ArgumentParser(prog="ssdb", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="validate a space document")
    p.add_argument("doc")
    p = sub.add_parser("check-positive", parents=[common], help="q-positivity of a subspace or point set")
    p.add_argument("doc")
    p = sub.add_parser("complement", parents=[common], help="basis of the q-complement")
    p.add_argument("doc")
    p = sub.add_parser("check-maximal", parents=[common], help="maximal q-positivity of a subspace")
    p.add_argument("doc")
    p.add_argument("--method", choices=("theorem", "oracle"), default="theorem")
    p.add_argument("--trials", type=int, default=2000)
    p = sub.add_parser("decompose", parents=[common], help="split a point as a - n")
    p.add_argument("doc")
    p.add_argument("--point", required=True, help='comma separated, e.g. "1,-1,2"')
    p.add_argument("--force", action="store_true", help="run even if the complement is not q-negative")
    p = sub.add_parser("conjugate", parents=[common], help="conjugate of a functional at a point")
    p.add_argument("doc")
    p.add_argument("--at", required=True)
    p = sub.add_parser("relation", parents=[common], help="linear relation queries")
    p.add_argument("doc")
    p.add_argument("action", choices=("adjoint", "monotone", "maximal"))
    p.add_argument("--method", choices=relations.METHODS + ("all",), default="via_complement")
    sub.add_parser("demo", parents=[common], help="replay the worked examples")
    p = sub.add_parser("batch", parents=[common], help="run one command over every *.json in a directory")
    p.add_argument("directory")
    p.add_argument("--command", dest="batch_command", required=True, choices=sorted(COMMANDS))
    p.add_argument("--method", default=None)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--point", default=None)
    p.add_argument("--at", default=None)
    p.add_argument("--force", action="store_true")
    p.add_argument("--action", default="monotone", choices=("adjoint", "monotone", "maximal"))
    p.add_argument("--jobs", type=int, default=4)
    return parser


def _options(ns: argparse.Namespace) -> argparse.Namespace:
    opts = argparse.Namespace(
        format=getattr(ns, "format", "json"),
        tol=Tolerance(getattr(ns, "tol", 1e-9), getattr(ns, "rank_tol", 1e-10)),
        seed=getattr(ns, "seed", DEFAULT_SEED),
        method=getattr(ns, "method", None),
        trials=getattr(ns, "trials", 2000),
        point=getattr(ns, "point", None),
        at=getattr(ns, "at", None),
        force=getattr(ns, "force", False),
        action=getattr(ns, "action", None),
        jobs=getattr(ns, "jobs", 4),
        base=None,
        space=None,
        space_doc=None,
    )
    if getattr(ns, "space", None) is not None:
        opts.space_doc = load_doc(ns.space)
        opts.space = space_from_doc(opts.space_doc, opts.tol)
    return opts


def format_text(report: Dict[str, Any]) -> str:
    lines = [f"{report.get('command')}: " + (
        f"ERROR {report['error']}: {report.get('message', '')}" if "error" in report
        else f"{report.get('verdict')}" + (f" ({report['label']})" if "label" in report else ""))]
    for key in ("residuals", "details"):
        for name, value in sorted((report.get(key) or {}).items()):
            if name == "reports":
                continue
            lines.append(f"  {name}: {value}")
    for w in report.get("witnesses") or []:
        lines.append(f"  witness: {w}")
    for name, sub in sorted((report.get("reports") or {}).items()):
        lines.append(f"  [{name}] " + format_text(sub).replace("\n", "\n  "))
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    command = ns.command
    try:
        opts = _options(ns)
    except (SsdbError, ValueError) as exc:
        report = error_report(command, exc)
        print(dumps(report))
        return 2
    if command == "batch":
        opts.method = ns.method
        opts.action = ns.action
        try:
            report = cmd_batch(ns.directory, ns.batch_command, opts)
        except (SsdbError, ValueError) as exc:
            report = error_report(command, exc)
    else:
        report = run_command(command, getattr(ns, "doc", None), opts)
    print(format_text(report) if opts.format == "text" else dumps(report))
    return exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
