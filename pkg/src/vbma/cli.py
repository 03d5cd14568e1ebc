"""Command line front end.

Exit codes: 0 when every check passes, 1 when a mathematical check fails
(the report carries a witness), 2 for unusable input.  Reports are JSON with
sorted keys; wall times are included only with ``--timing`` so that reports
are byte-identical across runs with the same seed and inputs.
"""

import argparse
import json
import math
import sys
import time
from importlib import resources

import jsonschema
import numpy as np

from . import __version__
from . import rank2, threefold, vortex
from .errors import CapacityError, InputError, InvariantViolation
from .forms import Curvature, curvature_power, vbma_residual
from .gram import Kind, Verdict, classify, gram_matrix, monte_carlo_min
from .seeding import suite_seed

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _schema(name):
    text = resources.files("vbma").joinpath("schemas", name).read_text(encoding="utf-8")
    return json.loads(text)


def jsonable(obj):
    """Convert numpy, complex, enum and verdict values into plain JSON data."""
    if isinstance(obj, Verdict):
        return jsonable(obj.to_dict())
    if isinstance(obj, Kind):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(float(obj.real)), jsonable(float(obj.imag))]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        return obj if math.isfinite(obj) else None
    return obj


def dumps(report):
    return json.dumps(jsonable(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


class Report:
    def __init__(self, command, timing=False):
        self.command = command
        self.timing = timing
        self.checks = []
        self.message = None
        self.started = time.perf_counter()

    def add(self, name, passed, witness=None, **fields):
        rec = {"name": name, "passed": bool(passed)}
        rec.update({k: v for k, v in fields.items() if v is not None})
        if not passed:
            rec["witness"] = witness if witness is not None else {"note": "no datum"}
        elif witness is not None:
            rec["witness"] = witness
        self.checks.append(rec)
        return rec

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks)

    def finish(self, status=None):
        status = status or ("pass" if self.passed else "fail")
        out = {"schema_version": 1, "tool_version": __version__,
               "command": self.command, "status": status, "checks": self.checks}
        if self.message:
            out["message"] = self.message
        if self.timing:
            out["wall_time"] = time.perf_counter() - self.started
        return jsonable(out)


def _verdict_fields(v):
    return {"verdict": str(v.kind), "min_eigenvalue": v.min_eigenvalue}


# ----------------------------------------------------------------- parsing


def _c(x):
    return complex(x[0], x[1])


def _cmatrix(rows, shape=None):
    if not all(len(r) == len(rows[0]) for r in rows):
        raise InputError("matrix rows have different lengths")
    M = np.array([[_c(x) for x in row] for row in rows], dtype=complex)
    if shape is not None and M.shape != shape:
        raise InputError(f"matrix has shape {M.shape}, expected {shape}")
    return M


def load_instance(path):
    """Parse and schema-check an instance file; raises ``InputError``."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: line {exc.lineno} column {exc.colno}: "
                         f"{exc.msg}") from None
    validator = jsonschema.Draft202012Validator(_schema("instance.schema.json"))
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise InputError(f"schema violation at {where}: {err.message}")
    return data["kind"], data["payload"]


# ------------------------------------------------------------------ checks


def _check_generic(p, tol, seed, rep):
    n, r = p["n"], p["r"]
    coeffs = p["coeffs"]
    if len(coeffs) != n or any(len(row) != n for row in coeffs):
        raise InputError(f"coeffs must be an {n} x {n} array of {r} x {r} matrices")
    c = np.array([[_cmatrix(m, (r, r)) for m in row] for row in coeffs])
    theta = Curvature(c)
    direct = gram_matrix(theta)
    polar = gram_matrix(theta, method="polarization")
    scale = max(1.0, float(np.max(np.abs(direct.matrix))))
    gap = float(np.max(np.abs(direct.matrix - polar.matrix))) / scale
    rep.add("gram_polarization", gap <= 1e-9, witness={"relative_gap": gap},
            tolerances={"relative": 1e-9})
    v = classify(direct, tol)
    rep.add("ma_verdict", True, **_verdict_fields(v),
            details={"kernel_dimension": v.kernel_dimension, "tol": v.tol},
            witness=v.witness if v.kind != Kind.POSITIVE else None)
    mc = monte_carlo_min(theta, trials=2000, seed=seed)
    lo = v.eigenvalues[0] - v.tol
    rep.add("monte_carlo_bound", mc >= lo, seed=seed,
            witness={"mc_min": mc, "lambda_min": v.eigenvalues[0]},
            tolerances={"absolute": v.tol})
    if "eta0" in p:
        res = vbma_residual(theta, p["eta0"])
        limit = tol * max(1.0, abs(p["eta0"]))
        rep.add("vbma_residual", res <= limit, residuals={"max_abs": res},
                witness={"residual": res}, tolerances={"absolute": limit})


def _check_rank2(p, tol, seed, rep):
    blocks = rank2.SurfaceBlocks(*(_cmatrix(p[k], (2, 2)) for k in "ABC"))
    eta0 = p["eta0"]
    theta = blocks.curvature()
    res = vbma_residual(theta, eta0)
    limit = tol * max(1.0, eta0)
    ok = res <= limit
    rep.add("vbma_residual", ok, residuals={"max_abs": res}, witness={"residual": res},
            tolerances={"absolute": limit})
    if not ok:
        return
    AC = blocks.A @ blocks.C + blocks.C @ blocks.A
    if np.linalg.eigvalsh(0.5 * (AC + AC.conj().T))[0] <= 0:
        raise InputError("{A, C} is not positive definite")
    v = classify(gram_matrix(theta))
    if v.kind == Kind.INDEFINITE:
        rep.add("rank2_positivity", True, **_verdict_fields(v),
                details={"note": "not MA-semi-positive; nothing to check"})
    else:
        rep.add("rank2_positivity", v.kind == Kind.POSITIVE, **_verdict_fields(v),
                witness={"kernel_vector": v.witness, "kernel_dimension": v.kernel_dimension})


def _vortex_suite(inst, rep, tol):
    leak, err = vortex.b_forms_agreement(inst)
    rep.add("decoupling", leak <= 1e-12 and err <= 1e-12,
            witness={"leak": leak, "block_error": err}, tolerances={"relative": 1e-12})
    kinds = [classify(B) for B in vortex.b_forms(inst).as_list()]
    full, _, combined = vortex.full_verdict(inst)
    rep.add("b_form_verdicts", full.kind == combined,
            verdict=str(full.kind), min_eigenvalue=full.min_eigenvalue,
            details={f"B{i + 1}": {"verdict": str(k.kind), "min_eigenvalue": k.min_eigenvalue,
                                   "kernel_dimension": k.kernel_dimension}
                     for i, k in enumerate(kinds)},
            witness={"full": str(full.kind), "combined": str(combined)})
    try:
        ch = vortex.schur_chain(inst)
        rep.add("schur_chain", True, details={
            "pprime": ch.pprime, "qprime": ch.qprime, "rprime": ch.rprime,
            "sprime": ch.sprime, "kinds": [str(k) for k in ch.kinds],
            "max_error": ch.max_error})
        case = vortex.classify_semidef_case(inst)
        rep.add("semidef_case", True, details={
            "case": case.case, "min_eigenvalue": case.min_eigenvalue,
            "pprime": case.pprime, "qv_norm": case.qv_norm})
    except InvariantViolation as exc:
        rep.add("schur_chain", False, witness={"error": str(exc)})
    return kinds, full


def _check_vortex(p, tol, seed, rep):
    n, r, k, t = p["n"], p["r"], p["k"], p["t_norm_sq"]
    vortex._validate(n, r, k, t)
    C = np.array([_c(x) for x in p["C"]], dtype=complex)
    if C.shape != (n,):
        raise InputError(f"C must have {n} entries")
    if ("A" in p) != ("Aprime" in p):
        raise InputError("A and Aprime must be given together")
    if "A" in p:
        A = _cmatrix(p["A"], (n, n))
        if np.max(np.abs(A - A.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(A))):
            raise InputError("A is not Hermitian")
        inst = vortex.VortexSurfaceInstance(n, r, float(k), float(t), C, A,
                                            float(p["Aprime"]), np.eye(n, dtype=complex))
    else:
        inst = vortex.solve_curvature(n, r, k, t, C)
    r1, r2 = inst.residuals()
    limit = tol * max(1.0, k + inst.c_norm_sq)
    ok = max(r1, r2) <= limit
    rep.add("vbma_residual", ok, residuals={"block": r1, "line": r2},
            witness={"block": r1, "line": r2}, tolerances={"absolute": limit})
    if ok:
        _vortex_suite(inst, rep, tol)


def _check_threefold(p, tol, seed, rep):
    a, b, l1, l2, c = (float(p[k]) for k in ("a", "b", "lambda1", "lambda2", "c"))
    for name, v in (("a", a), ("b", b), ("lambda1", l1), ("lambda2", l2), ("c", c)):
        if not v > 0:
            raise InputError(f"{name} must be positive")
    ell = np.array([_c(x) for x in p["ell"]], dtype=complex)
    x1, x2 = np.abs(ell) ** 2
    res = (abs(2 * b - a * (l1 * x2 + l2 * x1) - c), abs(2 * a * l1 * l2 - b * (x1 + x2) - c))
    limit = max(tol, threefold.REL_TOL) * max(1.0, c, 2 * b, 2 * a * l1 * l2)
    inside = threefold.region_p_contains(a, b, l1, l2, x1, x2)
    ok = max(res) <= limit and inside
    rep.add("vbma_residual", ok, residuals={"first": res[0], "second": res[1]},
            witness={"residuals": list(res), "in_region_p": inside, "ell_sq": [x1, x2]},
            tolerances={"absolute": limit})
    if not ok:
        return
    inst = threefold.ThreefoldInstance(a, b, l1, l2, ell, c)
    if "r2" in p:
        rep.add("vortex_consistency", inst.vortex_consistent(p["r2"]),
                witness={"a_plus_b": a + b, "expected": 4 * p["r2"] + 2})
    top = curvature_power(threefold.assemble_curvature(inst), 3).top()
    expect = threefold.vbma_constant(inst)
    gap = float(np.max(np.abs(top - expect * np.eye(2))))
    rep.add("cube_top", gap <= 1e-12 * max(1.0, expect), residuals={"max_abs": gap},
            witness={"top": top, "expected": expect})
    try:
        dec = threefold.det_decomposition(inst)
        data = threefold.build_X(inst)
        rep.add("det_identity", True, details={
            "detX": dec.detX, "Delta": dec.Delta, "lhs": dec.lhs, "rhs": dec.rhs,
            "relative_error": dec.rel_error, "c1": dec.c1, "c2": dec.c2, "c3": dec.c3,
            "f": dec.f, "g1": dec.g1, "g2": dec.g2}, tolerances={"relative": 1e-9})
        rep.add("detA_positive", data.detA_closed > 0,
                witness={"detA": data.detA, "detA_closed": data.detA_closed})
        rep.add("g_positive", dec.g1 > 0 and dec.g2 > 0, witness={"g1": dec.g1, "g2": dec.g2})
    except InvariantViolation as exc:
        rep.add("det_identity", False, witness={"error": str(exc)})
        return
    cmp_ = threefold.compare_restricted(inst)
    rep.add("restricted_gram", cmp_.agree and cmp_.model_error <= 1e-10,
            verdict=str(cmp_.kind_X), min_eigenvalue=cmp_.min_X,
            witness={"X": str(cmp_.kind_X), "H_W": str(cmp_.kind_HW),
                     "model_error": cmp_.model_error})


CHECKS = {"generic_curvature": _check_generic, "rank2_surface": _check_rank2,
          "vortex_surface": _check_vortex, "threefold": _check_threefold}


# ---------------------------------------------------------------- commands


def cmd_verify_counterexample(n, m, timing=False, samples=1000, seed=0):
    rep = Report({"name": "verify-counterexample", "n": n, "m": m, "seed": seed}, timing)
    if n < 2:
        raise InputError("the counterexample needs E_1 rank n >= 2")
    if m < 0:
        raise InputError("m must be non-negative")
    if m + 2 > vortex.MAX_N:
        raise CapacityError(f"lift with m = {m} needs dimension {m + 2} > {vortex.MAX_N}")
    k, r = 4.0, 1
    inst = vortex.counterexample(n, k=k, r=r)
    theta = vortex.assemble_curvature(inst)
    res = vbma_residual(theta, k)
    rep.add("vbma_residual", res <= 1e-12, residuals={"max_abs": res},
            witness={"residual": res}, tolerances={"absolute": 1e-12})
    kinds, _ = _vortex_suite(inst, rep, None)
    expect = [(Kind.STRICTLY_SEMI_POSITIVE, n - 1)] + [(Kind.POSITIVE, 0)] * 3
    got = [(v.kind, v.kernel_dimension) for v in kinds]
    rep.add("b_form_claims", got == expect,
            witness={"got": [[str(a), b] for a, b in got],
                     "expected": [[str(a), b] for a, b in expect]})
    ch = vortex.schur_chain(inst)
    vals = {"pprime": ch.pprime, "qprime": abs(ch.qprime), "rprime": ch.rprime,
            "sprime": ch.sprime}
    target = {"pprime": 0.0, "qprime": 0.0, "rprime": 0.0,
              "sprime": 1 / (4 * r) - 1 / (2 * inst.Bprime)}
    dev = max(abs(vals[key] - target[key]) for key in vals)
    rep.add("schur_values", dev <= 1e-12, details=vals, witness={"max_deviation": dev},
            tolerances={"absolute": 1e-12})
    case = vortex.classify_semidef_case(inst)
    c2 = inst.c_norm_sq
    ok = case.case == "Case1" and abs(c2 - k * (2 * r + 1)) <= 1e-12 * c2
    rep.add("case1", ok, witness={"case": case.case, "c_norm_sq": c2})
    if m >= 1:
        _, lr = vortex.lift(inst, m, samples=samples, seed=suite_seed(seed, "lift"))
        d = m + 2
        expected = k * math.factorial(d) / 2
        rep.add("lift_top", lr["top_error"] <= 1e-12 * expected,
                residuals={"max_abs": lr["top_error"]},
                details={"top": lr["top_coefficient"], "expected": expected},
                witness={"top_error": lr["top_error"]})
        v = lr["verdict"]
        rep.add("lift_verdict", v.kind == Kind.STRICTLY_SEMI_POSITIVE, **_verdict_fields(v),
                witness={"kernel_dimension": v.kernel_dimension})
        rep.add("lift_sufficient", lr["sufficient_min"] >= -1e-12,
                seed=suite_seed(seed, "lift"),
                details={"min": lr["sufficient_min"],
                         "cross_error": lr["sufficient_cross_error"]},
                witness={"min": lr["sufficient_min"]})
    return rep


def cmd_check(path, tol=1e-10, timing=False, seed=0):
    rep = Report({"name": "check", "input": str(path), "tol": tol}, timing)
    kind, payload = load_instance(path)
    rep.command["kind"] = kind
    CHECKS[kind](payload, tol, suite_seed(seed, "monte_carlo"), rep)
    return rep


def cmd_sweep(kind, trials, seed, params=None, samples=1000, timing=False):
    params = {k: v for k, v in (params or {}).items() if v is not None}
    rep = Report({"name": "sweep", "kind": kind, "trials": trials, "seed": seed,
                  "params": params, "samples": samples}, timing)
    if trials < 1:
        raise InputError("trials must be at least 1")
    s = suite_seed(seed, kind)
    if kind == "rank2":
        out = rank2.rank2_sweep(trials, s)
        ok = out["schur_violations"] == 0 and out["chain_violations"] == 0 \
            and out["quadratic_violations"] == 0
        rep.add("rank2_schur_inequality", ok, seed=s, details=out, witness=out.get("witness"),
                tolerances={"relative": out["tol"]})
    elif kind == "region_p":
        if params:
            missing = {"a", "b", "lambda1", "lambda2"} - set(params)
            if missing:
                raise InputError(f"region_p needs all of a, b, lambda1, lambda2; "
                                 f"missing {sorted(missing)}")
            out = threefold.region_p_sweep(params["a"], params["b"], params["lambda1"],
                                           params["lambda2"], samples=trials, seed=s,
                                           strict=False)
            ok = out["violations"] == 0
            if out["corner"] is not None:
                ok = ok and abs(out["corner"]["g2_relative"]) <= 1e-9
            rep.add("region_p_positivity", ok, seed=s, details=out,
                    witness={"point": out["witness"], "corner": out["corner"]})
        else:
            out = threefold.region_p_campaign(draws=trials, samples=samples, seed=s)
            rep.add("region_p_positivity", out["passed"], seed=s,
                    details={k: v for k, v in out.items() if k != "witness"},
                    witness=out["witness"], tolerances={"corner_relative": 1e-9,
                                                        "boundary_relative": 1e-9})
    elif kind == "threefold_det":
        out = threefold.det_identity_sweep(trials, seed=s)
        rep.add("threefold_det_identity", out["passed"], seed=s,
                details={k: v for k, v in out.items() if k != "witness"},
                witness=out["witness"], tolerances={"relative": out["rtol"]})
    else:
        raise InputError(f"unknown sweep kind {kind!r}")
    return rep


# -------------------------------------------------------------------- main


def build_parser():
    parser = argparse.ArgumentParser(prog="vbma", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--report", help="write the JSON report here instead of stdout")
        p.add_argument("--timing", action="store_true", help="include wall times")

    p = sub.add_parser("verify-counterexample", help="rebuild and check the vortex example")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    common(p)

    p = sub.add_parser("check", help="run the invariant suite on an instance file")
    p.add_argument("--input", required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=0)
    common(p)

    p = sub.add_parser("sweep", help="seeded randomised sweeps")
    p.add_argument("--kind", required=True, choices=["rank2", "region_p", "threefold_det"])
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1000,
                   help="points per parameter draw for region_p campaigns")
    for name in ("a", "b", "lambda1", "lambda2"):
        p.add_argument(f"--{name}", type=float)
    common(p)
    return parser


def _emit(report, path):
    text = dumps(report)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    command = {"name": args.command}
    try:
        if args.command == "verify-counterexample":
            rep = cmd_verify_counterexample(args.n, args.m, args.timing, seed=args.seed)
        elif args.command == "check":
            rep = cmd_check(args.input, args.tol, args.timing, seed=args.seed)
        else:
            params = {"a": args.a, "b": args.b, "lambda1": args.lambda1,
                      "lambda2": args.lambda2}
            rep = cmd_sweep(args.kind, args.trials, args.seed, params, args.samples,
                            args.timing)
    except InputError as exc:
        rep = Report(command, args.timing)
        rep.message = str(exc)
        _emit(rep.finish("error"), args.report)
        print(f"vbma: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantViolation as exc:
        rep = Report(command, args.timing)
        rep.add("invariant", False, witness={"error": str(exc)})
        _emit(rep.finish(), args.report)
        return EXIT_FAIL
    _emit(rep.finish(), args.report)
    return EXIT_PASS if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
