"""Command line front end.

Every command prints a JSON run report on stdout; ``--out`` receives the
command's main artifact (witness, CSV matrix, zero structure, kernel, ...).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import __version__
from .certify import (
    SamplingError, check_null_equivalence, min_eigen, verify_spd_empirical, witness_for_support,
)
from .kernel import (
    AliasingError, ChebKernel, DuplicatePointsError, NonPositiveCoefficients, PointConfig,
    fit_coefficients, gram,
)
from .support import Outcome, SchemaError, SupportSpec, coset_avoids_view, decide_spd, decide_spd_bounded, in_view
from .zeroset import build_table, detect_structure, verify_not_all_zero

SCHEMA = "torusspd.report/1"

EXIT_OK = 0
EXIT_NOT_SPD = 1
EXIT_BAD_INPUT = 2
EXIT_IS_SPD = 3

DEFAULT_TOL = {"counterexample": 1e-10, "zeroset": 1e-9, "fit": 1e-8}


class InputError(Exception):
    pass


def write_atomic(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _read(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_json(raw: bytes, what: str):
    try:
        return json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(f"{what}: invalid JSON ({exc})") from exc


def _load_numbers(raw: bytes, path: str):
    """JSON (list, or object with the data under a single key) or CSV."""
    if path.endswith(".csv"):
        rows = [r for r in csv.reader(io.StringIO(raw.decode())) if r]
        try:
            return [[float(x) for x in r] for r in rows]
        except ValueError as exc:
            raise InputError(f"{path}: {exc}") from exc
    return _load_json(raw, path)


def _coeffs(obj, n: int) -> np.ndarray:
    if isinstance(obj, dict):
        obj = obj.get("c")
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed coefficients: {exc}") from exc
    if arr.ndim == 2 and arr.shape == (n, 2):
        arr = arr[:, 0] + 1j * arr[:, 1]  # [re, im] pairs
    elif arr.ndim == 2 and 1 in arr.shape:
        arr = arr.reshape(-1)
    if arr.ndim != 1 or len(arr) != n:
        raise InputError(f"expected {n} coefficients")
    return arr


def cmd_decide(args, inputs):
    spec = SupportSpec.from_json(_load_json(inputs[0], "support"))
    v = decide_spd(spec)
    result = {"verdict": v.to_json()}
    if v.witness is not None:
        W = v.witness
        hits = sum(in_view(spec, p) for p in W.points_in_box(-args.window, args.window + 1))
        result["soundness"] = {"exact_avoidance": coset_avoids_view(spec, W),
                               "window": args.window, "window_hits": hits}
    if args.max_modulus:
        o = decide_spd_bounded(spec, args.max_modulus)
        result["oracle"] = o.to_json()
        result["oracle_agrees"] = o.outcome is Outcome.UNKNOWN or o.strict == v.strict
    return result, (EXIT_OK if v.strict else EXIT_NOT_SPD), dumps(result)


def cmd_counterexample(args, inputs):
    spec = SupportSpec.from_json(_load_json(inputs[0], "support"))
    w = witness_for_support(spec, args.window)
    if w is None:
        return {"verdict": "strictly_pd"}, EXIT_IS_SPD, None
    result = {"witness": w.to_json(), "relative_residual": w.relative_residual,
              "points": len(w.config), "kernel_terms": len(w.kernel.coeffs),
              "sound": w.relative_residual <= args.tol}
    if spec.mode == "real" and w.kernel.coeffs:
        result["equivalence_check"] = bool(check_null_equivalence(w.kernel, w.config, w.c, args.tol))
    code = EXIT_OK if result["sound"] else EXIT_NOT_SPD
    return result, code, dumps(w.to_json())


def _kernel(raw) -> ChebKernel:
    try:
        return ChebKernel.from_json(_load_json(raw, "kernel"))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed kernel: {exc}") from exc


def _points(raw) -> PointConfig:
    try:
        return PointConfig.from_json(_load_json(raw, "points"))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def cmd_gram(args, inputs):
    K, cfg = _kernel(inputs[0]), _points(inputs[1])
    A = gram(K, cfg)
    lam = min_eigen(A)
    buf = io.StringIO()
    for row in A:
        buf.write(",".join(format(x, ".17g") for x in row) + "\n")
    return {"n": len(cfg), "min_eigenvalue": lam}, EXIT_OK, buf.getvalue()


def cmd_zeroset(args, inputs):
    cfg = _points(inputs[0])
    if cfg.exact is None:
        raise InputError("points need the exact rational form")
    c = _coeffs(_load_numbers(inputs[1], args.coeffs), len(cfg))
    cfg.check_distinct()
    S = detect_structure(build_table(cfg, c), args.tol)
    out = S.to_json()
    result = {"structure": out, "lemma_holds": verify_not_all_zero(cfg, c)}
    return result, EXIT_OK, dumps(out)


def cmd_fit(args, inputs):
    obj = _load_numbers(inputs[0], args.samples)
    if isinstance(obj, dict):
        obj = obj.get("samples")
    try:
        S = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed samples: {exc}") from exc
    try:
        K = fit_coefficients(S, args.degree, neg_tol=args.tol)
    except (AliasingError, NonPositiveCoefficients) as exc:
        diag = {"error": type(exc).__name__, "message": str(exc),
                "offending": [[list(kl), v] for kl, v in exc.offending]}
        return diag, EXIT_NOT_SPD, None
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return {"kernel": K.to_json(), "grid": S.shape[0]}, EXIT_OK, dumps(K.to_json())


def cmd_verify(args, inputs):
    K = _kernel(inputs[0])
    rep = verify_spd_empirical(K, args.points, args.trials, args.seed, args.min_separation)
    out = rep.to_json()
    positive = rep.min_eigenvalue is None or rep.min_eigenvalue > 0
    return {"report": out, "all_positive": positive}, (EXIT_OK if positive else EXIT_NOT_SPD), dumps(out)


COMMANDS = {
    "decide": (cmd_decide, ["support"]),
    "counterexample": (cmd_counterexample, ["support"]),
    "gram": (cmd_gram, ["kernel", "points"]),
    "zeroset": (cmd_zeroset, ["points", "coeffs"]),
    "fit": (cmd_fit, ["samples"]),
    "verify": (cmd_verify, ["kernel"]),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="torusspd", description="Strict positive definiteness on the torus")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, tol=True):
        sp.add_argument("--out", help="write the main artifact here (atomically)")
        if tol:
            sp.add_argument("--tol", type=float, default=None)

    sp = sub.add_parser("decide", help="decide a support specification")
    sp.add_argument("support")
    sp.add_argument("--max-modulus", type=int, default=0, help="also run the bounded search oracle")
    sp.add_argument("--window", type=int, default=40, help="window for the witness scan")
    common(sp, tol=False)

    sp = sub.add_parser("counterexample", help="emit an explicit null witness")
    sp.add_argument("support")
    sp.add_argument("--window", type=int, default=None, help="kernel support window [0, W]^2")
    common(sp)

    sp = sub.add_parser("gram", help="Gram matrix as CSV")
    sp.add_argument("kernel")
    sp.add_argument("points")
    common(sp, tol=False)

    sp = sub.add_parser("zeroset", help="zero set structure of an exponential sum")
    sp.add_argument("points")
    sp.add_argument("coeffs")
    common(sp)

    sp = sub.add_parser("fit", help="fit cosine coefficients from grid samples")
    sp.add_argument("samples")
    sp.add_argument("--degree", type=int, required=True)
    common(sp)

    sp = sub.add_parser("verify", help="empirical positivity on random configurations")
    sp.add_argument("kernel")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--points", type=int, default=12)
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--min-separation", type=float, default=0.1)
    common(sp, tol=False)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func, names = COMMANDS[args.command]
    if getattr(args, "tol", None) is None and args.command in DEFAULT_TOL:
        args.tol = DEFAULT_TOL[args.command]
    t0 = time.perf_counter()
    try:
        inputs = [_read(getattr(args, n)) for n in names]
        result, code, artifact = func(args, inputs)
    except (InputError, SchemaError, DuplicatePointsError, SamplingError) as exc:
        print(dumps({"schema": SCHEMA, "command": args.command, "error": type(exc).__name__,
                     "message": str(exc)}), end="", file=sys.stderr)
        return EXIT_BAD_INPUT
    report = {
        "schema": SCHEMA,
        "command": args.command,
        "arguments": {k: v for k, v in sorted(vars(args).items()) if k != "command"},
        "inputs": {n: hashlib.sha256(raw).hexdigest() for n, raw in zip(names, inputs)},
        "result": result,
        "exit_code": code,
        "wall_time": round(time.perf_counter() - t0, 6),
    }
    if artifact is not None and args.out:
        write_atomic(args.out, artifact)
    sys.stdout.write(dumps(_finite(report)))
    return code


def _finite(obj):
    # JSON has no inf/nan
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


if __name__ == "__main__":
    sys.exit(main())
