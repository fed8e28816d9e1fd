"""``cgpower`` command-line front-end.

Commands: ``analyze``, ``scm``, ``verify`` and ``qubit-sweep``. Floats are
written in shortest round-trip form, so emitted JSON re-parses to the same
values. Exit codes: 0 success, 1 failed verification or cross-check,
2 malformed input or out-of-range parameter, 3 non-unital channel,
4 unitary-only measure requested for a non-unitary channel.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import additive
from .channels import (
    CHANNEL_TOL,
    ChannelError,
    NonUnitalChannelError,
    NotUnitaryError,
    SchemaError,
    _complex_matrix_from_json,
    channel_from_dict,
    qubit_unitary,
)
from .coherence import (
    cgp_g,
    cgp_geometric_f,
    cgp_operator_norm,
    cgp_permutation_distance,
    cgp_trace_norm,
    coherence_matrix,
    transfer_matrix,
)
from .ensembles import (
    cgp_ensemble,
    cgp_qubit_symmetric,
    qubit_alpha_to_perm_invariant,
    scm_dirichlet_mc,
    scm_from_dict,
    scm_haar,
    scm_perm_invariant,
    scm_qubit,
    scm_to_dict,
    scm_vertex,
)
from .opspace import BasisProjectorSet
from .verify import run_verify

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_SCHEMA = 2
EXIT_NON_UNITAL = 3
EXIT_NOT_UNITARY = 4

MEASURES = ("trace", "opnorm", "tilde", "geometric_f", "g", "ensemble",
            "phi_p", "phi_g", "phi_gtilde", "phi_alpha:<alpha>")
UNITARY_ONLY = ("tilde", "geometric_f", "phi_p", "phi_g", "phi_gtilde", "phi_alpha")
DEFAULT_MEASURES = "trace,opnorm,g,ensemble"
DEFAULT_SAMPLES = 100_000


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# -- input ----------------------------------------------------------------------

def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_SCHEMA) from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON ({exc})", EXIT_SCHEMA) from exc


def load_channel(path: str, tol: float = CHANNEL_TOL):
    try:
        return channel_from_dict(_load_json(path), tol)
    except SchemaError as exc:
        raise CliError(f"{path}: {exc}", EXIT_SCHEMA) from exc
    except NonUnitalChannelError as exc:
        raise CliError(f"{path}: {exc}", EXIT_NON_UNITAL) from exc
    except (ChannelError, ValueError) as exc:
        raise CliError(f"{path}: {exc}", EXIT_SCHEMA) from exc


def load_basis(path: str) -> BasisProjectorSet:
    """Basis file: a ``[re, im]`` matrix, bare or under a ``basis`` key."""
    doc = _load_json(path)
    if isinstance(doc, dict):
        doc = doc.get("basis", doc.get("matrix"))
    try:
        return BasisProjectorSet(_complex_matrix_from_json(doc, "basis"))
    except ValueError as exc:
        raise CliError(f"{path}: {exc}", EXIT_SCHEMA) from exc


def parse_scm(spec: str, d: int, n_samples: int, seed: int):
    """An SCM from a JSON file path or an inline spec.

    Inline forms: ``haar``, ``vertex``, ``perm_invariant:<alpha>`` and
    ``dirichlet[:<p1>,<p2>,...]``.
    """
    try:
        if os.path.exists(spec):
            S = scm_from_dict(_load_json(spec), seed, n_samples)
        else:
            kind, _, arg = spec.partition(":")
            S = build_scm(kind, d, arg or None, n_samples, seed)
    except SchemaError as exc:
        raise CliError(str(exc), EXIT_SCHEMA) from exc
    if S.dim != d:
        raise CliError(f"SCM dimension {S.dim} differs from channel dimension {d}", EXIT_SCHEMA)
    return S


def build_scm(kind: str, d: int, arg, n_samples: int, seed: int):
    try:
        if kind == "haar":
            return scm_haar(d)
        if kind == "vertex":
            return scm_vertex(d)
        if kind == "perm_invariant":
            if arg is None:
                raise CliError("perm_invariant needs an alpha", EXIT_SCHEMA)
            return scm_perm_invariant(d, float(arg))
        if kind == "dirichlet":
            params = [1.0] * d if arg is None else [float(x) for x in str(arg).split(",")]
            return scm_dirichlet_mc(d, params, n_samples, seed)
    except (ValueError, TypeError) as exc:
        if isinstance(exc, CliError):
            raise
        raise CliError(str(exc), EXIT_SCHEMA) from exc
    raise CliError(f"unknown SCM kind {kind!r} (haar, vertex, perm_invariant, dirichlet)", EXIT_SCHEMA)


def parse_measures(text: str) -> list:
    names = [m.strip() for m in text.split(",") if m.strip()]
    if not names:
        raise CliError("no measures requested", EXIT_SCHEMA)
    for name in names:
        base, sep, arg = name.partition(":")
        if base == "phi_alpha":
            try:
                alpha = float(arg)
            except ValueError:
                raise CliError(f"phi_alpha needs a numeric order, got {name!r}", EXIT_SCHEMA) from None
            if not 0.0 <= alpha <= 2.0:
                raise CliError(f"phi_alpha order must lie in [0, 2], got {alpha}", EXIT_SCHEMA)
        elif sep or base not in MEASURES:
            raise CliError(f"unknown measure {name!r}; known: {', '.join(MEASURES)}", EXIT_SCHEMA)
    return names


# -- analysis -------------------------------------------------------------------

def analyze(ch, measures, basis=None, scm_spec="haar", n_samples=DEFAULT_SAMPLES, seed=0,
            include_matrices=False) -> dict:
    """Compute the requested measures and return the report dict."""
    B = basis if basis is not None else ch.basis
    d = ch.dim
    for name in measures:
        if name.partition(":")[0] in UNITARY_ONLY and not ch.is_unitary:
            raise CliError(f"measure {name!r} is defined for unitary channels only, "
                           f"but {ch.label!r} has {ch.n_kraus} Kraus operators", EXIT_NOT_UNITARY)
    C = coherence_matrix(ch, B)
    X = transfer_matrix(ch.unitary(), B) if ch.is_unitary else None
    S = None
    report = {"channel_label": ch.label, "dim": d, "measures": {}}
    values = report["measures"]
    for name in measures:
        base, _, arg = name.partition(":")
        if base == "trace":
            values[name] = cgp_trace_norm(C)
        elif base == "opnorm":
            values[name] = cgp_operator_norm(C)
        elif base == "g":
            values[name] = cgp_g(ch, B)
        elif base == "ensemble":
            if S is None:
                S = parse_scm(scm_spec, d, n_samples, seed)
            values[name] = cgp_ensemble(C, S)
        elif base == "tilde":
            value, perm = cgp_permutation_distance(X)
            values[name] = value
            report["witness"] = list(perm)
        elif base == "geometric_f":
            values[name] = cgp_geometric_f(ch, n_samples, seed, B).as_dict()
        elif base == "phi_p":
            values[name] = additive.phi_p(X)
        elif base == "phi_g":
            values[name] = additive.phi_g(X)
        elif base == "phi_gtilde":
            values[name] = additive.phi_g_tilde(X)
        elif base == "phi_alpha":
            values[name] = additive.phi_alpha(X, float(arg))
    if S is not None:
        report["scm"] = S.provenance
        if S.std_error is not None:
            report["scm_n_samples"] = S.n_samples
            report["scm_seed"] = S.seed
    if include_matrices:
        report["matrices"] = {"C": _rows(C)}
        if X is not None:
            report["matrices"]["X"] = _rows(X)
        if S is not None:
            report["matrices"]["S"] = _rows(S.entries)
    return report


def _rows(M) -> list:
    return [[float(x) for x in row] for row in np.asarray(M, dtype=float)]


# -- qubit sweep ----------------------------------------------------------------

QUBIT_COLUMNS = ("a2", "trace", "tilde", "ensemble")


def qubit_sweep(n_points: int, alpha: float, tol: float = 1e-10) -> list:
    """Closed-form qubit measures on a uniform ``|a|^2`` grid.

    Each row is recomputed through the matrix pipeline (transfer matrix,
    coherence matrix, assignment, SCM contraction) and must agree to ``tol``.
    """
    if n_points < 2:
        raise CliError("qubit-sweep needs at least 2 points", EXIT_SCHEMA)
    try:
        S = scm_qubit(alpha)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_SCHEMA) from exc
    rows = []
    for t in np.linspace(0.0, 1.0, n_points):
        t = float(t)
        a, b = np.sqrt(t), np.sqrt(1.0 - t)
        closed = (4.0 * t * (1.0 - t), 4.0 * min(t * t, (1.0 - t) ** 2), cgp_qubit_symmetric(a, b, alpha))
        X = transfer_matrix(qubit_unitary(a, b))
        C = np.eye(2) - X.T @ X
        pipeline = (cgp_trace_norm(C), cgp_permutation_distance(X)[0], cgp_ensemble(C, S))
        err = max(abs(x - y) for x, y in zip(closed, pipeline))
        if err > tol:
            raise CliError(f"qubit row |a|^2={t}: closed form and matrix pipeline differ by {err:.3g}",
                           EXIT_FAILED)
        rows.append((t,) + closed)
    return rows


def qubit_metadata(alpha: float) -> dict:
    return {
        "alpha": alpha,
        "alpha_convention": "qubit: S = alpha I + (1/2 - alpha) sigma_x, alpha = E[p^2] in [1/4, 1/2]",
        "alpha_perm_invariant": qubit_alpha_to_perm_invariant(alpha),
        "alpha_perm_invariant_convention": "S = a' I + (1/d - a') J/d with a' = 2 alpha - 1/2",
    }


# -- output ---------------------------------------------------------------------

def _fmt(x) -> str:
    # repr gives the shortest string that round-trips
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def to_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _table(header, rows) -> str:
    cells = [list(header)] + [[_fmt(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(c) for c in r])
    return buf.getvalue()


def _measure_rows(report):
    rows = []
    for name, v in report["measures"].items():
        if isinstance(v, dict):
            rows.append((name, v["value"], v["std_error"], v["n_samples"], v["seed"]))
        else:
            rows.append((name, v, "", "", ""))
    return rows


def render_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return to_json(report)
    header = ("measure", "value", "std_error", "n_samples", "seed")
    rows = _measure_rows(report)
    return _csv(header, rows) if fmt == "csv" else _table(header, rows)


def render_verify(report: dict, fmt: str) -> str:
    if fmt == "json":
        return to_json(report)
    header = ("check", "instances", "max_violation", "tolerance", "passed")
    rows = [(c["name"], c["instances"], c["max_violation"], c["tolerance"], c["passed"])
            for c in report["checks"]]
    return _csv(header, rows) if fmt == "csv" else _table(header, rows)


def render_scm(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return to_json(doc)
    rows = doc["entries"]
    header = tuple(f"s{j}" for j in range(len(rows)))
    return _csv(header, rows) if fmt == "csv" else _table(header, rows)


# -- commands -------------------------------------------------------------------

def cmd_analyze(args) -> str:
    ch = load_channel(args.channel_file, args.tolerance if args.tolerance is not None else CHANNEL_TOL)
    basis = load_basis(args.basis) if args.basis else None
    if basis is not None and basis.dim != ch.dim:
        raise CliError(f"basis dimension {basis.dim} differs from channel dimension {ch.dim}", EXIT_SCHEMA)
    samples = args.samples if args.samples is not None else DEFAULT_SAMPLES
    report = analyze(ch, parse_measures(args.measures), basis, args.scm, samples, args.seed,
                     args.include_matrices)
    return render_report(report, args.output)


def cmd_scm(args) -> str:
    samples = args.samples if args.samples is not None else DEFAULT_SAMPLES
    if args.dim < 1:
        raise CliError("--dim must be >= 1", EXIT_SCHEMA)
    arg = args.alpha if args.kind == "perm_invariant" else args.params
    if args.kind == "perm_invariant" and arg is None:
        raise CliError("perm_invariant needs --alpha", EXIT_SCHEMA)
    S = build_scm(args.kind, args.dim, arg, samples, args.seed)
    return render_scm(scm_to_dict(S), args.output)


def cmd_verify(args) -> tuple:
    dims = tuple(int(x) for x in args.dims.split(","))
    samples = args.samples if args.samples is not None else 20_000
    report = run_verify(dims, args.seed, args.channels, samples)
    return render_verify(report, args.output), report["passed"]


def cmd_qubit_sweep(args) -> str:
    tol = args.tolerance if args.tolerance is not None else 1e-10
    rows = qubit_sweep(args.points, args.alpha, tol)
    fmt = args.output or "csv"
    if fmt == "json":
        doc = qubit_metadata(args.alpha)
        doc["columns"] = list(QUBIT_COLUMNS)
        doc["rows"] = [list(r) for r in rows]
        return to_json(doc)
    return _csv(QUBIT_COLUMNS, rows) if fmt == "csv" else _table(QUBIT_COLUMNS, rows)


def _common(suppress: bool) -> argparse.ArgumentParser:
    # flags accepted before and after the command name
    p = argparse.ArgumentParser(add_help=False)
    default = argparse.SUPPRESS if suppress else None
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS if suppress else 0,
                   help="base seed (non-negative)")
    p.add_argument("--samples", type=int, default=default, help="Monte-Carlo sample count")
    p.add_argument("--output", choices=("json", "csv", "table"), default=default,
                   help="report format")
    p.add_argument("--tolerance", type=float, default=default,
                   help="channel validation tolerance (analyze) or cross-check tolerance (qubit-sweep)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cgpower", parents=[_common(False)],
                                     description="Coherence-generating power of unital channels.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common(True)

    p = sub.add_parser("analyze", parents=[common], help="measures of one channel")
    p.add_argument("channel_file")
    p.add_argument("--measures", default=DEFAULT_MEASURES,
                   help=f"comma-separated subset of: {', '.join(MEASURES)}")
    p.add_argument("--basis", help="JSON file with the basis unitary")
    p.add_argument("--scm", default="haar",
                   help="SCM JSON file or inline spec (haar, vertex, perm_invariant:A, dirichlet:p1,...)")
    p.add_argument("--include-matrices", action="store_true", help="embed C, X and S in the report")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("scm", parents=[common], help="emit a simplex correlation matrix")
    p.add_argument("kind", choices=("haar", "vertex", "perm_invariant", "dirichlet"))
    p.add_argument("--dim", "-d", type=int, required=True)
    p.add_argument("--alpha", type=float, help="perm_invariant weight, 0 <= alpha <= 1/d")
    p.add_argument("--params", help="comma-separated Dirichlet parameters (default all ones)")
    p.set_defaults(func=cmd_scm)

    p = sub.add_parser("verify", parents=[common], help="run the cross-oracle invariant suite")
    p.add_argument("--dims", default="2,3,4")
    p.add_argument("--channels", type=int, default=50)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("qubit-sweep", parents=[common], help="qubit closed forms on an |a|^2 grid")
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--alpha", type=float, default=1.0 / 3.0, help="qubit E[p^2], in [1/4, 1/2]")
    p.set_defaults(func=cmd_qubit_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.output is None and args.command != "qubit-sweep":
        args.output = "json"
    if args.seed < 0:
        print("cgpower: error: --seed must be non-negative", file=sys.stderr)
        return EXIT_SCHEMA
    try:
        result = args.func(args)
    except CliError as exc:
        print(f"cgpower: error: {exc}", file=sys.stderr)
        return exc.code
    except NotUnitaryError as exc:
        print(f"cgpower: error: {exc}", file=sys.stderr)
        return EXIT_NOT_UNITARY
    code = EXIT_OK
    if isinstance(result, tuple):
        result, passed = result
        code = EXIT_OK if passed else EXIT_FAILED
    sys.stdout.write(result)
    return code


if __name__ == "__main__":
    sys.exit(main())
