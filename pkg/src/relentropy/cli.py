"""Command-line front end.

Exit codes: 0 pass, 1 input error, 2 internal disagreement (a library bug
signal, or a failed check), 3 inconclusive counterexample search.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import entropy as ent
from . import lab
from .errors import ConsistencyError, DomainError, QuadratureError, SingularCaseError, ValidationError
from .hermitian import ProjectionChain, as_state, random_state
from .loewner import builtin, check_rep_consistency, integrability_diagnostics, spec_from_dict
from .matrixio import fmt_float, matrix_from_dict, read_matrix

EXIT_OK, EXIT_INPUT, EXIT_DISAGREE, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    phi: str = "fermionic"
    a: str | None = None
    b: str | None = None
    tol_lambda: float = 1e-9
    tol_t: float = 1e-9
    tol_agree: float = 1e-4
    seed: int | None = None
    trials: int = 1000
    ambient: int | None = None
    chain: str = "prefix"
    ranks: str | None = None
    chain_file: str | None = None
    dims: str = "4,3"
    tol: float = 1e-9
    counterexample: bool = False
    grid: int = 101
    out: str | None = None
    format: str = "json"

    def validate(self):
        for name in ("tol_lambda", "tol_t", "tol_agree", "tol"):
            if not getattr(self, name) > 0:
                raise InputError(f"--{name.replace('_', '-')} must be positive")
        if self.format not in ("json", "csv"):
            raise InputError("--format must be json or csv")


def max_dim() -> int:
    try:
        return int(os.environ.get("ENTROPY_MAX_DIM", "200"))
    except ValueError:
        raise InputError("ENTROPY_MAX_DIM must be an integer") from None


def load_phi(name_or_path: str):
    path = Path(name_or_path)
    if path.suffix.lower() == ".json" or path.exists():
        try:
            obj = json.loads(path.read_text())
        except OSError as exc:
            raise InputError(f"cannot read phi spec {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"phi spec {path} is not valid JSON: {exc}") from None
        return spec_from_dict(obj)
    return builtin(name_or_path)


def _load_state(path: str | None, flag: str):
    if path is None:
        raise InputError(f"missing {flag} matrix file")
    M = read_matrix(path)
    if M.shape[0] > max_dim():
        raise InputError(f"{flag}: dimension {M.shape[0]} exceeds ENTROPY_MAX_DIM={max_dim()}")
    try:
        return as_state(M)
    except ValidationError as exc:
        raise InputError(f"{flag}: {exc}") from None


def _float(x):
    return None if x is None else (x if math.isfinite(x) else "inf")


def _emit(cfg: RunConfig, payload: dict, csv_rows: list | None = None, csv_text: str | None = None):
    if cfg.format == "csv":
        if csv_text is None:
            buf = io.StringIO()
            csv.writer(buf, lineterminator="\n").writerows(csv_rows)
            csv_text = buf.getvalue()
        text = csv_text
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return fmt_float(v) if math.isfinite(v) else "inf"
    return v


# -- commands ----------------------------------------------------------------


def cmd_compute(cfg: RunConfig) -> int:
    spec = load_phi(cfg.phi)
    A, B = _load_state(cfg.a, "--a"), _load_state(cfg.b, "--b")
    if A.dim != B.dim:
        raise InputError(f"--a is {A.dim}x{A.dim} but --b is {B.dim}x{B.dim}")
    case = ent.classify_singular_case(spec, A, B)
    direct = ent.relative_entropy_direct(spec, A, B)
    gateaux = ent.relative_entropy_gateaux(spec, A, B)
    integral = None
    if spec.operator_monotone_derivative:
        integral = ent.relative_entropy_integral(spec, A, B, cfg.tol_lambda, cfg.tol_t)
    t4 = None if case.has_mismatch else ent.theorem4_check(spec, A, B)
    ratio = ent.klein_ratio(spec, A, B)

    values = [v for v in (direct, gateaux, integral) if v is not None]
    if all(v.is_finite for v in values):
        scale = max(1.0, abs(direct.value))
        agree_dg = abs(direct.value - gateaux.value) <= 1e-9 * scale
        agree_di = True
        if integral is not None:
            allowed = max(cfg.tol_agree * direct.value, 10 * max(cfg.tol_lambda, cfg.tol_t))
            agree_di = abs(direct.value - integral.value) <= allowed
        agree = agree_dg and agree_di
    else:
        agree = not any(v.is_finite for v in values)

    payload = {
        "phi": spec.name,
        "dim": A.dim,
        "direct": direct.to_json(),
        "gateaux": gateaux.to_json(),
        "integral": None if integral is None else integral.to_json(),
        "reason": direct.reason.value if direct.reason else None,
        "singular_case": case.to_dict(),
        "trace_identity_difference": None if t4 is None else t4.difference,
        "klein_ratio": _float(ratio),
        "agreement": agree,
    }
    rows = [["quantity", "value", "reason"]]
    for key in ("direct", "gateaux", "integral"):
        v = {"direct": direct, "gateaux": gateaux, "integral": integral}[key]
        rows.append([key, "" if v is None else ("inf" if not v.is_finite else fmt_float(v.value)),
                     "" if v is None or v.reason is None else v.reason.value])
    rows.append(["trace_identity_difference", _csv_cell(None if t4 is None else t4.difference), ""])
    rows.append(["klein_ratio", _csv_cell(ratio), "" if ratio is not None else "undefined"])
    rows.append(["agreement", str(agree).lower(), ""])
    _emit(cfg, payload, rows)
    return EXIT_OK if agree else EXIT_DISAGREE


def _parse_ranks(text: str | None, n: int):
    if text is None:
        return list(range(1, n + 1))
    try:
        return [int(r) for r in text.split(",") if r.strip()]
    except ValueError:
        raise InputError(f"--ranks must be a comma separated list of integers, got {text!r}") from None


def _build_chain(cfg: RunConfig, n: int) -> ProjectionChain:
    if cfg.chain_file:
        try:
            obj = json.loads(Path(cfg.chain_file).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read chain file: {exc}") from None
        projs = obj.get("projectors") if isinstance(obj, dict) else obj
        if not isinstance(projs, list):
            raise InputError("chain file needs a list field 'projectors'")
        return ProjectionChain.from_projectors([matrix_from_dict(p) for p in projs])
    ranks = _parse_ranks(cfg.ranks, n)
    if any(r < 1 or r > n for r in ranks):
        raise InputError(f"ranks must lie in 1..{n}")
    if cfg.chain == "prefix":
        return ProjectionChain.prefix(n, ranks)
    if cfg.chain == "random":
        if cfg.seed is None:
            raise InputError("--chain random needs --seed")
        return ProjectionChain.random_nested(n, ranks, seed=[cfg.seed, 1])
    raise InputError("--chain must be prefix or random")


def cmd_converge(cfg: RunConfig) -> int:
    spec = load_phi(cfg.phi)
    if cfg.a or cfg.b:
        A, B = _load_state(cfg.a, "--a"), _load_state(cfg.b, "--b")
        if A.dim != B.dim:
            raise InputError("--a and --b have different dimensions")
    else:
        if cfg.ambient is None or cfg.seed is None:
            raise InputError("give --a/--b files or both --ambient and --seed")
        if not 1 <= cfg.ambient <= max_dim():
            raise InputError(f"--ambient must lie in 1..{max_dim()}")
        rng = np.random.default_rng([cfg.seed, 0])
        A = random_state(cfg.ambient, 0.1, 0.9, seed=rng)
        B = random_state(cfg.ambient, 0.1, 0.9, seed=rng)
    chain = _build_chain(cfg, A.dim)
    trace = lab.projection_sweep(spec, A, B, chain)
    _emit(cfg, trace.to_dict(), csv_text=trace.to_csv())
    return EXIT_OK if trace.is_monotone() and trace.matches_limit() else EXIT_DISAGREE


def cmd_trials(cfg: RunConfig) -> int:
    if cfg.trials < 1:
        empty = {"phi": cfg.phi, "trials": 0, "seed": cfg.seed, "violations": [], "inconclusive": True}
        _emit(cfg, empty, [["trial", "violation"]])
        raise InputError("--trials must be at least 1 (nothing would be tested)")
    if cfg.seed is None:
        raise InputError("--trials needs --seed")
    phi = "quartic" if cfg.counterexample and cfg.phi == "fermionic" else cfg.phi
    spec = load_phi(phi)
    if cfg.counterexample or not spec.operator_monotone_derivative:
        report = lab.counterexample_search(spec, cfg.trials, cfg.seed)
        _emit(cfg, report.to_dict(), csv_text=report.to_csv())
        return EXIT_INCONCLUSIVE if report.inconclusive else EXIT_OK
    try:
        dim_a, dim_b = (int(d) for d in cfg.dims.split(","))
    except ValueError:
        raise InputError(f"--dims must look like '4,3', got {cfg.dims!r}") from None
    if max(dim_a, dim_b) > max_dim():
        raise InputError(f"--dims exceed ENTROPY_MAX_DIM={max_dim()}")
    report = lab.monotonicity_trials(spec, dim_a, dim_b, cfg.trials, cfg.seed, cfg.tol)
    _emit(cfg, report.to_dict(), csv_text=report.to_csv())
    return EXIT_OK if report.passed else EXIT_DISAGREE


def cmd_repcheck(cfg: RunConfig) -> int:
    spec = load_phi(cfg.phi)
    rep = check_rep_consistency(spec, cfg.grid, cfg.tol if cfg.tol != 1e-9 else 1e-8)
    integ = integrability_diagnostics(spec)
    payload = {
        "phi": spec.name,
        "max_prime_deviation": rep.max_prime_deviation,
        "max_phi_deviation": rep.max_phi_deviation,
        "tol": rep.tol,
        "passed": rep.passed,
        "integrability": {k: _float(getattr(integ, k)) for k in
                          ("log_integral_upper", "log_integral_lower",
                           "inverse_integral_upper", "inverse_integral_lower")},
    }
    rows = [["quantity", "value", "reason"],
            ["max_prime_deviation", fmt_float(rep.max_prime_deviation), ""],
            ["max_phi_deviation", fmt_float(rep.max_phi_deviation), ""]]
    for k, v in payload["integrability"].items():
        rows.append([k, _csv_cell(getattr(integ, k)), "divergent" if v == "inf" else ""])
    rows.append(["passed", str(rep.passed).lower(), ""])
    _emit(cfg, payload, rows)
    return EXIT_OK if rep.passed else EXIT_DISAGREE


COMMANDS = {"compute": cmd_compute, "converge": cmd_converge, "trials": cmd_trials, "repcheck": cmd_repcheck}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relentropy", description="Monotone quantum relative entropies.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--phi", default="fermionic", help="built-in name or phi spec JSON file")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--format", default="json", choices=["json", "csv"])
        sp.add_argument("--seed", type=int)
        sp.add_argument("--tol", type=float, default=1e-9)

    sp = sub.add_parser("compute", help="all three entropy formulas for one pair")
    common(sp)
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--tol-lambda", type=float, default=1e-9)
    sp.add_argument("--tol-t", type=float, default=1e-9)
    sp.add_argument("--tol-agree", type=float, default=1e-4)

    sp = sub.add_parser("converge", help="projection sweep toward the full entropy")
    common(sp)
    sp.add_argument("--a")
    sp.add_argument("--b")
    sp.add_argument("--ambient", type=int)
    sp.add_argument("--chain", default="prefix", choices=["prefix", "random"])
    sp.add_argument("--ranks", help="comma separated ranks (default 1..N)")
    sp.add_argument("--chain-file", help="JSON with a 'projectors' list of matrices")

    sp = sub.add_parser("trials", help="monotonicity trials or counterexample search")
    common(sp)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--dims", default="4,3", help="source,target dimensions")
    sp.add_argument("--counterexample", action="store_true",
                    help="search for a violation with a non operator-monotone phi' (default x^3)")

    sp = sub.add_parser("repcheck", help="check the Loewner representation of phi")
    common(sp)
    sp.add_argument("--grid", type=int, default=101)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__})
    try:
        cfg.validate()
        return COMMANDS[cfg.command](cfg)
    except (InputError, ValidationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (QuadratureError, SingularCaseError, ConsistencyError) as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return EXIT_DISAGREE


if __name__ == "__main__":
    sys.exit(main())
