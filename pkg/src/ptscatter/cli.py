"""``ptscatter`` command-line interface.

Usage::

    ptscatter <command> --config <file> [--out <file>] [--format csv|json]
                        [--tol-root <x>] [--tol-unit <x>]

Commands: spectrum, singularities, boundstates, invisibility, symmetry,
geometry, compose.  Exit codes: 0 success, 2 invalid configuration or
arguments, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, RunConfig, load_config
from .errors import ContractViolation, EverywhereFixed, NumericalFailure
from .lorentz import lorentz_defects, lorentz_from_transfer
from .moebius import INFINITY, classify_mobius, fixed_points
from .potentials import (
    PiecewiseConstant,
    is_pt_symmetric_potential,
    slab_transfer,
    transfer_of_potential,
)
from .report import to_csv, to_json
from .scatter import TransferMatrix, coefficients_from_transfer, compose_chain
from .spectral import (
    classify_invisibility,
    find_bound_states,
    find_spectral_singularities,
    phasor_residuals,
    pt_symmetry_residual,
    scan_spectrum,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

DEFAULT_FORMAT = {
    "spectrum": "csv",
    "singularities": "csv",
    "boundstates": "csv",
    "invisibility": "csv",
    "symmetry": "csv",
    "geometry": "json",
    "compose": "json",
}

COMMANDS = tuple(DEFAULT_FORMAT)

_DIVERGENT = complex(math.inf, math.inf)


def _matrix(m: TransferMatrix):
    return [[m.m11, m.m12], [m.m21, m.m22]]


def _point(p):
    return "inf" if p is INFINITY else p


def _require(cfg: RunConfig, field: str, command: str):
    if getattr(cfg, field) is None:
        raise ConfigError(f"{field}: required by the '{command}' command")


def _spectrum(cfg: RunConfig, p):
    _require(cfg, "k_range", "spectrum")
    r, tol = cfg.k_range, cfg.tolerances
    scan = scan_spectrum(p, r.k_min, r.k_max, r.n, rtol=tol.integration, workers=cfg.workers)
    records = []
    for row in scan:
        c = row.coefficients
        verdict = classify_invisibility(row.matrix, tol.tol_unit, tol.tol_nonzero)
        records.append(
            {
                "k": row.k,
                "t": c.t if c else _DIVERGENT,
                "r_left": c.r_left if c else _DIVERGENT,
                "r_right": c.r_right if c else _DIVERGENT,
                "abs_m22": row.m22_abs,
                "pt_residual": pt_symmetry_residual(row.matrix),
                "invisibility": verdict.label.value,
            }
        )
    return records


def _singularities(cfg: RunConfig, p):
    _require(cfg, "k_range", "singularities")
    r, tol = cfg.k_range, cfg.tolerances
    roots = find_spectral_singularities(
        p, r.k_min, r.k_max, n_scan=r.n, residual_tol=tol.root_residual, rtol=tol.integration
    )
    return [{"kind": s.kind.value, "k": s.k_star, "residual": s.residual} for s in roots]


def _boundstates(cfg: RunConfig, p):
    _require(cfg, "search_box", "boundstates")
    tol = cfg.tolerances
    roots = find_bound_states(p, cfg.build_box(), residual_tol=tol.root_residual, rtol=tol.integration)
    return [{"kind": s.kind.value, "k": s.k_star, "residual": s.residual} for s in roots]


def _pointwise(cfg: RunConfig, command: str):
    if cfg.k is None and cfg.k_range is None:
        raise ConfigError(f"k: the '{command}' command needs 'k' or 'k_range'")
    return cfg.wavenumbers()


def _invisibility(cfg: RunConfig, p):
    tol = cfg.tolerances
    records = []
    for k in _pointwise(cfg, "invisibility"):
        m = transfer_of_potential(p, k, rtol=tol.integration)
        v = classify_invisibility(m, tol.tol_unit, tol.tol_nonzero)
        records.append(
            {
                "k": k,
                "label": v.label.value,
                "defective": v.defective,
                "abs_m11_minus_1": v.residuals[0],
                "abs_m22_minus_1": v.residuals[1],
                "abs_m12": v.residuals[2],
                "abs_m21": v.residuals[3],
            }
        )
    return records


def _symmetry(cfg: RunConfig, p):
    tol = cfg.tolerances
    symmetric_profile = is_pt_symmetric_potential(p)
    records = []
    for k in _pointwise(cfg, "symmetry"):
        m = transfer_of_potential(p, k, rtol=tol.integration)
        left, right = phasor_residuals(coefficients_from_transfer(m))
        records.append(
            {
                "k": k,
                "pt_residual": pt_symmetry_residual(m),
                "phasor_left": left,
                "phasor_right": right,
                "profile_pt_symmetric": symmetric_profile,
            }
        )
    return records


def _geometry(cfg: RunConfig, p):
    tol = cfg.tolerances
    records = []
    for k in _pointwise(cfg, "geometry"):
        m = transfer_of_potential(p, k, rtol=tol.integration)
        lam = lorentz_from_transfer(m)
        metric_err, det_err = lorentz_defects(lam)
        cls = classify_mobius(m)
        try:
            fps = [_point(x) for x in fixed_points(m) if x is not None]
        except EverywhereFixed:
            fps = []
        records.append(
            {
                "k": k,
                "transfer_matrix": _matrix(m),
                "lorentz": lam,
                "lorentz_check": {
                    "metric_error": metric_err,
                    "det_error": det_err,
                    "passes": bool(metric_err <= 1e-9 and det_err <= 1e-9 and lam[0, 0] >= 1),
                },
                "mobius": {
                    "label": cls.label.value,
                    "trace_sq": cls.trace_sq,
                    "canonical_parameter": cls.canonical_parameter,
                    "fixed_points": fps,
                },
            }
        )
    return records


def _compose(cfg: RunConfig, p):
    if not isinstance(p, PiecewiseConstant):
        raise ConfigError("potential: the 'compose' command needs an inline 'segments' stack")
    records = []
    for k in _pointwise(cfg, "compose"):
        factors = [slab_transfer(s.u, s.width, k, s.x0) for s in p.segments]
        total = compose_chain(factors) if factors else TransferMatrix.identity(k)
        records.append(
            {
                "k": k,
                "factors": [
                    {"x0": s.x0, "x1": s.x1, "matrix": _matrix(f)} for s, f in zip(p.segments, factors)
                ],
                "product": _matrix(total),
                "det": total.det,
            }
        )
    return records


_HANDLERS = {
    "spectrum": _spectrum,
    "singularities": _singularities,
    "boundstates": _boundstates,
    "invisibility": _invisibility,
    "symmetry": _symmetry,
    "geometry": _geometry,
    "compose": _compose,
}


def run_command(command: str, cfg: RunConfig, fmt: str | None = None) -> str:
    """Run one command and return the serialized report."""
    if command not in _HANDLERS:
        raise ConfigError(f"unknown command {command!r}")
    fmt = fmt or cfg.output.format or DEFAULT_FORMAT[command]
    records = _HANDLERS[command](cfg, cfg.build_potential())
    if fmt == "csv":
        return to_csv(records)
    return to_json({"command": command, "version": __version__, "records": records})


def _override(cfg: RunConfig, args) -> RunConfig:
    tol_updates = {}
    if args.tol_root is not None:
        tol_updates["root_residual"] = args.tol_root
    if args.tol_unit is not None:
        tol_updates["tol_unit"] = args.tol_unit
    if not tol_updates:
        return cfg
    if any(v <= 0 for v in tol_updates.values()):
        raise ConfigError("tolerances must be positive")
    base_dir = cfg._base_dir
    new = cfg.model_copy(update={"tolerances": cfg.tolerances.model_copy(update=tol_updates)})
    new._base_dir = base_dir
    return new


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptscatter",
        description="One-dimensional scattering by complex potentials.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--out", help="write the report here instead of stdout")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--tol-root", type=float, help="residual accepted for |m22| at a root")
    parser.add_argument("--tol-unit", type=float, help="threshold below which an entry counts as zero")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        cfg = _override(load_config(args.config), args)
        text = run_command(args.command, cfg, args.format)
    except (ConfigError, ContractViolation) as exc:
        print(f"ptscatter: invalid configuration:\n{exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailure as exc:
        print(f"ptscatter: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    out = args.out or cfg.output.path
    if out:
        path = Path(out)
        if not path.is_absolute() and args.out is None and cfg._base_dir is not None:
            path = Path(cfg._base_dir) / path
        path.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
