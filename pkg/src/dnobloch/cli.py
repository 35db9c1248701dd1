"""Command-line front end.

    dnobloch band-structure  --config cfg.json --out DIR   -> bands.csv, gaps.json
    dnobloch gap-scan        --config cfg.json --out DIR   -> gap_scan.csv
    dnobloch gap-scaling     --config cfg.json --out DIR   -> gap_scaling.json
    dnobloch validate-oracle --config cfg.json --out DIR   -> oracle_report.json
    dnobloch evolve          --config cfg.json --out DIR   -> evolution.csv

Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 invariant violation.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig
from .dno import assemble_G_theta
from .errors import ConfigError, InvariantViolation, NumericalError
from .fourier import FourierField, Truncation
from .oracle import OracleResolution, apply_dno_oracle
from .perturbation import analytic_gap_formulas, fit_gap_scaling
from .spectrum import (
    LinearPropagator,
    WaveState,
    band_edges,
    band_sweep,
    closed_threshold,
    reconstruct_bloch_eigenfunction,
    theta_grid,
)

log = logging.getLogger("dnobloch")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_INVARIANT = 0, 2, 3, 4

ANALYTIC_MATCH = {("cosx", 1): "cosx_gap1", ("cosx", 2): "cosx_gap2", ("cos13", 2): "cos13_gap2"}


def fmt(x: float) -> str:
    return format(float(x), ".15e")


def write_csv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def write_json(path: Path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _meta(cfg: RunConfig, command: str) -> dict:
    return {"command": command, "version": __version__, "h": cfg.h, "eps": cfg.eps,
            "N": cfg.N, "order": cfg.order, "profile": cfg.preset or "custom"}


def _field(triples, N) -> np.ndarray:
    c = np.zeros(2 * N + 1, dtype=complex)
    for k, re, im in triples or []:
        c[int(k) + N] += complex(re, im)
    return c


# ---------------------------------------------------------------------------
# commands; each returns {filename: writer} so nothing touches disk before
# the computation has succeeded

def cmd_band_structure(cfg: RunConfig, threads: int = 1):
    prof = cfg.profile()
    bs = band_sweep(prof, theta_grid(cfg.theta_points), Truncation(cfg.N), cfg.order,
                    cfg.n_max, workers=threads)
    gaps = band_edges(bs)
    header = ["theta"] + [f"lambda_{n}" for n in range(bs.n_max + 1)]
    rows = [[t, *vals] for t, vals in zip(bs.theta, bs.bands)]
    payload = {"meta": _meta(cfg, "band-structure"), "gaps": [g.as_dict() for g in gaps]}
    return {"bands.csv": lambda p: write_csv(p, header, rows),
            "gaps.json": lambda p: write_json(p, payload)}, payload


def _ladder(cfg: RunConfig, minimum: int):
    if not cfg.eps_ladder or len(cfg.eps_ladder) < minimum:
        raise ConfigError(f"eps_ladder needs at least {minimum} values")
    return sorted(float(e) for e in cfg.eps_ladder)


def _gap_widths(cfg: RunConfig, ladder, threads):
    n_max = max(cfg.gaps)
    table = []
    for eps in ladder:
        bs = band_sweep(cfg.profile(eps), theta_grid(cfg.theta_points), Truncation(cfg.N),
                        cfg.order, n_max, workers=threads)
        table.append(band_edges(bs))
    return table


def cmd_gap_scan(cfg: RunConfig, threads: int = 1):
    ladder = _ladder(cfg, 1)
    table = _gap_widths(cfg, ladder, threads)
    header = ["eps"] + [f"width_{n}" for n in cfg.gaps] + [f"center_{n}" for n in cfg.gaps]
    rows = []
    for eps, reps in zip(ladder, table):
        rows.append([eps] + [reps[n - 1].width for n in cfg.gaps]
                    + [reps[n - 1].center for n in cfg.gaps])
    return {"gap_scan.csv": lambda p: write_csv(p, header, rows)}, {"rows": rows}


def cmd_gap_scaling(cfg: RunConfig, threads: int = 1):
    ladder = _ladder(cfg, 4)
    results = []
    if cfg.synthetic_widths is not None:
        if len(cfg.synthetic_widths) != len(cfg.eps_ladder):
            raise ConfigError("synthetic_widths must match eps_ladder in length")
        pairs = sorted(zip(map(float, cfg.eps_ladder), map(float, cfg.synthetic_widths)))
        fit = fit_gap_scaling([e for e, _ in pairs], [w for _, w in pairs])
        results.append({"gap": "synthetic", **fit.as_dict(), "widths": [w for _, w in pairs]})
    else:
        table = _gap_widths(cfg, ladder, threads)
        for n in cfg.gaps:
            widths = [reps[n - 1].width for reps in table]
            floors = [closed_threshold(reps[n - 1].upper_edge) for reps in table]
            fit = fit_gap_scaling(ladder, widths, floors)
            row = {"gap": n, **fit.as_dict(), "widths": widths,
                   "verdict": "closed" if fit.closed else "open"}
            preset = ANALYTIC_MATCH.get((cfg.preset, n))
            if preset is not None:
                pred = [analytic_gap_formulas(preset, cfg.h, e) for e in ladder]
                row["analytic"] = {"preset": preset, "predicted_widths": pred,
                                   "ratio": [w / p for w, p in zip(widths, pred)]}
            results.append(row)
    payload = {"meta": _meta(cfg, "gap-scaling"), "eps_ladder": ladder, "fits": results}
    return {"gap_scaling.json": lambda p: write_json(p, payload)}, payload


def _oracle_psi(cfg: RunConfig) -> np.ndarray:
    if cfg.psi is not None:
        return _field(cfg.psi, cfg.N)
    rng = np.random.default_rng(cfg.seed)
    c = np.zeros(2 * cfg.N + 1, dtype=complex)
    m = min(3, cfg.N)
    c[cfg.N - m: cfg.N + m + 1] = rng.normal(size=2 * m + 1) + 1j * rng.normal(size=2 * m + 1)
    return c


def cmd_validate_oracle(cfg: RunConfig, threads: int = 1):
    prof = cfg.profile()
    psi = _oracle_psi(cfg)
    res = OracleResolution(cfg.oracle_nx, cfg.oracle_nsigma, cfg.richardson)
    ref = apply_dno_oracle(prof, cfg.theta, FourierField(psi), res, out_N=cfg.N).coeffs
    norm = np.linalg.norm(ref)
    rows = []
    for order in range(1, 5):
        G = assemble_G_theta(prof, cfg.theta, Truncation(cfg.N), order)
        rows.append({"order": order,
                     "relative_residual": float(np.linalg.norm(G @ psi - ref) / norm)})
    resid = [r["relative_residual"] for r in rows]
    payload = {"meta": _meta(cfg, "validate-oracle"), "theta": cfg.theta,
               "resolution": {"nx": res.nx, "nsigma": res.nsigma, "richardson": res.richardson},
               "residuals": rows,
               "monotone": bool(resid[0] > resid[1] > resid[3])}
    return {"oracle_report.json": lambda p: write_json(p, payload)}, payload


def cmd_evolve(cfg: RunConfig, threads: int = 1):
    if cfg.eta0 is None and cfg.eta1 is None:
        raise ConfigError("evolve needs eta0 and/or eta1 Fourier triples")
    times = cfg.times if cfg.times is not None else list(np.linspace(0, 10, 101))
    G = assemble_G_theta(cfg.profile(), cfg.theta, Truncation(cfg.N), cfg.order)
    prop = LinearPropagator(G, cfg.g)
    init = WaveState(_field(cfg.eta0, cfg.N), _field(cfg.eta1, cfg.N), cfg.g)
    header = ["t"]
    m = cfg.grid_size
    header += [f"re_eta_{i}" for i in range(m)] + [f"im_eta_{i}" for i in range(m)] + ["energy"]
    rows = []
    for t in times:
        st = prop.evolve(init, float(t))
        _, phi = reconstruct_bloch_eigenfunction(st.eta, cfg.theta, m)
        rows.append([t, *phi.real, *phi.imag, prop.energy(st)])
    return {"evolution.csv": lambda p: write_csv(p, header, rows)}, {"rows": rows}


COMMANDS = {
    "band-structure": cmd_band_structure,
    "gap-scan": cmd_gap_scan,
    "gap-scaling": cmd_gap_scaling,
    "validate-oracle": cmd_validate_oracle,
    "evolve": cmd_evolve,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dnobloch", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--threads", type=int, default=1, help="worker threads for theta sweeps")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        cfg = RunConfig.load(args.config)
        writers, _ = COMMANDS[args.command](cfg, args.threads)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except NumericalError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    except InvariantViolation as exc:
        log.error("invariant violated: %s", exc)
        return EXIT_INVARIANT
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, write in writers.items():
        write(out / name)
        log.info("wrote %s", out / name)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
