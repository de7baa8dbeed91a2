"""``ietlab <command> --config PATH [--seed S] [--out DIR]``.

Exit codes: 0 success, 1 invalid configuration, 2 a tolerance was exceeded,
3 the run stopped early at a degenerate step (partial outputs are written).
"""

from __future__ import annotations

import argparse
import itertools
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, ExperimentConfig, load_config
from .diagnostics import cesaro_correlation, defect_trajectory, eigenvalue_scan, matrix_coefficient_average
from .errors import DegeneracyError, IETLabError
from .groups import (
    GTuple,
    gamma_step,
    group_from_name,
    haar_invariance_deviation,
    haar_tuple,
    representation_from_label,
)
from .iet import IET, Permutation, _block_failure, build_iet, iet_to_dict
from .kernels import BACKEND
from .rauzy import RauzyRule, induction_orbit, rauzy_rule
from .serialize import write_csv, write_json, write_trace
from .skew import SkewShiftTriple, first_return_consistency, triple_to_dict
from .streams import random_iet, substream

log = logging.getLogger("ietlab")

EXIT_OK, EXIT_CONFIG, EXIT_TOLERANCE, EXIT_PARTIAL = 0, 1, 2, 3
MAX_REGENERATIONS = 20


# ---------------------------------------------------------------------------
# building inputs from a config


def build_base(cfg: ExperimentConfig, index: int = 0, attempt: int = 0) -> IET:
    spec = cfg.iet
    if spec.random:
        return random_iet(substream(cfg.seed, "base", index, attempt), spec.n, arithmetic=cfg.arithmetic or "exact")
    return build_iet(spec.lengths, spec.permutation, cfg.arithmetic)


def build_tuple(cfg: ExperimentConfig, n: int, index: int = 0) -> GTuple:
    group = group_from_name(cfg.group.backend)
    if cfg.group.elements is not None:
        exact = True if cfg.group.exact else None
        return GTuple(group, tuple(group.from_coords(c, exact) for c in cfg.group.elements))
    return haar_tuple(group, n, substream(cfg.seed, "tuple", index), exact=cfg.group.exact)


def build_triple(cfg: ExperimentConfig, index: int = 0, attempt: int = 0) -> SkewShiftTriple:
    base = build_base(cfg, index, attempt)
    return SkewShiftTriple(base, build_tuple(cfg, base.n, index))


def corrupt_gamma(iet: IET, t: GTuple) -> GTuple:
    """Fault hook: the cocycle update with the product ``g^n g^j`` replaced by ``g^j``."""
    j = iet.perm.inverse(iet.n)
    el = list(t.elements)
    if rauzy_rule(iet) is RauzyRule.A:
        el = el[:j] + [el[j - 1]] + el[j : len(el) - 1]
    return t.replace(el)


GAMMAS = {None: gamma_step, "corrupt_gamma": corrupt_gamma}


def _haar_permutations(n: int) -> list[Permutation]:
    return [Permutation(p) for p in itertools.permutations(range(1, n + 1)) if _block_failure(Permutation(p)) is None]


def _default_reps(cfg: ExperimentConfig) -> list:
    group = group_from_name(cfg.group.backend)
    if cfg.rep is not None:
        return [representation_from_label(group, cfg.rep)]
    if group.kernel_kind == "torus":
        k = group.coord_dim
        return [representation_from_label(group, ",".join([str(p)] + ["0"] * (k - 1))) for p in (1, 2, 3)]
    return [representation_from_label(group, j) for j in ("1/2", "1")]


# ---------------------------------------------------------------------------
# commands; each returns (exit code, report)


def cmd_induct(cfg: ExperimentConfig, out: Path):
    base = build_base(cfg)
    trace = induction_orbit(base, cfg.depth, cfg.epsilon)
    write_trace(trace, out / "trace.csv", out / "trace.jsonl")
    veech = next((s.m for s in trace.steps if s.p1 and s.p2), None)
    report = {
        "iet": iet_to_dict(base),
        "requested_depth": cfg.depth,
        "depth_reached": trace.depth,
        "degenerate_at": trace.degenerate_at,
        "complete": trace.complete,
        "epsilon": cfg.epsilon,
        "first_veech_time": veech,
        "left_strict_class_at": next((s.m for s in trace.steps if not s.strictly_irreducible), None),
    }
    return (EXIT_OK if trace.complete else EXIT_PARTIAL), report


def cmd_verify(cfg: ExperimentConfig, out: Path):
    gamma = GAMMAS[cfg.fault]
    rows, worst_base, worst_fiber, passed, degenerate = [], 0.0, 0.0, True, []
    for i in range(cfg.triples):
        s = build_triple(cfg, i)
        try:
            rep = first_return_consistency(s, cfg.samples, substream(cfg.seed, "mc", i), cfg.depth, gamma=gamma)
        except DegeneracyError as exc:
            degenerate.append({"triple": i, "error": str(exc)})
            continue
        ok = rep.passed(cfg.fiber_tol, cfg.base_tol)
        passed &= ok
        worst_base = max(worst_base, rep.max_base_err)
        worst_fiber = max(worst_fiber, rep.max_fiber_dist)
        rows.append((i, rep.exact, rep.max_base_err, rep.max_fiber_dist, rep.max_return_time, ok))
    write_csv(out / "verify.csv", ("triple", "exact", "max_base_err", "max_fiber_dist", "max_return_time", "passed"), rows)

    group = group_from_name(cfg.group.backend)
    n = cfg.iet.n if cfg.iet.random else len(cfg.iet.permutation)
    haar = haar_invariance_deviation(
        group,
        _default_reps(cfg),
        n,
        _haar_permutations(n),
        cfg.haar_samples,
        substream(cfg.seed, "haar_direct"),
        substream(cfg.seed, "haar_push"),
    )
    haar_ok = haar["max_deviation"] <= haar["threshold"]
    report = {
        "consistency": {
            "triples": cfg.triples,
            "max_base_err": worst_base,
            "max_fiber_dist": worst_fiber,
            "fiber_tol": cfg.fiber_tol,
            "base_tol": cfg.base_tol,
            "passed": passed,
            "degenerate": degenerate,
            "fault": cfg.fault,
        },
        "haar_invariance": {k: haar[k] for k in ("max_deviation", "threshold", "samples")} | {"passed": haar_ok},
    }
    if not (passed and haar_ok):
        return EXIT_TOLERANCE, report
    return (EXIT_PARTIAL if degenerate else EXIT_OK), report


def _diagnose_one(cfg: ExperimentConfig, s: SkewShiftTriple, index: int):
    rep = representation_from_label(s.group, cfg.rep)
    traj = defect_trajectory(s, rep, cfg.depth)
    stats = {
        "min_defect": traj.min_defect,
        "final_defect": float(traj.defects[-1]),
        "depth_reached": len(traj.values) - 1,
        "degenerate_at": traj.degenerate_at,
    }
    if cfg.correlation:
        avg = matrix_coefficient_average(s, rep, cfg.N, cfg.M, substream(cfg.seed, "mc", index, 0))
        stats["matrix_average_norm"] = avg.norm
        stats["cesaro_correlation"] = cesaro_correlation(s, rep, cfg.N, cfg.M, substream(cfg.seed, "mc", index, 1))
    return traj, stats


def cmd_diagnose(cfg: ExperimentConfig, out: Path):
    s = build_triple(cfg)
    traj, stats = _diagnose_one(cfg, s, 0)
    write_csv(out / "trace.csv", ("m", "defect"), ((m, v) for m, v, _ in traj.values))
    report = {"triple": triple_to_dict(s), "rep": cfg.rep, "requested_depth": cfg.depth, "complete": traj.complete} | stats
    return (EXIT_OK if traj.complete else EXIT_PARTIAL), report


def cmd_scan(cfg: ExperimentConfig, out: Path):
    s = build_triple(cfg)
    character = representation_from_label(s.group, cfg.rep)
    scan = eigenvalue_scan(s, character, cfg.N, cfg.A, cfg.test_fns, cfg.M, substream(cfg.seed, "mc"), cfg.shifts)
    rows = []
    for (label, shift), vals in scan.values.items():
        for j, v in enumerate(vals):
            rows.append((label, shift, j, j / cfg.A, abs(v), v.real, v.imag))
    write_csv(out / "scan.csv", ("test_fn", "shift", "j", "argument", "abs", "re", "im"), rows)
    report = {"triple": triple_to_dict(s), "rep": cfg.rep, "N": cfg.N, "A": cfg.A, "M": cfg.M, "peak": scan.peak()}
    return EXIT_OK, report


def _sweep_worker(args):
    cfg, index = args
    for attempt in range(MAX_REGENERATIONS):
        s = build_triple(cfg, index, attempt)
        _, stats = _diagnose_one(cfg, s, index)
        if stats["degenerate_at"] is None or not cfg.iet.random:
            return index, attempt, stats
    return index, attempt, stats


def _quantiles(values) -> dict:
    values = np.asarray([v for v in values if v is not None], dtype=float)
    if values.size == 0:
        return {}
    qs = (0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0)
    return {f"q{int(q * 100):02d}": float(np.quantile(values, q)) for q in qs}


def cmd_sweep(cfg: ExperimentConfig, out: Path):
    jobs = [(cfg, i) for i in range(cfg.seeds)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_sweep_worker, jobs))
    else:
        results = [_sweep_worker(j) for j in jobs]
    results.sort(key=lambda r: r[0])
    cols = ("index", "regenerations", "depth_reached", "degenerate_at", "min_defect", "final_defect")
    extra = ("matrix_average_norm", "cesaro_correlation") if cfg.correlation else ()
    write_csv(out / "sweep.csv", cols + extra, ((i, a) + tuple(st[c] for c in cols[2:] + extra) for i, a, st in results))
    stats = [st for _, _, st in results]
    partial = [i for i, _, st in results if st["degenerate_at"] is not None]
    report = {
        "runs": len(results),
        "partial_runs": partial,
        "min_defect": _quantiles(st["min_defect"] for st in stats),
    }
    if cfg.correlation:
        report["cesaro_correlation"] = _quantiles(st["cesaro_correlation"] for st in stats)
        report["matrix_average_norm"] = _quantiles(st["matrix_average_norm"] for st in stats)
    return (EXIT_PARTIAL if partial else EXIT_OK), report


COMMANDS = {
    "induct": cmd_induct,
    "verify": cmd_verify,
    "diagnose": cmd_diagnose,
    "scan": cmd_scan,
    "sweep": cmd_sweep,
}

OUTPUTS = {
    "induct": ("trace.csv", "trace.jsonl", "report.json"),
    "verify": ("verify.csv", "report.json"),
    "diagnose": ("trace.csv", "report.json"),
    "scan": ("scan.csv", "report.json"),
    "sweep": ("sweep.csv", "report.json"),
}


def run(cfg: ExperimentConfig, out: Path) -> int:
    """Run one configured command, writing outputs and ``manifest.json`` under ``out``."""
    out.mkdir(parents=True, exist_ok=True)
    code, report = COMMANDS[cfg.command](cfg, out)
    report = {"command": cfg.command, "seed": cfg.seed, "exit_code": code} | report
    write_json(out / "report.json", report)
    manifest = {
        "ietlab_version": __version__,
        "kernel_backend": BACKEND,
        "config": cfg.to_dict(),
        "outputs": list(OUTPUTS[cfg.command]),
        "exit_code": code,
        "complete": code != EXIT_PARTIAL,
    }
    write_json(out / "manifest.json", manifest)
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ietlab", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, help="YAML or JSON config (a manifest.json also works)")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", default=".", help="output directory (default: current directory)")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.command, args.seed)
    except ConfigError as exc:
        print(f"ietlab: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    log.info("running %s with seed %d (kernels: %s)", cfg.command, cfg.seed, BACKEND)
    try:
        return run(cfg, Path(args.out))
    except IETLabError as exc:
        print(f"ietlab: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
