"""Monte-Carlo orchestration: per-trial pipelines, seeding, CSV emission.

Every trial is a pure function of (config, d, trial index).  Its seed is
``derive_seed(derive_seed(master, d), trial)`` so adding dimensions or trials
never shifts the seeds of existing ones.  Records are merged in task order,
so the CSV does not depend on worker scheduling.  ``wall_ms`` is written as
0 unless ``record_time`` is set, which keeps the CSV byte-deterministic.
"""
from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import components as cp
from . import decomposition as dc
from . import expansion as ex
from . import hypercube as hc
from . import long_structures as ls
from . import walks as wk
from .config import ExperimentConfig

CSV_COLUMNS = ("experiment", "d", "p", "q2", "trial", "seed", "metric", "value",
               "wall_ms", "workers")


@dataclass
class ExperimentRecord:
    experiment: str
    d: int
    p: float
    q2: float | None
    trial: int
    seed: int
    metrics: dict = field(default_factory=dict)
    wall_ms: float = 0.0
    workers: int = 1


def trial_seed(master: int, d: int, trial: int) -> int:
    return hc.derive_seed(hc.derive_seed(master, d), trial)


# ---------------------------------------------------------------------------
# per-kind pipelines; each returns an ordered metric dict


def _giant_of(g):
    c = cp.census(g)
    return c, c.giant()


def _census(cfg, g, seed):
    c = cp.census(g)
    return {
        "giant_size": int(c.sizes[0]),
        "giant_fraction": float(cp.giant_fraction(c)),
        "second_largest": cp.second_largest_order(c),
        "components": len(c.sizes),
        "edges": hc.edge_count(g),
    }


def _expansion(cfg, g, seed):
    c, giant = _giant_of(g)
    out = {"giant_size": len(giant), "high_degree": ex.degree_census(g)}
    if len(giant) < 2:
        return out
    s = ex.spectral_summary(g, giant, tol=max(cfg.tol, 1e-8), seed=seed % 2 ** 32)
    out.update(gap=s.gap, sweep_phi=s.sweep_phi, cheeger_lower=s.cheeger_lower,
               cheeger_upper=s.cheeger_upper, lanczos_iterations=s.iterations)
    k = min(len(giant), max(g.d, 50))
    out["excess_max"] = ex.connected_excess_sample(g, k, cfg.samples, seed, giant)
    grid = sorted({s for s in (g.d, g.d ** 2, len(giant) // 4) if 1 <= s <= len(giant)})
    prof = ex.expansion_profile(g, giant, grid, cfg.samples, seed)
    for size, ratio in prof.items():
        out[f"profile_{size}"] = ratio
    return out


def _mixing(cfg, g, seed):
    c, giant = _giant_of(g)
    out = {"giant_size": len(giant)}
    if len(giant) < 2:
        return out
    s = ex.spectral_summary(g, giant, tol=max(cfg.tol, 1e-8), seed=seed % 2 ** 32)
    pi_min = wk.pi_min_exact(g, giant)
    out.update(gap=s.gap, relaxation_half=1.0 / (2 * s.gap),
               bound_spectral=wk.mixing_bound_cheeger(min(0.5, s.cheeger_lower), pi_min))
    if len(giant) <= cfg.cap_exact:
        r = wk.mixing_time_exact(g, giant, seed=seed, cap=cfg.cap_exact)
        out.update(t_mix=r.t_mix, exact=1, lower_bound_mode=int(r.lower_bound_mode))
    else:
        r = wk.sampled_mixing(g, giant, cfg.walkers, cfg.horizon, seed)
        out.update(t_mix=r.t_mix if r.mixed else math.nan, exact=0, lower_bound_mode=1)
    return out


def _diameter(cfg, g, seed):
    c, giant = _giant_of(g)
    r = ls.diameter(g, giant, "ifub")
    return {"giant_size": len(giant), "diameter": r.value, "bfs_calls": r.bfs_calls,
            "d_cubed": g.d ** 3}


def _cycles(cfg, g, seed):
    c, giant = _giant_of(g)
    cert = ls.longest_cycle_heuristic(g, giant, budget=cfg.budget, seed=seed)
    return {"giant_size": len(giant), "cycle_length": cert.length,
            "cycle_fraction": cert.length / g.n}


def _minors(cfg, g, seed):
    c, giant = _giant_of(g)
    cert = ls.greedy_minor(g, giant, target_t=cfg.target_t, seed=seed)
    return {"giant_size": len(giant), "minor_order": cert.order,
            "branch_vertices": sum(len(b) for b in cert.branch_sets)}


def _decompose(cfg, g, seed):
    c, giant = _giant_of(g)
    s = max(1, len(giant) // 2)
    fam = dc.piece_family(g, giant, s, cfg.c8)
    tree = dc.bfs_spanning_tree(g, giant, int(giant.min()))
    return {"giant_size": len(giant), "ell": fam.ell, "pieces": len(fam.pieces),
            "violations": len(dc.verify_decomposition(tree, fam)),
            "below_lower": fam.notes["below_lower"], "above_upper": fam.notes["above_upper"],
            "above_log": fam.notes["above_log"]}


def _sprinkle(cfg, params):
    q1, q2 = hc.generate_sprinkled(params)
    c1, c2 = cp.census(q1), cp.census(q2)
    rep = cp.attachment_report(q1, q2, c1, c2)
    return {"edges_q1": hc.edge_count(q1), "edges_q2": hc.edge_count(q2),
            "nested": int(hc.is_subgraph(q1, q2)), "giant_q1": int(c1.sizes[0]),
            "giant_q2": int(c2.sizes[0]), "max_attachment": rep.max_attachment,
            "skipped": int(rep.skipped), "two_hop_density": cp.two_hop_density(q2, c2)}


PIPELINES = {
    "census": _census, "sweep": _census, "expansion": _expansion, "mixing": _mixing,
    "diameter": _diameter, "cycles": _cycles, "minors": _minors, "decompose": _decompose,
}


def run_trial(cfg: ExperimentConfig, d: int, trial: int) -> ExperimentRecord:
    seed = trial_seed(cfg.seed, d, trial)
    p = cfg.p_for(d)
    t0 = time.perf_counter()
    if cfg.kind == "sprinkle":
        metrics = _sprinkle(cfg, hc.GenerationParams(d, p, seed, cfg.q2))
    else:
        if cfg.q2 is not None:
            g = hc.generate_sprinkled(hc.GenerationParams(d, p, seed, cfg.q2))[1]
        else:
            g = hc.generate(hc.GenerationParams(d, p, seed))
        metrics = PIPELINES[cfg.kind](cfg, g, seed)
    wall = (time.perf_counter() - t0) * 1000 if cfg.record_time else 0.0
    return ExperimentRecord(cfg.kind, d, p, cfg.q2, trial, seed, metrics, wall, cfg.workers)


def _task(args):
    return run_trial(*args)


def iter_records(cfg: ExperimentConfig):
    tasks = [(cfg, d, t) for d in cfg.d for t in range(cfg.trials)]
    if cfg.workers == 1 or len(tasks) == 1:
        for task in tasks:
            yield _task(task)
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            yield from pool.map(_task, tasks)  # map preserves task order


def run(cfg: ExperimentConfig) -> list[ExperimentRecord]:
    """Run all trials; stream rows to ``cfg.out`` (plus a plot script) when set."""
    records = []
    if cfg.out is None:
        return list(iter_records(cfg))
    out = Path(cfg.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for rec in iter_records(cfg):
            writer.writerows(record_rows(rec))
            fh.flush()
            records.append(rec)
    write_plot_script(out, cfg.kind)
    return records


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def record_rows(rec: ExperimentRecord):
    for name, value in rec.metrics.items():
        yield (rec.experiment, rec.d, _fmt(rec.p), _fmt(rec.q2), rec.trial, rec.seed,
               name, _fmt(value), _fmt(round(rec.wall_ms, 3)), rec.workers)


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerows(record_rows(rec))
    return buf.getvalue()


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if rows and tuple(rows[0].keys()) != CSV_COLUMNS:
        raise ValueError(f"{path}: unexpected CSV header")
    return rows


_PLOT_METRIC = {
    "census": "giant_fraction", "sweep": "giant_fraction", "expansion": "gap",
    "mixing": "t_mix", "diameter": "diameter", "cycles": "cycle_fraction",
    "minors": "minor_order", "decompose": "pieces", "sprinkle": "max_attachment",
}


def write_plot_script(csv_path: Path, kind: str) -> Path:
    """A gnuplot script plotting the kind's headline metric against d."""
    metric = _PLOT_METRIC[kind]
    script = csv_path.with_suffix(".gp")
    name = csv_path.name
    script.write_text(
        f"""# headline metric of {name}; run: gnuplot {script.name}
set datafile separator ","
set terminal pngcairo size 800,500
set output "{csv_path.stem}.png"
set xlabel "d"
set ylabel "{metric}"
set key off
plot "{name}" skip 1 using (strcol(7) eq "{metric}" ? $2 : 1/0):(strcol(7) eq "{metric}" ? $8 : 1/0) \\
     with points pt 7 ps 0.6
""")
    return script
