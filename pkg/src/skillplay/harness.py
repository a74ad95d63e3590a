"""Experiment harness: run replica populations, aggregate success curves,
detect convergence, fit the rollouts-vs-behaviours lines and emit results.

Replicas are seeded independently from (master seed, replica index), so
aggregates do not depend on execution order or on how many workers ran
them.  A rollout that triggers a bored restart still counts as a single
rollout: the extra sensing and preparation happen inside one execution, so
any speedup shows up as better sample selection, not as hidden extra
samples.
"""

from __future__ import annotations

import csv
import json
import multiprocessing
from dataclasses import dataclass, field, replace

import numpy as np

from .agent import SUCCESS_METRICS, Agent, RolloutRecord
from .params import Params
from .worlds import WorldInstance, WorldSpec, load_world, make_book_world, make_tower_world

VARIANTS = ("no_ext", "active", "creative")


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a world, a behaviour count, variant flags and the
    replication/seeding protocol.

    `total_behaviours` is the nominal behaviour count J.  The book world
    realizes it as the five core behaviours plus J-5 distractors; with
    creativity enabled the two composed rotations are withheld (J-2 seeded
    behaviours), since inventing them is the point of that variant.

    The default book protocol senses the orientation reliably
    (slide_accuracy 1.0, matching the near-perfect real classifier the
    simulation statistics came from) while the behaviour controllers keep
    their 95% success rate; `world_params` overrides this.  The default
    success metric tracks whether the chosen preparation's intended effect
    reaches the skill's domain of applicability, so curves converge toward
    1 while controller glitches still perturb the world and the learned
    model; see Agent.execute_rollout for the alternative metrics.
    """

    world: str = "book"
    total_behaviours: int = 5
    active_learning: bool = False
    creativity: bool = False
    replicas: int = 1000
    rollouts: int = 300
    master_seed: int = 12345
    smoothing_window: int = 10
    state_schedule: str = "uniform"  # uniform | round_robin | fixed:<state>
    success_metric: str = "intended_preparation"
    world_params: dict = field(default_factory=dict)
    world_file: str | None = None
    skill: str | None = None
    params: Params = field(default_factory=Params)

    def validate(self) -> None:
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if self.rollouts < 1:
            raise ValueError("rollouts must be >= 1")
        if self.smoothing_window < 1:
            raise ValueError("smoothing_window must be >= 1")
        schedule = self.state_schedule
        if schedule not in ("uniform", "round_robin") and not schedule.startswith("fixed:"):
            raise ValueError(f"unknown state_schedule {schedule!r}")
        if self.world_file is None and self.world not in ("book", "tower"):
            raise ValueError(f"unknown world {self.world!r}")
        if self.success_metric not in SUCCESS_METRICS:
            raise ValueError(f"unknown success_metric {self.success_metric!r}")
        if self.world == "book" and self.world_file is None:
            if self.total_behaviours < 5:
                raise ValueError("book world needs total_behaviours >= 5")

    @property
    def variant(self) -> str:
        if self.creativity:
            return "creative"
        if self.active_learning:
            return "active"
        return "no_ext"


def build_world_spec(config: ExperimentConfig) -> WorldSpec:
    if config.world_file is not None:
        return load_world(config.world_file)
    wp = dict(config.world_params)
    if config.world == "book":
        wp.setdefault("slide_accuracy", 1.0)
        wp.setdefault("num_distractors", config.total_behaviours - 5)
        if config.creativity:
            wp.setdefault("rotations", (90,))
        return make_book_world(**wp)
    if config.world == "tower":
        return make_tower_world(**wp)
    raise ValueError(f"unknown world {config.world!r}")


def _skill_name(config: ExperimentConfig, spec: WorldSpec) -> str:
    if config.skill is not None:
        return config.skill
    return next(iter(spec.skills))


def _initial_state(config: ExperimentConfig, spec: WorldSpec, rollout_index: int):
    schedule = config.state_schedule
    if schedule == "uniform":
        return None  # world draws uniformly from its own stream
    if schedule == "round_robin":
        return spec.states[rollout_index % len(spec.states)]
    label = schedule.split(":", 1)[1]
    for state in spec.states:
        if str(state) == label:
            return state
    raise ValueError(f"fixed state {label!r} not in world states")


def replica_rng_streams(master_seed: int, replica_index: int):
    """Independent (agent, world) generators for one replica, derived only
    from the master seed and the replica index."""
    seq = np.random.SeedSequence(entropy=(master_seed, replica_index))
    agent_seq, world_seq = seq.spawn(2)
    return np.random.default_rng(agent_seq), np.random.default_rng(world_seq)


def run_replica(config: ExperimentConfig, replica_index: int) -> list[RolloutRecord]:
    records, _agent = run_replica_detailed(config, replica_index)
    return records


def run_replica_detailed(config: ExperimentConfig, replica_index: int):
    """One agent lifetime; returns (records, agent) so callers can inspect
    what the agent learned or invented."""
    config.validate()
    spec = build_world_spec(config)
    skill = _skill_name(config, spec)
    agent_rng, world_rng = replica_rng_streams(config.master_seed, replica_index)
    agent = Agent(config.params, agent_rng)
    agent.register_skill_from_world(skill, spec)
    world = WorldInstance(spec, world_rng)
    records = []
    for t in range(config.rollouts):
        world.reset(_initial_state(config, spec, t))
        records.append(
            agent.execute_rollout(
                skill, world,
                active_learning=config.active_learning,
                creativity_on=config.creativity,
                success_metric=config.success_metric,
            )
        )
    return records, agent


@dataclass(frozen=True)
class SuccessCurve:
    """Per-rollout success fraction over a replica population."""

    raw: np.ndarray
    smoothed: np.ndarray
    replicas: int
    smoothing_window: int

    def convergence_rollout(self, threshold: float = 0.9):
        """First index where the smoothed curve reaches the threshold, or
        None when it never does."""
        if not 0.0 < threshold < 1.0:
            raise ValueError("threshold must be in (0, 1)")
        hits = np.nonzero(self.smoothed >= threshold)[0]
        return int(hits[0]) if hits.size else None


def smooth_curve(raw: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average; windows shrink at the boundaries."""
    if window <= 1:
        return raw.astype(float).copy()
    n = len(raw)
    out = np.empty(n, dtype=float)
    half_back = (window - 1) // 2
    half_fwd = window - half_back
    for t in range(n):
        lo = max(0, t - half_back)
        hi = min(n, t + half_fwd)
        out[t] = raw[lo:hi].mean()
    return out


def _replica_worker(args):
    config, index = args
    records, _ = run_replica_detailed(config, index)
    return np.array([r.success for r in records], dtype=np.uint8)


def run_experiment(config: ExperimentConfig, workers: int = 1) -> SuccessCurve:
    """Run all replicas and aggregate the per-rollout success fraction."""
    config.validate()
    jobs = [(config, i) for i in range(config.replicas)]
    if workers > 1 and config.replicas > 1:
        with multiprocessing.Pool(workers) as pool:
            rows = pool.map(_replica_worker, jobs, chunksize=max(1, len(jobs) // (4 * workers)))
    else:
        rows = [_replica_worker(job) for job in jobs]
    matrix = np.stack(rows)
    raw = matrix.mean(axis=0)
    smoothed = smooth_curve(raw, config.smoothing_window)
    return SuccessCurve(raw=raw, smoothed=smoothed, replicas=config.replicas,
                        smoothing_window=config.smoothing_window)


def baseline_rollouts(total_behaviours: int) -> int:
    """Try-every-combination baseline: three 4-state sensing channels plus
    the single-state one gives 13 combinations per behaviour."""
    if total_behaviours < 1:
        raise ValueError("total_behaviours must be >= 1")
    return 13 * total_behaviours


def linear_fit(points) -> tuple[float, float, float]:
    """Least-squares line through (x, y) points: (slope, intercept, r2)."""
    pts = list(points)
    if len(pts) < 2:
        raise ValueError("need at least 2 points for a linear fit")
    xs = np.array([p[0] for p in pts], dtype=float)
    ys = np.array([p[1] for p in pts], dtype=float)
    x_mean = xs.mean()
    y_mean = ys.mean()
    var = float(((xs - x_mean) ** 2).sum())
    if var == 0.0:
        raise ValueError("degenerate fit: all x values equal")
    slope = float(((xs - x_mean) * (ys - y_mean)).sum()) / var
    intercept = y_mean - slope * x_mean
    residual = float(((ys - (slope * xs + intercept)) ** 2).sum())
    total = float(((ys - y_mean) ** 2).sum())
    r2 = 1.0 if total == 0.0 else 1.0 - residual / total
    return slope, intercept, r2


def asymptotic_speedup(pairs) -> float:
    """1 - slope_A/slope_B from per-variant linear fits of convergence
    rollouts against the behaviour count.

    `pairs` is a list of (J, rollouts_variant_A, rollouts_variant_B); the
    result is the asymptotic fraction of rollouts variant A saves over B.
    """
    pts = list(pairs)
    slope_a, _, _ = linear_fit([(j, a) for j, a, _ in pts])
    slope_b, _, _ = linear_fit([(j, b) for j, _, b in pts])
    if slope_b == 0.0:
        raise ValueError("degenerate fit: reference variant has zero slope")
    return 1.0 - slope_a / slope_b


@dataclass(frozen=True)
class RunResult:
    variant: str
    world: str
    total_behaviours: int
    curve: SuccessCurve


def run_grid(base: ExperimentConfig, behaviour_counts=(5, 10, 15, 20),
             variants=VARIANTS, workers: int = 1) -> list[RunResult]:
    """The convergence-scaling grid: every J for every variant."""
    results = []
    for variant in variants:
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        for j in behaviour_counts:
            config = replace(
                base,
                total_behaviours=j,
                active_learning=variant in ("active", "creative"),
                creativity=variant == "creative",
            )
            curve = run_experiment(config, workers=workers)
            results.append(RunResult(variant, config.world, j, curve))
    return results


def summarize(results: list[RunResult], threshold: float = 0.9) -> dict:
    """Convergence table plus the active-vs-no-extension speedup when both
    variants are present at two or more shared behaviour counts."""
    entries = []
    for r in results:
        entries.append({
            "variant": r.variant,
            "world": r.world,
            "total_behaviours": r.total_behaviours,
            "convergence_rollout": r.curve.convergence_rollout(threshold),
            "baseline_rollouts": baseline_rollouts(r.total_behaviours),
            "replicas": r.curve.replicas,
            "smoothing_window": r.curve.smoothing_window,
        })
    summary = {"threshold": threshold, "entries": entries, "speedups": {}}
    by_variant = {}
    for e in entries:
        if e["convergence_rollout"] is not None:
            by_variant.setdefault(e["variant"], {})[e["total_behaviours"]] = e[
                "convergence_rollout"]
    active = by_variant.get("active", {})
    no_ext = by_variant.get("no_ext", {})
    shared = sorted(set(active) & set(no_ext))
    if len(shared) >= 2:
        pairs = [(j, active[j], no_ext[j]) for j in shared]
        summary["speedups"]["active_vs_no_ext"] = asymptotic_speedup(pairs)
    return summary


CURVE_COLUMNS = ("variant", "world", "J", "rollout", "success_rate_raw",
                 "success_rate_smoothed")


def _curve_rows(results: list[RunResult]):
    for r in results:
        for t in range(len(r.curve.raw)):
            yield (r.variant, r.world, r.total_behaviours, t,
                   f"{r.curve.raw[t]:.6f}", f"{r.curve.smoothed[t]:.6f}")


def summary_path_for(path: str) -> str:
    return str(path) + ".summary.json"


def emit_results(results: list[RunResult], path, fmt: str = "csv",
                 threshold: float = 0.9) -> None:
    """Write the curves to `path` (csv or json) and the convergence/speedup
    summary to a companion JSON file.  Output is byte-stable for a fixed
    seed."""
    path = str(path)
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    try:
        if fmt == "csv":
            with open(path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(CURVE_COLUMNS)
                writer.writerows(_curve_rows(results))
        else:
            rows = [dict(zip(CURVE_COLUMNS, row)) for row in _curve_rows(results)]
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(rows, fh, indent=1, sort_keys=True)
                fh.write("\n")
        summary = summarize(results, threshold)
        with open(summary_path_for(path), "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=1, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {path!r}: {exc}") from exc


def load_summary(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def speedup_from_summary(summary: dict) -> float:
    """Recompute the active-vs-no-extension speedup from a summary dict."""
    by_variant = {}
    for e in summary["entries"]:
        if e["convergence_rollout"] is not None:
            by_variant.setdefault(e["variant"], {})[e["total_behaviours"]] = e[
                "convergence_rollout"]
    active = by_variant.get("active", {})
    no_ext = by_variant.get("no_ext", {})
    shared = sorted(set(active) & set(no_ext))
    if len(shared) < 2:
        raise ValueError("need converged active and no_ext entries at >= 2 behaviour counts")
    return asymptotic_speedup([(j, active[j], no_ext[j]) for j in shared])
