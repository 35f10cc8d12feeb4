"""Benchmark harness: setup, streamed updates, evaluation, random comparator."""

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .baseline import SparsifierConfig, baseline_sparsify, random_include
from .eval import condition_number_exact, condition_number_iterative, offtree_density
from .generators import delaunay_mesh, random_connected_graph, regular_graph
from .graph import load_matrix_market
from .lrd import build_pair_index, lrd_decompose
from .resistance import build_embedder
from .stream import grown_graph, synth_stream
from .update import Decision, SparsifierState, ingrass_update, process_edge


@dataclass
class PipelineConfig:
    case_name: str = "delaunay"
    graph: str = ""  # Matrix Market path; empty means a synthetic family
    family: str = "delaunay"  # delaunay | random | regular
    n: int = 11143
    graph_seed: int = 1
    seed: int = 0
    initial_offtree: float = 0.10
    baseline_rounds: int = 100
    stream_mode: str = "complement"
    iterations: int = 10
    growth_factor: float = 3.4  # all-edges off-tree density over the initial one
    m: int = 8
    levels: int = 0  # 0 means default_levels(n)
    growth: float = 2.0
    redistribute: str = "path"
    target_condition: float = 0.0  # 0 means kappa(G0, H0)
    filter_level: int = 0  # 0 means choose from the target
    eval_method: str = "iterative"
    eval_solver: str = "direct"
    eval_eig: str = "lanczos"
    eval_tol: float = 1e-3
    random_steps: int = 10
    events_path: str = ""

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class BenchRun:
    case_name: str
    n: int
    m: int
    initial_density: float
    final_density_all_edges: float
    kappa_initial: float
    kappa_no_update: float
    kappa_after: float
    lambda_max_after: float
    lambda_min_after: float
    final_density: float
    random_density: float  # off-tree density at which Random reaches the target, nan if never
    random_kappa: float
    target_condition: float
    filter_level: int
    setup_seconds: float
    update_seconds: float
    iterations: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    status: str = "ok"

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    CSV_FIELDS = ("case_name", "n", "m", "initial_density", "final_density_all_edges",
                  "kappa_initial", "kappa_no_update", "kappa_after", "final_density",
                  "random_density", "random_kappa", "setup_seconds", "update_seconds", "status")

    def csv_row(self):
        d = self.to_dict()
        return {k: d[k] for k in self.CSV_FIELDS}


def csv_text(rows, fieldnames):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(fieldnames), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def load_case(cfg):
    if cfg.graph:
        return load_matrix_market(cfg.graph, largest_component_only=True)
    if cfg.family == "delaunay":
        return delaunay_mesh(cfg.n, seed=cfg.graph_seed)
    if cfg.family == "random":
        return random_connected_graph(cfg.n, seed=cfg.graph_seed)
    if cfg.family == "regular":
        return regular_graph(cfg.n, seed=cfg.graph_seed)
    raise ValueError(f"unknown graph family {cfg.family!r}")


def kappa(g, h, cfg):
    if cfg.eval_method == "exact":
        return condition_number_exact(g, h)
    return condition_number_iterative(g, h, tol=cfg.eval_tol, solver=cfg.eval_solver,
                                      eig=cfg.eval_eig, seed=cfg.seed)


def random_density_at(g, h0, stream, target, cfg):
    """Smallest nested random fraction of ``stream`` whose union with ``h0``
    reaches ``kappa <= target``, by bisection; returns ``(density, kappa)``."""
    full = random_include(h0, stream, 1.0, seed=cfg.seed)
    k_full = kappa(g, full, cfg).kappa
    if k_full > target:
        return float("nan"), k_full
    lo, hi, k_hi = 0.0, 1.0, k_full
    for _ in range(cfg.random_steps):
        mid = 0.5 * (lo + hi)
        k = kappa(g, random_include(h0, stream, mid, seed=cfg.seed), cfg).kappa
        if k <= target:
            hi, k_hi = mid, k
        else:
            lo = mid
    return offtree_density(random_include(h0, stream, hi, seed=cfg.seed)), k_hi


def _prepare(cfg):
    """``(G0, G_final, H0, batches)`` for the configured case."""
    g = load_case(cfg)
    n = g.n_nodes
    h0 = baseline_sparsify(g, SparsifierConfig.from_offtree(cfg.initial_offtree, n, seed=cfg.seed,
                                                            rounds=cfg.baseline_rounds))
    total = int(round((cfg.growth_factor - 1.0) * offtree_density(h0) * n))
    per = max(1, total // cfg.iterations)
    batches = synth_stream(g, h0, cfg.iterations, per, seed=cfg.seed, mode=cfg.stream_mode)
    if cfg.stream_mode == "complement":
        flat = [(u, v) for b in batches for u, v, _ in b]
        return g.remove_edges(flat), g, h0, batches
    return g, grown_graph(g, batches), h0, batches


def run_pipeline(cfg, json_path=None):
    """Setup once, stream every batch through the update phase, evaluate.

    On failure the partial record is written to ``json_path`` with
    ``status`` set to ``"failed: ..."`` before the exception propagates.
    """
    if isinstance(cfg, dict):
        cfg = PipelineConfig.from_dict(cfg)
    run = None
    try:
        g0, g, h0, batches = _prepare(cfg)
        stream = [e for b in batches for e in b]
        n = g.n_nodes
        rep0 = kappa(g0, h0, cfg)
        target = cfg.target_condition or rep0.kappa

        t0 = time.perf_counter()
        emb = build_embedder(h0, m=cfg.m, seed=cfg.seed)
        hier = lrd_decompose(h0, emb, levels=cfg.levels or None, growth=cfg.growth)
        state = SparsifierState.create(h0, hier, max(target, 2.0), build_pair_index(h0, hier),
                                       cfg.redistribute, cfg.filter_level or None)
        setup = time.perf_counter() - t0

        run = BenchRun(cfg.case_name, n, g.n_edges, offtree_density(h0),
                       offtree_density(h0) + len(stream) / n, rep0.kappa, float("nan"),
                       float("nan"), float("nan"), float("nan"), float("nan"), float("nan"),
                       float("nan"), target, state.filter_level, setup, 0.0, config=asdict(cfg))
        run.kappa_no_update = kappa(g, h0, cfg).kappa

        log = open(cfg.events_path, "w") if cfg.events_path else None
        try:
            for i, batch in enumerate(batches):
                t0 = time.perf_counter()
                events = ingrass_update(state, batch)
                dt = time.perf_counter() - t0
                run.update_seconds += dt
                counts = {d.value: 0 for d in Decision}
                for ev in events:
                    counts[ev.decision.value] += 1
                    if log:
                        log.write(json.dumps({"iteration": i, **ev.to_dict()}) + "\n")
                run.iterations.append({"iteration": i, "batch_size": len(batch), **counts,
                                       "density": (state.n_edges - (n - 1)) / n, "seconds": dt})
        finally:
            if log:
                log.close()

        h = state.to_graph()
        rep = kappa(g, h, cfg)
        run.kappa_after, run.lambda_max_after, run.lambda_min_after = rep.kappa, rep.lambda_max, rep.lambda_min
        run.final_density = offtree_density(h)
        run.random_density, run.random_kappa = random_density_at(g, h0, stream, target, cfg)
    except Exception as exc:
        if json_path:
            partial = run.to_dict() if run else {"config": asdict(cfg)}
            partial["status"] = f"failed: {type(exc).__name__}: {exc}"
            with open(json_path, "w") as fh:
                json.dump(partial, fh, indent=2, sort_keys=True, default=str)
        raise
    if json_path:
        with open(json_path, "w") as fh:
            fh.write(run.to_json())
    return run


SCALING_FIELDS = ("n", "edges", "setup_seconds", "update_median_seconds", "levels", "filter_level")


def _setup_once(h0, cfg):
    t0 = time.perf_counter()
    emb = build_embedder(h0, m=cfg.m, seed=cfg.seed)
    hier = lrd_decompose(h0, emb, levels=cfg.levels or None, growth=cfg.growth)
    index = build_pair_index(h0, hier)
    return time.perf_counter() - t0, hier, index


def scaling_bench(sizes, cfg=None, repeats=3, probe_edges=2000):
    """Setup and per-edge update timings on 4-regular tori of the given sizes.

    Each size is measured ``repeats`` times in a warm process; the row keeps
    the median setup time and the median per-edge update time.  The target
    condition number is ``cfg.target_condition`` (100 if unset).
    """
    if cfg is None:
        cfg = PipelineConfig()
    elif isinstance(cfg, dict):
        cfg = PipelineConfig.from_dict(cfg)
    target = cfg.target_condition or 100.0
    rows = []
    warm = None
    for n in sizes:
        g = regular_graph(n, seed=cfg.graph_seed)
        h0 = baseline_sparsify(g, SparsifierConfig.from_offtree(cfg.initial_offtree, g.n_nodes,
                                                                seed=cfg.seed))
        if warm is None:
            _setup_once(h0, cfg)  # warm caches and lazily built structures
            warm = True
        probe = synth_stream(g, h0, 1, min(probe_edges, g.n_edges - h0.n_edges), seed=cfg.seed)[0]
        setups, updates = [], []
        for _ in range(repeats):
            t_setup, hier, index = _setup_once(h0, cfg)
            setups.append(t_setup)
            state = SparsifierState.create(h0, hier, target, index, cfg.redistribute)
            per = np.empty(len(probe))
            for i, (u, v, w) in enumerate(probe):
                t0 = time.perf_counter()
                process_edge(state, u, v, w)
                per[i] = time.perf_counter() - t0
            updates.append(float(np.median(per)))
        rows.append({"n": g.n_nodes, "edges": g.n_edges,
                     "setup_seconds": float(np.median(setups)),
                     "update_median_seconds": float(np.median(updates)),
                     "levels": hier.levels, "filter_level": state.filter_level})
    return rows
