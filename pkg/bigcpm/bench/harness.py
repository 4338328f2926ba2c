"""
Benchmark harness for single CPM fits
Times fit_cpm over an (N, M, p) grid; each cell runs in its own child
process so memory high-water marks stay separate.
"""
import logging
import multiprocessing
import sys
import time
import tracemalloc
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
import psutil

from ..core.data import Dataset, index_outcomes
from ..core.model import SOLVERS, FitOptions, fit_cpm
from ..discretize.binning import bin_equal_quantile
from ..errors import ArgumentError

try:
    import resource
except ImportError:  # not available on Windows
    resource = None

logger = logging.getLogger(__name__)

FULL_GRID: Dict[str, List[int]] = {
    "Ns": [5_000, 10_000, 20_000, 30_000, 40_000],
    "Ms": [1_000, 5_000, 10_000, 20_000, 40_000],
    "ps": [10, 25, 50, 100],
}
DESK_GRID: Dict[str, List[int]] = {
    "Ns": [500, 1_000, 2_000, 3_000, 4_000],
    "Ms": [100, 500, 1_000, 2_000, 4_000],
    "ps": [5, 10, 25],
}


@dataclass
class BenchRecord:
    """Measurements for one (N, M, p) cell

    peak_mem is the child process high-water mark; fit_mem is the peak
    traced allocation during the fit itself.
    """
    N: int
    M: int
    p: int
    time: float
    peak_mem: int
    fit_converged: bool
    fit_mem: int = 0
    iterations: int = 0
    status: str = "ok"
    error: Optional[str] = None


@dataclass(frozen=True)
class BenchCell:
    N: int
    M: int
    p: int
    seed: int = 0
    solver: str = "banded"


def plan_grid(Ns: Sequence[int], Ms: Sequence[int], ps: Sequence[int], seed: int = 0,
              solver: str = "banded") -> List[BenchCell]:
    """Feasible cells (M <= N) in p, N, M order"""
    if not (Ns and Ms and ps):
        raise ArgumentError("Benchmark grid needs at least one N, M and p")
    if solver not in SOLVERS:
        raise ArgumentError(f"Unknown solver '{solver}'; choose one of: {', '.join(SOLVERS)}")
    cells = []
    for p in ps:
        for N in Ns:
            for M in Ms:
                if M > N or M < 2:
                    logger.debug("Skipping infeasible cell N=%d M=%d p=%d", N, M, p)
                    continue
                cells.append(BenchCell(int(N), int(M), int(p), seed, solver))
    return cells


def generate_cell_data(cell: BenchCell) -> Dataset:
    """Continuous predictors; the outcome is binned down to M distinct values"""
    rng = np.random.default_rng([cell.seed, cell.N, cell.M, cell.p])
    X = rng.standard_normal((cell.N, cell.p))
    beta = rng.uniform(-1.0, 1.0, cell.p)
    y = X @ beta + rng.logistic(size=cell.N)
    if cell.M < cell.N:
        y = bin_equal_quantile(y, cell.M, rng).y_b
    return Dataset(y, X)


def peak_rss_bytes() -> int:
    """Process memory high-water mark"""
    if resource is None:
        info = psutil.Process().memory_info()
        return int(getattr(info, "peak_wset", info.rss))
    usage = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    return int(usage) * (1 if sys.platform == "darwin" else 1024)


def measure_cell(cell: BenchCell) -> BenchRecord:
    """Warm-up fit under tracemalloc, then one timed fit"""
    data = generate_cell_data(cell)
    M = index_outcomes(data.y).M
    opts = FitOptions(solver=cell.solver)
    started = time.perf_counter()
    try:
        tracemalloc.start()
        try:
            fit_cpm(data, "logit", opts)
            _, fit_mem = tracemalloc.get_traced_memory()
        finally:
            tracemalloc.stop()

        started = time.perf_counter()
        fit = fit_cpm(data, "logit", opts)
        elapsed = time.perf_counter() - started
    except Exception as exc:
        return BenchRecord(N=cell.N, M=M, p=cell.p, time=time.perf_counter() - started,
                           peak_mem=peak_rss_bytes(), fit_converged=False,
                           status="error", error=f"{type(exc).__name__}: {exc}")
    return BenchRecord(N=cell.N, M=M, p=cell.p, time=elapsed, peak_mem=peak_rss_bytes() or fit_mem,
                       fit_converged=fit.converged, fit_mem=int(fit_mem), iterations=fit.iterations)


def _measure_isolated(cell: BenchCell) -> BenchRecord:
    context = multiprocessing.get_context("spawn")
    try:
        with ProcessPoolExecutor(max_workers=1, mp_context=context) as executor:
            return executor.submit(measure_cell, cell).result()
    except Exception as exc:
        return BenchRecord(N=cell.N, M=cell.M, p=cell.p, time=float("nan"), peak_mem=0,
                           fit_converged=False, status="error", error=f"{type(exc).__name__}: {exc}")


def run_grid(Ns: Sequence[int], Ms: Sequence[int], ps: Sequence[int], seed: int = 0,
             solver: str = "banded", isolate: bool = True, recorder=None) -> List[BenchRecord]:
    """One record per feasible cell, measured strictly one after another"""
    cells = plan_grid(Ns, Ms, ps, seed, solver)
    run_id = None
    if recorder is not None:
        run_id = recorder.start_run(seed, solver, {"Ns": list(Ns), "Ms": list(Ms), "ps": list(ps)})

    records = []
    try:
        for position, cell in enumerate(cells):
            record = _measure_isolated(cell) if isolate else measure_cell(cell)
            if record.status == "ok":
                logger.info("cell N=%d M=%d p=%d: %.4fs, fit peak %.2f MB, converged=%s",
                            record.N, record.M, record.p, record.time, record.fit_mem / 2**20,
                            record.fit_converged)
            else:
                logger.warning("cell N=%d M=%d p=%d failed: %s", record.N, record.M, record.p, record.error)
            records.append(record)
            if run_id is not None:
                recorder.record_cell(run_id, record, position)
    except BaseException as exc:
        if run_id is not None:
            recorder.complete_run(run_id, status="error", error=str(exc))
        raise
    if run_id is not None:
        recorder.complete_run(run_id)
    return records
