"""Wall-clock scaling of the sparse and dense transformations in the basis size."""
import os
import statistics
import time
from dataclasses import astuple, dataclass, fields

import numpy as np

from .basis import BasisSpec, eval_basis
from .data import simulate
from .exceptions import MMBSplineError
from .reml import CURRIE_DURBAN, MMB, assemble, normalize_kind, profile_loglik
from .smoother import fit

METHOD_LABELS = {MMB: "mmb", CURRIE_DURBAN: "cd"}
# dense m x m work arrays held at once by the dense path
_DENSE_ARRAYS = 6


class BenchMemoryError(MMBSplineError, MemoryError):
    pass


@dataclass(frozen=True)
class BenchRecord:
    m: int
    method: str
    seconds: float
    n: int
    evaluations: int
    n_per_segment: float
    mode: str
    repeats: int


BENCH_HEADER = tuple(f.name for f in fields(BenchRecord))


def _physical_memory():
    try:
        return os.sysconf("SC_PHYS_PAGES") * os.sysconf("SC_PAGE_SIZE")
    except (ValueError, OSError, AttributeError):
        return None


def check_dense_memory(m):
    """Raise with guidance if the dense path would not fit in memory."""
    need = _DENSE_ARRAYS * 8 * m * m
    avail = _physical_memory()
    if avail is not None and need > 0.5 * avail:
        raise BenchMemoryError(
            f"the dense (cd) method at m={m} needs about {need / 2**30:.1f} GiB of "
            f"m x m arrays, over half of the {avail / 2**30:.1f} GiB available; "
            "drop the large sizes from --m-list or benchmark only --method mmb"
        )


def problem(m, degree=2, n_per_segment=10.0, h=0.1, seed=0):
    """Simulated data for ``m`` basis functions at fixed knot spacing ``h``."""
    nseg = m - degree
    spec = BasisSpec(0.0, h * nseg, nseg, degree)
    n = max(int(round(n_per_segment * nseg)), 3)
    x, y = simulate(n, spec.x_min, spec.x_max, 0.5, seed)
    return spec, x, y


def time_once(spec, x, y, kind, evaluations=None):
    """
    Seconds spent in the penalty search for one problem.

    With ``evaluations=None`` this is the full REML search; otherwise a fixed
    number of likelihood evaluations on a log-spaced penalty grid. Assembly is
    excluded either way. Returns ``(seconds, evaluations)``.
    """
    if evaluations is None:
        result = fit(x, y, spec, kind)
        return result.timing_seconds, result.evaluations
    blocks = assemble(eval_basis(spec, x), y, spec, kind)
    lams = np.logspace(-1.0, 1.0, evaluations)
    start = time.perf_counter()
    for lam in lams:
        profile_loglik(blocks, lam)
    return time.perf_counter() - start, evaluations


def run_bench(m_list, methods=(MMB, CURRIE_DURBAN), n_per_segment=10.0, repeats=3,
              evaluations=None, degree=2, seed=0, progress=None):
    """
    Median search time for every ``(m, method)`` cell.

    Cells run one after another. Each cell uses its own simulated data set
    (fixed knot spacing 0.1, ``n_per_segment`` observations per segment).
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    m_list = [int(m) for m in m_list]
    if m_list != sorted(m_list):
        raise ValueError("m_list must be ascending")
    methods = [normalize_kind(k) for k in methods]
    for kind in methods:
        if kind == CURRIE_DURBAN:
            for m in m_list:
                check_dense_memory(m)
    records = []
    for m in m_list:
        spec, x, y = problem(m, degree, n_per_segment, seed=seed + m)
        for kind in methods:
            times = []
            for _ in range(repeats):
                seconds, n_evals = time_once(spec, x, y, kind, evaluations)
                times.append(seconds)
            record = BenchRecord(
                m, METHOD_LABELS[kind], statistics.median(times), x.size, n_evals,
                n_per_segment, "reml" if evaluations is None else "fixed", repeats,
            )
            records.append(record)
            if progress is not None:
                progress(record)
    return records


def loglog_slope(ms, seconds):
    """Least-squares slope of log(seconds) against log(m)."""
    return float(np.polyfit(np.log(ms), np.log(seconds), 1)[0])


def records_to_columns(records):
    return list(zip(*(astuple(r) for r in records)))
