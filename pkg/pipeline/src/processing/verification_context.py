"""
verification_context.py

Shared state of one verification run and the row-parallel task runner.

The context is built once from a TestMatrix (operators, weights, inputs, the
pairing function g) and handed read-only to every task. Tasks are evaluated with
joblib in submission order while BLAS thread pools are pinned to one thread, so
rows are identical whatever --threads is.

Created: July 31, 2025
"""

import logging
import time
from dataclasses import dataclass
from functools import cached_property, partial

from joblib import Parallel, delayed
from threadpoolctl import threadpool_limits

from configuration.inputs import (
    build_ati,
    build_operators,
    build_weights,
    input_functions,
    lambda_levels,
    pairing_function,
    time_sweep,
)
from weights.muckenhoupt import weight_summary

logger = logging.getLogger(__name__)


class VerificationContext:
    """
    Everything a verifier needs, derived from one TestMatrix.

    Attributes:
        matrix (TestMatrix): The configuration
        first, second, composition (KernelOperator): T1, T2 and T1∘T2
        ati (AtIFamily): Approximation to the identity
        weights (list[Weight]): Configured weights
        inputs (list[tuple[str, GridFunction]]): Labelled input functions
        pairing (GridFunction): Fixed positive g for the bilinear checks
    """

    def __init__(self, matrix, loader=None):
        self.matrix = matrix
        kwargs = {} if loader is None else {"loader": loader}
        self.first, self.second, self.composition = build_operators(matrix, **kwargs)
        self.ati = build_ati(matrix)
        self.weights = build_weights(matrix)
        self.inputs = input_functions(matrix)
        self.pairing = pairing_function(matrix)
        logger.info(
            "context: n=%d, L=%d, T1=%s, T2=%s, %d weight(s), %d input(s)",
            self.n, self.level, self.first.label, self.second.label, len(self.weights), len(self.inputs),
        )

    @property
    def n(self):
        return self.matrix.grid.n

    @property
    def level(self):
        return self.matrix.grid.level

    @property
    def periodic(self):
        return self.matrix.grid.periodic

    @property
    def family(self):
        return self.matrix.family

    @property
    def inner_family(self):
        return self.matrix.grid.inner_family

    @property
    def sweeps(self):
        return self.matrix.sweeps

    @cached_property
    def times(self):
        return time_sweep(self.matrix)

    def lambdas(self, f):
        return lambda_levels(self.matrix, f)

    def summary(self, weight, p):
        return weight_summary(weight, p, self.family)


@dataclass(frozen=True)
class VerificationTask:
    """A named unit of work returning a list of ReportRows."""

    name: str
    func: partial

    def run(self):
        start = time.perf_counter()
        rows = self.func()
        elapsed = (time.perf_counter() - start) * 1000.0
        logger.debug("task %s: %d row(s) in %.1f ms", self.name, len(rows), elapsed)
        return rows, elapsed


def task(name, func, *args, **kwargs):
    return VerificationTask(name, partial(func, *args, **kwargs))


def run_tasks(tasks, context, threads=1, timings=False):
    """
    Evaluate tasks and stamp their rows.

    Parameters:
        tasks (list[VerificationTask]): Work items in report order
        context (VerificationContext): Supplies seed and level for every row
        threads (int): joblib workers (threads share the read-only context)
        timings (bool): Record runtime_ms in the rows; otherwise rows carry 0

    Returns:
        tuple[list[ReportRow], dict[str, float]]: rows in task order and the
        measured runtime of every task
    """
    with threadpool_limits(limits=1):
        results = Parallel(n_jobs=threads, prefer="threads")(delayed(t.run)() for t in tasks)

    rows, runtimes = [], {}
    for t, (task_rows, elapsed) in zip(tasks, results):
        runtimes[t.name] = elapsed
        share = elapsed / max(len(task_rows), 1) if timings else 0.0
        rows.extend(row.stamped(context.matrix.seed, context.level, share) for row in task_rows)
    logger.info("%d task(s) produced %d row(s)", len(tasks), len(rows))
    return rows, runtimes
