"""Lattice search used to cross-check the ELRDF solver."""

import math

import numpy as np

from bandtest.core.arrays import PROB_TOL
from bandtest.core.band import CdfBand
from bandtest.core.errors import INFEASIBLE_BAND_ERROR, InfeasibleBandError
from bandtest.core.sample import SortedSample
from bandtest.statistics.elrdf import Feasibility, tighten_bounds

MAX_ORACLE_SIZE = 4


def grid_oracle_solve(sample: SortedSample, band: CdfBand, step: float = 1e-3) -> float:
    """
    Smallest ELRDF statistic over the simplex lattice with spacing `step`.

    The cumulative weights s_1 < ... < s_{n-1} are restricted to multiples of
    `step` inside the tightened box. The maximum of sum(log(s_i - s_{i-1})) over
    that lattice is found exactly by dynamic programming along the chain, which
    visits the same candidates as full enumeration.

    Args:
        sample: Sorted observations, at most four
        band: CDF band
        step: Lattice spacing in (0, 0.1]

    Returns:
        Minimal statistic on the lattice, +inf when no lattice point has positive weights

    Raises:
        InfeasibleBandError: If the band is infeasible for the sample
    """
    if sample.n > MAX_ORACLE_SIZE:
        raise ValueError(f"Lattice oracle supports at most {MAX_ORACLE_SIZE} observations")
    if not 0 < step <= 0.1:
        raise ValueError("step must lie in (0, 0.1]")

    bounds = tighten_bounds(sample, band)
    if bounds.feasibility is Feasibility.INFEASIBLE:
        raise InfeasibleBandError(INFEASIBLE_BAND_ERROR.format("lattice oracle"))

    n = sample.n
    if n == 1:
        return 0.0

    resolution = round(1.0 / step)
    grid = np.arange(resolution + 1) / resolution
    spacing = grid[:, None] - grid[None, :]
    log_spacing = np.full(spacing.shape, -np.inf)
    positive = spacing > 0
    log_spacing[positive] = np.log(spacing[positive])

    best = np.where(grid == 0.0, 0.0, -np.inf)
    for i in range(n - 1):
        allowed = (grid >= bounds.lower[i] - PROB_TOL) & (grid <= bounds.upper[i] + PROB_TOL)
        best = np.where(allowed, np.max(best[None, :] + log_spacing, axis=1), -np.inf)

    total = float(np.max(best + log_spacing[-1]))
    if not math.isfinite(total):
        return math.inf
    return max(0.0, -total / n - math.log(n))
