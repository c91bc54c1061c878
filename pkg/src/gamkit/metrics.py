"""Scalar figures of merit for a constellation."""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import gammaln

from .constellation import Constellation, dc_offset


@dataclass(frozen=True)
class MetricReport:
    mean_power: float
    peak_power: float
    papr_linear: float
    papr_db: float
    entropy_bits: float
    min_distance: float
    dc_magnitude: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_text(self) -> str:
        rows = self.to_dict()
        width = max(map(len, rows))
        return "\n".join(f"{k:<{width}}  {v:.6g}" for k, v in rows.items())


def entropy_bits(c: Constellation) -> float:
    p = c.probs[c.probs > 0]
    return float(-np.sum(p * np.log2(p))) + 0.0


def mean_power(c: Constellation) -> float:
    return float(np.sum(c.probs * np.abs(c.points) ** 2))


def peak_power(c: Constellation) -> float:
    return float(np.max(np.abs(c.points) ** 2))


def papr(c: Constellation) -> float:
    """Peak over mean symbol power (linear)."""
    return peak_power(c) / mean_power(c)


def papr_disc_closed_form(N: int) -> float:
    return 2.0 * N / (N + 1)


def papr_gb_hr_closed_form(N: int) -> float:
    log_n = math.log(N)
    return log_n / (log_n - gammaln(N + 1) / N)


_BRUTE_FORCE_MAX = 4096


def min_distance(c: Constellation) -> float:
    """Smallest pairwise distance. Coincident points give 0.0 and a warning.

    Brute force up to 4096 points, a k-d tree above that.
    """
    if c.n_points < 2:
        raise ValueError("minimum distance needs at least two points")
    x = c.points
    if c.n_points <= _BRUTE_FORCE_MAX:
        d = np.abs(x[:, None] - x[None, :])
        np.fill_diagonal(d, np.inf)
        dmin = float(d.min())
    else:
        xy = np.column_stack([x.real, x.imag])
        dist, _ = cKDTree(xy).query(xy, k=2)
        dmin = float(dist[:, 1].min())
    if dmin == 0.0:
        warnings.warn("constellation has coincident points", RuntimeWarning, stacklevel=2)
    return dmin


def report(c: Constellation) -> MetricReport:
    mp = mean_power(c)
    pk = peak_power(c)
    ratio = pk / mp
    return MetricReport(
        mean_power=mp,
        peak_power=pk,
        papr_linear=ratio,
        papr_db=10.0 * math.log10(ratio),
        entropy_bits=entropy_bits(c),
        min_distance=min_distance(c) if c.n_points > 1 else float("nan"),
        dc_magnitude=abs(dc_offset(c)),
    )
