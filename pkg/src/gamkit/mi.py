"""Mutual information of a discrete input over the complex AWGN channel.

Conventions: ``sigma2`` is the total complex noise power, so each of the real
and imaginary noise components has variance ``sigma2 / 2`` and the channel
density is ``exp(-|y - x|^2 / sigma2) / (pi * sigma2)``. MI is reported in bits
per channel use as ``h(Y) - log2(pi * e * sigma2)``.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import simpson

from .constellation import Constellation

LOG2E = 1.0 / math.log(2.0)

# elements per (samples x points) block; bounds temporaries to ~100 MB
_BLOCK = 1 << 22


class Method(str, enum.Enum):
    MONTE_CARLO = "mc"
    GRID = "grid"
    CLOSED_FORM = "closed-form"


@dataclass(frozen=True)
class ChannelSpec:
    noise_variance: float
    snr_linear: float

    def __post_init__(self):
        if not self.noise_variance > 0:
            raise ValueError("noise variance must be positive")
        if self.snr_linear < 0:
            raise ValueError("SNR must be nonnegative")

    @classmethod
    def from_snr_db(cls, snr_db: float, power: float = 1.0) -> "ChannelSpec":
        snr = 10.0 ** (snr_db / 10.0)
        return cls(power / snr, snr)

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.snr_linear)


@dataclass(frozen=True)
class MiEstimate:
    bits: float
    method: Method
    samples_or_nodes: int
    std_error: float = 0.0


def noise_entropy_bits(sigma2: float) -> float:
    """Differential entropy of circular complex Gaussian noise, in bits."""
    return math.log2(math.pi * math.e * sigma2)


def shannon_capacity(snr_linear: float) -> float:
    if snr_linear < 0:
        raise ValueError("SNR must be nonnegative")
    return math.log2(1.0 + snr_linear)


def log_output_density(y, c: Constellation, sigma2: float) -> np.ndarray:
    """Natural log of the Gaussian-mixture output density ``f_Y(y)``.

    Evaluated with a max-shifted log-sum-exp over constellation points so
    high-SNR tails do not underflow.
    """
    if not sigma2 > 0:
        raise ValueError("noise variance must be positive")
    y = np.atleast_1d(np.asarray(y, dtype=np.complex128)).reshape(-1)
    x = c.points
    # -|y - x|^2 / s2 = (2 Re(y conj x) - |x|^2) / s2 - |y|^2 / s2; the first part is a matmul
    proj = np.vstack([x.real, x.imag]) * (2.0 / sigma2)
    bias = np.log(c.probs) - np.abs(x) ** 2 / sigma2
    out = np.empty(y.size)
    step = max(1, _BLOCK // c.n_points)
    for start in range(0, y.size, step):
        blk = y[start : start + step]
        a = np.column_stack([blk.real, blk.imag]) @ proj
        a += bias
        m = a.max(axis=1)
        a -= m[:, None]
        np.exp(a, out=a)
        out[start : start + step] = np.log(a.sum(axis=1)) + m - np.abs(blk) ** 2 / sigma2
    return out - math.log(math.pi * sigma2)


def output_density(y, c: Constellation, sigma2: float):
    dens = np.exp(log_output_density(y, c, sigma2))
    if np.ndim(y) == 0:
        return float(dens[0])
    return dens


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def mi_monte_carlo(
    c: Constellation, sigma2: float, n_samples: int = 100_000, seed=0
) -> MiEstimate:
    """Monte Carlo MI from noisy symbols ``y = x + w``.

    ``h(Y)`` is estimated by the sample mean of ``-log2 f_Y(y)``. The noise
    entropy ``h(W)`` is subtracted through its per-sample form
    ``-log2 f(y | x)``, whose mean is exactly ``log2(pi e sigma2)``; this
    control variate removes the noise-driven variance, so a noiseless-input
    or saturated constellation gives a near-zero standard error.

    Noise is drawn before the symbol indices so two constellations run with
    the same seed share their noise realisation (common random numbers).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if not sigma2 > 0:
        raise ValueError("noise variance must be positive")
    rng = _rng(seed)
    noise = rng.standard_normal((2, n_samples)) * math.sqrt(sigma2 / 2.0)
    idx = rng.choice(c.n_points, size=n_samples, p=c.probs)
    y = c.points[idx] + (noise[0] + 1j * noise[1])
    log_f_y = log_output_density(y, c, sigma2)
    log_f_y_given_x = -(noise[0] ** 2 + noise[1] ** 2) / sigma2 - math.log(math.pi * sigma2)
    info = (log_f_y_given_x - log_f_y) * LOG2E
    se = float(info.std(ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else 0.0
    return MiEstimate(float(info.mean()), Method.MONTE_CARLO, n_samples, se)


def simpson_weights(nodes: np.ndarray) -> np.ndarray:
    """Composite Simpson weights for a 1-D node vector (any node count)."""
    return simpson(np.eye(nodes.size), x=nodes, axis=1)


def grid_axes(points, sigma2: float, half_width_sigmas: float, nodes_per_axis: int):
    sigma = math.sqrt(sigma2)
    pad = half_width_sigmas * sigma
    gr = np.linspace(points.real.min() - pad, points.real.max() + pad, nodes_per_axis)
    gi = np.linspace(points.imag.min() - pad, points.imag.max() + pad, nodes_per_axis)
    return gr, gi


def mi_grid(
    c: Constellation,
    sigma2: float,
    half_width_sigmas: float = 10.0,
    nodes_per_axis: int = 513,
) -> MiEstimate:
    """Deterministic MI by 2-D tensor-product Simpson quadrature of ``-f log2 f``.

    The box extends ``half_width_sigmas * sqrt(sigma2)`` beyond the extreme
    point coordinates. Cost is ``nodes_per_axis**2 * N`` kernel evaluations, so
    for ``N`` in the thousands Monte Carlo is the cheaper route.
    """
    if nodes_per_axis < 16:
        raise ValueError("grid quadrature needs at least 16 nodes per axis")
    if half_width_sigmas < 6:
        raise ValueError("grid must extend at least 6 noise std devs past the points")
    if not sigma2 > 0:
        raise ValueError("noise variance must be positive")
    gr, gi = grid_axes(c.points, sigma2, half_width_sigmas, nodes_per_axis)
    weights = np.outer(simpson_weights(gr), simpson_weights(gi)).reshape(-1)
    y = (gr[:, None] + 1j * gi[None, :]).reshape(-1)
    log_f = log_output_density(y, c, sigma2)
    h_y = -float(np.sum(weights * np.exp(log_f) * log_f)) * LOG2E
    return MiEstimate(h_y - noise_entropy_bits(sigma2), Method.GRID, nodes_per_axis**2)


def estimate_mi(c: Constellation, sigma2: float, method="mc", **controls) -> MiEstimate:
    method = Method(method)
    if method is Method.MONTE_CARLO:
        return mi_monte_carlo(c, sigma2, **controls)
    if method is Method.GRID:
        return mi_grid(c, sigma2, **controls)
    raise ValueError(f"no estimator for method {method.value!r}")


SWEEP_COLUMNS = ("snr_db", "scheme", "n", "mi_bits", "std_err", "method")


@dataclass
class SweepRow:
    snr_db: float
    scheme: str
    n: int
    mi_bits: float
    std_err: float
    method: str
    note: str = ""


@dataclass
class SweepTable:
    rows: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    def select(self, scheme: str, n=None) -> list:
        return [r for r in self.rows if r.scheme == scheme and (n is None or r.n == n)]

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for r in self.rows:
            writer.writerow(
                [repr(r.snr_db), r.scheme, r.n, repr(r.mi_bits), repr(r.std_err), r.method]
            )
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    def to_json(self, path=None) -> str:
        text = json.dumps([asdict(r) for r in self.rows], indent=1) + "\n"
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, text: str) -> "SweepTable":
        reader = csv.DictReader(io.StringIO(text))
        rows = [
            SweepRow(
                float(r["snr_db"]),
                r["scheme"],
                int(r["n"]),
                float(r["mi_bits"]),
                float(r["std_err"]),
                r["method"],
            )
            for r in reader
        ]
        return cls(rows)


def capacity_rows(snr_grid_db) -> list:
    return [
        SweepRow(float(s), "capacity", 0, shannon_capacity(10.0 ** (s / 10.0)), 0.0,
                 Method.CLOSED_FORM.value)
        for s in snr_grid_db
    ]


def mi_sweep(
    c: Constellation,
    snr_grid_db,
    method="mc",
    n_samples: int = 100_000,
    seed: int = 0,
    half_width_sigmas: float = 10.0,
    nodes_per_axis: int = 513,
    include_capacity: bool = False,
    max_workers=None,
) -> SweepTable:
    """MI versus SNR for a fixed constellation; the noise variance is scaled per row.

    Each row gets its own child of ``SeedSequence(seed)``, so any row can be
    recomputed alone and rows may run concurrently without changing results.
    """
    grid = [float(s) for s in snr_grid_db]
    if not grid:
        raise ValueError("SNR grid is empty")
    method = Method(method)
    children = np.random.SeedSequence(seed).spawn(len(grid))

    def one(i):
        snr_db = grid[i]
        sigma2 = c.target_power / 10.0 ** (snr_db / 10.0)
        try:
            if method is Method.MONTE_CARLO:
                est = mi_monte_carlo(c, sigma2, n_samples, np.random.default_rng(children[i]))
            else:
                est = mi_grid(c, sigma2, half_width_sigmas, nodes_per_axis)
        except (ValueError, FloatingPointError, MemoryError) as exc:
            return SweepRow(snr_db, c.scheme.value, c.n_points, math.nan, math.nan,
                            method.value, note=f"failed: {exc}")
        return SweepRow(snr_db, c.scheme.value, c.n_points, est.bits, est.std_error,
                        method.value)

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            rows = list(pool.map(one, range(len(grid))))
    else:
        rows = [one(i) for i in range(len(grid))]
    if include_capacity:
        rows += capacity_rows(grid)
    return SweepTable(rows)
