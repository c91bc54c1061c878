"""Symbol-level AWGN simulation with nearest-neighbour (ML) detection."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.stats import binomtest

from .constellation import Constellation

_BLOCK = 1 << 22
_BATCH = 1 << 16

SER_COLUMNS = ("snr_db", "scheme", "n", "ser", "ci95", "trials")


@dataclass(frozen=True)
class SimRun:
    constellation: Constellation
    snr_db: float
    n_symbols: int
    seed: int = 0

    def __post_init__(self):
        if self.n_symbols < 1:
            raise ValueError("n_symbols must be >= 1")

    @property
    def sigma2(self) -> float:
        return self.constellation.target_power / 10.0 ** (self.snr_db / 10.0)


@dataclass(frozen=True)
class SerResult:
    errors: int
    trials: int
    ser: float
    ci95_halfwidth: float
    ci95_low: float = 0.0
    ci95_high: float = 1.0


def _batches(run: SimRun):
    """Independent RNG substream per batch of symbols."""
    counts = [_BATCH] * (run.n_symbols // _BATCH)
    if run.n_symbols % _BATCH:
        counts.append(run.n_symbols % _BATCH)
    seeds = np.random.SeedSequence(run.seed).spawn(len(counts))
    return zip(counts, seeds)


def transmit(run: SimRun):
    """Yield ``(sent_indices, received)`` batches; symbols uniform, noise of total variance sigma2."""
    c = run.constellation
    scale = math.sqrt(run.sigma2 / 2.0)
    for count, ss in _batches(run):
        rng = np.random.default_rng(ss)
        idx = rng.choice(c.n_points, size=count, p=c.probs)
        noise = rng.standard_normal((2, count)) * scale
        yield idx, c.points[idx] + (noise[0] + 1j * noise[1])


def transmit_all(run: SimRun):
    parts = list(transmit(run))
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def ml_detect(y, c: Constellation):
    """Index of the nearest constellation point; ties go to the smaller index.

    Exact brute force over all points, in blocks to bound memory.
    """
    scalar = np.ndim(y) == 0
    y = np.atleast_1d(np.asarray(y, dtype=np.complex128)).reshape(-1)
    out = np.empty(y.size, dtype=np.int64)
    x = c.points
    step = max(1, _BLOCK // c.n_points)
    for start in range(0, y.size, step):
        blk = y[start : start + step]
        dr = blk.real[:, None] - x.real
        di = blk.imag[:, None] - x.imag
        # argmin returns the first minimum, which is the tie rule we want
        out[start : start + step] = np.argmin(dr * dr + di * di, axis=1)
    return int(out[0]) if scalar else out


def wilson_interval(errors: int, trials: int):
    ci = binomtest(errors, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


def measure_ser(run: SimRun) -> SerResult:
    errors = 0
    for idx, y in transmit(run):
        errors += int(np.count_nonzero(ml_detect(y, run.constellation) != idx))
    lo, hi = wilson_interval(errors, run.n_symbols)
    return SerResult(errors, run.n_symbols, errors / run.n_symbols, (hi - lo) / 2.0, lo, hi)


def ser_sweep(c: Constellation, snr_grid_db, n_symbols: int, seed: int = 0) -> list:
    """One ``(snr_db, SerResult)`` pair per SNR; rows use independent child seeds."""
    seeds = np.random.SeedSequence(seed).generate_state(len(snr_grid_db))
    return [
        (float(s), measure_ser(SimRun(c, float(s), n_symbols, int(sd))))
        for s, sd in zip(snr_grid_db, seeds)
    ]


def ser_table_csv(c: Constellation, sweep, path=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SER_COLUMNS)
    for snr_db, res in sweep:
        writer.writerow([repr(snr_db), c.scheme.value, c.n_points, repr(res.ser),
                         repr(res.ci95_halfwidth), res.trials])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text
