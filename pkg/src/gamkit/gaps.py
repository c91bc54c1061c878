"""Required-SNR interpolation and dB gaps between MI curves."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .constellation import build
from .metrics import entropy_bits
from .mi import mi_sweep


def capacity_snr_db(target_bits: float) -> float:
    """SNR in dB at which ``log2(1 + S)`` equals ``target_bits``."""
    return 10.0 * math.log10(2.0**target_bits - 1.0)


def required_snr_db(snr_db, mi_bits, target_bits: float) -> float:
    """Smallest SNR at which a sampled MI curve reaches ``target_bits``.

    The curve is made monotone with a running maximum (estimator noise can
    produce small dips) and then interpolated linearly in dB. Returns NaN when
    the target is not bracketed by the sweep.
    """
    snr = np.asarray(snr_db, dtype=float)
    mi = np.asarray(mi_bits, dtype=float)
    order = np.argsort(snr)
    snr, mi = snr[order], np.fmax.accumulate(mi[order])
    if mi.size == 0 or target_bits > mi[-1] or target_bits < mi[0]:
        return math.nan
    k = int(np.searchsorted(mi, target_bits, side="left"))
    if mi[k] == target_bits or k == 0:
        return float(snr[k])
    lo, hi = mi[k - 1], mi[k]
    t = (target_bits - lo) / (hi - lo)
    return float(snr[k - 1] + t * (snr[k] - snr[k - 1]))


@dataclass
class GapReport:
    target_bits: float
    capacity_snr_db: float
    required_snr_db: dict = field(default_factory=dict)
    gap_to_capacity_db: dict = field(default_factory=dict)
    pairwise_gap_db: dict = field(default_factory=dict)
    unreachable: list = field(default_factory=list)

    def to_text(self) -> str:
        lines = [f"target MI {self.target_bits:g} b/s/Hz, capacity needs "
                 f"{self.capacity_snr_db:.3f} dB"]
        for name, snr in self.required_snr_db.items():
            if name in self.unreachable:
                lines.append(f"  {name:<16} unreachable")
            else:
                lines.append(f"  {name:<16} {snr:8.3f} dB   gap to capacity "
                             f"{self.gap_to_capacity_db[name]:+.3f} dB")
        for pair, gap in self.pairwise_gap_db.items():
            lines.append(f"  {pair:<32} {gap:+.3f} dB")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "target_bits": self.target_bits,
            "capacity_snr_db": self.capacity_snr_db,
            "required_snr_db": self.required_snr_db,
            "gap_to_capacity_db": self.gap_to_capacity_db,
            "pairwise_gap_db": self.pairwise_gap_db,
            "unreachable": self.unreachable,
        }


def gap_report(curves: dict, target_bits: float, entropies=None) -> GapReport:
    """Gaps from ``{name: (snr_db, mi_bits)}`` curves at a common MI level.

    ``pairwise_gap_db["a - b"]`` is how much more SNR ``a`` needs than ``b``.
    """
    entropies = entropies or {}
    rep = GapReport(target_bits, capacity_snr_db(target_bits))
    for name, (snr, mi) in curves.items():
        req = math.nan
        if target_bits <= entropies.get(name, math.inf):
            req = required_snr_db(snr, mi, target_bits)
        rep.required_snr_db[name] = req
        rep.gap_to_capacity_db[name] = req - rep.capacity_snr_db
        if math.isnan(req):
            rep.unreachable.append(name)
    for a, b in itertools.permutations(curves, 2):
        rep.pairwise_gap_db[f"{a} - {b}"] = rep.required_snr_db[a] - rep.required_snr_db[b]
    return rep


def compare_schemes(schemes, N: int, target_bits: float, snr_grid_db, **sweep_kw) -> GapReport:
    """Sweep each scheme at size ``N`` and report required-SNR gaps.

    All schemes share the sweep seed, so Monte Carlo rows use common noise.
    """
    curves, entropies = {}, {}
    for name in schemes:
        c = build(name, N)
        table = mi_sweep(c, snr_grid_db, **sweep_kw)
        curves[name] = ([r.snr_db for r in table], [r.mi_bits for r in table])
        entropies[name] = entropy_bits(c)
    return gap_report(curves, target_bits, entropies)
