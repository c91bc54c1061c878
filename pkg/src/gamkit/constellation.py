"""Constellation construction: golden angle spirals plus QAM/PSK baselines.

All builders return an immutable :class:`Constellation` whose average power
equals the requested ``p_bar``. GAM points sit at ``r_n * exp(i * 2*pi*phi*n)``
with ``phi = 1 - (sqrt(5) - 1)/2``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import gammaln

PHI_FRAC = 1.0 - (math.sqrt(5.0) - 1.0) / 2.0
GOLDEN_ANGLE_RAD = 2.0 * math.pi * PHI_FRAC

_POWER_RTOL = 1e-9


class Scheme(str, enum.Enum):
    DISC_GAM = "disc"
    GB_GAM_HR = "gb-hr"
    GB_GAM_G1 = "gb-g1"
    QAM = "qam"
    PSK = "psk"
    CUSTOM = "custom"

    @property
    def is_gam(self) -> bool:
        return self in (Scheme.DISC_GAM, Scheme.GB_GAM_HR, Scheme.GB_GAM_G1)


@dataclass(frozen=True)
class Constellation:
    """Equiprobable set of complex points with power and indexing metadata.

    ``points`` and ``probs`` are stored as read-only numpy arrays. ``index_base``
    records whether the GAM index ``n`` starts at 0 or 1, so phases can be
    audited after the fact.
    """

    points: np.ndarray
    probs: np.ndarray
    scheme: Scheme
    target_power: float
    index_base: int = 1

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.complex128).reshape(-1)
        probs = np.array(self.probs, dtype=np.float64).reshape(-1)
        if pts.size < 1:
            raise ValueError("constellation needs at least one point")
        if probs.size != pts.size:
            raise ValueError(f"got {pts.size} points but {probs.size} probabilities")
        if not np.all(np.isfinite(pts)):
            raise ValueError("constellation points must be finite")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must be nonnegative and sum to 1")
        if self.index_base not in (0, 1):
            raise ValueError("index_base must be 0 or 1")
        power = float(np.sum(probs * np.abs(pts) ** 2))
        if not math.isclose(power, self.target_power, rel_tol=_POWER_RTOL, abs_tol=0.0):
            raise ValueError(
                f"mean power {power!r} does not match target {self.target_power!r}"
            )
        pts.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "target_power", float(self.target_power))

    @property
    def n_points(self) -> int:
        return int(self.points.size)

    @property
    def radii(self) -> np.ndarray:
        return np.abs(self.points)

    @property
    def indices(self) -> np.ndarray:
        """GAM index of every point, honouring ``index_base``."""
        return np.arange(self.n_points) + self.index_base

    def scaled(self, power: float) -> "Constellation":
        """Same geometry rescaled to mean power ``power``."""
        _check_power(power)
        factor = math.sqrt(power / self.target_power)
        return Constellation(
            self.points * factor, self.probs, self.scheme, power, self.index_base
        )

    def rotated(self, theta: float) -> "Constellation":
        return Constellation(
            self.points * np.exp(1j * theta),
            self.probs,
            self.scheme,
            self.target_power,
            self.index_base,
        )

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme.value,
            "n": self.n_points,
            "power": self.target_power,
            "index_base": self.index_base,
            "points": [[float(z.real), float(z.imag)] for z in self.points],
            "probs": [float(p) for p in self.probs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Constellation":
        pts = np.array([complex(re, im) for re, im in data["points"]], dtype=np.complex128)
        if len(pts) != int(data["n"]):
            raise ValueError(f"'n' is {data['n']} but {len(pts)} points are listed")
        return cls(
            points=pts,
            probs=np.asarray(data["probs"], dtype=np.float64),
            scheme=Scheme(data["scheme"]),
            target_power=float(data["power"]),
            index_base=int(data["index_base"]),
        )


def save_json(c: Constellation, path) -> None:
    # float repr is the shortest string that round-trips exactly
    Path(path).write_text(json.dumps(c.to_dict(), indent=1) + "\n")


def load_json(path) -> Constellation:
    return Constellation.from_dict(json.loads(Path(path).read_text()))


def _check_power(p_bar):
    if not (p_bar > 0 and math.isfinite(p_bar)):
        raise ValueError(f"average power must be positive and finite, got {p_bar}")


def golden_angle_phase(n):
    """Golden-angle phase ``2*pi*phi*n`` reduced to ``[0, 2*pi)``.

    The fractional part of ``phi * n`` is taken before scaling by ``2*pi`` so
    large indices keep their precision. Accepts scalars or integer arrays;
    indices beyond ``2**40`` lose accuracy in double precision.
    """
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise ValueError("golden angle index must be nonnegative")
    turns = np.mod(PHI_FRAC * n_arr.astype(np.float64), 1.0)
    phase = 2.0 * np.pi * turns
    # fold the (rare) rounding of 2*pi*turns up to exactly 2*pi
    phase = np.where(phase >= 2.0 * np.pi, 0.0, phase)
    if np.ndim(phase) == 0:
        return float(phase)
    return phase


def _gam(radii, p_bar, scheme, index_base):
    radii = np.asarray(radii, dtype=np.float64)
    n = np.arange(radii.size) + index_base
    power = np.mean(radii**2)
    # one final exact rescale keeps sum p|x|^2 = p_bar at rounding level
    radii = radii * math.sqrt(p_bar / power)
    pts = radii * np.exp(1j * golden_angle_phase(n))
    probs = np.full(radii.size, 1.0 / radii.size)
    return Constellation(pts, probs, scheme, p_bar, index_base)


def build_disc_gam(N: int, p_bar: float = 1.0) -> Constellation:
    """Disc-GAM: ``r_n = c * sqrt(n)`` for ``n = 1..N`` with ``c = sqrt(2 p_bar / (N+1))``."""
    if N < 1:
        raise ValueError(f"disc-GAM needs N >= 1, got {N}")
    _check_power(p_bar)
    n = np.arange(1, N + 1)
    c_disc = math.sqrt(2.0 * p_bar / (N + 1))
    return _gam(c_disc * np.sqrt(n), p_bar, Scheme.DISC_GAM, index_base=1)


def gb_hr_scale(N: int, p_bar: float = 1.0) -> float:
    """Radial scale ``c_gb = sqrt(N p_bar / (N ln N - ln N!))``, ln N! via log-gamma."""
    return math.sqrt(N * p_bar / (N * math.log(N) - gammaln(N + 1)))


def build_gb_gam_hr(N: int, p_bar: float = 1.0) -> Constellation:
    """Geometric-bell GAM from inverse sampling of the Rayleigh radial CDF.

    Radii are ``c_gb * sqrt(ln(N / (N - n)))`` for ``n = 0..N-1``, so the
    innermost point sits at the origin and the outermost at ``c_gb * sqrt(ln N)``.
    """
    if N < 2:
        raise ValueError(f"GB-GAM (HR) needs N >= 2, got {N}")
    _check_power(p_bar)
    n = np.arange(N)
    radii = gb_hr_scale(N, p_bar) * np.sqrt(np.log(N / (N - n)))
    return _gam(radii, p_bar, Scheme.GB_GAM_HR, index_base=0)


def build_qam(N: int, p_bar: float = 1.0) -> Constellation:
    """Square QAM on the odd-integer grid, scaled to mean power ``p_bar``."""
    side = math.isqrt(N) if N > 0 else 0
    if N < 4 or side * side != N or side % 2:
        raise ValueError(f"square QAM needs N = m*m with m even, got N={N}")
    _check_power(p_bar)
    levels = np.arange(-side + 1, side, 2, dtype=np.float64)
    grid = (levels[:, None] + 1j * levels[None, :]).reshape(-1)
    unscaled = 2.0 * (N - 1) / 3.0
    pts = grid * math.sqrt(p_bar / unscaled)
    return Constellation(pts, np.full(N, 1.0 / N), Scheme.QAM, p_bar, index_base=0)


def build_psk(N: int, p_bar: float = 1.0) -> Constellation:
    if N < 2:
        raise ValueError(f"PSK needs N >= 2, got {N}")
    _check_power(p_bar)
    phases = 2.0 * np.pi * np.arange(N) / N
    pts = math.sqrt(p_bar) * np.exp(1j * phases)
    return Constellation(pts, np.full(N, 1.0 / N), Scheme.PSK, p_bar, index_base=0)


def with_radii(
    radii, p_bar: float = 1.0, scheme: Scheme = Scheme.CUSTOM, index_base: int = 1
) -> Constellation:
    """GAM constellation from an arbitrary nondecreasing radius profile.

    The profile is rescaled so the mean power is ``p_bar``; phases follow the
    golden angle starting at ``index_base``.
    """
    r = np.asarray(radii, dtype=np.float64).reshape(-1)
    if r.size < 1:
        raise ValueError("need at least one radius")
    if np.any(r < 0):
        raise ValueError("radii must be nonnegative")
    if np.any(np.diff(r) < 0):
        raise ValueError("radii must be nondecreasing")
    if not np.any(r > 0):
        raise ValueError("at least one radius must be positive")
    _check_power(p_bar)
    return _gam(r, p_bar, Scheme(scheme), index_base)


BUILDERS = {
    Scheme.DISC_GAM: build_disc_gam,
    Scheme.GB_GAM_HR: build_gb_gam_hr,
    Scheme.QAM: build_qam,
    Scheme.PSK: build_psk,
}


def build(scheme, N: int, p_bar: float = 1.0) -> Constellation:
    """Dispatch on a scheme name such as ``"disc"`` or ``"gb-hr"``."""
    scheme = Scheme(scheme)
    if scheme not in BUILDERS:
        raise ValueError(f"scheme {scheme.value!r} has no closed-form builder")
    return BUILDERS[scheme](N, p_bar)


def dc_offset(c: Constellation) -> complex:
    return complex(np.sum(c.probs * c.points))


def remove_dc(c: Constellation) -> Constellation:
    """Subtract the mean point and restore the original average power."""
    centered = c.points - dc_offset(c)
    power = float(np.sum(c.probs * np.abs(centered) ** 2))
    if power <= 0:
        raise ValueError("constellation collapses to a single point after DC removal")
    centered = centered * math.sqrt(c.target_power / power)
    scheme = Scheme.CUSTOM if c.scheme.is_gam else c.scheme
    return Constellation(centered, c.probs, scheme, c.target_power, c.index_base)
