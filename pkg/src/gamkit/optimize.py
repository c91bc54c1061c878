"""MI-maximising radius profiles for equiprobable golden angle constellations.

The problem: maximise I(Y;X) over radii r_1 <= ... <= r_N, r_1 >= 0, with
mean(r**2) / sigma2 = S and optionally r_N**2 / mean(r**2) <= PAPR cap.

Monotonicity is built in by optimising nonnegative increments
(r = cumsum(deltas)); the power equality is enforced by rescaling every
iterate onto the sphere sum(r**2) = N * S * sigma2. What remains is a bound
constrained problem (L-BFGS-B), or an SLSQP problem with one inequality when
a PAPR cap is requested. The objective is the grid-quadrature MI, never Monte
Carlo, and its gradient is exact for the discretised integral.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from .constellation import Scheme, build_disc_gam, build_gb_gam_hr, golden_angle_phase, with_radii
from .mi import LOG2E, noise_entropy_bits

_BLOCK = 1 << 20


def to_deltas(radii) -> np.ndarray:
    """Nondecreasing nonnegative radii -> nonnegative increments."""
    r = np.asarray(radii, dtype=np.float64)
    if np.any(r < 0) or np.any(np.diff(r) < 0):
        raise ValueError("radii must be nonnegative and nondecreasing")
    return np.diff(r, prepend=0.0)


def from_deltas(deltas) -> np.ndarray:
    d = np.asarray(deltas, dtype=np.float64)
    if np.any(d < 0):
        raise ValueError("increments must be nonnegative")
    return np.cumsum(d)


@dataclass(frozen=True)
class GridSpec:
    """Quadrature lattice for the optimisation objective.

    Nodes sit on the fixed lattice ``j * spacing_sigmas * sigma`` and cover at
    least ``max(r) + half_width_sigmas * sigma`` in each direction. Because the
    lattice does not move with the radii, changing ``max(r)`` only adds or
    drops edge nodes where the integrand is negligible, so the objective stays
    smooth enough for finite-difference checks and line searches. Weights are
    the uniform trapezoid ones: for a Gaussian mixture integrand that decays at
    the edges they converge geometrically, and unlike Simpson they do not flip
    parity when an edge node is added.
    """

    half_width_sigmas: float = 10.0
    spacing_sigmas: float = 0.25

    def axis(self, r_max: float, sigma2: float) -> np.ndarray:
        h = self.spacing_sigmas * math.sqrt(sigma2)
        k = int(math.ceil((r_max + self.half_width_sigmas * math.sqrt(sigma2)) / h))
        return h * np.arange(-k, k + 1)

    def weights(self, axis: np.ndarray) -> np.ndarray:
        return np.full(axis.size, axis[1] - axis[0])


def mi_and_gradient(radii, sigma2: float = 1.0, grid: GridSpec = GridSpec(), index_base: int = 0):
    """Grid-quadrature MI of a GAM radius profile and its gradient in the radii.

    Differentiates the discretised ``-sum w f log2 f`` directly, so the
    gradient is exact for the quadrature rule.
    """
    r = np.asarray(radii, dtype=np.float64)
    n_pts = r.size
    unit = np.exp(1j * golden_angle_phase(np.arange(n_pts) + index_base))
    x = r * unit
    axis = grid.axis(float(r.max()), sigma2)
    w1 = grid.weights(axis)
    weights = np.outer(w1, w1).reshape(-1)
    y_all = (axis[:, None] + 1j * axis[None, :]).reshape(-1)
    log_norm = math.log(n_pts * math.pi * sigma2)

    neg_h = 0.0
    grad = np.zeros(n_pts)
    step = max(1, _BLOCK // n_pts)
    for start in range(0, y_all.size, step):
        y = y_all[start : start + step]
        w = weights[start : start + step]
        d = y[:, None] - x[None, :]
        expo = -(d.real**2 + d.imag**2) / sigma2
        m = expo.max(axis=1, keepdims=True)
        kern = np.exp(expo - m)
        s = kern.sum(axis=1)
        log_f = np.log(s) + m[:, 0] - log_norm
        f = np.exp(log_f)
        neg_h += float(w @ (f * log_f))
        # d f / d r_n = f_n(y) * 2 Re((y - x_n) conj(u_n)) / sigma2, f_n the n-th mixture term
        comp = kern * (f / s)[:, None]
        dfdr = comp * (2.0 / sigma2) * (d * np.conj(unit)[None, :]).real
        grad -= ((w * (log_f + 1.0)) @ dfdr) * LOG2E
    mi = -neg_h * LOG2E - noise_entropy_bits(sigma2)
    return mi, grad


def objective_gradient(radii, sigma2: float = 1.0, grid: GridSpec = GridSpec(), index_base: int = 0):
    return mi_and_gradient(radii, sigma2, grid, index_base)[1]


def grid_mi(radii, sigma2: float = 1.0, grid: GridSpec = GridSpec(), index_base: int = 0) -> float:
    return mi_and_gradient(radii, sigma2, grid, index_base)[0]


def papr_of_radii(radii) -> float:
    r = np.asarray(radii, dtype=np.float64)
    return float(r[-1] ** 2 / np.mean(r**2))


@dataclass
class G1Problem:
    n_points: int
    snr_linear: float
    sigma2: float = 1.0
    papr_cap: float | None = None
    init: object = "hr"  # "hr", "disc", or an explicit radius list
    max_iter: int = 500
    tol: float = 1e-6  # objective tolerance, bits
    grad_tol: float = 1e-9
    grid: GridSpec = field(default_factory=GridSpec)
    index_base: int = 0

    def __post_init__(self):
        if self.n_points < 1:
            raise ValueError("need at least one point")
        if not self.snr_linear > 0:
            raise ValueError("SNR must be positive")
        if not self.sigma2 > 0:
            raise ValueError("noise variance must be positive")
        if self.papr_cap is not None and not self.papr_cap > 1:
            raise ValueError(f"PAPR cap must exceed 1, got {self.papr_cap}")

    @property
    def power(self) -> float:
        return self.snr_linear * self.sigma2

    def initial_radii(self) -> np.ndarray:
        n = self.n_points
        if isinstance(self.init, str):
            if self.init == "hr":
                r = build_gb_gam_hr(n, self.power).radii if n > 1 else np.ones(1)
            elif self.init == "disc":
                r = build_disc_gam(n, self.power).radii
            else:
                raise ValueError(f"unknown init {self.init!r}")
        else:
            r = np.asarray(self.init, dtype=np.float64)
            if r.size != n:
                raise ValueError(f"init has {r.size} radii, problem has {n} points")
            to_deltas(r)
            if not np.any(r > 0):
                raise ValueError("init radii are all zero")
        return r * math.sqrt(self.power / np.mean(r**2))

    def to_dict(self) -> dict:
        d = asdict(self)
        if not isinstance(self.init, str):
            d["init"] = [float(v) for v in self.init]
        return d


@dataclass
class G1Result:
    radii: np.ndarray
    mi_bits: float
    init_mi_bits: float
    power_eq: float
    monotonic_violation: float
    papr: float
    papr_slack: float | None
    iterations: int
    converged: bool
    message: str = ""
    index_base: int = 0

    def constellation(self, p_bar: float | None = None):
        """The optimised points ``r_n exp(i 2 pi phi n)``, at mean power ``p_bar``."""
        if p_bar is None:
            p_bar = float(np.mean(self.radii**2))
        return with_radii(self.radii, p_bar, Scheme.GB_GAM_G1, self.index_base)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["radii"] = [float(v) for v in self.radii]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def _papr_and_grad(c):
    ss = c @ c
    n = c.size
    val = n * c[-1] ** 2 / ss
    g = -2.0 * val * c / ss
    g[-1] += 2.0 * n * c[-1] / ss
    return val, np.cumsum(g[::-1])[::-1]


def solve_g1(problem: G1Problem) -> G1Result:
    """Maximise MI over the radius profile; never returns worse than the start.

    Non-convergence is reported through ``converged=False`` together with the
    best feasible iterate seen.
    """
    p = problem
    n = p.n_points
    target = n * p.power
    r0 = p.initial_radii()

    def radii_of(deltas):
        c = np.cumsum(np.maximum(deltas, 0.0))
        return c * math.sqrt(target / (c @ c)), c

    def feasible(r):
        return p.papr_cap is None or papr_of_radii(r) <= p.papr_cap * (1 + 1e-6)

    best = {"mi": -math.inf, "r": None}

    def fun(deltas):
        c_norm = np.cumsum(np.maximum(deltas, 0.0))
        if not c_norm @ c_norm > 0:
            return 0.0, np.zeros_like(deltas)
        r, c = radii_of(deltas)
        mi, g = mi_and_gradient(r, p.sigma2, p.grid, p.index_base)
        if mi > best["mi"] and feasible(r):
            best.update(mi=mi, r=r.copy())
        scale = math.sqrt(target / (c @ c))
        gc = scale * (g - c * (c @ g) / (c @ c))
        return -mi, -np.cumsum(gc[::-1])[::-1]

    init_mi = mi_and_gradient(r0, p.sigma2, p.grid, p.index_base)[0]
    d0 = to_deltas(r0)
    bounds = [(0.0, None)] * n

    if n == 1:
        res_nit, success, msg = 0, True, "single point: nothing to optimise"
        best.update(mi=init_mi, r=r0)
    elif p.papr_cap is None:
        res = minimize(
            fun, d0, jac=True, method="L-BFGS-B", bounds=bounds,
            options=dict(maxiter=p.max_iter, ftol=p.tol / max(1.0, math.log2(n)),
                         gtol=p.grad_tol),
        )
        fun(res.x)
        res_nit, success, msg = res.nit, bool(res.success), str(res.message)
    else:
        cap = p.papr_cap
        cons = {
            "type": "ineq",
            "fun": lambda dl: cap - _papr_and_grad(np.cumsum(np.maximum(dl, 0.0)))[0],
            "jac": lambda dl: -_papr_and_grad(np.cumsum(np.maximum(dl, 0.0)))[1],
        }
        res = minimize(
            fun, d0, jac=True, method="SLSQP", bounds=bounds, constraints=[cons],
            options=dict(maxiter=p.max_iter, ftol=p.tol),
        )
        fun(res.x)
        res_nit, success, msg = res.nit, bool(res.success), str(res.message)

    if best["r"] is None:
        # no feasible iterate at all (cap tighter than the solver could reach)
        r_final = radii_of(res.x)[0]
        mi_final = mi_and_gradient(r_final, p.sigma2, p.grid, p.index_base)[0]
        success = False
        msg = f"no feasible iterate found; {msg}"
    else:
        r_final, mi_final = best["r"], best["mi"]
        if feasible(r0) and mi_final < init_mi:
            r_final, mi_final = r0, init_mi

    r_final = np.maximum.accumulate(np.maximum(r_final, 0.0))
    papr_val = papr_of_radii(r_final)
    return G1Result(
        radii=r_final,
        mi_bits=float(mi_final),
        init_mi_bits=float(init_mi),
        power_eq=float(np.mean(r_final**2) / p.sigma2 - p.snr_linear),
        monotonic_violation=float(max(0.0, -np.diff(r_final).min(initial=0.0), -r_final[0])),
        papr=papr_val,
        papr_slack=None if p.papr_cap is None else float(p.papr_cap - papr_val),
        iterations=int(res_nit),
        converged=success,
        message=msg,
        index_base=p.index_base,
    )
