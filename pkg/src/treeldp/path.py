"""Path-space rate functional and optimal large-deviation trajectories.

The rate of a path phi on [0,1] is the integral of the local cost
L(alpha t, phi, phidot); minimizers solve the Euler equation

    phidd / (phid (1 - phid)) = alpha/(alpha t - phi) - 1/phi,

integrated here as a shooting problem from a linear launch at t = eps
(every finite-cost path leaves the origin linearly).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp

__all__ = [
    "PathFunction",
    "EulerSolution",
    "local_cost",
    "path_rate",
    "euler_solve",
]

_EPS_LAUNCH = 1e-6
_SLOPE_TOL = 1e-9
_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(30)


@dataclass(frozen=True)
class PathFunction:
    """Piecewise-linear trajectory on [0,1]: phi(0) = 0, slopes in [0,1],
    nondecreasing, phi(t) <= t."""

    knots: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.knots, dtype=float)
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "knots", k)
        object.__setattr__(self, "values", v)
        if len(k) != len(v) or len(k) < 2:
            raise ValueError("need matching knots/values with at least two knots")
        if k[0] != 0.0 or k[-1] != 1.0:
            raise ValueError("knots must start at 0 and end at 1")
        if np.any(np.diff(k) <= 0):
            raise ValueError("knots must be strictly increasing")
        if abs(v[0]) > _SLOPE_TOL:
            raise ValueError("phi(0) must be 0")
        slopes = np.diff(v) / np.diff(k)
        if np.any(slopes < -_SLOPE_TOL) or np.any(slopes > 1.0 + _SLOPE_TOL):
            raise ValueError("slopes must lie in [0, 1]")
        if np.any(v - k > _SLOPE_TOL):
            raise ValueError("phi(t) must not exceed t")

    def __call__(self, t) -> np.ndarray | float:
        return np.interp(t, self.knots, self.values)

    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.knots)

    def refine(self) -> "PathFunction":
        """Insert midpoints between all knots (used by invariance tests)."""
        mids = 0.5 * (self.knots[:-1] + self.knots[1:])
        knots = np.sort(np.concatenate([self.knots, mids]))
        return PathFunction(knots, self(knots))

    @staticmethod
    def line(x_end: float, npts: int = 2) -> "PathFunction":
        t = np.linspace(0.0, 1.0, npts)
        return PathFunction(t, x_end * t)


def local_cost(t: float, x: float, y: float, alpha: float) -> float:
    """L(alpha t, x, y) = y log(alpha t y/(alpha t - x))
    + (1-y) log(alpha t (1-y)/x), with 0 log 0 = 0; +inf when
    (x = 0, y < 1) or (x = alpha t, y > 0)."""
    if not 0.0 < t <= 1.0:
        raise ValueError("t must lie in (0, 1]")
    if not 0.0 <= y <= 1.0:
        raise ValueError("y must lie in [0, 1]")
    u = alpha * t
    if x < 0.0 or x > u:
        raise ValueError(f"x must lie in [0, alpha t] = [0, {u}]")
    if x == 0.0:
        return 0.0 if y == 1.0 else math.inf
    if x == u and y > 0.0:
        return math.inf
    # ratios first: u/(u-x) and u/x never underflow, and if the product
    # with y still hits zero the whole term is below double precision
    arg_up = 0.0 if y == 0.0 else u / (u - x) * y
    term_up = 0.0 if arg_up == 0.0 else y * math.log(arg_up)
    term_stay = 0.0 if y == 1.0 else (1.0 - y) * math.log(u / x * (1.0 - y))
    return term_up + term_stay


def _constant_slope_cost(y: float, alpha: float) -> float:
    """Cost density along phi = y t (t-independent by scaling)."""
    if y == 0.0:
        return math.inf
    if y > alpha or y == alpha:
        # phi = alpha t rides the upper boundary (alpha <= 1 only)
        return math.inf
    return local_cost(1.0, y, y, alpha)


def _piece_cost(ta: float, tb: float, xa: float, y: float, alpha: float) -> float:
    """Integral of L along one linear piece with ta > 0."""
    xb = xa + y * (tb - ta)
    ua, ub = alpha * ta, alpha * tb
    if xa > ua + 1e-13 or xb > ub + 1e-13:
        return math.inf  # leaves the admissible cone
    if xa <= _SLOPE_TOL and y <= 0.0:
        return math.inf  # lingers on the zero line
    if abs(xa - ua) <= 1e-14 and abs(y - alpha) <= 1e-14 and y > 0.0:
        return math.inf  # rides the upper boundary
    singular_left = xa <= _SLOPE_TOL and y < 1.0
    singular_upper = (ua - xa) <= 1e-12 or (ub - xb) <= 1e-12

    def f(t: float) -> float:
        x = min(max(xa + y * (t - ta), 0.0), alpha * t)
        return local_cost(t, x, y, alpha)

    if singular_left or singular_upper:
        # integrable log singularity at an endpoint: adaptive rule
        val, _ = quad(f, ta, tb, epsabs=1e-13, epsrel=1e-13, limit=200)
        return val
    mid = 0.5 * (ta + tb)
    half = 0.5 * (tb - ta)
    vals = np.array([f(t) for t in mid + half * _GAUSS_NODES])
    if not np.all(np.isfinite(vals)):
        return math.inf
    return half * float(np.dot(_GAUSS_WEIGHTS, vals))


def path_rate(phi: PathFunction, alpha: float) -> float:
    """I(phi) = int_0^1 L(alpha t, phi, phidot) dt for a piecewise-linear
    path; +inf as soon as a divergence holds on positive measure."""
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    knots = phi.knots
    values = phi.values
    slopes = np.clip(phi.slopes(), 0.0, 1.0)
    total = 0.0
    for i, y in enumerate(slopes):
        ta, tb = knots[i], knots[i + 1]
        if i == 0:
            # the first piece leaves 0 linearly: the integrand is constant
            c = _constant_slope_cost(float(y), alpha)
            if math.isinf(c):
                return math.inf
            total += (tb - ta) * c
            continue
        c = _piece_cost(float(ta), float(tb), float(values[i]), float(y), alpha)
        if math.isinf(c):
            return math.inf
        total += c
    return total


@dataclass(frozen=True)
class EulerSolution:
    alpha: float
    x_target: float
    path: PathFunction
    cost: float
    shoot_param: float
    endpoint: float
    bisection_roots: tuple[float, ...]

    @property
    def terminal_gap(self) -> float:
        return abs(self.endpoint - self.x_target)


def _clamped_cost(t: float, x: float, y: float, alpha: float) -> float:
    u = alpha * t
    up = 0.0 if y <= 0.0 else y * math.log(u * y / (u - x))
    stay = 0.0 if y >= 1.0 else (1.0 - y) * math.log(u * (1.0 - y) / x)
    return up + stay


def _euler_rhs(alpha: float):
    def rhs(t, state):
        phi, v, _cost = state
        ub = alpha * t
        # keep trial stages inside the admissible cone; the clamps are
        # inactive at the converged root, and saturating v at {0,1}
        # continues the path as a flat/straight line, the correct limit
        p = min(max(phi, 1e-300), ub * (1.0 - 1e-15))
        w = min(max(v, 0.0), 1.0)
        g = alpha / (ub - p) - 1.0 / p
        return (w, w * (1.0 - w) * g, _clamped_cost(t, p, w, alpha))

    return rhs


def _shoot(alpha: float, c: float, dense: bool = False):
    sol = solve_ivp(
        _euler_rhs(alpha),
        (_EPS_LAUNCH, 1.0),
        (c * _EPS_LAUNCH, c, 0.0),
        method="DOP853",
        rtol=1e-11,
        atol=1e-13,
        dense_output=dense,
    )
    if not sol.success:
        raise RuntimeError(f"integration failed at c={c}: {sol.message}")
    return sol


def _project_admissible(knots: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Snap integrator dust onto the admissible set (monotone, 1-Lipschitz,
    phi <= t)."""
    out = values.copy()
    for i in range(1, len(out)):
        dt = knots[i] - knots[i - 1]
        out[i] = min(max(out[i], out[i - 1]), out[i - 1] + dt, knots[i])
    return out


def euler_solve(alpha: float, x_target: float, tol: float = 1e-9) -> EulerSolution:
    """Optimal trajectory hitting phi(1) = x_target by bisection over the
    launch slope c (phi(eps) = c eps).  The terminal map c -> phi(1) is
    monotone; that is probed at runtime, and on a violation the solver
    falls back to a grid scan, solving every bracket and keeping the
    cheapest.  All roots found are reported."""
    if not alpha > 1.0:
        raise ValueError("euler_solve requires alpha > 1")
    if not 0.0 < x_target < 1.0:
        raise ValueError("x_target must lie in (0, 1)")

    def terminal(c: float) -> float:
        return float(_shoot(alpha, c).y[0, -1])

    probe_c = np.linspace(0.02, 0.98, 9)
    probe_end = np.array([terminal(c) for c in probe_c])
    monotone = bool(np.all(np.diff(probe_end) >= -1e-9))
    brackets: list[tuple[float, float]] = []
    if monotone:
        grid_c = np.concatenate([[1e-9], probe_c, [1.0 - 1e-9]])
        grid_end = np.concatenate([[0.0], probe_end, [1.0]])
        idx = int(np.searchsorted(grid_end, x_target))
        idx = min(max(idx, 1), len(grid_c) - 1)
        brackets.append((grid_c[idx - 1], grid_c[idx]))
    else:
        grid_c = np.linspace(1e-9, 1.0 - 1e-9, 101)
        grid_end = np.array([terminal(c) for c in grid_c])
        for i in range(len(grid_c) - 1):
            if (grid_end[i] - x_target) * (grid_end[i + 1] - x_target) <= 0.0:
                brackets.append((grid_c[i], grid_c[i + 1]))
        if not brackets:
            raise RuntimeError(f"no launch slope reaches phi(1) = {x_target}")

    roots: list[float] = []
    best = None  # (cost, c_star, endpoint, dense solution)
    for lo, hi in brackets:
        end_lo = terminal(lo)
        for _ in range(80):
            midc = 0.5 * (lo + hi)
            end_mid = terminal(midc)
            if abs(end_mid - x_target) <= min(tol, 1e-12) or hi - lo < 5e-17:
                break
            if (end_lo - x_target) * (end_mid - x_target) <= 0.0:
                hi = midc
            else:
                lo, end_lo = midc, end_mid
        c_star = 0.5 * (lo + hi)
        sol = _shoot(alpha, c_star, dense=True)
        endpoint = float(sol.y[0, -1])
        cost = float(sol.y[2, -1]) + _EPS_LAUNCH * _constant_slope_cost(c_star, alpha)
        roots.append(c_star)
        if best is None or cost < best[0]:
            best = (cost, c_star, endpoint, sol)
    cost, c_star, endpoint, sol = best
    cost = max(cost, 0.0)  # the functional is nonnegative; rounding at the
    # LLN target can leave a -1e-16 residue

    tgrid = np.linspace(_EPS_LAUNCH, 1.0, 1001)
    knots = np.concatenate([[0.0], tgrid])
    values = np.concatenate([[0.0], sol.sol(tgrid)[0]])
    path = PathFunction(knots, _project_admissible(knots, values))
    if abs(endpoint - x_target) > max(tol, 1e-7):
        raise RuntimeError(
            f"shooting stalled: endpoint {endpoint} vs target {x_target} "
            f"(gap {abs(endpoint - x_target):.2e})"
        )
    return EulerSolution(
        alpha=alpha,
        x_target=x_target,
        path=path,
        cost=cost,
        shoot_param=c_star,
        endpoint=endpoint,
        bisection_roots=tuple(roots),
    )
