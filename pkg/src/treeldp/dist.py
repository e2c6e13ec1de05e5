"""Exact distribution of Z_n: log-space pmf recursion, the rational
polynomial p_n(u) whose coefficients are the pmf, MGF-based pressure
estimators, tail probabilities, and real-rootedness certification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import logsumexp

from . import _sturm
from .chain import ModelSpec

__all__ = [
    "Pmf",
    "ExactPoly",
    "RootReport",
    "pmf_start",
    "pmf_advance",
    "pmf",
    "log_mgf",
    "pmf_mean",
    "pressure_estimators",
    "EstimatorTriple",
    "exact_poly",
    "certify_real_rooted",
    "tail_log_prob",
    "N_EXACT_DEFAULT",
]

N_EXACT_DEFAULT = 40


@dataclass(frozen=True)
class Pmf:
    """log P(Z_n = k) for k = k0..k0+n-1; -inf marks unreachable states."""

    n: int
    k0: int
    logp: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.logp, dtype=float)
        object.__setattr__(self, "logp", arr)
        if len(arr) != self.n:
            raise ValueError("logp must have length n")

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.k0, self.k0 + self.n)

    def probs(self) -> np.ndarray:
        return np.exp(self.logp)


@dataclass(frozen=True)
class ExactPoly:
    """p_n(u) = sum_k P(Z_n = k) u^k with exact rational coefficients."""

    n: int
    k0: int
    coeffs: tuple[Fraction, ...]  # ascending, coefficient of u^k at index k

    def degree(self) -> int:
        d = len(self.coeffs) - 1
        while d > 0 and self.coeffs[d] == 0:
            d -= 1
        return d


def pmf_start(model: ModelSpec) -> Pmf:
    """Point mass at k0 (n = 1)."""
    return Pmf(1, model.k0, np.zeros(1))


def pmf_advance(p: Pmf, model: ModelSpec) -> Pmf:
    """One step of P_{n+1}(k) = P_n(k) k/s_n + P_n(k-1) (1-(k-1)/s_n),
    carried out in log space."""
    n = p.n
    s = float(model.slopes.value(n))
    ka = np.arange(p.k0, p.k0 + n, dtype=float)
    with np.errstate(divide="ignore"):
        log_stay = np.where(ka > 0, np.log(np.maximum(ka, 1e-300)) - math.log(s), -np.inf)
        ratio = np.clip(ka / s, 0.0, 1.0)
        log_up = np.log1p(-ratio)
        log_up[ratio >= 1.0] = -np.inf
        if ka[0] == 0:
            log_up[0] = 0.0  # 0/0 = 0 convention: growth is certain from zero
    new = np.full(n + 1, -np.inf)
    new[:n] = p.logp + log_stay
    new[1:] = np.logaddexp(new[1:], p.logp + log_up)
    return Pmf(n + 1, p.k0, new)


def pmf(model: ModelSpec, n: int) -> Pmf:
    """Exact pmf of Z_n by iterating the one-step recursion."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = pmf_start(model)
    svals = model.slopes.values_float(max(n - 1, 1))
    # inline the advance to reuse the precomputed slope array
    logp = p.logp
    k0 = model.k0
    for m in range(1, n):
        s = svals[m - 1]
        ka = np.arange(k0, k0 + m, dtype=float)
        with np.errstate(divide="ignore"):
            log_stay = np.where(ka > 0, np.log(np.maximum(ka, 1e-300)) - math.log(s), -np.inf)
            ratio = np.clip(ka / s, 0.0, 1.0)
            log_up = np.log1p(-ratio)
            log_up[ratio >= 1.0] = -np.inf
            if k0 == 0:
                log_up[0] = 0.0
        new = np.full(m + 1, -np.inf)
        new[:m] = logp + log_stay
        new[1:] = np.logaddexp(new[1:], logp + log_up)
        logp = new
    return Pmf(n, k0, logp)


def log_mgf(p: Pmf, lam: float) -> float:
    """log m_n(lambda) = log E[exp(lambda Z_n)]."""
    return float(logsumexp(p.logp + p.support * lam))


def pmf_mean(p: Pmf) -> float:
    w = p.probs()
    return float(np.dot(w, p.support))


@dataclass(frozen=True)
class EstimatorTriple:
    per_n: float
    ratio: float
    logderiv: float


def pressure_estimators(model: ModelSpec, n: int, lam: float) -> EstimatorTriple:
    """Three finite-n estimators of the pressure and its derivative:
    per_n = (1/n) log m_n, ratio = log m_{n+1} - log m_n, and
    logderiv = m_n'/(n m_n) as a Boltzmann-weighted mean of Z_n."""
    if n < 2:
        raise ValueError("estimators need n >= 2")
    p_n = pmf(model, n)
    p_next = pmf_advance(p_n, model)
    lm_n = log_mgf(p_n, lam)
    lm_next = log_mgf(p_next, lam)
    shifted = p_n.logp + p_n.support * lam
    shifted -= logsumexp(shifted)
    weights = np.exp(shifted)
    logderiv = float(np.dot(weights, p_n.support)) / n
    return EstimatorTriple(per_n=lm_n / n, ratio=lm_next - lm_n, logderiv=logderiv)


def tail_log_prob(p: Pmf, x: float) -> float:
    """(-1/n) log of the tail away from the mean: P(Z_n >= ceil(xn)) when
    x exceeds the mean of Z_n/n, else P(Z_n <= floor(xn)).  Returns +inf
    for empty or zero-probability events."""
    if not 0.0 < x <= 1.0:
        raise ValueError("x must lie in (0, 1]")
    n = p.n
    mean = pmf_mean(p) / n
    # snap float noise: 0.85*500 is 425.00000000000006 in doubles, and a
    # bare ceil would silently shift the cutoff to 426
    if x > mean:
        k = math.ceil(x * n - 1e-9)
        sel = p.support >= k
    else:
        k = math.floor(x * n + 1e-9)
        sel = p.support <= k
    if not np.any(sel):
        return math.inf
    val = logsumexp(p.logp[sel])
    if val == -np.inf:
        return math.inf
    return -float(val) / n


def exact_poly(model: ModelSpec, n: int, n_exact: int = N_EXACT_DEFAULT) -> ExactPoly:
    """Exact rational coefficients of p_n(u) via
    p_{n+1} = u(1-u) p_n'/s_n + u p_n; requires rational slopes."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > n_exact:
        raise ValueError(f"n={n} exceeds the exact-arithmetic cap {n_exact}")
    if not model.slopes.is_rational:
        raise ValueError("exact_poly needs rational slope values")
    k0 = model.k0
    coeffs = [Fraction(0)] * k0 + [Fraction(1)]
    for m in range(1, n):
        s = model.slopes.value(m)
        if not isinstance(s, Fraction):
            raise ValueError("exact_poly needs rational slope values")
        cur = coeffs + [Fraction(0)]
        new = [Fraction(0)] * len(cur)
        for k in range(1, len(cur)):
            # the k=1 up-term covers the zero state: 1 - 0/s = 1 realizes
            # the 0/0 = 0 convention for every positive slope
            stay = cur[k] * Fraction(k) / s
            up = cur[k - 1] * (1 - Fraction(k - 1) / s)
            new[k] = stay + up
        coeffs = new
    return ExactPoly(n, k0, tuple(coeffs))


@dataclass(frozen=True)
class RootReport:
    certified: bool
    zero_root_multiplicity: int
    cofactor_degree: int
    distinct_negative_roots: int
    all_negative_simple: bool
    monomial: bool
    note: str = ""


def certify_real_rooted(poly: ExactPoly) -> RootReport:
    """True iff every root of p_n is real and <= 0, proven by exact Sturm
    counting: after stripping the u^m factor, the cofactor must have as
    many distinct negative roots as its degree (hence all real, simple,
    negative).  Monomial p_n (stationary prefixes, k0 = 0 starts) are
    reported as their own case."""
    coeffs = list(poly.coeffs)
    coeffs = _sturm.trim([Fraction(c) for c in coeffs])
    if not coeffs:
        raise ValueError("zero polynomial")
    mult = 0
    while coeffs[0] == 0:
        coeffs = coeffs[1:]
        mult += 1
    cof_deg = _sturm.degree(coeffs)
    if cof_deg == 0:
        return RootReport(
            certified=True,
            zero_root_multiplicity=mult,
            cofactor_degree=0,
            distinct_negative_roots=0,
            all_negative_simple=True,
            monomial=True,
            note="monomial: all mass at one state (stationary prefix)",
        )
    neg, squarefree = _sturm.count_distinct_negative_roots(coeffs)
    ok = squarefree and neg == cof_deg
    return RootReport(
        certified=ok,
        zero_root_multiplicity=mult,
        cofactor_degree=cof_deg,
        distinct_negative_roots=neg,
        all_negative_simple=ok,
        monomial=False,
        note="" if ok else "cofactor has complex, positive, or repeated roots",
    )
