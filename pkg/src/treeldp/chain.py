"""Growth chains Z_n for leaf/cherry/bud counts.

The chain moves up by one with probability 1 - Z_n/s_n and stays put
otherwise, starting from Z_1 = k0.  Everything downstream (exact pmfs,
pressure estimators, tree simulators) is driven by the slope sequence
s_n, so slopes are kept exact (rational) whenever the defining
parameters are rational.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "SlopeSequence",
    "LinearSlope",
    "UniformRecursiveSlope",
    "PlaneOrientedSlope",
    "YuleSlope",
    "PrefAttachSlope",
    "RandomizedPASlope",
    "ModelSpec",
    "Trajectory",
    "model_from_name",
    "make_generator",
    "slope_value",
    "step",
    "simulate",
    "simulate_endpoints",
    "interpolate",
    "DEFAULT_SEED",
]

DEFAULT_SEED = 20260819

# distinct sub-streams of a user seed, so e.g. the quenched environment
# and the chain draws never share randomness
_STREAM_ENV = 101
_STREAM_SIM = 202


def make_generator(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based generator keyed by (seed, *stream); reproducible and
    safe to spawn per replicate."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))


def _as_number(x) -> Fraction | float:
    """Keep rationals exact; leave non-rational floats alone."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        if x == int(x):
            return Fraction(int(x))
        # floats that came from decimal literals are kept as given
        return x
    raise TypeError(f"unsupported numeric type {type(x)!r}")


class SlopeSequence:
    """Base for s_n sequences.  Subclasses implement value(n)."""

    kind: str = "abstract"

    @property
    def alpha(self) -> float:
        raise NotImplementedError

    @property
    def is_rational(self) -> bool:
        raise NotImplementedError

    def value(self, n: int) -> Fraction | float:
        raise NotImplementedError

    def values_float(self, n_max: int) -> np.ndarray:
        """s_1..s_{n_max} as floats, vectorized for simulation loops."""
        return np.array([float(self.value(n)) for n in range(1, n_max + 1)])

    def label(self) -> str:
        return self.kind


@dataclass(frozen=True)
class LinearSlope(SlopeSequence):
    """s_n = alpha * n."""

    alpha_param: Fraction | float

    kind = "linear"

    def __post_init__(self):
        object.__setattr__(self, "alpha_param", _as_number(self.alpha_param))
        if self.alpha_param <= 0:
            raise ValueError("linear slope needs alpha > 0")

    @property
    def alpha(self) -> float:
        return float(self.alpha_param)

    @property
    def is_rational(self) -> bool:
        return isinstance(self.alpha_param, Fraction)

    def value(self, n: int) -> Fraction | float:
        return self.alpha_param * n

    def values_float(self, n_max: int) -> np.ndarray:
        return float(self.alpha_param) * np.arange(1, n_max + 1, dtype=float)

    def label(self) -> str:
        return f"linear:alpha={self.alpha_param}"


@dataclass(frozen=True)
class UniformRecursiveSlope(SlopeSequence):
    """s_n = n (uniform recursive trees)."""

    kind = "uniform_recursive"

    @property
    def alpha(self) -> float:
        return 1.0

    @property
    def is_rational(self) -> bool:
        return True

    def value(self, n: int) -> Fraction:
        return Fraction(n)

    def values_float(self, n_max: int) -> np.ndarray:
        return np.arange(1, n_max + 1, dtype=float)


@dataclass(frozen=True)
class PlaneOrientedSlope(SlopeSequence):
    """s_n = 2n - 1 (plane-oriented recursive trees)."""

    kind = "plane_oriented"

    @property
    def alpha(self) -> float:
        return 2.0

    @property
    def is_rational(self) -> bool:
        return True

    def value(self, n: int) -> Fraction:
        return Fraction(2 * n - 1)

    def values_float(self, n_max: int) -> np.ndarray:
        return 2.0 * np.arange(1, n_max + 1, dtype=float) - 1.0


@dataclass(frozen=True)
class YuleSlope(SlopeSequence):
    """s_n = n/2 (Yule trees, cherry count)."""

    kind = "yule"

    @property
    def alpha(self) -> float:
        return 0.5

    @property
    def is_rational(self) -> bool:
        return True

    def value(self, n: int) -> Fraction:
        return Fraction(n, 2)

    def values_float(self, n_max: int) -> np.ndarray:
        return 0.5 * np.arange(1, n_max + 1, dtype=float)


@dataclass(frozen=True)
class PrefAttachSlope(SlopeSequence):
    """s_n = (dG1 + 2(n-1) + (n-1+vG1) beta) / (1+beta) for preferential
    attachment started from a seed graph with total degree dG1 and vG1
    vertices (single edge by default)."""

    beta: Fraction | float
    dG1: int = 2
    vG1: int = 2

    kind = "pref_attach"

    def __post_init__(self):
        object.__setattr__(self, "beta", _as_number(self.beta))
        if self.beta <= -1:
            raise ValueError("pref_attach needs beta > -1")

    @property
    def alpha(self) -> float:
        return float((2 + self.beta) / (1 + self.beta))

    @property
    def is_rational(self) -> bool:
        return isinstance(self.beta, Fraction)

    def value(self, n: int) -> Fraction | float:
        num = self.dG1 + 2 * (n - 1) + (n - 1 + self.vG1) * self.beta
        den = 1 + self.beta
        if isinstance(self.beta, Fraction):
            return Fraction(num) / Fraction(den)
        return num / den

    def values_float(self, n_max: int) -> np.ndarray:
        n = np.arange(1, n_max + 1, dtype=float)
        b = float(self.beta)
        return (self.dG1 + 2.0 * (n - 1) + (n - 1 + self.vG1) * b) / (1.0 + b)

    def label(self) -> str:
        return f"pa:beta={self.beta}"


@dataclass(frozen=True)
class RandomizedPASlope(SlopeSequence):
    """Quenched slopes for randomized preferential attachment: vertex i
    arrives with gamma_i parallel edges, gamma_i drawn once from a finite
    pmf keyed by `seed`.  s_n = [dG1 + 2 sum_{i<n} gamma_i + (n-1+vG1) beta]/(1+beta).
    """

    beta: Fraction | float
    gamma_values: tuple[int, ...]
    gamma_probs: tuple[float, ...]
    seed: int
    dG1: int = 2
    vG1: int = 2
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    kind = "randomized_pa"

    def __post_init__(self):
        object.__setattr__(self, "beta", _as_number(self.beta))
        if self.beta <= -1:
            raise ValueError("randomized_pa needs beta > -1")
        vals = tuple(int(v) for v in self.gamma_values)
        if any(v < 1 for v in vals):
            raise ValueError("gamma values must be positive integers")
        probs = np.asarray(self.gamma_probs, dtype=float)
        if len(probs) != len(vals) or np.any(probs < 0) or probs.sum() <= 0:
            raise ValueError("gamma pmf needs matching nonnegative weights")
        probs = probs / probs.sum()
        object.__setattr__(self, "gamma_values", vals)
        object.__setattr__(self, "gamma_probs", tuple(probs.tolist()))

    @property
    def gamma_mean(self) -> float:
        return float(np.dot(self.gamma_values, self.gamma_probs))

    @property
    def alpha(self) -> float:
        return float((2.0 * self.gamma_mean + float(self.beta)) / (1.0 + float(self.beta)))

    @property
    def is_rational(self) -> bool:
        # realized gammas are integers, so s_n is rational iff beta is
        return isinstance(self.beta, Fraction)

    def gammas(self, count: int) -> np.ndarray:
        """First `count` quenched gamma values; regenerating a longer
        prefix reproduces the shorter one bit for bit."""
        have = self._cache.get("gammas")
        if have is None or len(have) < count:
            rng = make_generator(self.seed, _STREAM_ENV)
            need = max(count, 64)
            draws = rng.choice(np.array(self.gamma_values), size=need, p=np.array(self.gamma_probs))
            have = draws.astype(np.int64)
            self._cache["gammas"] = have
            self._cache["cumsum"] = np.concatenate([[0], np.cumsum(have)])
        return have[:count]

    def _cum(self, count: int) -> np.ndarray:
        self.gammas(count)
        return self._cache["cumsum"]

    def value(self, n: int) -> Fraction | float:
        csum = int(self._cum(max(n - 1, 1))[n - 1])
        num = self.dG1 + 2 * csum + (n - 1 + self.vG1) * self.beta
        den = 1 + self.beta
        if isinstance(self.beta, Fraction):
            return Fraction(num) / Fraction(den)
        return num / den

    def values_float(self, n_max: int) -> np.ndarray:
        cs = self._cum(n_max)[:n_max].astype(float)
        n = np.arange(1, n_max + 1, dtype=float)
        b = float(self.beta)
        return (self.dG1 + 2.0 * cs + (n - 1 + self.vG1) * b) / (1.0 + b)

    def label(self) -> str:
        pmf = "+".join(f"{v}@{p:g}" for v, p in zip(self.gamma_values, self.gamma_probs))
        return f"rpa:beta={self.beta},gamma={pmf},seed={self.seed}"


@dataclass(frozen=True)
class ModelSpec:
    """A chain model: slope sequence plus initial count Z_1 = k0."""

    slopes: SlopeSequence
    k0: int

    def __post_init__(self):
        if self.k0 < 0:
            raise ValueError("k0 must be a nonnegative integer")
        s1 = self.slopes.value(1)
        if not (self.k0 <= s1 or (self.k0 == 0 and s1 == 0)):
            raise ValueError(f"need k0 <= s_1, got k0={self.k0}, s_1={s1}")
        if isinstance(self.slopes, LinearSlope) and self.slopes.alpha > 1:
            # s_n = alpha*n >= k0 + n - 1 for all n reduces to the n=1 case
            if self.slopes.alpha_param < self.k0:
                raise ValueError("linear slopes with alpha > 1 need alpha >= k0")

    @property
    def alpha(self) -> float:
        return self.slopes.alpha

    def label(self) -> str:
        return self.slopes.label()


@dataclass(frozen=True)
class Trajectory:
    model: ModelSpec
    values: np.ndarray
    seed: int

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.int64)
        object.__setattr__(self, "values", vals)
        if vals[0] != self.model.k0:
            raise ValueError("trajectory must start at k0")
        diffs = np.diff(vals)
        if np.any((diffs < 0) | (diffs > 1)):
            raise ValueError("trajectory increments must be 0 or 1")

    def __len__(self) -> int:
        return len(self.values)


_PRESET_PLAIN = {
    "uniform": lambda: ModelSpec(UniformRecursiveSlope(), 1),
    "uniform_recursive": lambda: ModelSpec(UniformRecursiveSlope(), 1),
    "plane_oriented": lambda: ModelSpec(PlaneOrientedSlope(), 1),
    "yule": lambda: ModelSpec(YuleSlope(), 0),
}


def _parse_kv(body: str) -> dict[str, str]:
    out = {}
    for part in body.split(","):
        if "=" not in part:
            raise ValueError(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _parse_gamma_pmf(text: str) -> tuple[tuple[int, ...], tuple[float, ...]]:
    # e.g. "1@0.5+2@0.5"; weights are normalized
    vals, probs = [], []
    for atom in text.split("+"):
        if "@" not in atom:
            raise ValueError(f"gamma atom must look like value@weight, got {atom!r}")
        v, p = atom.split("@", 1)
        vals.append(int(v))
        probs.append(float(p))
    return tuple(vals), tuple(probs)


def model_from_name(name: str) -> ModelSpec:
    """Build a ModelSpec from a preset string.

    Accepted forms: "uniform", "plane_oriented", "yule",
    "pa:beta=<r>", "linear:alpha=<r>,k0=<int>",
    "rpa:beta=<r>,gamma=<v>@<w>+<v>@<w>,seed=<u64>".
    """
    name = name.strip()
    if name in _PRESET_PLAIN:
        return _PRESET_PLAIN[name]()
    if ":" not in name:
        raise ValueError(f"unknown model preset {name!r}")
    head, body = name.split(":", 1)
    kv = _parse_kv(body)
    try:
        if head in ("pa", "pref_attach"):
            beta = Fraction(kv.pop("beta"))
            if kv:
                raise ValueError(f"unexpected keys {sorted(kv)} for pa preset")
            return ModelSpec(PrefAttachSlope(beta), 2)
        if head == "linear":
            alpha = Fraction(kv.pop("alpha"))
            k0 = int(kv.pop("k0", "1"))
            if kv:
                raise ValueError(f"unexpected keys {sorted(kv)} for linear preset")
            return ModelSpec(LinearSlope(alpha), k0)
        if head == "rpa":
            beta = Fraction(kv.pop("beta"))
            gv, gp = _parse_gamma_pmf(kv.pop("gamma"))
            seed = int(kv.pop("seed"))
            if kv:
                raise ValueError(f"unexpected keys {sorted(kv)} for rpa preset")
            return ModelSpec(RandomizedPASlope(beta, gv, gp, seed), 2)
    except KeyError as exc:
        raise ValueError(f"preset {name!r} is missing key {exc}") from exc
    raise ValueError(f"unknown model preset {name!r}")


def slope_value(s: SlopeSequence, n: int) -> Fraction | float:
    """s_n for the given slope sequence."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return s.value(n)


def _up_probability(z: int, s: Fraction | float) -> float:
    if z == 0:
        return 1.0  # 0/0 = 0 convention: an empty count always grows
    if z > s:
        raise ValueError(f"state {z} exceeds slope {s}; increment probability would be negative")
    return float(1 - Fraction(z) / s) if isinstance(s, Fraction) else 1.0 - z / s


def step(n: int, z: int, model: ModelSpec, rng: np.random.Generator) -> int:
    """One transition from Z_n = z; returns Z_{n+1}."""
    p = _up_probability(z, model.slopes.value(n))
    return z + (1 if rng.random() < p else 0)


def simulate(model: ModelSpec, n: int, seed: int = DEFAULT_SEED) -> Trajectory:
    """Full path Z_1..Z_n; deterministic given seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = make_generator(seed, _STREAM_SIM)
    svals = model.slopes.values_float(max(n - 1, 1))
    vals = np.empty(n, dtype=np.int64)
    z = model.k0
    vals[0] = z
    u = rng.random(n - 1) if n > 1 else np.empty(0)
    for j in range(1, n):
        s = svals[j - 1]
        p = 1.0 if z == 0 else 1.0 - z / s
        if p < 0:
            raise ValueError(f"state {z} exceeds slope {s} at step {j}")
        if u[j - 1] < p:
            z += 1
        vals[j] = z
    return Trajectory(model, vals, seed)


def simulate_endpoints(
    model: ModelSpec, n: int, reps: int, seed: int = DEFAULT_SEED
) -> np.ndarray:
    """Z_n over `reps` independent replicates (vectorized)."""
    if n < 1 or reps < 1:
        raise ValueError("n and reps must be >= 1")
    rng = make_generator(seed, _STREAM_SIM)
    svals = model.slopes.values_float(max(n - 1, 1))
    z = np.full(reps, model.k0, dtype=np.int64)
    for j in range(1, n):
        s = svals[j - 1]
        p = np.where(z == 0, 1.0, 1.0 - z / s)
        z += rng.random(reps) < p
    return z


def interpolate(traj: Trajectory, t: float) -> float:
    """Scaled path X_n(t): equals t up to k0/n, then linearly interpolates
    Z_{floor(nt)-k0+1}/n; Lipschitz-1 and nondecreasing."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    vals = traj.values
    k0 = traj.model.k0
    n = len(vals) + k0 - 1
    if n < 1:
        raise ValueError("interpolation needs n >= 1")
    if t <= k0 / n:
        return t
    j = int(math.floor(n * t))
    frac = n * t - j
    idx = j - k0
    if idx + 1 >= len(vals):
        return float(vals[-1]) / n
    return (vals[idx] + frac * (vals[idx + 1] - vals[idx])) / n
