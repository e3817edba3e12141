"""Data generating mechanisms and prior sampling.

Three mechanisms are provided:

* ``weibull``        — i.i.d. Weibull(scale=eta, shape=gamma) draws.
* ``state_space_1p`` — single-parameter linear state-space model with two
  hidden states and measurement noise of variance 0.01.
* ``stoch_vol``      — stochastic volatility model with multiplicative
  observation noise; optionally returns the log-square transformed output
  which has an additive-noise structure.

Every simulator is a deterministic function of (theta, N, seed).  The
dynamical simulators accept a test-only ``noise`` hook with scripted noise
arrays so exact zero-noise recursions can be checked.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .core import (
    ConfigError,
    DomainError,
    ObservationSequence,
    ParameterSpace,
    make_rng,
)

#: Transient steps discarded before recording dynamical-system outputs.
DEFAULT_BURN_IN = 200

MECHANISM_KINDS = ("weibull", "state_space_1p", "stoch_vol")

_PARAM_NAMES = {
    "weibull": ("eta", "gamma"),
    "state_space_1p": ("a",),
    "stoch_vol": ("a", "b"),
}


@dataclass(frozen=True)
class MechanismSpec:
    """Which mechanism to simulate and at what sequence length."""

    kind: str
    N: int

    def __post_init__(self):
        if self.kind not in MECHANISM_KINDS:
            raise ConfigError(f"unknown mechanism kind {self.kind!r}")
        if self.N < 1:
            raise ConfigError("sequence length N must be >= 1")

    @property
    def param_names(self) -> tuple[str, ...]:
        return _PARAM_NAMES[self.kind]

    @property
    def dims(self) -> int:
        return len(self.param_names)


@dataclass(frozen=True)
class PriorSpec:
    """Independent uniform proposal over a parameter box."""

    space: ParameterSpace


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(int(seed)))


def weibull_sample(eta: float, gamma: float, N: int, seed) -> ObservationSequence:
    """N i.i.d. Weibull draws via inverse transform y = eta*(-ln U)^(1/gamma)."""
    if eta <= 0 or gamma <= 0:
        raise DomainError(f"Weibull requires eta > 0 and gamma > 0, got ({eta}, {gamma})")
    if N < 1:
        raise DomainError("N must be >= 1")
    rng = _as_rng(seed)
    u = rng.random(N)
    # rng.random() lies in [0, 1); nudge exact zeros off the ln singularity
    np.copyto(u, np.finfo(float).tiny, where=(u == 0.0))
    y = eta * (-np.log(u)) ** (1.0 / gamma)
    return ObservationSequence(y, mechanism_id="weibull")


def _ar1_path(coeff: float, drive: np.ndarray, x0: float) -> np.ndarray:
    """x[k] = coeff*x[k-1] + drive[k-1] for k=1..T, prepended with x[0]=x0."""
    out = np.empty(drive.size + 1)
    out[0] = x0
    if drive.size:
        out[1:], _ = lfilter([1.0], [1.0, -coeff], drive, zi=np.array([coeff * x0]))
    return out


def state_space_simulate(
    a: float,
    N: int,
    seed,
    *,
    burn_in: int = DEFAULT_BURN_IN,
    init: tuple[float, float] = (0.0, 0.0),
    noise: dict[str, np.ndarray] | None = None,
) -> ObservationSequence:
    """Simulate the two-state single-parameter model.

        x1(k+1) = a*x1(k) + v11(k)
        x2(k+1) = x1(k) + a^2*x2(k) + v12(k)
        y(k)    = a*x1(k) + x2(k) + v2(k)

    v11, v12 ~ N(0,1) and v2 ~ N(0,0.01), mutually uncorrelated.  The first
    ``burn_in`` outputs are discarded.  ``noise`` may script the three
    streams ("v11", "v12", "v2"), each of length burn_in + N (test hook).
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    T = burn_in + N
    if noise is not None:
        v11 = np.asarray(noise["v11"], dtype=float)
        v12 = np.asarray(noise["v12"], dtype=float)
        v2 = np.asarray(noise["v2"], dtype=float)
        if not (v11.size == v12.size == v2.size == T):
            raise DomainError(f"scripted noise streams must have length burn_in+N = {T}")
    else:
        rng = _as_rng(seed)
        v11 = rng.standard_normal(T)
        v12 = rng.standard_normal(T)
        v2 = 0.1 * rng.standard_normal(T)

    x1 = _ar1_path(a, v11[:-1], init[0]) if T > 1 else np.array([init[0]])
    x2 = _ar1_path(a * a, x1[:-1] + v12[:-1], init[1]) if T > 1 else np.array([init[1]])
    y = a * x1 + x2 + v2
    y = y[burn_in:]
    if not np.isfinite(y).all():
        raise DomainError(f"state-space output diverged for a={a}")
    return ObservationSequence(y, mechanism_id="state_space_1p")


def stoch_vol_simulate(
    a: float,
    b: float,
    N: int,
    seed,
    *,
    transformed: bool = False,
    burn_in: int = DEFAULT_BURN_IN,
    init: float | None = None,
    noise: dict[str, np.ndarray] | None = None,
    return_state: bool = False,
):
    """Simulate the stochastic volatility model.

        x(k+1) = a + b*x(k) + v(k),   y(k) = sqrt(e^{x(k)}) * r(k)

    with v, r ~ N(0,1) mutually uncorrelated.  If ``transformed``, returns
    ybar(k) = ln(y(k)^2) = x(k) + ln(r(k)^2) instead of y.  The state starts
    at its stationary mean a/(1-b) unless ``init`` is given; the first
    ``burn_in`` outputs are discarded.  ``noise`` scripts the streams
    ("v", "r"); ``return_state`` additionally returns the recorded latent
    states (test hooks).
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    T = burn_in + N
    if init is None:
        if abs(1.0 - b) < 1e-12:
            raise DomainError("b = 1 has no stationary mean; pass init explicitly")
        init = a / (1.0 - b)
    if noise is not None:
        v = np.asarray(noise["v"], dtype=float)
        r = np.asarray(noise["r"], dtype=float)
        if not (v.size == r.size == T):
            raise DomainError(f"scripted noise streams must have length burn_in+N = {T}")
    else:
        rng = _as_rng(seed)
        v = rng.standard_normal(T)
        r = rng.standard_normal(T)

    x = _ar1_path(b, a + v[:-1], init) if T > 1 else np.array([float(init)])
    if transformed:
        if np.any(r == 0.0):
            raise DomainError("scripted r contains exact zeros; ln(y^2) undefined")
        out = x + np.log(r * r)
    else:
        # overflow produces inf and is reported as divergence below
        with np.errstate(over="ignore"):
            out = np.sqrt(np.exp(x)) * r
    out = out[burn_in:]
    if not np.isfinite(out).all():
        raise DomainError(f"stochastic-volatility output diverged for (a={a}, b={b})")
    seq = ObservationSequence(out, mechanism_id="stoch_vol")
    if return_state:
        return seq, x[burn_in:]
    return seq


def simulate(spec: MechanismSpec, theta: np.ndarray, seed) -> ObservationSequence:
    """Dispatch one mechanism draw for a parameter vector."""
    theta = np.asarray(theta, dtype=float)
    if theta.size != spec.dims:
        raise DomainError(f"{spec.kind} expects {spec.dims} parameters, got {theta.size}")
    if spec.kind == "weibull":
        return weibull_sample(theta[0], theta[1], spec.N, seed)
    if spec.kind == "state_space_1p":
        return state_space_simulate(theta[0], spec.N, seed)
    return stoch_vol_simulate(theta[0], theta[1], spec.N, seed)


def sample_prior(prior: PriorSpec, M: int, seed) -> np.ndarray:
    """M i.i.d. uniform draws over the prior box; shape (M, dims)."""
    if M < 1:
        raise ConfigError("prior sample count M must be >= 1")
    space = prior.space
    rng = _as_rng(seed)
    u = rng.random((M, space.dims))
    return space.lo + u * (space.hi - space.lo)
