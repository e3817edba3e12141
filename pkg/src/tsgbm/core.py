"""Shared domain types and the deterministic seeding policy.

All randomness in the library flows through numpy ``Generator`` objects
backed by PCG64, each constructed from a substream seed derived with
:func:`derive_substream_seed`.  Substream derivation is a pure function of
``(master_seed, purpose, index)``, so per-sample work can be scheduled on
any number of workers without changing results.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

RNG_ALGORITHM = "PCG64"

#: Stream purposes used across the library.  Free-form labels are allowed;
#: these are the ones the pipeline itself uses.
PURPOSE_PRIOR = "prior"
PURPOSE_SIM = "sim"
PURPOSE_EVAL = "eval"
PURPOSE_BAGGING = "bagging"


class DomainError(ValueError):
    """An argument violates an operation's domain (non-positive scale, etc.)."""


class ConfigError(ValueError):
    """An experiment configuration is invalid or inconsistent."""


def derive_substream_seed(master: int, purpose: str, index: int) -> int:
    """Derive a 64-bit substream seed from (master, purpose, index).

    Pure and stable across runs, platforms and thread counts.  Distinct
    (purpose, index) pairs collide only with negligible probability
    (SHA-256 truncated to 64 bits).
    """
    if index < 0:
        raise DomainError(f"substream index must be >= 0, got {index}")
    h = hashlib.sha256()
    h.update(int(master).to_bytes(8, "little", signed=False))
    h.update(purpose.encode("utf-8"))
    h.update(b"\x00")
    h.update(int(index).to_bytes(8, "little", signed=False))
    return int.from_bytes(h.digest()[:8], "little")


def make_rng(master: int, purpose: str, index: int) -> np.random.Generator:
    """Generator for one substream; algorithm recorded in RNG_ALGORITHM."""
    return np.random.Generator(np.random.PCG64(derive_substream_seed(master, purpose, index)))


@dataclass(frozen=True)
class SeedPolicy:
    """Master seed plus the purpose tags used to derive substreams."""

    master_seed: int
    purposes: tuple[str, ...] = (PURPOSE_PRIOR, PURPOSE_SIM, PURPOSE_EVAL)

    def substream(self, purpose: str, index: int) -> int:
        return derive_substream_seed(self.master_seed, purpose, index)

    def rng(self, purpose: str, index: int) -> np.random.Generator:
        return make_rng(self.master_seed, purpose, index)


@dataclass(frozen=True)
class ParameterSpace:
    """Axis-aligned box of admissible parameter values."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo.ndim != 1 or hi.shape != lo.shape or lo.size < 1:
            raise ConfigError("parameter bounds must be equal-length 1-D arrays")
        if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
            raise ConfigError("parameter bounds must be finite")
        if not (lo < hi).all():
            raise ConfigError("each lower bound must be strictly below its upper bound")

    def __eq__(self, other):
        if not isinstance(other, ParameterSpace):
            return NotImplemented
        return np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi)

    def __hash__(self):
        return hash((self.lo.tobytes(), self.hi.tobytes()))

    @property
    def dims(self) -> int:
        return self.lo.size

    def contains(self, values: np.ndarray) -> bool:
        v = np.asarray(values, dtype=float)
        return bool((v >= self.lo).all() and (v <= self.hi).all())


@dataclass(frozen=True)
class ParameterVector:
    """A point in parameter space with per-dimension labels."""

    values: np.ndarray
    names: tuple[str, ...]

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "names", tuple(self.names))
        if v.ndim != 1 or v.size < 1:
            raise ConfigError("parameter vector must be 1-D and non-empty")
        if len(self.names) != v.size:
            raise ConfigError("parameter names must match dimension")
        if not np.isfinite(v).all():
            raise DomainError("parameter values must be finite")

    @property
    def dims(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class ObservationSequence:
    """A length-N output trajectory produced by one mechanism draw."""

    samples: np.ndarray
    mechanism_id: str = ""

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", s)
        if s.ndim != 1 or s.size < 1:
            raise DomainError("observation sequence must be 1-D and non-empty")
        if not np.isfinite(s).all():
            raise DomainError("observation sequence contains non-finite samples")

    def __len__(self) -> int:
        return self.samples.size
