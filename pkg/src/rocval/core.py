"""Domain types, validation, and deterministic random-number plumbing.

A :class:`ValidationSample` pairs the binary outcomes observed in an external
sample with the risks a previously developed model predicted for the same
individuals.  :class:`RngStream` is a value object naming one reproducible
random stream; all Monte Carlo machinery in this package derives per-replicate
sub-streams from it so results never depend on scheduling or replicate order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptySampleError,
    LengthMismatchError,
    NonBinaryOutcomeError,
    OutOfRangeRiskError,
)

_MASK64 = (1 << 64) - 1


def _splitmix64(z: int) -> int:
    # SplitMix64 finalizer; full-period 64-bit mix.
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass(frozen=True)
class RngStream:
    """A named, reproducible random stream.

    Identical ``(seed, stream_id)`` pairs yield bit-identical draw sequences;
    distinct pairs yield independent sequences by construction of the Philox
    counter-based generator.  Streams are values: :meth:`child` derives new
    independent streams, and a single stream is never drawn from concurrently.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "seed", int(self.seed) & _MASK64)
        object.__setattr__(self, "stream_id", int(self.stream_id) & _MASK64)

    def child(self, *path: int) -> "RngStream":
        """Derive an independent sub-stream keyed by one or more indices."""
        sid = self.stream_id
        for ix in path:
            sid = _splitmix64(sid ^ _splitmix64(int(ix) & _MASK64 ^ 0x9E3779B97F4A7C15))
        return RngStream(self.seed, sid)

    def generator(self) -> np.random.Generator:
        """A fresh numpy Generator positioned at the start of this stream."""
        return np.random.Generator(np.random.Philox(key=[self.seed, self.stream_id]))


@dataclass(frozen=True)
class ValidationSample:
    """Binary outcomes and predicted risks for n individuals, in input order."""

    outcomes: np.ndarray
    risks: np.ndarray

    @property
    def n(self) -> int:
        return self.outcomes.shape[0]

    @property
    def case_count(self) -> int:
        return int(self.outcomes.sum())

    @property
    def control_count(self) -> int:
        return self.n - self.case_count


def _as_1d(values, name: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise LengthMismatchError(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr


def make_sample(outcomes, risks) -> ValidationSample:
    """Validate and assemble a :class:`ValidationSample`.

    Vectors are stored in input order; no sorting happens at construction.

    Raises
    ------
    EmptySampleError, LengthMismatchError, NonBinaryOutcomeError,
    OutOfRangeRiskError
        When the inputs violate the sample contract.
    """
    y = _as_1d(outcomes, "outcomes")
    p = _as_1d(risks, "risks")
    if y.shape[0] == 0 or p.shape[0] == 0:
        raise EmptySampleError("sample must contain at least one individual")
    if y.shape[0] != p.shape[0]:
        raise LengthMismatchError(
            f"outcomes has length {y.shape[0]} but risks has length {p.shape[0]}"
        )
    y_num = y.astype(np.float64, copy=False)
    if not np.all((y_num == 0.0) | (y_num == 1.0)):
        bad = y[np.flatnonzero((y_num != 0.0) & (y_num != 1.0))[0]]
        raise NonBinaryOutcomeError(f"outcomes must be 0 or 1, found {bad!r}")
    p_num = p.astype(np.float64)
    if not np.all(np.isfinite(p_num)) or p_num.min(initial=0.0) < 0.0 or p_num.max(initial=0.0) > 1.0:
        bad_ix = np.flatnonzero(~(np.isfinite(p_num) & (p_num >= 0.0) & (p_num <= 1.0)))[0]
        raise OutOfRangeRiskError(f"risks must lie in [0, 1], found {p[bad_ix]!r}")
    y_int = y_num.astype(np.int64)
    y_int.setflags(write=False)
    p_num.setflags(write=False)
    return ValidationSample(outcomes=y_int, risks=p_num)


def validate_risks(risks) -> np.ndarray:
    """Check a bare risk vector (probabilities in [0, 1]) and return it as float64."""
    p = _as_1d(risks, "risks")
    if p.shape[0] == 0:
        raise EmptySampleError("risk vector must be non-empty")
    p_num = p.astype(np.float64)
    if not np.all(np.isfinite(p_num) & (p_num >= 0.0) & (p_num <= 1.0)):
        bad_ix = np.flatnonzero(~(np.isfinite(p_num) & (p_num >= 0.0) & (p_num <= 1.0)))[0]
        raise OutOfRangeRiskError(f"risks must lie in [0, 1], found {p[bad_ix]!r}")
    return p_num


def bernoulli_draw(risks, rng: RngStream) -> np.ndarray:
    """Draw one independent Bernoulli outcome per risk, deterministically.

    Element ``i`` is 1 with probability ``risks[i]``.  The draw is a pure
    function of ``(risks, rng)``: the same stream always yields the same
    vector, and risks of exactly 0 or 1 yield constant outcomes.
    """
    p = validate_risks(risks)
    u = rng.generator().random(p.shape[0])
    return (u < p).astype(np.int64)
