"""Estimators mapping a sampled dataset to an estimate of d.

All estimators are exactly unbiased on noise-free data by construction,
with one caveat: the corrected weak-value estimator inherits an O(gamma)
approximation from its derivation unless the default unbiased base is used.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyRetainedSet, InvalidSpec, WrongDesign
from .matkernel import SymMatrix, solve_spd
from .partition import CHANNEL_RETAINED, PartitionDesign


@dataclass(frozen=True)
class Dataset:
    """Samples s_i = mu_prime[i]*d + x_i together with their design."""

    samples: np.ndarray
    design: PartitionDesign
    truth: float | None = None

    def __post_init__(self) -> None:
        s = np.array(self.samples, dtype=float)
        if s.shape != (self.design.n,):
            raise DimensionMismatch(
                f"{s.size} samples for a design with {self.design.n} slots"
            )
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)


def estimate_equal_weight(data: Dataset) -> float:
    """Arithmetic mean; requires a single-channel design with unit coefficient."""
    design = data.design
    if len(design.channels) != 1 or design.coefficients[0] != 1.0:
        raise WrongDesign(
            "equal-weight estimator needs a single channel with coefficient 1"
        )
    return float(np.mean(data.samples))


def estimate_ml(data: Dataset, matrix: SymMatrix) -> float:
    """Maximum-likelihood (minimum-variance) estimator.

    d_hat = (mu'.T @ inv(C) @ s) / (mu'.T @ inv(C) @ mu'); the denominator is
    the partitioned Fisher information of the same design.
    """
    if matrix.dim != data.design.n:
        raise DimensionMismatch(
            f"covariance dimension {matrix.dim} does not match {data.design.n} slots"
        )
    mu = data.design.mu_prime
    weights = solve_spd(matrix, mu)
    return float(weights @ data.samples) / float(weights @ mu)


def estimate_wva(data: Dataset, literal_prefactor: bool = False) -> float:
    """Weak-value estimator built from the retained channel only.

    Default normalization sum(s_retained) / (Aw * m) with m the realized
    retained count, which is exactly unbiased for every design.  With
    ``literal_prefactor`` the small-overlap form (Aw / n) * sum(s_retained)
    is used instead; the two coincide when Aw^2 * gamma = 1.
    """
    design = data.design
    if CHANNEL_RETAINED not in design.channels:
        raise WrongDesign("weak-value estimator needs a retained channel")
    retained = design.channel_slots(CHANNEL_RETAINED)
    if retained.size == 0:
        raise EmptyRetainedSet("no retained slots in this realization")
    aw = design.coefficient(CHANNEL_RETAINED)
    if aw == 0.0:
        raise WrongDesign("retained channel has zero coefficient")
    total = float(data.samples[retained].sum())
    if literal_prefactor:
        return aw * total / design.n
    return total / (aw * retained.size)


def estimate_background_subtraction(data: Dataset) -> float:
    """Channel difference (sum of +1 slots minus sum of -1 slots) over n.

    Requires a two-channel design whose coefficients are +1 and -1; common-
    mode offsets then cancel exactly.
    """
    design = data.design
    coeffs = np.sort(design.coefficients)
    if len(design.channels) != 2 or coeffs[0] != -1.0 or coeffs[1] != 1.0:
        raise WrongDesign(
            "background subtraction needs two channels with coefficients +1 and -1"
        )
    return float(design.mu_prime @ data.samples) / design.n


def estimate_wva_corrected(
    data: Dataset, a: float, c: float, literal_prefactor: bool = False
) -> float:
    """Weak-value estimate plus an all-data correction for the common offset.

    On the solvable model with parameters (a, c) the minimum-variance
    estimator in the strongly post-selected regime is the weak-value
    estimate minus (Aw * c * gamma / (a + n*c)) times the sum of all
    samples.  The correction prefactor vanishes as c -> 0.
    """
    if a <= 0.0 or a + data.design.n * c <= 0.0:
        raise InvalidSpec("correction requires solvable parameters with a + n*c > 0")
    design = data.design
    if CHANNEL_RETAINED not in design.channels or len(design.channels) != 2:
        raise WrongDesign("corrected estimator needs a retained/rejected design")
    base = estimate_wva(data, literal_prefactor=literal_prefactor)
    retained = design.channel_slots(CHANNEL_RETAINED)
    aw = design.coefficient(CHANNEL_RETAINED)
    gamma = retained.size / design.n
    prefactor = aw * c * gamma / (a + design.n * c)
    return base - prefactor * float(data.samples.sum())
