"""Seeded generation of correlated Gaussian data and trial ensembles.

Reproducibility contract: the generator is PCG64 and normal variates come
from the inverse CDF applied to a 53-bit uniform lattice, so every draw is
a pure function of the seed within one build.  Trial t of a run uses the
substream SeedSequence(seed, spawn_key=(t,)), which makes trials
independent and the ensemble insensitive to execution order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .covmodel import KIND_SOLVABLE, CovSpec, build
from .errors import InvalidSpec, WrongDesign
from .estimators import (
    Dataset,
    estimate_background_subtraction,
    estimate_equal_weight,
    estimate_wva,
    estimate_wva_corrected,
)
from .matkernel import SymMatrix, factor_spd, solve_spd
from .partition import PartitionDesign, mean_vector

GENERATOR_NAME = "pcg64"
NORMAL_METHOD = "inverse-cdf"

ESTIMATOR_NAMES = ("equal", "ml", "wva", "bgsub", "wva-corrected")


def standard_normal(rng: np.random.Generator, size: int) -> np.ndarray:
    """Standard normals via the inverse CDF on a centered 53-bit lattice.

    u = (k + 0.5) / 2^53 with k uniform on [0, 2^53) keeps u strictly inside
    (0, 1), so ndtri never sees 0 or 1.
    """
    lattice = rng.integers(0, 1 << 53, size=size, dtype=np.uint64)
    return ndtri((lattice + 0.5) * (2.0 ** -53))


def _rng_for(seed, trial: int | None = None) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        sequence = seed
    else:
        key = () if trial is None else (trial,)
        sequence = np.random.SeedSequence(int(seed), spawn_key=key)
    return np.random.default_rng(sequence)


def sample_noise(matrix: SymMatrix, seed) -> np.ndarray:
    """One zero-mean Gaussian vector with covariance ``matrix``.

    x = L @ z with L the Cholesky factor; identical seeds give bit-identical
    vectors within a build.
    """
    lower = factor_spd(matrix)
    z = standard_normal(_rng_for(seed), matrix.dim)
    return lower @ z


@dataclass(frozen=True)
class TrialEnsemble:
    """Record of a seeded estimator run: estimates plus summary moments."""

    seed: int
    trials: int
    estimates: np.ndarray
    empirical_mean: float
    empirical_variance: float
    config_digest: str

    def __post_init__(self) -> None:
        est = np.asarray(self.estimates, dtype=float)
        est.setflags(write=False)
        object.__setattr__(self, "estimates", est)


def _resolve_estimator(
    name: str, spec: CovSpec, matrix: SymMatrix, design: PartitionDesign
):
    """Map a CLI estimator name to a per-dataset callable."""
    if name == "equal":
        return estimate_equal_weight
    if name == "wva":
        return estimate_wva
    if name == "bgsub":
        return estimate_background_subtraction
    if name == "wva-corrected":
        if spec.kind != KIND_SOLVABLE:
            raise InvalidSpec(
                "the corrected weak-value estimator applies to the solvable model only"
            )
        return lambda data: estimate_wva_corrected(data, spec.a, spec.c)
    if name == "ml":
        # The ML weight vector depends only on (C, design); precompute it so a
        # run costs one solve instead of one per trial.  Matches estimate_ml
        # sample for sample.
        mu = design.mu_prime
        y = solve_spd(matrix, mu)
        w = y / float(y @ mu)
        return lambda data: float(w @ data.samples)
    raise WrongDesign(f"unknown estimator {name!r}; expected one of {ESTIMATOR_NAMES}")


def run_trials(
    spec: CovSpec,
    design: PartitionDesign,
    estimator: str,
    d_true: float = 1.0,
    trials: int = 1000,
    seed: int = 0,
) -> TrialEnsemble:
    """Run ``trials`` independent seeded datasets through one estimator.

    Each trial draws samples = mean_vector(design, d_true) + L @ z from its
    own substream; the empirical variance uses the unbiased (T - 1)
    normalization.
    """
    if trials < 2:
        raise InvalidSpec("at least 2 trials are required for a variance")
    if design.n != spec.n:
        raise InvalidSpec(f"design covers {design.n} slots but spec has n={spec.n}")
    matrix = build(spec)
    lower = factor_spd(matrix)
    mean = mean_vector(design, d_true)
    fn = _resolve_estimator(estimator, spec, matrix, design)

    estimates = np.empty(trials)
    for t in range(trials):
        z = standard_normal(_rng_for(seed, t), spec.n)
        data = Dataset(samples=mean + lower @ z, design=design, truth=d_true)
        estimates[t] = fn(data)

    digest = " | ".join(
        [
            spec.digest(),
            design.digest(),
            f"estimator={estimator}",
            f"d_true={d_true!r}",
            f"trials={trials}",
            f"seed={seed}",
            f"rng={GENERATOR_NAME} normal={NORMAL_METHOD}",
        ]
    )
    return TrialEnsemble(
        seed=seed,
        trials=trials,
        estimates=estimates,
        empirical_mean=float(np.mean(estimates)),
        empirical_variance=float(np.var(estimates, ddof=1)),
        config_digest=digest,
    )
