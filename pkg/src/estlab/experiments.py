"""Named parameter sweeps comparing the three estimation strategies.

Each function returns a SweepResult (headers, rows, metadata) that
write_csv serializes with a single metadata comment line, 17-significant-
digit floats and LF line endings, so repeated runs are byte identical.

Built-in studies:

* ``table1``  six Fisher-information cells: {direct, wva, opm} x
  {uncorrelated, correlated} on the solvable model, each computed in closed
  form and by numeric inversion with an agreement flag.
* ``fig2``    scaled inverse information of a two-sample set over (x, r).
* ``fig345``  estimator variance versus weighting alpha for families of
  (x, r), with the optimal weight and minimum marked per curve.
* ``fig6``    block decomposition (I1, I2, I3) of the two-channel
  information versus overlap angle phi, in units of N/a.
* ``fig7``    information of all three strategies versus the dimensionless
  correlation time eta of the exponential model, plus the inverse variance
  of the matched plain-average estimator for each.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve

from . import __version__
from .covmodel import (
    KIND_EXPONENTIAL,
    KIND_SOLVABLE,
    KIND_WHITE,
    CovSpec,
    build,
)
from .errors import DegenerateDenominator, EmptyRetainedSet, InvalidSpec
from .fisher import (
    TwoOutcomeSpec,
    fi_direct_numeric,
    fi_opm_solvable,
    fi_partitioned,
    fi_two_outcome,
    fi_wva_solvable,
    optimal_alpha,
    two_outcome_variance,
)
from .matkernel import factor_spd
from .partition import (
    SCHEME_BERNOULLI,
    SCHEME_PERIODIC,
    make_design,
    spin_coefficients,
    spin_model,
    submatrix,
)

BERNOULLI_DEFAULT_REPS = 32


@dataclass(frozen=True)
class SweepResult:
    """One row per grid point; metadata records parameters, seed and build."""

    name: str
    headers: tuple[str, ...]
    rows: list[tuple]
    metadata: dict[str, str] = field(default_factory=dict)

    def column(self, header: str) -> np.ndarray:
        """Values of one column as a float array (convenience for checks)."""
        k = self.headers.index(header)
        return np.array([row[k] for row in self.rows], dtype=float)


def _metadata(name: str, seed: int | None = None, **params) -> dict[str, str]:
    md = {"name": name, "build": __version__}
    for key in sorted(params):
        md[key] = repr(params[key])
    md["seed"] = "none" if seed is None else str(seed)
    return md


def config_digest(metadata: dict[str, str]) -> str:
    text = ";".join(f"{k}={v}" for k, v in sorted(metadata.items()) if k != "build")
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def _format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(result: SweepResult, fh) -> None:
    """Serialize: `# estlab-version=... config=... seed=...`, headers, rows."""
    seed = result.metadata.get("seed", "none")
    fh.write(
        f"# estlab-version={__version__} "
        f"config={config_digest(result.metadata)} seed={seed}\n"
    )
    fh.write(",".join(result.headers) + "\n")
    for row in result.rows:
        fh.write(",".join(_format_cell(v) for v in row) + "\n")


# ---------------------------------------------------------------------------
# table1
# ---------------------------------------------------------------------------

def table1(
    a: float = 1.0, c: float = 0.05, n: int = 1000, gamma: float = 0.005
) -> SweepResult:
    """Fisher information of the three strategies in both noise limits.

    The numeric twin of each closed-form cell inverts the actual matrix and
    contracts it with the strategy's mean-coefficient vector; the WVA cells
    use the idealized amplification Aw^2 = 1/gamma.  Closed and numeric
    agree to 1e-8 whenever gamma*n is an integer (the retained block is then
    realizable slot for slot).
    """
    if not 0.0 < gamma < 1.0:
        raise InvalidSpec(f"gamma must lie strictly inside (0, 1), got {gamma}")
    white = build(CovSpec(KIND_WHITE, a, c, n))
    solvable = build(CovSpec(KIND_SOLVABLE, a, c, n))

    m = int(round(gamma * n))
    if not 1 <= m <= n - 1:
        raise InvalidSpec(f"gamma={gamma} retains no usable block for n={n}")
    retained = np.arange(m)
    aw2 = 1.0 / gamma

    blocks = make_design(n, "blocks", gamma=gamma)
    mu_blocks = blocks.mu_prime

    closed = {
        ("direct", "uncorrelated"): n / (a + c),
        ("wva", "uncorrelated"): aw2 * gamma * n / (a + c),
        ("opm", "uncorrelated"): n / (a + c),
        ("direct", "correlated"): n / (a + n * c),
        ("wva", "correlated"): fi_wva_solvable(a, c, n, gamma, math.sqrt(aw2)),
        ("opm", "correlated"): fi_opm_solvable(a, c, n, gamma, *spin_coefficients(gamma)).value,
    }
    numeric = {
        ("direct", "uncorrelated"): fi_direct_numeric(white).value,
        ("wva", "uncorrelated"): aw2
        * fi_direct_numeric(submatrix(white, retained)).value,
        ("opm", "uncorrelated"): fi_partitioned(white, mu_blocks, blocks).value,
        ("direct", "correlated"): fi_direct_numeric(solvable).value,
        ("wva", "correlated"): aw2
        * fi_direct_numeric(submatrix(solvable, retained)).value,
        ("opm", "correlated"): fi_partitioned(solvable, mu_blocks, blocks).value,
    }

    rows = []
    for strategy in ("direct", "wva", "opm"):
        for regime in ("uncorrelated", "correlated"):
            cf = closed[(strategy, regime)]
            num = numeric[(strategy, regime)]
            rel = abs(cf - num) / abs(cf)
            rows.append((strategy, regime, cf, num, rel, rel < 1e-8))
    return SweepResult(
        name="table1",
        headers=("strategy", "regime", "closed_form", "numeric", "rel_err", "agree"),
        rows=rows,
        metadata=_metadata("table1", a=a, c=c, n=n, gamma=gamma),
    )


# ---------------------------------------------------------------------------
# fig2 / fig345: two-outcome studies
# ---------------------------------------------------------------------------

def fig2_surface(x_grid=None, r_grid=None) -> SweepResult:
    """Scaled inverse information over asymmetry x and correlation r.

    Values are 1/I in units of sqrt(var1*var2), i.e. with var2 = 1 and
    var1 = x the cell holds 1/(I*sqrt(x)).  The |r| = 1 boundary is excluded
    (information diverges there).
    """
    if x_grid is None:
        x_grid = np.logspace(-1.0, 1.0, 41)
    if r_grid is None:
        r_grid = np.linspace(-0.99, 0.99, 45)
    x_grid = np.asarray(x_grid, dtype=float)
    r_grid = np.asarray(r_grid, dtype=float)
    if (np.abs(r_grid) > 0.999).any():
        raise InvalidSpec("fig2 grid must keep |r| <= 0.999")
    if (x_grid <= 0.0).any():
        raise InvalidSpec("fig2 grid requires x > 0")
    rows = []
    for x in x_grid:
        for r in r_grid:
            info = fi_two_outcome(TwoOutcomeSpec.from_xr(x, r))
            rows.append((x, r, 1.0 / (info * math.sqrt(x))))
    return SweepResult(
        name="fig2",
        headers=("x", "r", "inverse_fi_scaled"),
        rows=rows,
        metadata=_metadata(
            "fig2",
            x_min=float(x_grid.min()),
            x_max=float(x_grid.max()),
            x_points=x_grid.size,
            r_min=float(r_grid.min()),
            r_max=float(r_grid.max()),
            r_points=r_grid.size,
        ),
    )


DEFAULT_CURVE_SPECS = (
    (0.25, 0.5), (0.5, 0.5), (1.0, 0.5), (2.0, 0.5), (4.0, 0.5),
    (0.25, 1.0), (0.5, 1.0), (2.0, 1.0), (4.0, 1.0),
    (1.0, -1.0), (1.0, -0.5), (1.0, 0.0), (1.0, 0.5), (1.0, 1.0),
)


def fig345_curves(var_specs=None, alpha_grid=None) -> SweepResult:
    """Estimator variance versus weighting alpha for (x, r) families.

    Each row carries the curve's optimal weight alpha_star and its minimum
    variance.  The fully degenerate curve (r = 1, x = 1) is flat; its
    alpha_star is reported as 0.5 by symmetry.
    """
    if var_specs is None:
        var_specs = DEFAULT_CURVE_SPECS
    if alpha_grid is None:
        alpha_grid = np.linspace(-1.5, 2.5, 201)
    alpha_grid = np.asarray(alpha_grid, dtype=float)
    rows = []
    for x, r in var_specs:
        spec = TwoOutcomeSpec.from_xr(x, r)
        try:
            alpha_star = optimal_alpha(spec)
        except DegenerateDenominator:
            # r = 1, x = 1: the curve is flat, every weighting is optimal.
            alpha_star = 0.5
        minimum = two_outcome_variance(spec, alpha_star)
        for alpha in alpha_grid:
            rows.append(
                (x, r, alpha, two_outcome_variance(spec, alpha), alpha_star, minimum)
            )
    return SweepResult(
        name="fig345",
        headers=("x", "r", "alpha", "variance", "alpha_star", "min_variance"),
        rows=rows,
        metadata=_metadata(
            "fig345",
            curves=len(tuple(var_specs)),
            alpha_min=float(alpha_grid.min()),
            alpha_max=float(alpha_grid.max()),
            alpha_points=alpha_grid.size,
        ),
    )


# ---------------------------------------------------------------------------
# fig6: block decomposition versus overlap angle
# ---------------------------------------------------------------------------

def fig6_decomposition(
    n: int = 100, c_over_a: float = 0.5, phi_grid=None
) -> SweepResult:
    """Two-channel information terms versus phi on the solvable model.

    Columns I1, I2, I3 and their sum are in units of N/a (the uncorrelated
    information); the sum is 1.0 at every phi.  ``total_numeric`` contracts
    the inverse of the actual matrix against the contiguous-blocks design at
    the realized retained fraction round(gamma*n)/n, whose own closed form
    is also N/a.
    """
    if phi_grid is None:
        phi_grid = np.linspace(0.01, math.pi - 0.01, 100)
    phi_grid = np.asarray(phi_grid, dtype=float)
    a = 1.0
    c = c_over_a * a
    unit = n / a
    matrix = build(CovSpec(KIND_SOLVABLE, a, c, n))
    lower = factor_spd(matrix)
    rows = []
    for phi in phi_grid:
        model = spin_model(phi)
        report = fi_opm_solvable(a, c, n, model.gamma, model.aw, model.awp)
        n1 = min(max(int(round(model.gamma * n)), 1), n - 1)
        design = make_design(n, "blocks", gamma=n1 / n)
        numeric = fi_partitioned(matrix, design.mu_prime, design)
        rows.append(
            (
                phi,
                model.gamma,
                n1,
                report.terms[0] / unit,
                report.terms[1] / unit,
                report.terms[2] / unit,
                report.value / unit,
                numeric.value / unit,
            )
        )
    return SweepResult(
        name="fig6",
        headers=(
            "phi", "gamma", "n_retained", "i1", "i2", "i3", "total", "total_numeric",
        ),
        rows=rows,
        metadata=_metadata(
            "fig6", n=n, c_over_a=c_over_a, phi_points=phi_grid.size
        ),
    )


# ---------------------------------------------------------------------------
# fig7: exponential-correlation sweep
# ---------------------------------------------------------------------------

def _bernoulli_designs(n, gamma, seed, reps):
    """Seeded retention patterns, redrawing any that retain no slots."""
    designs = []
    draw = 0
    while len(designs) < reps:
        design = make_design(n, SCHEME_BERNOULLI, gamma=gamma, seed=seed + draw)
        draw += 1
        if design.channel_slots("retained").size > 0:
            designs.append(design)
        if draw > 100 * reps:
            raise EmptyRetainedSet("could not draw non-empty retention patterns")
    return designs


def fig7_sweep(
    n: int = 1000,
    a: float = 1.0,
    c: float = 0.05,
    gamma: float = 0.005,
    eta_grid=None,
    scheme: str = SCHEME_PERIODIC,
    reps: int = BERNOULLI_DEFAULT_REPS,
    seed: int = 0,
) -> SweepResult:
    """Strategy comparison versus dimensionless correlation time eta.

    Per eta: fi_direct = 1'C^-1 1; fi_wva = (1/gamma) * 1'C'^-1 1 on the
    retained submatrix (idealized Aw^2 = 1/gamma); fi_bgsub = g'C^-1 g with
    alternating signs g.  The inv_var_equal_* columns are the inverse
    variances of the matched plain-average estimators, computed analytically
    as direct contractions of C.  The periodic scheme is deterministic; the
    bernoulli scheme averages the weak-value columns over ``reps`` seeded
    retention patterns (fixed across eta).
    """
    if eta_grid is None:
        eta_grid = np.logspace(-2.0, 6.0, 40)
    eta_grid = np.asarray(eta_grid, dtype=float)
    if (eta_grid < 0.0).any():
        raise InvalidSpec("eta grid must be non-negative")

    if scheme == SCHEME_PERIODIC:
        designs = [make_design(n, SCHEME_PERIODIC, gamma=gamma)]
    elif scheme == SCHEME_BERNOULLI:
        designs = _bernoulli_designs(n, gamma, seed, reps)
    else:
        raise InvalidSpec("fig7 retention scheme must be periodic or bernoulli")
    retained_sets = [d.channel_slots("retained") for d in designs]

    alternating = make_design(n, "alternating")
    g = alternating.mu_prime
    ones = np.ones(n)
    rhs = np.column_stack([ones, g])

    rows = []
    for eta in eta_grid:
        matrix = build(CovSpec(KIND_EXPONENTIAL, a, c, n, eta=float(eta)))
        lower = factor_spd(matrix)
        solved = cho_solve((lower, True), rhs)
        fi_direct = float(ones @ solved[:, 0])
        fi_bgsub = float(g @ solved[:, 1])
        entries = matrix.entries
        iv_direct = n * n / float(entries.sum())
        iv_bgsub = n * n / float(g @ entries @ g)

        fi_wva_vals = []
        iv_wva_vals = []
        for retained in retained_sets:
            sub = submatrix(matrix, retained)
            m = retained.size
            ones_m = np.ones(m)
            fi_wva_vals.append(
                float(ones_m @ cho_solve((factor_spd(sub), True), ones_m)) / gamma
            )
            iv_wva_vals.append(m * m / (gamma * float(sub.entries.sum())))
        fi_wva = float(np.mean(fi_wva_vals))
        iv_wva = float(np.mean(iv_wva_vals))

        rows.append(
            (eta, fi_direct, fi_wva, fi_bgsub, iv_direct, iv_wva, iv_bgsub)
        )
    return SweepResult(
        name="fig7",
        headers=(
            "eta",
            "fi_direct",
            "fi_wva",
            "fi_bgsub",
            "inv_var_equal_direct",
            "inv_var_equal_wva",
            "inv_var_equal_bgsub",
        ),
        rows=rows,
        metadata=_metadata(
            "fig7",
            seed=seed if scheme == SCHEME_BERNOULLI else None,
            n=n,
            a=a,
            c=c,
            gamma=gamma,
            scheme=scheme,
            reps=reps if scheme == SCHEME_BERNOULLI else 1,
            eta_min=float(eta_grid.min()),
            eta_max=float(eta_grid.max()),
            eta_points=eta_grid.size,
        ),
    )


# ---------------------------------------------------------------------------
# delta-i
# ---------------------------------------------------------------------------

def delta_i(a: float, c: float, n: int) -> float:
    """Information gap N/a - N/(a+c) between full partitioning and WVA."""
    if a <= 0.0:
        raise InvalidSpec("delta_i requires a > 0")
    if c < 0.0:
        raise InvalidSpec("delta_i requires c >= 0")
    if n < 1:
        raise InvalidSpec("delta_i requires n >= 1")
    return n / a - n / (a + c)


def delta_i_summary(a: float, c: float, n: int) -> SweepResult:
    """Exact gap plus its small-offset (c = a/N) approximation 1/(a + a/N)."""
    exact = delta_i(a, c, n)
    approx = 1.0 / (a + a / n)
    return SweepResult(
        name="delta_i",
        headers=("a", "c", "n", "delta_i_exact", "delta_i_small_c_approx"),
        rows=[(a, c, n, exact, approx)],
        metadata=_metadata("delta_i", a=a, c=c, n=n),
    )
