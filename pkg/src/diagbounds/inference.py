"""Bootstrap moment-inequality test and confidence sets by grid inversion.

The test statistic at a candidate theta is the largest studentized sample
moment, T_n = max{max_j sqrt(n) mbar_j / S_j, 0}.  Critical values come
from a two-step bootstrap: step one forms joint level-(1 - beta) upper
confidence bounds for the normalized moments; step two takes the
(1 - alpha + beta) bootstrap quantile of the max statistic recentered by
those bounds truncated at zero.  A candidate is retained when T_n does
not exceed the critical value; the confidence set is the collection of
retained grid points.

Two structural facts keep full-grid inversion cheap: every moment
component depends on the data only through the four (t, r) cell
frequencies, so a bootstrap replicate is a single multinomial draw over
cells, and the components are affine in (theta1, theta0), so per-point
statistics are fused multiply-adds over precomputed tables.  The same B
multinomial draws are shared across all grid points, which also makes
confidence sets nested across significance levels for a fixed seed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .identification import DependenceAssumption, Interval
from .moments import ThetaPoint, moment_cell_tables, param_space_box
from .probability import CellCounts, JointTR, RefPerf, SRegion

__all__ = [
    "TestConfig",
    "TestResult",
    "ConfidenceSet",
    "CoverageResult",
    "bootstrap_cell_frequencies",
    "rsw2_test",
    "confidence_set",
    "coverage_simulation",
]

_QUANTILE_METHOD = "higher"

# Substream tags keep bootstrap draws, simulated datasets, and derived
# seeds in disjoint regions of the counter-based key space.
_TAG_BOOTSTRAP = 1
_TAG_DATASET = 2
_TAG_DERIVED = 3


@dataclass(frozen=True)
class TestConfig:
    """Configuration for the bootstrap test and grid inversion.

    ``beta`` is the first-stage level; ``None`` selects the default
    alpha/10.  ``theta_grid`` is the per-axis resolution of the
    (theta1, theta0) grid (316 x 316 is about 1e5 points) and ``s_grid``
    the default number of points per axis when discretizing a rectangle
    of reference values.
    """

    __test__ = False  # not a pytest collectable

    alpha: float = 0.05
    beta: float | None = None
    bootstrap: int = 500
    seed: int = 0
    theta_grid: int = 316
    s_grid: int = 10

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        b = self.beta_value
        if not (0.0 < b < self.alpha):
            raise ValueError(f"beta must lie in (0, alpha), got {b}")
        if self.bootstrap < 1:
            raise ValueError(f"need at least one bootstrap draw, got {self.bootstrap}")
        if self.theta_grid < 2 or self.s_grid < 2:
            raise ValueError("grids need at least 2 points per axis")
        if self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed}")

    @property
    def beta_value(self) -> float:
        return self.alpha / 10.0 if self.beta is None else self.beta

    @classmethod
    def with_beta_preset(cls, alpha: float = 0.05, divisor: int = 10, **kwargs) -> "TestConfig":
        """Presets for the first-stage level: alpha/10, alpha/5, alpha/20."""
        if divisor not in (5, 10, 20):
            raise ValueError(f"beta preset divisor must be 5, 10 or 20, got {divisor}")
        return cls(alpha=alpha, beta=alpha / divisor, **kwargs)


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # not a pytest collectable

    reject: bool
    t_n: float
    crit: float


def _substream(seed: int, tag: int, index: int) -> np.random.Generator:
    """Counter-based generator for one replicate, independent of call order."""
    key = np.array(
        [np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64((tag << 48) | index)],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(seed: int, index: int) -> int:
    """Stable 63-bit child seed for nested simulations."""
    return int(_substream(seed, _TAG_DERIVED, index).integers(0, 2**63))


def bootstrap_cell_frequencies(counts: CellCounts, cfg: TestConfig) -> np.ndarray:
    """B multinomial resamples of the four cells, as frequencies.

    Resampling n observations with replacement and tabulating is exactly a
    multinomial draw over the cells, so one vector per replicate carries
    all the information the moment machinery needs.  Each replicate has
    its own counter-based substream keyed by (seed, replicate).
    """
    n = counts.n
    pvals = np.asarray(counts.cells, dtype=float) / n
    out = np.empty((cfg.bootstrap, 4))
    for b in range(cfg.bootstrap):
        rng = _substream(cfg.seed, _TAG_BOOTSTRAP, b)
        out[b] = rng.multinomial(n, pvals)
    out /= n
    out.setflags(write=False)
    return out


def _stud(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """num / den with the zero-denominator convention.

    A degenerate (constant) component rejects only if its mean violates
    the inequality: positive numerator maps to +inf, non-positive to
    -inf (the component drops out of a maximum).
    """
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0.0, num / den, np.where(num > 0.0, np.inf, -np.inf))
    return out


class _SPointKernel:
    """Vectorized test evaluation for one (s1, s0) and one dataset.

    Precomputes, from the affine cell tables m = A + theta1 B + theta0 C,
    every data-side and bootstrap-side projection needed to evaluate the
    statistic and its critical value at arbitrary theta grids.  The six
    inequality components load on a single theta coordinate (the driving
    coordinate ``u``); the equality pair loads on both.
    """

    def __init__(
        self,
        counts: CellCounts,
        a: DependenceAssumption,
        s: RefPerf,
        boot_freqs: np.ndarray,
    ) -> None:
        n = counts.n
        if n < 2:
            raise ValueError(f"the test requires n >= 2 observations, got {n}")
        A, B, C = moment_cell_tables(a, s)
        self.n = n
        self.sqrt_n = math.sqrt(n)
        # Driving coordinate: theta0 for the wrongly-agree-y0 system.
        self.u_is_theta1 = a is not DependenceAssumption.WRONGLY_AGREE_Y0
        U, V = (B, C) if self.u_is_theta1 else (C, B)

        f = np.asarray(counts.cells, dtype=float) / n
        F = boot_freqs

        def proj(w: np.ndarray, t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
            return w @ (t1 * t2)

        # Data-side affine/quadratic coefficients, shape (8,).
        self.fA, self.fU, self.fV = f @ A, f @ U, f @ V
        self.fAA = proj(f, A, A)
        self.fAU = proj(f, A, U)
        self.fAV = proj(f, A, V)
        self.fUU = proj(f, U, U)
        self.fUV = proj(f, U, V)
        self.fVV = proj(f, V, V)
        # Bootstrap-side means, shape (B, 8).  Bootstrap deviations are
        # studentized by the data-side standard deviations; re-estimating
        # the scale inside each draw makes the max statistic explode in
        # resamples that nearly empty a thin cell and loses the published
        # rejections.
        self.PA, self.PU, self.PV = F @ A, F @ U, F @ V

    # -- data-side statistics ------------------------------------------

    def _ineq_stats(self, u: float) -> tuple[np.ndarray, np.ndarray]:
        mu = self.fA[:6] + self.fU[:6] * u
        var = self.fAA[:6] + 2.0 * u * self.fAU[:6] + u * u * self.fUU[:6] - mu * mu
        return mu, np.sqrt(np.maximum(var, 0.0))

    def _eq_stats(self, u: float, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        j = 6
        mu = self.fA[j] + self.fU[j] * u + self.fV[j] * v
        var = (
            self.fAA[j]
            + 2.0 * u * self.fAU[j]
            + u * u * self.fUU[j]
            + 2.0 * v * (self.fAV[j] + u * self.fUV[j])
            + v * v * self.fVV[j]
            - mu * mu
        )
        return mu, np.sqrt(np.maximum(var, 0.0))

    # -- bootstrap-side statistics -------------------------------------

    def _boot_ineq_means(self, u: float) -> np.ndarray:
        return self.PA[:, :6] + self.PU[:, :6] * u

    def _boot_eq_means(self, u: float, v: np.ndarray) -> np.ndarray:
        j = 6
        base = self.PA[:, j] + self.PU[:, j] * u
        return base[None, :] + v[:, None] * self.PV[None, :, j]

    # -- full evaluation ------------------------------------------------

    def evaluate(
        self, u: float, v: np.ndarray, alpha: float, beta: float
    ) -> tuple[np.ndarray, np.ndarray]:
        """T_n and critical value along a vector of the non-driving theta."""
        rn = self.sqrt_n
        mu6, s6 = self._ineq_stats(u)
        mu7, s7 = self._eq_stats(u, v)
        t6 = float(np.max(_stud(rn * mu6, s6)))
        t7 = _stud(rn * np.abs(mu7), s7)
        tn = np.maximum(np.maximum(t6, t7), 0.0)

        Mb6 = self._boot_ineq_means(u)
        Mb7 = self._boot_eq_means(u, v)
        s7c = s7[:, None]

        # Step 1: joint upper confidence bounds for the moments.
        d6max = np.max(_stud(rn * (Mb6 - mu6[None, :]), s6[None, :]), axis=1)
        d7 = rn * (Mb7 - mu7[:, None])
        g1 = np.maximum(
            d6max[None, :], np.maximum(_stud(d7, s7c), _stud(-d7, s7c))
        )
        bhat = np.quantile(g1, 1.0 - beta, axis=1, method=_QUANTILE_METHOD)

        # Step 2: recenter by the bounds truncated at zero.
        scale = np.where(s6 > 0.0, s6 / rn, 0.0)
        lam6 = np.minimum(mu6[None, :] + bhat[:, None] * scale[None, :], 0.0)
        scale7 = np.where(s7 > 0.0, s7 / rn, 0.0)
        lam7a = np.minimum(mu7 + bhat * scale7, 0.0)
        lam7b = np.minimum(-mu7 + bhat * scale7, 0.0)

        gmax = np.full(g1.shape, -np.inf)
        for j in range(6):
            num = rn * (Mb6[None, :, j] - mu6[j] + lam6[:, j, None])
            np.maximum(gmax, _stud(num, s6[j]), out=gmax)
        np.maximum(gmax, _stud(d7 + rn * lam7a[:, None], s7c), out=gmax)
        np.maximum(gmax, _stud(-d7 + rn * lam7b[:, None], s7c), out=gmax)
        crit = np.quantile(gmax, 1.0 - alpha + beta, axis=1, method=_QUANTILE_METHOD)
        return tn, np.maximum(crit, 0.0)


def _point_test(
    counts: CellCounts,
    theta: ThetaPoint,
    a: DependenceAssumption,
    cfg: TestConfig,
    boot_freqs: np.ndarray | None = None,
) -> TestResult:
    if boot_freqs is None:
        boot_freqs = bootstrap_cell_frequencies(counts, cfg)
    kernel = _SPointKernel(counts, a, theta.s, boot_freqs)
    u, v = (theta.theta1, theta.theta0) if kernel.u_is_theta1 else (theta.theta0, theta.theta1)
    tn, crit = kernel.evaluate(u, np.array([v]), cfg.alpha, cfg.beta_value)
    t_n, c = float(tn[0]), float(crit[0])
    reject = bool(t_n > c) or math.isinf(t_n)
    return TestResult(reject=reject, t_n=t_n, crit=c)


def rsw2_test(
    counts: CellCounts,
    theta: ThetaPoint,
    a: DependenceAssumption,
    cfg: TestConfig,
) -> TestResult:
    """Two-step bootstrap max test of H0: theta lies in the identified set.

    Deterministic given the seed.  Requires every (t, r) cell to be
    occupied; with all data in one cell every component is degenerate and
    no studentization is possible.
    """
    counts.require_positive_cells()
    _check_in_box(theta, a)
    return _point_test(counts, theta, a, cfg)


def _check_in_box(theta: ThetaPoint, a: DependenceAssumption) -> None:
    (lo1, hi1), (lo0, hi0) = param_space_box(a, theta.s)
    if not (lo1 <= theta.theta1 <= hi1 and lo0 <= theta.theta0 <= hi0):
        raise ValueError(
            f"theta ({theta.theta1}, {theta.theta0}) lies outside the "
            f"parameter space [{lo1}, {hi1}] x [{lo0}, {hi0}] implied by "
            f"{a.value!r}"
        )


@dataclass(frozen=True)
class ConfidenceSet:
    """Retained grid points of the inverted test, with per-point statistics.

    ``points`` has one row (theta1, theta0, s1, s0) per retained point, in
    row-major order over the theta1 index, then theta0, then the s-grid
    index; ``t_n`` and ``crit`` align with it.  ``projections`` are the
    retained ranges of theta1 and theta0 (None when nothing is retained).
    """

    config: TestConfig
    assumption: DependenceAssumption
    theta1_axis: np.ndarray
    theta0_axis: np.ndarray
    s_points: tuple[RefPerf, ...]
    points: np.ndarray
    t_n: np.ndarray
    crit: np.ndarray
    n_tested: int
    quantile_method: str = _QUANTILE_METHOD

    def __post_init__(self) -> None:
        for arr in (self.theta1_axis, self.theta0_axis, self.points, self.t_n, self.crit):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def projections(self) -> tuple[Interval, Interval] | None:
        if len(self) == 0:
            return None
        return (
            Interval(float(self.points[:, 0].min()), float(self.points[:, 0].max())),
            Interval(float(self.points[:, 1].min()), float(self.points[:, 1].max())),
        )

    def contains(self, theta1: float, theta0: float, s: RefPerf, tol: float = 1e-9) -> bool:
        """Membership of an exact grid point in the retained set."""
        if len(self) == 0:
            return False
        m = (
            (np.abs(self.points[:, 0] - theta1) <= tol)
            & (np.abs(self.points[:, 1] - theta0) <= tol)
            & (np.abs(self.points[:, 2] - s.s1) <= tol)
            & (np.abs(self.points[:, 3] - s.s0) <= tol)
        )
        return bool(np.any(m))

    def to_dict(self) -> dict:
        proj = self.projections
        return {
            "alpha": self.config.alpha,
            "beta": self.config.beta_value,
            "bootstrap": self.config.bootstrap,
            "seed": self.config.seed,
            "quantile_method": self.quantile_method,
            "assumption": self.assumption.value,
            "s_points": [[s.s1, s.s0] for s in self.s_points],
            "theta1_axis": self.theta1_axis.tolist(),
            "theta0_axis": self.theta0_axis.tolist(),
            "n_tested": self.n_tested,
            "n_retained": len(self),
            "theta1_projection": None if proj is None else [proj[0].lo, proj[0].hi],
            "theta0_projection": None if proj is None else [proj[1].lo, proj[1].hi],
            "points": self.points.tolist(),
            "t_n": self.t_n.tolist(),
            "crit": self.crit.tolist(),
        }

    def to_csv_rows(self) -> list[str]:
        rows = ["theta1,theta0,s1,s0,Tn,crit,accepted"]
        for row, tn, cr in zip(self.points, self.t_n, self.crit):
            rows.append(
                f"{row[0]:.12g},{row[1]:.12g},{row[2]:.10g},{row[3]:.10g},"
                f"{tn:.12g},{cr:.12g},1"
            )
        return rows


def confidence_set(
    counts: CellCounts,
    S: SRegion,
    a: DependenceAssumption,
    cfg: TestConfig,
    workers: int = 1,
) -> ConfidenceSet:
    """Invert the test over a theta grid crossed with the reference grid.

    The (theta1, theta0) grid spans [0, 1]^2 at the configured resolution;
    points outside the parameter-space box of ``a`` at a given (s1, s0)
    are excluded a priori.  Bootstrap draws are generated once and shared
    by every grid point, so results are independent of ``workers``.
    """
    counts.require_positive_cells()
    boot_freqs = bootstrap_cell_frequencies(counts, cfg)
    t1_axis = np.linspace(0.0, 1.0, cfg.theta_grid)
    t0_axis = np.linspace(0.0, 1.0, cfg.theta_grid)
    s_points = tuple(sorted(S.points, key=lambda q: (q.s1, q.s0)))
    alpha, beta = cfg.alpha, cfg.beta_value

    retained_blocks: list[np.ndarray] = []
    tn_blocks: list[np.ndarray] = []
    crit_blocks: list[np.ndarray] = []
    n_tested = 0

    per_s: list[tuple[np.ndarray, np.ndarray]] = []
    for s in s_points:
        kernel = _SPointKernel(counts, a, s, boot_freqs)
        (lo1, hi1), (lo0, hi0) = param_space_box(a, s)
        m1 = (t1_axis >= lo1) & (t1_axis <= hi1)
        m0 = (t0_axis >= lo0) & (t0_axis <= hi0)
        u_axis, v_axis = (t1_axis[m1], t0_axis[m0]) if kernel.u_is_theta1 else (
            t0_axis[m0],
            t1_axis[m1],
        )
        n_tested += u_axis.size * v_axis.size

        tn_grid = np.empty((u_axis.size, v_axis.size))
        crit_grid = np.empty_like(tn_grid)

        def fill(rows: range, kern=kernel, ua=u_axis, va=v_axis, tg=tn_grid, cg=crit_grid):
            for i in rows:
                tg[i], cg[i] = kern.evaluate(float(ua[i]), va, alpha, beta)

        if workers > 1 and u_axis.size > 1:
            chunks = np.array_split(np.arange(u_axis.size), workers)
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(fill, [range(c[0], c[-1] + 1) for c in chunks if c.size]))
        else:
            fill(range(u_axis.size))

        if not kernel.u_is_theta1:
            tn_grid = tn_grid.T
            crit_grid = crit_grid.T
        per_s.append((tn_grid, crit_grid))

    # Assemble retained points in (theta1 index, theta0 index, s index) order.
    keep_i1, keep_i0, keep_is = [], [], []
    for s_idx, s in enumerate(s_points):
        (lo1, hi1), (lo0, hi0) = param_space_box(a, s)
        idx1 = np.flatnonzero((t1_axis >= lo1) & (t1_axis <= hi1))
        idx0 = np.flatnonzero((t0_axis >= lo0) & (t0_axis <= hi0))
        tn_grid, crit_grid = per_s[s_idx]
        keep = ~(tn_grid > crit_grid) & np.isfinite(tn_grid)
        ii, jj = np.nonzero(keep)
        if ii.size == 0:
            continue
        keep_i1.append(idx1[ii])
        keep_i0.append(idx0[jj])
        keep_is.append(np.full(ii.size, s_idx))
        retained_blocks.append(
            np.column_stack(
                [
                    t1_axis[idx1[ii]],
                    t0_axis[idx0[jj]],
                    np.full(ii.size, s.s1),
                    np.full(ii.size, s.s0),
                ]
            )
        )
        tn_blocks.append(tn_grid[ii, jj])
        crit_blocks.append(crit_grid[ii, jj])

    if retained_blocks:
        pts = np.vstack(retained_blocks)
        tns = np.concatenate(tn_blocks)
        crs = np.concatenate(crit_blocks)
        order = np.lexsort(
            (
                np.concatenate(keep_is),
                np.concatenate(keep_i0),
                np.concatenate(keep_i1),
            )
        )
        pts, tns, crs = pts[order], tns[order], crs[order]
    else:
        pts = np.empty((0, 4))
        tns = np.empty(0)
        crs = np.empty(0)

    return ConfidenceSet(
        config=cfg,
        assumption=a,
        theta1_axis=t1_axis,
        theta0_axis=t0_axis,
        s_points=s_points,
        points=pts,
        t_n=tns,
        crit=crs,
        n_tested=n_tested,
    )


@dataclass(frozen=True)
class CoverageResult:
    """Empirical acceptance rates of identified-set points across replications."""

    theta_points: tuple[ThetaPoint, ...]
    coverage: np.ndarray
    reps: int
    n: int

    def __post_init__(self) -> None:
        self.coverage.setflags(write=False)


def coverage_simulation(
    true_p: JointTR,
    s_true: RefPerf,
    a: DependenceAssumption,
    n: int,
    reps: int,
    cfg: TestConfig,
    theta_points: "tuple[ThetaPoint, ...] | None" = None,
    eps: float | None = None,
) -> CoverageResult:
    """Monte-Carlo acceptance rates of the test at identified-set points.

    Draws ``reps`` datasets of size ``n`` from ``true_p`` and records, for
    each candidate theta (by default three interior points of the true
    segment), the fraction of replications in which the test accepts.
    Replicate r uses its own dataset substream and a derived bootstrap
    seed, so results do not depend on evaluation order.
    """
    from .identification import sharp_segment

    if reps < 1:
        raise ValueError(f"need at least one replication, got {reps}")
    floor = eps if eps is not None else 1.0 / (2.0 * n)
    if not true_p.satisfies_cell_floor(floor):
        raise ValueError(
            f"true distribution violates the cell floor {floor}: cells {true_p.cells}"
        )
    if theta_points is None:
        seg = sharp_segment(true_p, s_true, a)
        theta_points = tuple(
            ThetaPoint(t1, t0, s_true)
            for t1, t0 in dict.fromkeys(seg.point_at(f) for f in (0.25, 0.5, 0.75))
        )
    for tp in theta_points:
        _check_in_box(tp, a)

    pvals = np.asarray(true_p.cells, dtype=float)
    accept = np.zeros((reps, len(theta_points)), dtype=int)
    for r in range(reps):
        rng = _substream(cfg.seed, _TAG_DATASET, r)
        draw = rng.multinomial(n, pvals)
        counts = CellCounts(*(int(c) for c in draw))
        rep_cfg = replace(cfg, seed=derive_seed(cfg.seed, r))
        boot = bootstrap_cell_frequencies(counts, rep_cfg)
        for k, tp in enumerate(theta_points):
            res = _point_test(counts, tp, a, rep_cfg, boot_freqs=boot)
            accept[r, k] = 0 if res.reject else 1
    coverage = accept.mean(axis=0)
    return CoverageResult(
        theta_points=tuple(theta_points), coverage=coverage, reps=reps, n=n
    )
