"""Mean-reverting (Ornstein-Uhlenbeck) spot model.

    dX = alpha (mu - X) dt + sigma dB

with exact Gaussian transitions: knowing X_s, the value X_t is normal with

    mean     = X_s e^{-alpha (t-s)} + mu (1 - e^{-alpha (t-s)})
    variance = sigma^2 / (2 alpha) (1 - e^{-2 alpha (t-s)})

All times are in years; daily price data uses dt = 1/252 by default.
"""

from __future__ import annotations

import csv
import datetime as _dt
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import NotMeanReverting, TimeOrder, TooFewPoints

TRADING_DAYS_PER_YEAR = 252.0
DEFAULT_DT = 1.0 / TRADING_DAYS_PER_YEAR


@dataclass(frozen=True)
class OUParams:
    """Reversion rate (1/yr), long-run mean, volatility (per sqrt yr), initial spot."""

    alpha: float
    mu: float
    sigma: float
    x0: float

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")

    @property
    def stationary_variance(self) -> float:
        return self.sigma**2 / (2.0 * self.alpha)


@dataclass(frozen=True)
class ConditionalLaw:
    """Gaussian transition law; ``variance`` is the plain second central moment."""

    mean: float
    variance: float

    def __post_init__(self) -> None:
        if self.variance < 0:
            raise ValueError(f"variance must be nonnegative, got {self.variance}")

    @property
    def std(self) -> float:
        return float(np.sqrt(self.variance))


@dataclass(frozen=True)
class PriceSeries:
    """Historical spot observations on consecutive opening days.

    ``dt`` is the year fraction between consecutive rows (1/252 for daily
    data); calendar gaps are ignored — absent days are simply absent.
    """

    timestamps: np.ndarray
    prices: np.ndarray
    dt: float = DEFAULT_DT

    def __post_init__(self) -> None:
        ts = np.asarray(self.timestamps)
        px = np.asarray(self.prices, dtype=float)
        if ts.shape != px.shape or ts.ndim != 1:
            raise ValueError("timestamps and prices must be equal-length 1-d arrays")
        if px.size < 3:
            raise TooFewPoints(f"need at least 3 observations, got {px.size}")
        if not np.all(ts[1:] > ts[:-1]):
            i = int(np.argmax(~(ts[1:] > ts[:-1]))) + 1
            raise ValueError(f"timestamps not strictly increasing at row {i} ({ts[i]!r})")
        if np.any(px <= 0):
            i = int(np.argmax(px <= 0))
            raise ValueError(f"nonpositive price {px[i]!r} at row {i}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        ts, px = ts.copy(), px.copy()
        ts.setflags(write=False)
        px.setflags(write=False)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "prices", px)

    def __len__(self) -> int:
        return self.prices.size


@dataclass(frozen=True)
class CalibrationResult:
    """Fitted parameters plus delta-method standard errors."""

    params: OUParams
    alpha_se: float
    mu_se: float
    sigma_se: float
    ar1_slope: float
    ar1_intercept: float
    n_obs: int
    dt: float


def step_coefficients(p: OUParams, dt: float) -> tuple[float, float, float]:
    """Exact one-step recursion X' = b X + c + sd * N(0,1) over a step of ``dt`` years."""
    b = float(np.exp(-p.alpha * dt))
    c = p.mu * (1.0 - b)
    sd = float(np.sqrt(p.stationary_variance * (1.0 - b * b)))
    return b, c, sd


def conditional_law(p: OUParams, x_s: float, s: float, t: float) -> ConditionalLaw:
    """Law of X_t given X_s = x_s, 0 <= s <= t."""
    if t < s:
        raise TimeOrder(f"t={t} earlier than s={s}")
    b, c, sd = step_coefficients(p, t - s)
    return ConditionalLaw(mean=x_s * b + c, variance=sd * sd)


def sample_exact(
    p: OUParams, x_s: float, s: float, t: float, rng: np.random.Generator
) -> float:
    """One draw from the exact transition law (no discretization error)."""
    law = conditional_law(p, x_s, s, t)
    return law.mean + law.std * rng.standard_normal()


def simulate_path(p: OUParams, grid: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Exact sequential transitions along ``grid`` (years), starting from x0 at time 0."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    if grid[0] != 0.0:
        raise TimeOrder(f"grid must start at 0, got {grid[0]}")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise TimeOrder("grid times must be strictly increasing")
    x = np.empty(grid.size)
    x[0] = p.x0
    if grid.size > 1:
        eps = rng.standard_normal(grid.size - 1)
        steps = np.diff(grid)
        for k, dt in enumerate(steps):
            b, c, sd = step_coefficients(p, dt)
            x[k + 1] = b * x[k] + c + sd * eps[k]
    return x


def calibrate(series: PriceSeries) -> CalibrationResult:
    """Fit (alpha, mu, sigma) by OLS on the exact AR(1) discretization.

    X_{t+dt} = c + b X_t + eps maps back to the continuous parameters via
    alpha = -ln(b)/dt, mu = c/(1-b), sigma^2 = Var(eps) 2 alpha / (1-b^2);
    for Gaussian transitions the OLS point estimates coincide with maximum
    likelihood.  x0 is the first observation.  Standard errors come from the
    OLS covariance and the delta method (residual-variance uncertainty
    included for sigma).

    Raises
    ------
    TooFewPoints
        Fewer than 3 observations (also enforced by PriceSeries).
    NotMeanReverting
        Fitted slope b <= 0 or b >= 1, a constant series, or a slope within
        two standard errors of 1 (unit root not rejected): alpha is not
        identified.
    """
    x = series.prices
    if x.size < 3:
        raise TooFewPoints(f"need at least 3 observations, got {x.size}")
    if np.var(x) == 0.0:
        raise NotMeanReverting("constant series: reversion rate not identified")
    dt = series.dt
    x_prev, x_next = x[:-1], x[1:]
    n = x_prev.size
    design = np.column_stack([np.ones(n), x_prev])
    beta, _, _, _ = np.linalg.lstsq(design, x_next, rcond=None)
    c, b = float(beta[0]), float(beta[1])
    resid = x_next - design @ beta
    dof = n - 2
    s2 = float(resid @ resid / dof)
    cov = s2 * np.linalg.inv(design.T @ design)
    b_se = float(np.sqrt(cov[1, 1]))

    if b <= 0.0:
        raise NotMeanReverting(f"fitted AR(1) slope b={b:.6g} <= 0")
    if b >= 1.0:
        raise NotMeanReverting(f"fitted AR(1) slope b={b:.6g} >= 1")
    if 1.0 - b <= 2.0 * b_se:
        raise NotMeanReverting(
            f"fitted AR(1) slope b={b:.6g} within 2 standard errors ({b_se:.2g}) "
            "of 1: unit root not rejected, reversion rate not identified"
        )

    alpha = -np.log(b) / dt
    mu = c / (1.0 - b)
    h = 2.0 * alpha / (1.0 - b * b)
    sigma = float(np.sqrt(s2 * h))

    alpha_se = b_se / (b * dt)
    grad_mu = np.array([1.0 / (1.0 - b), c / (1.0 - b) ** 2])
    mu_se = float(np.sqrt(grad_mu @ cov @ grad_mu))
    # sigma = sqrt(s2 * h(b)); independent s2 and b terms
    dh_db = (-2.0 * (1.0 - b * b) / b - 4.0 * b * np.log(b)) / (dt * (1.0 - b * b) ** 2)
    dsig_ds2 = h / (2.0 * sigma)
    dsig_db = s2 * dh_db / (2.0 * sigma)
    var_s2 = 2.0 * s2 * s2 / dof
    sigma_se = float(np.sqrt(dsig_ds2**2 * var_s2 + dsig_db**2 * cov[1, 1]))

    params = OUParams(alpha=float(alpha), mu=float(mu), sigma=sigma, x0=float(x[0]))
    return CalibrationResult(
        params=params,
        alpha_se=float(alpha_se),
        mu_se=mu_se,
        sigma_se=sigma_se,
        ar1_slope=b,
        ar1_intercept=c,
        n_obs=n,
        dt=dt,
    )


def load_price_csv(path: str | Path, dt: float = DEFAULT_DT) -> PriceSeries:
    """Read a ``date,price`` CSV (ISO-8601 dates, one row per opening day).

    Raises ValueError naming the offending row on malformed dates, nonpositive
    prices, or out-of-order dates; TooFewPoints below 3 rows.
    """
    path = Path(path)
    dates: list[_dt.date] = []
    prices: list[float] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["date", "price"]:
            raise ValueError(f"{path}: expected header 'date,price', got {header!r}")
        for i, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) < 2:
                raise ValueError(f"{path} row {i}: expected 2 fields, got {row!r}")
            try:
                d = _dt.date.fromisoformat(row[0].strip())
            except ValueError as exc:
                raise ValueError(f"{path} row {i}: bad date {row[0]!r}") from exc
            try:
                v = float(row[1])
            except ValueError as exc:
                raise ValueError(f"{path} row {i}: bad price {row[1]!r}") from exc
            if dates and d <= dates[-1]:
                raise ValueError(f"{path} row {i}: date {d} not after {dates[-1]}")
            dates.append(d)
            prices.append(v)
    if len(prices) < 3:
        raise TooFewPoints(f"{path}: need at least 3 rows, got {len(prices)}")
    ts = np.array(dates, dtype="datetime64[D]")
    return PriceSeries(timestamps=ts, prices=np.array(prices), dt=dt)
