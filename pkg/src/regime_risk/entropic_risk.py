"""Regime-switching entropic risk: closed forms and a Monte-Carlo oracle.

The entropic risk of a payoff psi at aversion parameter gamma > 0 is

    e_gamma(psi) = -gamma ln E[exp(-psi / gamma)]

(the exponential-utility certainty equivalent; small gamma is extreme
aversion, large gamma tends to the plain expectation).  For claims that pay
a regime-loaded multiple of the terminal spot, conditioning on the starting
regime gives a closed form: with m, v the conditional mean and variance of
the spot at the horizon,

    log phi_j = -delta_j m / gamma + delta_j^2 v / (2 gamma^2)
    lam_i     = gamma ln sum_j P(Z_T = j | Z_s = i) phi_j
    risk_i    = -lam_i

where the regime-transition probabilities come from the chain's matrix
exponential.  Futures fold their carry discount into delta.  The MC route
simulates the chain by its exact holding-time/jump construction and the
spot by its exact Gaussian transition, so the two routes share no kernel
beyond the transition-law parameters.

Determinism: all Monte-Carlo randomness comes from a Philox (counter-based)
bit stream keyed by (seed, starting state), consumed in a fixed
path-indexed layout — full-length draw rounds, never active-subset draws —
so every path's inputs are a pure function of (seed, round, path index).
Worker parallelism only block-splits the pure payoff-evaluation stage;
identical (seed, n_paths) gives bit-identical estimates at any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionError,
    EmptySamples,
    LengthMismatch,
    NonPositiveGamma,
    StateOutOfRange,
    TimeOrder,
)
from .instruments import (
    FutureClaim,
    GibsonSchwartzParams,
    LinearSpotClaim,
    SwapClaim,
    _yield_step,
    step_correlation,
    swap_value,
)
from .ou_model import OUParams, conditional_law, step_coefficients
from .regime_chain import Generator, matrix_exp

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RiskQuery:
    """Evaluation point: aversion gamma, observation time s, horizon T, spot x_s."""

    gamma: float
    s: float
    T: float
    x_s: float

    def __post_init__(self) -> None:
        if self.gamma <= 0:
            raise NonPositiveGamma(f"gamma must be positive, got {self.gamma}")
        if not 0 <= self.s < self.T:
            raise TimeOrder(f"need 0 <= s < T, got s={self.s}, T={self.T}")

    @property
    def horizon(self) -> float:
        return self.T - self.s


@dataclass(frozen=True)
class RiskVector:
    """Per-state closed-form result.

    ``lam[i]`` is the log-scale vector of the closed form; the risk given
    starting state i is ``-lam[i]`` (exposed as :attr:`risks`).
    """

    lam: np.ndarray
    query: RiskQuery

    def __post_init__(self) -> None:
        lam = np.array(self.lam, dtype=float)
        if lam.ndim != 1:
            raise DimensionError(f"lam must be 1-d, got shape {lam.shape}")
        if not np.all(np.isfinite(lam)):
            raise ValueError(f"non-finite risk entries: {lam!r}")
        lam.setflags(write=False)
        object.__setattr__(self, "lam", lam)

    @property
    def n_states(self) -> int:
        return self.lam.size

    @property
    def risks(self) -> np.ndarray:
        return -self.lam

    def risk_given_state(self, i: int) -> float:
        if not 0 <= i < self.n_states:
            raise StateOutOfRange(f"state {i} outside [0, {self.n_states})")
        return float(-self.lam[i])


@dataclass(frozen=True)
class MCEstimate:
    """Monte-Carlo estimate with a delta-method standard error."""

    value: float
    std_error: float
    n_paths: int
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.std_error < 0:
            raise ValueError(f"std_error must be nonnegative, got {self.std_error}")

    def z_score(self, reference: float) -> float:
        """Standardized discrepancy against a reference value (inf if se == 0 and off)."""
        diff = reference - self.value
        if self.std_error == 0.0:
            return 0.0 if diff == 0.0 else float(np.inf)
        return float(diff / self.std_error)


def entropic_mc(samples, gamma: float, seed: int | None = None) -> MCEstimate:
    """Entropic risk of empirical payoff samples.

    Computes -gamma ln mean(exp(-psi/gamma)) through a max-shift (log-sum-exp)
    so arbitrarily large exponents cannot overflow; the standard error comes
    from the delta method on the mean of exp(-psi/gamma) and is invariant
    under the shift.
    """
    if gamma <= 0:
        raise NonPositiveGamma(f"gamma must be positive, got {gamma}")
    psi = np.asarray(samples, dtype=float).ravel()
    if psi.size == 0:
        raise EmptySamples("no payoff samples")
    logw = -psi / gamma
    shift = logw.max()
    w = np.exp(logw - shift)
    wbar = w.mean()
    value = -gamma * (shift + np.log(wbar))
    if psi.size >= 2:
        se = gamma * w.std(ddof=1) / (wbar * np.sqrt(psi.size))
    else:
        se = 0.0
    return MCEstimate(value=float(value), std_error=float(se), n_paths=psi.size, seed=seed)


def _risk_closed(ou: OUParams, g: Generator, delta: np.ndarray, q: RiskQuery) -> np.ndarray:
    """Shared closed-form pipeline; returns lam for an effective loading vector."""
    delta = np.asarray(delta, dtype=float)
    if delta.shape != (g.n,):
        raise DimensionError(f"delta must have shape ({g.n},), got {delta.shape}")
    law = conditional_law(ou, q.x_s, q.s, q.T)
    gamma = q.gamma
    logphi = -delta * law.mean / gamma + delta**2 * law.variance / (2.0 * gamma**2)
    # P[j, i] = P(Z_T = j | Z_s = i); mix phi over the terminal law per start
    # state.  The shift is the max of logphi over each start state's reachable
    # support (not the global max: for a reducible chain an unreachable block
    # could hold the maximum and underflow every reachable term).
    P = matrix_exp(g, q.horizon)
    masked = np.where(P > 0.0, logphi[:, None], -np.inf)
    shift = masked.max(axis=0)
    mixed = np.einsum("ji,ji->i", P, np.exp(masked - shift))
    return gamma * (shift + np.log(mixed))


def spot_risk_closed(
    ou: OUParams, g: Generator, delta, q: RiskQuery
) -> RiskVector:
    """Closed-form entropic risk of the linear spot claim X_T delta[Z_T].

    Returns the per-state vector; risk in starting state i is -lam[i].
    """
    lam = _risk_closed(ou, g, np.asarray(delta, dtype=float), q)
    return RiskVector(lam=lam, query=q)


def future_risk_closed(
    ou: OUParams, g: Generator, c: FutureClaim, q: RiskQuery
) -> RiskVector:
    """Closed-form entropic risk of a future: the spot pipeline applied to
    the carry-discounted loading delta * e^{-(r+y)(T-s)}.

    The query horizon must equal the contract maturity; the carry discount
    and the regime propagation use the same T.
    """
    if abs(q.T - c.maturity) > 1e-12:
        raise TimeOrder(f"query horizon T={q.T} != future maturity {c.maturity}")
    scale = np.exp(-c.carry * q.horizon)
    lam = _risk_closed(ou, g, c.delta * scale, q)
    return RiskVector(lam=lam, query=q)


# ---------------------------------------------------------------------------
# Monte-Carlo machinery
# ---------------------------------------------------------------------------


def _state_rng(seed: int, state: int) -> np.random.Generator:
    """Counter-based stream for one starting state: Philox keyed by (seed, state)."""
    if seed < 0:
        raise ValueError(f"seed must be nonnegative, got {seed}")
    key = np.array([seed & _MASK64, state], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _jump_table(g: Generator) -> tuple[np.ndarray, np.ndarray]:
    """Exit rates and per-column cumulative jump-target probabilities."""
    rates = g.exit_rates()
    n = g.n
    cum = np.ones((n, n))
    for s in range(n):
        col = np.maximum(g.q[:, s].copy(), 0.0)
        col[s] = 0.0
        tot = col.sum()
        if tot > 0:
            cum[:, s] = np.cumsum(col / tot)
    return rates, cum


def _advance_regimes(
    rates: np.ndarray,
    jump_cum: np.ndarray,
    states: np.ndarray,
    dt: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Exact chain transition of every path over ``dt``.

    Identical in law to per-path holding-time/jump simulation; draws come in
    full-length rounds (one exponential and one uniform array per round) so
    the layout is path-indexed and decomposition-independent.
    """
    states = states.copy()
    if dt <= 0.0:
        return states
    n = states.size
    t_left = np.full(n, dt)
    active = rates[states] > 0
    while active.any():
        e = rng.exponential(1.0, n)
        u = rng.random(n)
        r = rates[states]
        hold = np.where(r > 0, e / np.where(r > 0, r, 1.0), np.inf)
        jump = active & (hold < t_left)
        if jump.any():
            t_left[jump] -= hold[jump]
            cum_cols = jump_cum[:, states[jump]]
            states[jump] = (u[jump][None, :] < cum_cols).argmax(axis=0)
        active = jump & (rates[states] > 0)
    return states


def _blockwise(fn, n: int, workers: int) -> np.ndarray:
    """Evaluate ``fn(lo, hi)`` over path blocks, concatenated in path order.

    ``fn`` must be pure and elementwise per path, so the result is identical
    for every block decomposition; workers > 1 runs blocks on threads.
    """
    if workers <= 1:
        return np.asarray(fn(0, n))
    bounds = np.linspace(0, n, workers + 1).astype(int)
    out: list[np.ndarray | None] = [None] * workers
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {
            pool.submit(fn, int(bounds[k]), int(bounds[k + 1])): k for k in range(workers)
        }
        for fut, k in futures.items():
            out[k] = np.asarray(fut.result())
    return np.concatenate([o for o in out if o is not None and o.size])


def _terminal_payoffs(
    ou: OUParams,
    g: Generator,
    claim: LinearSpotClaim | FutureClaim,
    q: RiskQuery,
    state: int,
    n_paths: int,
    seed: int,
    workers: int,
) -> np.ndarray:
    """Simulate (X_T, Z_T) from one starting state and evaluate the claim.

    Draw layout per state stream: one standard-normal round for the spot,
    then the chain's jump rounds.  For futures the payoff is the
    carry-discounted terminal value e^{-(r+y)(T-s)} X_T delta[Z_T], the
    random variable whose entropic risk the closed form targets.
    """
    law = conditional_law(ou, q.x_s, q.s, q.T)
    rng = _state_rng(seed, state)
    x_T = law.mean + law.std * rng.standard_normal(n_paths)
    rates, jump_cum = _jump_table(g)
    z_T = _advance_regimes(rates, jump_cum, np.full(n_paths, state, dtype=np.int64), q.horizon, rng)
    if isinstance(claim, FutureClaim):
        scale = float(np.exp(-claim.carry * q.horizon))
    else:
        scale = 1.0
    delta = claim.delta

    def evaluate(lo: int, hi: int) -> np.ndarray:
        return scale * x_T[lo:hi] * delta[z_T[lo:hi]]

    return _blockwise(evaluate, n_paths, workers)


def _swap_payoffs(
    ou: OUParams,
    g: Generator,
    claim: SwapClaim,
    q: RiskQuery,
    state: int,
    n_paths: int,
    seed: int,
    workers: int,
) -> np.ndarray:
    """Simulate joint (X, Z[, Y]) paths on the settlement grid and value the swap.

    Draw layout per state stream and per settlement step: a spot normal
    round, a yield normal round when the spec is stochastic, then the chain's
    jump rounds.  The yield innovation is correlated with the spot innovation
    at the exact per-step correlation.
    """
    T = claim.n_periods
    rng = _state_rng(seed, state)
    rates, jump_cum = _jump_table(g)
    gs = claim.yield_spec if isinstance(claim.yield_spec, GibsonSchwartzParams) else None

    x = np.full(n_paths, q.x_s)
    z = np.full(n_paths, state, dtype=np.int64)
    y = np.full(n_paths, gs.y0) if gs is not None else None
    x_path = np.empty((T, n_paths))
    z_path = np.empty((T, n_paths), dtype=np.int64)
    y_path = np.empty((T, n_paths)) if gs is not None else None

    times = np.concatenate([[q.s], q.s + claim.settlement_times])
    for k in range(T):
        dt = float(times[k + 1] - times[k])
        bx, cx, sdx = step_coefficients(ou, dt)
        e1 = rng.standard_normal(n_paths)
        x = bx * x + cx + sdx * e1
        if gs is not None:
            by, cy, sdy = _yield_step(gs, dt)
            corr = step_correlation(ou, gs, dt)
            e2 = corr * e1 + np.sqrt(1.0 - corr * corr) * rng.standard_normal(n_paths)
            y = by * y + cy + sdy * e2
            y_path[k] = y
        z = _advance_regimes(rates, jump_cum, z, dt, rng)
        x_path[k] = x
        z_path[k] = z

    def evaluate(lo: int, hi: int) -> np.ndarray:
        yp = y_path[:, lo:hi] if y_path is not None else None
        return np.atleast_1d(swap_value(x_path[:, lo:hi], z_path[:, lo:hi], claim, yp))

    return _blockwise(evaluate, n_paths, workers)


def _payoffs_for_state(ou, g, claim, q, state, n_paths, seed, workers) -> np.ndarray:
    if isinstance(claim, (LinearSpotClaim, FutureClaim)):
        if isinstance(claim, FutureClaim) and abs(q.T - claim.maturity) > 1e-12:
            raise TimeOrder(f"query horizon T={q.T} != future maturity {claim.maturity}")
        return _terminal_payoffs(ou, g, claim, q, state, n_paths, seed, workers)
    if isinstance(claim, SwapClaim):
        if q.s != 0.0:
            raise TimeOrder(f"swap risk is evaluated from s=0, got s={q.s}")
        if q.T != float(claim.n_periods):
            raise LengthMismatch(
                f"query horizon T={q.T} != swap settlement count {claim.n_periods}"
            )
        return _swap_payoffs(ou, g, claim, q, state, n_paths, seed, workers)
    raise TypeError(f"unsupported claim type {type(claim).__name__}")


def claim_risk_mc(
    ou: OUParams,
    g: Generator,
    claim,
    q: RiskQuery,
    n_paths: int,
    seed: int,
    workers: int = 1,
) -> list[MCEstimate]:
    """Monte-Carlo entropic risk of a claim, one estimate per starting regime.

    Spot values use the exact Gaussian transition; regimes use the exact
    holding-time/jump simulation (never the matrix exponential, keeping this
    route independent of the closed form); swaps get full joint paths over
    their settlement grid.  Estimates are bit-identical for fixed
    (seed, n_paths) at any ``workers`` count.
    """
    if n_paths < 2:
        raise ValueError(f"need n_paths >= 2, got {n_paths}")
    if getattr(claim, "n_states", g.n) != g.n:
        raise DimensionError(
            f"claim loading has {claim.n_states} states, chain has {g.n}"
        )
    out = []
    for state in range(g.n):
        payoffs = _payoffs_for_state(ou, g, claim, q, state, n_paths, seed, workers)
        est = entropic_mc(payoffs, q.gamma, seed=seed)
        out.append(est)
    return out


def swap_risk_mc(
    ou: OUParams,
    g: Generator,
    c: SwapClaim,
    gamma: float,
    n_paths: int,
    seed: int,
    z0: int = 0,
    workers: int = 1,
) -> MCEstimate:
    """Monte-Carlo entropic risk of a commodity swap from starting regime ``z0``.

    Settlements sit at t = 1..T years from s = 0 with x_0 = ou.x0; there is
    no closed form for this claim, so simulation is the contract.  Equals
    ``claim_risk_mc(...)[z0]`` bit for bit.
    """
    if not 0 <= z0 < g.n:
        raise StateOutOfRange(f"z0={z0} outside [0, {g.n})")
    q = RiskQuery(gamma=gamma, s=0.0, T=float(c.n_periods), x_s=ou.x0)
    payoffs = _payoffs_for_state(ou, g, c, q, z0, n_paths, seed, workers)
    return entropic_mc(payoffs, gamma, seed=seed)
