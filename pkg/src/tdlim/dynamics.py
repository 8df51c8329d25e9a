"""Trajectory iteration, analytic Jacobians, Lyapunov spectra, parameter scans.

The learning map sends a behavior profile X to A/B where A[i,s,a] multiplies
X[i,s,a] by the exponentiated drive term and B[i,s] normalizes per row. Its
derivative is assembled with the quotient rule from the derivative of A, which
in turn chains through the averaged rewards, the effective transition matrix,
the explicit resolvent inverse (I - gamma*T_eff)^(-1), and the learner's
next-state estimate.

Simplex-coordinate convention: the derivative with respect to coordinate
(j, r, b) moves probability mass onto action b and off every other action of
agent j in state r, i.e. dX[j,r,a]/d(j,r,b) = 2*delta(a,b) - 1. This is the
exact tangent parametrization for two-action simplices; for M > 2 the same
formula is applied and the result is marked `paper_convention`, with the
finite-difference validation using the identical directions.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import BoundaryError, NonErgodicError, ParameterError, PartialSpectrumError
from .game import (
    Game,
    joint_action_probs_excluding,
    per_agent,
    performance,
    validate_profile,
)
from .learners import LearnerKind, LearnerParams, _require_interior, step

ARGMAX_TIE_TOL = 1e-12
HASH_GRANULARITY = 1e-8


@dataclass
class Trajectory:
    """A recorded run of the learning map.

    `points` has shape (L, N, Z, M) with points[0] = x0; `performance` holds
    the stationary-average reward per agent at each recorded point, or NaN at
    transient profiles whose effective chain has no unique stationary
    distribution within tolerance. If the run converged, `converged_at` is the
    first index t with max|points[t] - points[t-1]| < epsilon.
    """

    points: np.ndarray
    performance: np.ndarray
    converged_at: Optional[int]
    epsilon: float

    @property
    def final(self) -> np.ndarray:
        return self.points[-1]


def iterate(
    game: Game,
    x0: np.ndarray,
    params: LearnerParams,
    max_steps: int,
    epsilon: float,
) -> Trajectory:
    """Iterate the learning map, stopping early at an epsilon fixed point."""
    x = validate_profile(game, x0)
    if epsilon <= 0.0:
        raise ParameterError(f"epsilon must be positive, got {epsilon!r}")
    if max_steps < 0:
        raise ParameterError(f"max_steps must be non-negative, got {max_steps!r}")

    def recorded_performance(profile):
        try:
            return performance(game, profile)
        except NonErgodicError:
            return np.full(game.n_agents, np.nan)

    points = [x]
    perfs = [recorded_performance(x)]
    converged_at = None
    for t in range(1, max_steps + 1):
        try:
            x_next = step(game, x, params)
        except BoundaryError as exc:
            exc.step = t
            raise
        points.append(x_next)
        perfs.append(recorded_performance(x_next))
        if np.max(np.abs(x_next - x)) < epsilon:
            converged_at = t
            x = x_next
            break
        x = x_next
    return Trajectory(np.array(points), np.array(perfs), converged_at, float(epsilon))


def _advance(game: Game, x: np.ndarray, params: LearnerParams, n_steps: int) -> np.ndarray:
    for t in range(n_steps):
        try:
            x = step(game, x, params)
        except BoundaryError as exc:
            exc.step = t + 1
            raise
    return x


def _zero_sum_basis(m: int) -> np.ndarray:
    """(M, M-1) orthonormal basis of the zero-sum subspace (Helmert vectors)."""
    basis = np.zeros((m, m - 1))
    for k in range(1, m):
        basis[:k, k - 1] = 1.0
        basis[k, k - 1] = -float(k)
        basis[:, k - 1] /= np.sqrt(k * (k + 1.0))
    return basis


@dataclass
class JacobianTensor:
    """Derivative of the learning map at one profile.

    `entries[i,s,a,j,r,b]` is the derivative of f[i,s,a] along the simplex
    direction that adds mass to action b of agent j in state r (and removes
    it from that agent's other actions), per the coordinate convention above.
    `nondifferentiable` marks an argmax tie (Q learner) at tolerance 1e-12,
    where only a one-sided derivative exists; `paper_convention` marks M > 2
    games, where the convention's directions are not simplex-tangent.
    """

    entries: np.ndarray
    nondifferentiable: bool = False
    paper_convention: bool = False

    def matrix(self) -> np.ndarray:
        """The full (N*Z*M) square matrix of directional derivatives."""
        d = self.entries.shape[0] * self.entries.shape[1] * self.entries.shape[2]
        return self.entries.reshape(d, d)

    def tangent_matrix(self) -> np.ndarray:
        """The linearization restricted to the simplex-tangent space.

        Because every coordinate direction doubles a tangent perturbation
        (the direction vectors satisfy sum_b w_b * u_b = 2w for zero-sum w),
        the tangent action of the map is (J @ E) / 2 expressed in an
        orthonormal zero-sum basis E per (agent, state) row. This is the
        operator whose products drive actual perturbation growth, hence the
        one used for Lyapunov exponents.
        """
        n, z, m = self.entries.shape[:3]
        if m < 2:
            raise ParameterError("single-action games have no tangent directions")
        basis = _zero_sum_basis(m)
        full = self.matrix().reshape(n * z, m, n * z, m)
        reduced = 0.5 * np.einsum("paqb,ak,bl->pkql", full, basis, basis)
        d = n * z * (m - 1)
        return reduced.reshape(d, d)


def jacobian(
    game: Game,
    x: np.ndarray,
    params: LearnerParams,
    gauge_offset: Optional[np.ndarray] = None,
) -> JacobianTensor:
    """Analytic Jacobian of the one-step learning map.

    `gauge_offset` (shape (N, Z)) adds a constant to each (agent, state) row
    of the drive term before exponentiation; the map and its derivative are
    invariant under it, and the hook exists to verify exactly that.
    """
    x = validate_profile(game, x)
    kind = params.kind
    if kind is not LearnerKind.AC:
        _require_interior(x, kind)

    n, z, m = game.n_agents, game.n_states, game.n_actions
    n_joint = game.n_joint_actions
    idx = game.agent_action_of_joint
    t_flat = game.flat_transitions
    tr = game.expected_reward_by_joint_action
    alpha, beta, gamma = params.alpha, params.beta, params.gamma
    scale = alpha * beta

    # --- shared quantities at the evaluation point ---------------------------
    p_excl = [joint_action_probs_excluding(game, x, i) for i in range(n)]
    probs = p_excl[0] * x[0][:, idx[0]]
    t_eff = np.einsum("za,zaw->zw", probs, t_flat)
    r_avg_s = np.einsum("za,nza->nz", probs, tr)

    eye = np.eye(z)
    minv = [np.linalg.inv(eye - gamma[i] * t_eff) for i in range(n)]
    values = np.stack([(1.0 - gamma[i]) * (minv[i] @ r_avg_s[i]) for i in range(n)])

    def sum_other(flat, agent):
        shaped = flat.reshape((m,) * n + flat.shape[1:])
        axes = tuple(k for k in range(n) if k != agent)
        return shaped.sum(axis=axes)

    t_cond = np.empty((n, z, m, z))
    r_avg_sa = np.empty((n, z, m))
    for i in range(n):
        for s in range(z):
            t_cond[i, s] = sum_other(p_excl[i][s][:, None] * t_flat[s], i)
            r_avg_sa[i, s] = sum_other(p_excl[i][s] * tr[i][s], i)

    q = np.stack(
        [
            (1.0 - gamma[i]) * r_avg_sa[i]
            + gamma[i] * (t_eff @ values[i])[:, None]
            for i in range(n)
        ]
    )

    nondiff = False
    if kind is LearnerKind.Q:
        argmax = q.argmax(axis=2)  # lowest index wins ties
        max_q = np.take_along_axis(q, argmax[:, :, None], axis=2)[:, :, 0]
        if m >= 2:
            top_two = np.sort(q, axis=2)[:, :, -2:]
            nondiff = bool(np.any(top_two[:, :, 1] - top_two[:, :, 0] < ARGMAX_TIE_TOL))
        estimate = max_q
    elif kind is LearnerKind.SARSA:
        v_bar = (x * q).sum(axis=2)
        estimate = v_bar
    else:
        estimate = values

    td_hat = np.stack(
        [
            (1.0 - gamma[i]) * r_avg_sa[i] + gamma[i] * (t_cond[i] @ estimate[i])
            for i in range(n)
        ]
    )
    if gauge_offset is not None:
        gauge_offset = np.asarray(gauge_offset, dtype=float)
        if gauge_offset.shape != (n, z):
            raise ParameterError(f"gauge_offset must have shape {(n, z)}, got {gauge_offset.shape}")
        td_hat = td_hat + gauge_offset[:, :, None]

    # Per-row max subtraction: rescales A and B identically, leaving the
    # quotient-rule result unchanged while keeping the exponentials bounded.
    shifted = scale[:, None, None] * td_hat
    shifted = shifted - shifted.max(axis=2, keepdims=True)
    w_exp = np.exp(shifted)
    if kind is LearnerKind.AC:
        a_tab = x * w_exp
    else:
        a_tab = x ** (1.0 - alpha)[:, None, None] * w_exp
        x_pow_neg = x ** (-alpha)[:, None, None]
        x_pow_pos = x ** (1.0 - alpha)[:, None, None]
    b_tab = a_tab.sum(axis=2)

    # product of everyone's probabilities except agents i and j, per state
    pair_excl = {}
    for j in range(n):
        for i in range(n):
            if i == j:
                continue
            out = np.ones((z, n_joint))
            for k in range(n):
                if k != i and k != j:
                    out = out * x[k][:, idx[k]]
            pair_excl[(i, j)] = out

    entries = np.zeros((n, z, m, n, z, m))
    direction = {b: 2.0 * (np.arange(m) == b) - 1.0 for b in range(m)}

    for j in range(n):
        dvec_by_b = [2.0 * (idx[j] == b) - 1.0 for b in range(m)]
        for r in range(z):
            for b in range(m):
                dvec = dvec_by_b[b]
                # derivative of the joint-action probabilities, nonzero at state r only
                dp_r = p_excl[j][r] * dvec
                dteff_r = dp_r @ t_flat[r]

                # per-agent derivative of the state values through the resolvent
                dv = np.empty((n, z))
                for i in range(n):
                    drs_val = dp_r @ tr[i][r]
                    row_fac = dteff_r @ minv[i]
                    dminv = gamma[i] * np.outer(minv[i][:, r], row_fac)
                    dv[i] = (1.0 - gamma[i]) * (dminv @ r_avg_s[i] + minv[i][:, r] * drs_val)

                for i in range(n):
                    gam = gamma[i]
                    # conditioned averages exclude agent i, so their derivative
                    # with respect to agent i's own coordinates vanishes
                    if i == j:
                        dtcond_r = np.zeros((m, z))
                        drsa = np.zeros((z, m))
                    else:
                        dpe_r = pair_excl[(i, j)][r] * dvec
                        dtcond_r = sum_other(dpe_r[:, None] * t_flat[r], i)
                        drsa = np.zeros((z, m))
                        drsa[r] = sum_other(dpe_r * tr[i][r], i)

                    def cond_contract(vec, dvec_states):
                        # d[t_cond[i] @ vec] with dtcond supported on state r
                        out = t_cond[i] @ dvec_states
                        out[r] += dtcond_r @ vec
                        return out

                    # dQ chains through the full-average transition matrix,
                    # whose derivative row lives at state r
                    dteff_v = t_eff @ dv[i]
                    dteff_v[r] += dteff_r @ values[i]
                    dq = (1.0 - gam) * drsa + gam * dteff_v[:, None]

                    if kind is LearnerKind.Q:
                        dmax_q = np.take_along_axis(dq, argmax[i][:, None], axis=1)[:, 0]
                        dtd = (1.0 - gam) * drsa + gam * cond_contract(max_q[i], dmax_q)
                    elif kind is LearnerKind.SARSA:
                        dv_bar = (x[i] * dq).sum(axis=1)
                        if i == j:
                            dv_bar[r] += direction[b] @ q[i][r]
                        dtd = (1.0 - gam) * drsa + gam * cond_contract(v_bar[i], dv_bar)
                    else:
                        dtd = (1.0 - gam) * drsa + gam * cond_contract(values[i], dv[i])

                    dx_self = np.zeros((z, m))
                    if i == j:
                        dx_self[r] = direction[b]

                    if kind is LearnerKind.AC:
                        da = w_exp[i] * (dx_self + scale[i] * x[i] * dtd)
                    else:
                        da = w_exp[i] * (
                            (1.0 - alpha[i]) * x_pow_neg[i] * dx_self
                            + scale[i] * x_pow_pos[i] * dtd
                        )
                    db = da.sum(axis=1)
                    entries[i, :, :, j, r, b] = (
                        da * b_tab[i][:, None] - db[:, None] * a_tab[i]
                    ) / b_tab[i][:, None] ** 2

    return JacobianTensor(entries, nondifferentiable=nondiff, paper_convention=m > 2)


def _qr_positive(w: np.ndarray):
    """QR factorization normalized to a positive diagonal of R."""
    q_mat, r_mat = np.linalg.qr(w)
    signs = np.sign(np.diag(r_mat))
    signs[signs == 0.0] = 1.0
    return q_mat * signs, np.diag(r_mat) * signs


@dataclass
class SpectrumResult:
    """Lyapunov exponents (nats per step), sorted descending."""

    exponents: np.ndarray
    steps_used: int
    transient_skipped: int

    @property
    def largest(self) -> float:
        return float(self.exponents[0])


def lyapunov_spectrum(
    game: Game,
    x0: np.ndarray,
    params: LearnerParams,
    steps: int,
    transient: int = 0,
) -> SpectrumResult:
    """Lyapunov spectrum along the trajectory from x0 after a transient.

    Propagates an orthonormal frame through the simplex-tangent linearization
    of the map, re-factorizing with QR at every step and averaging the log of
    the R diagonals; the spectrum has one exponent per tangent direction,
    N * Z * (M - 1) in total. The positive-diagonal convention makes the
    result deterministic for identical inputs.
    """
    if steps < 1:
        raise ParameterError(f"steps must be >= 1, got {steps}")
    if transient < 0:
        raise ParameterError(f"transient must be >= 0, got {transient}")
    x = validate_profile(game, x0)
    try:
        x = _advance(game, x, params, transient)
    except BoundaryError as exc:
        raise PartialSpectrumError(
            f"trajectory hit the simplex boundary during the transient: {exc}",
            steps_completed=0,
        ) from exc
    acc, _, _ = _accumulate_spectrum(game, x, params, steps)
    exponents = np.sort(acc / steps)[::-1]
    return SpectrumResult(exponents, steps, transient)


def _accumulate_spectrum(game, x, params, steps, record_profiles=False):
    dim = game.n_agents * game.n_states * (game.n_actions - 1)
    if dim < 1:
        raise ParameterError("single-action games have no tangent directions")
    q_mat = np.eye(dim)
    acc = np.zeros(dim)
    profiles = []
    for t in range(steps):
        if record_profiles:
            profiles.append(x)
        try:
            jac = jacobian(game, x, params)
            q_mat, r_diag = _qr_positive(jac.tangent_matrix() @ q_mat)
            with np.errstate(divide="ignore"):
                acc += np.log(np.abs(r_diag))
            x = step(game, x, params)
        except BoundaryError as exc:
            raise PartialSpectrumError(
                f"trajectory hit the simplex boundary after {t} spectrum steps: {exc}",
                steps_completed=t,
            ) from exc
    return acc, x, profiles


def count_distinct_profiles(profiles: np.ndarray, granularity: float = HASH_GRANULARITY) -> int:
    """Number of distinct visited profiles at the given rounding granularity."""
    arr = np.asarray(profiles, dtype=float)
    keys = np.round(arr / granularity).astype(np.int64).reshape(arr.shape[0], -1)
    return len({row.tobytes() for row in keys})


def orbit_is_periodic(profiles: np.ndarray, period: int, epsilon: float) -> bool:
    """Check that every recorded point recurs after `period` steps."""
    arr = np.asarray(profiles, dtype=float)
    if period < 1 or period >= arr.shape[0]:
        return False
    return bool(np.max(np.abs(arr[period:] - arr[:-period])) < epsilon)


@dataclass
class ScanBlock:
    """Result of one parameter value inside a bifurcation scan."""

    param_value: float
    profiles: Optional[np.ndarray]
    lyap_max: float
    distinct_profiles: Optional[int]
    error: Optional[str] = None


_SCAN_AXES = ("alpha", "beta", "gamma")


def bifurcation_scan(
    game: Game,
    x0: np.ndarray,
    params: LearnerParams,
    axis: str,
    values,
    record_steps: int,
    transient: int,
    jobs: int = 1,
) -> list[ScanBlock]:
    """Sweep one learner parameter, recording visited profiles per value.

    For each value: run `transient` unrecorded steps from x0, then record
    `record_steps` profiles while accumulating the Lyapunov spectrum over the
    same window. Failures for individual values are captured in-band so the
    scan always completes.
    """
    if axis not in _SCAN_AXES:
        raise ParameterError(f"scan axis must be one of {_SCAN_AXES}, got {axis!r}")
    x0 = validate_profile(game, x0)
    values = [float(v) for v in np.atleast_1d(values)]

    def run_one(value: float) -> ScanBlock:
        try:
            swept = replace(params, **{axis: per_agent(value, params.n_agents)})
            x = _advance(game, x0, params=swept, n_steps=transient)
            acc, _, profiles = _accumulate_spectrum(
                game, x, swept, record_steps, record_profiles=True
            )
            profiles = np.array(profiles)
            lyap_max = float(np.max(acc) / record_steps)
            return ScanBlock(
                param_value=value,
                profiles=profiles,
                lyap_max=lyap_max,
                distinct_profiles=count_distinct_profiles(profiles),
            )
        except Exception as exc:  # recorded in-band; the scan must continue
            return ScanBlock(
                param_value=value,
                profiles=None,
                lyap_max=float("nan"),
                distinct_profiles=None,
                error=f"{type(exc).__name__}: {exc}",
            )

    if jobs > 1 and len(values) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run_one, values))
    return [run_one(v) for v in values]
