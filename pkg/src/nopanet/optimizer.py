"""
Modified steepest descent of ``V(0; S~)`` over the 6x6 unitary group.

The Euclidean gradient ``D`` satisfies
``V(S~ + dS) = V(S~) + Re Tr[dS* D] + O(|dS|^2)``; the descent direction
``Z = S~ D* S~ - D`` is tangent to the unitary group and iterates are pulled
back onto it by the SVD retraction. Step sizes follow an Armijo-style
doubling/halving rule, and every accepted iterate keeps the closed loop
well-posed and strictly stable.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import IllPosedFeedback, InfeasiblePoint, InfeasibleStart, RankDeficient
from .network import (
    K,
    N_EXT,
    N_STATE,
    SINGULAR_TOL,
    NopaParams,
    PassiveNetwork,
    build_state_space,
)
from .spectra import selectors

logger = logging.getLogger(__name__)

RANK_TOL = 1e-12
# max Re eig(A) must sit below -HURWITZ_MARGIN (units of gamma_ref); V(0) is meaningless at the boundary
HURWITZ_MARGIN = 1e-12

_E4 = np.vstack([np.eye(N_EXT), np.zeros((N_STATE, N_EXT))])  # 12x4
_E8 = np.vstack([np.zeros((N_EXT, N_STATE)), np.eye(N_STATE)])  # 12x8
_M12 = selectors(0.0, 0.0).m12


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERS = "MaxIters"
    STEP_UNDERFLOW = "StepUnderflow"


@dataclass(frozen=True, eq=False)
class GradientMatrix:
    d: NDArray[np.complex128]
    operator_norm: float


@dataclass(frozen=True)
class OptimizerConfig:
    tol: float = 1e-3
    rho0: float = 1.0
    max_iters: int = 10000
    rho_min: float = 1e-15

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if not self.rho0 > 0:
            raise ValueError("rho0 must be > 0")
        if not self.rho_min < self.rho0:
            raise ValueError("rho_min must be smaller than rho0")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")


@dataclass(frozen=True)
class IterationRecord:
    """
    State at one accepted iterate.

    ``rho`` is the step size that produced this iterate (``rho0`` for the
    starting point) and is carried into the next line search.
    ``feasibility_rejections`` counts infeasible trial points met on the way.
    """

    iter: int
    v0: float
    db: float
    z_norm: float
    rho: float
    feasibility_rejections: int


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    network: PassiveNetwork
    trace: list[IterationRecord] = field(default_factory=list)
    status: Status = Status.CONVERGED

    @property
    def v0(self) -> float:
        return self.trace[-1].v0

    @property
    def db(self) -> float:
        return self.trace[-1].db


def _as_matrix(net: PassiveNetwork | ArrayLike) -> NDArray[np.complex128]:
    if isinstance(net, PassiveNetwork):
        return net.entries
    return np.asarray(net, dtype=complex)


def _db(v: float) -> float:
    return 10.0 * math.log10(v) if v > 0 else -math.inf


def euclidean_gradient(net: PassiveNetwork | ArrayLike, params: NopaParams) -> GradientMatrix:
    """
    Euclidean gradient of ``V(0; S~)`` with respect to the complex matrix ``S~``.

    The first-order change of ``V`` in the quadrature form is ``2 Tr[N dS]``;
    mapping ``dS = Re(K dS~ K*)`` back gives ``D = 2 K* N^T K``.
    """
    s_tilde = _as_matrix(net)
    try:
        ss = build_state_space(s_tilde, params)
    except IllPosedFeedback as exc:
        raise InfeasiblePoint(str(exc)) from exc
    a, b, c, x = ss.A, ss.B, ss.C, ss.X
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[-1] <= SINGULAR_TOL * sv[0]:
        raise InfeasiblePoint("drift matrix A is singular")

    s = ss.quad
    s12, s21 = s[:N_EXT, N_EXT:], s[N_EXT:, :N_EXT]
    sqrt_g = math.sqrt(params.normalized()[0])

    a_inv_b = np.linalg.solve(a, b)
    h = ss.D - c @ a_inv_b
    m = h.T @ _M12  # 12x4

    left = _E4 @ _E4.T @ m + _E8 @ x @ s21 @ _E4.T @ m - sqrt_g * _E8 @ x @ a_inv_b @ m
    c_a_inv = np.linalg.solve(a.T, c.T).T
    right = _E4.T + s12 @ x @ _E8.T + sqrt_g * c_a_inv @ x @ _E8.T
    n = left @ right
    d = 2.0 * K.conj().T @ n.T @ K
    return GradientMatrix(d=d, operator_norm=float(np.linalg.norm(d, 2)))


def descent_direction(net: PassiveNetwork | ArrayLike, grad: GradientMatrix | ArrayLike) -> NDArray[np.complex128]:
    """``Z = S~ D* S~ - D``."""
    s = _as_matrix(net)
    d = grad.d if isinstance(grad, GradientMatrix) else np.asarray(grad, dtype=complex)
    return s @ d.conj().T @ s - d


def inner_product(net: PassiveNetwork | ArrayLike, z1: ArrayLike, z2: ArrayLike) -> float:
    """Canonical metric ``Re Tr[z1* (I - S~ S~*/2) z2]``; ``|z|_F^2 / 2`` at unitary points."""
    s = _as_matrix(net)
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    proj = np.eye(s.shape[0]) - 0.5 * s @ s.conj().T
    return float(np.real(np.trace(z1.conj().T @ proj @ z2)))


def _retract_matrix(x: ArrayLike) -> NDArray[np.complex128]:
    u, sv, vh = np.linalg.svd(np.asarray(x, dtype=complex))
    if sv[-1] <= RANK_TOL:
        raise RankDeficient(f"smallest singular value {sv[-1]:.3e} <= {RANK_TOL:g}")
    return u @ vh


def retract(x: ArrayLike) -> PassiveNetwork:
    """Nearest unitary to ``x`` (``U V*`` from ``x = U S V*``)."""
    return PassiveNetwork(_retract_matrix(x))


def _feasible_v0(s_tilde: NDArray, params: NopaParams) -> float | None:
    """V(0) at a trial point, or None when the point fails the feasibility guard."""
    try:
        ss = build_state_space(s_tilde, params)
    except IllPosedFeedback:
        return None
    a = ss.A
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[-1] <= SINGULAR_TOL * sv[0]:
        return None
    if np.max(np.linalg.eigvals(a).real) >= -HURWITZ_MARGIN:
        return None
    h = ss.D - ss.C @ np.linalg.solve(a, ss.B)
    return float(np.real(np.trace(h.T @ _M12 @ h)))


def feasible(net: PassiveNetwork | ArrayLike, params: NopaParams) -> bool:
    """Well-posed feedback, invertible A and strictly Hurwitz A."""
    return _feasible_v0(_as_matrix(net), params) is not None


def optimize(
    init: PassiveNetwork | ArrayLike,
    params: NopaParams,
    cfg: OptimizerConfig | None = None,
    callback: Callable[[IterationRecord, NDArray[np.complex128]], None] | None = None,
) -> OptimizationResult:
    """
    Locally minimise ``V(0; S~)`` over unitary ``S~`` starting from ``init``.

    Each iteration computes ``Z`` and stops once ``sqrt(<Z, Z>) < cfg.tol``.
    Otherwise the step size is doubled while ``pi(S~ + 2 rho Z)`` is feasible
    and decreases ``V`` by at least ``rho <Z, Z>``, then halved until
    ``pi(S~ + rho Z)`` is feasible and decreases ``V`` by at least
    ``rho <Z, Z> / 2``; that point is accepted. ``rho`` carries over between
    iterations. The run ends with ``StepUnderflow`` if ``rho`` drops below
    ``cfg.rho_min`` and with ``MaxIters`` after ``cfg.max_iters`` accepted
    steps.

    ``callback(record, S~)`` is invoked for every accepted iterate, including
    the start.
    """
    cfg = cfg or OptimizerConfig()
    s = _as_matrix(init).copy()
    v = _feasible_v0(s, params)
    if v is None:
        raise InfeasibleStart("initial network fails the feasibility guard")

    rho = cfg.rho0
    rejections = 0
    trace: list[IterationRecord] = []
    status = Status.MAX_ITERS
    k = 0
    while True:
        d = euclidean_gradient(s, params).d
        z = s @ d.conj().T @ s - d
        zz = inner_product(s, z, z)
        record = IterationRecord(k, v, _db(v), math.sqrt(max(zz, 0.0)), rho, rejections)
        trace.append(record)
        if callback is not None:
            callback(record, s)
        logger.debug("iter %d: V=%.6e (%.3f dB) |Z|=%.3e rho=%.3e", k, v, record.db, record.z_norm, rho)

        if record.z_norm < cfg.tol:
            status = Status.CONVERGED
            break
        if k >= cfg.max_iters:
            status = Status.MAX_ITERS
            break

        rejections = 0
        while True:
            v1 = _trial(s + 2.0 * rho * z, params)
            if v1 is None:
                rejections += 1
                break
            if v - v1[1] >= rho * zz:
                rho *= 2.0
            else:
                break

        accepted = None
        while rho >= cfg.rho_min:
            trial = _trial(s + rho * z, params)
            if trial is None:
                rejections += 1
            elif v - trial[1] >= 0.5 * rho * zz:
                accepted = trial
                break
            rho *= 0.5
        if accepted is None:
            status = Status.STEP_UNDERFLOW
            logger.info("step size underflow at iteration %d (rho < %g)", k, cfg.rho_min)
            break
        s, v = accepted
        k += 1

    return OptimizationResult(network=PassiveNetwork(s, label="optimized"), trace=trace, status=status)


def _trial(x: NDArray, params: NopaParams) -> tuple[NDArray, float] | None:
    try:
        s = _retract_matrix(x)
    except RankDeficient:
        return None
    v = _feasible_v0(s, params)
    return None if v is None else (s, v)
