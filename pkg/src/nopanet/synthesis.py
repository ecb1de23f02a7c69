"""
Factor a 6x6 unitary into 15 two-level unitaries and map them to optical devices.

The elimination follows a permutation ``P = (p1, ..., p6)`` of the ports: a
factor of type ``k`` acts on ports ``(p_k, p_{k+1})``. Round ``r`` (0-based)
clears column ``p_{r+1}`` by walking the chain ``p6 -> p5 -> ... -> p_{r+1}``
with types ``5, 4, ..., r+1``; the last factor absorbs whatever 2x2 block
remains. The network equals the left-to-right product ``F1 F2 ... F15``.

For a real orthogonal network every factor comes out in beamsplitter form
``[[a, b], [-b, a]]`` (or one of its degenerate cases); complex networks
yield SU(2) blocks classified as ``general``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from functools import reduce

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import StabilityWarning
from .network import N_PORTS, NopaParams, PassiveNetwork, build_state_space, stability_check
from .spectra import SqueezingReport, two_mode_squeezing

CLASSIFY_TOL = 1e-9
N_FACTORS = N_PORTS * (N_PORTS - 1) // 2

LEFT_TO_RIGHT = "left-to-right"
RIGHT_TO_LEFT = "right-to-left"


class FactorKind(str, enum.Enum):
    IDENTITY = "identity"
    SWAP_LIKE = "swap_like"
    PHASE_LIKE = "phase_like"
    BEAMSPLITTER = "beamsplitter"
    GENERAL = "general"


@dataclass(frozen=True)
class PermutationVector:
    """Port ordering for the elimination, 1-based."""

    p: tuple[int, ...] = (6, 5, 4, 3, 2, 1)

    def __post_init__(self) -> None:
        p = tuple(int(i) for i in self.p)
        if sorted(p) != list(range(1, N_PORTS + 1)):
            raise ValueError(f"{p} is not a permutation of 1..{N_PORTS}")
        object.__setattr__(self, "p", p)

    @classmethod
    def parse(cls, text: str) -> PermutationVector:
        return cls(tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok))

    def pair(self, k: int) -> tuple[int, int]:
        """Ports ``(p_k, p_{k+1})`` of a type-``k`` factor (1-based ``k``)."""
        return self.p[k - 1], self.p[k]


@dataclass(frozen=True, eq=False)
class TwoLevelFactor:
    """
    Identity except for the 2x2 ``block`` on ports ``i < j`` (1-based).

    ``alpha`` and ``beta`` are set for beamsplitter factors only.
    """

    i: int
    j: int
    block: NDArray[np.complex128]
    kind: FactorKind = FactorKind.GENERAL
    alpha: float | None = None
    beta: float | None = None

    def matrix(self, n: int = N_PORTS) -> NDArray[np.complex128]:
        m = np.eye(n, dtype=complex)
        idx = [self.i - 1, self.j - 1]
        m[np.ix_(idx, idx)] = self.block
        return m


@dataclass(frozen=True, eq=False)
class SynthesisReport:
    factors: list[TwoLevelFactor]
    product_order: str = LEFT_TO_RIGHT
    reconstruction_error: float = 0.0
    perm: PermutationVector = field(default_factory=PermutationVector)

    def beamsplitters(self) -> list[tuple[int, TwoLevelFactor]]:
        """(1-based slot, factor) for every beamsplitter factor."""
        return [(k + 1, f) for k, f in enumerate(self.factors) if f.kind is FactorKind.BEAMSPLITTER]


def classify_block(block: ArrayLike, tol: float = CLASSIFY_TOL) -> tuple[FactorKind, float | None, float | None]:
    """Return ``(kind, alpha, beta)``; alpha/beta are None unless kind is beamsplitter."""
    b = np.asarray(block, dtype=complex)
    if np.abs(b - np.eye(2)).max() <= tol:
        return FactorKind.IDENTITY, None, None
    real = np.abs(b.imag).max() <= tol
    if real:
        r = b.real
        if abs(r[0, 0]) <= tol and abs(r[1, 1]) <= tol and np.all(np.abs(np.abs(r[[0, 1], [1, 0]]) - 1) <= tol):
            return FactorKind.SWAP_LIKE, None, None
    if abs(b[0, 1]) <= tol and abs(b[1, 0]) <= tol and np.all(np.abs(np.abs(np.diag(b)) - 1) <= tol):
        return FactorKind.PHASE_LIKE, None, None
    if real:
        r = b.real
        alpha, beta = r[0, 0], r[0, 1]
        if abs(r[1, 1] - alpha) <= tol and abs(r[1, 0] + beta) <= tol and abs(alpha**2 + beta**2 - 1) <= tol:
            return FactorKind.BEAMSPLITTER, float(alpha), float(beta)
    return FactorKind.GENERAL, None, None


def classify(factor: TwoLevelFactor | ArrayLike, tol: float = CLASSIFY_TOL) -> FactorKind:
    """
    Device type of a factor, by precedence
    identity > swap_like > phase_like > beamsplitter > general.
    """
    block = factor.block if isinstance(factor, TwoLevelFactor) else factor
    return classify_block(block, tol)[0]


def make_factor(i: int, j: int, block: ArrayLike) -> TwoLevelFactor:
    """Build a factor on ports ``i, j`` (any order) with its classification filled in."""
    block = np.asarray(block, dtype=complex)
    if i > j:
        i, j = j, i
        block = block[::-1, ::-1]
    if i == j or not (1 <= i and j <= N_PORTS):
        raise ValueError(f"invalid port pair ({i}, {j})")
    kind, alpha, beta = classify_block(block)
    return TwoLevelFactor(i=i, j=j, block=np.array(block), kind=kind, alpha=alpha, beta=beta)


def _product(matrices: list[NDArray], order: str) -> NDArray:
    if order == RIGHT_TO_LEFT:
        matrices = matrices[::-1]
    elif order != LEFT_TO_RIGHT:
        raise ValueError(f"unknown product order {order!r}")
    return reduce(np.matmul, matrices, np.eye(N_PORTS, dtype=complex))


def reconstruct(factors: list[TwoLevelFactor], order: str = LEFT_TO_RIGHT) -> PassiveNetwork:
    """Ordered product of the embedded factors (``F1 F2 ...`` for left-to-right)."""
    return PassiveNetwork(_product([f.matrix() for f in factors], order))


def decompose(net: PassiveNetwork | ArrayLike, perm: PermutationVector | None = None) -> SynthesisReport:
    """Factor ``net`` into 15 two-level unitaries following ``perm``."""
    if not isinstance(net, PassiveNetwork):
        net = PassiveNetwork(np.asarray(net))
    perm = perm or PermutationVector()
    p = [i - 1 for i in perm.p]
    n = N_PORTS

    t = np.array(net.entries, dtype=complex)
    factors: list[TwoLevelFactor] = []
    for r in range(n - 1):
        col = p[r]
        for k in range(n - 2, r - 1, -1):
            # factor of type k+1 on (p_{k+1}, p_{k+2}): move weight of row p_{k+2} into row p_{k+1}
            gone, keep = p[k + 1], p[k]
            idx = [gone, keep]
            if r == n - 2:
                f = t[np.ix_(idx, idx)].copy()
            else:
                xa, xb = t[gone, col], t[keep, col]
                norm = math.hypot(abs(xa), abs(xb))
                if norm == 0.0:
                    f = np.eye(2, dtype=complex)
                else:
                    # f* maps (xa, xb) to (0, norm)
                    f = np.array([[np.conj(xb), xa], [-np.conj(xa), xb]]) / norm
            t[idx, :] = f.conj().T @ t[idx, :]
            factors.append(make_factor(gone + 1, keep + 1, f))

    err = float(np.linalg.norm(_product([f.matrix() for f in factors], LEFT_TO_RIGHT) - net.entries))
    return SynthesisReport(factors=factors, product_order=LEFT_TO_RIGHT, reconstruction_error=err, perm=perm)


def round_half_away(x: float, digits: int) -> float:
    """Round to ``digits`` decimals with ties away from zero (0.125 -> 0.13)."""
    return float(Decimal(repr(float(x))).quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_UP))


def quantize_factors(factors: list[TwoLevelFactor], digits: int | None) -> list[TwoLevelFactor]:
    """
    Round every beamsplitter transmission ``alpha`` to ``digits`` decimals and
    recompute ``beta = sign(beta) sqrt(1 - alpha^2)``. Other factors are kept.
    """
    if digits is None:
        return list(factors)
    if digits < 0:
        raise ValueError("digits must be >= 0")
    out = []
    for f in factors:
        if f.kind is not FactorKind.BEAMSPLITTER:
            out.append(f)
            continue
        alpha = round_half_away(f.alpha, digits)
        beta = math.copysign(math.sqrt(max(0.0, 1.0 - alpha * alpha)), f.beta)
        out.append(make_factor(f.i, f.j, np.array([[alpha, beta], [-beta, alpha]])))
    return out


def quantize_sensitivity(
    report: SynthesisReport, digits: int | None, params: NopaParams
) -> SqueezingReport:
    """
    Squeezing at omega = 0 of the network rebuilt from rounded beamsplitters.

    ``digits=None`` skips rounding. A :class:`StabilityWarning` is emitted if
    the rounded network is not strictly stable, since V(0) is then formal only.
    """
    net = reconstruct(quantize_factors(report.factors, digits), report.product_order)
    ss = build_state_space(net, params)
    stab = stability_check(ss)
    if not stab.hurwitz:
        warnings.warn(
            f"rounded network is not stable (max Re eig(A) = {stab.max_re_eig:.3e} gamma_ref)",
            StabilityWarning,
            stacklevel=2,
        )
    return two_mode_squeezing(ss, 0.0)
