"""
Transfer functions and two-mode squeezing spectra of the closed-loop network.

``V+`` is the spectrum of ``q_out1 + q_out2`` and ``V-`` that of
``p_out1 - p_out2`` (after optional phase rotations of the two outputs).
Both are traces of ``H_j* H_j`` for the selected rows of the transfer
matrix, and ``V = V+ + V- < 4`` certifies EPR entanglement.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from .errors import ResonanceWarning, ResonantFrequency
from .network import SINGULAR_TOL, NopaParams, PassiveNetwork, StateSpace, build_state_space

VACUUM_LEVEL = 4.0
# V must clear the vacuum level by this relative margin; roundoff alone puts vacuum at 4 - 1e-15
ENTANGLEMENT_MARGIN = 1e-9


@dataclass(frozen=True)
class SelectorPair:
    """Rows picking the q-sum (``e1``) and p-difference (``e2``) of the two outputs."""

    e1: NDArray[np.float64]
    e2: NDArray[np.float64]

    @property
    def m12(self) -> NDArray[np.float64]:
        """``e1^T e1 + e2^T e2``, so that ``V = Tr[H* M12 H]``."""
        return np.outer(self.e1, self.e1) + np.outer(self.e2, self.e2)


@dataclass(frozen=True)
class SqueezingReport:
    omega: float
    v_plus: float
    v_minus: float
    v_total: float
    db: float
    entangled: bool
    psi1: float = 0.0
    psi2: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> SqueezingReport:
        return cls(
            omega=float(data["omega"]),
            v_plus=float(data["v_plus"]),
            v_minus=float(data["v_minus"]),
            v_total=float(data["v_total"]),
            db=float(data["db"]),
            entangled=bool(data["entangled"]),
            psi1=float(data.get("psi1", 0.0)),
            psi2=float(data.get("psi2", 0.0)),
        )


def selectors(psi1: float = 0.0, psi2: float = 0.0) -> SelectorPair:
    """
    Selector rows for the outputs rotated by ``exp(i psi1)`` and ``exp(i psi2)``.

    A rotation by ``psi`` maps quadratures as ``q' = cos(psi) q - sin(psi) p``,
    ``p' = sin(psi) q + cos(psi) p``.
    """
    c1, s1 = math.cos(psi1), math.sin(psi1)
    c2, s2 = math.cos(psi2), math.sin(psi2)
    return SelectorPair(
        e1=np.array([c1, -s1, c2, -s2]),
        e2=np.array([s1, c1, -s2, -c2]),
    )


def transfer_matrix(ss: StateSpace, omega: float) -> NDArray:
    """
    ``H(i omega) = C (i omega I - A)^-1 B + D`` with ``omega`` in rad/s.

    Returns a real array at ``omega == 0`` and a complex one otherwise.
    """
    a = ss.A
    w = omega / ss.rate_unit
    if w == 0:
        m = -a
    else:
        m = 1j * w * np.eye(a.shape[0]) - a
    sv = np.linalg.svd(m, compute_uv=False)
    scale = max(np.linalg.norm(a, 2), 1.0)
    if sv[-1] <= SINGULAR_TOL * scale:
        raise ResonantFrequency(omega)
    lu = scipy.linalg.lu_factor(m, check_finite=False)
    return ss.C @ scipy.linalg.lu_solve(lu, ss.B, check_finite=False) + ss.D


def _report(h: NDArray, omega: float, psi1: float, psi2: float) -> SqueezingReport:
    sel = selectors(psi1, psi2)
    v_plus = float(np.sum(np.abs(sel.e1 @ h) ** 2))
    v_minus = float(np.sum(np.abs(sel.e2 @ h) ** 2))
    v_total = v_plus + v_minus
    db = 10.0 * math.log10(v_total) if v_total > 0 else -math.inf
    return SqueezingReport(
        omega=float(omega),
        v_plus=v_plus,
        v_minus=v_minus,
        v_total=v_total,
        db=db,
        entangled=v_total < VACUUM_LEVEL * (1.0 - ENTANGLEMENT_MARGIN),
        psi1=float(psi1),
        psi2=float(psi2),
    )


def two_mode_squeezing(ss: StateSpace, omega: float = 0.0, psi1: float = 0.0, psi2: float = 0.0) -> SqueezingReport:
    """Two-mode squeezing spectra at one frequency (rad/s)."""
    return _report(transfer_matrix(ss, omega), omega, psi1, psi2)


def squeezing_v0(net: PassiveNetwork | ArrayLike, params: NopaParams) -> float:
    """``V(0; S~)`` with ``psi1 = psi2 = 0``. Accepts a raw (possibly non-unitary) matrix."""
    return two_mode_squeezing(build_state_space(net, params)).v_total


def sweep_spectrum(
    ss: StateSpace, omega_max: float, points: int, psi1: float = 0.0, psi2: float = 0.0
) -> list[SqueezingReport]:
    """
    Squeezing at ``points`` evenly spaced frequencies in ``[0, omega_max]``.

    ``V(i omega) = V(-i omega)`` for a real system, so negative frequencies
    are not swept. Resonant frequencies are skipped with a
    :class:`ResonanceWarning`.
    """
    if points < 2:
        raise ValueError(f"a sweep needs at least 2 points, got {points}")
    if not omega_max > 0:
        raise ValueError(f"omega_max must be > 0, got {omega_max}")
    reports = []
    for omega in np.linspace(0.0, omega_max, points):
        try:
            reports.append(two_mode_squeezing(ss, float(omega), psi1, psi2))
        except ResonantFrequency:
            warnings.warn(f"skipping resonant frequency omega = {omega:g} rad/s", ResonanceWarning, stacklevel=2)
    return reports
