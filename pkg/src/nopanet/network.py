"""
Passive network and NOPA parameter types, and the closed-loop state-space model.

Two identical NOPAs sit in a coherent feedback loop with a static passive
network described by a 6x6 complex unitary scattering matrix. The network's
ports are ordered

    outputs: (xi_out1, xi_out2, xi_in_a1, xi_in_b1, xi_in_a2, xi_in_b2)
    inputs:  (xi_in1,  xi_in2,  xi_out_a1, xi_out_b1, xi_out_a2, xi_out_b2)

and every field is represented by its (q, p) quadrature pair, so the real
quadrature form of the network is 12x12. The closed-loop state is
``z = (a1_q, a1_p, b1_q, b1_p, a2_q, a2_p, b2_q, b2_p)``, the external input
is ``(xi_in1, xi_in2, loss fields)`` (12 quadratures) and the output is
``(xi_out1, xi_out2)`` (4 quadratures).

Rates are normalised by ``gamma_ref`` before the drift matrix is formed, so
``StateSpace.A`` is O(1). Multiply by ``StateSpace.rate_unit`` to get 1/s.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import IllPosedFeedback, NonSymplecticInput, NonUnitaryInput, UnitarityWarning

N_PORTS = 6
N_QUAD = 2 * N_PORTS
N_STATE = 8
N_EXT = 4

GAMMA_REF_HZ = 7.2e7

UNITARY_TOL = 1e-10
REPROJECT_TOL = 1e-6
STRUCTURE_TOL = 1e-10
SINGULAR_TOL = 1e-10

# complex mode -> (q, p) quadratures: [q; p] = K a + conj(K) conj(a)
K = np.kron(np.eye(N_PORTS), np.array([[1.0], [-1.0j]]))
J_N = np.kron(np.eye(N_PORTS), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def unitarity_residual(u: ArrayLike) -> float:
    """Frobenius residual ``max(|U*U - I|, |UU* - I|)``."""
    u = np.asarray(u)
    eye = np.eye(u.shape[0])
    return float(
        max(
            np.linalg.norm(u.conj().T @ u - eye),
            np.linalg.norm(u @ u.conj().T - eye),
        )
    )


def nearest_unitary(x: ArrayLike) -> NDArray[np.complex128]:
    """Polar factor ``U V*`` of ``x = U S V*``; the closest unitary in Frobenius norm."""
    u, _, vh = np.linalg.svd(np.asarray(x, dtype=complex))
    return u @ vh


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class PassiveNetwork:
    """
    A static passive linear network as a 6x6 complex unitary matrix.

    Inputs whose unitarity residual lies in ``(1e-10, 1e-6]`` are snapped to the
    nearest unitary with a :class:`UnitarityWarning` (file round trips lose
    digits); anything further off raises :class:`NonUnitaryInput`.
    """

    entries: NDArray[np.complex128]
    label: str | None = None

    def __post_init__(self) -> None:
        m = np.asarray(self.entries, dtype=complex)
        if m.shape != (N_PORTS, N_PORTS):
            raise NonUnitaryInput(f"expected a {N_PORTS}x{N_PORTS} matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise NonUnitaryInput("matrix contains non-finite entries")
        res = unitarity_residual(m)
        if res > REPROJECT_TOL:
            raise NonUnitaryInput(f"unitarity residual {res:.3e} exceeds {REPROJECT_TOL:g}")
        if res > UNITARY_TOL:
            warnings.warn(
                f"unitarity residual {res:.3e} > {UNITARY_TOL:g}; re-projecting onto the nearest unitary",
                UnitarityWarning,
                stacklevel=3,
            )
            m = nearest_unitary(m)
        object.__setattr__(self, "entries", _readonly(m))

    @property
    def residual(self) -> float:
        return unitarity_residual(self.entries)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True, eq=False)
class QuadratureNetwork:
    """Real 12x12 quadrature form of a passive network, with its feedback partitions."""

    entries: NDArray[np.float64]

    def __post_init__(self) -> None:
        s = np.asarray(self.entries)
        if s.shape != (N_QUAD, N_QUAD):
            raise NonSymplecticInput(f"expected a {N_QUAD}x{N_QUAD} matrix, got shape {s.shape}")
        if np.iscomplexobj(s):
            if np.abs(s.imag).max() > STRUCTURE_TOL:
                raise NonSymplecticInput("quadrature matrix must be real")
            s = s.real
        s = s.astype(float)
        orth = orthogonality_residual(s)
        symp = symplectic_residual(s)
        if orth > STRUCTURE_TOL or symp > STRUCTURE_TOL:
            raise NonSymplecticInput(
                f"orthogonality residual {orth:.3e}, symplectic residual {symp:.3e} (tolerance {STRUCTURE_TOL:g})"
            )
        object.__setattr__(self, "entries", _readonly(s))

    @property
    def s11(self) -> NDArray[np.float64]:
        return self.entries[:N_EXT, :N_EXT]

    @property
    def s12(self) -> NDArray[np.float64]:
        return self.entries[:N_EXT, N_EXT:]

    @property
    def s21(self) -> NDArray[np.float64]:
        return self.entries[N_EXT:, :N_EXT]

    @property
    def s22(self) -> NDArray[np.float64]:
        return self.entries[N_EXT:, N_EXT:]

    @classmethod
    def from_blocks(cls, s11, s12, s21, s22) -> QuadratureNetwork:
        return cls(np.block([[s11, s12], [s21, s22]]))


def orthogonality_residual(s: ArrayLike) -> float:
    s = np.asarray(s)
    return float(np.linalg.norm(s.T @ s - np.eye(s.shape[0])))


def symplectic_residual(s: ArrayLike) -> float:
    s = np.asarray(s)
    return float(np.linalg.norm(s @ J_N @ s.T - J_N))


@dataclass(frozen=True)
class NopaParams:
    """
    NOPA coupling constants in Hz.

    Use :meth:`relative` to give the rates as multiples of ``gamma_ref``.
    """

    gamma: float
    kappa: float = 0.0
    epsilon: float = 0.0
    gamma_ref: float = GAMMA_REF_HZ

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if not self.kappa >= 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if not self.gamma_ref > 0:
            raise ValueError(f"gamma_ref must be > 0, got {self.gamma_ref}")

    @classmethod
    def relative(
        cls, gamma: float = 1.0, kappa: float = 0.0, epsilon: float = 0.4, gamma_ref: float = GAMMA_REF_HZ
    ) -> NopaParams:
        return cls(gamma * gamma_ref, kappa * gamma_ref, epsilon * gamma_ref, gamma_ref)

    def normalized(self) -> tuple[float, float, float]:
        """(gamma, kappa, epsilon) in units of ``gamma_ref``."""
        r = self.gamma_ref
        return self.gamma / r, self.kappa / r, self.epsilon / r


REFERENCE_PARAMS = NopaParams.relative(gamma=1.0, kappa=0.0, epsilon=0.4)


@dataclass(frozen=True, eq=False)
class StateSpace:
    """
    Closed-loop model ``dz = A z + B xi``, ``xi_o = C z + D xi``.

    ``A`` and ``R`` are in units of ``rate_unit`` (Hz); ``B`` and ``C`` in
    units of ``sqrt(rate_unit)``. ``X = (I - S22)^-1`` is the feedback
    resolvent.
    """

    A: NDArray[np.float64]
    B: NDArray[np.float64]
    C: NDArray[np.float64]
    D: NDArray[np.float64]
    R: NDArray[np.float64]
    X: NDArray[np.float64]
    rate_unit: float = GAMMA_REF_HZ
    quad: NDArray[np.float64] = field(default=None, repr=False)


@dataclass(frozen=True)
class StabilityReport:
    max_re_eig: float
    hurwitz: bool
    a_invertible: bool


def quadrature_matrix(s_tilde: ArrayLike) -> NDArray[np.float64]:
    """Real quadrature form ``1/2 K S K* + 1/2 conj(K) conj(S) K^T``; no validation."""
    s_tilde = np.asarray(s_tilde, dtype=complex)
    # second term is the complex conjugate of the first
    return (K @ s_tilde @ K.conj().T).real


def quadrature_form(net: PassiveNetwork | ArrayLike) -> QuadratureNetwork:
    """Map a unitary scattering matrix to its orthogonal, symplectic quadrature form."""
    if not isinstance(net, PassiveNetwork):
        net = PassiveNetwork(np.asarray(net))
    return QuadratureNetwork(quadrature_matrix(net.entries))


def complex_form(qnet: QuadratureNetwork | ArrayLike, label: str | None = None) -> PassiveNetwork:
    """Inverse of :func:`quadrature_form`: ``S~ = 1/2 K* S K``."""
    if not isinstance(qnet, QuadratureNetwork):
        qnet = QuadratureNetwork(np.asarray(qnet))
    return PassiveNetwork(0.5 * K.conj().T @ qnet.entries @ K, label=label)


def drift_core(gamma: float, kappa: float, epsilon: float) -> NDArray[np.float64]:
    """Uncoupled two-NOPA drift ``R`` for the quadrature ordering of ``z``."""
    r = -(gamma + kappa) / 2.0 * np.eye(N_STATE)
    for o in (0, 4):
        r[o, o + 2] = r[o + 2, o] = epsilon / 2.0
        r[o + 1, o + 3] = r[o + 3, o + 1] = -epsilon / 2.0
    return r


def smallest_singular_value(m: ArrayLike) -> float:
    return float(np.linalg.svd(np.asarray(m), compute_uv=False)[-1])


def build_state_space(net: PassiveNetwork | ArrayLike, params: NopaParams) -> StateSpace:
    """
    Assemble the closed-loop (A, B, C, D) model of the dual-NOPA network.

    ``net`` may be a raw 6x6 array, in which case it is used without a
    unitarity check (needed for finite differences off the manifold).
    """
    s_tilde = net.entries if isinstance(net, PassiveNetwork) else np.asarray(net, dtype=complex)
    s = quadrature_matrix(s_tilde)
    s11, s12 = s[:N_EXT, :N_EXT], s[:N_EXT, N_EXT:]
    s21, s22 = s[N_EXT:, :N_EXT], s[N_EXT:, N_EXT:]

    loop = np.eye(N_STATE) - s22
    smin = smallest_singular_value(loop)
    if smin < SINGULAR_TOL:
        raise IllPosedFeedback(f"I - S22 is singular (smallest singular value {smin:.3e})")
    x = np.linalg.solve(loop, np.eye(N_STATE))

    g, k, e = params.normalized()
    r = drift_core(g, k, e)
    a = r - g * (x - np.eye(N_STATE))
    b = np.hstack([-np.sqrt(g) * x @ s21, -np.sqrt(k) * np.eye(N_STATE)])
    c = np.sqrt(g) * s12 @ x
    d = np.hstack([s11 + s12 @ x @ s21, np.zeros((N_EXT, N_STATE))])
    return StateSpace(A=a, B=b, C=c, D=d, R=r, X=x, rate_unit=params.gamma_ref, quad=s)


def stability_check(ss: StateSpace) -> StabilityReport:
    a = ss.A
    max_re = float(np.max(np.linalg.eigvals(a).real))
    sv = np.linalg.svd(a, compute_uv=False)
    return StabilityReport(
        max_re_eig=max_re,
        hurwitz=max_re < 0,
        a_invertible=bool(sv[-1] > SINGULAR_TOL * sv[0]),
    )


def _cfb_matrix() -> NDArray[np.complex128]:
    m = np.zeros((N_PORTS, N_PORTS), dtype=complex)
    for row, col in [(0, 4), (1, 3), (2, 0), (3, 5), (4, 2), (5, 1)]:
        m[row, col] = 1.0
    return m


# published local minimum for the reference parameters, 15 printed decimals
_LM_PRINTED = np.array(
    [
        [-0.012305658659326, 0.000000000000071, 0.008576364236157, -0.000000000000142, 0.999887502042829, 0.000000000000110],
        [-0.000000000000071, -0.012305658659326, -0.000000000000109, 0.999887502042830, 0.000000000000142, 0.008576364236157],
        [0.999887502042829, 0.000000000000001, -0.008471156255372, 0.000000000000069, 0.012378318554964, -0.000000000000048],
        [0.000000000000051, 0.008576364236158, 0.000000000000085, -0.008471156255372, -0.000000000000112, 0.999927340104363],
        [0.008576364236157, -0.000000000000050, 0.999927340104363, 0.000000000000111, -0.008471156255372, -0.000000000000085],
        [-0.000000000000001, 0.999887502042829, 0.000000000000047, 0.012378318554963, -0.000000000000069, -0.008471156255373],
    ]
)


def cfb_network() -> PassiveNetwork:
    """The permutation realising the dual-NOPA coherent-feedback loop."""
    return PassiveNetwork(_cfb_matrix(), label="cfb")


def lm_paper_network() -> PassiveNetwork:
    """The published locally optimal network (printed 15-decimal values)."""
    return PassiveNetwork(_LM_PRINTED.astype(complex), label="lm-paper")


BUILTIN_NETWORKS = {
    "cfb": cfb_network,
    "lm-paper": lm_paper_network,
}
