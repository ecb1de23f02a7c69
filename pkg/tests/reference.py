"""Published reference values and independent oracles shared by the tests."""

from __future__ import annotations

import numpy as np

from nopanet.synthesis import make_factor

# locally optimal network, printed to 15 decimals
S_LM = np.array(
    [
        [-0.012305658659326, 0.000000000000071, 0.008576364236157, -0.000000000000142, 0.999887502042829, 0.000000000000110],
        [-0.000000000000071, -0.012305658659326, -0.000000000000109, 0.999887502042830, 0.000000000000142, 0.008576364236157],
        [0.999887502042829, 0.000000000000001, -0.008471156255372, 0.000000000000069, 0.012378318554964, -0.000000000000048],
        [0.000000000000051, 0.008576364236158, 0.000000000000085, -0.008471156255372, -0.000000000000112, 0.999927340104363],
        [0.008576364236157, -0.000000000000050, 0.999927340104363, 0.000000000000111, -0.008471156255372, -0.000000000000085],
        [-0.000000000000001, 0.999887502042829, 0.000000000000047, 0.012378318554963, -0.000000000000069, -0.008471156255373],
    ]
)

# gradient printed at S_LM
G_LM = 1e-3 * np.array(
    [
        [0.409017637139186, -0.000013389581000, -0.292752071754183, -0.131726307590905, 0.007542180013146, 0.092604228142405],
        [0.000013384124031, 0.409017646234133, -0.092604224236176, 0.007631674074983, 0.131726307489625, -0.292814986508976],
        [0.007586926959628, -0.000000246987169, -0.005430300582194, -0.002443410193280, 0.000139901426214, 0.001717728155075],
        [-0.000009579672002, -0.292783532386752, 0.066288073024820, -0.005462914965842, -0.094292493155211, 0.209603196744500],
        [-0.292783525876746, 0.000009583578405, 0.209558161024828, 0.094292493228142, -0.005398853213792, -0.066288075820747],
        [0.000000246886333, 0.007586927128612, -0.001717728084123, 0.000141561463910, 0.002443410191339, -0.005431467597355],
    ]
)
G_LM_NORM = 6.497e-4
Z_LM_NORM = 9.112e-4

V_CFB_DB = -26.235
V_LM = 4.1824e-8
V_LM_DB = -73.786
V_LM_2DIGITS_DB = -36.546

# published transmission coefficients of the six beamsplitters
ALPHA = {3: 0.9999632197, 13: -0.9999632197, 8: 0.0084711563, 5: -0.0084711563, 12: 0.0123787627, 6: -0.0123787627}

_SWAP = np.array([[0.0, 1.0], [-1.0, 0.0]])


def _bs(alpha: float) -> np.ndarray:
    beta = np.sqrt(1.0 - alpha * alpha)
    return np.array([[alpha, beta], [-beta, alpha]])


def printed_factors(alpha: dict[int, float] = ALPHA):
    """The 15 published two-level factors, slot k -> (ports, block)."""
    slots = {
        1: (1, 2, np.eye(2)),
        2: (2, 3, _SWAP),
        3: (3, 4, _bs(alpha[3])),
        4: (4, 5, _SWAP),
        5: (5, 6, _bs(alpha[5])),
        6: (1, 2, _bs(alpha[6])),
        7: (2, 3, _SWAP),
        8: (3, 4, _bs(alpha[8])),
        9: (4, 5, _SWAP),
        10: (1, 2, -np.eye(2)),
        11: (2, 3, _SWAP),
        12: (3, 4, _bs(alpha[12])),
        13: (1, 2, _bs(alpha[13])),
        14: (2, 3, _SWAP),
        15: (1, 2, np.eye(2)),
    }
    return [make_factor(*slots[k]) for k in range(1, 16)]


def quadrature_oracle(u: np.ndarray) -> np.ndarray:
    """Blockwise real representation: entry u_kl -> [[Re, -Im], [Im, Re]]."""
    n = u.shape[0]
    s = np.zeros((2 * n, 2 * n))
    for k in range(n):
        for m in range(n):
            z = u[k, m]
            s[2 * k : 2 * k + 2, 2 * m : 2 * m + 2] = [[z.real, -z.imag], [z.imag, z.real]]
    return s


def loop_transfer_oracle(u: np.ndarray, gamma: float, kappa: float, epsilon: float, w: float) -> np.ndarray:
    """
    Closed-loop transfer matrix at normalized frequency ``w`` obtained by
    solving the interconnection equations directly, with no feedback resolvent.

    Unknowns per external input column: NOPA states z (8), NOPA inputs u (8)
    and NOPA outputs y (8). Each NOPA obeys
    ``i w z = R z - sqrt(gamma) u - sqrt(kappa) xi_loss``, ``y = sqrt(gamma) z + u``;
    the network closes the loop with ``u = S21 xi + S22 y`` and
    ``xi_out = S11 xi + S12 y``.
    """
    s = quadrature_oracle(u)
    s11, s12, s21, s22 = s[:4, :4], s[:4, 4:], s[4:, :4], s[4:, 4:]
    r = -(gamma + kappa) / 2 * np.eye(8)
    for o in (0, 4):
        r[o, o + 2] = r[o + 2, o] = epsilon / 2
        r[o + 1, o + 3] = r[o + 3, o + 1] = -epsilon / 2
    i8, z8 = np.eye(8), np.zeros((8, 8))
    sg = np.sqrt(gamma)
    big = np.block(
        [
            [1j * w * i8 - r, sg * i8, z8],
            [z8, i8, -s22],
            [-sg * i8, -i8, i8],
        ]
    )
    rhs_ext = np.vstack([np.zeros((8, 4)), s21, np.zeros((8, 4))])
    rhs_loss = np.vstack([-np.sqrt(kappa) * i8, z8, z8])
    sol = np.linalg.solve(big, np.hstack([rhs_ext, rhs_loss]))
    y = sol[16:]
    return np.hstack([s11, np.zeros((4, 8))]) + s12 @ y


def v_oracle(u: np.ndarray, gamma=1.0, kappa=0.0, epsilon=0.4, w=0.0) -> float:
    h = loop_transfer_oracle(u, gamma, kappa, epsilon, w)
    e1 = np.array([1.0, 0.0, 1.0, 0.0])
    e2 = np.array([0.0, 1.0, 0.0, -1.0])
    return float(np.sum(np.abs(e1 @ h) ** 2) + np.sum(np.abs(e2 @ h) ** 2))
