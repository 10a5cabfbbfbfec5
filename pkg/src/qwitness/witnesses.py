"""Scalar witnesses of quantumness, random-access-code figures of merit and randomness bounds."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator, DegenerateMarginal, DomainError, UnsupportedN
from .scenario import BITS, Box, ConditionalTable, SequentialTable

DEGENERACY_TOL = 1e-12
WL_CLASSICAL_BOUND = 2.0
PB_CLASSICAL_BOUND = 0.75
CHSH_LOCAL_BOUND = 2.0


class Kind(str, enum.Enum):
    W = "W"
    Q = "Q"
    WL = "WL"
    PB = "PB"
    PMIN = "PMIN"
    CHSH = "CHSH"
    HMIN = "HMIN"


@dataclass(frozen=True)
class WitnessValue:
    kind: Kind
    value: float

    def __float__(self):
        return self.value


def w_matrix(t: SequentialTable) -> np.ndarray:
    """D[y, x0] = p(0|x0 0, y) - p(0|x0 1, y); W is |det D|."""
    return t.p[:, 0, :, 0].T - t.p[:, 1, :, 0].T


def q_matrix(ct: ConditionalTable) -> np.ndarray:
    """D[y, x0] = p(0|0; x0, y) - p(0|1; x0, y); Q is |det D|."""
    return ct.pb[:, 0, :, 0].T - ct.pb[:, 1, :, 0].T


def _det2(d) -> float:
    return float(d[0, 0] * d[1, 1] - d[0, 1] * d[1, 0])


def signed_w(t: SequentialTable) -> float:
    return _det2(w_matrix(t))


def signed_q(ct: ConditionalTable) -> float:
    return _det2(q_matrix(ct))


def witness_w(t: SequentialTable) -> WitnessValue:
    return WitnessValue(Kind.W, abs(signed_w(t)))


def quantity_q(ct: ConditionalTable) -> WitnessValue:
    return WitnessValue(Kind.Q, abs(signed_q(ct)))


def guessing_bound(q) -> float:
    """Upper bound f(Q) = (1 + sqrt((2 - Q)/2)) / 2 on Eve's guessing probability."""
    q = float(q)
    if not (-DEGENERACY_TOL <= q <= 2 + DEGENERACY_TOL):
        raise DomainError(f"Q = {q!r} outside [0, 2]")
    q = min(max(q, 0.0), 2.0)
    return 0.5 * (1 + math.sqrt((2 - q) / 2))


def min_entropy(q) -> float:
    """Certified min-entropy -log2 f(Q), in bits."""
    return 0.0 - math.log2(guessing_bound(q))  # no -0.0 at Q = 0


def linear_witness_wl(t: SequentialTable) -> WitnessValue:
    p0 = t.p[..., 0]  # [x0, x1, y]
    value = (p0[0, 0, 0] + p0[0, 0, 1] + p0[0, 1, 0] - p0[0, 1, 1]
             - p0[1, 0, 0] + p0[1, 0, 1] - p0[1, 1, 0] - p0[1, 1, 1])
    return WitnessValue(Kind.WL, float(value))


def wl_violation(wl) -> bool:
    """|W_L| > 2; the sign flips under outcome relabelings."""
    return abs(float(wl)) > WL_CLASSICAL_BOUND + DEGENERACY_TOL


def _correct_guess(t: SequentialTable) -> np.ndarray:
    """p(b = x_y | x0 x1, y) as [x0, x1, y]."""
    out = np.empty((2, 2, 2))
    for x0 in BITS:
        for x1 in BITS:
            bits = (x0, x1)
            for y in BITS:
                out[x0, x1, y] = t.p[x0, x1, y, bits[y]]
    return out


def rac_average_success(t: SequentialTable) -> WitnessValue:
    return WitnessValue(Kind.PB, float(_correct_guess(t).mean()))


def rac_worst_case(t: SequentialTable) -> WitnessValue:
    return WitnessValue(Kind.PMIN, float(_correct_guess(t).min()))


def sl_thresholds(n: int, maximally_mixed_marginals: bool = False) -> float:
    """Classical bound on P_min for an n-to-1 RAC assisted by two shared bits."""
    if n not in (2, 3):
        raise UnsupportedN(f"n = {n!r}; only n in {{2, 3}} is supported")
    if maximally_mixed_marginals or n > 2:
        return 0.5
    return 2 / 3


def chsh_value(box: Box) -> WitnessValue:
    """max over which correlator carries the minus sign of |E00 + E01 + E10 + E11 - 2 E_xy|."""
    e = box.correlators()
    total = e.sum()
    return WitnessValue(Kind.CHSH, float(max(abs(total - 2 * e[x, y]) for x in BITS for y in BITS)))


def _canon(a, b, c):
    a, b, c = (np.asarray(v, dtype=float) for v in (a, b, c))
    return a[0], a[1], b[0], b[1], c[0], c[1]


def _pair_term(a1, a2, b1, b2, c1, c2):
    return (c1 - a1 * b1) * (c2 - a2 * b2) - a1 * b1 * a2 * b2


def closed_form_q_aligned(a, b, c) -> float:
    """Q for Alice along x, y and Bob along x, y on the canonical two-qubit state."""
    a1, a2, b1, b2, c1, c2 = _canon(a, b, c)
    den = (1 - a1 ** 2) * (1 - a2 ** 2)
    if min(1 - a1 ** 2, 1 - a2 ** 2) <= DEGENERACY_TOL:
        raise DegenerateMarginal("Alice's marginal is pure along x or y")
    return abs(_pair_term(a1, a2, b1, b2, c1, c2)) / den


def closed_form_q_steering_optimal(a, b, c) -> float:
    """Q for Alice along (c1 x +- c2 y)/|.| and Bob along (x +- y)/sqrt2."""
    a1, a2, b1, b2, c1, c2 = _canon(a, b, c)
    n2 = c1 ** 2 + c2 ** 2
    den = ((a1 * c1 - a2 * c2) ** 2 - n2) * ((a1 * c1 + a2 * c2) ** 2 - n2)
    if n2 <= DEGENERACY_TOL or abs(den) <= DEGENERACY_TOL:
        raise DegenerateDenominator("steering-optimal construction is degenerate for these parameters")
    return abs(2 * c1 * c2 * n2 * _pair_term(a1, a2, b1, b2, c1, c2) / den)


def closed_form_q_rac_optimal(a, b, c) -> float:
    """Q for Alice along (x +- y)/sqrt2 and Bob along x, y."""
    a1, a2, b1, b2, c1, c2 = _canon(a, b, c)
    den = a1 ** 4 + (a2 ** 2 - 2) ** 2 - 2 * a1 ** 2 * (2 + a2 ** 2)
    if abs(den) <= DEGENERACY_TOL:
        raise DegenerateDenominator("RAC-optimal construction is degenerate for these parameters")
    return abs(4 * _pair_term(a1, a2, b1, b2, c1, c2) / den)
