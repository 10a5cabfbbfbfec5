"""Small dense qubit algebra: Pauli matrices, Bloch vectors, two-qubit states, binary POVMs.

Operators are plain ``numpy`` complex arrays of shape (2, 2) or (4, 4). The first
tensor factor is always Alice. Pauli ordering is (x, y, z).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BlochOutOfBall, InvalidPovm, NotPositive

ALG_TOL = 1e-12
PSD_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([SX, SY, SZ])

X_HAT = np.array([1.0, 0.0, 0.0])
Y_HAT = np.array([0.0, 1.0, 0.0])
Z_HAT = np.array([0.0, 0.0, 1.0])


def _vec3(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise ValueError(f"expected 3 finite reals, got {v!r}")
    return v


def dot_sigma(v) -> np.ndarray:
    """v . sigma as a 2x2 operator."""
    return np.tensordot(_vec3(v), PAULI, axes=1)


def bloch_to_density(s) -> np.ndarray:
    s = _vec3(s)
    norm = np.linalg.norm(s)
    if norm > 1 + PSD_TOL:
        raise BlochOutOfBall(f"Bloch vector norm {norm:.17g} exceeds 1")
    return 0.5 * (I2 + dot_sigma(s))


def density_to_bloch(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    return np.real(np.einsum("kij,ji->k", PAULI, rho))


def is_hermitian(op, tol=ALG_TOL) -> bool:
    op = np.asarray(op)
    return bool(np.max(np.abs(op - op.conj().T)) <= tol)


def check_density(rho, dim=None, tol=ALG_TOL, psd_tol=PSD_TOL) -> np.ndarray:
    """Validate a density operator and return it as a complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in (2, 4):
        raise NotPositive(f"density operator must be 2x2 or 4x4, got shape {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise NotPositive(f"expected a {dim}x{dim} density operator")
    if not np.all(np.isfinite(rho)):
        raise NotPositive("density operator has non-finite entries")
    if not is_hermitian(rho, tol):
        raise NotPositive("density operator is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1) > tol:
        raise NotPositive(f"density operator has trace {tr:.17g}")
    lo = np.linalg.eigvalsh(rho)[0]
    if lo < -psd_tol:
        raise NotPositive(f"density operator has eigenvalue {lo:.3g}")
    return rho


def tensor(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace_first(rho) -> np.ndarray:
    """Trace out Alice (first factor); returns Bob's reduced operator."""
    r = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    return np.einsum("ijik->jk", r)


def partial_trace_second(rho) -> np.ndarray:
    """Trace out Bob (second factor); returns Alice's reduced operator."""
    r = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    return np.einsum("ijkj->ik", r)


def canonical_two_qubit(a, b, c) -> np.ndarray:
    """1/4 (1x1 + a.s x 1 + 1 x b.s + sum_i c_i s_i x s_i).

    Raises NotPositive when the result is not a state.
    """
    a, b, c = _vec3(a), _vec3(b), _vec3(c)
    rho = tensor(I2, I2) + tensor(dot_sigma(a), I2) + tensor(I2, dot_sigma(b))
    for i in range(3):
        rho = rho + c[i] * tensor(PAULI[i], PAULI[i])
    rho = rho / 4
    lo = np.linalg.eigvalsh(rho)[0]
    if lo < -PSD_TOL:
        raise NotPositive(f"canonical parameters give eigenvalue {lo:.3g}")
    return rho


def correlation_tensor(rho) -> np.ndarray:
    """T_ij = Tr(rho s_i x s_j)."""
    rho = np.asarray(rho, dtype=complex)
    return np.real(np.array([[np.trace(rho @ tensor(PAULI[i], PAULI[j])) for j in range(3)]
                             for i in range(3)]))


@dataclass(frozen=True)
class BinaryPovm:
    """Two-outcome qubit measurement M_b = gamma_b 1 + (-1)^b (eta/2) u.sigma.

    ``gamma1`` is ``1 - gamma0``; ``direction`` must be a unit vector.
    """

    gamma0: float
    eta: float
    direction: tuple

    def __post_init__(self):
        u = np.asarray(self.direction, dtype=float)
        if u.shape != (3,) or not np.all(np.isfinite(u)):
            raise InvalidPovm(f"direction must be 3 finite reals, got {self.direction!r}")
        if abs(np.linalg.norm(u) - 1) > PSD_TOL:
            raise InvalidPovm(f"direction {tuple(u)} is not a unit vector")
        if not (np.isfinite(self.gamma0) and np.isfinite(self.eta)) or self.eta < -PSD_TOL:
            raise InvalidPovm("gamma0 and eta must be finite, eta >= 0")
        for g in (self.gamma0, 1 - self.gamma0):
            if g - self.eta / 2 < -PSD_TOL or g + self.eta / 2 > 1 + PSD_TOL:
                raise InvalidPovm(
                    f"effect eigenvalues {g - self.eta / 2:.6g}, {g + self.eta / 2:.6g} leave [0, 1]")
        object.__setattr__(self, "direction", tuple(float(x) for x in u))
        object.__setattr__(self, "gamma0", float(self.gamma0))
        object.__setattr__(self, "eta", float(self.eta))

    @classmethod
    def sharp(cls, direction) -> "BinaryPovm":
        u = _vec3(direction)
        return cls(0.5, 1.0, tuple(u / np.linalg.norm(u)))

    @classmethod
    def from_vector(cls, t, gamma0=0.5) -> "BinaryPovm":
        """Unbiased-style POVM whose observable M_0 - M_1 has Bloch vector ``t`` (|t| <= 1)."""
        t = _vec3(t)
        eta = float(np.linalg.norm(t))
        u = t / eta if eta > 0 else Z_HAT
        return cls(gamma0, eta, tuple(u))

    @property
    def gamma1(self) -> float:
        return 1.0 - self.gamma0

    @property
    def u(self) -> np.ndarray:
        return np.array(self.direction)

    @property
    def is_sharp(self) -> bool:
        return abs(self.eta - 1) <= ALG_TOL and abs(self.gamma0 - 0.5) <= ALG_TOL

    def effects(self):
        half = 0.5 * self.eta * dot_sigma(self.u)
        return self.gamma0 * I2 + half, self.gamma1 * I2 - half

    def prob0(self, s) -> float:
        """Probability of outcome 0 on the qubit state with Bloch vector ``s``."""
        return self.gamma0 + 0.5 * self.eta * float(np.dot(self.u, s))


def povm_effects(m: BinaryPovm):
    m0, m1 = m.effects()
    lo = min(np.linalg.eigvalsh(m0)[0], np.linalg.eigvalsh(m1)[0])
    if lo < -PSD_TOL:
        raise InvalidPovm(f"effect eigenvalue {lo:.3g} < 0")
    return m0, m1
