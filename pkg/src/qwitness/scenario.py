"""Correlation objects built from states and measurements.

Index conventions (all arrays are 2x2x2x2 floats):

* ``SequentialTable.p[x0, x1, y, b]``   = p(b | x0 x1, y)        prepare-and-measure
* ``ConditionalTable.pb[x0, x1, y, b]`` = p(b | x1; x0, y)       Alice setting x0, outcome x1
* ``ConditionalTable.pa[x0, x1]``       = p(x1 | x0)
* ``Box.p[x, y, a, b]``                 = p(a, b | x, y)

The P&M preparation label x0x1 maps to the steered state rho_{x1|x0} (x0 = Alice's
setting, x1 = her outcome) unless another :data:`IndexMap` is given.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .algebra import (ALG_TOL, PSD_TOL, I2, BinaryPovm, check_density, density_to_bloch,
                      partial_trace_first, povm_effects, tensor)
from .errors import InvalidTable, NotPositive, ZeroConditioningProbability

NS_TOL = 1e-10
COND_TOL = 1e-12

BITS = (0, 1)

# P&M label (i, j) -> SDI label (x0, x1) of the conditional state used as rho_ij.
IDENTITY_MAP = {(i, j): (i, j) for i in BITS for j in BITS}
# rho00 = rho_{0|0}, rho01 = rho_{0|1}, rho10 = rho_{1|1}, rho11 = rho_{1|0}
RAC_MAP = {(i, j): (i ^ j, i) for i in BITS for j in BITS}
INDEX_MAPS = {"identity": IDENTITY_MAP, "rac": RAC_MAP}


def _frozen(arr, dtype=float):
    a = np.array(arr, dtype=dtype)
    a.setflags(write=False)
    return a


def _check_probs(p, what):
    if p.shape != (2, 2, 2, 2):
        raise InvalidTable(f"{what} must have shape (2, 2, 2, 2), got {p.shape}")
    if not np.all(np.isfinite(p)):
        raise InvalidTable(f"{what} has non-finite entries")
    if p.min() < -ALG_TOL or p.max() > 1 + ALG_TOL:
        raise InvalidTable(f"{what} has entries outside [0, 1]")


@dataclass(frozen=True, eq=False)
class SequentialTable:
    p: np.ndarray

    def __post_init__(self):
        p = _frozen(self.p)
        _check_probs(p, "sequential table")
        if np.max(np.abs(p.sum(axis=-1) - 1)) > ALG_TOL:
            raise InvalidTable("sequential table rows do not sum to 1")
        object.__setattr__(self, "p", p)


@dataclass(frozen=True, eq=False)
class ConditionalTable:
    pb: np.ndarray
    pa: np.ndarray

    def __post_init__(self):
        pb, pa = _frozen(self.pb), _frozen(self.pa)
        _check_probs(pb, "conditional table")
        if pa.shape != (2, 2) or pa.min() < -ALG_TOL or np.max(np.abs(pa.sum(axis=1) - 1)) > ALG_TOL:
            raise InvalidTable("p(x1|x0) must be a 2x2 array of normalized distributions")
        if np.max(np.abs(pb.sum(axis=-1) - 1)) > ALG_TOL:
            raise InvalidTable("p(b|x1;x0,y) rows do not sum to 1")
        object.__setattr__(self, "pb", pb)
        object.__setattr__(self, "pa", pa)


@dataclass(frozen=True, eq=False)
class Box:
    p: np.ndarray

    def __post_init__(self):
        p = _frozen(self.p)
        _check_probs(p, "box")
        if np.max(np.abs(p.sum(axis=(2, 3)) - 1)) > ALG_TOL:
            raise InvalidTable("box is not normalized for every (x, y)")
        if signaling_gap(p) > NS_TOL:
            raise InvalidTable(f"box is signaling (gap {signaling_gap(p):.3g})")
        object.__setattr__(self, "p", p)

    def alice_marginal(self):
        """p(a|x) as a 2x2 array [x, a]."""
        return self.p[:, 0].sum(axis=2)

    def bob_marginal(self):
        """p(b|y) as a 2x2 array [y, b]."""
        return self.p[0].sum(axis=1)

    def correlators(self):
        """E(x, y) = sum (-1)^(a+b) p(a, b|x, y)."""
        sign = np.array([[1, -1], [-1, 1]])
        return np.einsum("xyab,ab->xy", self.p, sign)


def signaling_gap(p) -> float:
    p = np.asarray(p)
    pa = p.sum(axis=3)  # [x, y, a]
    pb = p.sum(axis=2)  # [x, y, b]
    return float(max(np.max(np.abs(pa[:, 0] - pa[:, 1])), np.max(np.abs(pb[0] - pb[1]))))


@dataclass(frozen=True, eq=False)
class Assemblage:
    """sigma[x0, x1] = p(x1|x0) rho_{x1|x0}, four subnormalized 2x2 operators."""

    sigma: np.ndarray

    def __post_init__(self):
        s = _frozen(self.sigma, complex)
        if s.shape != (2, 2, 2, 2):
            raise InvalidTable(f"assemblage must have shape (2, 2, 2, 2), got {s.shape}")
        for x0, x1 in itertools.product(BITS, BITS):
            op = s[x0, x1]
            if np.max(np.abs(op - op.conj().T)) > ALG_TOL or np.linalg.eigvalsh(op)[0] < -PSD_TOL:
                raise NotPositive(f"sigma_{x1}|{x0} is not positive semidefinite")
        traces = np.real(np.trace(s, axis1=2, axis2=3))
        if np.max(np.abs(traces.sum(axis=1) - 1)) > ALG_TOL:
            raise InvalidTable("assemblage traces are not normalized per setting")
        if np.max(np.abs(s[0].sum(axis=0) - s[1].sum(axis=0))) > NS_TOL:
            raise InvalidTable("assemblage violates the nonsignaling condition")
        object.__setattr__(self, "sigma", s)

    def probabilities(self):
        """p(x1|x0) as [x0, x1]."""
        return np.real(np.trace(self.sigma, axis1=2, axis2=3))

    def states(self):
        """Normalized conditional states rho_{x1|x0}; raises if some p(x1|x0) vanishes."""
        pa = self.probabilities()
        out = np.empty_like(self.sigma)
        for x0, x1 in itertools.product(BITS, BITS):
            if pa[x0, x1] <= COND_TOL:
                raise ZeroConditioningProbability(
                    f"p(x1={x1}|x0={x0}) = {pa[x0, x1]:.3g}; conditional state undefined", (x0, x1))
            out[x0, x1] = self.sigma[x0, x1] / pa[x0, x1]
        return out


def _effects(meas):
    if len(meas) != 2:
        raise ValueError("expected exactly two measurements")
    return [povm_effects(m) for m in meas]


def pm_table(preps, meas) -> SequentialTable:
    """p(b|x0x1, y) = Tr(rho_{x0x1} M_{b|y}); ``preps`` ordered rho00, rho01, rho10, rho11."""
    preps = [check_density(r, dim=2) for r in preps]
    if len(preps) != 4:
        raise ValueError("expected four preparations")
    eff = _effects(meas)
    p = np.empty((2, 2, 2, 2))
    for k, (x0, x1) in enumerate(itertools.product(BITS, BITS)):
        for y, b in itertools.product(BITS, BITS):
            p[x0, x1, y, b] = np.trace(preps[k] @ eff[y][b]).real
    return SequentialTable(p)


def steer_assemblage(rho, alice) -> Assemblage:
    rho = check_density(rho, dim=4)
    eff = _effects(alice)
    sigma = np.empty((2, 2, 2, 2), dtype=complex)
    for x0, x1 in itertools.product(BITS, BITS):
        sigma[x0, x1] = partial_trace_first(tensor(eff[x0][x1], I2) @ rho)
    return Assemblage(sigma)


def conditional_table(asm: Assemblage, bob) -> ConditionalTable:
    states = asm.states()
    eff = _effects(bob)
    pb = np.empty((2, 2, 2, 2))
    for x0, x1, y, b in itertools.product(BITS, BITS, BITS, BITS):
        pb[x0, x1, y, b] = np.trace(states[x0, x1] @ eff[y][b]).real
    return ConditionalTable(pb, asm.probabilities())


def box_from_state(rho, alice, bob) -> Box:
    rho = check_density(rho, dim=4)
    ea, eb = _effects(alice), _effects(bob)
    p = np.empty((2, 2, 2, 2))
    for x, y, a, b in itertools.product(BITS, BITS, BITS, BITS):
        p[x, y, a, b] = np.trace(tensor(ea[x][a], eb[y][b]) @ rho).real
    return Box(p)


def box_to_conditional(box: Box) -> ConditionalTable:
    pa = box.alice_marginal()  # [x, a]
    for x, a in itertools.product(BITS, BITS):
        if pa[x, a] <= COND_TOL:
            raise ZeroConditioningProbability(
                f"p(a={a}|x={x}) = {pa[x, a]:.3g}; p(b|a;x,y) undefined", (x, a))
    # [x, y, a, b] -> [x0=x, x1=a, y, b]
    pb = np.transpose(box.p, (0, 2, 1, 3)) / pa[:, :, None, None]
    return ConditionalTable(pb, pa)


def conditional_to_box(ct: ConditionalTable) -> Box:
    joint = ct.pb * ct.pa[:, :, None, None]  # [x0, x1, y, b]
    return Box(np.transpose(joint, (0, 2, 1, 3)))


def sequential_from_conditional(ct: ConditionalTable, index_map=None) -> SequentialTable:
    """Read the conditional table as a P&M table, rho_ij <- rho_{x1|x0} via ``index_map``."""
    index_map = IDENTITY_MAP if index_map is None else index_map
    p = np.empty((2, 2, 2, 2))
    for (i, j), (x0, x1) in index_map.items():
        p[i, j] = ct.pb[x0, x1]
    return SequentialTable(p)


def preparations_from_assemblage(asm: Assemblage, index_map=None):
    """The four normalized conditional states in P&M order rho00, rho01, rho10, rho11."""
    index_map = IDENTITY_MAP if index_map is None else index_map
    states = asm.states()
    return [states[index_map[(i, j)]] for i, j in itertools.product(BITS, BITS)]


def bloch_preparations(preps):
    return [density_to_bloch(r) for r in preps]
