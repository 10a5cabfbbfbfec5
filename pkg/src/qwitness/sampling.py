"""Random states, measurements, tables and boxes for property tests and exploration."""
from __future__ import annotations

import itertools

import numpy as np

from . import families
from .algebra import BinaryPovm, bloch_to_density, canonical_two_qubit
from .scenario import BITS, Box, SequentialTable


def random_unit(rng) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_bloch(rng) -> np.ndarray:
    """Uniform in the unit ball."""
    return random_unit(rng) * rng.uniform() ** (1 / 3)


def random_qubit_density(rng) -> np.ndarray:
    return bloch_to_density(random_bloch(rng))


def random_povm(rng) -> BinaryPovm:
    eta = rng.uniform()
    gamma0 = rng.uniform(eta / 2, 1 - eta / 2)
    return BinaryPovm(gamma0, eta, tuple(random_unit(rng)))


def random_povm_pair(rng):
    return random_povm(rng), random_povm(rng)


def random_two_qubit_state(rng) -> np.ndarray:
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_cq_state(rng) -> np.ndarray:
    return families.cq_state(rng.uniform(), random_unit(rng), random_qubit_density(rng),
                             random_qubit_density(rng))


def random_qc_state(rng) -> np.ndarray:
    return families.qc_state(rng.uniform(), random_unit(rng), random_qubit_density(rng),
                             random_qubit_density(rng))


_BELL_DIAGONAL_VERTICES = np.array([(-1, -1, -1), (-1, 1, 1), (1, -1, 1), (1, 1, -1)], float)


def random_canonical_params(rng):
    """(a, b, c) of a random canonical two-qubit state.

    Drawn as a convex mixture of states that are each already in canonical form, so no
    rejection is needed: a Bell-diagonal state, rho_a x 1/2, 1/2 x rho_b, and a product
    of two states along a common axis. Not uniform in any natural measure.
    """
    w = rng.dirichlet(np.ones(4))
    c_bd = rng.dirichlet(np.ones(4)) @ _BELL_DIAGONAL_VERTICES
    a_loc, b_loc = random_bloch(rng), random_bloch(rng)
    axis = np.eye(3)[rng.integers(3)]
    s, t = rng.uniform(-1, 1, size=2)
    a = w[1] * a_loc + w[3] * s * axis
    b = w[2] * b_loc + w[3] * t * axis
    c = w[0] * c_bd + w[3] * s * t * axis
    canonical_two_qubit(a, b, c)
    return a, b, c


def random_sequential_table(rng) -> SequentialTable:
    p0 = rng.uniform(size=(2, 2, 2))
    return SequentialTable(np.stack([p0, 1 - p0], axis=-1))


def _vertex(alice_fn, bob_fn):
    p = np.zeros((2, 2, 2, 2))
    for x, y in itertools.product(BITS, BITS):
        p[x, y, alice_fn(x), bob_fn(y)] = 1
    return p


LOCAL_VERTICES = [_vertex(lambda x, a0=a0, a1=a1: (a0, a1)[x], lambda y, b0=b0, b1=b1: (b0, b1)[y])
                  for a0, a1, b0, b1 in itertools.product(BITS, repeat=4)]


def _pr_vertex(alpha, beta, gamma):
    p = np.zeros((2, 2, 2, 2))
    for x, y, a, b in itertools.product(BITS, repeat=4):
        if a ^ b == (x * y) ^ (alpha * x) ^ (beta * y) ^ gamma:
            p[x, y, a, b] = 0.5
    return p


PR_VERTICES = [_pr_vertex(*abc) for abc in itertools.product(BITS, repeat=3)]


def random_local_box(rng, concentration=1.0) -> Box:
    w = rng.dirichlet(np.full(16, concentration))
    return Box(np.tensordot(w, np.array(LOCAL_VERTICES), axes=1))


def random_ns_box(rng) -> Box:
    """A random point of the nonsignaling polytope: one PR-type vertex mixed with
    local vertices at a random PR weight, so local and nonlocal draws both occur."""
    pr = PR_VERTICES[rng.integers(8)]
    local = np.tensordot(rng.dirichlet(np.full(16, 0.5)), np.array(LOCAL_VERTICES), axes=1)
    t = rng.uniform()
    return Box(t * pr + (1 - t) * local)
