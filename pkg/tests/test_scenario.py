import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwitness import algebra as alg
from qwitness import families as fam
from qwitness import sampling as sm
from qwitness import scenario as sc
from qwitness.errors import InvalidTable, ZeroConditioningProbability

seeds = st.integers(0, 2**32 - 1)


@given(seeds)
@settings(max_examples=200, deadline=None)
def test_assemblage_is_nonsignaling(seed):
    rng = np.random.default_rng(seed)
    asm = sc.steer_assemblage(sm.random_two_qubit_state(rng), sm.random_povm_pair(rng))
    bob_reduced = asm.sigma[0].sum(axis=0)
    assert np.allclose(bob_reduced, asm.sigma[1].sum(axis=0), atol=1e-12)
    assert np.allclose(asm.probabilities().sum(axis=1), 1)


@given(seeds)
@settings(max_examples=200, deadline=None)
def test_box_conditional_round_trip(seed):
    rng = np.random.default_rng(seed)
    rho = sm.random_two_qubit_state(rng)
    alice, bob = sm.random_povm_pair(rng), sm.random_povm_pair(rng)
    box = sc.box_from_state(rho, alice, bob)
    ct = sc.box_to_conditional(box)
    assert np.allclose(sc.conditional_to_box(ct).p, box.p, atol=1e-12)
    # the same table computed through the assemblage
    ct2 = sc.conditional_table(sc.steer_assemblage(rho, alice), bob)
    assert np.allclose(ct.pb, ct2.pb, atol=1e-10)
    assert np.allclose(ct.pa, ct2.pa, atol=1e-12)


def test_box_entries_hand_computed():
    # singlet with equal sharp measurements: perfectly anticorrelated
    z = alg.BinaryPovm.sharp(alg.Z_HAT)
    box = sc.box_from_state(fam.werner_state(1.0), (z, z), (z, z))
    assert box.p[0, 0, 0, 1] == pytest.approx(0.5)
    assert box.p[0, 0, 0, 0] == pytest.approx(0.0)
    assert np.allclose(box.correlators(), -1)


def test_pm_table_values():
    t = fam.bb84_strategy().sequential()
    # rho_00 = |0>, measured along z
    assert t.p[0, 0, 0, 0] == pytest.approx(1.0)
    assert t.p[1, 0, 1, 0] == pytest.approx(1.0)
    assert t.p[0, 0, 1, 0] == pytest.approx(0.5)


def test_signaling_box_rejected():
    p = np.zeros((2, 2, 2, 2))
    for x, y in itertools.product(sc.BITS, sc.BITS):
        p[x, y, y, 0] = 1  # Alice's outcome copies Bob's input
    with pytest.raises(InvalidTable):
        sc.Box(p)


def test_unnormalized_table_rejected():
    with pytest.raises(InvalidTable):
        sc.SequentialTable(np.full((2, 2, 2, 2), 0.4))


def test_zero_conditioning_reports_index():
    z = alg.BinaryPovm.sharp(alg.Z_HAT)
    rho = alg.tensor(alg.bloch_to_density(alg.Z_HAT), alg.I2 / 2)
    asm = sc.steer_assemblage(rho, (z, z))
    with pytest.raises(ZeroConditioningProbability) as info:
        asm.states()
    assert info.value.index == (0, 1)


def test_tables_are_read_only():
    t = fam.bb84_strategy().sequential()
    with pytest.raises(ValueError):
        t.p[0, 0, 0, 0] = 0.3


def test_index_maps():
    ct = sc.box_to_conditional(fam.white_noise_bb84_box(0.6))
    seq = sc.sequential_from_conditional(ct, sc.RAC_MAP)
    for (i, j), (x0, x1) in sc.RAC_MAP.items():
        assert np.array_equal(seq.p[i, j], ct.pb[x0, x1])
    assert sorted(sc.RAC_MAP.values()) == sorted(sc.IDENTITY_MAP.values())


def test_preparations_from_assemblage_reproduce_table():
    s = fam.bell_diagonal_rac_strategy()
    preps = sc.preparations_from_assemblage(s.assemblage(), s.index_map)
    assert np.allclose(sc.pm_table(preps, s.bob).p, s.sequential().p, atol=1e-12)
