import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from reachmod.field_oracle import NotAFieldError, Subspace, rstar_chain, rstar_classical, vstar_chain, vstar_isa
from reachmod.freemod import module_equal
from reachmod.geocontrol import (
    StateSubmodule,
    SystemPair,
    is_AB_invariant,
    max_reachability_iterative,
    max_reachability_kernel,
    reachable_module,
)
from reachmod.instances import FIELD_CONFIG, InstanceConfig, random_instance
from reachmod.polyring import Ring

Q = Ring(())
GF = Ring((), 32003)


def system(ring, A, B):
    return SystemPair.parse(ring, A, B)


def test_subspace_is_canonical():
    U = Subspace.span(Q, 3, [[2, 4, 0], [1, 2, 1]])
    V = Subspace.span(Q, 3, [[0, 0, 3], [1, 2, 0]])
    assert U == V and U.dim == 2
    assert U.basis == ((1, 2, 0), (0, 0, 1))


def test_subspace_operations():
    U = Subspace.span(Q, 3, [[1, 0, 0], [0, 1, 0]])
    V = Subspace.span(Q, 3, [[0, 1, 0], [0, 0, 1]])
    assert U & V == Subspace.span(Q, 3, [[0, 1, 0]])
    assert U + V == Subspace.full(Q, 3)
    assert [0, 5, 0] in U and [0, 0, 1] not in U
    assert (U & V) <= U
    S = system(Q, [["0", "1", "0"], ["0", "0", "1"], ["0", "0", "0"]], [["0"], ["0"], ["0"]])
    assert U.mapped(S.A) == Subspace.span(Q, 3, [[1, 0, 0]])
    assert Subspace.span(Q, 3, [[1, 0, 0]]).preimage(S.A) == U


def test_prime_field_arithmetic():
    U = Subspace.span(GF, 2, [[2, 3]])
    assert U.basis == ((1, 3 * pow(2, -1, 32003) % 32003),)
    assert [4, 6] in U


def test_vstar_examples():
    S = system(Q, [["0", "1"], ["0", "0"]], [["0"], ["0"]])
    e1 = Subspace.span(Q, 2, [[1, 0]])
    assert vstar_isa(S, e1) == e1
    assert vstar_isa(S, Subspace.full(Q, 2)) == Subspace.full(Q, 2)
    e2 = Subspace.span(Q, 2, [[0, 1]])
    assert vstar_isa(S, e2) == Subspace.zero(Q, 2)
    full_B = system(Q, [["1", "2"], ["3", "4"]], [["1", "0"], ["0", "1"]])
    assert vstar_isa(full_B, e2) == e2


def test_rstar_examples():
    S = system(Q, [["0", "1"], ["0", "0"]], [["0"], ["0"]])
    assert rstar_classical(S, Subspace.full(Q, 2)) == Subspace.zero(Q, 2)
    T = system(Q, [["0", "0"], ["1", "0"]], [["1"], ["0"]])
    assert rstar_classical(T, Subspace.full(Q, 2)) == Subspace.full(Q, 2)
    assert rstar_classical(T, Subspace.span(Q, 2, [[1, 0]])) == Subspace.zero(Q, 2)


def test_rejects_rings_with_variables():
    R = Ring(("t",))
    S = SystemPair.parse(R, [["t"]], [["1"]])
    with pytest.raises(NotAFieldError):
        Subspace.full(R, 1)
    with pytest.raises(NotAFieldError):
        vstar_chain(S, Subspace.full(Q, 1))


@given(st.integers(0, 10**6), st.sampled_from([None, 32003]))
def test_chains_and_invariants(seed, modulus):
    cfg = InstanceConfig(max_n=5, max_m=3, max_vars=0, coeff_bound=3, modulus=modulus)
    S, M = random_instance(random.Random(seed), cfg)
    Ms = Subspace.from_submodule(M)
    V = vstar_chain(S, Ms)
    R = rstar_chain(S, Ms)
    assert V.index <= S.n and R.index <= S.n
    assert V.result <= Ms and R.result <= V.result
    assert is_AB_invariant(S, V.result.to_submodule())
    full = rstar_classical(S, Subspace.full(S.ring, S.n))
    assert full == Subspace.from_submodule(reachable_module(S))


@given(st.integers(0, 10**6))
def test_three_way_agreement(seed):
    S, M = random_instance(random.Random(seed), FIELD_CONFIG)
    oracle = rstar_classical(S, Subspace.from_submodule(M))
    by_kernel = max_reachability_kernel(S, M).module
    by_chain = max_reachability_iterative(S, M).module
    assert Subspace.from_submodule(by_kernel) == oracle
    assert module_equal(by_chain, oracle.to_submodule())


def test_roundtrip_through_submodules():
    U = Subspace.span(Q, 3, [[Fraction(1, 2), 1, 0]])
    assert Subspace.from_submodule(U.to_submodule()) == U
    assert isinstance(U.to_submodule(), StateSubmodule)
