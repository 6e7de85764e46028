import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from reachmod.freemod import (
    ModuleElement,
    PolyMatrix,
    RankMismatchError,
    Submodule,
    buchberger,
    image,
    intersect,
    is_member,
    is_submodule,
    kernel_of_matrix,
    module_equal,
    normal_form,
    preimage,
    submodule_sum,
)
from reachmod.groebner import CANONICAL_ORDER, ModuleOrder, ResourceExhaustedError, work_budget
from reachmod.instances import InstanceConfig, random_entry
from reachmod.modular import rational_reconstruction
from reachmod.polyring import Ring

R = Ring(("t", "w"))
GF = Ring(("t", "w"), 32003)
seeds = st.integers(0, 10**6)


def vec(ring, *texts):
    return ModuleElement.parse(ring, texts)


def random_module(seed, ring=R, rank=3, count=3, with_y=True):
    rnd = random.Random(seed)
    cfg = InstanceConfig()
    gens = []
    for _ in range(count):
        entries = []
        for _ in range(rank):
            e = random_entry(ring, rnd, cfg)
            if with_y and rnd.random() < 0.4:
                e = e * ring.y + random_entry(ring, rnd, cfg)
            entries.append(e)
        gens.append(ModuleElement(ring, entries))
    return Submodule(ring, rank, gens)


def combination(G, cofactors, inputs):
    ring = G.ring
    out = [ring.zero()] * G.rank
    for c, g in zip(cofactors, inputs):
        out = [a + c * b for a, b in zip(out, g)]
    return out


@given(seeds)
def test_modular_and_direct_engines_agree(seed):
    U = random_module(seed)
    a = buchberger(U, engine="modular")
    b = buchberger(U, engine="direct")
    assert a.elements == b.elements


@given(seeds, st.sampled_from(["modular", "direct"]))
def test_cofactors_reproduce_basis(seed, engine):
    U = random_module(seed)
    G = buchberger(U, track=True, engine=engine)
    assert G.cofactors is not None
    for e, cof in zip(G.elements, G.cofactors):
        assert combination(G, cof, G.inputs) == list(e)


@given(seeds)
def test_groebner_basis_over_prime_field(seed):
    U = random_module(seed, ring=GF)
    G = buchberger(U, track=True)
    for e, cof in zip(G.elements, G.cofactors):
        assert combination(G, cof, G.inputs) == list(e)
    assert all(is_member(g, U) for g in U.generators)


@given(seeds)
def test_orders_give_the_same_module(seed):
    U = random_module(seed, count=2)
    for order in (ModuleOrder("lex", "top"), ModuleOrder("grevlex", "pot"), ModuleOrder("lex", "pot")):
        V = Submodule(R, U.rank, [ModuleElement(R, e) for e in U.gb(order).elements])
        assert module_equal(U, V)


@given(seeds)
def test_kernel_methods_agree_and_annihilate(seed):
    U = random_module(seed, rank=2, count=3)
    P = PolyMatrix.from_columns(R, U.generators, 2)
    results = [
        kernel_of_matrix(P),
        kernel_of_matrix(P, method="schreyer", engine="direct"),
        kernel_of_matrix(P, method="eliminate", engine="direct"),
    ]
    for K in results:
        assert all(P.apply(v).is_zero() for v in K.generators)
    assert module_equal(results[0], results[1])
    assert module_equal(results[0], results[2])


@given(seeds)
def test_intersection_lies_in_both(seed):
    U = random_module(seed, count=2)
    V = random_module(seed + 1, count=2)
    W = intersect(U, V)
    assert is_submodule(W, U) and is_submodule(W, V)
    assert module_equal(intersect(U, U), U)


def test_known_intersection_and_preimage():
    T = Submodule(R, 1, [vec(R, "t")])
    W = Submodule(R, 1, [vec(R, "w")])
    assert module_equal(intersect(T, W), Submodule(R, 1, [vec(R, "t*w")]))
    P = PolyMatrix.parse(R, [["t"]])
    T2 = Submodule(R, 1, [vec(R, "t^2")])
    assert module_equal(preimage(P, T2), T)
    assert module_equal(preimage(P, Submodule.zero(R, 1)), Submodule.zero(R, 1))
    assert module_equal(image(P, T), T2)


def test_kernel_of_a_row():
    K = kernel_of_matrix(PolyMatrix.parse(R, [["t", "w"]]))
    assert module_equal(K, Submodule(R, 2, [vec(R, "w", "-t")]))


def test_membership_and_normal_form():
    U = Submodule(R, 2, [vec(R, "t", "y"), vec(R, "0", "w")])
    assert is_member(vec(R, "t*w", "w*y + w^2"), U)
    assert not is_member(vec(R, "1", "0"), U)
    nf = normal_form(vec(R, "t + 1", "y"), U.gb())
    assert nf == vec(R, "1", "0")
    assert is_member(ModuleElement.zero(R, 2), Submodule.zero(R, 2))


def test_sum_and_equality():
    U = Submodule(R, 2, [vec(R, "1", "0")])
    V = Submodule(R, 2, [vec(R, "0", "1")])
    assert module_equal(submodule_sum(U, V), Submodule.full(R, 2))
    assert not module_equal(U, V)


def test_canonical_order_is_term_over_position():
    assert CANONICAL_ORDER == ModuleOrder("grevlex", "top")
    G = Submodule(R, 2, [vec(R, "1", "t")]).gb()
    assert G.elements[0][0] == R.one() or G.elements[0][1] == R.one()


def test_rank_mismatch():
    with pytest.raises(RankMismatchError):
        is_member(vec(R, "1"), Submodule.full(R, 2))
    with pytest.raises(RankMismatchError):
        Submodule(R, 2, [vec(R, "1")])


def test_pair_cap_and_work_budget():
    U = random_module(7, count=4)
    with pytest.raises(ResourceExhaustedError):
        buchberger(U, pair_cap=1, engine="direct")
    with pytest.raises(ResourceExhaustedError):
        with work_budget(1):
            buchberger(random_module(8, count=4), engine="direct")


def test_rational_reconstruction():
    m = 2**61 - 1
    for f in (Fraction(3, 7), Fraction(-12, 5), Fraction(0), Fraction(1, 1000)):
        a = f.numerator * pow(f.denominator, -1, m) % m
        assert rational_reconstruction(a, m) == f
