import random
from pathlib import Path

import pytest
from hypothesis import given, reject, settings
from hypothesis import strategies as st

from reachmod.freemod import ModuleElement, PolyMatrix, Submodule, is_member, is_submodule, module_equal
from reachmod.geocontrol import (
    DimensionError,
    IterationCapError,
    KernelElement,
    PencilKernelCache,
    PencilVariableError,
    StateSubmodule,
    SystemPair,
    curly_M,
    is_AB_invariant,
    max_reachability_iterative,
    max_reachability_kernel,
    minimal_conditioned,
    pencil_kernel,
    reachable_module,
    trajectory_from_kernel_element,
    verify_reachability_certificate,
)
from reachmod.instances import random_instance
from reachmod.polyring import Ring

from reachmod.cli import parse_system_file
from reachmod.groebner import ResourceExhaustedError, work_budget

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load(name):
    f = parse_system_file(FIXTURES / name)
    return f.ring, f.system, f.M


def span(R, *vectors):
    n = len(vectors[0])
    return Submodule(R, n, [ModuleElement.parse(R, v) for v in vectors])


@pytest.fixture(scope="module")
def example_a():
    return load("example_a.json")


def test_pencil_shape(example_a):
    R, sys, _ = example_a
    P = sys.pencil()
    assert P.shape == (3, 5)
    assert P[0, 0] == R.parse("y") and P[0, 1] == R.parse("-1") and P[1, 4] == R.parse("-t")


def test_kernel_elements_give_trajectories(example_a):
    R, sys, M = example_a
    for h in pencil_kernel(sys).generators:
        traj = trajectory_from_kernel_element(KernelElement(sys, h))
        assert traj.violations(sys) == []
        assert traj.states[0].is_zero() and traj.states[-1].is_zero()


def test_kernel_element_rejects_non_kernel_vectors(example_a):
    R, sys, _ = example_a
    with pytest.raises(AssertionError):
        KernelElement(sys, ModuleElement.parse(R, ["1", "0", "0", "0", "0"]))
    with pytest.raises(DimensionError):
        KernelElement(sys, ModuleElement.parse(R, ["1", "0"]))


def test_curly_m_routes_agree(example_a):
    R, sys, M = example_a
    assert module_equal(curly_M(sys, M), curly_M(sys, M, method="direct"))


def test_strictness_against_the_invariant_datum(example_a):
    R, sys, M = example_a
    Mstar = span(R, ["1", "-1", "-1"])
    assert is_AB_invariant(sys, Mstar)
    assert is_submodule(Mstar, M)
    result = max_reachability_kernel(sys, M).module
    assert is_submodule(result, Mstar)
    assert not is_member(ModuleElement.parse(R, ["1", "-1", "-1"]), result)


def test_iterative_chain_records_steps(example_a):
    R, sys, M = example_a
    cond = minimal_conditioned(sys, M)
    assert module_equal(cond.steps[0], Submodule.image(sys.B))
    assert cond.index == len(cond.steps) - 1
    out = max_reachability_iterative(sys, M, conditioned=cond)
    assert module_equal(out.module, span(R, ["t", "-t", "-t"]))


def test_iteration_cap(example_a):
    R, sys, M = example_a
    A = PolyMatrix.parse(R, [["0", "0"], ["1", "0"]])
    B = PolyMatrix.parse(R, [["1"], ["0"]])
    S = SystemPair(A, B)
    with pytest.raises(IterationCapError):
        minimal_conditioned(S, StateSubmodule.full(R, 2), cap=0)


def test_reachable_module_example():
    R = Ring(("t",))
    sys = SystemPair.parse(R, [["0", "0"], ["t", "0"]], [["1"], ["0"]])
    assert module_equal(reachable_module(sys), span(R, ["1", "0"], ["0", "t"]))
    out = max_reachability_kernel(sys, StateSubmodule.full(R, 2)).module
    assert module_equal(out, reachable_module(sys))


def test_system_validation():
    R = Ring(("t",))
    with pytest.raises(DimensionError):
        SystemPair.parse(R, [["0", "1"]], [["1"]])
    with pytest.raises(DimensionError):
        SystemPair.parse(R, [["0"]], [["1"], ["1"]])
    with pytest.raises(PencilVariableError, match="pencil variable not allowed in system matrices"):
        SystemPair.parse(R, [["y"]], [["1"]])
    with pytest.raises(PencilVariableError):
        StateSubmodule(R, 1, [ModuleElement.parse(R, ["y"])])
    sys = SystemPair.parse(R, [["0"]], [["1"]])
    with pytest.raises(DimensionError):
        max_reachability_kernel(sys, StateSubmodule.full(R, 2))


def test_kernel_form_submodule():
    R = Ring(("t",))
    M = StateSubmodule.from_kernel(PolyMatrix.parse(R, [["1", "1", "0"]]))
    assert module_equal(M, span(R, ["1", "-1", "0"], ["0", "0", "1"]))


def test_pencil_kernel_cache_is_per_system():
    cache = PencilKernelCache()
    R = Ring(("t",))
    s1 = SystemPair.parse(R, [["t"]], [["1"]])
    s2 = SystemPair.parse(R, [["t"]], [["1"]])
    calls = []
    cache.get(s1, lambda: calls.append(1) or "K1")
    assert cache.get(s1, lambda: calls.append(2)) == "K1"
    cache.get(s2, lambda: calls.append(3) or "K2")
    assert calls == [1, 3]


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_random_instances_agree_and_certify(seed):
    sys, M = random_instance(random.Random(seed))
    try:
        with work_budget(10**6):
            r = max_reachability_kernel(sys, M)
            it = max_reachability_iterative(sys, M)
    except ResourceExhaustedError:
        reject()
    assert module_equal(r.module, it.module)
    assert verify_reachability_certificate(sys, M, r).ok
