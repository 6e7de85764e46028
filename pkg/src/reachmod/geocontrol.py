"""Reachability submodules of linear discrete-time systems x_{k+1} = A x_k + B u_k over R.

Two independent routes to the maximal reachability submodule of M:

* :func:`max_reachability_kernel` intersects the kernel of the pencil
  [yE - A, -B] with M[y] x R[y]^m and reads off coefficient vectors;
* :func:`max_reachability_iterative` runs the two ascending chains
  S_k = im B + A(S_{k-1} ∩ M) and W_k = M_* ∩ M ∩ A^{-1}(W_{k-1} + im B).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

from .freemod import (
    DEFAULT_PAIR_CAP,
    EngineInvariantError,
    ModuleElement,
    PolyMatrix,
    Submodule,
    image,
    intersect,
    is_member,
    is_submodule,
    kernel_of_matrix,
    module_equal,
    preimage,
    submodule_sum,
)
from .polyring import Polynomial, Ring, coefficients_in_y

log = logging.getLogger(__name__)

DEFAULT_ITERATION_CAP = 64


class IterationCapError(RuntimeError):
    """An ascending chain failed to stabilise within the configured cap."""


class DimensionError(ValueError):
    pass


class PencilVariableError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SystemPair:
    """Matrices A (n x n) and B (n x m) over the y-free base ring."""

    A: PolyMatrix
    B: PolyMatrix

    def __post_init__(self):
        n = self.A.nrows
        if self.A.ncols != n:
            raise DimensionError(f"A must be square, got {self.A.shape}")
        if self.B.nrows != n:
            raise DimensionError(f"B must have {n} rows, got {self.B.nrows}")
        if self.A.ring != self.B.ring:
            raise DimensionError("A and B live in different rings")
        if not (self.A.is_y_free() and self.B.is_y_free()):
            raise PencilVariableError("pencil variable not allowed in system matrices")

    @classmethod
    def parse(cls, ring: Ring, A, B) -> SystemPair:
        return cls(PolyMatrix.parse(ring, A), PolyMatrix.parse(ring, B))

    @property
    def ring(self) -> Ring:
        return self.A.ring

    @property
    def n(self) -> int:
        return self.A.nrows

    @property
    def m(self) -> int:
        return self.B.ncols

    def pencil(self) -> PolyMatrix:
        """[yE - A, -B] over R[y]."""
        R = self.ring
        y = R.y
        rows = []
        for i in range(self.n):
            row = [(y if i == j else R.zero()) - self.A[i, j] for j in range(self.n)]
            row += [-self.B[i, k] for k in range(self.m)]
            rows.append(row)
        return PolyMatrix(R, rows, ncols=self.n + self.m)


class StateSubmodule(Submodule):
    """A finitely generated R-submodule of R^n (y-free generators)."""

    def __init__(self, ring: Ring, n: int, generators=()):
        super().__init__(ring, n, generators)
        for g in self.generators:
            if not g.is_y_free():
                raise PencilVariableError(f"state vector {g} contains the pencil variable")

    @classmethod
    def of(cls, U: Submodule) -> StateSubmodule:
        return cls(U.ring, U.rank, U.generators)

    @classmethod
    def from_kernel(cls, C: PolyMatrix) -> StateSubmodule:
        """M = ker C for C with n columns, computed over the y-free subring."""
        if not C.is_y_free():
            raise PencilVariableError("pencil variable not allowed in system matrices")
        return cls.of(kernel_of_matrix(C))

    @classmethod
    def full(cls, ring: Ring, n: int) -> StateSubmodule:
        return cls.of(Submodule.full(ring, n))

    @classmethod
    def zero(cls, ring: Ring, n: int) -> StateSubmodule:
        return cls(ring, n, [])

    @property
    def ambient(self) -> int:
        return self.rank


def _check_dims(sys: SystemPair, M: Submodule):
    if M.rank != sys.n:
        raise DimensionError(f"submodule of R^{M.rank} for a system with n = {sys.n}")
    if M.ring != sys.ring:
        raise DimensionError(f"submodule over {M.ring}, system over {sys.ring}")


# -- kernel elements and trajectories -------------------------------------------


@dataclass(frozen=True)
class ControlTrajectory:
    """x_0 = 0, x_{k+1} = A x_k + B u_k for 0 <= k <= d, and x_{d+1} = 0."""

    d: int
    states: tuple[ModuleElement, ...]  # x_0 .. x_{d+1}
    inputs: tuple[ModuleElement, ...]  # u_0 .. u_d

    def violations(self, sys: SystemPair) -> list[str]:
        out = []
        if not self.states:
            return out
        if not self.states[0].is_zero():
            out.append("x_0 != 0")
        if not self.states[-1].is_zero():
            out.append(f"x_{self.d + 1} != 0")
        for k, u in enumerate(self.inputs):
            nxt = sys.A.apply(self.states[k]) + sys.B.apply(u)
            if nxt != self.states[k + 1]:
                out.append(f"x_{k + 1} != A x_{k} + B u_{k}")
        return out

    def check(self, sys: SystemPair) -> None:
        bad = self.violations(sys)
        if bad:
            raise EngineInvariantError("trajectory invariant violated: " + "; ".join(bad))


@dataclass(frozen=True)
class KernelElement:
    """h = (f, g) with (yE - A) f = B g."""

    sys: SystemPair
    h: ModuleElement

    def __post_init__(self):
        if self.h.rank != self.sys.n + self.sys.m:
            raise DimensionError(f"kernel element must have rank {self.sys.n + self.sys.m}")
        if not self.sys.pencil().apply(self.h).is_zero():
            raise EngineInvariantError(f"{self.h} does not annihilate [yE - A, -B]")
        # (yE - A) f has y-degree deg f + 1, so B g must too.
        df, dg = self.f_degree, self.g_degree
        if df >= 0 and dg < df + 1:
            raise EngineInvariantError("deg_y(g) < deg_y(f) + 1 in a kernel element")

    @property
    def f(self) -> ModuleElement:
        return self.h[: self.sys.n]

    @property
    def g(self) -> ModuleElement:
        return self.h[self.sys.n :]

    @property
    def f_degree(self) -> int:
        return max(e.degree_in_y() for e in self.f)

    @property
    def g_degree(self) -> int:
        return max((e.degree_in_y() for e in self.g), default=-1)


def _coefficient_vectors(v: ModuleElement) -> dict[int, ModuleElement]:
    """y-degree -> coefficient vector (in R^rank) of a vector over R[y]."""
    R = v.ring
    out: dict[int, list[Polynomial]] = {}
    for i, e in enumerate(v):
        for k, c in coefficients_in_y(e):
            out.setdefault(k, [R.zero()] * v.rank)[i] = c
    return {k: ModuleElement(R, row) for k, row in out.items()}


def trajectory_from_kernel_element(h: KernelElement) -> ControlTrajectory:
    """Read the finite trajectory encoded by h = (f, g).

    With horizon d, f = x_1 y^{d-1} + ... + x_d and g = u_0 y^d + ... + u_d.
    The horizon is deg_y f + 1, raised to deg_y g when g carries extra top
    coefficients (these then lie in ker B and contribute zero leading states).
    A y-free nonzero f gives d = 1.
    """
    sys = h.sys
    R = sys.ring
    df, dg = h.f_degree, h.g_degree
    d = max(df + 1, dg, 0)
    if d == 0:
        return ControlTrajectory(0, (), ())
    fc = _coefficient_vectors(h.f)
    gc = _coefficient_vectors(h.g)
    zn = ModuleElement.zero(R, sys.n)
    zm = ModuleElement.zero(R, sys.m)
    states = [zn] + [fc.get(d - k, zn) for k in range(1, d + 1)] + [zn]
    inputs = [gc.get(d - k, zm) for k in range(0, d + 1)]
    traj = ControlTrajectory(d, tuple(states), tuple(inputs))
    traj.check(sys)
    return traj


# -- the kernel-based procedure ---------------------------------------------------


class PencilKernelCache:
    """Pencil kernels keyed by system; the kernel does not depend on M."""

    def __init__(self):
        self._store: dict[int, tuple[SystemPair, Submodule]] = {}

    def get(self, sys: SystemPair, compute: Callable[[], Submodule]) -> Submodule:
        hit = self._store.get(id(sys))
        if hit is not None and hit[0] is sys:
            return hit[1]
        K = compute()
        self._store[id(sys)] = (sys, K)
        return K


_KERNELS = PencilKernelCache()


def pencil_kernel(sys: SystemPair, pair_cap: int = DEFAULT_PAIR_CAP) -> Submodule:
    """ker [yE - A, -B] in R[y]^{n+m}."""
    return _KERNELS.get(sys, lambda: kernel_of_matrix(sys.pencil(), pair_cap=pair_cap))


def _split_module(sys: SystemPair, M: Submodule) -> Submodule:
    """M[y] x R[y]^m as a submodule of R[y]^{n+m}."""
    R = sys.ring
    zm = ModuleElement.zero(R, sys.m)
    zn = ModuleElement.zero(R, sys.n)
    gens = [v.concat(zm) for v in M.generators]
    gens += [zn.concat(ModuleElement.unit(R, sys.m, j)) for j in range(sys.m)]
    return Submodule(R, sys.n + sys.m, gens)


def curly_M(
    sys: SystemPair, M: Submodule, method: str = "intersect", pair_cap: int = DEFAULT_PAIR_CAP
) -> Submodule:
    """ker [yE - A, -B] ∩ (M[y] x R[y]^m).

    ``method="intersect"`` intersects the cached pencil kernel with
    M[y] x R[y]^m.  ``method="direct"`` computes the same module as
    {(G a, g) : (yE - A) G a = B g} with G the generator matrix of M, which
    avoids the intersection and serves as a second route.
    """
    _check_dims(sys, M)
    if method == "intersect":
        out = intersect(pencil_kernel(sys, pair_cap), _split_module(sys, M), pair_cap=pair_cap)
    elif method == "direct":
        out = _curly_M_direct(sys, M, pair_cap)
    else:
        raise ValueError(f"unknown method {method!r}")
    P = sys.pencil()
    for h in out.generators:
        if not P.apply(h).is_zero():
            raise EngineInvariantError(f"generator {h} does not annihilate the pencil")
    return out


def _curly_M_direct(sys: SystemPair, M: Submodule, pair_cap: int) -> Submodule:
    R = sys.ring
    n, m = sys.n, sys.m
    if M.is_zero():
        # f = 0 forces B g = 0
        K = kernel_of_matrix(sys.B, pair_cap=pair_cap)
        zn = ModuleElement.zero(R, n)
        return Submodule(R, n + m, [zn.concat(k) for k in K.generators])
    G = PolyMatrix.from_columns(R, M.generators, n)
    P = sys.pencil()
    pencil_state = PolyMatrix(R, [r[:n] for r in P.rows], ncols=n)
    pencil_input = PolyMatrix(R, [r[n:] for r in P.rows], ncols=m)
    K = kernel_of_matrix((pencil_state @ G).hstack(pencil_input), pair_cap=pair_cap)
    k = len(M.generators)
    return Submodule(R, n + m, [G.apply(v[:k]).concat(v[k:]) for v in K.generators])


def cyclic_submodule(f: ModuleElement) -> StateSubmodule:
    """U_f: the R-span of the y-coefficient vectors of f."""
    vecs = _coefficient_vectors(f)
    return StateSubmodule(f.ring, f.rank, [vecs[k] for k in sorted(vecs, reverse=True)])


@dataclass
class ReachabilityResult:
    """Maximal reachability submodule with its (A,B)-cyclic decomposition."""

    module: StateSubmodule
    pieces: list[KernelElement] = field(default_factory=list)
    curly_m: Submodule | None = None

    def cyclic_parts(self) -> list[StateSubmodule]:
        return [cyclic_submodule(k.f) for k in self.pieces]


def max_reachability_kernel(
    sys: SystemPair,
    M: Submodule,
    pair_cap: int = DEFAULT_PAIR_CAP,
    method: str = "intersect",
    curly_m: Submodule | None = None,
) -> ReachabilityResult:
    """Maximal reachability submodule of M from the generators of curly_M (computed unless given)."""
    _check_dims(sys, M)
    CM = curly_m if curly_m is not None else curly_M(sys, M, method=method, pair_cap=pair_cap)
    pieces = [KernelElement(sys, h) for h in CM.generators]
    vecs = []
    for k in pieces:
        vecs.extend(cyclic_submodule(k.f).generators)
    out = StateSubmodule(sys.ring, sys.n, vecs)
    out = StateSubmodule(sys.ring, sys.n, out.canonical)
    return ReachabilityResult(out, pieces, CM)


# -- the iterative two-step procedure ------------------------------------------------


@dataclass
class ChainResult:
    module: StateSubmodule
    steps: list[StateSubmodule]

    @property
    def index(self) -> int:
        """First k with S_k = S_{k+1}."""
        return len(self.steps) - 1


def _tidy(U: Submodule) -> StateSubmodule:
    return StateSubmodule(U.ring, U.rank, U.canonical)


def _ascend(first: Submodule, step: Callable[[Submodule], Submodule], cap: int, label: str) -> ChainResult:
    cur = _tidy(first)
    steps = [cur]
    for _ in range(cap):
        nxt = _tidy(step(cur))
        if not is_submodule(cur, nxt):
            raise EngineInvariantError(f"{label} chain is not ascending at step {len(steps)}")
        if module_equal(cur, nxt):
            log.debug("%s chain stabilised after %d steps", label, len(steps) - 1)
            return ChainResult(cur, steps)
        cur = nxt
        steps.append(cur)
    raise IterationCapError(f"{label} chain did not stabilise within {cap} steps")


def minimal_conditioned(
    sys: SystemPair, M: Submodule, cap: int = DEFAULT_ITERATION_CAP, pair_cap: int = DEFAULT_PAIR_CAP
) -> ChainResult:
    """Limit M_* of S_0 = im B, S_k = im B + A(S_{k-1} ∩ M)."""
    _check_dims(sys, M)
    imB = Submodule.image(sys.B)
    M_ = _tidy(M)

    def step(S):
        return submodule_sum(imB, image(sys.A, intersect(S, M_, pair_cap=pair_cap)))

    return _ascend(imB, step, cap, "S")


def max_reachability_iterative(
    sys: SystemPair,
    M: Submodule,
    cap: int = DEFAULT_ITERATION_CAP,
    pair_cap: int = DEFAULT_PAIR_CAP,
    conditioned: ChainResult | None = None,
) -> ChainResult:
    """Limit of W_0 = M_* ∩ M ∩ A^{-1}(im B), W_k = M_* ∩ M ∩ A^{-1}(W_{k-1} + im B)."""
    _check_dims(sys, M)
    if conditioned is None:
        conditioned = minimal_conditioned(sys, M, cap=cap, pair_cap=pair_cap)
    base = _tidy(intersect(conditioned.module, _tidy(M), pair_cap=pair_cap))
    imB = Submodule.image(sys.B)

    def step(W):
        target = _tidy(submodule_sum(W, imB))
        return intersect(base, _tidy(preimage(sys.A, target, pair_cap=pair_cap)), pair_cap=pair_cap)

    return _ascend(step(Submodule.zero(sys.ring, sys.n)), step, cap, "W")


# -- predicates, oracles, certificates ------------------------------------------


def is_AB_invariant(sys: SystemPair, U: Submodule) -> bool:
    """A U ⊆ U + im B."""
    _check_dims(sys, U)
    target = submodule_sum(U, Submodule.image(sys.B))
    return all(is_member(sys.A.apply(u), target) for u in U.generators)


def reachable_module(sys: SystemPair) -> StateSubmodule:
    """Column span of [B, AB, ..., A^{n-1} B]."""
    cols = []
    block = sys.B.columns()
    for _ in range(sys.n):
        cols.extend(block)
        block = [sys.A.apply(c) for c in block]
    return StateSubmodule(sys.ring, sys.n, cols)


@dataclass
class CertificateReport:
    entries: list[tuple[str, bool, str]] = field(default_factory=list)

    def add(self, clause: str, ok: bool, detail: str = "") -> None:
        self.entries.append((clause, ok, detail))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.entries)

    def failures(self) -> list[tuple[str, str]]:
        return [(c, d) for c, ok, d in self.entries if not ok]

    def failed_clauses(self) -> set[str]:
        return {c for c, _ in self.failures()}

    def lines(self) -> list[str]:
        return [f"[{'ok' if ok else 'FAIL'}] {c}" + (f": {d}" if d else "") for c, ok, d in self.entries]


def verify_reachability_certificate(
    sys: SystemPair, M: Submodule, result: ReachabilityResult
) -> CertificateReport:
    """Check every cyclic piece and the assembled module.

    Clauses: (a) pencil equation, (b) trajectory invariants, (c) states in M,
    (d) result (A,B)-invariant and contained in M.
    """
    report = CertificateReport()
    P = sys.pencil()
    for i, piece in enumerate(result.pieces):
        h = piece.h
        report.add(f"a[{i}] pencil equation", P.apply(h).is_zero())
        try:
            traj = trajectory_from_kernel_element(piece)
            bad = traj.violations(sys)
            report.add(f"b[{i}] trajectory", not bad, "; ".join(bad))
        except EngineInvariantError as exc:
            report.add(f"b[{i}] trajectory", False, str(exc))
            traj = None
        states = traj.states if traj is not None else cyclic_submodule(piece.f).generators
        outside = [str(x) for x in states if not is_member(x, M)]
        report.add(f"c[{i}] states in M", not outside, ", ".join(outside))
    report.add("d invariant", is_AB_invariant(sys, result.module))
    report.add("d contained in M", is_submodule(result.module, M))
    return report
