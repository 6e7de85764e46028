"""Classical subspace algorithms for the field case (no ring variables).

When R is Q or GF(p), submodules of R^n are subspaces and the maximal
reachability submodule can be computed with plain Gaussian elimination:

* V* is the limit of V_0 = M, V_{k+1} = M ∩ A^{-1}(V_k + im B);
* R* is the limit of R_0 = 0, R_{k+1} = V* ∩ (A R_k + im B).

Everything is exact.  These routines serve as an independent oracle for the
Groebner-based procedures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .freemod import ModuleElement, PolyMatrix, Submodule
from .geocontrol import DimensionError, StateSubmodule, SystemPair
from .polyring import Ring


class NotAFieldError(ValueError):
    """The base ring has variables, so subspace methods do not apply."""


def _require_field(ring: Ring) -> None:
    if not ring.is_field_case:
        raise NotAFieldError(f"field algorithms need a ring without variables, got {ring}")


def _rref(ring: Ring, rows: Sequence[Sequence], ncols: int) -> list[tuple]:
    """Nonzero rows of the reduced row echelon form."""
    mat = [[ring.coeff(c) for c in row] for row in rows]
    p = ring.modulus
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][col]), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = ring.inv(mat[r][col])
        row = [c * inv % p for c in mat[r]] if p is not None else [c * inv for c in mat[r]]
        mat[r] = row
        for i in range(len(mat)):
            if i != r and mat[i][col]:
                f = mat[i][col]
                new = [a - f * b for a, b in zip(mat[i], row)]
                mat[i] = [c % p for c in new] if p is not None else new
        r += 1
    return [tuple(row) for row in mat[:r]]


def _nullspace(ring: Ring, rows: Sequence[Sequence], ncols: int) -> list[tuple]:
    """A basis of {x : rows x = 0}."""
    red = _rref(ring, rows, ncols)
    pivots = [next(j for j, c in enumerate(r) if c) for r in red]
    free = [j for j in range(ncols) if j not in pivots]
    zero = ring.coeff(0)
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = ring.coeff(1)
        for r, pc in zip(red, pivots):
            v[pc] = -r[f] % ring.modulus if ring.modulus is not None else -r[f]
        basis.append(tuple(v))
    return basis


@dataclass(frozen=True)
class Subspace:
    """A subspace of F^n stored by its reduced row echelon basis.

    Two subspaces are equal exactly when their bases are equal.
    """

    ring: Ring
    n: int
    basis: tuple[tuple, ...]

    @classmethod
    def span(cls, ring: Ring, n: int, vectors: Sequence[Sequence]) -> Subspace:
        _require_field(ring)
        for v in vectors:
            if len(v) != n:
                raise DimensionError(f"vector of length {len(v)} in F^{n}")
        return cls(ring, n, tuple(_rref(ring, vectors, n)))

    @classmethod
    def full(cls, ring: Ring, n: int) -> Subspace:
        return cls.span(ring, n, [[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, ring: Ring, n: int) -> Subspace:
        return cls.span(ring, n, [])

    @classmethod
    def image(cls, P: PolyMatrix) -> Subspace:
        return cls.span(P.ring, P.nrows, [_constants(c) for c in P.columns()])

    @classmethod
    def from_submodule(cls, U: Submodule) -> Subspace:
        """The F-span of a y-free submodule; over a field this is the same set."""
        return cls.span(U.ring, U.rank, [_constants(g) for g in U.generators])

    def to_submodule(self) -> StateSubmodule:
        return StateSubmodule(self.ring, self.n, [ModuleElement(self.ring, v) for v in self.basis])

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __contains__(self, v) -> bool:
        return self.span(self.ring, self.n, [*self.basis, v]).dim == self.dim

    def __le__(self, other: Subspace) -> bool:
        return all(v in other for v in self.basis)

    def __add__(self, other: Subspace) -> Subspace:
        return self.span(self.ring, self.n, [*self.basis, *other.basis])

    def annihilator(self) -> list[tuple]:
        """Rows whose common kernel is this subspace."""
        return _nullspace(self.ring, self.basis, self.n)

    def __and__(self, other: Subspace) -> Subspace:
        return self.span(self.ring, self.n, _nullspace(self.ring, self.annihilator() + other.annihilator(), self.n))

    def mapped(self, A: PolyMatrix) -> Subspace:
        """A V."""
        out = [_constants(A.apply(ModuleElement(self.ring, v))) for v in self.basis]
        return self.span(self.ring, A.nrows, out)

    def preimage(self, A: PolyMatrix) -> Subspace:
        """A^{-1} V = {x : A x in V}."""
        a = _matrix(A)
        rows = [[sum(w[i] * a[i][j] for i in range(A.nrows)) for j in range(A.ncols)] for w in self.annihilator()]
        return self.span(self.ring, A.ncols, _nullspace(self.ring, rows, A.ncols))


def _constants(v: ModuleElement) -> list:
    return [e.constant_value() for e in v]


def _matrix(P: PolyMatrix) -> list[list]:
    return [[e.constant_value() for e in r] for r in P.rows]


@dataclass(frozen=True)
class OracleChain:
    result: Subspace
    steps: tuple[Subspace, ...]

    @property
    def index(self) -> int:
        """Number of updates until the chain repeated."""
        return len(self.steps) - 1


def _check(sys: SystemPair, M: Subspace) -> None:
    _require_field(sys.ring)
    if M.n != sys.n or M.ring != sys.ring:
        raise DimensionError(f"subspace of F^{M.n} over {M.ring} for a system with n = {sys.n} over {sys.ring}")


def _iterate(first: Subspace, step, bound: int, label: str) -> OracleChain:
    steps = [first]
    while True:
        nxt = step(steps[-1])
        if nxt == steps[-1]:
            break
        steps.append(nxt)
        if len(steps) - 1 > bound:
            raise AssertionError(f"{label} chain did not stabilise within {bound} steps")
    return OracleChain(steps[-1], tuple(steps))


def vstar_chain(sys: SystemPair, M: Subspace) -> OracleChain:
    _check(sys, M)
    imB = Subspace.image(sys.B)
    return _iterate(M, lambda V: M & (V + imB).preimage(sys.A), sys.n, "V*")


def rstar_chain(sys: SystemPair, M: Subspace) -> OracleChain:
    V = vstar_chain(sys, M).result
    imB = Subspace.image(sys.B)
    return _iterate(Subspace.zero(sys.ring, sys.n), lambda R: V & (R.mapped(sys.A) + imB), sys.n, "R*")


def vstar_isa(sys: SystemPair, M: Subspace) -> Subspace:
    """Maximal (A,B)-invariant subspace contained in M."""
    return vstar_chain(sys, M).result


def rstar_classical(sys: SystemPair, M: Subspace) -> Subspace:
    """Maximal reachability subspace contained in M."""
    return rstar_chain(sys, M).result
