"""Finitely generated submodules of free modules R[y]^k.

Every submodule is presented by generators; its identity is the reduced
Groebner basis under :data:`CANONICAL_ORDER`.  Kernels, intersections and
preimages are all computed through syzygies (:func:`kernel_of_matrix`).
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Sequence

from .groebner import (
    CANONICAL_ORDER,
    DEFAULT_PAIR_CAP,
    GroebnerBasis,
    ModuleOrder,
    buchberger_internal,
    reduce_basis,
    syzygies_internal,
)
from .modular import modular_groebner, modular_syzygies
from .polyring import Polynomial, Ring, RingMismatchError, render_polynomial

ENGINES = ("auto", "direct", "modular")


def _engine(ring: Ring, order: ModuleOrder, engine: str) -> str:
    """Resolve ``engine`` to ``"direct"`` or ``"modular"``."""
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    if ring.modulus is not None or order.block:
        return "direct"
    return "modular" if engine == "auto" else engine


class RankMismatchError(ValueError):
    pass


class EngineInvariantError(AssertionError):
    """A post-condition check on an engine result failed (a bug, not a user error)."""


class ModuleElement:
    """Immutable vector of polynomials in R[y]^rank."""

    __slots__ = ("ring", "entries")

    def __init__(self, ring: Ring, entries: Iterable):
        self.ring = ring
        out = []
        for e in entries:
            if not isinstance(e, Polynomial):
                e = ring.const(e)
            elif e.ring != ring:
                raise RingMismatchError(f"{e.ring} vs {ring}")
            out.append(e)
        self.entries = tuple(out)

    @classmethod
    def parse(cls, ring: Ring, texts: Sequence[str]) -> ModuleElement:
        return cls(ring, [ring.parse(t) for t in texts])

    @classmethod
    def zero(cls, ring: Ring, rank: int) -> ModuleElement:
        return cls(ring, [ring.zero()] * rank)

    @classmethod
    def unit(cls, ring: Ring, rank: int, i: int) -> ModuleElement:
        return cls(ring, [ring.one() if j == i else ring.zero() for j in range(rank)])

    @property
    def rank(self) -> int:
        return len(self.entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return ModuleElement(self.ring, self.entries[i])
        return self.entries[i]

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.entries)

    def is_y_free(self) -> bool:
        return all(e.is_y_free() for e in self.entries)

    def _check(self, other: ModuleElement):
        if other.ring != self.ring:
            raise RingMismatchError(f"{self.ring} vs {other.ring}")
        if other.rank != self.rank:
            raise RankMismatchError(f"rank {self.rank} vs {other.rank}")

    def __add__(self, other: ModuleElement) -> ModuleElement:
        self._check(other)
        return ModuleElement(self.ring, [a + b for a, b in zip(self, other)])

    def __sub__(self, other: ModuleElement) -> ModuleElement:
        self._check(other)
        return ModuleElement(self.ring, [a - b for a, b in zip(self, other)])

    def __neg__(self):
        return ModuleElement(self.ring, [-a for a in self])

    def __mul__(self, c) -> ModuleElement:
        return ModuleElement(self.ring, [a * c for a in self])

    __rmul__ = __mul__

    def concat(self, other: ModuleElement) -> ModuleElement:
        return ModuleElement(self.ring, self.entries + other.entries)

    def __eq__(self, other):
        if not isinstance(other, ModuleElement):
            return NotImplemented
        return self.ring == other.ring and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __str__(self):
        return render_vector(self)

    def __repr__(self):
        return f"ModuleElement{render_vector(self)}"


def render_vector(v: ModuleElement) -> str:
    return "(" + ", ".join(render_polynomial(e) for e in v) + ")"


class PolyMatrix:
    """Rectangular matrix of polynomials; acts on column vectors."""

    def __init__(self, ring: Ring, rows: Sequence[Sequence], ncols: int | None = None):
        self.ring = ring
        self.rows = tuple(tuple(ring.const(e) if not isinstance(e, Polynomial) else e for e in r) for r in rows)
        widths = {len(r) for r in self.rows}
        if len(widths) > 1:
            raise ValueError("matrix rows have different lengths")
        self.ncols = widths.pop() if widths else (ncols or 0)
        for r in self.rows:
            for e in r:
                if e.ring != ring:
                    raise RingMismatchError(f"{e.ring} vs {ring}")

    @classmethod
    def parse(cls, ring: Ring, rows: Sequence[Sequence[str]]) -> PolyMatrix:
        return cls(ring, [[ring.parse(e) for e in r] for r in rows])

    @classmethod
    def from_columns(cls, ring: Ring, cols: Sequence[ModuleElement], nrows: int) -> PolyMatrix:
        rows = [[c[i] for c in cols] for i in range(nrows)]
        return cls(ring, rows, ncols=len(cols))

    @classmethod
    def identity(cls, ring: Ring, n: int) -> PolyMatrix:
        return cls(ring, [[1 if i == j else 0 for j in range(n)] for i in range(n)], ncols=n)

    @classmethod
    def zeros(cls, ring: Ring, p: int, q: int) -> PolyMatrix:
        return cls(ring, [[0] * q for _ in range(p)], ncols=q)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> ModuleElement:
        return ModuleElement(self.ring, [r[j] for r in self.rows])

    def columns(self) -> list[ModuleElement]:
        return [self.column(j) for j in range(self.ncols)]

    def apply(self, v: ModuleElement) -> ModuleElement:
        if v.rank != self.ncols:
            raise RankMismatchError(f"matrix has {self.ncols} columns, vector rank {v.rank}")
        zero = self.ring.zero()
        out = []
        for r in self.rows:
            acc = zero
            for a, b in zip(r, v):
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return ModuleElement(self.ring, out)

    def __matmul__(self, other: PolyMatrix) -> PolyMatrix:
        cols = [self.apply(c) for c in other.columns()]
        return PolyMatrix.from_columns(self.ring, cols, self.nrows)

    def hstack(self, other: PolyMatrix) -> PolyMatrix:
        if other.nrows != self.nrows:
            raise RankMismatchError("row counts differ")
        return PolyMatrix(self.ring, [a + b for a, b in zip(self.rows, other.rows)], ncols=self.ncols + other.ncols)

    def __neg__(self):
        return PolyMatrix(self.ring, [[-e for e in r] for r in self.rows], ncols=self.ncols)

    def is_y_free(self) -> bool:
        return all(e.is_y_free() for r in self.rows for e in r)

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.shape == other.shape and self.rows == other.rows

    def __str__(self):
        return "[" + "; ".join(", ".join(render_polynomial(e) for e in r) for r in self.rows) + "]"


class Submodule:
    """The R[y]-span of finitely many generators in R[y]^rank.

    Zero and duplicate generators are dropped.  Reduced Groebner bases are
    cached per module order.
    """

    def __init__(self, ring: Ring, rank: int, generators: Iterable[ModuleElement] = ()):
        self.ring = ring
        self.rank = rank
        gens: list[ModuleElement] = []
        seen = set()
        for g in generators:
            if not isinstance(g, ModuleElement):
                g = ModuleElement(ring, g)
            if g.ring != ring:
                raise RingMismatchError(f"{g.ring} vs {ring}")
            if g.rank != rank:
                raise RankMismatchError(f"generator of rank {g.rank} in a rank-{rank} module")
            if g.is_zero() or g in seen:
                continue
            seen.add(g)
            gens.append(g)
        self.generators: tuple[ModuleElement, ...] = tuple(gens)
        self._gb: dict[ModuleOrder, GroebnerBasis] = {}
        self.pair_cap = DEFAULT_PAIR_CAP

    @classmethod
    def full(cls, ring: Ring, rank: int) -> Submodule:
        return cls(ring, rank, [ModuleElement.unit(ring, rank, i) for i in range(rank)])

    @classmethod
    def zero(cls, ring: Ring, rank: int) -> Submodule:
        return cls(ring, rank, [])

    @classmethod
    def image(cls, P: PolyMatrix) -> Submodule:
        return cls(P.ring, P.nrows, P.columns())

    def gb(self, order: ModuleOrder = CANONICAL_ORDER) -> GroebnerBasis:
        """Reduced Groebner basis under ``order`` (computed once per order)."""
        if order not in self._gb:
            self._gb[order] = buchberger(self, order, pair_cap=self.pair_cap)
        return self._gb[order]

    @cached_property
    def canonical(self) -> tuple[ModuleElement, ...]:
        """Reduced Groebner basis under the canonical order, sorted by leading term."""
        return tuple(ModuleElement(self.ring, e) for e in self.gb(CANONICAL_ORDER).elements)

    def is_zero(self) -> bool:
        return not self.generators

    def is_y_free(self) -> bool:
        return all(g.is_y_free() for g in self.generators)

    def __contains__(self, v: ModuleElement) -> bool:
        return is_member(v, self)

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __repr__(self):
        return f"Submodule(rank={self.rank}, generators=[{', '.join(map(str, self.generators))}])"


# -- operations ----------------------------------------------------------------


def _check_rank(U: Submodule, V: Submodule):
    if U.ring != V.ring:
        raise RingMismatchError(f"{U.ring} vs {V.ring}")
    if U.rank != V.rank:
        raise RankMismatchError(f"rank {U.rank} vs {V.rank}")


def buchberger(
    gens: Submodule | Sequence[ModuleElement],
    order: ModuleOrder = CANONICAL_ORDER,
    *,
    track: bool = False,
    reduce: bool = True,
    pair_cap: int = DEFAULT_PAIR_CAP,
    engine: str = "auto",
) -> GroebnerBasis:
    """Groebner basis of the span of ``gens``.

    With ``track=True`` each basis element carries the cofactors expressing it
    in the (nonzero, deduplicated) input generators.  Over Q the default
    (``auto`` or ``modular``) lifts and certifies modular bases, which are
    always reduced and always carry cofactors; ``direct`` runs fraction-free
    Buchberger over Q.  Over GF(p), and for block orders, the direct engine
    always runs.
    """
    if isinstance(gens, Submodule):
        ring, rank, elems = gens.ring, gens.rank, list(gens.generators)
    else:
        elems = [g for g in gens if not g.is_zero()]
        if not elems:
            raise ValueError("cannot infer ring and rank from an empty generator list")
        ring, rank = elems[0].ring, elems[0].rank
    entries = [g.entries for g in elems]
    if _engine(ring, order, engine) == "modular":
        return modular_groebner(ring, rank, entries, order, pair_cap)
    return buchberger_internal(ring, rank, entries, order, track=track, reduce_result=reduce, pair_cap=pair_cap)


def reduced_gb(G: GroebnerBasis) -> GroebnerBasis:
    return G if G.reduced else reduce_basis(G)


def normal_form(v: ModuleElement, G: GroebnerBasis) -> ModuleElement:
    if v.rank != G.rank:
        raise RankMismatchError(f"rank {v.rank} vs {G.rank}")
    if v.ring != G.ring:
        raise RingMismatchError(f"{v.ring} vs {G.ring}")
    return ModuleElement(v.ring, G.normal_form_entries(v.entries))


def is_member(v: ModuleElement, U: Submodule) -> bool:
    if v.rank != U.rank:
        raise RankMismatchError(f"rank {v.rank} vs {U.rank}")
    if v.is_zero():
        return True
    if U.is_zero():
        return False
    return U.gb().reduces_to_zero(v.entries)


def is_submodule(U: Submodule, V: Submodule) -> bool:
    """U is contained in V."""
    _check_rank(U, V)
    return all(is_member(g, V) for g in U.generators)


def module_equal(U: Submodule, V: Submodule) -> bool:
    """Equality of spans via reduced Groebner bases under the canonical order."""
    _check_rank(U, V)
    return U.canonical == V.canonical


def submodule_sum(U: Submodule, V: Submodule) -> Submodule:
    _check_rank(U, V)
    return Submodule(U.ring, U.rank, U.generators + V.generators)


KERNEL_METHODS = ("schreyer", "eliminate")


def kernel_of_matrix(
    P: PolyMatrix,
    base: str = "grevlex",
    pair_cap: int = DEFAULT_PAIR_CAP,
    method: str = "schreyer",
    engine: str = "auto",
) -> Submodule:
    """Syzygy module {v in R[y]^q : P v = 0}.

    ``method="schreyer"`` lifts the S-pair syzygies of a term-over-position
    Groebner basis of P's columns.  ``method="eliminate"`` augments column j
    with the unit vector e_j and eliminates the first p positions of a block
    order; the surviving lower blocks generate the kernel.  Over Q the
    default engine is modular, which always runs the elimination
    construction, so ``method`` only selects the algorithm of the direct
    engine.  Every returned generator is post-checked.
    """
    if method not in KERNEL_METHODS:
        raise ValueError(f"unknown kernel method {method!r}")
    p, q = P.shape
    ring = P.ring
    if q == 0:
        return Submodule.zero(ring, 0)
    cols = [P.column(j).entries for j in range(q)]
    top = ModuleOrder(base, "top")
    if _engine(ring, top, engine) == "modular":
        raw = modular_syzygies(ring, p, cols, top, pair_cap)
    elif method == "schreyer":
        raw = syzygies_internal(ring, p, cols, top, pair_cap)
    else:
        gens = []
        for j in range(q):
            unit = tuple(ring.one() if i == j else ring.zero() for i in range(q))
            gens.append(cols[j] + unit)
        G = buchberger_internal(ring, p + q, gens, ModuleOrder(base, "top", block=p), pair_cap=pair_cap)
        raw = [e[p:] for e in G.elements if all(x.is_zero() for x in e[:p])]
    kernel = [ModuleElement(ring, v) for v in raw]
    for v in kernel:
        if not P.apply(v).is_zero():
            raise EngineInvariantError(f"kernel generator {v} is not annihilated")
    return Submodule(ring, q, kernel)


def _generator_matrix(U: Submodule) -> PolyMatrix:
    return PolyMatrix.from_columns(U.ring, U.generators, U.rank)


def intersect(U: Submodule, V: Submodule, pair_cap: int = DEFAULT_PAIR_CAP) -> Submodule:
    """U ∩ V from the syzygies (a, b) of [G_U | -G_V]."""
    _check_rank(U, V)
    if U.is_zero() or V.is_zero():
        return Submodule.zero(U.ring, U.rank)
    GU = _generator_matrix(U)
    K = kernel_of_matrix(GU.hstack(-_generator_matrix(V)), pair_cap=pair_cap)
    a = len(U.generators)
    out = Submodule(U.ring, U.rank, [GU.apply(k[:a]) for k in K.generators])
    for g in out.generators:
        if not (is_member(g, U) and is_member(g, V)):
            raise EngineInvariantError(f"intersection generator {g} escapes an operand")
    return out


def preimage(P: PolyMatrix, V: Submodule, pair_cap: int = DEFAULT_PAIR_CAP) -> Submodule:
    """{x in R[y]^q : P x in V}."""
    if P.nrows != V.rank:
        raise RankMismatchError(f"matrix has {P.nrows} rows, module rank {V.rank}")
    q = P.ncols
    if V.is_zero():
        K = kernel_of_matrix(P, pair_cap=pair_cap)
        return K
    M = P.hstack(-_generator_matrix(V))
    K = kernel_of_matrix(M, pair_cap=pair_cap)
    out = Submodule(P.ring, q, [k[:q] for k in K.generators])
    for x in out.generators:
        if not is_member(P.apply(x), V):
            raise EngineInvariantError(f"preimage generator {x} is not mapped into the target")
    return out


def image(P: PolyMatrix, U: Submodule) -> Submodule:
    """P(U), the span of the images of U's generators."""
    return Submodule(P.ring, P.nrows, [P.apply(g) for g in U.generators])
