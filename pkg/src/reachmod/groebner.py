"""Buchberger's algorithm for submodules of free modules over Q[t.., y] or GF(p)[t.., y].

Module elements are handled internally as dicts ``{key: coeff}`` where ``key``
is an order-encoded module term: comparing keys as plain tuples is the module
order, and multiplying by a monomial is componentwise addition of keys.

Over Q the engine works fraction-free: elements are primitive integer vectors
and reduction cross-multiplies by leading coefficients.  Rationals appear only
when results are made monic on the way out.  Over GF(p) elements are monic.
"""

from __future__ import annotations

import contextlib
import contextvars
import heapq
import math
import operator
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .polyring import Polynomial, Ring, decode, encode

_add = operator.add
_sub = operator.sub

DEFAULT_PAIR_CAP = 10**6


class ResourceExhaustedError(RuntimeError):
    """Raised when a computation exceeds its S-pair cap or its work budget."""


_work: contextvars.ContextVar[list | None] = contextvars.ContextVar("reachmod_work", default=None)


@contextlib.contextmanager
def work_budget(terms: int):
    """Bound the term operations (reduction steps weighted by reducer length) in the block.

    S-pair counts say little about cost once coefficients or supports grow,
    so this gives callers a deterministic budget that tracks actual work.
    Exceeding it raises :class:`ResourceExhaustedError`.
    """
    token = _work.set([terms, terms])
    try:
        yield
    finally:
        _work.reset(token)


def _charge(n: int) -> None:
    w = _work.get()
    if w is not None:
        w[0] -= n
        if w[0] < 0:
            raise ResourceExhaustedError(f"work budget of {w[1]} term operations exceeded")


@dataclass(frozen=True)
class ModuleOrder:
    """Monomial order on R[y]^k.

    ``position`` is ``"pot"`` (position over term, lower index dominates) or
    ``"top"`` (term over position, lower index wins ties).  With ``block > 0``
    every position ``< block`` dominates every position ``>= block``; this is the
    elimination order used for syzygies.
    """

    base: str = "grevlex"
    position: str = "pot"
    block: int = 0

    def __post_init__(self):
        if self.position not in ("pot", "top"):
            raise ValueError(f"unknown position rule {self.position!r}")
        encode(self.base, (0,))  # validates the base order name

    def key(self, pos: int, exp: tuple[int, ...]) -> tuple[int, ...]:
        flag = 1 if pos < self.block else 0
        mk = encode(self.base, exp)
        if self.position == "pot":
            return (flag, -pos) + mk
        return (flag,) + mk + (-pos,)

    def split(self, key: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
        if self.position == "pot":
            return -key[1], decode(self.base, key[2:])
        return -key[-1], decode(self.base, key[1:-1])

    def mono_part(self, key: tuple[int, ...]) -> tuple[int, ...]:
        if self.position == "pot":
            return key[2:]
        return key[1:-1]


CANONICAL_ORDER = ModuleOrder("grevlex", "top")


def to_internal(entries: Sequence[Polynomial], order: ModuleOrder) -> dict:
    out = {}
    for pos, f in enumerate(entries):
        for exp, c in f.items():
            out[order.key(pos, exp)] = c
    return out


def from_internal(d: dict, ring: Ring, rank: int, order: ModuleOrder) -> list[Polynomial]:
    rows: list[dict] = [{} for _ in range(rank)]
    for key, c in d.items():
        pos, exp = order.split(key)
        rows[pos][exp] = c
    return [Polynomial(ring, r) for r in rows]


def _submul(v: dict, g: dict, shift: tuple, c, p: int | None) -> None:
    """In place: v -= c * x^shift * g."""
    get = v.get
    if p is None:
        for k, gc in g.items():
            nk = tuple(map(_add, k, shift))
            nc = get(nk, 0) - c * gc
            if nc:
                v[nk] = nc
            else:
                del v[nk]
    else:
        for k, gc in g.items():
            nk = tuple(map(_add, k, shift))
            nc = (get(nk, 0) - c * gc) % p
            if nc:
                v[nk] = nc
            else:
                v.pop(nk, None)


def _submul_cof(v: dict, g: dict, shift: tuple, c, p: int | None) -> None:
    """Cofactor version of :func:`_submul`; keys are (input index,) + monomial key."""
    get = v.get
    for k, gc in g.items():
        nk = (k[0],) + tuple(map(_add, k[1:], shift))
        nc = get(nk, 0) - c * gc
        if p is not None:
            nc %= p
        if nc:
            v[nk] = nc
        else:
            v.pop(nk, None)


def _scale(d: dict, c, p: int | None) -> None:
    if c == 1:
        return
    if p is None:
        for k in d:
            d[k] *= c
    else:
        for k in d:
            d[k] = d[k] * c % p


class _Arith:
    """Coefficient handling: integers (for Q) or residues mod p."""

    def __init__(self, ring: Ring | None, modulus: int | None = None):
        self.ring = ring
        self.p = ring.modulus if ring is not None else modulus

    @classmethod
    def modular(cls, p: int) -> _Arith:
        return cls(None, p)

    def import_(self, d: dict) -> tuple[dict, object]:
        """Integral primitive (Q) or monic (GF(p)) copy of d and the factor applied."""
        if not d:
            return {}, 1
        if self.p is not None:
            inv = pow(d[max(d)], -1, self.p)
            out = dict(d)
            _scale(out, inv, self.p)
            return out, inv
        den = math.lcm(*(Fraction(c).denominator for c in d.values()))
        ints = {k: int(Fraction(c) * den) for k, c in d.items()}
        g = math.gcd(*ints.values())
        if ints[max(ints)] < 0:
            g = -g
        return {k: c // g for k, c in ints.items()}, Fraction(den, g)

    def normalize(self, d: dict, cof: dict | None) -> None:
        """Make d primitive with positive leading coefficient (Q) or monic (GF(p))."""
        if not d:
            return
        if self.p is not None:
            inv = pow(d[max(d)], -1, self.p)
            _scale(d, inv, self.p)
            if cof is not None:
                _scale(cof, inv, self.p)
            return
        g = math.gcd(*d.values())
        if d[max(d)] < 0:
            g = -g
        if g != 1:
            for k in d:
                d[k] //= g
            if cof is not None:
                for k in cof:
                    cof[k] = cof[k] / g

    def export(self, d: dict) -> dict:
        """Monic copy with coefficients in the ring's coefficient field."""
        if not d:
            return {}
        lc = d[max(d)]
        if self.p is not None:
            inv = pow(lc, -1, self.p)
            return {k: c * inv % self.p for k, c in d.items()}
        return {k: Fraction(c, lc) for k, c in d.items()}

    def export_cof(self, cof: dict, d: dict) -> dict:
        lc = d[max(d)]
        if self.p is not None:
            inv = pow(lc, -1, self.p)
            return {k: c * inv % self.p for k, c in cof.items()}
        return {k: Fraction(c) / lc for k, c in cof.items()}


class _Basis:
    """Working set of normalized elements with lead data indexed by position."""

    def __init__(self, arith: _Arith, order: ModuleOrder):
        self.arith = arith
        self.order = order
        self.polys: list[dict] = []
        self.cofs: list[dict | None] = []
        self.leads: list[tuple] = []  # (key, pos, exp, lc)
        self.by_pos: dict[int, list[int]] = {}
        self.active: set[int] = set()

    def add(self, poly: dict, cof: dict | None) -> int:
        key = max(poly)
        pos, exp = self.order.split(key)
        idx = len(self.polys)
        self.polys.append(poly)
        self.cofs.append(cof)
        self.leads.append((key, pos, exp, poly[key]))
        self.by_pos.setdefault(pos, []).append(idx)
        return idx

    def find_divisor(self, pos: int, exp: tuple, among) -> int | None:
        leads = self.leads
        for i in self.by_pos.get(pos, ()):
            if i in among:
                e = leads[i][2]
                if all(a <= b for a, b in zip(e, exp)):
                    return i
        return None

    def reduce(self, v: dict, cof: dict | None, among, full: bool):
        """Reduce ``v`` by the elements with indices in ``among``.

        Returns ``(rem, cof, scale)`` with ``scale * v - rem`` in the span of the
        reducers (``scale`` is 1 over GF(p)).  With ``full=False`` only leading
        terms are reduced.
        """
        order = self.order
        p = self.arith.p
        leads = self.leads
        polys = self.polys
        rem: dict = {}
        v = dict(v)
        cof = dict(cof) if cof is not None else None
        scale = 1
        while v:
            key = max(v)
            pos, exp = order.split(key)
            i = self.find_divisor(pos, exp, among)
            if i is None:
                if not full:
                    v.update(rem)
                    return v, cof, scale
                rem[key] = v.pop(key)
                continue
            a = v[key]
            gkey, _, _, b = leads[i]
            shift = tuple(map(_sub, key, gkey))
            if p is None:
                g0 = math.gcd(a, b)
                mv, c = b // g0, a // g0
                if mv < 0:
                    mv, c = -mv, -c
                if mv != 1:
                    _scale(v, mv, None)
                    _scale(rem, mv, None)
                    if cof is not None:
                        _scale(cof, mv, None)
                    scale *= mv
            else:
                c = a
            _charge(len(polys[i]))
            _submul(v, polys[i], shift, c, p)
            if cof is not None:
                _submul_cof(cof, self.cofs[i], order.mono_part(shift), c, p)
        return rem, cof, scale


def _lcm(a: tuple, b: tuple) -> tuple:
    return tuple(map(max, a, b))


def _divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


@dataclass
class GroebnerBasis:
    """A Groebner basis of a submodule of R[y]^rank.

    Elements are monic.  ``cofactors[i][j]`` is the polynomial multiplier of
    input ``j`` in element ``i`` (present only when tracking was requested).
    """

    ring: Ring
    rank: int
    order: ModuleOrder
    elements: tuple
    cofactors: tuple | None = None
    inputs: tuple | None = None
    pairs_processed: int = 0
    reduced: bool = False

    def __post_init__(self):
        self._arith = _Arith(self.ring)
        self._basis = _Basis(self._arith, self.order)
        for e in self.elements:
            d, _ = self._arith.import_(to_internal(e, self.order))
            self._basis.add(d, None)
        self._all = frozenset(range(len(self.elements)))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def normal_form_entries(self, entries: Sequence[Polynomial]) -> list[Polynomial]:
        v, factor = self._arith.import_(to_internal(entries, self.order))
        rem, _, scale = self._basis.reduce(v, None, self._all, full=True)
        # rem = scale * factor * v mod G
        if self._arith.p is None:
            k = 1 / (Fraction(factor) * scale)
            rem = {key: c * k for key, c in rem.items()}
        else:
            k = pow(factor, -1, self._arith.p)
            rem = {key: c * k % self._arith.p for key, c in rem.items()}
        return from_internal(rem, self.ring, self.rank, self.order)

    def reduces_to_zero(self, entries: Sequence[Polynomial]) -> bool:
        v, _ = self._arith.import_(to_internal(entries, self.order))
        rem, _, _ = self._basis.reduce(v, None, self._all, full=False)
        return not rem

    def leading_keys(self) -> list[tuple]:
        return [l[0] for l in self._basis.leads]


def _sugar(d: dict, order: ModuleOrder) -> int:
    return max(sum(order.split(k)[1]) for k in d)


def buchberger_internal(
    ring: Ring,
    rank: int,
    gens: Sequence[Sequence[Polynomial]],
    order: ModuleOrder,
    track: bool = False,
    reduce_result: bool = True,
    pair_cap: int = DEFAULT_PAIR_CAP,
) -> GroebnerBasis:
    """Groebner basis of the R[y]-span of ``gens`` (each a list of ``rank`` polynomials).

    Pairs are selected by sugar, then by lcm.  Useless pairs are discarded with
    the Gebauer-Moeller installation of Buchberger's chain criterion; the
    coprime criterion is used only when ``rank == 1`` (it is unsound for
    modules).
    """
    arith, B, final, inputs, processed = _buchberger_core(ring, rank, gens, order, track, pair_cap)
    polys = [B.polys[i] for i in final]
    cofs = [B.cofs[i] for i in final] if track else None
    if reduce_result:
        polys, cofs = _interreduce(arith, order, polys, cofs)
    return _package(ring, rank, order, arith, polys, cofs, inputs, processed, reduce_result)


class NotGroebnerError(ArithmeticError):
    """A strict run met an S-vector (or input) that did not reduce to zero."""


def _buchberger_core(ring, rank, gens, order, track, pair_cap):
    arith = _Arith(ring)
    inputs = [list(g) for g in gens]
    imported = [arith.import_(to_internal(g, order)) for g in inputs]
    B, final, processed = _buchberger_dicts(arith, ring.nvars, rank, imported, order, track, pair_cap)
    return arith, B, final, inputs, processed


def _buchberger_dicts(arith, nvars, rank, imported, order, track, pair_cap, strict=False):
    """Buchberger on already imported ``(dict, factor)`` inputs.

    With ``strict`` the inputs are expected to form a Groebner basis already and
    :class:`NotGroebnerError` is raised at the first nonzero remainder.
    """
    p = arith.p
    B = _Basis(arith, order)
    ideal_case = rank == 1
    pairs: set[tuple[int, int]] = set()
    heap: list = []
    sugar: list[int] = []

    def update(h: int) -> None:
        hkey, hpos, hexp, _ = B.leads[h]
        partners = [g for g in B.by_pos.get(hpos, ()) if g in B.active and g != h]
        lcms = {g: _lcm(hexp, B.leads[g][2]) for g in partners}

        def disjoint(g):
            return ideal_case and all(a == 0 or b == 0 for a, b in zip(hexp, B.leads[g][2]))

        C = list(partners)
        D: list[int] = []
        while C:
            g1 = C.pop()
            L = lcms[g1]
            if disjoint(g1) or (
                not any(_divides(lcms[g2], L) for g2 in C)
                and not any(_divides(lcms[g2], L) for g2 in D)
            ):
                D.append(g1)
        for (i, j) in list(pairs):
            if B.leads[i][1] != hpos:
                continue
            L = _lcm(B.leads[i][2], B.leads[j][2])
            if (
                _divides(hexp, L)
                and _lcm(B.leads[i][2], hexp) != L
                and _lcm(hexp, B.leads[j][2]) != L
            ):
                pairs.discard((i, j))
        for g in D:
            if disjoint(g):
                continue
            L = lcms[g]
            dl = sum(L)
            s = max(sugar[g] + dl - sum(B.leads[g][2]), sugar[h] + dl - sum(hexp))
            pair = (min(g, h), max(g, h))
            pairs.add(pair)
            heapq.heappush(heap, (s, order.key(hpos, L), pair))
        for g in list(B.active):
            if g != h and B.leads[g][1] == hpos and _divides(hexp, B.leads[g][2]):
                B.active.discard(g)
        B.active.add(h)

    one = encode(order.base, (0,) * nvars)
    for j, (d, factor) in enumerate(imported):
        if not d:
            continue
        cof = {(j,) + one: factor} if track else None
        s0 = _sugar(d, order)
        if strict:
            if B.find_divisor(*order.split(max(d)), B.active) is not None:
                raise NotGroebnerError("input leading term is reducible")
        else:
            d, cof, _ = B.reduce(d, cof, B.active, full=False)
        if not d:
            continue
        arith.normalize(d, cof)
        sugar.append(max(s0, _sugar(d, order)))
        update(B.add(d, cof))

    processed = 0
    while heap:
        s, L, pair = heapq.heappop(heap)
        if pair not in pairs:
            continue
        pairs.discard(pair)
        processed += 1
        if processed > pair_cap:
            raise ResourceExhaustedError(f"S-pair cap of {pair_cap} exceeded")
        i, j = pair
        ki, _, _, ai = B.leads[i]
        kj, _, _, aj = B.leads[j]
        si = tuple(map(_sub, L, ki))
        sj = tuple(map(_sub, L, kj))
        if p is None:
            g0 = math.gcd(ai, aj)
            ci, cj = aj // g0, ai // g0
        else:
            ci = cj = 1
        S: dict = {}
        _charge(len(B.polys[i]) + len(B.polys[j]))
        _submul(S, B.polys[i], si, -ci, p)
        _submul(S, B.polys[j], sj, cj, p)
        cof = None
        if track:
            cof = {}
            _submul_cof(cof, B.cofs[i], order.mono_part(si), -ci, p)
            _submul_cof(cof, B.cofs[j], order.mono_part(sj), cj, p)
        if not S:
            continue
        S, cof, _ = B.reduce(S, cof, B.active, full=False)
        if not S:
            continue
        if strict:
            raise NotGroebnerError("S-vector with nonzero remainder")
        arith.normalize(S, cof)
        sugar.append(s)
        update(B.add(S, cof))

    final = sorted(B.active, key=lambda i: B.leads[i][0], reverse=True)
    return B, final, processed


def _mul_cof_into(out: dict, sigma: dict, rows: list[dict], p: int | None) -> None:
    """out += sum_k sigma_k * rows[k] (keys are (index,) + monomial key)."""
    for (k, *m1), c1 in sigma.items():
        for (j, *m2), c2 in rows[k].items():
            nk = (j,) + tuple(map(_add, m1, m2))
            nc = out.get(nk, 0) + c1 * c2
            if p is not None:
                nc %= p
            if nc:
                out[nk] = nc
            else:
                out.pop(nk, None)


def syzygies_internal(
    ring: Ring,
    rank: int,
    gens: Sequence[Sequence[Polynomial]],
    order: ModuleOrder,
    pair_cap: int = DEFAULT_PAIR_CAP,
) -> list[list[Polynomial]]:
    """Generators of the syzygy module of ``gens`` by Schreyer's construction.

    With G = F T a Groebner basis of the inputs F (T from cofactor tracking),
    Syz(F) is spanned by T applied to the S-pair syzygies of G together with the
    relations e_j - T s_j, where s_j expresses f_j through G.
    """
    arith, B, final, inputs, _ = _buchberger_core(ring, rank, gens, order, True, pair_cap)
    p = arith.p
    one = encode(order.base, (0,) * ring.nvars)
    H = _Basis(arith, order)
    for k, idx in enumerate(final):
        H.add(B.polys[idx], {(k,) + one: 1})
    T = [B.cofs[idx] for idx in final]
    everything = frozenset(range(len(final)))
    out: list[dict] = []

    def emit(sigma: dict, extra: dict | None = None) -> None:
        syz = dict(extra) if extra else {}
        _mul_cof_into(syz, sigma, T, p)
        if syz:
            out.append(syz)

    for a in range(len(final)):
        ka, pa, ea, ca = H.leads[a]
        for b in range(a + 1, len(final)):
            kb, pb, eb, cb = H.leads[b]
            if pa != pb:
                continue
            L = order.key(pa, _lcm(ea, eb))
            sa = tuple(map(_sub, L, ka))
            sb = tuple(map(_sub, L, kb))
            if p is None:
                g0 = math.gcd(ca, cb)
                xa, xb = cb // g0, ca // g0
            else:
                xa = xb = 1
            S: dict = {}
            _submul(S, H.polys[a], sa, -xa, p)
            _submul(S, H.polys[b], sb, xb, p)
            cof: dict = {}
            _submul_cof(cof, H.cofs[a], order.mono_part(sa), -xa, p)
            _submul_cof(cof, H.cofs[b], order.mono_part(sb), xb, p)
            S, cof, _ = H.reduce(S, cof, everything, full=False)
            if S:
                raise AssertionError("S-vector of a Groebner basis did not reduce to zero")
            emit(cof)
    for j, g in enumerate(inputs):
        d, factor = arith.import_(to_internal(g, order))
        rem, cof, scale = H.reduce(d, {}, everything, full=False)
        if rem:
            raise AssertionError("input does not reduce to zero against its own basis")
        # reduction accumulates minus the quotients: scale * factor * f_j + sum_k cof_k g_k = 0
        emit(cof, {(j,) + one: scale * factor})
    result = []
    for syz in out:
        d, _ = arith.import_(syz)
        rows: list[dict] = [{} for _ in range(len(inputs))]
        for k, v in d.items():
            rows[k[0]][decode(order.base, k[1:])] = v
        result.append([Polynomial(ring, r) for r in rows])
    return result


def _interreduce(arith: _Arith, order: ModuleOrder, polys: list[dict], cofs: list[dict] | None):
    """Minimal, fully interreduced basis from a Groebner basis (still normalized, not monic)."""
    B = _Basis(arith, order)
    for k, d in enumerate(polys):
        B.add(d, cofs[k] if cofs is not None else None)
    n = len(polys)
    keep = []
    for i in range(n):
        _, pos, exp, _ = B.leads[i]
        dominated = False
        for j in range(n):
            if j == i or B.leads[j][1] != pos:
                continue
            ej = B.leads[j][2]
            if _divides(ej, exp) and (ej != exp or j < i):
                dominated = True
                break
        if not dominated:
            keep.append(i)
    out_p, out_c = [], []
    for i in keep:
        others = set(keep) - {i}
        d, c, _ = B.reduce(B.polys[i], B.cofs[i], others, full=True)
        arith.normalize(d, c)
        out_p.append(d)
        out_c.append(c)
    idx = sorted(range(len(out_p)), key=lambda k: max(out_p[k]), reverse=True)
    return [out_p[k] for k in idx], ([out_c[k] for k in idx] if cofs is not None else None)


def _package(ring, rank, order, arith, polys, cofs, inputs, processed, reduced) -> GroebnerBasis:
    elements = tuple(tuple(from_internal(arith.export(d), ring, rank, order)) for d in polys)
    cofactors = None
    if cofs is not None:
        cofactors = []
        for d, c in zip(polys, cofs):
            rows: list[dict] = [{} for _ in range(len(inputs))]
            for k, v in arith.export_cof(c, d).items():
                rows[k[0]][decode(order.base, k[1:])] = v
            cofactors.append(tuple(Polynomial(ring, r) for r in rows))
        cofactors = tuple(cofactors)
    return GroebnerBasis(
        ring=ring,
        rank=rank,
        order=order,
        elements=elements,
        cofactors=cofactors,
        inputs=tuple(tuple(g) for g in inputs),
        pairs_processed=processed,
        reduced=reduced,
    )


def reduce_basis(G: GroebnerBasis) -> GroebnerBasis:
    """Reduced Groebner basis from any Groebner basis (cofactors carried along)."""
    arith = _Arith(G.ring)
    track = G.cofactors is not None
    polys, cofs = [], []
    for k, e in enumerate(G.elements):
        d, factor = arith.import_(to_internal(e, G.order))
        cd = None
        if track:
            cd = {
                (j,) + encode(G.order.base, exp): v * factor
                for j, f in enumerate(G.cofactors[k])
                for exp, v in f.items()
            }
        polys.append(d)
        cofs.append(cd)
    polys, cofs = _interreduce(arith, G.order, polys, cofs if track else None)
    inputs = G.inputs if G.inputs is not None else ()
    return _package(G.ring, G.rank, G.order, arith, polys, cofs, inputs, G.pairs_processed, True)
