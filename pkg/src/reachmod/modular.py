"""Multi-modular Groebner bases over Q with an exact certificate.

Direct Buchberger over Q can suffer severe intermediate coefficient swell even
when the reduced basis is tiny.  Here the inputs f_1..f_q are embedded as
(f_j, e_j) in R[y]^(rank+q) and the reduced Groebner basis E of that extended
module is computed modulo word-size primes, lifted by CRT and rational
reconstruction, and then certified over Q:

* every element (a, b) of E satisfies a = sum_j b_j f_j, so E lies in the
  extended module, which is exactly {(F b, b)};
* E is a Groebner basis (all S-vectors reduce to zero, checked by a strict
  Buchberger run);
* every (f_j, e_j) reduces to zero modulo E.

Under the block order in which the first ``rank`` positions dominate, the
elements of E with a nonzero head part are the reduced Groebner basis of the
f_j (their tails are the cofactors) and the remaining elements generate the
syzygies.  Nothing probabilistic survives the certificate.

The S-pair cap of one call bounds the pairs processed over all of its primes.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import gmpy2

from .groebner import (
    DEFAULT_PAIR_CAP,
    GroebnerBasis,
    ModuleOrder,
    NotGroebnerError,
    ResourceExhaustedError,
    _Arith,
    _Basis,
    _buchberger_dicts,
    _interreduce,
    _package,
    _submul,
    to_internal,
)
from .polyring import Polynomial, Ring, decode, encode

log = logging.getLogger(__name__)

DEFAULT_MAX_PRIMES = 200
_PRIME_START = 2**31 - 2**24


def primes(start: int = _PRIME_START) -> Iterator[int]:
    p = start
    while True:
        p = int(gmpy2.next_prime(p))
        yield p


def rational_reconstruction(a: int, m: int) -> Fraction | None:
    """The fraction r/s with r = s*a mod m and |r|, s <= sqrt(m/2), if any."""
    bound = math.isqrt(m // 2)
    r0, r1 = m, a % m
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or math.gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


@dataclass
class ExtendedBasis:
    """Certified reduced basis of the extended module, split into its two parts.

    ``basis`` holds monic internal dicts keyed by the caller's order; ``cofactors``
    and ``syzygies`` are dicts keyed ``(j,) + monomial key`` referring to the
    original (unnormalized) inputs.
    """

    basis: list[dict]
    cofactors: list[dict]
    syzygies: list[dict]
    primes_used: int
    pairs_processed: int


class _Lift:
    """CRT accumulator for one leading-term signature."""

    def __init__(self, polys: list[dict], p: int):
        self.modulus = p
        self.residues = [dict(d) for d in polys]
        self.candidate: list[dict] | None = None

    def absorb(self, polys: list[dict], p: int) -> None:
        m = self.modulus
        inv = pow(m, -1, p)
        for acc, new in zip(self.residues, polys):
            for k in new.keys() - acc.keys():
                acc[k] = 0
            for k, r in acc.items():
                acc[k] = r + m * ((new.get(k, 0) - r) * inv % p)
        self.modulus = m * p

    def reconstruct(self) -> list[dict] | None:
        out = []
        for acc in self.residues:
            d = {}
            for k, r in acc.items():
                f = rational_reconstruction(r, self.modulus)
                if f is None:
                    return None
                if f:
                    d[k] = f
            out.append(d)
        return out


def _agrees(candidate: list[dict], polys: list[dict], p: int) -> bool:
    for c, d in zip(candidate, polys):
        if c.keys() != d.keys():
            return False
        for k, f in c.items():
            if f.denominator % p == 0 or f.numerator * pow(f.denominator, -1, p) % p != d[k]:
                return False
    return True


def extended_groebner(
    ring: Ring,
    rank: int,
    gens: Sequence[Sequence[Polynomial]],
    order: ModuleOrder,
    pair_cap: int = DEFAULT_PAIR_CAP,
    max_primes: int = DEFAULT_MAX_PRIMES,
) -> ExtendedBasis:
    """Certified reduced basis of the span of the (f_j, e_j); memoized, so treat the result as read-only."""
    return _extended_cached(ring, rank, tuple(tuple(g) for g in gens), order, pair_cap, max_primes)


@functools.lru_cache(maxsize=1024)
def _extended_cached(ring, rank, gens, order, pair_cap, max_primes) -> ExtendedBasis:
    if ring.modulus is not None:
        raise ValueError("the modular engine is for rational coefficients")
    if order.block:
        raise ValueError("the modular engine needs an order without its own block")
    q = len(gens)
    ext = ModuleOrder(order.base, order.position, block=rank)
    arith = _Arith(ring)
    zero_exp = (0,) * ring.nvars
    heads, factors = [], []
    for g in gens:
        d, factor = arith.import_(to_internal(g, ext))
        heads.append(d)
        factors.append(factor)
    extended = []
    for j, d in enumerate(heads):
        e = dict(d)
        e[ext.key(rank + j, zero_exp)] = 1
        extended.append(e)
    lcs = [d[max(d)] for d in heads if d]

    lifts: dict[tuple, _Lift] = {}
    used = 0
    pairs = 0
    for p in primes():
        if used >= max_primes:
            raise ResourceExhaustedError(f"modular lifting did not certify within {max_primes} primes")
        if any(c % p == 0 for c in lcs):
            continue
        used += 1
        ap = _Arith.modular(p)
        imported = [ap.import_({k: c % p for k, c in e.items()}) for e in extended]
        try:
            B, final, processed = _buchberger_dicts(ap, ring.nvars, rank + q, imported, ext, False, pair_cap - pairs)
        except ResourceExhaustedError:
            raise ResourceExhaustedError(f"S-pair cap of {pair_cap} exceeded over {used} primes") from None
        pairs += processed
        polys, _ = _interreduce(ap, ext, [B.polys[i] for i in final], None)
        sig = tuple(max(d) for d in polys)
        lift = lifts.get(sig)
        if lift is None:
            lift = lifts[sig] = _Lift(polys, p)
        else:
            if lift.candidate is not None and _agrees(lift.candidate, polys, p):
                if _certify(arith, ring, ext, rank, heads, extended, lift.candidate):
                    log.debug("modular basis certified with %d primes", used)
                    return _split(lift.candidate, ext, rank, factors, used, pairs)
            lift.absorb(polys, p)
        lift.candidate = lift.reconstruct()
    raise AssertionError("unreachable")


def _certify(arith, ring, ext, rank, heads, extended, candidate) -> bool:
    polys = [arith.import_(d)[0] for d in candidate]
    for d in polys:
        rest = {}
        for k, c in d.items():
            pos, exp = ext.split(k)
            if pos < rank:
                rest[k] = c
        for k, c in d.items():
            pos, exp = ext.split(k)
            if pos >= rank:
                _submul(rest, heads[pos - rank], _shift(ext, exp), c, None)
        if rest:
            return False
    try:
        _buchberger_dicts(
            arith, ring.nvars, rank + len(heads), [(d, 1) for d in polys], ext, False, DEFAULT_PAIR_CAP, strict=True
        )
    except NotGroebnerError:
        return False
    basis = _Basis(arith, ext)
    for d in polys:
        basis.add(d, None)
    everything = frozenset(range(len(polys)))
    for e in extended:
        rem, _, _ = basis.reduce(e, None, everything, full=False)
        if rem:
            return False
    return True


def _shift(order: ModuleOrder, exp: tuple) -> tuple:
    """Key offset that multiplies an internal element by the monomial ``exp``."""
    mk = encode(order.base, exp)
    if order.position == "pot":
        return (0, 0) + mk
    return (0,) + mk + (0,)


def _split(candidate, ext, rank, factors, used, pairs) -> ExtendedBasis:
    basis, cofactors, syzygies = [], [], []
    for d in candidate:
        head, tail = {}, {}
        for k, c in d.items():
            pos, exp = ext.split(k)
            if pos < rank:
                head[(0,) + k[1:]] = c
            else:
                j = pos - rank
                tail[(j,) + encode(ext.base, exp)] = c * factors[j]
        if head:
            basis.append(head)
            cofactors.append(tail)
        else:
            syzygies.append(tail)
    return ExtendedBasis(basis, cofactors, syzygies, used, pairs)


def _spanning_subset(ring: Ring, rank: int, gens, order: ModuleOrder, pair_cap: int) -> list[int]:
    """Indices of inputs that span the whole module modulo one prime.

    Only a heuristic: the caller certifies the choice over Q.
    """
    arith = _Arith(ring)
    dicts = [arith.import_(to_internal(g, order))[0] for g in gens]
    lcs = [d[max(d)] for d in dicts if d]
    p = next(p for p in primes() if all(c % p for c in lcs))
    ap = _Arith.modular(p)
    modp = [ap.import_({k: c % p for k, c in d.items()}) for d in dicts]
    ranked = sorted((i for i, d in enumerate(dicts) if d), key=lambda i: (max(sum(order.split(k)[1]) for k in dicts[i]), len(dicts[i])))
    chosen: list[int] = []
    basis = _Basis(ap, order)
    for i in ranked:
        rem, _, _ = basis.reduce(modp[i][0], None, frozenset(range(len(basis.polys))), full=False)
        if not rem:
            continue
        chosen.append(i)
        B, final, _ = _buchberger_dicts(ap, ring.nvars, rank, [modp[j] for j in chosen], order, False, pair_cap)
        basis = _Basis(ap, order)
        for j in final:
            basis.add(B.polys[j], None)
    return sorted(chosen)


def modular_groebner(
    ring: Ring,
    rank: int,
    gens: Sequence[Sequence[Polynomial]],
    order: ModuleOrder,
    pair_cap: int = DEFAULT_PAIR_CAP,
    max_primes: int = DEFAULT_MAX_PRIMES,
) -> GroebnerBasis:
    """Reduced Groebner basis with cofactors, computed modularly and certified.

    The extended computation runs on a subset of the inputs that spans the
    module modulo a prime; the remaining inputs are then checked to reduce to
    zero over Q, and the full input list is used if one does not.
    """
    gens = [list(g) for g in gens]
    chosen = _spanning_subset(ring, rank, gens, order, pair_cap)
    X = extended_groebner(ring, rank, [gens[i] for i in chosen], order, pair_cap, max_primes)
    arith = _Arith(ring)
    basis = _Basis(arith, order)
    for d in X.basis:
        basis.add(arith.import_(d)[0], None)
    everything = frozenset(range(len(X.basis)))
    dropped = set(range(len(gens))) - set(chosen)
    if all(not basis.reduce(arith.import_(to_internal(gens[i], order))[0], None, everything, False)[0] for i in dropped):
        cofactors = [{(chosen[k[0]],) + k[1:]: c for k, c in cof.items()} for cof in X.cofactors]
    else:
        log.debug("spanning subset was unlucky; using every input")
        X = extended_groebner(ring, rank, gens, order, pair_cap, max_primes)
        cofactors = X.cofactors
    return _package(ring, rank, order, arith, X.basis, cofactors, gens, X.pairs_processed, True)


def modular_syzygies(
    ring: Ring,
    rank: int,
    gens: Sequence[Sequence[Polynomial]],
    order: ModuleOrder,
    pair_cap: int = DEFAULT_PAIR_CAP,
    max_primes: int = DEFAULT_MAX_PRIMES,
) -> list[list[Polynomial]]:
    X = extended_groebner(ring, rank, gens, order, pair_cap, max_primes)
    out = []
    for syz in X.syzygies:
        rows: list[dict] = [{} for _ in gens]
        for k, c in syz.items():
            rows[k[0]][decode(order.base, k[1:])] = c
        out.append([Polynomial(ring, r) for r in rows])
    return out
