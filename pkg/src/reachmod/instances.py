"""Seeded random systems for property tests and experiment scripts."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .freemod import ModuleElement, PolyMatrix
from .geocontrol import StateSubmodule, SystemPair
from .polyring import Polynomial, Ring

VARIABLE_NAMES = ("t", "w")


@dataclass(frozen=True)
class InstanceConfig:
    """Shape of random instances.  Entries are affine in the ring variables."""

    max_n: int = 4
    max_m: int = 2
    max_vars: int = 2
    coeff_bound: int = 2
    zero_probability: float = 0.3
    modulus: int | None = None


RING_CONFIG = InstanceConfig()
FIELD_CONFIG = InstanceConfig(max_n=5, max_m=3, max_vars=0, coeff_bound=3)


def random_entry(R: Ring, rnd: random.Random, cfg: InstanceConfig) -> Polynomial:
    if rnd.random() < cfg.zero_probability:
        return R.zero()
    b = cfg.coeff_bound
    e = R.const(rnd.randint(-b, b))
    for v in R.variables:
        if rnd.random() < 0.5:
            e = e + R.gen(v) * rnd.randint(-b, b)
    return e


def random_instance(rnd: random.Random, cfg: InstanceConfig = RING_CONFIG) -> tuple[SystemPair, StateSubmodule]:
    """A system with n <= max_n, m <= max_m and a submodule M that often meets im B."""
    R = Ring(VARIABLE_NAMES[: rnd.randint(0, cfg.max_vars)], cfg.modulus)
    n = rnd.randint(1, cfg.max_n)
    m = rnd.randint(1, cfg.max_m)

    def entry():
        return random_entry(R, rnd, cfg)

    A = PolyMatrix(R, [[entry() for _ in range(n)] for _ in range(n)])
    B = PolyMatrix(R, [[entry() for _ in range(m)] for _ in range(n)])
    gens = [ModuleElement(R, [entry() for _ in range(n)]) for _ in range(rnd.randint(0, n))]
    if rnd.random() < 0.5:
        gens.append(B.column(0))
    if rnd.random() < 0.5:
        gens.append(A.apply(B.column(0)))
    return SystemPair(A, B), StateSubmodule(R, n, gens)
