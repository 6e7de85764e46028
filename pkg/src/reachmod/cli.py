"""Command-line front end: ``reachmod COMMAND SYSTEM_FILE [flags]``.

System files are JSON documents::

    {"ring": {"variables": ["t"], "coefficients": "Q"},
     "A": [["0", "1"], ["t", "0"]],
     "B": [["1"], ["0"]],
     "M": {"image": [["1"], ["0"]]}}

``coefficients`` is ``"Q"`` or a prime.  ``M`` is given either by generator
columns (``image``) or as the kernel of a matrix with n columns (``kernel``).
"""

from __future__ import annotations

import argparse
import enum
import json
import logging
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import gmpy2

from .field_oracle import NotAFieldError, Subspace, rstar_chain
from .freemod import ModuleElement, PolyMatrix, Submodule, module_equal, render_vector
from .geocontrol import (
    DimensionError,
    IterationCapError,
    PencilVariableError,
    ReachabilityResult,
    StateSubmodule,
    SystemPair,
    curly_M,
    is_AB_invariant,
    max_reachability_iterative,
    max_reachability_kernel,
    minimal_conditioned,
    pencil_kernel,
    verify_reachability_certificate,
)
from .groebner import DEFAULT_PAIR_CAP, ModuleOrder, ResourceExhaustedError
from .polyring import ORDERS, PolynomialParseError, Ring, render_polynomial

log = logging.getLogger("reachmod")

COMMANDS = ("maxreach", "kernel", "curly-m", "invariant-check", "compare", "oracle")


class Exit(enum.IntEnum):
    OK = 0
    USAGE = 2
    PARSE = 3
    DIMENSION = 4
    CAP = 5
    VERIFICATION = 6
    DISAGREEMENT = 7


class SystemFileError(ValueError):
    def __init__(self, message: str, code: Exit = Exit.PARSE):
        super().__init__(message)
        self.code = code


# -- system files ---------------------------------------------------------------


@dataclass
class SystemFile:
    ring: Ring
    system: SystemPair
    M: StateSubmodule


def _matrix(ring: Ring, data, name: str, path: str) -> PolyMatrix:
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise SystemFileError(f"{path}: {name}: expected a list of rows")
    rows = []
    for i, r in enumerate(data):
        row = []
        for j, e in enumerate(r):
            if isinstance(e, bool) or not isinstance(e, (str, int)):
                raise SystemFileError(f"{path}: {name}[{i}][{j}]: expected a polynomial string, got {e!r}")
            try:
                row.append(ring.parse(str(e)))
            except PolynomialParseError as exc:
                raise SystemFileError(f"{path}: {name}[{i}][{j}]: {exc}") from None
        rows.append(row)
    if len({len(r) for r in rows}) > 1:
        raise SystemFileError(f"{path}: {name}: rows have different lengths", Exit.DIMENSION)
    P = PolyMatrix(ring, rows)
    if not P.is_y_free():
        raise SystemFileError(f"{path}: {name}: pencil variable not allowed in system matrices")
    return P


def _ring(spec, path: str) -> Ring:
    if not isinstance(spec, dict):
        raise SystemFileError(f"{path}: ring: expected an object")
    variables = spec.get("variables", [])
    coeffs = spec.get("coefficients", "Q")
    if not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
        raise SystemFileError(f"{path}: ring.variables: expected a list of names")
    if coeffs in ("Q", "QQ"):
        modulus = None
    elif isinstance(coeffs, int) and not isinstance(coeffs, bool) and gmpy2.is_prime(coeffs):
        modulus = coeffs
    else:
        raise SystemFileError(f"{path}: ring.coefficients: expected \"Q\" or a prime, got {coeffs!r}")
    try:
        return Ring(tuple(variables), modulus)
    except ValueError as exc:
        raise SystemFileError(f"{path}: ring: {exc}") from None


def parse_system_file(path: str | Path) -> SystemFile:
    path = str(path)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SystemFileError(f"{path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SystemFileError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise SystemFileError(f"{path}: expected a JSON object at top level")
    for key in ("ring", "A", "B", "M"):
        if key not in doc:
            raise SystemFileError(f"{path}: missing field {key!r}")
    ring = _ring(doc["ring"], path)
    A = _matrix(ring, doc["A"], "A", path)
    B = _matrix(ring, doc["B"], "B", path)
    n = A.nrows
    if A.ncols != n:
        raise SystemFileError(f"{path}: A: must be square, got {n}x{A.ncols}", Exit.DIMENSION)
    if B.nrows != n:
        raise SystemFileError(f"{path}: B: expected {n} rows, got {B.nrows}", Exit.DIMENSION)
    try:
        system = SystemPair(A, B)
    except (DimensionError, PencilVariableError) as exc:
        raise SystemFileError(f"{path}: {exc}", Exit.DIMENSION) from None

    spec = doc["M"]
    if not isinstance(spec, dict) or len(spec.keys() & {"image", "kernel"}) != 1:
        raise SystemFileError(f"{path}: M: expected exactly one of \"image\" or \"kernel\"")
    if "image" in spec:
        G = _matrix(ring, spec["image"], "M.image", path)
        if G.nrows == 0:
            M = StateSubmodule.zero(ring, n)
        elif G.nrows != n:
            raise SystemFileError(f"{path}: M.image: expected {n} rows, got {G.nrows}", Exit.DIMENSION)
        else:
            M = StateSubmodule.of(Submodule.image(G))
    else:
        C = _matrix(ring, spec["kernel"], "M.kernel", path)
        if C.nrows == 0:
            M = StateSubmodule.full(ring, n)
        elif C.ncols != n:
            raise SystemFileError(f"{path}: M.kernel: expected {n} columns, got {C.ncols}", Exit.DIMENSION)
        else:
            M = StateSubmodule.from_kernel(C)
    return SystemFile(ring, system, M)


# -- rendering ------------------------------------------------------------------


def sorted_basis(U: Submodule, order: ModuleOrder) -> list[ModuleElement]:
    """Reduced Groebner basis of U, sorted by leading module monomial."""
    G = U.gb(order)
    pairs = sorted(zip(G.leading_keys(), G.elements))
    return [ModuleElement(U.ring, e) for _, e in pairs]


def _structured(v: ModuleElement) -> list[str]:
    return [render_polynomial(e) for e in v]


class Report:
    """Collects text lines and a structured payload; prints one of them."""

    def __init__(self, command: str, structured: bool):
        self.structured = structured
        self.lines: list[str] = []
        self.data: dict = {"command": command}

    def module(self, key: str, gens: list[ModuleElement], title: str | None = None) -> None:
        self.data[key] = [_structured(g) for g in gens]
        if title:
            self.lines.append(f"{title}:")
        if not gens:
            self.lines.append("zero module")
        self.lines.extend(render_vector(g) for g in gens)

    def emit(self) -> None:
        if self.structured:
            print(json.dumps(self.data, indent=2, sort_keys=True))
        else:
            print("\n".join(self.lines))


@contextmanager
def _timed(timings: dict, phase: str):
    t0 = time.perf_counter()
    yield
    timings[phase] = time.perf_counter() - t0


# -- commands -------------------------------------------------------------------


def _certificate(rep: Report, sysf: SystemFile, result: ReachabilityResult) -> bool:
    cert = verify_reachability_certificate(sysf.system, sysf.M, result)
    rep.data["cyclic"] = [{"f": _structured(k.f), "g": _structured(k.g)} for k in result.pieces]
    rep.data["certificate"] = [{"clause": c, "ok": ok, "detail": d} for c, ok, d in cert.entries]
    rep.lines.append("cyclic decomposition:")
    rep.lines.extend(f"  f = {k.f}  g = {k.g}" for k in result.pieces)
    rep.lines.append("certificate:")
    rep.lines.extend("  " + line for line in cert.lines())
    return cert.ok


def cmd_maxreach(sysf: SystemFile, args, rep: Report) -> Exit:
    S, M = sysf.system, sysf.M
    rep.data["method"] = args.method
    if args.method == "kernel":
        result = max_reachability_kernel(S, M, pair_cap=args.cap)
        module = result.module
    else:
        module = max_reachability_iterative(S, M, pair_cap=args.cap).module
        result = None
    rep.module("generators", sorted_basis(module, args.module_order))
    if not args.verify:
        return Exit.OK
    if result is None:
        result = max_reachability_kernel(S, M, pair_cap=args.cap)
        agree = module_equal(result.module, module)
        rep.data["methods_agree"] = agree
        rep.lines.append(f"kernel method agrees: {'yes' if agree else 'NO'}")
        if not agree:
            _certificate(rep, sysf, result)
            return Exit.DISAGREEMENT
    return Exit.OK if _certificate(rep, sysf, result) else Exit.VERIFICATION


def cmd_kernel(sysf: SystemFile, args, rep: Report) -> Exit:
    K = pencil_kernel(sysf.system, pair_cap=args.cap)
    gens = sorted_basis(K, args.module_order)
    rep.module("generators", gens)
    if args.verify:
        P = sysf.system.pencil()
        ok = all(P.apply(g).is_zero() for g in gens)
        rep.data["annihilates"] = ok
        rep.lines.append(f"annihilates pencil: {'yes' if ok else 'NO'}")
        if not ok:
            return Exit.VERIFICATION
    return Exit.OK


def cmd_curly_m(sysf: SystemFile, args, rep: Report) -> Exit:
    CM = curly_M(sysf.system, sysf.M, pair_cap=args.cap)
    gens = sorted_basis(CM, args.module_order)
    rep.module("generators", gens)
    if args.verify:
        other = curly_M(sysf.system, sysf.M, method="direct", pair_cap=args.cap)
        agree = module_equal(CM, other)
        rep.data["routes_agree"] = agree
        rep.lines.append(f"direct route agrees: {'yes' if agree else 'NO'}")
        if not agree:
            return Exit.DISAGREEMENT
    return Exit.OK


def cmd_invariant_check(sysf: SystemFile, args, rep: Report) -> Exit:
    ok = is_AB_invariant(sysf.system, sysf.M)
    rep.data["invariant"] = ok
    rep.lines.append(f"(A,B)-invariant: {'yes' if ok else 'no'}")
    return Exit.OK


def cmd_compare(sysf: SystemFile, args, rep: Report) -> Exit:
    S, M = sysf.system, sysf.M
    kt: dict[str, float] = {}
    it: dict[str, float] = {}
    with _timed(kt, "pencil kernel GB"):
        pencil_kernel(S, pair_cap=args.cap)
    with _timed(kt, "intersection"):
        CM = curly_M(S, M, pair_cap=args.cap)
    with _timed(kt, "extraction"):
        by_kernel = max_reachability_kernel(S, M, pair_cap=args.cap, curly_m=CM).module
    with _timed(it, "S chain"):
        cond = minimal_conditioned(S, M, pair_cap=args.cap)
    with _timed(it, "W chain"):
        W = max_reachability_iterative(S, M, pair_cap=args.cap, conditioned=cond)
    equal = module_equal(by_kernel, W.module)
    rep.lines.append("EQUAL" if equal else "DIFFERENT")
    rep.module("generators", sorted_basis(by_kernel, args.module_order))
    rep.data["equal"] = equal
    rep.data["chain_steps"] = {"S": cond.index, "W": W.index}
    rep.data["timings"] = {"kernel": kt, "iterative": it}
    for label, phases in (("kernel", kt), ("iterative", it)):
        detail = ", ".join(f"{k} {v:.3f}s" for k, v in phases.items())
        rep.lines.append(f"{label}: {sum(phases.values()):.3f}s ({detail})")
    rep.lines.append(f"chain steps: S {cond.index}, W {W.index}")
    return Exit.OK if equal else Exit.DISAGREEMENT


def cmd_oracle(sysf: SystemFile, args, rep: Report) -> Exit:
    S, M = sysf.system, sysf.M
    chain = rstar_chain(S, Subspace.from_submodule(M))
    by_kernel = max_reachability_kernel(S, M, pair_cap=args.cap).module
    by_chain = max_reachability_iterative(S, M, pair_cap=args.cap).module
    oracle = chain.result
    agree = Subspace.from_submodule(by_kernel) == oracle and Subspace.from_submodule(by_chain) == oracle
    rep.lines.append("AGREE" if agree else "DISAGREE")
    rep.lines.append(f"dimension: {oracle.dim}")
    rep.lines.append(f"R* chain steps: {chain.index} (n = {S.n})")
    rep.module("generators", [ModuleElement(S.ring, v) for v in oracle.basis], title="basis")
    rep.data.update(agree=agree, dimension=oracle.dim, chain_steps=chain.index)
    return Exit.OK if agree else Exit.DISAGREEMENT


HANDLERS = {
    "maxreach": cmd_maxreach,
    "kernel": cmd_kernel,
    "curly-m": cmd_curly_m,
    "invariant-check": cmd_invariant_check,
    "compare": cmd_compare,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="reachmod", description="Maximal reachability submodules of linear systems over rings.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("system", help="JSON system file")
    ap.add_argument("--method", choices=("kernel", "iterative"), default="kernel")
    ap.add_argument("--order", choices=ORDERS, default="grevlex", help="monomial order for printed bases")
    ap.add_argument("--output", choices=("text", "structured"), default="text")
    ap.add_argument("--cap", type=int, default=DEFAULT_PAIR_CAP, help="S-pair cap per Groebner computation")
    ap.add_argument("--verify", action="store_true")
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    if args.cap < 1:
        print("reachmod: --cap must be positive", file=sys.stderr)
        return Exit.USAGE
    args.module_order = ModuleOrder(args.order, "top")
    try:
        sysf = parse_system_file(args.system)
    except SystemFileError as exc:
        print(f"reachmod: {exc}", file=sys.stderr)
        return exc.code
    rep = Report(args.command, args.output == "structured")
    try:
        code = HANDLERS[args.command](sysf, args, rep)
    except NotAFieldError as exc:
        print(f"reachmod: {exc}", file=sys.stderr)
        return Exit.USAGE
    except (ResourceExhaustedError, IterationCapError) as exc:
        print(f"reachmod: {exc}", file=sys.stderr)
        return Exit.CAP
    rep.emit()
    return code


if __name__ == "__main__":
    sys.exit(main())
