"""Provenance polynomials: N[X] and the dual-variable absorptive quotient.

Variables are either free-form strings or literal keys ``(rel, args, positive)``
with ``args`` a tuple of universe elements.  Monomials over literal keys live
in the quotient generated by x_alpha * x_{not alpha} = 0: a product that would
contain both polarities of one atom is the zero monomial and is never stored.

An absorptive polynomial is an antichain of monomials under the absorption
order (m1 absorbs m2 when m1 has pointwise smaller exponents); addition is
union-then-prune, multiplication is pairwise product-then-prune.
"""

from __future__ import annotations

from typing import Any, Dict, Iterable, Optional, Tuple

from .errors import CarrierMismatch, PreconditionError
from .semirings import Semiring

EXPONENT_CAP = 2**32

VarKey = Any  # str | (rel, args, positive)


def lit_var(rel: str, args: Tuple[int, ...], positive: bool = True) -> VarKey:
    return (rel, tuple(args), positive)


def _is_lit(var: VarKey) -> bool:
    return isinstance(var, tuple)


def _dual(var: VarKey) -> Optional[VarKey]:
    if _is_lit(var):
        rel, args, pos = var
        return (rel, args, not pos)
    return None


def var_sort_key(var: VarKey):
    if _is_lit(var):
        rel, args, pos = var
        return (1, rel, args, 0 if pos else 1)
    return (0, str(var))


def format_var(var: VarKey) -> str:
    if _is_lit(var):
        rel, args, pos = var
        body = f"{rel}({','.join(str(a) for a in args)})"
        return f"x[{body}]" if pos else f"x[~{body}]"
    return str(var)


class Monomial:
    """Product of variables with positive integer exponents, in canonical order."""

    __slots__ = ("exps",)

    def __init__(self, exps: Iterable[Tuple[VarKey, int]]):
        items = [(v, e) for v, e in exps if e != 0]
        for _, e in items:
            if e < 0:
                raise PreconditionError("negative exponent")
            if e > EXPONENT_CAP:
                raise PreconditionError(f"exponent exceeds cap {EXPONENT_CAP}")
        self.exps = tuple(sorted(items, key=lambda it: var_sort_key(it[0])))

    @classmethod
    def unit(cls) -> "Monomial":
        return cls(())

    @classmethod
    def var(cls, v: VarKey, e: int = 1) -> "Monomial":
        return cls(((v, e),))

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.exps == other.exps

    def __hash__(self):
        return hash(self.exps)

    def degree(self) -> int:
        return sum(e for _, e in self.exps)

    def variables(self):
        return {v for v, _ in self.exps}

    def exponent(self, v: VarKey) -> int:
        for var, e in self.exps:
            if var == v:
                return e
        return 0

    def mul(self, other: "Monomial") -> Optional["Monomial"]:
        """Product, or None when the quotient x_a * x_{~a} = 0 kills it."""
        merged: Dict[VarKey, int] = dict(self.exps)
        for v, e in other.exps:
            merged[v] = merged.get(v, 0) + e
        for v in merged:
            d = _dual(v)
            if d is not None and d in merged:
                return None
        return Monomial(merged.items())

    def is_unit(self) -> bool:
        return not self.exps

    def __repr__(self):
        if not self.exps:
            return "1"
        parts = []
        for v, e in self.exps:
            parts.append(format_var(v) if e == 1 else f"{format_var(v)}^{e}")
        return "*".join(parts)


def absorbs(m1: Monomial, m2: Monomial) -> bool:
    """m1 >= m2 in absorption order: m2 = m * m1 for some monomial m."""
    it = dict(m2.exps)
    for v, e in m1.exps:
        if it.get(v, 0) < e:
            return False
    return True


def _mono_sort_key(m: Monomial):
    return tuple((var_sort_key(v), e) for v, e in m.exps)


class AbsorptivePoly:
    """Antichain of monomials; 0 is the empty antichain, 1 is {unit}."""

    __slots__ = ("monomials",)

    def __init__(self, monomials: Iterable[Monomial], prune: bool = True):
        ms = list(monomials)
        if prune:
            ms = _prune(ms)
        self.monomials = tuple(sorted(ms, key=_mono_sort_key))

    @classmethod
    def zero(cls) -> "AbsorptivePoly":
        return cls((), prune=False)

    @classmethod
    def one(cls) -> "AbsorptivePoly":
        return cls((Monomial.unit(),), prune=False)

    @classmethod
    def var(cls, v: VarKey) -> "AbsorptivePoly":
        return cls((Monomial.var(v),), prune=False)

    def __eq__(self, other):
        return isinstance(other, AbsorptivePoly) and self.monomials == other.monomials

    def __hash__(self):
        return hash(self.monomials)

    def is_zero(self) -> bool:
        return not self.monomials

    def is_one(self) -> bool:
        return len(self.monomials) == 1 and self.monomials[0].is_unit()

    def add(self, other: "AbsorptivePoly") -> "AbsorptivePoly":
        return AbsorptivePoly(self.monomials + other.monomials)

    def mul(self, other: "AbsorptivePoly") -> "AbsorptivePoly":
        prods = []
        for m1 in self.monomials:
            for m2 in other.monomials:
                p = m1.mul(m2)
                if p is not None:
                    prods.append(p)
        return AbsorptivePoly(prods)

    def leq(self, other: "AbsorptivePoly") -> bool:
        return self.add(other) == other

    def degree(self) -> int:
        return max((m.degree() for m in self.monomials), default=0)

    def support(self):
        out = set()
        for m in self.monomials:
            out |= m.variables()
        return out

    def __repr__(self):
        if not self.monomials:
            return "0"
        return " + ".join(repr(m) for m in self.monomials)


def _prune(monomials) -> list:
    out = []
    for m in monomials:
        if any(absorbs(k, m) and k != m for k in monomials):
            continue
        if m not in out:
            out.append(m)
    return out


class NatPoly:
    """Polynomial with natural coefficients; no quotient."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Tuple[Monomial, int]]):
        acc: Dict[Monomial, int] = {}
        for m, c in terms:
            if c < 0:
                raise PreconditionError("negative coefficient")
            if c:
                acc[m] = acc.get(m, 0) + c
        self.terms = tuple(sorted(acc.items(), key=lambda it: _mono_sort_key(it[0])))

    @classmethod
    def zero(cls) -> "NatPoly":
        return cls(())

    @classmethod
    def one(cls) -> "NatPoly":
        return cls(((Monomial.unit(), 1),))

    @classmethod
    def var(cls, v: VarKey) -> "NatPoly":
        return cls(((Monomial.var(v), 1),))

    @classmethod
    def const(cls, c: int) -> "NatPoly":
        return cls(((Monomial.unit(), c),))

    def __eq__(self, other):
        return isinstance(other, NatPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def add(self, other: "NatPoly") -> "NatPoly":
        return NatPoly(self.terms + other.terms)

    def mul(self, other: "NatPoly") -> "NatPoly":
        out = []
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                merged: Dict[VarKey, int] = dict(m1.exps)
                for v, e in m2.exps:
                    merged[v] = merged.get(v, 0) + e
                out.append((Monomial(merged.items()), c1 * c2))
        return NatPoly(out)

    def leq(self, other: "NatPoly") -> bool:
        """Natural order: coefficient-wise <= (a witness summand exists iff
        every coefficient of self is at most the matching one of other)."""
        coeffs = dict(other.terms)
        return all(c <= coeffs.get(m, 0) for m, c in self.terms)

    def degree(self) -> int:
        return max((m.degree() for m, _ in self.terms), default=0)

    def support(self):
        out = set()
        for m, _ in self.terms:
            out |= m.variables()
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms:
            if m.is_unit():
                parts.append(str(c))
            elif c == 1:
                parts.append(repr(m))
            else:
                parts.append(f"{c}*{m!r}")
        return " + ".join(parts)


class AbsorptivePolySemiring(Semiring):
    id = "spoly"
    additively_idempotent = True
    absorptive = True
    zero = AbsorptivePoly.zero()
    one = AbsorptivePoly.one()

    def add(self, a, b):
        return a.add(b)

    def mul(self, a, b):
        return a.mul(b)

    def leq(self, s, t):
        return s.leq(t)

    def contains(self, v):
        return isinstance(v, AbsorptivePoly)

    def parse_value(self, text):
        if text == "0":
            return AbsorptivePoly.zero()
        if text == "1":
            return AbsorptivePoly.one()
        return AbsorptivePoly.var(text)

    def random_value(self, rng, nonzero=False):
        names = "uvwxyz"
        ms = []
        for _ in range(rng.randrange(1 if nonzero else 0, 4)):
            ms.append(
                Monomial(
                    (rng.choice(names), rng.randrange(1, 4))
                    for _ in range(rng.randrange(1, 3))
                )
            )
        return AbsorptivePoly(ms)


class NatPolySemiring(Semiring):
    id = "natpoly"
    linearly_ordered = False
    zero = NatPoly.zero()
    one = NatPoly.one()

    def add(self, a, b):
        return a.add(b)

    def mul(self, a, b):
        return a.mul(b)

    def leq(self, s, t):
        return s.leq(t)

    def contains(self, v):
        return isinstance(v, NatPoly)

    def parse_value(self, text):
        if text.isdigit():
            return NatPoly.const(int(text))
        return NatPoly.var(text)

    def random_value(self, rng, nonzero=False):
        names = "uvwxyz"
        terms = []
        for _ in range(rng.randrange(1 if nonzero else 0, 4)):
            m = Monomial(
                (rng.choice(names), rng.randrange(1, 4)) for _ in range(rng.randrange(0, 3))
            )
            terms.append((m, rng.randrange(1, 5)))
        return NatPoly(terms)


SPOLY = AbsorptivePolySemiring()
NATPOLY = NatPolySemiring()


def check_consistent(assignment: Dict[VarKey, Any], target: Semiring) -> None:
    """The universal-property side condition: f(x_a) * f(x_{~a}) = 0 for all
    atoms whose both polarities get assigned."""
    for v, val in assignment.items():
        d = _dual(v)
        if d is not None and d in assignment:
            if target.mul(val, assignment[d]) != target.zero:
                raise PreconditionError(
                    f"inconsistent assignment on dual pair {format_var(v)}"
                )


def specialize(poly, assignment: Dict[VarKey, Any], target: Semiring):
    """Homomorphic image of a polynomial under a consistent variable assignment."""
    check_consistent(assignment, target)

    def mono_value(m: Monomial):
        factors = []
        for v, e in m.exps:
            if v not in assignment:
                raise PreconditionError(f"no value for variable {format_var(v)}")
            factors.append(target.power(assignment[v], e))
        return target.prod(factors)

    if isinstance(poly, AbsorptivePoly):
        return target.sum(mono_value(m) for m in poly.monomials)
    if isinstance(poly, NatPoly):
        out = target.zero
        for m, c in poly.terms:
            mv = mono_value(m)
            for _ in range(c):
                out = target.add(out, mv)
        return out
    raise CarrierMismatch(f"not a polynomial: {poly!r}")


def poly_support(poly):
    return poly.support()


def poly_degree(poly) -> int:
    return poly.degree()
