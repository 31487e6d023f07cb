"""Finite semiring interpretations over interned integer universes.

Only positive-atom values plus a polarity are stored; the complementary
literal's value is implied (zero on the opposite side), so model-definingness
is structural for interpretations built from atom tables.  Interpretations
used by the provenance machinery may carry explicit values on both sides
(they are consistent in the quotient sense rather than model-defining).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import (
    GuardExceeded,
    NotModelDefining,
    PreconditionError,
)
from .formulas import Atom, Formula, subformulas
from .semirings import Semiring, SemiringHom

AtomKey = Tuple[str, Tuple[int, ...]]

ENUMERATION_GUARD = 10**6
MAX_ENUM_ATOMS = 16


@dataclass(frozen=True)
class Vocabulary:
    relations: Tuple[Tuple[str, int], ...]

    def __init__(self, relations):
        if isinstance(relations, dict):
            relations = tuple(sorted(relations.items()))
        else:
            relations = tuple(relations)
        names = [r for r, _ in relations]
        if len(set(names)) != len(names):
            raise PreconditionError("duplicate relation names")
        for name, arity in relations:
            if arity < 1:
                raise PreconditionError(f"arity of {name} must be >= 1")
        object.__setattr__(self, "relations", relations)

    def arity(self, name: str) -> int:
        for r, a in self.relations:
            if r == name:
                return a
        raise PreconditionError(f"unknown relation {name!r}")

    def names(self) -> List[str]:
        return [r for r, _ in self.relations]

    def check_formula(self, f: Formula):
        for g in subformulas(f):
            if isinstance(g, Atom):
                if self.arity(g.rel) != len(g.args):
                    raise PreconditionError(
                        f"arity mismatch: {g.rel} expects {self.arity(g.rel)} arguments"
                    )

    def atoms(self, universe: Sequence[int]) -> List[AtomKey]:
        out = []
        for rel, arity in self.relations:
            for args in itertools.product(universe, repeat=arity):
                out.append((rel, args))
        return out

    @staticmethod
    def of_formula(*formulas: Formula) -> "Vocabulary":
        rels = {}
        for g in itertools.chain(*(subformulas(m) for m in formulas)):
            if isinstance(g, Atom):
                prev = rels.setdefault(g.rel, len(g.args))
                if prev != len(g.args):
                    raise PreconditionError(f"inconsistent arity for {g.rel}")
        if not rels:
            rels = {"R": 1}
        return Vocabulary(rels)


class Interpretation:
    """A literal valuation over a finite universe.

    `table` maps atom keys to (positive value, negative value) pairs; atoms
    not in the table take the default pair.
    """

    def __init__(
        self,
        semiring: Semiring,
        universe: Sequence[int],
        vocab: Vocabulary,
        table: Dict[AtomKey, Tuple[object, object]],
        default: Optional[Tuple[object, object]] = None,
        names: Optional[Dict[int, str]] = None,
    ):
        self.semiring = semiring
        self.universe = tuple(universe)
        if len(set(self.universe)) != len(self.universe):
            raise PreconditionError("universe elements must be distinct")
        self.vocab = vocab
        self.table = dict(table)
        self.default = default if default is not None else (semiring.zero, semiring.one)
        self.names = dict(names) if names else {}
        for key, (pos, neg) in self.table.items():
            rel, args = key
            if len(args) != vocab.arity(rel):
                raise PreconditionError(f"arity mismatch on {key}")
            if any(a not in self.universe for a in args):
                raise PreconditionError(f"atom {key} uses elements outside the universe")
            semiring.check(pos)
            semiring.check(neg)
        semiring.check(self.default[0])
        semiring.check(self.default[1])

    @classmethod
    def from_atoms(
        cls,
        semiring: Semiring,
        universe: Sequence[int],
        vocab: Vocabulary,
        atom_values: Dict[AtomKey, object],
        names: Optional[Dict[int, str]] = None,
    ) -> "Interpretation":
        """Positive atoms get the given (nonzero) value; everything else
        defaults to false (0 positive, 1 negative)."""
        table = {}
        for key, value in atom_values.items():
            semiring.check(value)
            if value == semiring.zero:
                table[key] = (semiring.zero, semiring.one)
            else:
                table[key] = (value, semiring.zero)
        return cls(semiring, universe, vocab, table, names=names)

    def pair(self, rel: str, args: Tuple[int, ...]) -> Tuple[object, object]:
        return self.table.get((rel, tuple(args)), self.default)

    def literal(self, rel: str, args: Tuple[int, ...], positive: bool = True):
        args = tuple(args)
        for a in args:
            if a not in self.universe:
                raise PreconditionError(f"element {a} not in universe")
        pos, neg = self.pair(rel, args)
        return pos if positive else neg

    def atom_keys(self) -> List[AtomKey]:
        return self.vocab.atoms(self.universe)

    def element_name(self, e: int) -> str:
        return self.names.get(e, str(e))

    # -- validation ---------------------------------------------------------

    def is_model_defining(self) -> bool:
        return self.validate() == []

    def validate(self) -> List[str]:
        """Model-defining check: exactly one of each literal pair is zero."""
        zero = self.semiring.zero
        problems = []
        for rel, args in self.atom_keys():
            pos, neg = self.pair(rel, args)
            if (pos == zero) == (neg == zero):
                label = f"{rel}({','.join(self.element_name(a) for a in args)})"
                problems.append(label)
        return problems

    def is_consistent(self) -> bool:
        """Quotient-sense check: the product of each literal pair is zero."""
        zero = self.semiring.zero
        sr = self.semiring
        return all(
            sr.mul(*self.pair(rel, args)) == zero for rel, args in self.atom_keys()
        )

    # -- transformations ----------------------------------------------------

    def restrict(self, subset: Iterable[int]) -> "Interpretation":
        subset = tuple(sorted(set(subset)))
        if any(a not in self.universe for a in subset):
            raise PreconditionError("subset must be contained in the universe")
        table = {
            key: val
            for key, val in self.table.items()
            if all(a in subset for a in key[1])
        }
        return Interpretation(
            self.semiring, subset, self.vocab, table, self.default, self.names
        )

    def pad(self, count: int, fill) -> "Interpretation":
        """Extend by `count` fresh elements; every atom touching a new element
        gets `fill` (negation zero), or the dual pair when fill is zero."""
        self.semiring.check(fill)
        fresh = []
        nxt = max(self.universe, default=0) + 1
        for _ in range(count):
            fresh.append(nxt)
            nxt += 1
        universe = self.universe + tuple(fresh)
        if fill == self.semiring.zero:
            pair = (self.semiring.zero, self.semiring.one)
        else:
            pair = (fill, self.semiring.zero)
        table = dict(self.table)
        for rel, arity in self.vocab.relations:
            for args in itertools.product(universe, repeat=arity):
                if any(a in fresh for a in args):
                    table[(rel, args)] = pair
        return Interpretation(self.semiring, universe, self.vocab, table, self.default, self.names)

    def relabel(self, mapping: Dict[int, int]) -> "Interpretation":
        """Rename universe elements along a bijection."""
        universe = tuple(mapping.get(e, e) for e in self.universe)
        table = {
            (rel, tuple(mapping.get(a, a) for a in args)): val
            for (rel, args), val in self.table.items()
        }
        return Interpretation(self.semiring, universe, self.vocab, table, self.default)

    def with_values(self, replace) -> "Interpretation":
        """Apply a function to every stored literal value (both sides)."""
        table = {
            key: (replace(pos), replace(neg)) for key, (pos, neg) in self.table.items()
        }
        default = (replace(self.default[0]), replace(self.default[1]))
        return Interpretation(self.semiring, self.universe, self.vocab, table, default, self.names)

    def __repr__(self):
        sr = self.semiring
        bits = []
        for rel, args in self.atom_keys():
            pos, neg = self.pair(rel, args)
            label = f"{rel}({','.join(self.element_name(a) for a in args)})"
            if neg == sr.zero:
                bits.append(f"{label}={sr.format_value(pos)}")
            elif pos == sr.zero:
                bits.append(f"~{label}={sr.format_value(neg)}")
            else:
                bits.append(f"{label}={sr.format_value(pos)}/~{sr.format_value(neg)}")
        universe = " ".join(self.element_name(e) for e in self.universe)
        return f"<{sr.id} interp [{universe}] {' '.join(bits)}>"


def is_subinterpretation(pa: Interpretation, pb: Interpretation) -> bool:
    """pa is an induced subinterpretation of pb: universe contained and all
    pa-literals agree."""
    if pa.semiring.id != pb.semiring.id or pa.vocab != pb.vocab:
        raise PreconditionError("same semiring and vocabulary required")
    if not set(pa.universe) <= set(pb.universe):
        return False
    return all(pa.pair(rel, args) == pb.pair(rel, args) for rel, args in pa.atom_keys())


def check_interp_hom(
    g: Dict[int, int], pa: Interpretation, pb: Interpretation
) -> str:
    """Classify an element map as 'none', 'hom', 'strong_hom' or 'embedding'.

    hom: for every atom, the sum of its g-preimage atom values is at most the
    image atom's value (natural order).  strong: literal values preserved
    exactly.  embedding: strong and injective.
    """
    if pa.semiring.id != pb.semiring.id or pa.vocab != pb.vocab:
        raise PreconditionError("same semiring and vocabulary required")
    if set(g) != set(pa.universe):
        raise PreconditionError("map must be total on the source universe")
    if any(v not in pb.universe for v in g.values()):
        raise PreconditionError("map must land in the target universe")
    sr = pa.semiring
    is_hom = True
    for rel, args in pa.atom_keys():
        image = tuple(g[a] for a in args)
        preimage_sum = sr.sum(
            pa.literal(rel, other_args)
            for rel2, other_args in pa.atom_keys()
            if rel2 == rel and tuple(g[a] for a in other_args) == image
        )
        if not sr.leq(preimage_sum, pb.literal(rel, image)):
            is_hom = False
            break
    if not is_hom:
        return "none"
    strong = all(
        pa.pair(rel, args) == pb.pair(rel, tuple(g[a] for a in args))
        for rel, args in pa.atom_keys()
    )
    if not strong:
        return "hom"
    injective = len(set(g.values())) == len(g)
    return "embedding" if injective else "strong_hom"


def compose_hom(
    h: SemiringHom, interp: Interpretation, require_model_defining: bool = True
) -> Interpretation:
    """Literal-wise image interpretation over h's target semiring."""
    if h.source.id != interp.semiring.id:
        raise PreconditionError(
            f"hom source {h.source.id} does not match interpretation {interp.semiring.id}"
        )
    table = {
        key: (h(pos), h(neg)) for key, (pos, neg) in interp.table.items()
    }
    default = (h(interp.default[0]), h(interp.default[1]))
    out = Interpretation(
        h.target, interp.universe, interp.vocab, table, default, interp.names
    )
    if require_model_defining:
        problems = out.validate()
        if problems:
            raise NotModelDefining(
                f"image is not model-defining at {problems[0]}", problems[0]
            )
    return out


def _atom_choices(semiring: Semiring, value_set):
    for v in value_set:
        if v == semiring.zero:
            raise PreconditionError("value_set must not contain 0")
        yield (v, semiring.zero)
    for v in value_set:
        yield (semiring.zero, v)


def count_interpretations(vocab: Vocabulary, size: int, value_set) -> int:
    n_atoms = len(vocab.atoms(range(1, size + 1)))
    return (2 * len(value_set)) ** n_atoms


def enumerate_interpretations(
    semiring: Semiring,
    vocab: Vocabulary,
    size: int,
    value_set: Sequence,
    guard: int = ENUMERATION_GUARD,
) -> Iterator[Interpretation]:
    """All model-defining interpretations over universe {1..size} whose atoms
    take a value from value_set on one side and zero on the other."""
    universe = tuple(range(1, size + 1))
    atoms = vocab.atoms(universe)
    if len(atoms) > MAX_ENUM_ATOMS:
        raise GuardExceeded(f"{len(atoms)} atoms exceed the enumeration guard")
    total = (2 * len(value_set)) ** len(atoms)
    if total > guard:
        raise GuardExceeded(f"{total} interpretations exceed the guard {guard}")
    choices = list(_atom_choices(semiring, value_set))
    for combo in itertools.product(choices, repeat=len(atoms)):
        table = dict(zip(atoms, combo))
        yield Interpretation(semiring, universe, vocab, table)


def random_interpretation(
    semiring: Semiring,
    vocab: Vocabulary,
    size: int,
    value_set: Sequence,
    rng: random.Random,
) -> Interpretation:
    universe = tuple(range(1, size + 1))
    choices = list(_atom_choices(semiring, value_set))
    table = {key: rng.choice(choices) for key in vocab.atoms(universe)}
    return Interpretation(semiring, universe, vocab, table)


# ---------------------------------------------------------------------------
# Interpretation files
# ---------------------------------------------------------------------------


def parse_interpretation(text: str, semiring: Optional[Semiring] = None) -> Interpretation:
    """Line format::

        semiring: viterbi
        universe: a b
        R(a) = 1/2
        ~R(b) = 1/4
        default: 0      # unlisted atoms: zero, negation one
    """
    import re

    from .semirings import semiring_from_id

    sr = semiring
    universe_names: Optional[List[str]] = None
    atom_lines = []
    default_text = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("semiring:"):
            declared = line.split(":", 1)[1].strip()
            if sr is None:
                sr = semiring_from_id(declared)
        elif line.startswith("universe:"):
            universe_names = line.split(":", 1)[1].split()
        elif line.startswith("default:"):
            default_text = line.split(":", 1)[1].strip()
        else:
            m = re.match(r"^(~?)([A-Za-z_][A-Za-z0-9_]*)\(([^)]*)\)\s*=\s*(.+)$", line)
            if not m:
                raise PreconditionError(f"line {lineno}: cannot parse {line!r}")
            negated, rel, args, value = m.groups()
            atom_lines.append((lineno, bool(negated), rel, [a.strip() for a in args.split(",")], value.strip()))
    if sr is None:
        raise PreconditionError("interpretation file missing 'semiring:' line")
    if universe_names is None:
        raise PreconditionError("interpretation file missing 'universe:' line")
    elements = {name: i + 1 for i, name in enumerate(universe_names)}
    names = {i: n for n, i in elements.items()}
    arities: Dict[str, int] = {}
    for lineno, _, rel, args, _ in atom_lines:
        arities.setdefault(rel, len(args))
        if arities[rel] != len(args):
            raise PreconditionError(f"line {lineno}: inconsistent arity for {rel}")
    vocab = Vocabulary(arities) if arities else Vocabulary({"R": 1})
    table: Dict[AtomKey, Tuple[object, object]] = {}
    for lineno, negated, rel, args, value_text in atom_lines:
        try:
            ids = tuple(elements[a] for a in args)
        except KeyError as exc:
            raise PreconditionError(f"line {lineno}: unknown element {exc}") from exc
        value = sr.parse_value(value_text)
        if negated:
            pair = (sr.zero, value) if value != sr.zero else (sr.one, sr.zero)
        else:
            pair = (value, sr.zero) if value != sr.zero else (sr.zero, sr.one)
        table[(rel, ids)] = pair
    default = (sr.zero, sr.one)
    if default_text is not None:
        dv = sr.parse_value(default_text)
        default = (sr.zero, sr.one) if dv == sr.zero else (dv, sr.zero)
    return Interpretation(sr, tuple(elements.values()), vocab, table, default, names)


def load_interpretation(path: str, semiring: Optional[Semiring] = None) -> Interpretation:
    with open(path, encoding="utf-8") as fh:
        return parse_interpretation(fh.read(), semiring)
