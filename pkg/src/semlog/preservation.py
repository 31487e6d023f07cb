"""Preservation checking, triviality and redundancy analysis, counterexample
construction, S3 reduction checks, and the two universal-quantifier
elimination pipelines.

Every refutation witness returned by a checker re-validates through plain
evaluation; rewrites run a bounded verification suite and report a witness
instead of returning a wrong formula.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import PreconditionError
from .formulas import (
    FALSE,
    TRUE,
    And,
    Atom,
    Bottom,
    Eq,
    Exists,
    Forall,
    Formula,
    Or,
    Top,
    canonical_bound_names,
    dedupe_or_idempotent,
    existential_prenex_dnf,
    find_subformula_paths,
    flatten_sigma1,
    fo_to_foneq,
    foneq_to_fo,
    free_vars,
    is_fo,
    is_foneq,
    is_sentence,
    make_and,
    make_or,
    metrics,
    path_get,
    psi_n,
    qr,
    simplify_constants,
    size,
    subformulas,
    substitute_subformula,
)
from .games import (
    Strategy,
    build_game_tree,
    classify,
    enumerate_strategies,
    eval_strategy,
    literal_elements,
    strategy_nodes,
    translate_strategy,
)
from .interpretations import (
    Interpretation,
    Vocabulary,
    compose_hom,
    enumerate_interpretations,
    is_subinterpretation,
    check_interp_hom,
    random_interpretation,
)
from .evaluation import evaluate, evaluate_set
from .lattices import FiniteLattice, LatticeSemiring, adjoin_bottom, find_weakly_separating_hom
from .semirings import INF, S3, VITERBI, Semiring

STRICT_SEMIRING_IDS = {"viterbi", "tropical", "lukasiewicz", "doubt"}

S3_VALUES = (1, 2)  # eps and 1
VITERBI_GRID = (Fraction(1, 4), Fraction(1, 2), Fraction(1))


# ---------------------------------------------------------------------------
# Preservation checking
# ---------------------------------------------------------------------------


@dataclass
class PreservationVerdict:
    prop: str
    result: str  # holds_on_search_space | refuted
    witness: Optional[Tuple[Interpretation, Interpretation, Optional[dict]]]
    search_space: str
    values: Optional[Tuple[object, object]] = None

    @property
    def refuted(self) -> bool:
        return self.result == "refuted"

    def __bool__(self):
        return not self.refuted


def _violates(sr: Semiring, prop: str, va, vb) -> bool:
    if prop in ("extensions", "homomorphisms"):
        return not sr.leq(va, vb)
    if prop == "subinterpretations":
        return not sr.leq(vb, va)
    raise PreconditionError(f"unknown property {prop!r}")


def _lower_pairs(sr: Semiring, value_set):
    """Replacement candidate pairs for witness minimization: false first, then
    values ascending in the natural order."""
    ordered = sorted(value_set, key=lambda v: sum(sr.leq(v, w) for w in value_set), reverse=True)
    pairs = [(sr.zero, sr.one)]
    pairs.extend((v, sr.zero) for v in ordered)
    return pairs


def _minimize_extension_witness(formula, sr, prop, pa, pb, value_set):
    keep = set(pa.universe)
    current = pb
    # drop extra elements while the violation persists
    changed = True
    while changed:
        changed = False
        for e in sorted(set(current.universe) - keep):
            if len(current.universe) <= len(keep) + 1:
                break
            cand = current.restrict(set(current.universe) - {e})
            ca = cand.restrict(keep)
            if _violates(sr, prop, evaluate(ca, formula), evaluate(cand, formula)):
                current = cand
                changed = True
                break
    # lower literal values toward the grid minimum
    for key in sorted(current.table):
        for pair in _lower_pairs(sr, value_set):
            if current.table[key] == pair:
                break
            table = dict(current.table)
            table[key] = pair
            cand = Interpretation(sr, current.universe, current.vocab, table, current.default)
            ca = cand.restrict(keep)
            if _violates(sr, prop, evaluate(ca, formula), evaluate(cand, formula)):
                current = cand
                break
    return current.restrict(keep), current


def check_preservation(
    formula: Formula,
    semiring: Semiring,
    prop: str,
    max_size: int = 2,
    value_set: Sequence = VITERBI_GRID,
    vocab: Optional[Vocabulary] = None,
    guard: int = 10**6,
    minimize: bool = True,
) -> PreservationVerdict:
    """Exhaustive bounded check of a preservation property over the grid.

    Sound for refutation; a holding verdict only covers the declared search
    space.  Witnesses are greedily minimized: element removal first, then
    value lowering toward the grid minimum.
    """
    vocab = vocab or Vocabulary.of_formula(formula)
    space = f"sizes<= {max_size}, grid {[semiring.format_value(v) for v in value_set]}"
    if prop in ("extensions", "subinterpretations"):
        for b_size in range(2, max_size + 1):
            for pb in enumerate_interpretations(semiring, vocab, b_size, value_set, guard):
                vb = evaluate(pb, formula)
                for a_size in range(1, b_size):
                    for subset in itertools.combinations(pb.universe, a_size):
                        pa = pb.restrict(subset)
                        va = evaluate(pa, formula)
                        if _violates(semiring, prop, va, vb):
                            if minimize:
                                pa, pb2 = _minimize_extension_witness(
                                    formula, semiring, prop, pa, pb, value_set
                                )
                            else:
                                pb2 = pb
                            va = evaluate(pa, formula)
                            vb2 = evaluate(pb2, formula)
                            return PreservationVerdict(
                                prop, "refuted", (pa, pb2, None), space, (va, vb2)
                            )
        return PreservationVerdict(prop, "holds_on_search_space", None, space)
    if prop != "homomorphisms":
        raise PreconditionError(f"unknown property {prop!r}")
    for a_size in range(1, max_size + 1):
        pas = list(enumerate_interpretations(semiring, vocab, a_size, value_set, guard))
        for b_size in range(1, max_size + 1):
            for pb in enumerate_interpretations(semiring, vocab, b_size, value_set, guard):
                vb = evaluate(pb, formula)
                for pa in pas:
                    va = evaluate(pa, formula)
                    if semiring.leq(va, vb):
                        continue
                    for images in itertools.product(pb.universe, repeat=a_size):
                        g = dict(zip(pa.universe, images))
                        if check_interp_hom(g, pa, pb) == "none":
                            continue
                        return PreservationVerdict(
                            prop, "refuted", (pa, pb, g), space, (va, vb)
                        )
    return PreservationVerdict(prop, "holds_on_search_space", None, space)


# ---------------------------------------------------------------------------
# Triviality
# ---------------------------------------------------------------------------


def _pi_value_is_one(formula: Formula, env: dict, universe: Tuple[int, ...], memo: dict) -> bool:
    """Whether pi_n evaluates the instantiated formula to 1 in the absorptive
    polynomial semiring.  A sum is 1 iff some summand is, a product iff all
    factors are, and no literal is; this avoids building the antichains."""
    key = (id(formula), tuple(sorted((v, env[v]) for v in free_vars(formula))))
    hit = memo.get(key)
    if hit is not None:
        return hit
    if isinstance(formula, Top):
        out = True
    elif isinstance(formula, (Bottom, Atom)):
        out = False
    elif isinstance(formula, Eq):
        raise PreconditionError("equality atom in an FO-distinct formula")
    elif isinstance(formula, Or):
        out = _pi_value_is_one(formula.left, env, universe, memo) or _pi_value_is_one(
            formula.right, env, universe, memo
        )
    elif isinstance(formula, And):
        out = _pi_value_is_one(formula.left, env, universe, memo) and _pi_value_is_one(
            formula.right, env, universe, memo
        )
    elif isinstance(formula, (Exists, Forall)):
        excluded = {env[v] for v in free_vars(formula)} if formula.distinct else set()
        domain = [b for b in universe if b not in excluded]
        results = []
        for b in domain:
            env2 = dict(env)
            env2[formula.var] = b
            results.append(_pi_value_is_one(formula.body, env2, universe, memo))
        out = any(results) if isinstance(formula, Exists) else all(results)
    else:
        raise PreconditionError(f"not a formula: {formula!r}")
    memo[key] = out
    return out


def is_trivial_at(formula: Formula, n: int) -> bool:
    """Decide whether pi_n evaluates the formula to 1 for the canonical
    instantiation of its free variables (sufficient for all instantiations:
    only the equality type matters)."""
    if not is_foneq(formula):
        raise PreconditionError("triviality is defined for FO-distinct formulae")
    fv = sorted(free_vars(formula))
    if n < len(fv) + 1:
        raise PreconditionError(f"n = {n} too small for the instantiation of {fv}")
    env = {v: i + 1 for i, v in enumerate(fv)}
    return _pi_value_is_one(formula, env, tuple(range(1, n + 1)), {})


@dataclass
class TrivialityVerdict:
    verdict: str  # trivial | non_trivial | unstable
    probes: Tuple[Tuple[int, bool], ...]
    threshold: int

    def __bool__(self):
        return self.verdict == "trivial"


def default_probe_range(formula: Formula, cap: Optional[int] = None) -> List[int]:
    m = metrics(formula)
    threshold = 2 ** (m.size + 1) + m.qr + 2
    if cap is not None:
        threshold = min(threshold, cap)
    lo = len(free_vars(formula)) + 1
    probes = set(range(lo, min(lo + 8, threshold + 1)))
    step = 16
    while step < threshold:
        probes.add(step)
        step *= 2
    probes.update({threshold - 2, threshold - 1, threshold})
    return sorted(p for p in probes if p >= lo)


def is_eventually_trivial(
    formula: Formula, probe_range: Optional[Sequence[int]] = None
) -> TrivialityVerdict:
    """Probe triviality over a range ending at the theoretical threshold
    2^(|phi|+1) + qr(phi) + 2; the verdict is the stabilized tail value, or
    `unstable` when the top three probes disagree."""
    m = metrics(formula)
    threshold = 2 ** (m.size + 1) + m.qr + 2
    probes = sorted(probe_range) if probe_range else default_probe_range(formula)
    results = tuple((n, is_trivial_at(formula, n)) for n in probes)
    tail = [v for _, v in results[-3:]]
    if all(tail):
        verdict = "trivial"
    elif not any(tail):
        verdict = "non_trivial"
    else:
        verdict = "unstable"
    return TrivialityVerdict(verdict, results, threshold)


# ---------------------------------------------------------------------------
# Redundancy: existential / almost existential optimal strategies
# ---------------------------------------------------------------------------


def has_existential_optimal(
    interp: Interpretation, formula: Formula
) -> Tuple[bool, Optional[Strategy]]:
    """Whether some optimal strategy avoids universal nodes entirely.  Decided
    exactly by a dynamic program over forall-free strategies (the argmax tie
    family can miss optimal strategies when an absorbing zero is involved)."""
    sr = interp.semiring
    tree = build_game_tree(formula, interp.universe)
    target = evaluate(interp, formula)

    best: Dict[int, object] = {}
    pick: Dict[int, int] = {}

    def go(node) -> Optional[object]:
        if node.kind == "forall":
            best[id(node)] = None
            return None
        if node.kind == "leaf":
            val = eval_strategy(interp, Strategy(node.formula, node.env, None, ()))
            best[id(node)] = val
            return val
        if node.kind == "and":
            val = sr.one
            for c in node.children:
                sub = go(c)
                if sub is None:
                    best[id(node)] = None
                    return None
                val = sr.mul(val, sub)
            best[id(node)] = val
            return val
        out = None
        for i, c in enumerate(node.children):
            sub = go(c)
            if sub is None:
                continue
            if out is None or sr.lt(out, sub):
                out = sub
                pick[id(node)] = i
        best[id(node)] = out
        return out

    def extract(node) -> Strategy:
        if node.kind == "leaf":
            return Strategy(node.formula, node.env, None, ())
        if node.kind == "and":
            return Strategy(
                node.formula, node.env, node.tags, tuple(extract(c) for c in node.children)
            )
        i = pick[id(node)]
        return Strategy(node.formula, node.env, node.tags[i], (extract(node.children[i]),))

    top = go(tree.root)
    if top is None or top != target:
        return False, None
    return True, extract(tree.root)


def has_almost_existential_optimal(
    interp: Interpretation, formula: Formula, guard: int = 10**6
) -> Tuple[bool, Optional[Strategy]]:
    """Search all strategies for an optimal one that does not rely on forall."""
    tree = build_game_tree(formula, interp.universe)
    target = evaluate(interp, formula)
    for s in enumerate_strategies(tree, guard):
        if eval_strategy(interp, s) == target and classify(s).cls != "relies_on_forall":
            return True, s
    return False, None


# ---------------------------------------------------------------------------
# Excluding 1-valuations
# ---------------------------------------------------------------------------


def _numeric(v) -> Fraction:
    if v == INF:
        return None
    return Fraction(v)


def eliminate_one_valuations(
    interp: Interpretation, formula: Formula, guard: int = 10**6
) -> Interpretation:
    """Replace every literal valued one by a value strictly below one, close
    enough that the strategy preorder is refined rather than disturbed.

    The bound uses the minimum strategy-value gap delta (including a dummy
    zero strategy) and the maximum leaf count e: for the Viterbi semiring any
    rational s with s^e > 1 - delta/value(psi) works, for the Lukasiewicz
    semiring s > 1 - delta/e, for the tropical semiring and the semiring of
    doubt s < delta/e; s is found by scanning 1 - 1/k or 1/k."""
    sr = interp.semiring
    if sr.id not in STRICT_SEMIRING_IDS:
        raise PreconditionError(f"{sr.id} is not one of the strict semirings")
    v0 = evaluate(interp, formula)
    if v0 == sr.zero:
        raise PreconditionError("formula evaluates to zero")
    if all(
        v != sr.one for key in interp.atom_keys() for v in interp.pair(*key)
    ):
        return interp
    tree = build_game_tree(formula, interp.universe)
    values = {sr.zero}
    max_leaves = 0
    for s in enumerate_strategies(tree, guard):
        values.add(eval_strategy(interp, s))
        leaves = sum(1 for leaf in Strategy.leaves_of(s) if isinstance(leaf.formula, Atom))
        max_leaves = max(max_leaves, leaves)
    e = max(max_leaves, 1)
    numeric = sorted(x for x in (_numeric(v) for v in values) if x is not None)
    gaps = [b - a for a, b in zip(numeric, numeric[1:]) if b > a]
    delta = min(gaps) if gaps else Fraction(1)

    def scan(cond, form):
        for k in itertools.count(2):
            s = form(k)
            if cond(s):
                return s

    if sr.id == "viterbi":
        bound = 1 - delta / Fraction(v0)
        s_new = scan(lambda s: s ** e > bound, lambda k: 1 - Fraction(1, k))
    elif sr.id == "lukasiewicz":
        s_new = scan(lambda s: s > 1 - delta / e, lambda k: 1 - Fraction(1, k))
    else:  # tropical, doubt: small positive value below delta/e
        s_new = scan(lambda s: s < delta / e, lambda k: Fraction(1, k))
    out = interp.with_values(lambda v: s_new if v == sr.one else v)
    if evaluate(out, formula) == sr.zero:
        raise PreconditionError("replacement unexpectedly zeroed the formula")
    return out


# ---------------------------------------------------------------------------
# Shrinking a counterexample via strategy translation
# ---------------------------------------------------------------------------


@dataclass
class ShrinkReport:
    small: Interpretation
    small_value: object
    original_value: object
    translated: Strategy


def shrink_counterexample(
    interp: Interpretation, strategy: Strategy, formula: Formula
) -> ShrinkReport:
    """Drop one element from a large interpretation and certify a strict
    extension-preservation violation, by translating the given optimal
    strategy down one universe size."""
    sr = interp.semiring
    r = qr(formula)
    k = len(interp.universe)
    need = 2 * (2 ** size(formula) + r + 1)
    if k < need:
        raise PreconditionError(f"universe size {k} below the bound {need}")
    v0 = evaluate(interp, formula)
    if v0 == sr.zero:
        raise PreconditionError("formula evaluates to zero")
    if eval_strategy(interp, strategy) != v0:
        raise PreconditionError("strategy is not optimal for the interpretation")
    has_good_forall = any(
        node.kind == "forall"
        and node.children
        and all(eval_strategy(interp, c) != sr.one for c in node.children)
        for node in strategy_nodes(strategy)
    )
    if not has_good_forall:
        raise PreconditionError(
            "no forall node with all child subtrees valued differently from one"
        )
    missing = sorted(set(interp.universe) - set(literal_elements(strategy)))
    if len(missing) < r + 1:
        raise PreconditionError(f"need {r + 1} elements outside the leaf literals")
    if tuple(interp.universe) != tuple(range(1, k + 1)):
        raise PreconditionError("universe must be 1..k")
    n = k - r - 1
    # permute the universe so the unused elements become n+1 .. n+r+1
    chosen = missing[-(r + 1):]
    perm = {}
    targets = list(range(n + 1, k + 1))
    rest_targets = [x for x in range(1, k + 1)]
    for c, t in zip(chosen, targets):
        perm[c] = t
    remaining_sources = [x for x in range(1, k + 1) if x not in chosen]
    remaining_targets = [x for x in range(1, k + 1) if x not in targets]
    for ssrc, tgt in zip(remaining_sources, remaining_targets):
        perm[ssrc] = tgt
    from .games import _map_strategy

    strat2 = _map_strategy(strategy, lambda e: perm[e])
    interp2 = interp.relabel(perm)
    tstar, _dropped = translate_strategy(strat2, n, r)
    small = interp2.restrict(range(1, n + r + 1))
    small_strat_value = eval_strategy(small, tstar)
    small_value = evaluate(small, formula)
    if not (sr.leq(v0, small_strat_value) and v0 != small_strat_value):
        raise PreconditionError("translated strategy did not strictly improve")
    if not (sr.leq(v0, small_value) and v0 != small_value):
        raise PreconditionError("shrunk interpretation does not refute preservation")
    return ShrinkReport(small, small_value, v0, tstar)


# ---------------------------------------------------------------------------
# Verification harness
# ---------------------------------------------------------------------------


@dataclass
class VerificationResult:
    ok: bool
    witness: Optional[Interpretation]
    checked: int
    description: str

    def __bool__(self):
        return self.ok


def verify_equivalent(
    f: Formula,
    g: Formula,
    semiring: Semiring,
    vocab: Vocabulary,
    value_set: Sequence,
    exhaustive_sizes: Sequence[int] = (1, 2, 3),
    samples: int = 1000,
    max_sample_size: int = 5,
    seed: int = 0,
    guard: int = 10**6,
) -> VerificationResult:
    desc = (
        f"exhaustive sizes {tuple(exhaustive_sizes)}, {samples} samples of sizes "
        f"<= {max_sample_size} over {semiring.id}"
    )
    checked = 0
    for n in exhaustive_sizes:
        for interp in enumerate_interpretations(semiring, vocab, n, value_set, guard):
            checked += 1
            if evaluate(interp, f) != evaluate(interp, g):
                return VerificationResult(False, interp, checked, desc)
    rng = random.Random(seed)
    for _ in range(samples):
        n = rng.randrange(1, max_sample_size + 1)
        interp = random_interpretation(semiring, vocab, n, value_set, rng)
        checked += 1
        if evaluate(interp, f) != evaluate(interp, g):
            return VerificationResult(False, interp, checked, desc)
    return VerificationResult(True, None, checked, desc)


# ---------------------------------------------------------------------------
# Rewriting pipelines
# ---------------------------------------------------------------------------


@dataclass
class RewriteReport:
    input: Formula
    output: Optional[Formula]
    threshold: int
    substitutions: List[dict] = field(default_factory=list)
    verification: Optional[VerificationResult] = None
    gate: Optional[PreservationVerdict] = None

    @property
    def ok(self) -> bool:
        return self.output is not None and bool(self.verification)

    def summary(self) -> str:
        lines = [f"input:  {self.input!r}"]
        if self.gate is not None and self.gate.refuted:
            pa, pb, _ = self.gate.witness
            lines.append("gate:   preservation refuted")
            lines.append(f"        pa = {pa!r}")
            lines.append(f"        pb = {pb!r}")
            lines.append(f"        values {self.gate.values!r}")
            return "\n".join(lines)
        for sub in self.substitutions:
            lines.append(
                f"subst:  {sub['subformula']!r} -> {sub['verdict']}"
            )
        lines.append(f"threshold n = {self.threshold}")
        if self.output is not None:
            lines.append(f"output: {self.output!r}")
        if self.verification is not None:
            status = "verified" if self.verification.ok else "FAILED"
            lines.append(f"verify: {status} ({self.verification.description})")
        return "\n".join(lines)


def _innermost_forall_paths(f: Formula) -> List[tuple]:
    """Paths to distinct-universal subformulae whose bodies are universal
    free, in leftmost order (no two such nodes nest, so pre-order is it)."""
    return find_subformula_paths(
        f,
        lambda g: isinstance(g, Forall)
        and g.distinct
        and metrics(g.body).qr_forall == 0,
    )


def _combine_large_universes(
    original_fo: Formula, core_fo: Formula, n: int
) -> Formula:
    """The size-split combination: existentially guard the core with n
    pairwise distinct elements and disjoin the size-i unfoldings for i <= n."""
    if n == 0:
        return core_fo
    avoid = set(free_vars(core_fo)) | {v for g in subformulas(core_fo) if isinstance(g, (Exists, Forall)) for v in [g.var]}
    xs = []
    i = 0
    while len(xs) < n:
        i += 1
        cand = f"g{i}"
        if cand not in avoid:
            xs.append(cand)
    distinct = [Eq(xs[a], xs[b], positive=False) for a in range(n) for b in range(a + 1, n)]
    guarded = make_and(distinct + [core_fo])
    for x in reversed(xs):
        guarded = Exists(x, guarded)
    parts = [guarded] + [psi_n(original_fo, i) for i in range(1, n + 1)]
    return make_or(parts)


def _finish_rewrite(
    original: Formula,
    core_foneq: Formula,
    semiring: Semiring,
    vocab: Vocabulary,
    value_set: Sequence,
    report: RewriteReport,
    exhaustive_sizes: Sequence[int],
    samples: int,
    max_sample_size: int,
    seed: int,
    combine_max: int,
    extra_checks=(),
) -> RewriteReport:
    core_fo = simplify_constants(foneq_to_fo(core_foneq))
    core_fo = dedupe_or_idempotent(core_fo)
    original_fo = original if is_fo(original) else foneq_to_fo(original)
    last_failure = None
    for n in range(0, combine_max + 1):
        candidate = _combine_large_universes(original_fo, core_fo, n)
        candidate = dedupe_or_idempotent(simplify_constants(candidate))
        verdict = verify_equivalent(
            original,
            candidate,
            semiring,
            vocab,
            value_set,
            exhaustive_sizes,
            samples,
            max_sample_size,
            seed,
        )
        ok = verdict.ok
        if ok:
            for check in extra_checks:
                extra = check(candidate)
                if not extra.ok:
                    verdict = extra
                    ok = False
                    break
        if ok:
            report.threshold = n
            report.output = canonical_bound_names(flatten_sigma1(candidate))
            report.verification = verdict
            return report
        last_failure = verdict
    report.threshold = combine_max
    report.output = None
    report.verification = last_failure
    return report


def rewrite_sigma1_strict(
    sentence: Formula,
    semiring: Semiring = VITERBI,
    value_set: Sequence = VITERBI_GRID,
    max_gate_size: int = 2,
    exhaustive_sizes: Sequence[int] = (1, 2, 3),
    samples: int = 1000,
    max_sample_size: int = 5,
    seed: int = 0,
    combine_max: int = 3,
    probe_cap: Optional[int] = None,
) -> RewriteReport:
    """Eliminate universal quantifiers over the Viterbi, tropical,
    Lukasiewicz, or doubt semiring: substitute each innermost universal
    subformula by true if eventually trivial and false otherwise, then patch
    small universes with the size-i unfoldings and flatten to a prenex
    existential sentence.  A preservation sanity gate runs first and a
    bounded verification suite decides acceptance."""
    if semiring.id not in STRICT_SEMIRING_IDS:
        raise PreconditionError(f"{semiring.id} is not one of the strict semirings")
    if not is_sentence(sentence):
        raise PreconditionError("input must be a sentence")
    vocab = Vocabulary.of_formula(sentence)
    report = RewriteReport(sentence, None, 0)
    report.gate = check_preservation(
        sentence, semiring, "extensions", max_gate_size, value_set, vocab
    )
    if report.gate.refuted:
        return report
    work = fo_to_foneq(sentence) if is_fo(sentence) else sentence
    work = simplify_constants(work)
    while True:
        paths = _innermost_forall_paths(work)
        if not paths:
            break
        path = paths[0]
        sub = path_get(work, path)
        probe = is_eventually_trivial(
            sub, None if probe_cap is None else default_probe_range(sub, probe_cap)
        )
        if probe.verdict == "unstable":
            report.substitutions.append(
                {"subformula": sub, "verdict": "unstable", "probes": probe.probes}
            )
            return report
        replacement = TRUE if probe.verdict == "trivial" else FALSE
        report.substitutions.append(
            {
                "subformula": sub,
                "verdict": probe.verdict,
                "replaced_by": replacement,
                "probe_threshold": probe.threshold,
            }
        )
        work = simplify_constants(substitute_subformula(work, path, replacement))
    return _finish_rewrite(
        sentence,
        work,
        semiring,
        vocab,
        value_set,
        report,
        exhaustive_sizes,
        samples,
        max_sample_size,
        seed,
        combine_max,
    )


def rewrite_sigma1_lattice(
    sentence: Formula,
    exhaustive_sizes: Sequence[int] = (1, 2, 3),
    samples: int = 400,
    max_sample_size: int = 4,
    seed: int = 0,
    combine_max: int = 3,
) -> RewriteReport:
    """Eliminate universal quantifiers over lattice semirings (any lattice
    other than the Boolean): repeatedly bring the innermost universal body
    into existential prenex DNF, pull out the disjuncts free of the
    universal variable by finite continuity, and drop the residual (its
    strategies all rely on the universal quantifier).  Verified by exhaustive
    S3 equivalence plus fuzzy grid sampling."""
    from .semirings import FUZZY

    if not is_sentence(sentence):
        raise PreconditionError("input must be a sentence")
    vocab = Vocabulary.of_formula(sentence)
    report = RewriteReport(sentence, None, 0)
    report.gate = check_preservation(sentence, S3, "extensions", 2, S3_VALUES, vocab)
    if report.gate.refuted:
        return report
    work = fo_to_foneq(sentence) if is_fo(sentence) else sentence
    work = simplify_constants(work)
    while True:
        paths = _innermost_forall_paths(work)
        if not paths:
            break
        path = paths[0]
        sub = path_get(work, path)
        y = sub.var
        zs, disjuncts = existential_prenex_dnf(sub.body)
        chi_parts = []
        psi_parts = []
        for theta in disjuncts:
            if y in free_vars(theta):
                psi_parts.append(theta)
            else:
                chi_parts.append(theta)
        pieces = []
        for theta in chi_parts:
            keep = [z for z in zs if z in free_vars(theta)]
            piece = theta
            for z in reversed(keep):
                piece = Exists(z, piece, distinct=True)
            pieces.append(piece)
        replacement = dedupe_or_idempotent(make_or(pieces)) if pieces else FALSE
        report.substitutions.append(
            {
                "subformula": sub,
                "verdict": "continuity-split",
                "kept": len(chi_parts),
                "dropped_residual": len(psi_parts),
                "replaced_by": replacement,
            }
        )
        work = simplify_constants(substitute_subformula(work, path, replacement))
    fuzzy_grid = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))

    def fuzzy_check(candidate):
        return verify_equivalent(
            sentence,
            candidate,
            FUZZY,
            vocab,
            fuzzy_grid,
            exhaustive_sizes=(),
            samples=samples,
            max_sample_size=max_sample_size,
            seed=seed,
        )

    return _finish_rewrite(
        sentence,
        work,
        S3,
        vocab,
        S3_VALUES,
        report,
        exhaustive_sizes,
        samples,
        max_sample_size,
        seed,
        combine_max,
        extra_checks=(fuzzy_check,),
    )


# ---------------------------------------------------------------------------
# S3 entailment and equivalence; counterexample lifting
# ---------------------------------------------------------------------------


@dataclass
class S3Verdict:
    consistent: bool
    witness: Optional[Interpretation]
    checked: int

    def __bool__(self):
        return self.consistent


def s3_entailment(
    phi: Sequence[Formula],
    psi: Sequence[Formula],
    sizes: Sequence[int] = (1, 2, 3),
    vocab: Optional[Vocabulary] = None,
    guard: int = 10**6,
) -> S3Verdict:
    """The lattice-entailment criterion: every S3 interpretation giving the
    premises value 1 must give the conclusions value 1.  A refutation
    transfers to every lattice semiring other than the Boolean."""
    vocab = vocab or Vocabulary.of_formula(*(list(phi) + list(psi)))
    checked = 0
    one = S3.one
    for n in sizes:
        for interp in enumerate_interpretations(S3, vocab, n, S3_VALUES, guard):
            checked += 1
            if evaluate_set(interp, phi) == one and evaluate_set(interp, psi) != one:
                return S3Verdict(False, interp, checked)
    return S3Verdict(True, None, checked)


def s3_equivalence(
    phi: Sequence[Formula],
    psi: Sequence[Formula],
    sizes: Sequence[int] = (1, 2, 3),
    vocab: Optional[Vocabulary] = None,
    guard: int = 10**6,
) -> S3Verdict:
    vocab = vocab or Vocabulary.of_formula(*(list(phi) + list(psi)))
    forward = s3_entailment(phi, psi, sizes, vocab, guard)
    if not forward:
        return forward
    backward = s3_entailment(psi, phi, sizes, vocab, guard)
    if not backward:
        return backward
    return S3Verdict(True, None, forward.checked + backward.checked)


def lift_counterexample_to_s3(
    lattice: FiniteLattice,
    pa: Interpretation,
    pb: Interpretation,
    sentences: Sequence[Formula],
) -> Tuple[Interpretation, Interpretation]:
    """Turn a lattice counterexample to extension preservation into an S3
    counterexample: adjoin a bottom, move the zero values onto it, find a
    weakly separating homomorphism for the two valuations, and compose."""
    if not is_subinterpretation(pa, pb):
        raise PreconditionError("pa must be a subinterpretation of pb")
    sr = pa.semiring
    if not isinstance(sr, LatticeSemiring):
        raise PreconditionError("interpretations must live over a lattice semiring")
    va = evaluate_set(pa, sentences)
    vb = evaluate_set(pb, sentences)
    if sr.leq(va, vb):
        raise PreconditionError("the pair does not refute extension preservation")
    starred, h_star = adjoin_bottom(lattice)
    sr_star = h_star.source
    new_bottom = starred.bottom

    def star_of(interp: Interpretation) -> Interpretation:
        table = {}
        for key in interp.atom_keys():
            pos, neg = interp.pair(*key)
            table[key] = (
                new_bottom if pos == sr.zero else pos,
                new_bottom if neg == sr.zero else neg,
            )
        return Interpretation(sr_star, interp.universe, interp.vocab, table)

    pa_star = star_of(pa)
    pb_star = star_of(pb)
    s = evaluate_set(pa_star, sentences)
    t = evaluate_set(pb_star, sentences)
    if sr_star.leq(s, t):
        raise PreconditionError("starred valuations unexpectedly ordered")
    h = find_weakly_separating_hom(starred, s, t, semiring=sr_star)
    if h is None:
        raise PreconditionError("no weakly separating homomorphism found")
    qa = compose_hom(h, pa_star)
    qb = compose_hom(h, pb_star)
    wa = evaluate_set(qa, sentences)
    wb = evaluate_set(qb, sentences)
    if not (S3.leq(wb, wa) and wa != wb):
        raise PreconditionError("lifted pair fails to certify the violation")
    return qa, qb
