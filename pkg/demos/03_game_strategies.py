"""Model-checking games: the value of a sentence is a sum over strategies.

A strategy resolves every disjunction and every existential quantifier; its
value is the product of the literal values it commits to.  Summing over all
strategies recovers the sentence value exactly, in every semiring; in
max-semirings the value is attained by an optimal strategy, which can be
extracted by dynamic programming.
"""

from fractions import Fraction

from semlog import (
    Interpretation,
    VITERBI,
    Vocabulary,
    build_game_tree,
    classify,
    enumerate_strategies,
    eval_strategy,
    optimal,
    parse,
    sum_of_strategies_check,
)

vocab = Vocabulary({"R": 1})
pi = Interpretation.from_atoms(
    VITERBI, (1, 2), vocab, {("R", (1,)): Fraction(1, 2), ("R", (2,)): Fraction(1, 4)}
)

psi = parse("E x. A y. R(x)")
tree = build_game_tree(psi, pi.universe)
print("strategies for E x. A y. R(x) over two elements:")
for s in enumerate_strategies(tree):
    print("  pick x =", s.tag, "-> value", eval_strategy(pi, s))

report = sum_of_strategies_check(pi, psi)
print("sum over strategies:", report.strategy_sum, "= eval:", report.eval_value)

best = optimal(pi, psi)
print("optimal value:", best.value, "witness:", best.strategy.tag,
      "ties:", best.all_optimal_count)

# Strategy classes matter for quantifier elimination: an existential strategy
# never enters a universal quantifier; an almost existential one may, as long
# as some branch avoids literals naming its own instantiation.
for text in ("E! x. R(x)", "A! y. E! z. R(z)", "A! y. R(y)"):
    f = parse(text)
    tree = build_game_tree(f, 3)
    kinds = sorted({classify(s).cls for s in enumerate_strategies(tree)})
    print(f"{text:18} strategy classes: {kinds}")
