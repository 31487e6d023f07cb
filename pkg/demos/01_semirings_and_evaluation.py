"""Evaluating first-order sentences in different semirings.

A sentence is not just true or false: annotate the atomic facts with values
from a commutative semiring and the connectives combine them (disjunction
adds, conjunction multiplies, quantifiers sum/multiply over the universe).
Depending on the semiring, the value of a sentence is a confidence, a cost,
a clearance level, or a count of evaluation strategies.
"""

from fractions import Fraction

from semlog import (
    Interpretation,
    NAT,
    TROPICAL,
    Vocabulary,
    evaluate,
    parse,
    parse_interpretation,
)

vocab = Vocabulary({"R": 1})

# Confidence values in the Viterbi semiring ([0,1], max, *):
pi = parse_interpretation(
    """
semiring: viterbi
universe: a b
R(a) = 1/2
R(b) = 1/4
default: 0
"""
)

exists = parse("E x. R(x)")
forall = parse("A x. R(x)")
print("viterbi  E x. R(x) =", evaluate(pi, exists))   # best single witness: 1/2
print("viterbi  A x. R(x) =", evaluate(pi, forall))   # joint confidence: 1/8

# The same shape as a cost problem in the tropical semiring (min, +):
costs = Interpretation.from_atoms(
    TROPICAL, (1, 2), vocab, {("R", (1,)): Fraction(3), ("R", (2,)): Fraction(5)}
)
print("tropical E x. R(x) =", evaluate(costs, exists))  # cheapest witness: 3
print("tropical A x. R(x) =", evaluate(costs, forall))  # total cost: 8

# Counting evaluation strategies in the natural semiring (+, *):
counts = Interpretation.from_atoms(NAT, (1, 2), vocab, {("R", (1,)): 2, ("R", (2,)): 3})
print("nat      E x. R(x) =", evaluate(counts, exists))  # 2 + 3 = 5
print("nat      A x. R(x) =", evaluate(counts, forall))  # 2 * 3 = 6

# Restricting the universe can RAISE a universally quantified value: the
# product loses factors.  This is the seed of everything in demo 04.
print("viterbi  A x. R(x) on {a} =", evaluate(pi.restrict([1]), forall))
