"""Provenance polynomials: evaluate once, specialize everywhere.

The canonical interpretation pi_n gives every literal over an n-element
universe its own indeterminate.  Evaluating a sentence there produces a
polynomial that records which facts are used and how often; any concrete
interpretation is then a consistent variable assignment, and specializing
the polynomial reproduces the concrete value.
"""

from fractions import Fraction

from semlog import NATPOLY, VITERBI, Vocabulary, evaluate, parse
from semlog.polynomials import NatPoly, SPOLY, lit_var
from semlog.provenance import assignment_from_interpretation, pi_n, specialization_hom
from semlog.interpretations import Interpretation

vocab = Vocabulary({"R": 1})
psi = parse("E x. A y. R(x)")

# In N[X] the universal quantifier raises each witness to the n-th power:
for n in (1, 2, 3, 4):
    poly = evaluate(pi_n(vocab, n, "nat"), psi)
    # collapse all positive R-variables onto one indeterminate x
    collapse = {}
    for i in range(1, n + 1):
        collapse[lit_var("R", (i,), True)] = NatPoly.var("x")
        collapse[lit_var("R", (i,), False)] = NatPoly.zero()
    h = specialization_hom(collapse, NATPOLY, NATPOLY)
    print(f"pi_{n} [[ E x. A y. R(x) ]] ->", h(poly))
# The degree grows with the universe, which no existential sentence can do:
# a quantifier-free matrix multiplies only as many literals as it mentions.

# Absorptive polynomials drop dominated monomials: smaller exponents absorb.
pin = pi_n(vocab, 2, "absorptive")
print("absorptive value:", evaluate(pin, parse("E! x. R(x)")))
print("absorbed sum:    ", evaluate(pin, parse("(E! x. R(x)) | A! x. R(x)")))

# Specializing the absorptive value reproduces any concrete evaluation.
concrete = Interpretation.from_atoms(
    VITERBI, (1, 2), vocab, {("R", (1,)): Fraction(1, 2), ("R", (2,)): Fraction(1, 4)}
)
assignment = assignment_from_interpretation(concrete)
h = specialization_hom(assignment, SPOLY, VITERBI)
for text in ("E x. R(x)", "A x. R(x)", "E x. A y. R(x)"):
    f = parse(text)
    specialized = h(evaluate(pin, f))
    direct = evaluate(concrete, f)
    print(f"{text:18} specialize={specialized}  direct={direct}")
    assert specialized == direct
