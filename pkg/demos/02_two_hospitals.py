"""
Conditional success rates in a 2x2 table
========================================

Two hospitals each report a 2x2 table of (treatment) by (outcome). We test
whether the first row's conditional success rate is smaller than the
second's, under a multinomial sampling model for the whole table.
"""

from ordbayes import McConfig, MultinomialHyper, MultinomialTable, sweep_q
from ordbayes.io import emit_report
from ordbayes.multinomial import bf_intrinsic_e0_mult_exact

tables = {
    "hospital 34": MultinomialTable([[20, 0], [18, 5]]),
    "hospital 16": MultinomialTable([[7, 0], [9, 2]]),
}
hyper = MultinomialHyper.uniform(2, 2)

# "cond(i,j)" is the probability of column j given row i.
constraint = "cond(1,1)<cond(2,1)"

for name, table in tables.items():
    # The proposal scheme draws posterior imaginary tables straight from the
    # importance candidate. See the README for the three available schemes.
    rep = sweep_q(table, hyper, constraint, [0, 0.5, 1], McConfig(100_000, seed=2), scheme="proposal")
    print(f"## {name}\n")
    print(emit_report(rep, "md").decode())

# For small tables the intrinsic Bayes factor can also be enumerated exactly
# over every imaginary table with the training total t.
for t in (0, 2, 4, 8):
    print("hospital 34, t =", t, "exact BF_e0 =", round(bf_intrinsic_e0_mult_exact(tables["hospital 34"], hyper, t), 4))
