"""The {2,3} walkthrough: pair values, staged grids, and the truncated union.

A masa built by the inductive construction carries one value per sibling pair
of multi-indices; its invariant is the union over all pairs of the value
times the base-masa cutdown type.  Assigning 2 to the unique level-0 pair and
3 everywhere deeper realizes {2,3}.  The staged grids show how the values sit
inside the dyadic picture: 2 across the first split, 3 in the within-branch
off-diagonals, ones (and ultimately the marked diagonal line) on the
diagonal.
"""

from puklab import (
    CutdownOracle,
    LambdaSpec,
    MultiIndex,
    Override,
    diagram_from_construction,
    eval_construction,
    render,
)
from puklab.nsets import INF, NSet

zero = MultiIndex.from_bits(["0"])
one = MultiIndex.from_bits(["1"])
intro = LambdaSpec(default=3, overrides=(Override(0, zero, one, 2),))
oracle = CutdownOracle.simple()

print("== evaluating the truncated union ==")
for r_max in range(4):
    result = eval_construction(intro, oracle, r_max)
    levels = ", ".join(f"level {r}: {{{s}}}" for r, s in enumerate(result.per_level))
    print(f"r_max={r_max}: value {{{result.value}}} "
          f"(converged: {result.converged}) [{levels}]")

print("\n== staged multiplicity grids ==")
for r in range(3):
    print(f"-- truncation level {r} (grid side {2 ** (r + 1)}) --")
    print(render(diagram_from_construction(intro, oracle, r), "ascii"))

print("== the all-infinity choice ==")
spec = LambdaSpec(default=INF)
result = eval_construction(spec, oracle, 2)
print(f"value {{{result.value}}}, converged: {result.converged}")
print(render(diagram_from_construction(spec, oracle, 0), "ascii"))

print("== a non-trivial base masa ==")
print("With a base oracle whose off-diagonal cutdowns have type {4}, the")
print("same pair values multiply in:")
table = {
    ("0", "0"): "1",
    ("0", "1"): "4",
    ("1", "0"): "4",
    ("1", "1"): "1",
}
oracle4 = CutdownOracle.from_table(1, {k: NSet.parse(v) for k, v in table.items()})
result = eval_construction(LambdaSpec(default=2), oracle4, 0)
print(f"constant value 2 against that oracle at r_max=0: {{{result.value}}}")
