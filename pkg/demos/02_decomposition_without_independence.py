"""Over pairs of a natural and a parity bit, a join can be lossless without independence."""
from importlib import resources

from semiring_ci import CI, equivalent, find_violation, is_lossless, join, read_tsv

#### The relation
R = read_tsv(str(resources.files("semiring_ci") / "data" / "parity_pairs.tsv"))
K = R.semiring
print({t: K.format(v) for t, v in R.items()})

#### Independence fails
# Pairs (n, b) add pointwise (b with xor) and multiply pointwise (b with and).
w = find_violation(R, CI((), {"A"}, {"B"}))
print("witness tuple", w["tuple"], "lhs", K.format(w["lhs"]), "rhs", K.format(w["rhs"]))

#### The join still reconstructs R up to scalars
J = join(R.marginal(["A"]), R.marginal(["B"]))
print("join:", {t: K.format(v) for t, v in J.items()})
eq = equivalent(R, J)
print("equivalent:", eq.outcome.name, "a =", K.format(eq.a), "b =", K.format(eq.b))
print("is_lossless:", is_lossless(R, ["A"], ["B"]).outcome.name)
# This semiring is not multiplicatively cancellative, which is exactly the
# hypothesis the converse direction needs.
print("mult cancellative:", K.flags.mult_cancellative)
