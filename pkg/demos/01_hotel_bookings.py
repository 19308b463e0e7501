"""Booking prices as a tropical relation: independence, joins and a lossless split."""
from importlib import resources

from semiring_ci import CI, c_star, is_lossless, join, read_tsv, satisfies_ci

#### Load the relation
# Each row is a (Room, Date, Persons) booking annotated with a price.
# Under the tropical semiring, + is min and * is ordinary addition,
# so a marginal keeps the cheapest option.
path = resources.files("semiring_ci") / "data" / "hotel.tsv"
R = read_tsv(str(path))
print(R.semiring, R.schema)
for t, v in R.items():
    print("  ", t, R.semiring.format(v))

#### Is the date independent of the party size, given the room?
d = CI({"Room"}, {"Date"}, {"Persons"})
print(d, "holds:", satisfies_ci(R, d))

#### Marginals
K = R.semiring
for ys in (["Room", "Date"], ["Room", "Persons"]):
    print("cheapest by", "/".join(ys), {t: K.format(v) for t, v in R.marginal(ys).items()})

#### Joining the two marginals back
# The join rebuilds every price shifted by the constant c*, the
# product of the per-room minima.
J = join(R.marginal(["Room", "Date"]), R.marginal(["Room", "Persons"]))
print("c* =", c_star(R, ["Room"]))
print("join equals R shifted by c*:", J == R.scale(c_star(R, ["Room"])))

res = is_lossless(R, ["Room", "Date"], ["Room", "Persons"])
print("lossless:", res.outcome.name)
