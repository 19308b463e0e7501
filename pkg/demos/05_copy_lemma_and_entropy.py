"""The copy construction, and the machine-checked proof of a non-Shannon inequality."""
import itertools
from fractions import Fraction
from importlib import resources

from semiring_ci import NATURALS, NONNEG_RATIONALS, KRelation, check_entropic_proof, copy_extend
from semiring_ci.info import entropic_vector, zhang_yeung_value
from semiring_ci.proofs import check_copy_extension, load_proof

#### Copying B conditionally on A
R = KRelation(("A", "B"), NATURALS, {("0", "0"): 1, ("0", "1"): 2, ("1", "0"): 3})
ext = copy_extend(R, ["A"], ["B"])
print("scale", ext.scale, "checks", check_copy_extension(R, ext))
for t, v in ext.relation.items():
    print("  ", t, v)

#### Checking the proof script
data = resources.files("semiring_ci") / "data"
script = load_proof(str(data / "zhang_yeung.proof.json"))
print(script.name, len(script.steps), "steps:", check_entropic_proof(None, script))
print("goal:", script.goal)

bad = load_proof(str(data / "negative" / "zy_changed_coefficient.proof.json"))
print("mutant:", check_entropic_proof(None, bad))

#### Numerical sanity on a few distributions
def uniform_xor():
    rows = {}
    for a, b in itertools.product((0, 1), repeat=2):
        rows[(str(a), str(b), str(a ^ b), str(a))] = Fraction(1, 4)
    return KRelation(tuple("ABCD"), NONNEG_RATIONALS, rows)

hv = entropic_vector(uniform_xor())
print("value on a xor distribution:", round(zhang_yeung_value(hv, *"ABCD"), 6))
