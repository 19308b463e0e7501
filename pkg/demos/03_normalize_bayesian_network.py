"""Turn the local independences of a small Bayesian network into a 4NF schema."""
from importlib import resources

from semiring_ci import normalize_4nf
from semiring_ci.dependency import load_dependencies

#### Input dependencies
sigma = load_dependencies(str(resources.files("semiring_ci") / "data" / "bn.jsonl"))
for d in sigma:
    print("  ", d)

#### Plan
# At each step the violating dependency with the shortest, then
# alphabetically first, left side is split off.
plan = normalize_4nf(tuple("ABCDE"), sigma)
for s in plan.steps:
    print(f"split {''.join(s.parent)} on {s.mvd} into {''.join(s.left)} + {''.join(s.right)}")
print("result:", [''.join(s) for s in plan.schemas])
