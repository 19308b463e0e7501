"""Deciding implication: the two-tuple test for saturated CIs, the chase for embedded ones."""
from importlib import resources

from semiring_ci import CI, FD, chase_emvd, check_derivation, derive_scifd, implies_scifd
from semiring_ci.dependency import dependency_from_json, load_dependencies

#### Saturated CIs and FDs
V = tuple("ABCD")
sigma = [CI({"A"}, {"B"}, {"C", "D"}), FD({"B"}, {"C"})]
for tau in [CI({"A", "C"}, {"B"}, {"D"}), CI({"B"}, {"A"}, {"C"}), CI((), {"A"}, {"B"})]:
    res = implies_scifd(V, sigma, tau)
    print(tau, "implied" if res.holds else f"not implied, agree set {sorted(res.counterexample)}")

#### A checked derivation
tau = CI({"A", "C"}, {"B"}, {"D"})
steps = derive_scifd(V, sigma, tau)
for i, s in enumerate(steps, 1):
    print(f"  {i}. {s.formula}  [{s.rule} {list(s.premises)}]")
print("checker:", check_derivation(V, sigma, steps))

#### Embedded dependencies need the chase
data = resources.files("semiring_ci") / "data"
sigma = load_dependencies(str(data / "cycle_sigma.jsonl"))
tau = dependency_from_json((data / "cycle_tau.json").read_text())
res = chase_emvd(sigma, tau)
print(res.verdict, "after", res.steps, "steps")
for row in res.state.tuples:
    print("  ", row)
