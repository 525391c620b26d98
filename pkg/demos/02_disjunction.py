"""Why rules must see the disjunctive knowledge, not just its consequences.

Pat is asserted to be a man or a woman, nobody knows which.  Computing the
atomic consequences first and applying the rules afterwards would derive
nothing: neither Man(Pat) nor Woman(Pat) is certain.  Evaluating the rules
inside each minimal model instead derives Human(Pat) in both branches, so
it is a cautious consequence.
"""

from pathlib import Path

from ontominer import cautious_entails, chase, clausify, load_kb
from ontominer.model import CONCEPT, Atom, Const

kb = load_kb(str(Path(__file__).parent / "pat.kb"))
models = chase(clausify(kb), kb.abox)

print("Minimal models:")
for model in models.models:
    print("  {", ", ".join(f"{a[0]}({a[1]})" for a in sorted(model)), "}")

pat = Const("Pat")
for concept in ("Human", "Man", "Woman"):
    atom = Atom(concept, (pat,), CONCEPT)
    print(f"{concept}(Pat) cautiously entailed: {cautious_entails(models, atom)}")
