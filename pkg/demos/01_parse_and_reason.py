"""Walk through loading a combined KB and reasoning over it.

The bank KB mixes three kinds of knowledge: terminology (a client is an
owner of something, accounts and credit cards are disjoint, every account
has an owner...), DL-safe rules (family accounts are co-owned by known
relatives), and plain facts.  We clausify it into one disjunctive rule
program, saturate the facts with the chase, and look at what follows in
every minimal model.
"""

from pathlib import Path

from ontominer import (cautious_entails, chase, clausify, format_models,
                       format_program, load_kb)
from ontominer.model import CONCEPT, Atom, Const

kb = load_kb(str(Path(__file__).parent / "bank.kb"))
print(f"{len(kb.tbox)} axioms, {len(kb.rules)} rules, {len(kb.abox)} facts, "
      f"individuals: {', '.join(sorted(kb.individuals))}\n")

program = clausify(kb)
print("The clausified program (existential heads are skolemized later):\n")
print(format_program(program))

models = chase(program, kb.abox)
print(f"The chase found {len(models.models)} minimal models. The variation "
      "comes from the rule\nthat makes every client a man or a woman, for "
      "the two clients whose sex is\nnot asserted:\n")
print(format_models(models))

# Nothing says account2 is a property, but every account has an owner, and
# having an owner means being a property; the anonymous owner exists in
# every model even though it never shows up as a named individual.
for name in ("a1", "cc1", "account2"):
    atom = Atom("Property", (Const(name),), CONCEPT)
    print(f"Property({name}) holds in every minimal model: "
          f"{cautious_entails(models, atom)}")
