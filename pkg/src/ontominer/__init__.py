"""Frequent pattern discovery over combined knowledge bases: a DL
terminology plus DL-safe disjunctive rules and facts, reasoned over with a
branching chase, mined with a semantically pruned trie search."""

from .errors import (BranchLimitExceeded, EmptyReferenceConcept,
                     InconsistentKB, OntominerError, ParseError,
                     UnsupportedAxiom)
from .kbparse import load_kb, parse_kb, serialize_kb
from .clausify import GroundProgram, ProgramRule, clausify, format_program, normalize
from .miner import (MineResult, MiningConfig, Pattern, RunStats, Trie,
                    TrieNode, mine, refine_candidates, refine_with_taxonomy,
                    semantic_filter, support, trivial_pattern)
from .model import (Atom, CombinedKB, Const, DLRule, Predicate, Var,
                    check_dl_safety, make_dl_safe)
from .reasoner import (ChaseConfig, ModelSet, QuerySpec, SemanticContext,
                       Taxonomy, answer_query, cautious_entails, chase,
                       classify, equivalent, format_models,
                       is_satisfiable_query, subsumes)

__version__ = "0.1.0"

__all__ = [
    "Atom", "BranchLimitExceeded", "ChaseConfig", "CombinedKB", "Const",
    "DLRule", "EmptyReferenceConcept", "GroundProgram", "InconsistentKB",
    "MineResult", "MiningConfig", "ModelSet", "OntominerError", "ParseError",
    "Pattern", "Predicate", "ProgramRule", "QuerySpec", "RunStats",
    "SemanticContext", "Taxonomy", "Trie", "TrieNode", "UnsupportedAxiom",
    "Var", "answer_query", "cautious_entails", "chase", "check_dl_safety",
    "classify", "clausify", "equivalent", "format_models", "format_program",
    "is_satisfiable_query", "load_kb", "make_dl_safe", "mine", "normalize",
    "parse_kb", "refine_candidates", "refine_with_taxonomy",
    "semantic_filter", "serialize_kb", "subsumes", "support",
    "trivial_pattern",
]
