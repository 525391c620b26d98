"""Command-line front end.

``ontominer mine`` runs one mining configuration and writes three files
into the output directory: ``patterns.txt`` (one frequent pattern per
line), ``stats.csv`` (per-depth candidate counters), and ``trie.graphml``
(the search trie).  ``ontominer compare`` runs the semantic and
non-semantic settings on the same KB and writes ``compare.csv`` with the
per-depth reduction ratios.  All outputs are deterministic functions of
the KB bytes and the configuration; wall-clock timing goes to stdout only.

Exit codes: 0 success, 1 parse/validation error, 2 inconsistent KB,
3 empty reference concept, 4 resource limit.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional
from xml.sax.saxutils import escape

from . import kbparse, miner as mining
from . import model as m
from .clausify import clausify, format_program
from .errors import (BranchLimitExceeded, EmptyReferenceConcept,
                     InconsistentKB, ParseError, UnsupportedAxiom)
from .reasoner import ChaseConfig, chase, format_models


@dataclass
class RunConfig:
    kb_path: str
    reference_concept: str
    minsup: Fraction
    max_depth: int
    mode: str = mining.MODE_SEM
    bias: Optional[tuple[str, ...]] = None
    out_dir: str = "out"
    covering_complement: bool = False
    cp_keep_nondl: bool = False
    equiv_scan: str = "whole-trie"
    skolem_depth: int = 3
    max_branches: int = 100000
    dump_program: Optional[str] = None
    dump_models: Optional[str] = None
    compare_modes: tuple[str, ...] = (mining.MODE_SEM, mining.MODE_NOSEM)


def _render_term(t: m.Term) -> str:
    return t.name


def _render_pattern(p: mining.Pattern) -> str:
    atoms = ", ".join(
        f"{a.pred}({', '.join(_render_term(t) for t in a.args)})"
        for a in p.atoms)
    return f"Q(key) :- {atoms}"


def _write_patterns(path: Path, result: mining.MineResult) -> None:
    entries = sorted(
        ((len(p.atoms), -s, i, p, s)
         for i, (p, s) in enumerate(result.patterns)),
        key=lambda e: e[:3])
    lines = [f"{float(s):.6f}\t{_render_pattern(p)}" for _, _, _, p, s in entries]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_stats(path: Path, result: mining.MineResult) -> None:
    lines = ["depth,gen,sat,sfree,cand,freq"]
    for depth in sorted(result.stats.per_depth):
        c = result.stats.per_depth[depth]
        lines.append(f"{depth},{c.gen},{c.sat},{c.sfree},{c.cand},{c.freq}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_graphml(path: Path, result: mining.MineResult) -> None:
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           '<graphml xmlns="http://graphml.graphdrawing.org/xmlns"',
           '         xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance"',
           '         xsi:schemaLocation="http://graphml.graphdrawing.org/xmlns'
           ' http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd">',
           '  <key id="d0" for="node" attr.name="atom" attr.type="string"/>',
           '  <key id="d1" for="node" attr.name="support" attr.type="double"/>',
           '  <key id="d2" for="node" attr.name="depth" attr.type="int"/>',
           '  <graph id="trie" edgedefault="directed">']
    nodes = result.trie.nodes()
    for node in nodes:
        atom = escape(f"{node.atom.pred}({', '.join(_render_term(t) for t in node.atom.args)})")
        out.append(f'    <node id="n{node.seq}">')
        out.append(f'      <data key="d0">{atom}</data>')
        out.append(f'      <data key="d1">{float(node.support):.6f}</data>')
        out.append(f'      <data key="d2">{node.depth}</data>')
        out.append('    </node>')
    edge = 0
    for node in nodes:
        for child in node.children:
            out.append(f'    <edge id="e{edge}" source="n{node.seq}" '
                       f'target="n{child.seq}"/>')
            edge += 1
    out.append('  </graph>')
    out.append('</graphml>')
    path.write_text("\n".join(out) + "\n", encoding="utf-8")


def _load(cfg: RunConfig) -> m.CombinedKB:
    return kbparse.load_kb(cfg.kb_path, cfg.covering_complement)


def _mining_config(cfg: RunConfig, mode: str) -> mining.MiningConfig:
    return mining.MiningConfig(
        reference_concept=cfg.reference_concept,
        minsup=cfg.minsup,
        max_depth=cfg.max_depth,
        mode=mode,
        bias=cfg.bias,
        equiv_scan_whole=(cfg.equiv_scan == "whole-trie"),
        cp_keep_nondl=cfg.cp_keep_nondl)


def run(cfg: RunConfig) -> int:
    """Mine one configuration and write patterns, stats, and the trie."""
    try:
        kb = _load(cfg)
        chase_cfg = ChaseConfig(cfg.skolem_depth, cfg.max_branches)
        if cfg.dump_program:
            Path(cfg.dump_program).write_text(format_program(clausify(kb)),
                                              encoding="utf-8")
        if cfg.dump_models:
            ms = chase(clausify(kb), kb.abox, chase_cfg)
            Path(cfg.dump_models).write_text(format_models(ms), encoding="utf-8")
        result = mining.mine(kb, _mining_config(cfg, cfg.mode), chase_cfg)
    except (ParseError, UnsupportedAxiom, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except InconsistentKB as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except EmptyReferenceConcept as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except BranchLimitExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_patterns(out / "patterns.txt", result)
    _write_stats(out / "stats.csv", result)
    _write_graphml(out / "trie.graphml", result)
    print(f"{len(result.patterns)} frequent patterns -> {out}")
    print(f"runtime: {result.stats.runtime:.3f}s")
    return 0


def compare_modes(cfg: RunConfig) -> int:
    """Run the requested settings on one KB and report the per-depth
    candidate/frequent reductions of the non-semantic run over the
    semantic one."""
    try:
        kb = _load(cfg)
        chase_cfg = ChaseConfig(cfg.skolem_depth, cfg.max_branches)
        results = {}
        for mode in cfg.compare_modes:
            results[mode] = mining.mine(kb, _mining_config(cfg, mode), chase_cfg)
    except (ParseError, UnsupportedAxiom, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except InconsistentKB as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except EmptyReferenceConcept as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except BranchLimitExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    depths = sorted({d for r in results.values() for d in r.stats.per_depth})
    header = ["depth"]
    for mode in results:
        tag = mode.replace("-", "_")
        header += [f"cand_{tag}", f"freq_{tag}"]
    header += ["reduction_cand", "reduction_freq"]
    lines = [",".join(header)]
    for depth in depths:
        row = [str(depth)]
        for mode in results:
            c = results[mode].stats.per_depth.get(depth, mining.Counts())
            row += [str(c.cand), str(c.freq)]
        sem = results.get(mining.MODE_SEM)
        nosem = results.get(mining.MODE_NOSEM)
        for attr in ("cand", "freq"):
            if sem is None or nosem is None:
                row.append("")
                continue
            s = getattr(sem.stats.per_depth.get(depth, mining.Counts()), attr)
            n = getattr(nosem.stats.per_depth.get(depth, mining.Counts()), attr)
            row.append(f"{n / s:.2f}" if s else "")
        lines.append(",".join(row))
    (out / "compare.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    for mode, r in results.items():
        print(f"{mode}: {len(r.patterns)} patterns, "
              f"runtime {r.stats.runtime:.3f}s")
    print(f"comparison -> {out / 'compare.csv'}")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kb", required=True, help="knowledge base file")
    p.add_argument("--ref-concept", required=True,
                   help="reference concept whose instances are counted")
    p.add_argument("--minsup", required=True,
                   help="minimum support in (0,1], e.g. 0.5 or 2/3")
    p.add_argument("--max-depth", required=True, type=int,
                   help="maximum number of atoms per pattern")
    p.add_argument("--mode", choices=[mining.MODE_SEM, mining.MODE_NOSEM,
                                      mining.MODE_SEM_TAX],
                   default=mining.MODE_SEM)
    p.add_argument("--bias", default=None,
                   help="comma-separated predicate list (default: all "
                        "predicates with a non-empty extension)")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--covering-complement", action="store_true",
                   help="read (equivalent A (not B)) as covering too, "
                        "not only disjointness")
    p.add_argument("--cp-keep-nondl", action="store_true",
                   help="keep non-DL facts in the KB copy used for the "
                        "semantic tests")
    p.add_argument("--equiv-scan", choices=["whole-trie", "same-depth"],
                   default="whole-trie")
    p.add_argument("--skolem-depth", type=int, default=3)
    p.add_argument("--max-branches", type=int, default=100000)
    p.add_argument("--dump-program", default=None, metavar="FILE")
    p.add_argument("--dump-models", default=None, metavar="FILE")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    minsup = Fraction(args.minsup)
    bias = tuple(s.strip() for s in args.bias.split(",")) if args.bias else None
    return RunConfig(
        kb_path=args.kb,
        reference_concept=args.ref_concept,
        minsup=minsup,
        max_depth=args.max_depth,
        mode=args.mode,
        bias=bias,
        out_dir=args.out,
        covering_complement=args.covering_complement,
        cp_keep_nondl=args.cp_keep_nondl,
        equiv_scan=args.equiv_scan,
        skolem_depth=args.skolem_depth,
        max_branches=args.max_branches,
        dump_program=args.dump_program,
        dump_models=args.dump_models)


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ontominer",
        description="Frequent conjunctive query discovery over combined "
                    "DL + rule knowledge bases")
    sub = parser.add_subparsers(dest="command", required=True)
    p_mine = sub.add_parser("mine", help="mine one configuration")
    _add_common(p_mine)
    p_cmp = sub.add_parser("compare", help="compare sem/nosem settings")
    _add_common(p_cmp)
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
    except (ValueError, ZeroDivisionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if args.command == "mine":
        return run(cfg)
    if args.mode == mining.MODE_SEM_TAX:
        cfg.compare_modes = (mining.MODE_SEM, mining.MODE_NOSEM,
                             mining.MODE_SEM_TAX)
    return compare_modes(cfg)


if __name__ == "__main__":
    sys.exit(main())
