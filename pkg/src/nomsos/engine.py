"""Transition derivation: matching rule conclusions against states,
discharging premises and freshness side conditions, and assembling proof
trees.

The search is tabled: a memo maps each (state, candidate-atom set) subgoal
to the residuals found so far, cycles are cut by returning the current
table entry, and the whole search reruns until the table is stable.  Atom
instantiations are drawn from the free atoms of the state plus a bounded
number of fresh representatives per sort; by equivariance of the rule set,
the fresh representatives stand for their whole orbit."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Optional

from .alpha import alpha_eq, normalize, nt_fresh, nt_support
from .atoms import Atom
from .matching import AtomPool, MatchState, instantiate_full, match_term
from .printer import atom_str, term_str
from .spec import Rule, Spec
from .terms import (
    App,
    MetaAtom,
    RawTerm,
    Variable,
    instantiate,
    is_ground,
    meta_atoms,
    subst_apply,
    term_vars,
)


@dataclass(frozen=True)
class Budget:
    depth: int = 1000
    fresh: int = 2


@dataclass(frozen=True)
class Transition:
    """A state paired with a residual, both in canonical form."""

    state: RawTerm
    residual: RawTerm


@dataclass(frozen=True)
class ProofTree:
    rule_name: str
    atoms: tuple[tuple[str, Atom], ...]
    subst: tuple[tuple[Variable, RawTerm], ...]
    transition: Transition
    children: tuple["ProofTree", ...]
    discharged: tuple[tuple[Atom, RawTerm], ...]


@dataclass(frozen=True)
class Derivation:
    transition: Transition
    tree: ProofTree
    fresh_atoms: tuple[Atom, ...]
    """Atoms in the residual drawn from outside the state's support; when
    non-empty the derivation is an orbit representative."""


@dataclass(frozen=True)
class Enumeration:
    derivations: tuple[Derivation, ...]
    truncated: bool


@dataclass(frozen=True)
class ProveOutcome:
    tree: Optional[ProofTree]
    truncated: bool


def transition_str(tr: Transition) -> str:
    return f"{term_str(tr.state)} -> {term_str(tr.residual)}"


class _Search:
    def __init__(self, spec: Spec, budget: Budget):
        self.spec = spec
        self.budget = budget
        self.table: dict[tuple, dict[RawTerm, ProofTree]] = {}
        self.truncated = False
        self.changed = False
        self.active: set[tuple] = set()
        self.settled: set[tuple] = set()

    def run(self, state: RawTerm, extra: frozenset[Atom]) -> dict[RawTerm, ProofTree]:
        while True:
            self.changed = False
            self.active = set()
            self.settled = set()
            self._solve(state, extra, self.budget.depth)
            if not self.changed:
                break
        return self.table[(state, extra)]

    def _solve(
        self, state: RawTerm, extra: frozenset[Atom], depth: int
    ) -> dict[RawTerm, ProofTree]:
        key = (state, extra)
        entry = self.table.setdefault(key, {})
        if key in self.active or key in self.settled:
            return entry
        if depth <= 0:
            self.truncated = True
            return entry
        self.active.add(key)
        pool = AtomPool(
            tuple(sorted(set(nt_support(state)) | extra)), self.budget.fresh
        )
        for rule in self.spec.rules:
            for st in match_term(rule.conclusion.source, state, MatchState(), pool):
                self._premises(rule, 0, st, (), state, extra, depth, pool, entry)
        self.active.discard(key)
        self.settled.add(key)
        return entry

    def _premises(
        self,
        rule: Rule,
        i: int,
        st: MatchState,
        children: tuple[ProofTree, ...],
        state: RawTerm,
        extra: frozenset[Atom],
        depth: int,
        pool: AtomPool,
        entry: dict[RawTerm, ProofTree],
    ) -> None:
        if i == len(rule.premises):
            self._conclude(rule, st, children, state, pool, entry)
            return
        premise = rule.premises[i]
        for st1 in self._bind_metas(meta_atoms(premise.source), st, pool):
            src = instantiate_full(premise.source, st1)
            if not is_ground(src):
                continue
            src = normalize(src)
            inner_extra = extra | set(st1.metas.values())
            subgoals = self._solve(src, frozenset(inner_extra), depth - 1)
            for residual, subtree in list(subgoals.items()):
                for st2 in match_term(premise.target, residual, st1, pool):
                    self._premises(
                        rule, i + 1, st2, children + (subtree,), state, extra, depth, pool, entry
                    )

    def _conclude(
        self,
        rule: Rule,
        st: MatchState,
        children: tuple[ProofTree, ...],
        state: RawTerm,
        pool: AtomPool,
        entry: dict[RawTerm, ProofTree],
    ) -> None:
        pending: set[MetaAtom] = set(meta_atoms(rule.conclusion.target))
        for ra in rule.env:
            pending |= meta_atoms(ra.term)
            if isinstance(ra.atom, MetaAtom):
                pending.add(ra.atom)
        for st1 in self._bind_metas(pending, st, pool):
            if not self._admissible(rule, st1):
                continue
            discharged = []
            ok = True
            for ra in rule.env:
                atom = st1.metas[ra.atom.name] if isinstance(ra.atom, MetaAtom) else ra.atom
                t = instantiate_full(ra.term, st1)
                if not is_ground(t) or not nt_fresh(atom, t):
                    ok = False
                    break
                discharged.append((atom, normalize(t)))
            if not ok:
                continue
            residual = instantiate_full(rule.conclusion.target, st1)
            if not is_ground(residual):
                continue
            residual = normalize(residual)
            if residual in entry:
                continue
            names = {m.name for m in rule.metas}
            atoms = tuple(
                (n, a) for n, a in sorted(st1.metas.items()) if n in names
            )
            rule_vars = set().union(*(term_vars(t) for t in rule.terms()))
            subst = tuple(
                (v, t) for v, t in sorted(st1.subst.items(), key=lambda kv: kv[0].name)
                if v in rule_vars
            )
            entry[residual] = ProofTree(
                rule_name=rule.name,
                atoms=atoms,
                subst=subst,
                transition=Transition(state, residual),
                children=children,
                discharged=tuple(discharged),
            )
            self.changed = True

    def _admissible(self, rule: Rule, st: MatchState) -> bool:
        for lvar, excluded in rule.label_excluded:
            v = self.spec.variables.get(lvar)
            if v is None:
                return False
            bound = st.subst.get(v)
            if isinstance(bound, App) and bound.func in excluded:
                return False
        return True

    def _bind_metas(
        self, metas: Iterable[MetaAtom], st: MatchState, pool: AtomPool
    ) -> list[MatchState]:
        unbound = sorted(
            (m for m in metas if m.name not in st.metas), key=lambda m: m.name
        )
        if not unbound:
            return [st]
        out = []
        for combo in product(*(pool.candidates(m.sort) for m in unbound)):
            st1 = st
            for m, a in zip(unbound, combo):
                st1 = st1.with_meta(m.name, a)
            out.append(st1)
        return out


def enumerate_transitions(
    spec: Spec,
    state: RawTerm,
    budget: Budget = Budget(),
    extra_atoms: Iterable[Atom] = (),
) -> Enumeration:
    s = normalize(state)
    base = set(nt_support(s)) | set(extra_atoms)
    search = _Search(spec, budget)
    table = search.run(s, frozenset(extra_atoms))
    derivations = []
    for residual, tree in table.items():
        fresh = tuple(sorted(set(nt_support(residual)) - base))
        derivations.append(Derivation(Transition(s, residual), tree, fresh))
    derivations.sort(key=lambda d: term_str(d.transition.residual))
    return Enumeration(tuple(derivations), search.truncated)


def prove(
    spec: Spec, source: RawTerm, target: RawTerm, budget: Budget = Budget()
) -> ProveOutcome:
    s = normalize(source)
    r = normalize(target)
    enum = enumerate_transitions(
        spec, s, budget, extra_atoms=tuple(sorted(nt_support(r)))
    )
    for d in enum.derivations:
        if d.transition.residual == r:
            return ProveOutcome(d.tree, False)
    return ProveOutcome(None, enum.truncated)


def replay(spec: Spec, tree: ProofTree) -> list[str]:
    """Re-check every node of a proof tree against its rule; returns the
    list of violations (empty when the tree is valid)."""

    errors: list[str] = []
    rules = {r.name: r for r in spec.rules}
    rule = rules.get(tree.rule_name)
    if rule is None:
        return [f"unknown rule {tree.rule_name!r}"]
    asg = dict(tree.atoms)
    subst = dict(tree.subst)

    def inst(t: RawTerm) -> RawTerm:
        return subst_apply(subst, instantiate(t, asg))

    where = f"node {tree.rule_name}"
    if not alpha_eq(inst(rule.conclusion.source), tree.transition.state):
        errors.append(f"{where}: conclusion source mismatch")
    if not alpha_eq(inst(rule.conclusion.target), tree.transition.residual):
        errors.append(f"{where}: conclusion target mismatch")
    if len(tree.children) != len(rule.premises):
        errors.append(f"{where}: expected {len(rule.premises)} premises")
    else:
        for premise, child in zip(rule.premises, tree.children):
            if not alpha_eq(inst(premise.source), child.transition.state):
                errors.append(f"{where}: premise source mismatch")
            if not alpha_eq(inst(premise.target), child.transition.residual):
                errors.append(f"{where}: premise target mismatch")
            errors.extend(replay(spec, child))
    for ra in rule.env:
        atom = asg[ra.atom.name] if isinstance(ra.atom, MetaAtom) else ra.atom
        if not nt_fresh(atom, inst(ra.term)):
            errors.append(f"{where}: freshness {atom_str(atom)} # {term_str(inst(ra.term))} fails")
    for lvar, excluded in rule.label_excluded:
        v = spec.variables.get(lvar)
        bound = subst.get(v) if v is not None else None
        if isinstance(bound, App) and bound.func in excluded:
            errors.append(f"{where}: label {bound.func} is excluded")
    return errors


def tree_dict(tree: ProofTree) -> dict:
    return {
        "rule": tree.rule_name,
        "atoms": {n: atom_str(a) for n, a in tree.atoms},
        "subst": {v.name: term_str(t) for v, t in tree.subst},
        "state": term_str(tree.transition.state),
        "residual": term_str(tree.transition.residual),
        "freshness": [
            f"{atom_str(a)} # {term_str(t)}" for a, t in tree.discharged
        ],
        "children": [tree_dict(c) for c in tree.children],
    }


def tree_text(tree: ProofTree, indent: int = 0) -> str:
    pad = "  " * indent
    lines = [f"{pad}{transition_str(tree.transition)}   [{tree.rule_name}]"]
    for a, t in tree.discharged:
        lines.append(f"{pad}  with {atom_str(a)} # {term_str(t)}")
    for child in tree.children:
        lines.append(tree_text(child, indent + 1))
    return "\n".join(lines)
