"""Raw terms: sorted syntax trees with variables, atoms, explicit (delayed)
permutations, abstractions, tuples and constructor applications, plus the
permutation action, support, substitution and sort checking."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .atoms import (
    AbsSort,
    Atom,
    AtomSort,
    AtomSortRef,
    BaseSort,
    NominalSort,
    Permutation,
    ProdSort,
    Signature,
    sort_str,
)


@dataclass(frozen=True, order=True)
class Variable:
    """An unknown, standing for a raw term of its sort."""

    name: str
    sort: NominalSort = None  # type: ignore[assignment]

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class MetaAtom:
    """A schematic atom of a rule, universally quantified over its sort.
    Only appears in rule/strat patterns, never in concrete terms."""

    name: str
    sort: AtomSort

    def __str__(self) -> str:
        return self.name


AtomLike = Union[Atom, MetaAtom]

# A delayed permutation in a pattern may mention meta atoms; it is kept as a
# transposition list until the metas are instantiated.
SwapList = tuple[tuple[AtomLike, AtomLike], ...]
PermLike = Union[Permutation, SwapList]


@dataclass(frozen=True)
class Var:
    var: Variable


@dataclass(frozen=True)
class Atm:
    atom: AtomLike


@dataclass(frozen=True)
class Susp:
    """Moderated term: an explicit permutation over a term."""

    perm: PermLike
    term: "RawTerm"


@dataclass(frozen=True)
class Abs:
    binder: AtomLike
    body: "RawTerm"


@dataclass(frozen=True)
class Tup:
    items: tuple["RawTerm", ...]


@dataclass(frozen=True)
class App:
    func: str
    arg: "RawTerm"


RawTerm = Union[Var, Atm, Susp, Abs, Tup, App]


def _concrete_perm(p: PermLike) -> Permutation:
    if isinstance(p, Permutation):
        return p
    for a, b in p:
        if isinstance(a, MetaAtom) or isinstance(b, MetaAtom):
            raise ValueError(f"permutation still contains meta atoms: {a} {b}")
    return Permutation.from_swaps(p)  # type: ignore[arg-type]


def act(perm: Permutation, t: RawTerm) -> RawTerm:
    """Permutation action on raw terms. Variables are fixed; a delayed
    permutation is conjugated."""
    match t:
        case Var(_):
            return t
        case Atm(a):
            assert isinstance(a, Atom)
            return Atm(perm(a))
        case Susp(p, s):
            return Susp(perm.conjugate(_concrete_perm(p)), act(perm, s))
        case Abs(a, s):
            assert isinstance(a, Atom)
            return Abs(perm(a), act(perm, s))
        case Tup(items):
            return Tup(tuple(act(perm, s) for s in items))
        case App(f, s):
            return App(f, act(perm, s))
    raise TypeError(f"not a raw term: {t!r}")


def support(t: RawTerm) -> frozenset[Atom]:
    """Raw support: every atom occurring in the term, binders and delayed
    permutations included."""
    match t:
        case Var(_):
            return frozenset()
        case Atm(a):
            assert isinstance(a, Atom)
            return frozenset({a})
        case Susp(p, s):
            return _concrete_perm(p).support() | support(s)
        case Abs(a, s):
            assert isinstance(a, Atom)
            return frozenset({a}) | support(s)
        case Tup(items):
            out: frozenset[Atom] = frozenset()
            for s in items:
                out |= support(s)
            return out
        case App(_, s):
            return support(s)
    raise TypeError(f"not a raw term: {t!r}")


def term_vars(t: RawTerm) -> frozenset[Variable]:
    match t:
        case Var(v):
            return frozenset({v})
        case Atm(_):
            return frozenset()
        case Susp(_, s) | Abs(_, s) | App(_, s):
            return term_vars(s)
        case Tup(items):
            out: frozenset[Variable] = frozenset()
            for s in items:
                out |= term_vars(s)
            return out
    raise TypeError(f"not a raw term: {t!r}")


def is_ground(t: RawTerm) -> bool:
    return not term_vars(t)


def meta_atoms(t: RawTerm) -> frozenset[MetaAtom]:
    """Meta atoms occurring anywhere in a pattern term."""
    match t:
        case Var(_):
            return frozenset()
        case Atm(a):
            return frozenset({a}) if isinstance(a, MetaAtom) else frozenset()
        case Susp(p, s):
            out = meta_atoms(s)
            if not isinstance(p, Permutation):
                for x, y in p:
                    out |= frozenset(m for m in (x, y) if isinstance(m, MetaAtom))
            return out
        case Abs(a, s):
            out = meta_atoms(s)
            if isinstance(a, MetaAtom):
                out |= frozenset({a})
            return out
        case Tup(items):
            out = frozenset()
            for s in items:
                out |= meta_atoms(s)
            return out
        case App(_, s):
            return meta_atoms(s)
    raise TypeError(f"not a raw term: {t!r}")


def concrete_atoms(t: RawTerm) -> frozenset[Atom]:
    """Concrete atom literals occurring anywhere in a pattern term."""
    match t:
        case Var(_):
            return frozenset()
        case Atm(a):
            return frozenset({a}) if isinstance(a, Atom) else frozenset()
        case Susp(p, s):
            out = concrete_atoms(s)
            if isinstance(p, Permutation):
                out |= p.support()
            else:
                for x, y in p:
                    out |= frozenset(m for m in (x, y) if isinstance(m, Atom))
            return out
        case Abs(a, s):
            out = concrete_atoms(s)
            if isinstance(a, Atom):
                out |= frozenset({a})
            return out
        case Tup(items):
            out = frozenset()
            for s in items:
                out |= concrete_atoms(s)
            return out
        case App(_, s):
            return concrete_atoms(s)
    raise TypeError(f"not a raw term: {t!r}")


def instantiate(t: RawTerm, assignment: dict[str, Atom]) -> RawTerm:
    """Replace every meta atom by its assigned atom. The assignment need not
    be injective; transposition lists collapse accordingly."""

    def atm(a: AtomLike) -> Atom:
        if isinstance(a, MetaAtom):
            return assignment[a.name]
        return a

    match t:
        case Var(_):
            return t
        case Atm(a):
            return Atm(atm(a))
        case Susp(p, s):
            if isinstance(p, Permutation):
                return Susp(p, instantiate(s, assignment))
            perm = Permutation.from_swaps((atm(x), atm(y)) for x, y in p)
            return Susp(perm, instantiate(s, assignment))
        case Abs(a, s):
            return Abs(atm(a), instantiate(s, assignment))
        case Tup(items):
            return Tup(tuple(instantiate(s, assignment) for s in items))
        case App(f, s):
            return App(f, instantiate(s, assignment))
    raise TypeError(f"not a raw term: {t!r}")


# --- substitution ------------------------------------------------------------

Substitution = dict[Variable, RawTerm]


def subst_apply(phi: Substitution, t: RawTerm) -> RawTerm:
    """Homomorphic extension of a substitution to raw terms. Atoms and
    binders are untouched: capture is permitted at this layer."""
    match t:
        case Var(v):
            return phi.get(v, t)
        case Atm(_):
            return t
        case Susp(p, s):
            return Susp(p, subst_apply(phi, s))
        case Abs(a, s):
            return Abs(a, subst_apply(phi, s))
        case Tup(items):
            return Tup(tuple(subst_apply(phi, s) for s in items))
        case App(f, s):
            return App(f, subst_apply(phi, s))
    raise TypeError(f"not a raw term: {t!r}")


def subst_compose(phi: Substitution, gamma: Substitution) -> Substitution:
    """(phi o gamma): apply gamma first, then phi."""
    out: Substitution = {}
    for x, t in gamma.items():
        s = subst_apply(phi, t)
        if s != Var(x):
            out[x] = s
    for x, t in phi.items():
        if x not in gamma:
            out[x] = t
    return out


def subst_act(perm: Permutation, phi: Substitution) -> Substitution:
    """The permutation action on substitutions; variables have empty support,
    so only the range moves."""
    return {x: act(perm, t) for x, t in phi.items()}


# --- sort checking -----------------------------------------------------------


class SortError(ValueError):
    pass


def sort_check(sig: Signature, t: RawTerm) -> NominalSort:
    """The unique sort of t, or a SortError naming the offending subterm."""
    match t:
        case Var(v):
            if v.sort is None:
                raise SortError(f"variable {v.name} has no declared sort")
            return v.sort
        case Atm(a):
            return AtomSortRef(a.sort)
        case Susp(_, s):
            return sort_check(sig, s)
        case Abs(a, s):
            return AbsSort(a.sort, sort_check(sig, s))
        case Tup(items):
            return ProdSort(tuple(sort_check(sig, s) for s in items))
        case App(f, s):
            decl = sig.func(f)
            if decl is None:
                raise SortError(f"unknown function symbol: {f}")
            got = sort_check(sig, s)
            if got != decl.arg:
                raise SortError(
                    f"{f}: argument has sort {sort_str(got)}, expected {sort_str(decl.arg)}"
                )
            return BaseSort(decl.result)
    raise TypeError(f"not a raw term: {t!r}")


def unit() -> RawTerm:
    return Tup(())


def app(f: str, *args: RawTerm) -> RawTerm:
    """Convenience constructor: multi-argument application packs a tuple."""
    if len(args) == 1:
        return App(f, args[0])
    return App(f, Tup(tuple(args)))
