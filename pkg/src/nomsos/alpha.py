"""Canonical representatives of alpha-equivalence classes of ground terms.

A ground raw term is normalized by discharging every delayed permutation and
renaming each binder, outside-in, to the least-index atom of its sort that is
not free in the abstraction body. Structural equality of canonical forms then
coincides with alpha-equivalence."""

from __future__ import annotations

from dataclasses import dataclass

from .atoms import Atom, Permutation, fresh_atoms
from .terms import Abs, App, Atm, RawTerm, Susp, Tup, Var, _concrete_perm, is_ground


class NotGroundError(ValueError):
    pass


def _push(perm: Permutation, t: RawTerm) -> RawTerm:
    """Apply perm structurally, discharging every delayed permutation."""
    match t:
        case Var(v):
            raise NotGroundError(f"term is not ground: variable {v.name}")
        case Atm(a):
            assert isinstance(a, Atom)
            return Atm(perm(a))
        case Susp(p, s):
            return _push(perm.compose(_concrete_perm(p)), s)
        case Abs(a, s):
            assert isinstance(a, Atom)
            return Abs(perm(a), _push(perm, s))
        case Tup(items):
            return Tup(tuple(_push(perm, s) for s in items))
        case App(f, s):
            return App(f, _push(perm, s))
    raise TypeError(f"not a raw term: {t!r}")


def strip_susp(t: RawTerm) -> RawTerm:
    """Discharge all delayed permutations of a ground term."""
    return _push(Permutation.identity(), t)


def _free_atoms(t: RawTerm) -> frozenset[Atom]:
    """Free atoms of a susp-free ground term; each binder removes itself."""
    match t:
        case Atm(a):
            assert isinstance(a, Atom)
            return frozenset({a})
        case Abs(a, s):
            assert isinstance(a, Atom)
            return _free_atoms(s) - {a}
        case Tup(items):
            out: frozenset[Atom] = frozenset()
            for s in items:
                out |= _free_atoms(s)
            return out
        case App(_, s):
            return _free_atoms(s)
    raise TypeError(f"unexpected node in susp-free term: {t!r}")


def _swap(a: Atom, b: Atom, t: RawTerm) -> RawTerm:
    """Transposition applied structurally to a susp-free ground term."""
    p = Permutation.swap(a, b)
    match t:
        case Atm(c):
            assert isinstance(c, Atom)
            return Atm(p(c))
        case Abs(c, s):
            assert isinstance(c, Atom)
            return Abs(p(c), _swap(a, b, s))
        case Tup(items):
            return Tup(tuple(_swap(a, b, s) for s in items))
        case App(f, s):
            return App(f, _swap(a, b, s))
    raise TypeError(f"unexpected node in susp-free term: {t!r}")


def _canon(t: RawTerm) -> RawTerm:
    match t:
        case Atm(_):
            return t
        case Abs(a, s):
            assert isinstance(a, Atom)
            free = _free_atoms(s) - {a}
            c = fresh_atoms(a.sort, free, 1)[0]
            body = s if c == a else _swap(a, c, s)
            return Abs(c, _canon(body))
        case Tup(items):
            return Tup(tuple(_canon(s) for s in items))
        case App(f, s):
            return App(f, _canon(s))
    raise TypeError(f"unexpected node in susp-free term: {t!r}")


def normalize(t: RawTerm) -> RawTerm:
    """Canonical form of a ground raw term: susp-free, binders canonically
    renamed. normalize(p) == normalize(q) iff p and q are alpha-equivalent."""
    return _canon(strip_susp(t))


def alpha_eq(p: RawTerm, q: RawTerm) -> bool:
    return normalize(p) == normalize(q)


def nt_support(p: RawTerm) -> frozenset[Atom]:
    """Support of the nominal term denoted by a ground term: its free atoms,
    after discharging delayed permutations."""
    return _free_atoms(strip_susp(p))


def nt_fresh(a: Atom, p: RawTerm) -> bool:
    """a # p at the nominal-term level."""
    return a not in nt_support(p)


@dataclass(frozen=True)
class NominalTerm:
    """A ground raw term in canonical form, standing for its whole
    alpha-equivalence class."""

    term: RawTerm

    @staticmethod
    def of(t: RawTerm) -> "NominalTerm":
        if not is_ground(t):
            raise NotGroundError("nominal terms are interpretations of ground terms")
        return NominalTerm(normalize(t))

    def support(self) -> frozenset[Atom]:
        return _free_atoms(self.term)

    def __str__(self) -> str:
        from .printer import term_str

        return term_str(self.term)
