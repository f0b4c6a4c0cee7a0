"""Propositions and sequents of the contractual exchange logic.

Tensor products are kept in a canonical form: nested tensors are flattened,
the unit ``I`` is dropped, and the remaining factors are sorted.  A tensor of
one factor is that factor and the empty tensor is ``I``.  Two propositions
that differ only by associativity, commutativity or unit laws of ``⊗`` are
therefore equal as Python values.

Concrete prefix syntax (used by sequent and proof files)::

    1                 unit
    k@A               resource k held by agent A
    (-o k@A k@B)      atomic implication
    (>> d1 d2)        contractual implication d1 ↠ d2
    (! p)             exponential
    (* p1 p2 ...)     tensor
"""

from __future__ import annotations

import re
from collections.abc import Iterable
from dataclasses import dataclass
from typing import Literal, Union

from .errors import ClassError, ParseError
from .multiset import Multiset

Klass = Literal["sigma", "delta", "theta", "xi", "omega"]
CLASSES: tuple[Klass, ...] = ("sigma", "delta", "theta", "xi", "omega")


class _Prop:
    __slots__ = ()

    def key(self) -> tuple:
        raise NotImplementedError

    def __lt__(self, other: _Prop) -> bool:
        return self.key() < other.key()

    def __le__(self, other: _Prop) -> bool:
        return self.key() <= other.key()

    def __gt__(self, other: _Prop) -> bool:
        return self.key() > other.key()

    def __ge__(self, other: _Prop) -> bool:
        return self.key() >= other.key()


@dataclass(frozen=True, eq=True, order=False)
class Unit(_Prop):
    def key(self) -> tuple:
        return (0,)

    def __str__(self) -> str:
        return "I"


@dataclass(frozen=True, eq=True, order=False)
class Atom(_Prop):
    resource: str
    agent: str

    def key(self) -> tuple:
        return (1, self.resource, self.agent)

    def __str__(self) -> str:
        return f"{self.resource}@{self.agent}"


@dataclass(frozen=True, eq=True, order=False)
class Implication(_Prop):
    src: Atom
    dst: Atom

    def __post_init__(self):
        if not isinstance(self.src, Atom) or not isinstance(self.dst, Atom):
            raise ClassError("implications relate two atoms")

    def key(self) -> tuple:
        return (2, self.src.key(), self.dst.key())

    def __str__(self) -> str:
        return f"({self.src} ⊸ {self.dst})"


@dataclass(frozen=True, eq=True, order=False)
class Contract(_Prop):
    left: Prop
    right: Prop

    def key(self) -> tuple:
        return (3, self.left.key(), self.right.key())

    def __str__(self) -> str:
        return f"({self.left} ↠ {self.right})"


@dataclass(frozen=True, eq=True, order=False)
class Bang(_Prop):
    inner: Prop

    def key(self) -> tuple:
        return (4, self.inner.key())

    def __str__(self) -> str:
        return f"!{self.inner}"


@dataclass(frozen=True, eq=True, order=False)
class Tensor(_Prop):
    """Canonical tensor of at least two non-unit, non-tensor factors.  Build with :func:`tensor`."""

    items: tuple[Prop, ...]

    def key(self) -> tuple:
        return (5, tuple(p.key() for p in self.items))

    def __str__(self) -> str:
        return "(" + " ⊗ ".join(str(p) for p in self.items) + ")"


Prop = Union[Unit, Atom, Implication, Contract, Bang, Tensor]
I = Unit()


def factors(p: Prop) -> tuple[Prop, ...]:
    """The canonical tensor factors of ``p`` (empty for ``I``)."""
    if isinstance(p, Unit):
        return ()
    if isinstance(p, Tensor):
        return p.items
    return (p,)


def tensor(*parts: Prop) -> Prop:
    items: list[Prop] = []
    for p in parts:
        items.extend(factors(p))
    if not items:
        return I
    if len(items) == 1:
        return items[0]
    return Tensor(tuple(sorted(items, key=lambda q: q.key())))


def tensor_of(parts: Iterable[Prop]) -> Prop:
    return tensor(*parts)


def atom(text: str) -> Atom:
    r, _, a = text.partition("@")
    return Atom(r, a)


def imp(src: str | Atom, dst: str | Atom) -> Implication:
    return Implication(atom(src) if isinstance(src, str) else src, atom(dst) if isinstance(dst, str) else dst)


# --- grammar classes --------------------------------------------------------


def classes(p: Prop) -> frozenset[Klass]:
    """Every grammar class ``p`` belongs to (``I`` belongs to several)."""
    if isinstance(p, Unit):
        return frozenset({"sigma", "delta", "theta"})
    if isinstance(p, Atom):
        return frozenset({"sigma"})
    if isinstance(p, Implication):
        return frozenset({"delta"})
    if isinstance(p, Contract):
        ok = "delta" in classes(p.left) and "delta" in classes(p.right)
        return frozenset({"theta"}) if ok else frozenset()
    if isinstance(p, Bang):
        inner = classes(p.inner)
        out = set()
        if "delta" in inner:
            out.add("xi")
        if "theta" in inner:
            out.add("omega")
        return frozenset(out)
    if isinstance(p, Tensor):
        acc: set[Klass] | None = None
        for q in p.items:
            cq = classes(q)
            acc = set(cq) if acc is None else acc & cq
        return frozenset(acc or ())
    raise TypeError(f"not a proposition: {p!r}")


def classify(p: Prop) -> Klass | None:
    """The grammar class of ``p``; ambiguous members resolve in the order σ, δ, θ, ξ, ω."""
    cs = classes(p)
    for c in CLASSES:
        if c in cs:
            return c
    return None


def is_class(p: Prop, klass: Klass) -> bool:
    return klass in classes(p)


def require(p: Prop, klass: Klass) -> Prop:
    if not is_class(p, klass):
        raise ClassError(f"{p} is not in class {klass}")
    return p


# --- sequents ---------------------------------------------------------------


def left_of(*props: Prop) -> Multiset[Prop]:
    """Left context with ``I`` removed (``I`` on the left carries no information)."""
    return Multiset(p for p in props if not isinstance(p, Unit))


@dataclass(frozen=True)
class Sequent:
    """``left ⊢ right``; the five context components are views over ``left``."""

    left: Multiset[Prop]
    right: Prop

    def __init__(self, left: Iterable[Prop] | Multiset[Prop], right: Prop):
        if isinstance(left, Multiset):
            ms = left.filter(lambda p: not isinstance(p, Unit))
        else:
            ms = left_of(*left)
        object.__setattr__(self, "left", ms)
        object.__setattr__(self, "right", right)

    def component(self, klass: Klass) -> Multiset[Prop]:
        """Left formulas assigned to ``klass`` (each formula goes to its first class)."""
        return self.left.filter(lambda p: _left_slot(p) == klass)

    @property
    def omega(self) -> Multiset[Prop]:
        return self.component("omega")

    @property
    def xi(self) -> Multiset[Prop]:
        return self.component("xi")

    @property
    def theta(self) -> Multiset[Prop]:
        return self.component("theta")

    @property
    def delta(self) -> Multiset[Prop]:
        return self.component("delta")

    @property
    def sigma(self) -> Multiset[Prop]:
        return self.component("sigma")

    def is_well_formed(self) -> bool:
        return all(_left_slot(p) is not None for p in self.left.distinct()) and classify(self.right) is not None

    def is_initial(self) -> bool:
        return (
            self.is_well_formed()
            and not self.theta
            and not self.delta
            and is_class(self.right, "sigma")
        )

    def __str__(self) -> str:
        return ", ".join(str(p) for p in self.left) + " ⊢ " + str(self.right)


def _left_slot(p: Prop) -> Klass | None:
    # units never occur on the left, so only !I-like bangs are ambiguous; they go to ξ
    cs = classes(p)
    for c in ("xi", "omega", "theta", "delta", "sigma"):
        if c in cs:
            return c
    return None


# --- prefix syntax ----------------------------------------------------------


def to_prefix(p: Prop) -> str:
    if isinstance(p, Unit):
        return "1"
    if isinstance(p, Atom):
        return f"{p.resource}@{p.agent}"
    if isinstance(p, Implication):
        return f"(-o {to_prefix(p.src)} {to_prefix(p.dst)})"
    if isinstance(p, Contract):
        return f"(>> {to_prefix(p.left)} {to_prefix(p.right)})"
    if isinstance(p, Bang):
        return f"(! {to_prefix(p.inner)})"
    if isinstance(p, Tensor):
        return "(* " + " ".join(to_prefix(q) for q in p.items) + ")"
    raise TypeError(p)


_TOKEN = re.compile(r"\s*(?:(\()|(\))|(-o|>>|!|\*)|([A-Za-z0-9_.']+@[A-Za-z0-9_.']+)|(1)(?![A-Za-z0-9_@]))")


def _tokens(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", column=pos + 1)
        kind = ("open", "close", "op", "atom", "unit")[m.lastindex - 1]
        out.append((kind, m.group(m.lastindex), m.start(m.lastindex) + 1))
        pos = m.end()
    return out


def parse_prop(text: str) -> Prop:
    """Parse one proposition in prefix syntax."""
    toks = _tokens(text)
    pos = 0

    def expr() -> Prop:
        nonlocal pos
        if pos >= len(toks):
            raise ParseError("unexpected end of proposition")
        kind, val, col = toks[pos]
        pos += 1
        if kind == "unit":
            return I
        if kind == "atom":
            return atom(val)
        if kind != "open":
            raise ParseError(f"unexpected {val!r}", column=col)
        if pos >= len(toks) or toks[pos][0] != "op":
            raise ParseError("expected operator after '('", column=col)
        op = toks[pos][1]
        pos += 1
        args: list[Prop] = []
        while pos < len(toks) and toks[pos][0] != "close":
            args.append(expr())
        if pos >= len(toks):
            raise ParseError("unbalanced parenthesis", column=col)
        pos += 1
        arity = {"-o": 2, ">>": 2, "!": 1}.get(op)
        if arity is not None and len(args) != arity:
            raise ParseError(f"{op} takes {arity} argument(s), got {len(args)}", column=col)
        if op == "-o":
            if not all(isinstance(a, Atom) for a in args):
                raise ParseError("-o relates two atoms", column=col)
            return Implication(args[0], args[1])
        if op == ">>":
            return Contract(args[0], args[1])
        if op == "!":
            return Bang(args[0])
        return tensor(*args)

    p = expr()
    if pos != len(toks):
        raise ParseError(f"trailing input {toks[pos][1]!r}", column=toks[pos][2])
    return p


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and text.startswith(sep, i):
            parts.append("".join(cur))
            cur = []
            i += len(sep)
            continue
        cur.append(ch)
        i += 1
    parts.append("".join(cur))
    return parts


def parse_sequent(text: str) -> Sequent:
    """Parse ``f1, f2, ... |- g``; an empty left side is allowed."""
    body = "\n".join(line.split("#", 1)[0] for line in text.splitlines()).strip()
    if "|-" not in body:
        raise ParseError("sequent needs '|-'")
    lhs, rhs = body.split("|-", 1)
    left = [parse_prop(part) for part in _split_top(lhs, ",") if part.strip()]
    return Sequent(left, parse_prop(rhs))


def sequent_to_text(s: Sequent) -> str:
    return ", ".join(to_prefix(p) for p in s.left) + " |- " + to_prefix(s.right)
