"""Metric temporal logic over discrete-time trajectories.

Formulas are immutable trees.  Atoms carry their geometric region so that a
formula can be evaluated without a separate predicate table; the table is
only needed when parsing text.

Robustness uses the infinity-norm signed distance, which makes every atom an
exact min/max of affine margins (and therefore linear-encodable).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

import numpy as np

INF = math.inf


class FormulaError(ValueError):
    """Base class for malformed formulas, predicates and trajectories."""


class ParseError(FormulaError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownPredicateError(FormulaError):
    def __init__(self, name: str, position: int | None = None):
        where = "" if position is None else f" (at position {position})"
        super().__init__(f"unknown predicate {name!r}{where}")
        self.name = name
        self.position = position


class IntervalError(FormulaError):
    pass


class HorizonError(FormulaError):
    pass


# ---------------------------------------------------------------------------
# Atomic predicates


@dataclass(frozen=True)
class BoxRegion:
    """Axis-aligned box on a projection of the state.

    Infinite bounds are allowed, so half-spaces such as ``x >= 5`` are boxes
    with ``hi = +inf``.
    """

    indices: tuple[int, ...]
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        object.__setattr__(self, "lo", tuple(float(v) for v in self.lo))
        object.__setattr__(self, "hi", tuple(float(v) for v in self.hi))
        if not self.indices:
            raise FormulaError("box region needs at least one axis")
        if not len(self.indices) == len(self.lo) == len(self.hi):
            raise FormulaError("box region indices/lo/hi lengths differ")
        if min(self.indices) < 0:
            raise FormulaError("projection indices must be nonnegative")
        for lo, hi in zip(self.lo, self.hi):
            if not lo < hi:
                raise FormulaError(f"box bounds need lo < hi, got [{lo}, {hi}]")

    @property
    def required_dim(self) -> int:
        return max(self.indices) + 1

    def margins(self, x: np.ndarray) -> list[float]:
        out = []
        for i, lo, hi in zip(self.indices, self.lo, self.hi):
            if lo > -INF:
                out.append(x[i] - lo)
            if hi < INF:
                out.append(hi - x[i])
        return out

    def signed_distance(self, x: np.ndarray) -> float:
        m = self.margins(x)
        return float(min(m)) if m else INF


@dataclass(frozen=True)
class PairwiseSeparation:
    """Two projections kept at least ``d_safe`` apart in the infinity norm.

    This is the negation of a collision predicate.  The signed distance in
    the joint state space is half the separation margin: moving both
    projections by ``d`` changes their difference by up to ``2 d``.
    """

    first: tuple[int, ...]
    second: tuple[int, ...]
    d_safe: float

    def __post_init__(self):
        object.__setattr__(self, "first", tuple(int(i) for i in self.first))
        object.__setattr__(self, "second", tuple(int(i) for i in self.second))
        object.__setattr__(self, "d_safe", float(self.d_safe))
        if not self.first or len(self.first) != len(self.second):
            raise FormulaError("separation projections must be nonempty and equally sized")
        if min(self.first + self.second) < 0:
            raise FormulaError("projection indices must be nonnegative")
        if not self.d_safe > 0:
            raise FormulaError("d_safe must be positive")

    @property
    def required_dim(self) -> int:
        return max(self.first + self.second) + 1

    def signed_distance(self, x: np.ndarray) -> float:
        diff = x[list(self.first)] - x[list(self.second)]
        return float((np.max(np.abs(diff)) - self.d_safe) / 2.0)


AtomicPredicate = Union[BoxRegion, PairwiseSeparation]


def signed_distance(x, pred: AtomicPredicate) -> float:
    """Infinity-norm signed distance of ``x`` to the region of ``pred``.

    Positive inside (depth), negative outside (minus the distance), zero on
    the boundary.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] < pred.required_dim:
        raise FormulaError(
            f"state of shape {x.shape} does not cover predicate projection "
            f"(needs {pred.required_dim} coordinates)"
        )
    return pred.signed_distance(x)


# ---------------------------------------------------------------------------
# Formulas


class Formula:
    """Base class for MTL formula nodes."""

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)


def _check_interval(lo, hi):
    if int(lo) != lo or int(hi) != hi:
        raise IntervalError(f"interval bounds must be integers, got [{lo}, {hi}]")
    if lo < 0:
        raise IntervalError(f"interval lower bound must be >= 0, got {lo}")
    if lo > hi:
        raise IntervalError(f"interval [{lo}, {hi}] has lower bound above upper bound")


@dataclass(frozen=True)
class Top(Formula):
    def __str__(self):
        return "true"


@dataclass(frozen=True)
class Bottom(Formula):
    def __str__(self):
        return "false"


TRUE = Top()
FALSE = Bottom()


@dataclass(frozen=True)
class Atom(Formula):
    name: str
    predicate: AtomicPredicate

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def __str__(self):
        return f"!{_wrap(self.arg)}"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"({self.left} & {self.right})"


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"({self.left} | {self.right})"


@dataclass(frozen=True)
class Until(Formula):
    lo: int
    hi: int
    left: Formula
    right: Formula

    def __post_init__(self):
        _check_interval(self.lo, self.hi)

    def __str__(self):
        return f"({_wrap(self.left)} U[{self.lo},{self.hi}] {_wrap(self.right)})"


@dataclass(frozen=True)
class Eventually(Formula):
    lo: int
    hi: int
    arg: Formula

    def __post_init__(self):
        _check_interval(self.lo, self.hi)

    def __str__(self):
        return f"F[{self.lo},{self.hi}] {_wrap(self.arg)}"


@dataclass(frozen=True)
class Always(Formula):
    lo: int
    hi: int
    arg: Formula

    def __post_init__(self):
        _check_interval(self.lo, self.hi)

    def __str__(self):
        return f"G[{self.lo},{self.hi}] {_wrap(self.arg)}"


def _wrap(f: Formula) -> str:
    s = str(f)
    if isinstance(f, (Top, Bottom, Atom, Not, And, Or, Until)):
        return s
    return f"({s})"


def atoms(phi: Formula) -> list[Atom]:
    """Distinct atoms of ``phi`` in first-occurrence order."""
    seen: dict[Atom, None] = {}
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, Atom):
            seen.setdefault(node, None)
        else:
            stack.extend(reversed(_children(node)))
    return list(seen)


def _children(node: Formula) -> tuple[Formula, ...]:
    if isinstance(node, (Not, Eventually, Always)):
        return (node.arg,)
    if isinstance(node, (And, Or, Until)):
        return (node.left, node.right)
    return ()


def horizon(phi: Formula) -> int:
    """Largest time index an atom of ``phi`` can reference when evaluated at 0."""
    if isinstance(phi, (Top, Bottom, Atom)):
        return 0
    if isinstance(phi, Not):
        return horizon(phi.arg)
    if isinstance(phi, (And, Or)):
        return max(horizon(phi.left), horizon(phi.right))
    if isinstance(phi, (Eventually, Always)):
        return phi.hi + horizon(phi.arg)
    if isinstance(phi, Until):
        h = phi.hi + horizon(phi.right)
        if phi.hi >= 1:
            h = max(h, phi.hi - 1 + horizon(phi.left))
        return h
    raise TypeError(f"not a formula: {phi!r}")


def to_core(phi: Formula) -> Formula:
    """Rewrite eventually/always into the core syntax (until and negation)."""
    if isinstance(phi, Eventually):
        return Until(phi.lo, phi.hi, TRUE, to_core(phi.arg))
    if isinstance(phi, Always):
        return Not(Until(phi.lo, phi.hi, TRUE, Not(to_core(phi.arg))))
    if isinstance(phi, Not):
        return Not(to_core(phi.arg))
    if isinstance(phi, And):
        return And(to_core(phi.left), to_core(phi.right))
    if isinstance(phi, Or):
        return Or(to_core(phi.left), to_core(phi.right))
    if isinstance(phi, Until):
        return Until(phi.lo, phi.hi, to_core(phi.left), to_core(phi.right))
    return phi


def from_core(phi: Formula) -> Formula:
    """Recognise ``true U_I f`` and ``!(true U_I !f)`` as eventually/always."""
    if isinstance(phi, Not):
        inner = phi.arg
        if (isinstance(inner, Until) and isinstance(inner.left, Top)
                and isinstance(inner.right, Not)):
            return Always(inner.lo, inner.hi, from_core(inner.right.arg))
        return Not(from_core(inner))
    if isinstance(phi, Until):
        if isinstance(phi.left, Top):
            return Eventually(phi.lo, phi.hi, from_core(phi.right))
        return Until(phi.lo, phi.hi, from_core(phi.left), from_core(phi.right))
    if isinstance(phi, And):
        return And(from_core(phi.left), from_core(phi.right))
    if isinstance(phi, Or):
        return Or(from_core(phi.left), from_core(phi.right))
    return phi


# ---------------------------------------------------------------------------
# Trajectories and semantics


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled trajectory; ``states[k]`` is the state at ``times[k]``."""

    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).reshape(-1)
        states = np.asarray(self.states, dtype=float)
        if states.ndim == 1:
            states = states[:, None]
        if states.ndim != 2 or states.shape[0] != times.shape[0]:
            raise FormulaError("trajectory needs one state row per sample time")
        if not np.all(np.isfinite(states)):
            raise FormulaError("trajectory states must be finite")
        if times.size > 1:
            steps = np.diff(times)
            if np.any(steps <= 0):
                raise FormulaError("sample times must be strictly increasing")
            if np.max(np.abs(steps - steps[0])) > 1e-9 * max(1.0, abs(steps[0])):
                raise FormulaError("sample times must be uniformly spaced")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    @classmethod
    def from_states(cls, states, dt: float = 1.0, t0: float = 0.0) -> "Trajectory":
        states = np.asarray(states, dtype=float)
        if states.ndim == 1:
            states = states[:, None]
        return cls(t0 + dt * np.arange(states.shape[0]), states)

    def __len__(self):
        return self.states.shape[0]


def _as_states(xi) -> np.ndarray:
    if isinstance(xi, Trajectory):
        return xi.states
    states = np.asarray(xi, dtype=float)
    if states.ndim == 1:
        states = states[:, None]
    return states


class _Monitor:
    def __init__(self, states: np.ndarray):
        self.states = states
        self.memo: dict[tuple[int, int], float] = {}

    def __call__(self, node: Formula, k: int) -> float:
        key = (id(node), k)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        value = self._eval(node, k)
        self.memo[key] = value
        return value

    def _eval(self, node: Formula, k: int) -> float:
        if isinstance(node, Top):
            return INF
        if isinstance(node, Bottom):
            return -INF
        if isinstance(node, Atom):
            return signed_distance(self.states[k], node.predicate)
        if isinstance(node, Not):
            return -self(node.arg, k)
        if isinstance(node, And):
            return min(self(node.left, k), self(node.right, k))
        if isinstance(node, Or):
            return max(self(node.left, k), self(node.right, k))
        if isinstance(node, Eventually):
            return max(self(node.arg, j) for j in range(k + node.lo, k + node.hi + 1))
        if isinstance(node, Always):
            return min(self(node.arg, j) for j in range(k + node.lo, k + node.hi + 1))
        if isinstance(node, Until):
            best, running = -INF, INF
            for j in range(k, k + node.hi + 1):
                if j >= k + node.lo:
                    best = max(best, min(self(node.right, j), running))
                if j < k + node.hi:
                    running = min(running, self(node.left, j))
            return best
        raise TypeError(f"not a formula: {node!r}")


def robustness(phi: Formula, xi, k: int = 0) -> float:
    """Robustness degree of trajectory ``xi`` for ``phi`` at time index ``k``.

    ``xi`` is a :class:`Trajectory` or an array of states (one row per step).
    Returns ``+inf``/``-inf`` for formulas decided by constants alone.
    """
    states = _as_states(xi)
    need = k + horizon(phi) + 1
    if k < 0 or states.shape[0] < need:
        raise HorizonError(
            f"trajectory has {states.shape[0]} samples, formula needs {need} from index {k}"
        )
    return _Monitor(states)(phi, k)


def boolean_sat(phi: Formula, xi, k: int = 0) -> bool:
    return robustness(phi, xi, k) >= 0


# ---------------------------------------------------------------------------
# Online rewriting of a formula against an observed prefix


def mk_not(f: Formula) -> Formula:
    if isinstance(f, Top):
        return FALSE
    if isinstance(f, Bottom):
        return TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def conj(parts: Iterable[Formula]) -> Formula:
    out: Formula | None = None
    for p in parts:
        if isinstance(p, Bottom):
            return FALSE
        if isinstance(p, Top):
            continue
        out = p if out is None else And(out, p)
    return TRUE if out is None else out


def disj(parts: Iterable[Formula]) -> Formula:
    out: Formula | None = None
    for p in parts:
        if isinstance(p, Top):
            return TRUE
        if isinstance(p, Bottom):
            continue
        out = p if out is None else Or(out, p)
    return FALSE if out is None else out


class _Rewriter:
    def __init__(self, states: np.ndarray, now: int):
        self.states = states
        self.now = now

    def at(self, node: Formula, k: int) -> Formula:
        """Formula equivalent, when evaluated at 0, to ``node`` evaluated at ``k``."""
        if isinstance(node, (Top, Bottom)):
            return node
        if k > self.now:
            return self.shift(node, k)
        if isinstance(node, Atom):
            inside = signed_distance(self.states[k], node.predicate) >= 0
            return TRUE if inside else FALSE
        if isinstance(node, Not):
            return mk_not(self.at(node.arg, k))
        if isinstance(node, And):
            return conj([self.at(node.left, k), self.at(node.right, k)])
        if isinstance(node, Or):
            return disj([self.at(node.left, k), self.at(node.right, k)])
        if isinstance(node, Always):
            return self.conj_range(node.arg, k + node.lo, k + node.hi)
        if isinstance(node, Eventually):
            return self.disj_range(node.arg, k + node.lo, k + node.hi)
        if isinstance(node, Until):
            terms = []
            for j in range(k + node.lo, k + node.hi + 1):
                terms.append(conj([self.at(node.right, j),
                                   self.conj_range(node.left, k, j - 1)]))
                if isinstance(terms[-1], Top):
                    break
            return disj(terms)
        raise TypeError(f"not a formula: {node!r}")

    def conj_range(self, node: Formula, start: int, stop: int) -> Formula:
        parts = [self.at(node, j) for j in range(start, min(stop, self.now) + 1)]
        if stop > self.now:
            parts.append(_anchored(Always, node, max(start, self.now + 1), stop))
        return conj(parts)

    def disj_range(self, node: Formula, start: int, stop: int) -> Formula:
        parts = [self.at(node, j) for j in range(start, min(stop, self.now) + 1)]
        if stop > self.now:
            parts.append(_anchored(Eventually, node, max(start, self.now + 1), stop))
        return disj(parts)

    def shift(self, node: Formula, k: int) -> Formula:
        if k == 0 or isinstance(node, (Top, Bottom)):
            return node
        if isinstance(node, (Always, Eventually)):
            return type(node)(node.lo + k, node.hi + k, node.arg)
        if isinstance(node, Not):
            return mk_not(self.shift(node.arg, k))
        if isinstance(node, And):
            return conj([self.shift(node.left, k), self.shift(node.right, k)])
        if isinstance(node, Or):
            return disj([self.shift(node.left, k), self.shift(node.right, k)])
        return Always(k, k, node)


def _anchored(op, node: Formula, start: int, stop: int) -> Formula:
    # A single-instant window around an already anchored subformula is folded
    # into that subformula's own interval.
    if start == stop and isinstance(node, (Always, Eventually)):
        return type(node)(node.lo + start, node.hi + start, node.arg)
    return op(start, stop, node)


def rewrite(phi: Formula, prefix, now: int) -> Formula:
    """Substitute atoms observed at indices ``<= now`` by true/false.

    ``prefix`` holds the states ``x[0..now]`` (extra rows are ignored).  The
    result, evaluated at index 0 on any trajectory with that prefix, has the
    same truth value as ``phi``.
    """
    states = _as_states(prefix)
    if now < 0:
        raise FormulaError("current index must be nonnegative")
    if states.shape[0] < now + 1:
        raise HorizonError(f"prefix has {states.shape[0]} samples, need {now + 1}")
    return simplify(_Rewriter(states, now).at(phi, 0))


def _flatten(node: Formula, cls) -> list[Formula]:
    if isinstance(node, cls):
        return _flatten(node.left, cls) + _flatten(node.right, cls)
    return [node]


def _implies(a: Formula, b: Formula) -> bool:
    """Cheap syntactic check that ``a`` implies ``b`` (robustness of a <= b)."""
    if a == b:
        return True
    if type(a) is type(b) and isinstance(a, (Always, Eventually)) and a.arg == b.arg:
        if isinstance(a, Always):
            return a.lo <= b.lo and b.hi <= a.hi
        return b.lo <= a.lo and a.hi <= b.hi
    return False


def simplify(phi: Formula) -> Formula:
    """Drop conjuncts implied by another conjunct and disjuncts implying another.

    Only interval containment between temporal operators over the same
    argument is used, which leaves the robustness unchanged as well as the
    truth value.
    """
    if isinstance(phi, (And, Or)):
        cls = type(phi)
        parts = [simplify(p) for p in _flatten(phi, cls)]
        keep: list[Formula] = []
        for i, p in enumerate(parts):
            redundant = False
            for j, q in enumerate(parts):
                if i == j:
                    continue
                # in a conjunction p is redundant if some q implies it; in a
                # disjunction if p implies some q; ties keep the first copy
                hit = _implies(q, p) if cls is And else _implies(p, q)
                back = _implies(p, q) if cls is And else _implies(q, p)
                if hit and (not back or j < i):
                    redundant = True
                    break
            if not redundant:
                keep.append(p)
        return conj(keep) if cls is And else disj(keep)
    if isinstance(phi, Not):
        return mk_not(simplify(phi.arg))
    if isinstance(phi, Until):
        return Until(phi.lo, phi.hi, simplify(phi.left), simplify(phi.right))
    if isinstance(phi, (Always, Eventually)):
        return type(phi)(phi.lo, phi.hi, simplify(phi.arg))
    return phi


# ---------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_.]*)|(?P<sym>[()\[\],!&|~]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, predicates: Mapping[str, AtomicPredicate]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.predicates = predicates

    def peek(self, offset: int = 0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.take()
        if text != value or kind == "end":
            raise ParseError(f"expected {value!r}, found {text or 'end of input'!r}", pos)

    def parse(self) -> Formula:
        phi = self.disjunction()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {text!r}", pos)
        return phi

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.peek()[1] == "|":
            self.take()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.until()
        while self.peek()[1] == "&":
            self.take()
            left = And(left, self.until())
        return left

    def until(self) -> Formula:
        left = self.unary()
        if self.peek()[1] == "U" and self.peek(1)[1] == "[":
            self.take()
            lo, hi = self.interval()
            return Until(lo, hi, left, self.until())
        return left

    def interval(self) -> tuple[int, int]:
        _, _, start = self.peek()
        self.expect("[")
        lo = self.number()
        self.expect(",")
        hi = self.number()
        self.expect("]")
        if lo > hi:
            raise IntervalError(f"interval [{lo},{hi}] has lower bound above upper bound "
                                f"(at position {start})")
        return lo, hi

    def number(self) -> int:
        kind, text, pos = self.take()
        if kind != "num":
            raise ParseError(f"expected an integer, found {text or 'end of input'!r}", pos)
        return int(text)

    def unary(self) -> Formula:
        kind, text, pos = self.peek()
        if text in ("!", "~"):
            self.take()
            return Not(self.unary())
        if text == "(":
            self.take()
            phi = self.disjunction()
            self.expect(")")
            return phi
        if kind == "id" and text in ("G", "F") and self.peek(1)[1] == "[":
            self.take()
            lo, hi = self.interval()
            op = Always if text == "G" else Eventually
            return op(lo, hi, self.unary())
        if kind == "id":
            self.take()
            if text == "true":
                return TRUE
            if text == "false":
                return FALSE
            if text not in self.predicates:
                raise UnknownPredicateError(text, pos)
            return Atom(text, self.predicates[text])
        raise ParseError(f"unexpected token {text or 'end of input'!r}", pos)


def parse_formula(text: str, predicates: Mapping[str, AtomicPredicate]) -> Formula:
    """Parse ``text`` such as ``"G[0,20] F[0,10] g1 & !(a | b)"``.

    Binding, tightest first: prefix operators (``!``, ``G[a,b]``,
    ``F[a,b]``), then right-associative ``U[a,b]``, then ``&``, then ``|``.
    """
    return _Parser(text, predicates).parse()


def predicate_from_dict(doc: Mapping) -> AtomicPredicate:
    """Build a predicate from its config-file representation."""
    kind = doc.get("type")
    if kind == "box":
        lo = [(-INF if v is None else v) for v in doc["lo"]]
        hi = [(INF if v is None else v) for v in doc["hi"]]
        return BoxRegion(tuple(doc["indices"]), tuple(lo), tuple(hi))
    if kind == "separation":
        return PairwiseSeparation(tuple(doc["first"]), tuple(doc["second"]),
                                  doc.get("d_safe", 5.0))
    raise FormulaError(f"unknown predicate type {kind!r}")


def predicate_to_dict(pred: AtomicPredicate) -> dict:
    if isinstance(pred, BoxRegion):
        return {
            "type": "box",
            "indices": list(pred.indices),
            "lo": [None if v == -INF else v for v in pred.lo],
            "hi": [None if v == INF else v for v in pred.hi],
        }
    return {"type": "separation", "first": list(pred.first),
            "second": list(pred.second), "d_safe": pred.d_safe}


def formula_size(phi: Formula) -> int:
    return 1 + sum(formula_size(c) for c in _children(phi))


__all__ = [
    "INF", "FormulaError", "ParseError", "UnknownPredicateError", "IntervalError",
    "HorizonError", "BoxRegion", "PairwiseSeparation", "AtomicPredicate",
    "signed_distance", "Formula", "Top", "Bottom", "TRUE", "FALSE", "Atom", "Not",
    "And", "Or", "Until", "Eventually", "Always", "atoms", "horizon", "to_core",
    "from_core", "Trajectory", "robustness", "boolean_sat", "rewrite", "simplify", "conj",
    "disj", "mk_not", "parse_formula", "predicate_from_dict", "predicate_to_dict",
    "formula_size",
]
