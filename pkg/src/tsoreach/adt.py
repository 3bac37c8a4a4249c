"""Abstract data types attached to processes and register machines.

Each data type is a labelled transition system over a (possibly infinite)
value space: a counter, a stack over a finite alphabet, a Petri net marking,
higher-order stacks and counters, or an ordered multi-stack.  Values are
plain hashable Python structures; stepping is a pure function.

Every kind additionally supports the distinguished operation ``reset``,
which jumps back to the initial value.  It is used by the translation to
register machines, where a fresh simulated process must start from a fresh
data-type value.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass, field

# A marking is a canonical multiset over place names: sorted, zero-free.
Marking = tuple[tuple[str, int], ...]

AdtValue = object  # int | tuple | Marking depending on the kind

KINDS = (
    "trivial",
    "counter",
    "weak-counter",
    "stack",
    "ho-stack",
    "ho-counter",
    "ho-weak-counter",
    "multi-stack",
    "petri",
)

WELL_STRUCTURED_KINDS = ("trivial", "counter", "weak-counter", "petri")

# Kinds the generic backward (WSTS) solver accepts.  The strict counter is
# excluded: iszero is enabled at 0 but at no larger value, so the step
# relation is not monotone w.r.t. numeric order.
MONOTONE_KINDS = ("trivial", "weak-counter", "petri")

RESET = "reset"


class AdtError(ValueError):
    """Structural misuse: unknown operation, kind mismatch, malformed value."""


class UnsupportedOrderError(AdtError):
    """The kind carries no well-quasi-ordering."""


@dataclass(frozen=True)
class AdtOp:
    """A data-type operation: a symbolic name plus an optional finite argument."""

    name: str
    arg: str | int | None = None

    def __str__(self) -> str:
        return self.name if self.arg is None else f"{self.name} {self.arg}"


@dataclass(frozen=True)
class PetriTransition:
    """A named net transition with input/output multisets.

    ``resets`` lists places emptied before the outputs are added; it is only
    produced by the register-machine encoding (never by user nets).
    """

    name: str
    inputs: Marking
    outputs: Marking
    resets: tuple[str, ...] = ()


def mk_marking(counts: dict[str, int]) -> Marking:
    for p, c in counts.items():
        if c < 0:
            raise AdtError(f"negative token count for place {p}")
    return tuple(sorted((p, c) for p, c in counts.items() if c > 0))


def marking_get(m: Marking, place: str) -> int:
    for p, c in m:
        if p == place:
            return c
    return 0


def marking_total(m: Marking) -> int:
    return sum(c for _, c in m)


def marking_leq(m1: Marking, m2: Marking) -> bool:
    # merge scan; both markings are sorted by place
    i = 0
    n2 = len(m2)
    for p, c in m1:
        while i < n2 and m2[i][0] < p:
            i += 1
        if i == n2 or m2[i][0] != p or m2[i][1] < c:
            return False
    return True


def marking_add(m1: Marking, m2: Marking) -> Marking:
    counts = dict(m1)
    for p, c in m2:
        counts[p] = counts.get(p, 0) + c
    return mk_marking(counts)


def marking_sub_clamped(m1: Marking, m2: Marking) -> Marking:
    """Componentwise max(m1 - m2, 0)."""
    counts = dict(m1)
    for p, c in m2:
        counts[p] = max(counts.get(p, 0) - c, 0)
    return mk_marking(counts)


def marking_sub(m1: Marking, m2: Marking) -> Marking | None:
    """Exact componentwise difference, or None if it would go negative."""
    counts = dict(m1)
    for p, c in m2:
        counts[p] = counts.get(p, 0) - c
        if counts[p] < 0:
            return None
    return mk_marking(counts)


@dataclass(frozen=True)
class AdtSpec:
    """Declaration of one abstract data type instance.

    kind          one of KINDS
    alphabet      stack symbols (stack-like kinds)
    level         nesting level n (ho-* kinds)
    count         number of stacks n (multi-stack)
    places        net places (petri)
    transitions   net transitions (petri)
    initial_marking  declared initial marking (petri)
    """

    kind: str
    alphabet: tuple[str, ...] = ()
    level: int = 1
    count: int = 1
    places: tuple[str, ...] = ()
    transitions: tuple[PetriTransition, ...] = ()
    initial_marking: Marking = ()

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise AdtError(f"unknown ADT kind: {self.kind}")
        if self.kind in ("stack", "multi-stack") and not self.alphabet:
            raise AdtError(f"{self.kind} requires a nonempty alphabet")
        if self.kind == "ho-stack" and not self.alphabet:
            raise AdtError("ho-stack requires a nonempty alphabet")
        if self.kind.startswith("ho-") and self.level < 1:
            raise AdtError("level must be >= 1")
        if self.kind == "multi-stack" and self.count < 1:
            raise AdtError("multi-stack count must be >= 1")
        if self.kind == "petri":
            declared = set(self.places)
            for t in self.transitions:
                for p, _ in t.inputs + t.outputs:
                    if p not in declared:
                        raise AdtError(f"transition {t.name} uses undeclared place {p}")
            for p, _ in self.initial_marking:
                if p not in declared:
                    raise AdtError(f"initial marking uses undeclared place {p}")

    @property
    def effective_alphabet(self) -> tuple[str, ...]:
        # ho-counter variants behave as ho-stacks over one symbol
        if self.kind in ("ho-counter", "ho-weak-counter"):
            return ("a",)
        return self.alphabet

    def initial_value(self) -> AdtValue:
        if self.kind == "trivial":
            return ()
        if self.kind in ("counter", "weak-counter"):
            return 0
        if self.kind == "stack":
            return ()
        if self.kind in ("ho-stack", "ho-counter", "ho-weak-counter"):
            return _ho_initial(self.level)
        if self.kind == "multi-stack":
            return ((),) * self.count
        if self.kind == "petri":
            return self.initial_marking
        raise AdtError(self.kind)

    def net_transition(self, name: str) -> PetriTransition:
        t = _transition_map(self).get(name)
        if t is None:
            raise AdtError(f"unknown net transition: {name}")
        return t

    def op_universe(self) -> tuple[AdtOp, ...]:
        """Every operation this instance admits (reset included)."""
        ops: list[AdtOp] = []
        if self.kind in ("counter", "weak-counter"):
            ops = [AdtOp("inc"), AdtOp("dec")]
            if self.kind == "counter":
                ops.append(AdtOp("iszero"))
        elif self.kind == "stack":
            for g in self.alphabet:
                ops += [AdtOp("push", g), AdtOp("pop", g)]
            ops.append(AdtOp("isempty"))
        elif self.kind == "ho-stack":
            for g in self.alphabet:
                ops += [AdtOp("push", g), AdtOp("pop", g)]
            ops.append(AdtOp("isempty"))
            for k in range(2, self.level + 1):
                ops += [AdtOp("pushk", k), AdtOp("popk", k), AdtOp("isemptyk", k)]
        elif self.kind in ("ho-counter", "ho-weak-counter"):
            ops = [AdtOp("inc"), AdtOp("dec")]
            if self.kind == "ho-counter":
                ops.append(AdtOp("iszero"))
            for k in range(2, self.level + 1):
                ops += [AdtOp("inck", k), AdtOp("deck", k)]
                if self.kind == "ho-counter":
                    ops.append(AdtOp("iszerok", k))
        elif self.kind == "multi-stack":
            for i in range(1, self.count + 1):
                for g in self.alphabet:
                    ops += [AdtOp(f"push{i}", g), AdtOp(f"pop{i}", g)]
                ops.append(AdtOp(f"isempty{i}"))
        elif self.kind == "petri":
            ops = [AdtOp(t.name) for t in self.transitions]
        ops.append(AdtOp(RESET))
        return tuple(ops)

    def validate_op(self, op: AdtOp) -> None:
        if op not in _op_set(self):
            raise AdtError(f"operation '{op}' not valid for adt {self.kind}")


@functools.lru_cache(maxsize=None)
def _op_set(spec: AdtSpec) -> frozenset:
    return frozenset(spec.op_universe())


@functools.lru_cache(maxsize=None)
def _transition_map(spec: AdtSpec) -> dict[str, PetriTransition]:
    return {t.name: t for t in spec.transitions}


def trivial_spec() -> AdtSpec:
    return AdtSpec(kind="trivial")


def _ho_initial(level: int) -> AdtValue:
    # A level-k stack initially holds a single initial level-(k-1) stack;
    # a completely empty outer stack would disable every operation.
    v: AdtValue = ()
    for _ in range(level - 1):
        v = (v,)
    return v


def _ho_step(v: tuple, level: int, op: AdtOp) -> tuple | None:
    """One step of the level-n stack; None when disabled.

    pop/push of a symbol recurse to the level-1 top; the _k variants
    copy/remove/inspect the top element once the current level is k.
    """
    if op.name == "push" and level == 1:
        return v + (op.arg,)
    if op.name == "pop" and level == 1:
        return v[:-1] if v and v[-1] == op.arg else None
    if op.name == "isempty" and level == 1:
        return v if v == () else None
    if op.name == "pushk" and level == op.arg:
        return v + (v[-1],) if v else None
    if op.name == "popk" and level == op.arg:
        return v[:-1] if v else None
    if op.name == "isemptyk" and level == op.arg:
        return v if v and v[-1] == () else None
    if level == 1:
        return None
    if not v:
        return None
    inner = _ho_step(v[-1], level - 1, op)
    if inner is None:
        return None
    return v[:-1] + (inner,)


_HO_COUNTER_OPS = {
    "inc": ("push", "a"),
    "dec": ("pop", "a"),
    "iszero": ("isempty", None),
}


def check_value(spec: AdtSpec, v: AdtValue) -> None:
    """Raise AdtError unless v is well-formed for spec.kind."""
    kind = spec.kind
    if kind == "trivial":
        ok = v == ()
    elif kind in ("counter", "weak-counter"):
        ok = isinstance(v, int) and v >= 0
    elif kind == "stack":
        ok = isinstance(v, tuple) and all(g in spec.alphabet for g in v)
    elif kind in ("ho-stack", "ho-counter", "ho-weak-counter"):
        ok = _check_ho(v, spec.level, spec.effective_alphabet)
    elif kind == "multi-stack":
        ok = (
            isinstance(v, tuple)
            and len(v) == spec.count
            and all(
                isinstance(s, tuple) and all(g in spec.alphabet for g in s) for s in v
            )
        )
    elif kind == "petri":
        ok = (
            isinstance(v, tuple)
            and v == mk_marking(dict(v))
            and all(p in spec.places for p, _ in v)
        )
    else:
        ok = False
    if not ok:
        raise AdtError(f"malformed {kind} value: {v!r}")


def _check_ho(v: AdtValue, level: int, alphabet: tuple[str, ...]) -> bool:
    if level == 1:
        return isinstance(v, tuple) and all(g in alphabet for g in v)
    return isinstance(v, tuple) and all(_check_ho(e, level - 1, alphabet) for e in v)


_MULTI_INDEX = re.compile(r"^(push|pop|isempty)(\d+)$")


def adt_step(spec: AdtSpec, v: AdtValue, op: AdtOp) -> frozenset:
    """All successors of v under op; the empty set means op is disabled.

    Every built-in kind is deterministic, so the result has size <= 1.
    Kind/operation mismatches raise AdtError rather than reporting
    "disabled".
    """
    check_value(spec, v)
    spec.validate_op(op)
    return step_unchecked(spec, v, op)


def step_unchecked(spec: AdtSpec, v: AdtValue, op: AdtOp) -> frozenset:
    """adt_step without well-formedness checks (hot path for solvers)."""
    if op.name == RESET:
        return frozenset([spec.initial_value()])
    kind = spec.kind

    if kind in ("counter", "weak-counter"):
        if op.name == "inc":
            return frozenset([v + 1])
        if op.name == "dec":
            return frozenset([v - 1]) if v > 0 else frozenset()
        if op.name == "iszero":
            return frozenset([v]) if v == 0 else frozenset()

    if kind == "stack":
        r = _ho_step(v, 1, op)
        return frozenset() if r is None else frozenset([r])

    if kind == "ho-stack":
        r = _ho_step(v, spec.level, op)
        return frozenset() if r is None else frozenset([r])

    if kind in ("ho-counter", "ho-weak-counter"):
        if op.name in _HO_COUNTER_OPS:
            name, arg = _HO_COUNTER_OPS[op.name]
            inner_op = AdtOp(name, arg)
        else:
            inner_op = AdtOp(
                {"inck": "pushk", "deck": "popk", "iszerok": "isemptyk"}[op.name],
                op.arg,
            )
        r = _ho_step(v, spec.level, inner_op)
        return frozenset() if r is None else frozenset([r])

    if kind == "multi-stack":
        m = _MULTI_INDEX.match(op.name)
        verb, i = m.group(1), int(m.group(2))
        stack = v[i - 1]
        if verb == "pop":
            # ordered discipline: popping stack i needs stacks 1..i-1 empty
            if any(v[j] != () for j in range(i - 1)):
                return frozenset()
            if not stack or stack[-1] != op.arg:
                return frozenset()
            return frozenset([v[: i - 1] + (stack[:-1],) + v[i:]])
        if verb == "push":
            return frozenset([v[: i - 1] + (stack + (op.arg,),) + v[i:]])
        return frozenset([v]) if stack == () else frozenset()

    if kind == "petri":
        t = spec.net_transition(op.name)
        after_inputs = marking_sub(v, t.inputs)
        if after_inputs is None:
            return frozenset()
        if t.resets:
            after_inputs = mk_marking(
                {p: c for p, c in after_inputs if p not in t.resets}
            )
        return frozenset([marking_add(after_inputs, t.outputs)])

    raise AdtError(f"no step relation for kind {kind}")


def value_size(spec: AdtSpec, v: AdtValue) -> int:
    """Size measure used by bounded exploration to prune large values."""
    kind = spec.kind
    if kind == "trivial":
        return 0
    if kind in ("counter", "weak-counter"):
        return v
    if kind == "stack":
        return len(v)
    if kind in ("ho-stack", "ho-counter", "ho-weak-counter"):
        return _ho_size(v, spec.level)
    if kind == "multi-stack":
        return sum(len(s) for s in v)
    if kind == "petri":
        return marking_total(v)
    raise AdtError(kind)


def _ho_size(v: tuple, level: int) -> int:
    # symbols plus nested sub-stacks, so that bounded size means finitely
    # many values (symbol count alone admits unboundedly many empty nests)
    if level == 1:
        return len(v)
    return len(v) + sum(_ho_size(e, level - 1) for e in v)


def enumerate_values(spec: AdtSpec, max_size: int) -> list:
    """All well-formed values of size <= max_size (test oracle helper)."""
    kind = spec.kind
    if kind == "trivial":
        return [()]
    if kind in ("counter", "weak-counter"):
        return list(range(max_size + 1))
    if kind == "stack":
        return [
            w
            for n in range(max_size + 1)
            for w in itertools.product(spec.alphabet, repeat=n)
        ]
    if kind == "petri":
        out = []
        places = spec.places
        for counts in itertools.product(range(max_size + 1), repeat=len(places)):
            if sum(counts) <= max_size:
                out.append(mk_marking(dict(zip(places, counts))))
        return sorted(set(out))
    if kind == "multi-stack":
        words = [
            w
            for n in range(max_size + 1)
            for w in itertools.product(spec.alphabet, repeat=n)
        ]
        return [
            v
            for v in itertools.product(words, repeat=spec.count)
            if sum(len(s) for s in v) <= max_size
        ]
    if kind in ("ho-stack", "ho-counter", "ho-weak-counter"):
        return _enumerate_ho(spec.effective_alphabet, spec.level, max_size)
    raise AdtError(kind)


def _enumerate_ho(alphabet: tuple[str, ...], level: int, max_size: int) -> list:
    if level == 1:
        return [
            w
            for n in range(max_size + 1)
            for w in itertools.product(alphabet, repeat=n)
        ]
    out: list = [()]
    elems = _enumerate_ho(alphabet, level - 1, max_size - 1)
    frontier: list[tuple] = [()]
    while frontier:
        nxt = []
        for stack in frontier:
            used = _ho_size(stack, level)
            for e in elems:
                s = used + 1 + _ho_size(e, level - 1)
                if s <= max_size:
                    nxt.append(stack + (e,))
        out += nxt
        frontier = nxt
    return out


# ---------------------------------------------------------------------------
# Well-quasi-ordering machinery for well-structured kinds


def wqo_leq(spec: AdtSpec, v1: AdtValue, v2: AdtValue) -> bool:
    """Decidable WQO on values: numeric order for counters, componentwise
    order for markings, equality for the trivial type."""
    if spec.kind in ("counter", "weak-counter"):
        return v1 <= v2
    if spec.kind == "petri":
        return marking_leq(v1, v2)
    if spec.kind == "trivial":
        return v1 == v2
    raise UnsupportedOrderError(f"no well-quasi-ordering for kind {spec.kind}")


def min_value(spec: AdtSpec) -> AdtValue:
    """Bottom of the WQO (the least element of the value space)."""
    if spec.kind in ("counter", "weak-counter"):
        return 0
    if spec.kind == "petri":
        return ()
    if spec.kind == "trivial":
        return ()
    raise UnsupportedOrderError(f"no well-quasi-ordering for kind {spec.kind}")


@dataclass(frozen=True)
class UpwardBasis:
    """A finite antichain of values denoting its upward closure."""

    elements: frozenset = field(default_factory=frozenset)

    @staticmethod
    def of(spec: AdtSpec, elements) -> "UpwardBasis":
        return UpwardBasis(frozenset(minimize(spec, elements)))

    def contains(self, spec: AdtSpec, v: AdtValue) -> bool:
        return any(wqo_leq(spec, b, v) for b in self.elements)


def minimize(spec: AdtSpec, elements) -> list:
    """Drop elements dominated by another (keep one copy of equals)."""
    elems = sorted(set(elements), key=repr)
    out: list = []
    for e in elems:
        if any(wqo_leq(spec, o, e) for o in out):
            continue
        out = [o for o in out if not wqo_leq(spec, e, o)]
        out.append(e)
    return out


def marking_pre_upward(t: PetriTransition, m: Marking) -> Marking | None:
    """Minimal marking whose t-successor covers m, or None if impossible.

    For ordinary transitions this is max(m - outputs, 0) + inputs; places
    the transition resets come out empty and so cannot supply tokens.
    """
    need = marking_sub_clamped(m, t.outputs)
    if t.resets:
        if any(p in t.resets for p, _ in need):
            return None
        need = mk_marking({p: c for p, c in need if p not in t.resets})
    return marking_add(need, t.inputs)


def pre_upward_element(spec: AdtSpec, op: AdtOp, v: AdtValue) -> list:
    """Minimal elements of { u | exists u' >= v with u -op-> u' }."""
    spec.validate_op(op)
    if spec.kind not in WELL_STRUCTURED_KINDS:
        raise UnsupportedOrderError(
            f"minimal predecessor bases unsupported for kind {spec.kind}"
        )

    if op.name == RESET:
        init = spec.initial_value()
        return [min_value(spec)] if wqo_leq(spec, v, init) else []

    if spec.kind in ("counter", "weak-counter"):
        if op.name == "inc":
            return [max(v - 1, 0)]
        if op.name == "dec":
            return [v + 1]
        if op.name == "iszero":
            return [0] if v == 0 else []

    if spec.kind == "petri":
        pre = marking_pre_upward(spec.net_transition(op.name), v)
        return [] if pre is None else [pre]

    if spec.kind == "trivial":
        return []  # trivial has no operations besides reset

    raise AdtError(f"cannot compute predecessors of {op} for {spec.kind}")


def pre_min_upward(spec: AdtSpec, op: AdtOp, basis: UpwardBasis) -> UpwardBasis:
    """Minimal basis of the predecessors of the basis' upward closure."""
    pres: list = []
    for b in basis.elements:
        pres += pre_upward_element(spec, op, b)
    return UpwardBasis.of(spec, pres)
