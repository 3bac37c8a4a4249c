"""Syntactic models: TSO process descriptions and register machines.

A process is a finite transition system over read/write/skip/fence
instructions plus data-type operations.  A register machine is a finite
control with finitely many registers over a bounded domain {0..N} and one
attached data type.  Register actions come in three tiers:

    I    skp, write, read
    II   + inc, dec, ckz
    III  + set and the comparisons (cke, ckne, ckl, ckg, ckle, ckge)

Solvers interpret all tiers directly; ``lower_tier3_to_tier2`` and
``lower_tier2_to_tier1`` are reachability-preserving rewritings down to
the smaller instruction sets.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .adt import AdtOp, AdtSpec, AdtValue, step_unchecked

Message = tuple[str, int]


class ModelError(ValueError):
    """Malformed model: undeclared names, out-of-domain values."""


@dataclass(frozen=True)
class MemorySpec:
    """Shared variables X over the finite domain {0..d_max}; initial value 0."""

    variables: tuple[str, ...]
    d_max: int
    d_init: int = 0

    def __post_init__(self) -> None:
        if len(set(self.variables)) != len(self.variables):
            raise ModelError("duplicate variable names")
        if not 0 <= self.d_init <= self.d_max:
            raise ModelError("initial value outside the domain")

    @property
    def domain(self) -> range:
        return range(self.d_max + 1)

    def messages(self) -> tuple[Message, ...]:
        """The message set M = X x D in a fixed order."""
        return tuple((x, d) for x in self.variables for d in self.domain)


@dataclass(frozen=True)
class Instruction:
    """A process instruction: rd(x,d), wr(x,d), skip, mf, or a data op."""

    kind: str  # rd | wr | skip | mf | op
    var: str | None = None
    val: int | None = None
    op: AdtOp | None = None

    def __str__(self) -> str:
        if self.kind in ("rd", "wr"):
            return f"{self.kind} {self.var} {self.val}"
        if self.kind == "op":
            return f"op {self.op}"
        return self.kind


def rd(x: str, d: int) -> Instruction:
    return Instruction("rd", var=x, val=d)


def wr(x: str, d: int) -> Instruction:
    return Instruction("wr", var=x, val=d)


def skip() -> Instruction:
    return Instruction("skip")


def mf() -> Instruction:
    return Instruction("mf")


def op_instr(op: AdtOp) -> Instruction:
    return Instruction("op", op=op)


ProcEdge = tuple[str, Instruction, str]


@dataclass(frozen=True)
class ProcessDescription:
    """Finite-state process with a designated target state."""

    name: str
    states: tuple[str, ...]
    q_init: str
    q_final: str
    delta: tuple[ProcEdge, ...]

    def __post_init__(self) -> None:
        declared = set(self.states)
        if self.q_init not in declared:
            raise ModelError(f"initial state {self.q_init} undeclared")
        if self.q_final not in declared:
            raise ModelError(f"target state {self.q_final} undeclared")
        for q, _, q2 in self.delta:
            if q not in declared or q2 not in declared:
                raise ModelError(f"transition endpoint undeclared: {q} -> {q2}")


def validate_program(mem: MemorySpec, adt: AdtSpec, proc: ProcessDescription) -> None:
    """Cross-checks instruction payloads against memory and data type."""
    for q, instr, q2 in proc.delta:
        if instr.kind in ("rd", "wr"):
            if instr.var not in mem.variables:
                raise ModelError(f"undeclared variable {instr.var} in {q}->{q2}")
            if instr.val not in mem.domain:
                raise ModelError(f"value {instr.val} outside domain in {q}->{q2}")
        elif instr.kind == "op":
            adt.validate_op(instr.op)


# ---------------------------------------------------------------------------
# Register machines


@dataclass(frozen=True)
class RegisterAction:
    """One action of the register machine; operands are registers or values."""

    kind: str  # skp|write|read|inc|dec|ckz|set|cke|ckne|ckl|ckg|ckle|ckge
    x: str | int | None = None
    y: str | int | None = None

    TIER1 = ("skp", "write", "read")
    TIER2 = ("inc", "dec", "ckz")
    TIER3 = ("set", "cke", "ckne", "ckl", "ckg", "ckle", "ckge")

    @property
    def tier(self) -> int:
        if self.kind in self.TIER1:
            return 1
        if self.kind in self.TIER2:
            return 2
        if self.kind in self.TIER3:
            return 3
        raise ModelError(f"unknown action kind {self.kind}")

    def __str__(self) -> str:
        if self.kind == "skp":
            return "skp"
        if self.y is None:
            return f"{self.kind} {self.x}"
        return f"{self.kind} {self.x} {self.y}"


def skp() -> RegisterAction:
    return RegisterAction("skp")


def write(r: str, d: int) -> RegisterAction:
    return RegisterAction("write", r, d)


def read(r: str, d: int) -> RegisterAction:
    return RegisterAction("read", r, d)


def inc(r: str) -> RegisterAction:
    return RegisterAction("inc", r)


def dec(r: str) -> RegisterAction:
    return RegisterAction("dec", r)


def ckz(r: str) -> RegisterAction:
    return RegisterAction("ckz", r)


def set_(r: str, y: str | int) -> RegisterAction:
    return RegisterAction("set", r, y)


RmEdge = tuple[str, "RegisterAction | AdtOp", str]


@dataclass(frozen=True)
class RegisterMachine:
    name: str
    states: tuple[str, ...]
    q_init: str
    q_target: str
    registers: tuple[str, ...]
    bound: int  # register domain is {0..bound}
    adt: AdtSpec
    delta: tuple[RmEdge, ...]

    def __post_init__(self) -> None:
        declared = set(self.states)
        regs = set(self.registers)
        if len(regs) != len(self.registers):
            raise ModelError("duplicate register names")
        if self.q_init not in declared or self.q_target not in declared:
            raise ModelError("initial/target state undeclared")
        if self.bound < 0:
            raise ModelError("register bound must be >= 0")
        for q, act, q2 in self.delta:
            if q not in declared or q2 not in declared:
                raise ModelError(f"transition endpoint undeclared: {q} -> {q2}")
            if isinstance(act, AdtOp):
                self.adt.validate_op(act)
                continue
            for operand in (act.x, act.y):
                if isinstance(operand, str) and operand not in regs:
                    raise ModelError(f"undeclared register {operand}")
                if isinstance(operand, int) and not 0 <= operand <= self.bound:
                    raise ModelError(f"literal {operand} outside 0..{self.bound}")

    def tier(self) -> int:
        """Highest instruction tier that occurs syntactically."""
        tiers = [1]
        for _, act, _ in self.delta:
            if isinstance(act, RegisterAction):
                tiers.append(act.tier)
        return max(tiers)

    def initial_configuration(self) -> "RmConfiguration":
        return RmConfiguration(
            self.q_init, (0,) * len(self.registers), self.adt.initial_value()
        )

    def register_index(self, r: str) -> int:
        return _register_indices(self)[r]


@dataclass(frozen=True)
class RmConfiguration:
    """State, total register assignment, and current data-type value."""

    state: str
    regs: tuple[int, ...]
    value: AdtValue


@functools.lru_cache(maxsize=None)
def _register_indices(rm: RegisterMachine) -> dict[str, int]:
    return {r: i for i, r in enumerate(rm.registers)}


@functools.lru_cache(maxsize=None)
def _edges_by_state(rm: RegisterMachine) -> dict[str, tuple[RmEdge, ...]]:
    by_state: dict[str, list[RmEdge]] = {q: [] for q in rm.states}
    for edge in rm.delta:
        by_state[edge[0]].append(edge)
    return {q: tuple(es) for q, es in by_state.items()}


def _operand_value(regs: tuple[int, ...], idx: dict[str, int], o: str | int) -> int:
    return regs[idx[o]] if isinstance(o, str) else o


_COMPARE = {
    "cke": lambda a, b: a == b,
    "ckne": lambda a, b: a != b,
    "ckl": lambda a, b: a < b,
    "ckg": lambda a, b: a > b,
    "ckle": lambda a, b: a <= b,
    "ckge": lambda a, b: a >= b,
}


def rm_step(rm: RegisterMachine, c: RmConfiguration) -> list[tuple[RmEdge, RmConfiguration]]:
    """All enabled transitions from c; disabled ones are simply absent."""
    idx = _register_indices(rm)
    out: list[tuple[RmEdge, RmConfiguration]] = []
    for edge in _edges_by_state(rm).get(c.state, ()):
        _, act, q2 = edge
        if isinstance(act, AdtOp):
            for v2 in sorted(step_unchecked(rm.adt, c.value, act), key=repr):
                out.append((edge, RmConfiguration(q2, c.regs, v2)))
            continue
        kind = act.kind
        if kind == "skp":
            out.append((edge, RmConfiguration(q2, c.regs, c.value)))
        elif kind == "write":
            i = idx[act.x]
            regs = c.regs[:i] + (act.y,) + c.regs[i + 1 :]
            out.append((edge, RmConfiguration(q2, regs, c.value)))
        elif kind == "read":
            if c.regs[idx[act.x]] == act.y:
                out.append((edge, RmConfiguration(q2, c.regs, c.value)))
        elif kind == "inc":
            i = idx[act.x]
            if c.regs[i] < rm.bound:
                regs = c.regs[:i] + (c.regs[i] + 1,) + c.regs[i + 1 :]
                out.append((edge, RmConfiguration(q2, regs, c.value)))
        elif kind == "dec":
            i = idx[act.x]
            if c.regs[i] > 0:
                regs = c.regs[:i] + (c.regs[i] - 1,) + c.regs[i + 1 :]
                out.append((edge, RmConfiguration(q2, regs, c.value)))
        elif kind == "ckz":
            if c.regs[idx[act.x]] == 0:
                out.append((edge, RmConfiguration(q2, c.regs, c.value)))
        elif kind == "set":
            i = idx[act.x]
            regs = c.regs[:i] + (_operand_value(c.regs, idx, act.y),) + c.regs[i + 1 :]
            out.append((edge, RmConfiguration(q2, regs, c.value)))
        else:
            a = _operand_value(c.regs, idx, act.x)
            b = _operand_value(c.regs, idx, act.y)
            if _COMPARE[kind](a, b):
                out.append((edge, RmConfiguration(q2, c.regs, c.value)))
    return out


def replay_rm(rm: RegisterMachine, labels) -> RmConfiguration:
    """Replay a witness (a sequence of delta triples) under rm_step.

    Raises ModelError if any step is not enabled; returns the final
    configuration on success.
    """
    c = rm.initial_configuration()
    for label in labels:
        successors = [c2 for lab, c2 in rm_step(rm, c) if lab == label]
        if not successors:
            raise ModelError(f"witness step not enabled: {label}")
        c = successors[0]
    return c


# ---------------------------------------------------------------------------
# Tier lowerings


class _Gensym:
    """Fresh state/register names that cannot collide with declared ones."""

    def __init__(self, taken) -> None:
        self.prefix = "g"
        taken = set(taken)
        while any(t.startswith(self.prefix) for t in taken):
            self.prefix += "g"
        self.n = 0

    def fresh(self) -> str:
        self.n += 1
        return f"{self.prefix}{self.n}"


def _zero_loop(gs: _Gensym, entry: str, r: str, exit_: str) -> list[RmEdge]:
    """Drain register r to 0: dec self-loop with a ckz exit."""
    return [(entry, dec(r), entry), (entry, ckz(r), exit_)]


def _inc_chain(gs: _Gensym, entry: str, r: str, times: int, exit_: str) -> list[RmEdge]:
    edges: list[RmEdge] = []
    cur = entry
    for i in range(times):
        nxt = exit_ if i == times - 1 else gs.fresh()
        edges.append((cur, inc(r), nxt))
        cur = nxt
    if times == 0:
        edges.append((entry, skp(), exit_))
    return edges


def _dec_chain(gs: _Gensym, entry: str, r: str, times: int, exit_: str) -> list[RmEdge]:
    edges: list[RmEdge] = []
    cur = entry
    for i in range(times):
        nxt = exit_ if i == times - 1 else gs.fresh()
        edges.append((cur, dec(r), nxt))
        cur = nxt
    if times == 0:
        edges.append((entry, skp(), exit_))
    return edges


def _restore_loop(gs: _Gensym, entry: str, aux: str, targets: list[str], exit_: str) -> list[RmEdge]:
    """Move aux back into every register of targets: one inc each per round."""
    edges: list[RmEdge] = [(entry, ckz(aux), exit_)]
    cur = gs.fresh()
    edges.append((entry, dec(aux), cur))
    for i, r in enumerate(targets):
        nxt = entry if i == len(targets) - 1 else gs.fresh()
        edges.append((cur, inc(r), nxt))
        cur = nxt
    return edges


def _cmp_gadget(
    gs: _Gensym, entry: str, kind: str, r1: str, r2: str, aux: str, exit_: str
) -> list[RmEdge]:
    """Tier-II gadget for a strict/non-strict comparison of two registers.

    Joint countdown of r1 and r2 into aux, a test at the bottom, then a
    restore loop; both operands come out unchanged and aux is 0 again.
    """
    loop = gs.fresh()
    a, b = gs.fresh(), gs.fresh()
    edges: list[RmEdge] = [
        (entry, skp(), loop),
        (loop, dec(r1), a),
        (a, dec(r2), b),
        (b, inc(aux), loop),
    ]
    post = gs.fresh()
    if kind == "cke":
        e1 = gs.fresh()
        edges += [(loop, ckz(r1), e1), (e1, ckz(r2), post)]
    elif kind == "ckle":
        edges += [(loop, ckz(r1), post)]
    elif kind == "ckl":
        e1, e2 = gs.fresh(), gs.fresh()
        edges += [(loop, ckz(r1), e1), (e1, dec(r2), e2), (e2, inc(r2), post)]
    else:
        raise ModelError(kind)
    edges += _restore_loop(gs, post, aux, [r1, r2], exit_)
    return edges


def _lower_tier3_edge(
    gs: _Gensym, q: str, act: RegisterAction, q2: str, aux: str, lit: str, bound: int
) -> list[RmEdge]:
    kind = act.kind
    if kind == "set":
        if isinstance(act.y, int):
            z = gs.fresh()
            edges = [(q, skp(), z)]
            mid = gs.fresh()
            edges += _zero_loop(gs, z, act.x, mid)
            edges += _inc_chain(gs, mid, act.x, act.y, q2)
            return edges
        if act.y == act.x:
            return [(q, skp(), q2)]
        # zero aux and x, transfer y into both x and aux, restore y from aux
        z = gs.fresh()
        edges = [(q, skp(), z)]
        z2, t = gs.fresh(), gs.fresh()
        edges += _zero_loop(gs, z, aux, z2)
        edges += _zero_loop(gs, z2, act.x, t)
        a, b = gs.fresh(), gs.fresh()
        post = gs.fresh()
        edges += [
            (t, dec(act.y), a),
            (a, inc(act.x), b),
            (b, inc(aux), t),
            (t, ckz(act.y), post),
        ]
        edges += _restore_loop(gs, post, aux, [act.y], q2)
        return edges

    # comparisons
    x, y = act.x, act.y
    if isinstance(x, int) and isinstance(y, int):
        return [(q, skp(), q2)] if _COMPARE[kind](x, y) else []
    if isinstance(x, str) and x == y:
        # comparing a register with itself decides at build time
        return [(q, skp(), q2)] if _COMPARE[kind](0, 0) else []

    def with_regs(r1: str, r2: str, k: str, entry: str, exit_: str) -> list[RmEdge]:
        if k == "ckg":
            return _cmp_gadget(gs, entry, "ckl", r2, r1, aux, exit_)
        if k == "ckge":
            return _cmp_gadget(gs, entry, "ckle", r2, r1, aux, exit_)
        if k == "ckne":
            # r1 < r2 or r1 > r2, as two alternative paths
            return _cmp_gadget(gs, entry, "ckl", r1, r2, aux, exit_) + _cmp_gadget(
                gs, entry, "ckl", r2, r1, aux, exit_
            )
        return _cmp_gadget(gs, entry, k, r1, r2, aux, exit_)

    if isinstance(x, str) and isinstance(y, str):
        return with_regs(x, y, kind, q, q2)

    # one literal operand: materialize it in lit, compare, then drain lit
    value = x if isinstance(x, int) else y
    z = gs.fresh()
    edges = [(q, skp(), z)]
    m1, m2 = gs.fresh(), gs.fresh()
    edges += _zero_loop(gs, z, lit, m1)
    edges += _inc_chain(gs, m1, lit, value, m2)
    m3 = gs.fresh()
    if isinstance(x, int):
        edges += with_regs(lit, y, kind, m2, m3)
    else:
        edges += with_regs(x, lit, kind, m2, m3)
    edges += _dec_chain(gs, m3, lit, value, q2)
    return edges


def lower_tier3_to_tier2(rm: RegisterMachine) -> RegisterMachine:
    """Rewrite tier-III actions into tier-II gadgets.

    Adds one counting auxiliary register and one literal-holding register
    (both restored to 0 on every gadget exit); size stays polynomial in the
    machine and its largest literal.
    """
    if rm.tier() <= 2:
        return rm
    gs = _Gensym(rm.states)
    reg_gs = _Gensym(rm.registers)
    aux, lit = reg_gs.fresh(), reg_gs.fresh()
    edges: list[RmEdge] = []
    for q, act, q2 in rm.delta:
        if isinstance(act, AdtOp) or act.tier <= 2:
            edges.append((q, act, q2))
        else:
            edges += _lower_tier3_edge(gs, q, act, q2, aux, lit, rm.bound)
    states = list(rm.states) + sorted(
        {q for e in edges for q in (e[0], e[2])} - set(rm.states)
    )
    return RegisterMachine(
        name=rm.name,
        states=tuple(states),
        q_init=rm.q_init,
        q_target=rm.q_target,
        registers=rm.registers + (aux, lit),
        bound=rm.bound,
        adt=rm.adt,
        delta=tuple(edges),
    )


def lower_tier2_to_tier1(rm: RegisterMachine) -> RegisterMachine:
    """Expand inc/dec/ckz into read/write fans over the whole domain."""
    if rm.tier() > 2:
        raise ModelError("lower tier III first")
    gs = _Gensym(rm.states)
    edges: list[RmEdge] = []
    for q, act, q2 in rm.delta:
        if isinstance(act, AdtOp) or act.tier == 1:
            edges.append((q, act, q2))
        elif act.kind == "inc":
            for d in range(rm.bound):
                m = gs.fresh()
                edges += [(q, read(act.x, d), m), (m, write(act.x, d + 1), q2)]
        elif act.kind == "dec":
            for d in range(1, rm.bound + 1):
                m = gs.fresh()
                edges += [(q, read(act.x, d), m), (m, write(act.x, d - 1), q2)]
        elif act.kind == "ckz":
            edges.append((q, read(act.x, 0), q2))
    states = list(rm.states) + sorted(
        {q for e in edges for q in (e[0], e[2])} - set(rm.states)
    )
    return RegisterMachine(
        name=rm.name,
        states=tuple(states),
        q_init=rm.q_init,
        q_target=rm.q_target,
        registers=rm.registers,
        bound=rm.bound,
        adt=rm.adt,
        delta=tuple(edges),
    )
