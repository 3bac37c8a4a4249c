"""Reachability backends for register machines, one per data-type family.

solve_finite      explicit search; exact when the value space stays finite
solve_counter     bounded search with the n^2 counter cutoff
binarize_counter  counter values in binary, as plain registers
solve_stack       registers into control states + pre*-saturation
solve_petri       net encoding + backward coverability
solve_wsts        generic backward search over the product well-ordering
explore_bounded   value-size-bounded search for the remaining types

Every reachable verdict carries a witness that replays under rm_step.
"""

from __future__ import annotations

import itertools
import time

from .adt import (
    MONOTONE_KINDS,
    RESET,
    AdtOp,
    PetriTransition,
    marking_leq,
    marking_pre_upward,
    min_value,
    pre_upward_element,
    trivial_spec,
    value_size,
    wqo_leq,
)
from .coverability import BackwardResult, backward_reach
from .model import (
    ModelError,
    RegisterAction,
    RegisterMachine,
    RmEdge,
    _Gensym,
    read,
    rm_step,
    write,
)
from .pds import PdsRule, PushdownSystem, pre_star
from .translate import encode_rm_to_coverability_labelled
from .verdict import INCONCLUSIVE, REACHABLE, UNREACHABLE, Stats, Verdict

DEFAULT_BUDGET = 1_000_000


def format_rm_label(edge: RmEdge) -> str:
    from .dsl import print_action

    q, act, q2 = edge
    return f"{q} -> {q2} : {print_action(act)}"


def _bfs(
    rm: RegisterMachine,
    value_bound: int | None,
    budget: int,
    block_above: int | None = None,
):
    """Shared search core.

    value_bound prunes (recorded as lost coverage); block_above treats
    larger counter values as nonexistent by design (no coverage loss is
    recorded, the caller supplies the completeness argument).
    """
    t0 = time.monotonic()
    init = rm.initial_configuration()
    parents: dict = {init: None}
    frontier = [init]
    explored = 0
    pruned = False
    depth = 0

    def verdict(outcome, witness=None, closed=True):
        return Verdict(
            outcome,
            witness=witness,
            stats=Stats(explored, depth, int((time.monotonic() - t0) * 1000)),
            closed=closed,
        )

    def witness_for(c):
        labels = []
        k = c
        while parents[k] is not None:
            k, lab = parents[k]
            labels.append(lab)
        labels.reverse()
        return tuple(format_rm_label(l) for l in labels)

    if init.state == rm.q_target:
        return verdict(REACHABLE, witness=())
    while frontier:
        depth += 1
        next_frontier = []
        for c in frontier:
            for label, c2 in rm_step(rm, c):
                if c2 in parents:
                    continue
                size = value_size(rm.adt, c2.value)
                if block_above is not None and size > block_above:
                    continue
                if value_bound is not None and size > value_bound:
                    pruned = True
                    continue
                parents[c2] = (c, label)
                explored += 1
                if c2.state == rm.q_target:
                    return verdict(REACHABLE, witness=witness_for(c2))
                if explored >= budget:
                    return verdict(INCONCLUSIVE, closed=False)
                next_frontier.append(c2)
        frontier = next_frontier
    if pruned:
        return verdict(INCONCLUSIVE, closed=False)
    return verdict(UNREACHABLE)


def solve_finite(
    rm: RegisterMachine, budget: int = DEFAULT_BUDGET, value_cap: int | None = None
) -> Verdict:
    """Explicit-state search; exact whenever it exhausts the space.

    value_cap is a caller-supplied finiteness certificate: values above it
    are treated as blocked (not merely pruned), so verdicts stay exact for
    the capped semantics.
    """
    return _bfs(rm, value_bound=None, budget=budget, block_above=value_cap)


def explore_bounded(
    rm: RegisterMachine, value_bound: int, budget: int = DEFAULT_BUDGET
) -> Verdict:
    """Sound bounded exploration for any data type.

    Reachable verdicts are exact.  Unreachable is only claimed when no
    value was pruned (closure proven); otherwise the verdict is
    inconclusive.
    """
    return _bfs(rm, value_bound=value_bound, budget=budget)


def counter_cutoff(rm: RegisterMachine) -> int:
    """The witness-sufficient counter bound: (|Q| * (N+1)^|R|) squared."""
    n = len(rm.states) * (rm.bound + 1) ** len(rm.registers)
    return n * n


def solve_counter(
    rm: RegisterMachine, cap: int | None = None, budget: int = DEFAULT_BUDGET
) -> Verdict:
    """Counter machines: search values up to the n^2 cutoff.

    A dec self-loop on the target makes the cutoff argument apply; runs
    that would exceed it can be shortened.  A user cap below the cutoff
    turns exhausted-unreachable into inconclusive; reachable verdicts
    always stand.
    """
    if rm.adt.kind not in ("counter", "weak-counter"):
        raise ModelError("solve_counter needs a counter or weak-counter machine")
    bound = counter_cutoff(rm)
    effective = bound if cap is None else min(bound, cap)
    augmented = RegisterMachine(
        name=rm.name,
        states=rm.states,
        q_init=rm.q_init,
        q_target=rm.q_target,
        registers=rm.registers,
        bound=rm.bound,
        adt=rm.adt,
        delta=rm.delta + ((rm.q_target, AdtOp("dec"), rm.q_target),),
    )
    v = _bfs(augmented, value_bound=None, budget=budget, block_above=effective)
    if v.outcome == UNREACHABLE and effective < bound:
        return Verdict(INCONCLUSIVE, stats=v.stats, closed=False)
    return v


def binarize_counter(rm: RegisterMachine, bound: int) -> RegisterMachine:
    """Replace the counter by ceil(log2(bound+1)) bit registers.

    inc is a ripple-carry over the bits, guarded so the value never
    exceeds bound; dec is the borrow chain, blocking at zero; iszero reads
    every bit as 0.  The result runs over the trivial data type.
    """
    if rm.adt.kind not in ("counter", "weak-counter"):
        raise ModelError("binarize_counter needs a counter machine")
    if bound < 1:
        raise ModelError("bound must be >= 1")
    nbits = max(1, (bound).bit_length())
    reg_gs = _Gensym(rm.registers)
    bits = [reg_gs.fresh() for _ in range(nbits)]
    gs = _Gensym(rm.states)
    new_bound = max(rm.bound, 1)
    edges: list[RmEdge] = []

    def ripple_inc(q: str, q2: str) -> None:
        # allowed only while the current value is strictly below bound
        lt = gs.fresh()
        cur = q
        for j in reversed(range(nbits)):
            if (bound >> j) & 1:
                edges.append((cur, read(bits[j], 0), lt))
                nxt = gs.fresh()
                edges.append((cur, read(bits[j], 1), nxt))
                cur = nxt
            else:
                nxt = gs.fresh()
                edges.append((cur, read(bits[j], 0), nxt))
                cur = nxt
        # falling through means value == bound: no inc edge from cur
        cur = lt
        for j in range(nbits):
            f = gs.fresh()
            edges.append((cur, read(bits[j], 1), f))
            nxt = gs.fresh()
            edges.append((f, write(bits[j], 0), nxt))
            done = gs.fresh()
            edges.append((cur, read(bits[j], 0), done))
            edges.append((done, write(bits[j], 1), q2))
            cur = nxt

    def ripple_dec(q: str, q2: str) -> None:
        cur = q
        for j in range(nbits):
            f = gs.fresh()
            edges.append((cur, read(bits[j], 0), f))
            nxt = gs.fresh()
            edges.append((f, write(bits[j], 1), nxt))
            done = gs.fresh()
            edges.append((cur, read(bits[j], 1), done))
            edges.append((done, write(bits[j], 0), q2))
            cur = nxt
        # all bits borrowed: the value was zero, the chain dead-ends

    for q, act, q2 in rm.delta:
        if isinstance(act, RegisterAction):
            edges.append((q, act, q2))
        elif act.name == "inc":
            ripple_inc(q, q2)
        elif act.name == "dec":
            ripple_dec(q, q2)
        elif act.name == "iszero":
            cur = q
            for j, b in enumerate(bits):
                nxt = q2 if j == nbits - 1 else gs.fresh()
                edges.append((cur, read(b, 0), nxt))
                cur = nxt
        elif act.name == RESET:
            cur = q
            for j, b in enumerate(bits):
                nxt = q2 if j == nbits - 1 else gs.fresh()
                edges.append((cur, write(b, 0), nxt))
                cur = nxt
        else:  # pragma: no cover - counter ops are exactly these
            raise ModelError(f"unexpected counter op {act}")

    states = list(rm.states) + sorted(
        {q for e in edges for q in (e[0], e[2])} - set(rm.states)
    )
    return RegisterMachine(
        name=f"{rm.name}_bin",
        states=tuple(states),
        q_init=rm.q_init,
        q_target=rm.q_target,
        registers=rm.registers + tuple(bits),
        bound=new_bound,
        adt=trivial_spec(),
        delta=tuple(edges),
    )


# ---------------------------------------------------------------------------
# Stack: flatten registers into control states, then saturate


def _apply_action(
    rm: RegisterMachine, regs: tuple[int, ...], act: RegisterAction
) -> tuple[int, ...] | None:
    """Successor register assignment under act, or None when disabled."""
    from .model import _COMPARE, _operand_value

    idx = {r: i for i, r in enumerate(rm.registers)}
    kind = act.kind
    if kind == "skp":
        return regs
    if kind == "write":
        i = idx[act.x]
        return regs[:i] + (act.y,) + regs[i + 1 :]
    if kind == "read":
        return regs if regs[idx[act.x]] == act.y else None
    if kind == "inc":
        i = idx[act.x]
        return regs[:i] + (regs[i] + 1,) + regs[i + 1 :] if regs[i] < rm.bound else None
    if kind == "dec":
        i = idx[act.x]
        return regs[:i] + (regs[i] - 1,) + regs[i + 1 :] if regs[i] > 0 else None
    if kind == "ckz":
        return regs if regs[idx[act.x]] == 0 else None
    if kind == "set":
        i = idx[act.x]
        return regs[:i] + (_operand_value(regs, idx, act.y),) + regs[i + 1 :]
    a = _operand_value(regs, idx, act.x)
    b = _operand_value(regs, idx, act.y)
    return regs if _COMPARE[kind](a, b) else None


def _control_closure(rm: RegisterMachine):
    """Forward closure of (state, registers), treating data ops as free.

    Overapproximates the truly reachable pairs, which is all the pushdown
    construction needs.
    """
    by_state: dict[str, list] = {q: [] for q in rm.states}
    for edge in rm.delta:
        by_state[edge[0]].append(edge)
    init = (rm.q_init, (0,) * len(rm.registers))
    seen = {init}
    queue = [init]
    edges_from: dict = {}
    while queue:
        q, regs = queue.pop()
        outs = []
        for edge in by_state[q]:
            _, act, dst = edge
            if isinstance(act, AdtOp):
                outs.append((edge, (dst, regs)))
            else:
                regs2 = _apply_action(rm, regs, act)
                if regs2 is not None:
                    outs.append((edge, (dst, regs2)))
        edges_from[(q, regs)] = outs
        for _, c in outs:
            if c not in seen:
                seen.add(c)
                queue.append(c)
    return init, seen, edges_from


def solve_stack(rm: RegisterMachine) -> Verdict:
    """Exact reachability for stack machines via pre*-saturation."""
    if rm.adt.kind != "stack":
        raise ModelError("solve_stack needs a stack machine")
    t0 = time.monotonic()
    init, controls, edges_from = _control_closure(rm)
    bottom = "_btm"
    while bottom in rm.adt.alphabet:
        bottom += "_"
    alphabet = rm.adt.alphabet + (bottom,)
    stack_syms = rm.adt.alphabet

    rules: list[PdsRule] = []
    reset_controls = []
    for control, outs in edges_from.items():
        for label, control2 in outs:
            act = label[1]
            if isinstance(act, AdtOp) and act.name != RESET:
                if act.name == "push":
                    for g in alphabet:
                        rules.append(PdsRule(control, g, control2, (act.arg, g), label))
                elif act.name == "pop":
                    rules.append(PdsRule(control, act.arg, control2, (), label))
                elif act.name == "isempty":
                    rules.append(PdsRule(control, bottom, control2, (bottom,), label))
                else:  # pragma: no cover - stack ops are exactly these
                    raise ModelError(f"unexpected stack op {act}")
            elif isinstance(act, AdtOp):  # reset: drain the whole stack
                aux = (control, control2, "reset")
                reset_controls.append(aux)
                for g in alphabet:
                    rules.append(PdsRule(control, g, aux, (g,), label))
                for g in stack_syms:
                    rules.append(PdsRule(aux, g, aux, ()))
                rules.append(PdsRule(aux, bottom, control2, (bottom,)))
            else:
                for g in alphabet:
                    rules.append(PdsRule(control, g, control2, (g,), label))

    targets = sorted((c for c in controls if c[0] == rm.q_target), key=repr)
    explored = len(controls)
    if not targets:
        return Verdict(
            UNREACHABLE,
            stats=Stats(explored, 0, int((time.monotonic() - t0) * 1000)),
        )
    pds = PushdownSystem(
        controls=tuple(sorted(controls, key=repr)) + tuple(reset_controls),
        alphabet=alphabet,
        rules=tuple(rules),
    )
    result = pre_star(pds, targets)
    millis = int((time.monotonic() - t0) * 1000)
    stats = Stats(explored, len(result.transitions), millis)
    if not result.accepts(init, (bottom,)):
        return Verdict(UNREACHABLE, stats=stats)
    labels = result.witness(init, (bottom,))
    return Verdict(
        REACHABLE, witness=tuple(format_rm_label(l) for l in labels), stats=stats
    )


# ---------------------------------------------------------------------------
# Petri nets: coverability via backward reachability on markings


def _petri_backward(
    rm: RegisterMachine, record_history: bool, budget: int | None = None
) -> tuple[BackwardResult, dict]:
    inst, labelmap, invariants = encode_rm_to_coverability_labelled(rm)
    by_output: dict[str, list] = {}
    for t in inst.transitions:
        for p, _ in t.outputs:
            by_output.setdefault(p, []).append(t)

    def violates_invariant(m) -> bool:
        # no reachable marking covers a demand of more than k tokens on an
        # exactly-k place family
        for places, k in invariants:
            if sum(c for p, c in m if p in places) > k:
                return True
        return False

    def preds(m):
        # a transition can only shrink the requirement if it supplies a
        # place m asks for; all others yield m + inputs, subsumed by m
        relevant: dict[str, PetriTransition] = {}
        for p, _ in m:
            for t in by_output.get(p, ()):
                relevant[t.name] = t
        out = []
        for name, t in relevant.items():
            m2 = marking_pre_upward(t, m)
            if m2 is not None and not violates_invariant(m2):
                out.append((name, m2))
        return out

    # the first invariant family is the control places; every surviving
    # demand holds exactly one control token, and only demands sharing it
    # are comparable
    control_places = invariants[0][0]

    def bucket(m):
        return next((p for p, _ in m if p in control_places), None)

    res = backward_reach(
        targets=[inst.target],
        preds=preds,
        leq=marking_leq,
        covers_initial=lambda e: marking_leq(e, inst.initial),
        record_history=record_history,
        max_explored=budget,
        bucket_key=bucket,
    )
    return res, labelmap


def solve_petri(
    rm: RegisterMachine,
    record_history: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> Verdict:
    """Exact reachability for tier-I petri machines via coverability.

    Verdicts are exact unless the basis exploration exceeds the budget,
    which degrades to inconclusive (large encoded machines only; direct
    nets stabilize in a handful of iterations).
    """
    t0 = time.monotonic()
    res, labelmap = _petri_backward(rm, record_history, budget)
    millis = int((time.monotonic() - t0) * 1000)
    stats = Stats(res.explored, res.iterations, millis)
    if res.exhausted:
        return Verdict(INCONCLUSIVE, stats=stats, closed=False)
    if not res.coverable:
        return Verdict(UNREACHABLE, stats=stats)
    labels = tuple(format_rm_label(labelmap[name]) for name in res.chain)
    return Verdict(REACHABLE, witness=labels, stats=stats)


def petri_backward_history(rm: RegisterMachine) -> list:
    """Basis snapshots per backward iteration (antichain invariant hook)."""
    res, _ = _petri_backward(rm, record_history=True)
    return res.history


# ---------------------------------------------------------------------------
# Generic well-structured backend


def _register_preimages(
    rm: RegisterMachine, act: RegisterAction, regs: tuple[int, ...]
) -> list[tuple[int, ...]]:
    """All register assignments that step to regs under act."""
    idx = {r: i for i, r in enumerate(rm.registers)}
    domain = range(rm.bound + 1)

    def subst(i, d):
        return regs[:i] + (d,) + regs[i + 1 :]

    kind = act.kind
    if kind == "skp":
        return [regs]
    if kind == "write":
        i = idx[act.x]
        return [subst(i, d) for d in domain] if regs[i] == act.y else []
    if kind == "read":
        return [regs] if regs[idx[act.x]] == act.y else []
    if kind == "inc":
        i = idx[act.x]
        return [subst(i, regs[i] - 1)] if regs[i] >= 1 else []
    if kind == "dec":
        i = idx[act.x]
        return [subst(i, regs[i] + 1)] if regs[i] + 1 <= rm.bound else []
    if kind == "ckz":
        return [regs] if regs[idx[act.x]] == 0 else []
    if kind == "set":
        i = idx[act.x]
        if isinstance(act.y, str):
            if act.y == act.x:
                return [regs]
            if regs[i] != regs[idx[act.y]]:
                return []
            return [subst(i, d) for d in domain]
        return [subst(i, d) for d in domain] if regs[i] == act.y else []
    # comparisons leave registers unchanged
    from .model import _COMPARE, _operand_value

    a = _operand_value(regs, idx, act.x)
    b = _operand_value(regs, idx, act.y)
    return [regs] if _COMPARE[kind](a, b) else []


def _wsts_backward(
    rm: RegisterMachine, record_history: bool, budget: int | None = None
) -> BackwardResult:
    spec = rm.adt
    bottom = min_value(spec)
    if (rm.bound + 1) ** len(rm.registers) > 100_000:
        return BackwardResult(coverable=False, exhausted=True)
    all_regs = list(itertools.product(range(rm.bound + 1), repeat=len(rm.registers)))
    targets = [(rm.q_target, regs, bottom) for regs in all_regs]

    by_target: dict = {}
    for edge in rm.delta:
        by_target.setdefault(edge[2], []).append(edge)

    def preds(elem):
        q2, regs2, v2 = elem
        out = []
        for edge in by_target.get(q2, ()):
            q, act, _ = edge
            if isinstance(act, AdtOp):
                for v in pre_upward_element(spec, act, v2):
                    out.append((edge, (q, regs2, v)))
            else:
                for regs in _register_preimages(rm, act, regs2):
                    out.append((edge, (q, regs, v2)))
        return out

    def leq(e1, e2):
        return e1[0] == e2[0] and e1[1] == e2[1] and wqo_leq(spec, e1[2], e2[2])

    init = rm.initial_configuration()

    def covers_initial(e):
        return (
            e[0] == init.state
            and e[1] == init.regs
            and wqo_leq(spec, e[2], init.value)
        )

    return backward_reach(
        targets=targets,
        preds=preds,
        leq=leq,
        covers_initial=covers_initial,
        record_history=record_history,
        max_explored=budget,
        bucket_key=lambda e: (e[0], e[1]),  # values compare per (q, regs)
    )


def solve_wsts(
    rm: RegisterMachine,
    record_history: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> Verdict:
    """Backward reachability over (state, registers) x value order.

    Needs a data type whose step relation is monotone w.r.t. its WQO;
    the strict counter is rejected (iszero breaks monotonicity).  Verdicts
    degrade to inconclusive if the register space or the basis exploration
    exceeds the budget.
    """
    if rm.adt.kind not in MONOTONE_KINDS:
        raise ModelError(
            f"solve_wsts needs a monotone well-structured data type, not {rm.adt.kind}"
        )
    t0 = time.monotonic()
    res = _wsts_backward(rm, record_history, budget)
    millis = int((time.monotonic() - t0) * 1000)
    stats = Stats(res.explored, res.iterations, millis)
    if res.exhausted:
        return Verdict(INCONCLUSIVE, stats=stats, closed=False)
    if not res.coverable:
        return Verdict(UNREACHABLE, stats=stats)
    return Verdict(
        REACHABLE,
        witness=tuple(format_rm_label(l) for l in res.chain),
        stats=stats,
    )


def wsts_backward_history(rm: RegisterMachine) -> list:
    return _wsts_backward(rm, record_history=True).history


# ---------------------------------------------------------------------------
# Dispatch


BACKENDS = ("auto", "finite", "counter", "stack", "petri", "wsts", "bounded")


def solve_auto(
    rm: RegisterMachine,
    backend: str = "auto",
    cap: int | None = None,
    value_bound: int = 16,
    budget: int = DEFAULT_BUDGET,
) -> Verdict:
    """Route the machine to the backend matching its data type.

    The coverability backend needs tier-I actions, so higher-tier machines
    are lowered first; such a verdict's witness then refers to the lowered
    machine.  Every other backend interprets all tiers directly.  For
    petri machines that carry registers, auto prefers the product backend:
    it searches backward through the register semantics directly instead
    of expanding every register value into places.
    """
    if backend == "auto":
        backend = {
            "trivial": "finite",
            "counter": "counter",
            "weak-counter": "counter",
            "stack": "stack",
            "petri": "petri" if not rm.registers else "wsts",
        }.get(rm.adt.kind, "bounded")
    if backend == "petri" and rm.tier() > 1:
        from .model import lower_tier2_to_tier1, lower_tier3_to_tier2

        rm = lower_tier2_to_tier1(lower_tier3_to_tier2(rm))
    if backend == "finite":
        cap_ = cap if rm.adt.kind != "trivial" else None
        return solve_finite(rm, budget=budget, value_cap=cap_)
    if backend == "counter":
        return solve_counter(rm, cap=cap, budget=budget)
    if backend == "stack":
        return solve_stack(rm)
    if backend == "petri":
        return solve_petri(rm, budget=budget)
    if backend == "wsts":
        return solve_wsts(rm, budget=budget)
    if backend == "bounded":
        return explore_bounded(rm, value_bound=value_bound, budget=budget)
    raise ModelError(f"unknown backend {backend}")
