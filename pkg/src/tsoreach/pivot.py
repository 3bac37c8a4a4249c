"""The pivot abstraction for parameterized TSO reachability.

Instead of unboundedly many processes with unbounded buffers, a single
abstract process (the provider) is simulated at a time.  A differentiated
word omega fixes the order in which distinct messages first reach memory;
the rank-k provider replays the process that supplies the rank-k message
and then hands over to the next provider.  A view records the provider's
state, data value, last writes, and three pointers into omega.

The search engine builds omega lazily as it runs: only the already-provided
prefix (ranks below the progress pointer) is ever consulted by a rule, so
each branch carries just that prefix and extends it when a provider
finishes.  ``pivot_reach_enumerated`` is the literal all-omega reference
used to validate the lazy engine at small sizes.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .adt import AdtSpec, AdtValue, step_unchecked, value_size
from .model import Instruction, MemorySpec, Message, ProcessDescription
from .verdict import INCONCLUSIVE, REACHABLE, UNREACHABLE, Stats, Verdict


class PivotError(ValueError):
    pass


@dataclass(frozen=True)
class UpdateSequence:
    """A differentiated word over the message set."""

    omega: tuple[Message, ...]

    def __post_init__(self) -> None:
        if len(set(self.omega)) != len(self.omega):
            raise PivotError("update sequence must be differentiated")

    def pos(self, m: Message) -> int | None:
        """1-based rank of m, or None when m does not occur."""
        try:
            return self.omega.index(m) + 1
        except ValueError:
            return None


@dataclass(frozen=True)
class View:
    """Configuration of the pivot transition system."""

    state: str
    value: AdtValue
    lw: tuple[int | None, ...]  # last own write per variable, None = none
    omega: tuple[Message, ...]
    phi_e: int  # external pointer
    phi_l: tuple[int, ...]  # local pointer per variable
    phi_p: int  # progress pointer: rank this provider must supply

    @property
    def phi_l_max(self) -> int:
        return max(self.phi_l, default=0)


@dataclass(frozen=True)
class PivotLabel:
    rule: str  # skip | write1 | write2 | read1 | read2 | read3 | fence | op
    instr: Instruction

    def __str__(self) -> str:
        return f"{self.rule}: {self.instr}"


def initial_view(
    proc: ProcessDescription,
    mem: MemorySpec,
    adt: AdtSpec,
    omega: tuple[Message, ...],
    k: int,
) -> View:
    """The view a fresh rank-k provider starts from."""
    UpdateSequence(omega)
    if not 1 <= k <= len(omega) + 1:
        raise PivotError(f"provider rank {k} outside 1..{len(omega) + 1}")
    nvars = len(mem.variables)
    return View(
        state=proc.q_init,
        value=adt.initial_value(),
        lw=(None,) * nvars,
        omega=omega,
        phi_e=0,
        phi_l=(0,) * nvars,
        phi_p=k,
    )


def _replace(t: tuple, i: int, v) -> tuple:
    return t[:i] + (v,) + t[i + 1 :]


def _var_rank(omega: tuple[Message, ...], x: str) -> int | None:
    """Rank of the first message on x in omega (None = never overwritten)."""
    for i, (var, _) in enumerate(omega):
        if var == x:
            return i + 1
    return None


def pivot_step(
    view: View,
    proc: ProcessDescription,
    mem: MemorySpec,
    adt: AdtSpec,
) -> list[tuple[PivotLabel, View]]:
    """All successor views under the pivot inference rules."""
    seq = UpdateSequence(view.omega)
    var_index = {x: i for i, x in enumerate(mem.variables)}
    out: list[tuple[PivotLabel, View]] = []
    for q, instr, q2 in proc.delta:
        if q != view.state:
            continue
        if instr.kind == "skip":
            out.append((PivotLabel("skip", instr),
                        View(q2, view.value, view.lw, view.omega,
                             view.phi_e, view.phi_l, view.phi_p)))
        elif instr.kind == "wr":
            i = var_index[instr.var]
            rank = seq.pos((instr.var, instr.val))
            if rank is None:
                continue  # a pivot missing from omega: the write is disabled
            if rank < view.phi_p:
                phl = max(view.phi_l_max, rank)
                out.append((PivotLabel("write1", instr),
                            View(q2, view.value,
                                 _replace(view.lw, i, instr.val), view.omega,
                                 view.phi_e, _replace(view.phi_l, i, phl),
                                 view.phi_p)))
            elif rank == view.phi_p:
                out.append((PivotLabel("write2", instr),
                            initial_view(proc, mem, adt, view.omega, view.phi_p + 1)))
        elif instr.kind == "rd":
            i = var_index[instr.var]
            if view.lw[i] == instr.val:
                out.append((PivotLabel("read1", instr),
                            View(q2, view.value, view.lw, view.omega,
                                 view.phi_e, view.phi_l, view.phi_p)))
            if instr.val == mem.d_init and view.lw[i] is None:
                vr = _var_rank(view.omega, instr.var)
                if vr is None or vr > view.phi_e:
                    out.append((PivotLabel("read2", instr),
                                View(q2, view.value, view.lw, view.omega,
                                     view.phi_e, view.phi_l, view.phi_p)))
            rank = seq.pos((instr.var, instr.val))
            if rank is not None and rank < view.phi_p:
                phe = max(view.phi_e, view.phi_l[i], rank)
                out.append((PivotLabel("read3", instr),
                            View(q2, view.value, view.lw, view.omega,
                                 phe, view.phi_l, view.phi_p)))
        elif instr.kind == "mf":
            out.append((PivotLabel("fence", instr),
                        View(q2, view.value, view.lw, view.omega,
                             max(view.phi_e, view.phi_l_max), view.phi_l,
                             view.phi_p)))
        elif instr.kind == "op":
            for v2 in sorted(step_unchecked(adt, view.value, instr.op), key=repr):
                out.append((PivotLabel("op", instr),
                            View(q2, v2, view.lw, view.omega,
                                 view.phi_e, view.phi_l, view.phi_p)))
    return out


# ---------------------------------------------------------------------------
# Reachability search


def format_omega(omega: tuple[Message, ...]) -> str:
    return "omega: " + "; ".join(f"{x}={d}" for x, d in omega)


def parse_omega(line: str) -> tuple[Message, ...]:
    body = line.split(":", 1)[1].strip()
    if not body:
        return ()
    out = []
    for part in body.split(";"):
        x, d = part.strip().split("=")
        out.append((x.strip(), int(d)))
    return tuple(out)


@dataclass(frozen=True)
class _LazyState:
    state: str
    value: AdtValue
    lw: tuple[int | None, ...]
    phi_e: int
    phi_l: tuple[int, ...]
    prefix: tuple[Message, ...]  # pivots already provided; phi_p = len + 1


def pivot_reach(
    proc: ProcessDescription,
    mem: MemorySpec,
    adt: AdtSpec,
    value_bound: int | None = None,
    budget: int = 2_000_000,
) -> Verdict:
    """Decide pivot reachability of the process target state.

    Exact unless data values were pruned (value_bound) or the budget ran
    out, in which case the verdict degrades to inconclusive.  Every rule
    only consults ranks below the progress pointer, so a branch carries the
    provided prefix of omega instead of a full guessed sequence; a finished
    provider extends the prefix with its pivot.
    """
    t0 = time.monotonic()
    var_index = {x: i for i, x in enumerate(mem.variables)}
    nvars = len(mem.variables)
    by_state: dict[str, list] = {q: [] for q in proc.states}
    for q, instr, q2 in proc.delta:
        by_state[q].append((instr, q2))
    init = _LazyState(proc.q_init, adt.initial_value(), (None,) * nvars,
                      0, (0,) * nvars, ())
    parents: dict = {init: None}
    frontier = [init]
    explored = 0
    pruned = False

    def finish(outcome, witness=None, closed=True):
        return Verdict(outcome, witness=witness,
                       stats=Stats(explored, len(parents),
                                   int((time.monotonic() - t0) * 1000)),
                       closed=closed)

    def witness_for(s: _LazyState):
        labels = []
        k = s
        while parents[k] is not None:
            k, lab = parents[k]
            labels.append(lab)
        labels.reverse()
        return (format_omega(s.prefix),) + tuple(str(l) for l in labels)

    if proc.q_init == proc.q_final:
        return finish(REACHABLE, witness=witness_for(init))

    while frontier:
        next_frontier = []
        for s in frontier:
            phi_p = len(s.prefix) + 1
            phi_l_max = max(s.phi_l, default=0)
            prefix_rank = {m: i + 1 for i, m in enumerate(s.prefix)}
            succs: list[tuple[PivotLabel, _LazyState]] = []
            for instr, q2 in by_state[s.state]:
                if instr.kind == "skip":
                    succs.append((PivotLabel("skip", instr),
                                  _LazyState(q2, s.value, s.lw, s.phi_e, s.phi_l, s.prefix)))
                elif instr.kind == "wr":
                    m = (instr.var, instr.val)
                    i = var_index[instr.var]
                    if m in prefix_rank:
                        phl = max(phi_l_max, prefix_rank[m])
                        succs.append((PivotLabel("write1", instr),
                                      _LazyState(q2, s.value, _replace(s.lw, i, instr.val),
                                                 s.phi_e, _replace(s.phi_l, i, phl), s.prefix)))
                    else:
                        # this write becomes the next pivot; a fresh provider
                        # takes over with the extended prefix
                        succs.append((PivotLabel("write2", instr),
                                      _LazyState(proc.q_init, adt.initial_value(),
                                                 (None,) * nvars, 0, (0,) * nvars,
                                                 s.prefix + (m,))))
                elif instr.kind == "rd":
                    m = (instr.var, instr.val)
                    i = var_index[instr.var]
                    if s.lw[i] == instr.val:
                        succs.append((PivotLabel("read1", instr),
                                      _LazyState(q2, s.value, s.lw, s.phi_e, s.phi_l, s.prefix)))
                    if instr.val == mem.d_init and s.lw[i] is None:
                        vr = min((r for mm, r in prefix_rank.items() if mm[0] == instr.var),
                                 default=None)
                        if vr is None or vr > s.phi_e:
                            succs.append((PivotLabel("read2", instr),
                                          _LazyState(q2, s.value, s.lw, s.phi_e, s.phi_l,
                                                     s.prefix)))
                    if m in prefix_rank:
                        phe = max(s.phi_e, s.phi_l[i], prefix_rank[m])
                        succs.append((PivotLabel("read3", instr),
                                      _LazyState(q2, s.value, s.lw, phe, s.phi_l, s.prefix)))
                elif instr.kind == "mf":
                    succs.append((PivotLabel("fence", instr),
                                  _LazyState(q2, s.value, s.lw,
                                             max(s.phi_e, phi_l_max), s.phi_l, s.prefix)))
                elif instr.kind == "op":
                    for v2 in sorted(step_unchecked(adt, s.value, instr.op), key=repr):
                        succs.append((PivotLabel("op", instr),
                                      _LazyState(q2, v2, s.lw, s.phi_e, s.phi_l, s.prefix)))
            for label, s2 in succs:
                if s2 in parents:
                    continue
                if value_bound is not None and value_size(adt, s2.value) > value_bound:
                    pruned = True
                    continue
                parents[s2] = (s, label)
                explored += 1
                if s2.state == proc.q_final:
                    return finish(REACHABLE, witness=witness_for(s2))
                if explored >= budget:
                    return finish(INCONCLUSIVE, closed=False)
                next_frontier.append(s2)
        frontier = next_frontier
    if pruned:
        return finish(INCONCLUSIVE, closed=False)
    return finish(UNREACHABLE)


def differentiated_words(messages: tuple[Message, ...], max_len: int | None = None):
    """All differentiated words over the messages, shortest first, each
    length block in lexicographic order."""
    import itertools

    msgs = sorted(messages)
    top = len(msgs) if max_len is None else min(max_len, len(msgs))
    for length in range(top + 1):
        yield from itertools.permutations(msgs, length)


def pivot_reach_enumerated(
    proc: ProcessDescription,
    mem: MemorySpec,
    adt: AdtSpec,
    value_bound: int | None = None,
    budget: int = 2_000_000,
) -> Verdict:
    """Reference engine: one explicit search per update sequence."""
    t0 = time.monotonic()
    explored = 0
    iterations = 0
    pruned = False
    for omega in differentiated_words(mem.messages()):
        iterations += 1
        v0 = initial_view(proc, mem, adt, omega, 1)
        parents: dict = {v0: None}
        frontier = [v0]
        if proc.q_final == v0.state:
            return Verdict(REACHABLE, witness=(format_omega(omega),),
                           stats=Stats(explored, iterations, 0))
        while frontier:
            next_frontier = []
            for view in frontier:
                for label, v2 in pivot_step(view, proc, mem, adt):
                    if v2 in parents:
                        continue
                    if value_bound is not None and value_size(adt, v2.value) > value_bound:
                        pruned = True
                        continue
                    parents[v2] = (view, label)
                    explored += 1
                    if explored >= budget:
                        return Verdict(INCONCLUSIVE,
                                       stats=Stats(explored, iterations, 0), closed=False)
                    if v2.state == proc.q_final:
                        labels = []
                        k = v2
                        while parents[k] is not None:
                            k, lab = parents[k]
                            labels.append(lab)
                        labels.reverse()
                        millis = int((time.monotonic() - t0) * 1000)
                        return Verdict(REACHABLE,
                                       witness=(format_omega(omega),)
                                       + tuple(str(l) for l in labels),
                                       stats=Stats(explored, iterations, millis))
                    next_frontier.append(v2)
            frontier = next_frontier
    millis = int((time.monotonic() - t0) * 1000)
    if pruned:
        return Verdict(INCONCLUSIVE, stats=Stats(explored, iterations, millis),
                       closed=False)
    return Verdict(UNREACHABLE, stats=Stats(explored, iterations, millis))


def parse_pivot_witness(witness: tuple[str, ...]):
    """Split a pivot witness into (omega, [(rule, instruction)])."""
    from .dsl import parse_instruction

    omega = parse_omega(witness[0])
    steps = []
    for line in witness[1:]:
        rule, instr_text = line.split(":", 1)
        steps.append((rule.strip(), parse_instruction(instr_text.strip(), 0)))
    return omega, steps


def replay_pivot(
    proc: ProcessDescription,
    mem: MemorySpec,
    adt: AdtSpec,
    witness: tuple[str, ...],
    require_final: str | None = None,
) -> View:
    """Replay a pivot witness under pivot_step with its full omega.

    Backtracks over successors sharing the same rule and instruction (two
    process transitions may carry identical instructions); with
    require_final set, only completions ending in that state count.
    """
    omega, steps = parse_pivot_witness(witness)
    init = initial_view(proc, mem, adt, omega, 1)
    stack = [(init, 0)]
    while stack:
        view, i = stack.pop()
        if i == len(steps):
            if require_final is None or view.state == require_final:
                return view
            continue
        rule, instr = steps[i]
        for lab, v2 in reversed(pivot_step(view, proc, mem, adt)):
            if lab.rule == rule and lab.instr == instr:
                stack.append((v2, i + 1))
    raise PivotError("witness does not replay under pivot_step")
