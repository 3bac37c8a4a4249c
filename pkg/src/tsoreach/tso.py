"""Concrete TSO operational semantics for n identical processes.

Each process owns a FIFO store buffer: writes enqueue on the left, memory
updates dequeue on the right.  Reads consult the buffer first (most recent
pending write on the variable) and fall back to memory.  This module is a
bounded-exploration oracle: it can only find witnesses or report
not-found-within-bounds, never prove unreachability.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .adt import AdtOp, AdtSpec, AdtValue, step_unchecked, value_size
from .model import MemorySpec, Message, ProcessDescription
from .verdict import INCONCLUSIVE, REACHABLE, Stats, Verdict


@dataclass(frozen=True)
class TsoConfiguration:
    """Per-process states, data values and buffers, plus the shared memory."""

    states: tuple[str, ...]
    values: tuple[AdtValue, ...]
    buffers: tuple[tuple[Message, ...], ...]
    memory: tuple[int, ...]  # aligned with MemorySpec.variables

    @property
    def n(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class TsoLabel:
    """An annotated step: which process did what."""

    proc: int
    kind: str  # rd | wr | skip | mf | op | upd
    var: str | None = None
    val: int | None = None
    op: AdtOp | None = None

    def __str__(self) -> str:
        if self.kind in ("rd", "wr", "upd"):
            return f"{self.proc}: {self.kind} {self.var} {self.val}"
        if self.kind == "op":
            return f"{self.proc}: op {self.op}"
        return f"{self.proc}: {self.kind}"


def initial_configuration(
    proc: ProcessDescription, mem: MemorySpec, adt: AdtSpec, n: int
) -> TsoConfiguration:
    return TsoConfiguration(
        states=(proc.q_init,) * n,
        values=(adt.initial_value(),) * n,
        buffers=((),) * n,
        memory=(mem.d_init,) * len(mem.variables),
    )


def lval(buffer: tuple[Message, ...], x: str) -> int | None:
    """Value of the most recently enqueued pending message on x, if any."""
    for var, val in buffer:  # leftmost entry is the newest
        if var == x:
            return val
    return None


def rval(buffer: tuple[Message, ...], memory_value: int, x: str) -> int:
    """Buffer value if pending, else the memory value."""
    v = lval(buffer, x)
    return memory_value if v is None else v


def _replace(t: tuple, i: int, v) -> tuple:
    return t[:i] + (v,) + t[i + 1 :]


def tso_step(
    cfg: TsoConfiguration,
    proc: ProcessDescription,
    mem: MemorySpec,
    adt: AdtSpec,
) -> list[tuple[TsoLabel, TsoConfiguration]]:
    """All successors under the six rule families."""
    var_index = {x: i for i, x in enumerate(mem.variables)}
    out: list[tuple[TsoLabel, TsoConfiguration]] = []
    for i in range(cfg.n):
        buf = cfg.buffers[i]
        for q, instr, q2 in proc.delta:
            if q != cfg.states[i]:
                continue
            if instr.kind == "skip":
                out.append(
                    (TsoLabel(i, "skip"), TsoConfiguration(
                        _replace(cfg.states, i, q2), cfg.values, cfg.buffers, cfg.memory))
                )
            elif instr.kind == "wr":
                nb = ((instr.var, instr.val),) + buf
                out.append(
                    (TsoLabel(i, "wr", instr.var, instr.val), TsoConfiguration(
                        _replace(cfg.states, i, q2), cfg.values,
                        _replace(cfg.buffers, i, nb), cfg.memory))
                )
            elif instr.kind == "rd":
                if rval(buf, cfg.memory[var_index[instr.var]], instr.var) == instr.val:
                    out.append(
                        (TsoLabel(i, "rd", instr.var, instr.val), TsoConfiguration(
                            _replace(cfg.states, i, q2), cfg.values, cfg.buffers, cfg.memory))
                    )
            elif instr.kind == "mf":
                if not buf:
                    out.append(
                        (TsoLabel(i, "mf"), TsoConfiguration(
                            _replace(cfg.states, i, q2), cfg.values, cfg.buffers, cfg.memory))
                    )
            elif instr.kind == "op":
                for v2 in sorted(step_unchecked(adt, cfg.values[i], instr.op), key=repr):
                    out.append(
                        (TsoLabel(i, "op", op=instr.op), TsoConfiguration(
                            _replace(cfg.states, i, q2),
                            _replace(cfg.values, i, v2), cfg.buffers, cfg.memory))
                    )
        if buf:
            # memory update: dequeue the oldest message, write it to memory
            x, d = buf[-1]
            out.append(
                (TsoLabel(i, "upd", x, d), TsoConfiguration(
                    cfg.states, cfg.values,
                    _replace(cfg.buffers, i, buf[:-1]),
                    _replace(cfg.memory, var_index[x], d)))
            )
    return out


@dataclass(frozen=True)
class OracleBounds:
    n_max: int = 3
    step_max: int = 12
    buffer_max: int = 4
    adt_size_max: int = 6

    def __post_init__(self) -> None:
        if min(self.n_max, self.step_max, self.buffer_max) < 1 or self.adt_size_max < 0:
            raise ValueError("oracle bounds must be positive")


def _canonical_key(cfg: TsoConfiguration):
    # processes share one description, so configurations equal up to index
    # permutation are interchangeable
    triples = sorted(
        zip(cfg.states, map(repr, cfg.values), cfg.buffers)
    )
    return (tuple(triples), cfg.memory)


def bounded_reach(
    proc: ProcessDescription,
    mem: MemorySpec,
    adt: AdtSpec,
    bounds: OracleBounds = OracleBounds(),
) -> Verdict:
    """Breadth-first search of the concrete semantics within the bounds.

    The verdict is reachable-with-witness or inconclusive; it never claims
    unreachability because the bounds truncate the space.
    """
    t0 = time.monotonic()
    explored = 0
    for n in range(1, bounds.n_max + 1):
        init = initial_configuration(proc, mem, adt, n)
        if proc.q_final in init.states:
            return Verdict(
                REACHABLE, witness=(),
                stats=Stats(explored, n, int((time.monotonic() - t0) * 1000)),
                closed=False,
            )
        key0 = _canonical_key(init)
        parents: dict = {key0: None}
        frontier = [(init, key0)]
        for _depth in range(bounds.step_max):
            next_frontier = []
            for cfg, key in frontier:
                for label, succ in tso_step(cfg, proc, mem, adt):
                    if any(len(b) > bounds.buffer_max for b in succ.buffers):
                        continue
                    if any(value_size(adt, v) > bounds.adt_size_max for v in succ.values):
                        continue
                    skey = _canonical_key(succ)
                    if skey in parents:
                        continue
                    parents[skey] = (key, label)
                    explored += 1
                    if proc.q_final in succ.states:
                        labels = []
                        k = skey
                        while parents[k] is not None:
                            k, lab = parents[k]
                            labels.append(lab)
                        labels.reverse()
                        return Verdict(
                            REACHABLE,
                            witness=tuple(str(l) for l in labels),
                            stats=Stats(explored, n, int((time.monotonic() - t0) * 1000)),
                            closed=False,
                        )
                    next_frontier.append((succ, skey))
            frontier = next_frontier
            if not frontier:
                break
    return Verdict(
        INCONCLUSIVE,
        stats=Stats(explored, bounds.n_max, int((time.monotonic() - t0) * 1000)),
        closed=False,
    )


def parse_tso_label(text: str) -> TsoLabel:
    head, rest = text.split(":", 1)
    proc = int(head.strip())
    toks = rest.split()
    if toks[0] in ("rd", "wr", "upd"):
        return TsoLabel(proc, toks[0], toks[1], int(toks[2]))
    if toks[0] == "op":
        arg: str | int | None = None
        if len(toks) == 3:
            arg = int(toks[2]) if toks[2].isdigit() else toks[2]
        return TsoLabel(proc, "op", op=AdtOp(toks[1], arg))
    return TsoLabel(proc, toks[0])


def replay_tso(
    proc: ProcessDescription,
    mem: MemorySpec,
    adt: AdtSpec,
    n: int,
    labels,
    require_final: str | None = None,
) -> TsoConfiguration:
    """Replay a witness under tso_step; raises ValueError on a dead step.

    A label does not pin down the target state when two transitions carry
    the same instruction, so the replay backtracks over the matching
    successors; with require_final set, only completions where some
    process sits in that state are accepted.
    """
    parsed = [parse_tso_label(l) if isinstance(l, str) else l for l in labels]
    init = initial_configuration(proc, mem, adt, n)
    stack = [(init, 0)]
    while stack:
        cfg, i = stack.pop()
        if i == len(parsed):
            if require_final is None or require_final in cfg.states:
                return cfg
            continue
        for lab, c2 in reversed(tso_step(cfg, proc, mem, adt)):
            if lab == parsed[i]:
                stack.append((c2, i + 1))
    raise ValueError("witness does not replay under tso_step")
