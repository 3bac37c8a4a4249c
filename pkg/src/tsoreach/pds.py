"""Pushdown systems and pre*-saturation reachability.

Configurations are (control, stack word) with the topmost symbol leftmost.
The target set "control in T, any stack" is represented by a small finite
automaton; saturation adds an automaton transition for every way a rule can
reach an accepted configuration, so acceptance of the initial configuration
decides reachability.  Each added transition remembers the rule and the
automaton path that justified it, which lets us unwind an actual run.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass


@dataclass(frozen=True)
class PdsRule:
    """(p, gamma) -> (p2, push); push has length at most 2 after normalization."""

    p: object
    gamma: str
    p2: object
    push: tuple[str, ...]
    tag: object = None  # carried into witnesses; None steps are internal


@dataclass(frozen=True)
class PushdownSystem:
    controls: tuple
    alphabet: tuple[str, ...]  # includes the bottom marker
    rules: tuple[PdsRule, ...]

    def __post_init__(self) -> None:
        declared = set(self.controls)
        for r in self.rules:
            if r.p not in declared or r.p2 not in declared:
                raise ValueError(f"rule uses undeclared control: {r}")
            if r.gamma not in self.alphabet or any(
                g not in self.alphabet for g in r.push
            ):
                raise ValueError(f"rule uses undeclared symbol: {r}")
            if len(r.push) > 2:
                raise ValueError("normalize rules to |push| <= 2 first")


def _saturate(pds: PushdownSystem, targets):
    """Saturate the target automaton; returns (transitions, provenance, order).

    Automaton states are the controls plus one accepting sink; a transition
    is (state, symbol, state).  The initial automaton accepts every stack
    word from every target control (the sink loops over the full alphabet
    and target controls are accepting, covering the empty stack).
    provenance maps a saturation-added transition to (rule, path) where
    path lists the transitions that matched the rule's push word.
    """
    any_state = ("__any__",)

    trans: set = set()
    order: dict = {}
    prov: dict = {}

    def add(t, why=None) -> bool:
        if t in trans:
            return False
        trans.add(t)
        order[t] = len(order)
        if why is not None:
            prov[t] = why
        return True

    for p_t in targets:
        for g in pds.alphabet:
            add((p_t, g, any_state))
    for g in pds.alphabet:
        add((any_state, g, any_state))

    by_source: dict = {}

    def index(t):
        by_source.setdefault((t[0], t[1]), []).append(t)

    for t in sorted(trans, key=repr):
        index(t)

    rules = sorted(pds.rules, key=repr)
    changed = True
    while changed:
        changed = False
        for rule in rules:
            if len(rule.push) == 0:
                t = (rule.p, rule.gamma, rule.p2)
                if add(t, (rule, ())):
                    index(t)
                    changed = True
            elif len(rule.push) == 1:
                for t1 in list(by_source.get((rule.p2, rule.push[0]), [])):
                    t = (rule.p, rule.gamma, t1[2])
                    if add(t, (rule, (t1,))):
                        index(t)
                        changed = True
            else:
                for t1 in list(by_source.get((rule.p2, rule.push[0]), [])):
                    for t2 in list(by_source.get((t1[2], rule.push[1]), [])):
                        t = (rule.p, rule.gamma, t2[2])
                        if add(t, (rule, (t1, t2))):
                            index(t)
                            changed = True
    return trans, prov, order, by_source, any_state


@dataclass
class PreStarResult:
    pds: PushdownSystem
    targets: tuple
    transitions: set
    provenance: dict
    order: dict
    by_source: dict
    sink: object

    def _accepting_path(self, control, word):
        """One accepting run of the automaton on (control, word), or None.

        Target controls are accepting themselves, so a target with an empty
        stack counts as reached (control-state reachability ignores the
        stack entirely).
        """
        final = set(self.targets) | {self.sink}
        start = (control, 0)
        parents = {start: None}
        queue = deque([start])
        while queue:
            state, i = queue.popleft()
            if i == len(word):
                if state in final:
                    path = []
                    k = (state, i)
                    while parents[k] is not None:
                        k, t = parents[k]
                        path.append(t)
                    path.reverse()
                    return path
                continue
            for t in self.by_source.get((state, word[i]), []):
                nxt = (t[2], i + 1)
                if nxt not in parents:
                    parents[nxt] = ((state, i), t)
                    queue.append(nxt)
        return None

    def accepts(self, control, word) -> bool:
        return self._accepting_path(control, word) is not None

    def witness(self, control, word):
        """A tag sequence driving (control, word) into the target set.

        Each unwinding step rewrites the configuration with the rule that
        justified the first transition of the accepting path; recorded
        paths only mention transitions added earlier, so this terminates.
        """
        target_set = set(self.targets)
        path = self._accepting_path(control, word)
        if path is None:
            raise ValueError("configuration not accepted")
        tags = []
        config = (control, tuple(word))
        while True:
            p, w = config
            if p in target_set:
                return tags
            first = path[0]
            why = self.provenance.get(first)
            if why is None:
                # initial automaton transition from a non-target control
                raise AssertionError("dangling provenance")
            rule, subpath = why
            if rule.tag is not None:
                tags.append(rule.tag)
            config = (rule.p2, rule.push + w[1:])
            path = list(subpath) + path[1:]


def pre_star(pds: PushdownSystem, targets) -> PreStarResult:
    """Saturate backwards from { <p, w> : p in targets, any w }."""
    trans, prov, order, by_source, sink = _saturate(pds, tuple(targets))
    return PreStarResult(
        pds=pds,
        targets=tuple(targets),
        transitions=trans,
        provenance=prov,
        order=order,
        by_source=by_source,
        sink=sink,
    )
