"""Generic backward reachability over a well-quasi-ordered state space.

Works on upward-closed sets represented by finite antichain bases.
Starting from the target basis, minimal predecessors are added with
subsumption until either an element below some initial configuration
appears (coverable, with a provenance chain for witness replay) or the
basis stabilizes (not coverable; termination is guaranteed by the WQO).

Callers can hand in a bucket key under which comparable elements always
share a bucket (e.g. the control location of a product state); both the
subsumption test and dominated-element removal then stay within one
bucket.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field


@dataclass
class BackwardResult:
    coverable: bool
    # labels from an initial-covering element forward to the target basis
    chain: tuple = ()
    iterations: int = 0
    explored: int = 0
    # the search gave up on its budget before stabilizing
    exhausted: bool = False
    # antichain snapshot after every iteration, when recording is on
    history: list = field(default_factory=list)


def backward_reach(
    targets,
    preds,
    leq,
    covers_initial,
    record_history: bool = False,
    max_explored: int | None = None,
    bucket_key=None,
) -> BackwardResult:
    """Saturate min-pre* of the upward closure of the targets.

    targets          iterable of basis elements
    preds(e)         iterable of (label, e') with up(e') minimal predecessors
                     of up(e) under the transition labelled label
    leq(a, b)        the well-quasi-ordering
    covers_initial(e) whether some initial configuration lies in up(e)
    bucket_key(e)    optional; elements with different keys must be
                     incomparable under leq
    """
    key = bucket_key if bucket_key is not None else (lambda e: None)
    buckets: dict = {}
    members: set = set()
    prov: dict = {}

    def insert(e, why) -> bool:
        bucket = buckets.setdefault(key(e), [])
        if any(leq(b, e) for b in bucket):
            return False
        for b in bucket:
            if leq(e, b):
                members.discard(b)
        bucket[:] = [b for b in bucket if b in members]
        bucket.append(e)
        members.add(e)
        if e not in prov:
            prov[e] = why
        return True

    result = BackwardResult(coverable=False)

    def chain_for(e):
        labels = []
        k = e
        while prov[k] is not None:
            label, k = prov[k]
            labels.append(label)
        return tuple(labels)

    def snapshot():
        return sorted((e for b in buckets.values() for e in b), key=repr)

    worklist = deque()
    for e in sorted(set(targets), key=repr):
        if insert(e, None):
            worklist.append(e)
            if covers_initial(e):
                result.coverable = True
                result.chain = chain_for(e)
                if record_history:
                    result.history.append(snapshot())
                return result
    if record_history:
        result.history.append(snapshot())

    while worklist:
        e = worklist.popleft()
        result.iterations += 1
        if max_explored is not None and result.explored > max_explored:
            result.exhausted = True
            return result
        if e not in members:  # subsumed since it was queued
            continue
        for label, e2 in sorted(preds(e), key=repr):
            result.explored += 1
            if insert(e2, (label, e)):
                if covers_initial(e2):
                    result.coverable = True
                    result.chain = chain_for(e2)
                    if record_history:
                        result.history.append(snapshot())
                    return result
                worklist.append(e2)
        if record_history:
            result.history.append(snapshot())
    return result
