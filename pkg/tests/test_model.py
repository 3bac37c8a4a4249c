import random

import pytest

from helpers import rm_reachable_brute
from tsoreach.adt import AdtOp, AdtSpec, trivial_spec
from tsoreach.dsl import parse_machine, print_machine
from tsoreach.gen import random_machine
from tsoreach.model import (
    MemorySpec,
    ModelError,
    RegisterAction,
    RegisterMachine,
    RmConfiguration,
    lower_tier2_to_tier1,
    lower_tier3_to_tier2,
    read,
    replay_rm,
    rm_step,
    skp,
    write,
)


def mk(states, delta, regs=("r",), bound=2, adt=None, target=None):
    return RegisterMachine(
        name="m",
        states=tuple(states),
        q_init=states[0],
        q_target=target or states[-1],
        registers=tuple(regs),
        bound=bound,
        adt=adt or trivial_spec(),
        delta=tuple(delta),
    )


def test_rm_step_write_and_read():
    rm = mk(["q0", "q1"], [("q0", write("r", 2), "q1")])
    c = rm.initial_configuration()
    [(label, c2)] = rm_step(rm, c)
    assert c2 == RmConfiguration("q1", (2,), ())

    rm2 = mk(["q0", "q1"], [("q0", read("r", 1), "q1")])
    assert rm_step(rm2, rm2.initial_configuration()) == []


def test_rm_step_comparisons():
    rm = mk(
        ["q0", "q1"],
        [("q0", RegisterAction("cke", "r1", "r2"), "q1")],
        regs=("r1", "r2"),
        bound=3,
    )
    c = RmConfiguration("q0", (3, 3), ())
    [(label, c2)] = rm_step(rm, c)
    assert c2.state == "q1" and c2.regs == (3, 3)
    assert rm_step(rm, RmConfiguration("q0", (3, 2), ())) == []


def test_rm_step_only_write_changes_registers():
    rng = random.Random(3)
    for _ in range(40):
        rm = random_machine(rng, n_states=4, n_regs=2, bound=2, tier=3)
        c = rm.initial_configuration()
        for _ in range(6):
            succs = rm_step(rm, c)
            if not succs:
                break
            label, c2 = succs[rng.randrange(len(succs))]
            act = label[1]
            if isinstance(act, AdtOp) or act.kind in ("skp", "read", "ckz",
                                                      "cke", "ckne", "ckl",
                                                      "ckg", "ckle", "ckge"):
                assert c2.regs == c.regs
            elif act.kind in ("write", "set"):
                diff = [i for i in range(len(c.regs)) if c.regs[i] != c2.regs[i]]
                assert len(diff) <= 1
            c = c2


def test_inc_blocks_at_ceiling_and_dec_at_zero():
    rm = mk(["q0", "q1"], [("q0", RegisterAction("inc", "r"), "q1")], bound=1)
    c = RmConfiguration("q0", (1,), ())
    assert rm_step(rm, c) == []
    rm2 = mk(["q0", "q1"], [("q0", RegisterAction("dec", "r"), "q1")], bound=1)
    assert rm_step(rm2, rm2.initial_configuration()) == []


def test_validation_rejects_bad_models():
    with pytest.raises(ModelError):
        mk(["q0"], [("q0", skp(), "nope")])
    with pytest.raises(ModelError):
        mk(["q0", "q1"], [("q0", write("bad", 1), "q1")])
    with pytest.raises(ModelError):
        mk(["q0", "q1"], [("q0", write("r", 9), "q1")], bound=2)
    with pytest.raises(ModelError):
        MemorySpec(variables=("x", "x"), d_max=1)


def test_tier_scan():
    rm = mk(["q0", "q1"], [("q0", RegisterAction("cke", "r", 1), "q1")])
    assert rm.tier() == 3
    assert lower_tier3_to_tier2(rm).tier() <= 2
    assert lower_tier2_to_tier1(lower_tier3_to_tier2(rm)).tier() == 1


def test_lower_tier2_examples():
    # ckz becomes a single read of zero
    rm = mk(["q0", "q1"], [("q0", RegisterAction("ckz", "r"), "q1")])
    low = lower_tier2_to_tier1(rm)
    assert low.delta == (("q0", read("r", 0), "q1"),)
    # inc at the ceiling has no enabled expansion
    rm2 = mk(["q0", "q1"], [("q0", RegisterAction("inc", "r"), "q1")], bound=1)
    low2 = lower_tier2_to_tier1(rm2)
    c = RmConfiguration("q0", (1,), ())
    assert all(c2.state != "q1" for _, c2 in rm_step(low2, c))


def test_lower_tier3_requires_tier2_input_for_stage_two():
    rm = mk(["q0", "q1"], [("q0", RegisterAction("set", "r", 1), "q1")])
    with pytest.raises(ModelError):
        lower_tier2_to_tier1(rm)


def test_lowering_identity_on_low_tiers():
    rm = mk(["q0", "q1"], [("q0", write("r", 1), "q1")])
    assert lower_tier3_to_tier2(rm) is rm


def test_set_literal_reaches_value():
    rm = mk(["q0", "q1"], [("q0", RegisterAction("set", "r", 3), "q1")], bound=5)
    low = lower_tier3_to_tier2(rm)
    assert low.tier() <= 2
    # explicit search: q1 reachable with r == 3
    frontier = [low.initial_configuration()]
    seen = set(frontier)
    hit = False
    while frontier:
        nxt = []
        for c in frontier:
            for _, c2 in rm_step(low, c):
                if c2 not in seen:
                    seen.add(c2)
                    nxt.append(c2)
                    if c2.state == "q1":
                        assert c2.regs[low.register_index("r")] == 3
                        hit = True
        frontier = nxt
    assert hit


def test_cke_gadget_equivalence():
    # q_target reachable iff regs equal at the comparison point
    for v1, v2, expected in [(2, 2, True), (2, 1, False), (0, 0, True)]:
        rm = RegisterMachine(
            "m", ("q0", "a", "b", "qt"), "q0", "qt", ("r1", "r2"), 3, trivial_spec(),
            (
                ("q0", write("r1", v1), "a"),
                ("a", write("r2", v2), "b"),
                ("b", RegisterAction("cke", "r1", "r2"), "qt"),
            ),
        )
        low = lower_tier3_to_tier2(rm)
        assert rm_reachable_brute(low) == expected
        assert rm_reachable_brute(rm) == expected


@pytest.mark.parametrize("seed", range(12))
def test_lowering_preserves_reachability_randomized(seed):
    rng = random.Random(seed)
    rm = random_machine(rng, n_states=4, n_regs=2, bound=3, tier=3)
    expected = rm_reachable_brute(rm)
    low2 = lower_tier3_to_tier2(rm)
    assert rm_reachable_brute(low2) == expected
    low1 = lower_tier2_to_tier1(low2)
    assert rm_reachable_brute(low1) == expected
    # syntactic scan: only permitted tiers remain
    assert low2.tier() <= 2 and low1.tier() == 1


@pytest.mark.parametrize("seed", range(8))
def test_lowering_preserves_reachable_register_sets(seed):
    # random tier-II machines: identical reachable (q, regs) projections
    rng = random.Random(100 + seed)
    rm = random_machine(rng, n_states=4, n_regs=2, bound=2, tier=2)
    low = lower_tier2_to_tier1(rm)

    def reachable_pairs(m):
        seen = {m.initial_configuration()}
        frontier = list(seen)
        while frontier:
            nxt = []
            for c in frontier:
                for _, c2 in rm_step(m, c):
                    if c2 not in seen:
                        seen.add(c2)
                        nxt.append(c2)
            frontier = nxt
        return {(c.state, c.regs[: len(rm.registers)]) for c in seen
                if c.state in m.states and c.state in rm.states}

    assert reachable_pairs(rm) == reachable_pairs(low)


def test_replay_rm_rejects_disabled_steps():
    rm = mk(["q0", "q1"], [("q0", read("r", 1), "q1")])
    with pytest.raises(ModelError):
        replay_rm(rm, [rm.delta[0]])


@pytest.mark.parametrize("seed", range(6))
def test_machine_print_parse_roundtrip(seed):
    rng = random.Random(seed)
    adt = rng.choice([None, AdtSpec(kind="counter"),
                      AdtSpec(kind="stack", alphabet=("a", "b"))])
    rm = random_machine(rng, n_states=4, n_regs=2, bound=2, tier=3,
                        adt=adt, op_weight=30 if adt else 0)
    text = print_machine(rm)
    rm2 = parse_machine(text)
    assert rm2 == rm
    assert print_machine(rm2) == text
