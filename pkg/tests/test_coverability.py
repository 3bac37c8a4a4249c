from tsoreach.coverability import backward_reach


def _counter_system(target_value, initial=0):
    """Plain counter with inc/dec as a backward-reachability instance."""

    def preds(v):
        out = [("inc", max(v - 1, 0))]
        out.append(("dec", v + 1))
        return out

    return dict(
        targets=[target_value],
        preds=preds,
        leq=lambda a, b: a <= b,
        covers_initial=lambda v: v <= initial,
    )


def test_counter_coverable_and_chain_order():
    res = backward_reach(**_counter_system(3), record_history=True)
    assert res.coverable
    # chain fires forward from the initial value up to the target basis
    assert list(res.chain) == ["inc", "inc", "inc"]
    for basis in res.history:
        assert len(basis) == len(set(basis))
        assert all(
            not (a < b) for a in basis for b in basis if a != b
        )  # antichain: minimal element only


def test_target_already_covered():
    res = backward_reach(**_counter_system(0))
    assert res.coverable and res.chain == ()


def test_not_coverable_fixpoint():
    # a system whose only predecessor steps go upward never reaches 0
    def preds(v):
        return [("dec", v + 1)]

    res = backward_reach(
        targets=[2],
        preds=preds,
        leq=lambda a, b: a <= b,
        covers_initial=lambda v: v == 0,
        record_history=True,
    )
    assert not res.coverable
    # the basis stabilizes at the minimum
    assert res.history[-1] == [2]


def test_subsumption_prunes_dominated_elements():
    seen = []

    def preds(v):
        seen.append(v)
        return [("down", max(v - 1, 0))]

    res = backward_reach(
        targets=[5, 7],  # 7 is dominated once 5 arrives... already at start
        preds=preds,
        leq=lambda a, b: a <= b,
        covers_initial=lambda v: v == 0,
    )
    assert res.coverable
    assert 7 not in seen  # dominated target never expanded
