import pytest

from tsoreach.dsl import (
    DslError,
    parse_adt_line,
    parse_automata,
    parse_coverability,
    parse_input,
    parse_machine,
    parse_program,
    print_adt,
    print_automata,
    print_coverability,
    print_program,
)

PROG = """\
# three lines of real content
memory vars x domain 0..1
adt trivial
process P
state q0 init
state q1
state qf target
trans q0 -> q1 : wr x 1
trans q1 -> qf : rd x 1
"""


def test_program_roundtrip():
    prog = parse_program(PROG)
    assert prog.proc.q_init == "q0" and prog.proc.q_final == "qf"
    assert parse_program(print_program(prog)) == prog


def test_undeclared_variable_is_named_in_the_error():
    bad = PROG.replace("wr x 1", "wr y 1")
    with pytest.raises(DslError, match="y"):
        parse_program(bad)


def test_unknown_op_for_the_declared_adt():
    bad = PROG.replace("adt trivial", "adt stack alphabet a,b").replace(
        "rd x 1", "op inc"
    )
    with pytest.raises(DslError, match="inc"):
        parse_program(bad)


def test_value_outside_domain():
    bad = PROG.replace("wr x 1", "wr x 7")
    with pytest.raises(DslError, match="7"):
        parse_program(bad)


def test_syntax_error_reports_line():
    bad = PROG + "trans q0 -> : wr x 1\n"
    with pytest.raises(DslError, match="line 10"):
        parse_program(bad)


def test_missing_init_or_target():
    with pytest.raises(DslError, match="init"):
        parse_program(PROG.replace("state q0 init", "state q0"))
    with pytest.raises(DslError, match="target"):
        parse_program(PROG.replace("state qf target", "state qf"))


def test_adt_lines():
    for line, kind in [
        ("trivial", "trivial"),
        ("counter", "counter"),
        ("weakcounter", "weak-counter"),
        ("weak-counter", "weak-counter"),
        ("stack alphabet a,b", "stack"),
        ("hostack level 2 alphabet a", "ho-stack"),
        ("hocounter level 3", "ho-counter"),
        ("howeakcounter level 2", "ho-weak-counter"),
        ("multistack count 2 alphabet a,b", "multi-stack"),
        ("petri places p,q transitions t: p -> q initial p", "petri"),
    ]:
        spec = parse_adt_line(line, 1)
        assert spec.kind == kind
        assert parse_adt_line(print_adt(spec)[len("adt "):], 1) == spec


def test_petri_line_details():
    spec = parse_adt_line(
        "petri places p,q transitions t: p,p -> q ; u: - -> p initial p,p", 1
    )
    assert spec.transitions[0].inputs == (("p", 2),)
    assert spec.transitions[1].inputs == ()
    assert spec.initial_marking == (("p", 2),)


def test_machine_roundtrip_and_zero_registers():
    text = """\
adt counter
machine M
registers bound 3
state a init
state b target
trans a -> b : op inc
"""
    rm = parse_machine(text)
    assert rm.registers == ()
    from tsoreach.dsl import print_machine

    assert parse_machine(print_machine(rm)) == rm


def test_machine_action_parsing():
    text = """\
adt trivial
machine M
registers r1,r2 bound 3
state a init
state b target
trans a -> b : cke r1 2
trans a -> b : set r1 r2
trans a -> b : ckge 1 r2
"""
    rm = parse_machine(text)
    kinds = [act.kind for _, act, _ in rm.delta]
    assert kinds == ["cke", "set", "ckge"]
    assert rm.delta[0][1].y == 2
    assert rm.delta[2][1].x == 1


def test_parse_input_sniffs_sections():
    assert parse_input(PROG).__class__.__name__ == "Program"
    mtext = "adt trivial\nmachine M\nregisters bound 1\nstate a init target\n"
    assert parse_input(mtext).name == "M"
    with pytest.raises(DslError):
        parse_input("adt trivial\n")


def test_automata_roundtrip():
    text = """\
pda K alphabet a,b stack A,Z
state s init
state f accept
trans s a [-/Z,A] -> s
trans s b [A/-] -> f
fsa F alphabet a,b
state u init accept
trans u a -> u
"""
    pdas, fsas = parse_automata(text)
    assert len(pdas) == 1 and len(fsas) == 1
    assert pdas[0].transitions[0][2] is None
    assert pdas[0].transitions[0][4] == ("Z", "A")
    assert pdas[0].transitions[1][4] == ()
    again = parse_automata(print_automata(pdas, fsas))
    assert again == (pdas, fsas)


def test_coverability_roundtrip():
    text = """\
adt petri places p,q transitions t: p -> q initial p
cover q,q
"""
    inst = parse_coverability(text)
    assert inst.target == (("q", 2),)
    assert parse_coverability(print_coverability(inst)) == inst


def test_comments_and_blank_lines_ignored():
    prog = parse_program("# header\n\n" + PROG + "\n# trailing\n")
    assert prog == parse_program(PROG)
