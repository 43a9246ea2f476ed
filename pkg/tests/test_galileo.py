import random

import pytest

from ftakit.galileo import GalileoError, parse, serialize
from ftakit.model import (
    OR,
    Exponential,
    FixedProbability,
    make_fault_tree,
    spare,
)

from oracles import random_mixed_tree


def test_parse_minimal_and():
    text = 'toplevel "T";\n"T" and "A" "B";\n"A" lambda=0.1 dorm=0;\n"B" lambda=0.2 dorm=0;\n'
    result = parse(text)
    ft = result.fault_tree
    assert ft.top == "T"
    assert ft.types["T"].kind == "and"
    assert ft.children_of("T") == ("A", "B")
    assert ft.distributions["A"] == Exponential(0.1, 0.0)
    assert result.be_order == ("A", "B")


def test_parse_vot_with_ordered_children():
    text = 'toplevel "G";\n"G" 2of3 "F" "C" "D";\n' + \
        "".join(f'"{n}" lambda=1.0;\n' for n in "FCD")
    ft = parse(text).fault_tree
    assert ft.types["G"].kind == "vot"
    assert ft.types["G"].k == 2
    assert ft.children_of("G") == ("F", "C", "D")


def test_missing_toplevel():
    with pytest.raises(GalileoError, match="missing toplevel"):
        parse('"T" and "A" "B";\n"A" lambda=1;\n"B" lambda=1;\n')


def test_undeclared_reference_position():
    text = 'toplevel "T";\n"T" and "A" "B";\n"A" lambda=1;\n'
    with pytest.raises(GalileoError, match=r"line 2.*undeclared.*B"):
        parse(text)


def test_duplicate_declaration():
    text = 'toplevel "T";\n"T" and "A";\n"A" lambda=1;\n"A" lambda=2;\n'
    with pytest.raises(GalileoError, match=r"line 4.*duplicate"):
        parse(text)


def test_syntax_error_position():
    with pytest.raises(GalileoError, match="line 2, column"):
        parse('toplevel "T";\n"T" frobnicate "A";\n"A" lambda=1;\n')


def test_missing_semicolon():
    with pytest.raises(GalileoError, match="';'"):
        parse('toplevel "T"\n"T" and "A";\n"A" lambda=1;\n')


def test_bad_attribute_values():
    with pytest.raises(GalileoError, match="rate must be positive"):
        parse('toplevel "b";\n"b" lambda=0;\n')
    with pytest.raises(GalileoError, match="dormancy"):
        parse('toplevel "b";\n"b" lambda=1 dorm=1.5;\n')
    with pytest.raises(GalileoError, match="k out of range"):
        parse('toplevel "g";\n"g" 0of2 "a" "b";\n"a" lambda=1;\n"b" lambda=1;\n')
    with pytest.raises(GalileoError, match="declares 3 children but lists 2"):
        parse('toplevel "g";\n"g" 2of3 "a" "b";\n"a" lambda=1;\n"b" lambda=1;\n')


def test_duplicate_toplevel():
    with pytest.raises(GalileoError, match="duplicate toplevel"):
        parse('toplevel "a";\ntoplevel "a";\n"a" lambda=1;\n')


def test_comments_and_blank_lines():
    text = """
// a comment
toplevel "T";   // trailing
"T" or "A" "B";
"A" lambda=1.0;
"B" prob=0.25;
"""
    ft = parse(text).fault_tree
    assert ft.distributions["B"] == FixedProbability(0.25)


def test_dormancy_defaults_to_active():
    ft = parse('toplevel "b";\n"b" lambda=2.0;\n').fault_tree
    assert ft.distributions["b"] == Exponential(2.0, 1.0)


def test_spare_variants_map_to_spare():
    text = 'toplevel "S";\n"S" csp "P" "Q";\n"P" lambda=1;\n"Q" lambda=1 dorm=0;\n'
    ft = parse(text).fault_tree
    assert ft.types["S"].kind == "spare"
    assert ft.types["S"].variant == "csp"


def test_fdep_and_pdep():
    text = ('toplevel "T";\n"T" and "A" "B";\n"D" fdep "A" "B";\n'
            '"E" pdep=0.5 "A" "B";\n"A" lambda=1;\n"B" lambda=1;\n')
    ft = parse(text).fault_tree
    assert ft.types["D"].kind == "pdep" and ft.types["D"].p == 1.0
    assert ft.types["E"].p == 0.5


def test_serialize_single_be():
    ft = make_fault_tree("b", {}, {"b": Exponential(0.5)})
    text = serialize(ft)
    assert text.splitlines() == ['toplevel "b";', '"b" lambda=0.5;']


def test_roundtrip_preserves_child_order(fig2_sft):
    again = parse(serialize(fig2_sft)).fault_tree
    assert again.children_of("G") == ("F", "C", "D")
    assert again == fig2_sft


def test_roundtrip_preserves_dormancy_exactly():
    ft = make_fault_tree(
        "S", {"S": (spare("wsp"), ["p", "q"])},
        {"p": Exponential(1.0), "q": Exponential(0.7, dormancy=0.123456789012345)},
    )
    again = parse(serialize(ft)).fault_tree
    assert again.distributions["q"].dormancy == 0.123456789012345
    # serialization is a fixpoint after one round
    assert serialize(again) == serialize(ft)


@pytest.mark.parametrize("seed", range(40))
def test_roundtrip_random_trees(seed):
    rng = random.Random(900 + seed)
    ft = random_mixed_tree(rng)
    again = parse(serialize(ft)).fault_tree
    assert again == ft


def test_roundtrip_fixed_probability():
    ft = make_fault_tree(
        "T", {"T": (OR, ["a", "b"])},
        {"a": Exponential(1.25), "b": FixedProbability(0.375)},
    )
    assert parse(serialize(ft)).fault_tree == ft
