import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbforge import codec
from pbforge.blocks import BlockSystem, verify
from pbforge.codec import (
    ALPHABET_T5X,
    ALPHABET_T6C,
    LetterAlphabet,
    bounds_csv,
    default_fixtures_dir,
    emit_letters,
    extras_used,
    iter_fixtures,
    load_fixture,
    parse_int_blocks,
    parse_letters,
    read_json,
    write_json,
)


def test_alphabet_presets():
    assert ALPHABET_T5X.letters["A"] == frozenset({0, 1})
    assert ALPHABET_T5X.letters["E"] == frozenset({0, 4})
    assert ALPHABET_T5X.letters["J"] == frozenset({0, 3})
    assert sorted(ALPHABET_T5X.letters) == list("ABCDEFGHIJ")
    assert ALPHABET_T6C.letters["E"] == frozenset({4, 5})
    assert ALPHABET_T6C.letters["F"] == frozenset({0, 5})
    assert sorted(ALPHABET_T6C.letters) == list("ABCDEF")


def test_alphabet_rejects_bad_letters():
    with pytest.raises(ValueError, match="2-element"):
        LetterAlphabet("bad", {"A": frozenset({0})})
    with pytest.raises(ValueError, match="duplicates"):
        LetterAlphabet("bad", {"A": frozenset({0, 1}), "B": frozenset({1, 0})})


def test_parse_letters_table1_q5():
    system = parse_letters("A D B E C", ALPHABET_T5X, 5)
    assert system.blocks == (
        frozenset({0, 1}), frozenset({3, 4}), frozenset({1, 2}),
        frozenset({0, 4}), frozenset({2, 3}),
    )


def test_parse_letters_q13_sequence():
    system = parse_letters("C F C F C F C A D A E B E", ALPHABET_T6C, 13)
    assert len(system.blocks) == 13
    assert system.blocks[10] == frozenset({4, 5})  # E
    assert verify(system).ok


def test_parse_letters_errors_name_position():
    with pytest.raises(ValueError, match="unknown letter Z at position 1"):
        parse_letters("A Z", ALPHABET_T5X, 2)
    with pytest.raises(ValueError, match="expected 5 letter tokens, got 3"):
        parse_letters("A B C", ALPHABET_T5X, 5)
    with pytest.raises(ValueError, match="position 0"):
        parse_letters("C A", ALPHABET_T5X, 2)  # C = {2,3} out of range for q=2


def test_emit_letters():
    system = parse_letters("A D B E C", ALPHABET_T5X, 5)
    assert emit_letters(system, ALPHABET_T5X) == "A D B E C"

    gsys = BlockSystem.from_blocks(5, [[0, 2], [0, 1], [1, 2], [2, 3], [3, 4]])
    assert emit_letters(gsys, ALPHABET_T5X).startswith("G ")

    bad = BlockSystem.from_blocks(13, [[0, 3]] + [[0, 1]] * 12)
    with pytest.raises(ValueError, match="block 0"):
        emit_letters(bad, ALPHABET_T6C)


@settings(max_examples=60)
@given(st.lists(st.sampled_from([" ", "  ", "\t", "\n", " \n "]), min_size=4, max_size=4))
def test_parse_letters_whitespace_invariant(gaps):
    letters = ["A", "D", "B", "E", "C"]
    text = letters[0] + "".join(g + x for g, x in zip(gaps, letters[1:]))
    assert parse_letters(text, ALPHABET_T5X, 5).blocks == parse_letters(
        "A D B E C", ALPHABET_T5X, 5
    ).blocks


def test_round_trip_all_letter_fixtures():
    for fx in iter_fixtures():
        if fx.table not in (1, 2):
            continue
        system = parse_letters(fx.body, ALPHABET_T5X, fx.q)
        assert parse_letters(emit_letters(system, ALPHABET_T5X), ALPHABET_T5X, fx.q).blocks == system.blocks


def test_extras_recomputable_per_fixture_row():
    # the q=41 row is a known transcription defect in the source table:
    # it lists GH but uses F and H (and fails verification as stored)
    mismatches = {}
    for fx in iter_fixtures():
        if fx.table not in (1, 2):
            continue
        recomputed = extras_used(fx.body)
        if set(recomputed) != set(fx.extras):
            mismatches[(fx.table, fx.q)] = (fx.extras, recomputed)
    assert mismatches == {(1, 41): ("GH", "FH")}


def test_table3_fixture_rows_parse_and_verify():
    rows = iter_fixtures(table=3)
    assert [fx.q for fx in rows] == [5, 7, 11, 17, 19, 23, 29, 31, 37]
    for fx in rows:
        system = parse_int_blocks(fx.body, fx.q)
        assert verify(system).ok, fx.q


def test_parse_int_blocks_tolerates_trailing_comma():
    system = parse_int_blocks("0 3, 2 6, 1 5, 0 4, 3 6, 2 5, 1 4,", 7)
    assert len(system.blocks) == 7
    assert system.blocks[0] == frozenset({0, 3})


def test_parse_int_blocks_errors():
    with pytest.raises(ValueError, match="expected 5"):
        parse_int_blocks("0 1, 2 3", 5)
    with pytest.raises(ValueError, match="block 1 holds 9"):
        parse_int_blocks("0, 9, 1, 2, 3", 5)
    with pytest.raises(ValueError, match="repeats"):
        parse_int_blocks("0 0, 1, 2, 3, 4", 5)
    with pytest.raises(ValueError, match="not a list of integers"):
        parse_int_blocks("0, x, 1, 2, 3", 5)


# ---------------------------------------------------------------------------
# JSON codec.
# ---------------------------------------------------------------------------

def test_json_round_trip_is_byte_stable():
    system = BlockSystem.from_blocks(5, [[0]] * 5)
    text = write_json(system)
    assert read_json(text).blocks == system.blocks
    assert write_json(read_json(text)) == text
    assert json.loads(text) == {"q": 5, "p": 5, "m": 1, "modulus": [0, 1],
                                "blocks": [[0]] * 5}


def test_json_round_trip_table3_q7():
    fx = [f for f in iter_fixtures(table=3) if f.q == 7][0]
    system = parse_int_blocks(fx.body, 7)
    again = read_json(write_json(system))
    assert again.blocks == system.blocks
    assert verify(again).ok


def test_json_members_are_sorted():
    system = BlockSystem.from_blocks(5, [[4, 0], [3, 1], [2], [], []])
    doc = json.loads(write_json(system))
    assert doc["blocks"][0] == [0, 4]
    assert doc["blocks"][1] == [1, 3]


def test_json_errors():
    with pytest.raises(ValueError, match="malformed JSON"):
        read_json("{not json")
    with pytest.raises(ValueError, match="missing keys"):
        read_json('{"q": 5}')
    good = write_json(BlockSystem.from_blocks(5, [[0]] * 5))
    doc = json.loads(good)
    doc["blocks"] = doc["blocks"][:4]
    with pytest.raises(ValueError, match="expected 5 blocks"):
        read_json(json.dumps(doc))
    doc = json.loads(good)
    doc["blocks"][0] = [7]
    with pytest.raises(ValueError, match="out of range"):
        read_json(json.dumps(doc))
    doc = json.loads(good)
    doc["modulus"] = [1, 1]
    with pytest.raises(ValueError, match="does not match"):
        read_json(json.dumps(doc))


def test_json_round_trip_extension_field():
    system = BlockSystem.from_blocks(9, [[0, 5], [1]] + [[]] * 7)
    doc = json.loads(write_json(system))
    assert (doc["p"], doc["m"], doc["modulus"]) == (3, 2, [1, 0, 1])
    assert read_json(write_json(system)).blocks == system.blocks


def test_bounds_csv():
    text = bounds_csv([(7, 2, 14, 126), (5, 2, 10, None)])
    assert text == "q,k,v,bound\n7,2,14,126\n5,2,10,-\n"


# ---------------------------------------------------------------------------
# Fixture corpus plumbing.
# ---------------------------------------------------------------------------

def test_fixture_corpus_shape():
    fixtures = iter_fixtures()
    by_table = {}
    for fx in fixtures:
        by_table.setdefault(fx.table, []).append(fx.q)
    assert by_table[1] == [5, 31, 37, 41, 47, 53, 61, 67, 71, 73]
    assert by_table[2] == [79, 83, 89]
    assert len(by_table[3]) == 9
    assert len(by_table[4]) == 76


def test_fixture_dash_rows():
    dash = [fx.q for fx in iter_fixtures(table=4) if fx.bound is None]
    numeric = [fx.q for fx in iter_fixtures(table=4) if fx.bound is not None]
    assert len(dash) == 39
    assert len(numeric) == 37
    assert all(fx.has_bound for fx in iter_fixtures(table=4))


def test_load_fixture_metadata():
    fx = load_fixture(default_fixtures_dir() / "tbl1_q31.txt")
    assert (fx.table, fx.q, fx.k, fx.t, fx.extras) == (1, 31, 2, 5, "")
    assert len(fx.body.split()) == 31
