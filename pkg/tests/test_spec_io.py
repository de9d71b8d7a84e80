import pytest

from strata_lab.groups import GroupTooLarge
from strata_lab.spec_io import SpecError, example_names, load_example, load_file, load_spec

Z2 = """kind: finite-matrix
name: z2
generators:
  - [[-1]]
"""


def error(text):
    with pytest.raises(SpecError) as info:
        load_spec(text)
    return info.value


def test_all_examples_load():
    names = example_names()
    assert {"z2_line", "z4_plane", "s3_standard", "circle_1", "circle_1_2", "z2_free", "s3_group"} <= set(names)
    for name in names:
        spec = load_example(name)
        assert spec.digest.startswith("sha256:") and len(spec.digest) == 71


def test_zero_denominator_is_located():
    e = error("kind: finite-matrix\ngenerators:\n  - [[\"1/0\"]]\n")
    assert (e.line, e.column) == (3, 7)
    assert "zero denominator" in str(e)


def test_floats_are_refused():
    e = error("kind: finite-matrix\ngenerators:\n  - [[0.5]]\n")
    assert e.line == 3 and "inexact" in str(e)


@pytest.mark.parametrize("text,fragment", [
    ("kind: finite-matrix\ngenerators: [[[1]]]\ncolour: red\n", "unknown key 'colour'"),
    ("kind: torus\n", "unknown kind"),
    ("name: nothing\n", "missing 'kind'"),
    ("kind: finite-matrix\n", "needs 'generators'"),
    ("kind: finite-matrix\ngenerators: [[[1, 0], [0, 0]]]\n", "not invertible"),
    ("kind: finite-matrix\ngenerators: [[[1, 0]]]\n", "must be 1 x 1"),
    ("kind: circle-weights\nweights: [0]\n", "nonzero"),
    ("kind: circle-weights\nweights: [1]\nbasis: [[1, 0], [1, 0]]\n", "not invertible"),
    ("kind: finite-matrix\ngenerators: [[[-1]]]\nforms: [\"x + ?\"]\n", "column"),
    ("kind: finite-matrix\ngenerators: [[[-1]]]\ninvariants: [\"dx\"]\n", "0-forms"),
    ("kind: finite-groupoid\ngroupoid: {group: {cyclic: 2}, action: [[1, 0], [0, 1]]}\n", "invalid action"),
    ("kind: finite-groupoid\ngroupoid: {group: {table: [[0, 1], [1, 1]]}}\n", "no inverse"),
    ("kind: finite-groupoid\ngroupoid: {group: {cyclic: 1}}\ncover: {f: [3]}\n", "outside"),
    ("kind: [oops\n", "YAML syntax"),
    ("", "empty spec"),
])
def test_errors(text, fragment):
    assert fragment in str(error(text))


def test_error_positions_for_unknown_key():
    e = error(Z2 + "extra: 1\n")
    assert (e.line, e.column) == (5, 8)


def test_digest_ignores_layout_comments_and_names():
    other = "# same group, different layout\nkind: finite-matrix\nname: renamed\ngenerators: [ [ [ \"-1\" ] ] ]\n"
    assert load_spec(Z2).digest == load_spec(other).digest
    assert load_spec(Z2).digest != load_example("z4_plane").digest


def test_digest_ignores_generator_order():
    a = "kind: finite-matrix\ngenerators:\n  - [[-1, 1], [0, 1]]\n  - [[0, -1], [1, -1]]\n"
    b = "kind: finite-matrix\ngenerators:\n  - [[0, -1], [1, -1]]\n  - [[-1, 1], [0, 1]]\n"
    assert load_spec(a).digest == load_spec(b).digest


def test_cap():
    with pytest.raises(GroupTooLarge):
        load_example("s3_standard", cap=3)
    with pytest.raises(GroupTooLarge):
        load_spec("kind: finite-matrix\ncap: 2\ngenerators: [[[0, -1], [1, 0]]]\n")


def test_missing_file(tmp_path):
    with pytest.raises(SpecError, match="cannot read"):
        load_file(tmp_path / "absent.yaml")
    path = tmp_path / "z2.yaml"
    path.write_text(Z2)
    assert load_file(path).action.order == 2


def test_unknown_example():
    with pytest.raises(SpecError, match="available"):
        load_example("nope")
