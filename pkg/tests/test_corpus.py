import pytest

from bdiv.corpus import CorpusSpec, generate, instance, write


def test_same_spec_same_corpus():
    spec = CorpusSpec(1, 2, 3)
    assert generate(spec) == generate(spec)


def test_instances_do_not_depend_on_count():
    assert generate(CorpusSpec(4, 3, 5))[:2] == generate(CorpusSpec(4, 3, 2))


def test_files_are_byte_identical(tmp_path):
    spec = CorpusSpec(9, 2, 4, "box")
    a = write(spec, str(tmp_path / "a"))
    b = write(spec, str(tmp_path / "b"))
    assert a == b
    for n in a + ["manifest.json"]:
        assert (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()


@pytest.mark.parametrize("family", ["random-hull", "box", "simplex"])
@pytest.mark.parametrize("d", [2, 3])
def test_families_valid(family, d):
    spec = CorpusSpec(2, d, 25, family)
    for P in generate(spec):
        assert P.fulldim and P.dim == d
        assert len(P.halfspaces) <= spec.facet_cap or family != "random-hull"


def test_boxes_are_boxes():
    for P in generate(CorpusSpec(3, 3, 10, "box")):
        assert len(P.vertices) == 8 and len(P.halfspaces) == 6
        assert all(sum(abs(x) for x in h.normal) == 1 for h in P.halfspaces)


def test_regular_gons():
    for P in generate(CorpusSpec(5, 2, 10, "regular-gon")):
        assert 3 <= len(P.vertices) <= 10


def test_large_sweep_in_3d():
    spec = CorpusSpec(6, 3, 1000)
    for i in range(spec.count):
        P = instance(spec, i)
        assert P.fulldim and all(h.contains(v) for h in P.halfspaces for v in P.vertices)


def test_bad_specs():
    with pytest.raises(ValueError):
        CorpusSpec(0, 2, 1, "sphere")
    with pytest.raises(ValueError):
        CorpusSpec(0, 3, 1, "regular-gon")
    with pytest.raises(ValueError):
        CorpusSpec(0, 1, 1)
