import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from omega_matroids.core import (
    CyclicFlat,
    CyclicFlatLattice,
    ExpansionVector,
    InvalidArgumentsError,
    InvalidDescriptorError,
    MatroidDescriptor,
    SchubertLabel,
    SparseIntMatrix,
    canonical_schubert_order,
    descriptor_to_lattice,
    from_mask,
    to_mask,
)
from omega_matroids.rank2 import build_o2, enumerate_profiles
from omega_matroids.rank3 import build_o3


def flats_of(z):
    return {(f.elements, f.rank) for f in z.flats}


# -- Schubert labels and their order ------------------------------------------------------


def test_order_rank2_n4():
    got = [lab.xs for lab in canonical_schubert_order(2, 4)]
    assert got == [(3, 4), (2, 4), (2, 3), (1, 4), (1, 3), (1, 2)]


def test_order_rank3_n5_matches_printed_rows():
    printed = ["S(3,4,5)", "S(2,4,5)", "S(2,3,5)", "S(2,3,4)", "S(1,4,5)",
               "S(1,3,5)", "S(1,3,4)", "S(1,2,5)", "S(1,2,4)", "S(1,2,3)"]
    assert [str(lab) for lab in canonical_schubert_order(3, 5)] == printed


def test_order_single_label():
    assert canonical_schubert_order(1, 1) == [SchubertLabel((1,), 1)]


@pytest.mark.parametrize("r,n", [(3, 2), (0, 3), (2, 0)])
def test_order_rejects_bad_sizes(r, n):
    with pytest.raises(InvalidArgumentsError):
        canonical_schubert_order(r, n)


@pytest.mark.parametrize("xs,n", [((2, 2), 4), ((3, 1), 4), ((0, 2), 4), ((1, 5), 4), ((), 3)])
def test_label_validation(xs, n):
    with pytest.raises(InvalidArgumentsError):
        SchubertLabel(xs, n)


@given(st.integers(1, 7).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n))))
def test_label_parse_roundtrip(nr):
    n, r = nr
    for lab in canonical_schubert_order(r, n):
        assert SchubertLabel.parse(str(lab), n) == lab


# -- expansion vectors --------------------------------------------------------------------


def test_vector_merges_and_drops_zeros():
    a = SchubertLabel((1, 2), 4)
    b = SchubertLabel((1, 3), 4)
    v = ExpansionVector(2, 4, ((a, 1), (b, 2), (a, -1)))
    assert v.items == ((b, 2),)
    assert v[a] == 0 and v[(1, 3)] == 2
    assert v == ExpansionVector.from_xs(2, 4, {(1, 3): 2})
    assert hash(v) == hash(ExpansionVector.from_xs(2, 4, {(1, 3): 2, (1, 2): 0}))


def test_vector_rejects_foreign_labels():
    with pytest.raises(InvalidArgumentsError):
        ExpansionVector(2, 4, ((SchubertLabel((1, 2), 5), 1),))


def test_vector_dense_and_relabel():
    v = ExpansionVector.from_xs(2, 4, {(1, 3): 2, (1, 2): -1})
    assert v.dense() == [0, 0, 0, 0, 2, -1]
    w = v.relabel(5, lambda xs: tuple(x + 1 for x in xs))
    assert w.by_xs() == {(2, 4): 2, (2, 3): -1}


# -- masks --------------------------------------------------------------------------------


@given(st.sets(st.integers(1, 20)))
def test_mask_roundtrip(s):
    assert set(from_mask(to_mask(s))) == s


# -- lattices -----------------------------------------------------------------------------


def test_lattice_rank_is_derived_from_top():
    z = CyclicFlatLattice.from_sets(5, [((), 0), ((1, 2), 1)])
    assert z.matroid_rank == 1 + 3
    assert z.coloops == (3, 4, 5)
    with pytest.raises(InvalidArgumentsError):
        CyclicFlatLattice.from_sets(5, [((), 0), ((1, 2), 1)], matroid_rank=3)


def test_lattice_rejects_out_of_range_flat():
    with pytest.raises(InvalidArgumentsError):
        CyclicFlatLattice.from_sets(3, [((), 0), ((1, 4), 1)])


def test_lattice_json_roundtrip():
    z = descriptor_to_lattice(MatroidDescriptor.rank3(5, [(1, 2, 3), (3, 4, 5)], 5, [1] * 5))
    assert CyclicFlatLattice.from_json(json.loads(json.dumps(z.to_json()))) == z


def test_lattice_json_malformed():
    with pytest.raises(InvalidArgumentsError):
        CyclicFlatLattice.from_json({"n": 3, "cyclic_flats": [{"set": [1]}]})


# -- descriptors --------------------------------------------------------------------------


def test_descriptor_lattice_u12_sum():
    z = descriptor_to_lattice(MatroidDescriptor.rank2(4, 0, (2, 2)))
    assert flats_of(z) == {((), 0), ((1, 2), 1), ((3, 4), 1), ((1, 2, 3, 4), 2)}


def test_descriptor_lattice_uniform_33():
    z = descriptor_to_lattice(MatroidDescriptor.schubert(SchubertLabel((1, 2, 3), 3)))
    # no circuits: the empty set is the only cyclic flat and all three elements are coloops
    assert flats_of(z) == {((), 0)}
    assert z.matroid_rank == 3 and z.coloops == (1, 2, 3)


def test_descriptor_lattice_two_lines():
    z = descriptor_to_lattice(MatroidDescriptor.rank3(5, [(1, 2, 3), (3, 4, 5)], 5, [1] * 5))
    assert flats_of(z) == {((), 0), ((1, 2, 3), 2), ((3, 4, 5), 2), ((1, 2, 3, 4, 5), 3)}


@pytest.mark.parametrize(
    "make",
    [
        lambda: MatroidDescriptor.rank2(4, 0, (1, 3)),  # class of size 1
        lambda: MatroidDescriptor.rank2(4, 3, (2,)),  # does not fit
        lambda: MatroidDescriptor.rank2(4, 2, (2,)),  # rank below 2
        lambda: MatroidDescriptor.rank3(5, [(1, 2, 3), (1, 2, 4)], 5, [1] * 5),  # lines share two points
        lambda: MatroidDescriptor.rank3(5, [(1, 2, 3, 4)], 4, [1, 1, 1, 2]),  # line is everything
        lambda: MatroidDescriptor.rank3(5, [], 3, [1, 1, 1]),  # multiplicities do not add up
        lambda: MatroidDescriptor("rank4", 4),
    ],
)
def test_descriptor_validation(make):
    with pytest.raises(InvalidDescriptorError):
        make()


@given(st.integers(2, 8).flatmap(lambda n: st.sampled_from(enumerate_profiles(n))))
def test_rank2_descriptor_json_roundtrip(profile):
    d = profile.descriptor()
    assert MatroidDescriptor.from_json(json.loads(json.dumps(d.to_json()))) == d


@pytest.mark.parametrize("n", [5, 6])
def test_rank3_descriptor_json_roundtrip(n):
    for d in build_o3(n).descriptors():
        assert MatroidDescriptor.from_json(json.loads(json.dumps(d.to_json()))) == d


# -- sparse matrices ----------------------------------------------------------------------


@pytest.mark.parametrize("build,n", [(build_o2, 4), (build_o2, 7), (build_o3, 5), (build_o3, 6)])
def test_triples_roundtrip(build, n):
    m = build(n)
    back = SparseIntMatrix.from_triples_text(m.to_triples_text(), m.sidecar())
    assert back.vectors() == m.vectors()
    assert back.descriptors() == m.descriptors()
    assert back.dense() == m.dense()


def test_triples_header_mismatch():
    m = build_o2(4)
    text = m.to_triples_text().replace("6 7 8", "6 8 8", 1)
    with pytest.raises(InvalidArgumentsError):
        SparseIntMatrix.from_triples_text(text, m.sidecar())


def test_append_rejects_wrong_shape():
    m = SparseIntMatrix(2, 4)
    lab = SchubertLabel((1, 2), 5)
    with pytest.raises(InvalidArgumentsError):
        m.append(ExpansionVector.unit(lab), MatroidDescriptor.schubert(lab))


def test_flat_from_mask():
    f = CyclicFlat.from_mask(0b1011, 2)
    assert f.elements == (1, 2, 4) and f.size == 3 and 4 in f and 3 not in f
