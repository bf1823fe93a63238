from modpcheck.base_combinatorics import (
    IntVec,
    SubsetJ,
    all_subsets,
    cyclic_run_count,
    decompose_parts,
    indicator,
    right_boundary,
    shift_subset,
    symmetric_difference,
    vec_norm,
    vec_shift,
)


def test_shift_examples():
    J = SubsetJ.of(3, [0, 2])
    assert shift_subset(J, 1).members() == (0, 1)
    assert shift_subset(J, -1).members() == (1, 2)
    assert shift_subset(J, 3) == J
    # f=1: J-1 = J with no special case
    J1 = SubsetJ.of(1, [0])
    assert shift_subset(J1, -1) == J1
    assert shift_subset(J1, 5) == J1


def test_shift_roundtrip():
    for f in (1, 2, 3, 4):
        for J in all_subsets(f):
            for k in range(-2 * f, 2 * f + 1):
                assert shift_subset(shift_subset(J, k), -k) == J


def test_decompose_parts():
    Jrho = SubsetJ.of(3, [0, 1])
    J = SubsetJ.of(3, [0, 2])
    Jss, Jnss, Jsh = decompose_parts(J, Jrho)
    assert Jss.members() == (0,)
    assert Jnss.members() == (2,)
    assert Jsh.members() == ()
    # consecutive pair inside Jrho does shear
    Jrho2 = SubsetJ.of(3, [1, 2])
    J2 = SubsetJ.of(3, [1, 2])
    _, _, Jsh2 = decompose_parts(J2, Jrho2)
    assert Jsh2.members() == (1,)


def test_parts_partition():
    for f in (1, 2, 3):
        for Jrho in all_subsets(f):
            for J in all_subsets(f):
                Jss, Jnss, Jsh = decompose_parts(J, Jrho)
                assert (Jss | Jnss) == J
                assert not (Jss & Jnss)
                assert Jsh <= Jss


def test_right_boundary():
    assert right_boundary(SubsetJ.of(3, [0, 2])).members() == (0,)
    assert right_boundary(SubsetJ.full(3)).members() == ()
    assert right_boundary(SubsetJ.of(3, [])).members() == ()
    # f=1 full singleton: successor of 0 is 0 itself
    assert right_boundary(SubsetJ.of(1, [0])).members() == ()


def test_boundary_counts_runs():
    for f in (1, 2, 3, 4, 5):
        for J in all_subsets(f):
            if J.is_full():
                continue
            assert len(right_boundary(J)) == cyclic_run_count(J)


def test_symmetric_difference():
    A = SubsetJ.of(3, [0, 1])
    B = SubsetJ.of(3, [1, 2])
    assert symmetric_difference(A, B).members() == (0, 2)


def test_vec_ops():
    v = IntVec.of([3, -1, 2])
    assert vec_norm(v) == 4
    assert vec_shift(v).entries == (-1, 2, 3)
    w = v
    for _ in range(3):
        w = vec_shift(w)
    assert w == v
    assert indicator(SubsetJ.of(3, [0, 2])).entries == (1, 0, 1)
    assert (v + IntVec.of([1, 1, 1])).entries == (4, 0, 3)
    assert (-v).entries == (-3, 1, -2)
    assert (2 * v).entries == (6, -2, 4)
    assert v.leq(IntVec.of([3, 0, 2]))
    assert not v.leq(IntVec.of([2, 0, 2]))


def test_subset_order_and_algebra():
    A = SubsetJ.of(4, [0, 1])
    B = SubsetJ.of(4, [0, 1, 3])
    assert A <= B and A < B and not B <= A
    assert (B - A).members() == (3,)
    assert A.complement().members() == (2, 3)
    assert len(list(all_subsets(4))) == 16
