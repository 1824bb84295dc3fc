"""Fock space enumeration, mode algebra and graded tensor products."""

from fractions import Fraction

import pytest

from neqcft import cache
from neqcft.fock import (BOSON, FERMION, FockState, GradedOperator, ModeIndex,
                         StateVector, apply_mode, enumerate_basis, graded_tensor,
                         mode_operator, tensor_space)

HALF = Fraction(1, 2)


def counting_oracle(species, cutoff):
    """Independent dimension count from the level generating function.

    Works in half-level integer units: fermions contribute distinct odd
    parts, bosons even parts with repetition.
    """
    budget = int(2 * Fraction(cutoff))
    dp = [0] * (budget + 1)
    dp[0] = 1
    if species == FERMION:
        part = 1
        while part <= budget:
            for u in range(budget, part - 1, -1):
                dp[u] += dp[u - part]
            part += 2
    else:
        part = 2
        while part <= budget:
            for u in range(part, budget + 1):
                dp[u] += dp[u - part]
            part += 2
    return sum(dp)


def test_dimension_matches_partition_count():
    for species in (FERMION, BOSON):
        for cutoff in (0, 1, 2, Fraction(5, 2), 3, 4, 5, 6, 7, 8):
            space = enumerate_basis(species, cutoff)
            assert space.dimension == counting_oracle(species, cutoff), (species, cutoff)


def test_enumerate_fermion_level_zero_is_vacuum_only():
    space = enumerate_basis(FERMION, 0)
    assert space.dimension == 1
    assert space.states[0].occupied == ()


def test_enumerate_fermion_level_two():
    space = enumerate_basis(FERMION, 2)
    occs = [s.occupied for s in space.states]
    assert occs == [(), (-HALF,), (Fraction(-3, 2),), (Fraction(-3, 2), -HALF)]
    assert space.dimension == 4


def test_enumerate_boson_level_two():
    space = enumerate_basis(BOSON, 2)
    occs = [s.occupied for s in space.states]
    assert occs == [(), (-1,), (-2,), (-1, -1)]
    assert space.dimension == 4


def test_enumeration_is_deterministic():
    a = enumerate_basis(FERMION, Fraction(9, 2))
    b = enumerate_basis(FERMION, Fraction(9, 2))
    assert [s.occupied for s in a.states] == [s.occupied for s in b.states]
    levels = [s.level for s in a.states]
    assert levels == sorted(levels)


def test_state_invariants():
    with pytest.raises(ValueError):
        FockState(FERMION, (-HALF, -HALF))  # Pauli
    with pytest.raises(ValueError):
        FockState(FERMION, (-HALF, Fraction(-3, 2)))  # wrong order
    with pytest.raises(ValueError):
        FockState(FERMION, (-1,))  # not half-odd
    with pytest.raises(ValueError):
        FockState(BOSON, (Fraction(-1, 2),))
    st = FockState(FERMION, (Fraction(-3, 2), -HALF))
    assert st.level == 2 and st.parity == 0
    assert FockState(BOSON, (-2, -1, -1)).parity == 0


def test_annihilator_kills_vacuum():
    space = enumerate_basis(FERMION, 2)
    out = apply_mode(ModeIndex(FERMION, HALF), StateVector.vacuum(space))
    assert out.is_zero()


def test_pauli_exclusion():
    space = enumerate_basis(FERMION, 2)
    one = apply_mode(ModeIndex(FERMION, -HALF), StateVector.vacuum(space))
    two = apply_mode(ModeIndex(FERMION, -HALF), one)
    assert two.is_zero()


def test_anticommutator_on_single_state():
    # b_{1/2} b_{-1/2} |0> = |0>
    space = enumerate_basis(FERMION, 2)
    vec = apply_mode(ModeIndex(FERMION, HALF),
                     apply_mode(ModeIndex(FERMION, -HALF), StateVector.vacuum(space)))
    assert vec == StateVector.vacuum(space)


def test_species_mismatch_raises():
    space = enumerate_basis(FERMION, 2)
    with pytest.raises(ValueError, match="species mismatch"):
        apply_mode(ModeIndex(BOSON, 1), StateVector.vacuum(space))


def test_truncation_is_flagged():
    space = enumerate_basis(FERMION, 1)
    out = apply_mode(ModeIndex(FERMION, Fraction(-3, 2)), StateVector.vacuum(space))
    assert out.is_zero() and out.truncated


def _values_upto(species, bound):
    out = []
    v = HALF if species == FERMION else Fraction(1)
    while v <= bound:
        out.extend([v, -v])
        v += 1
    return out


def test_fermion_anticommutation_relations():
    cutoff = Fraction(7, 2)
    space = enumerate_basis(FERMION, cutoff)
    values = _values_upto(FERMION, cutoff)
    for s in values:
        for sp in values:
            a = mode_operator(space, s)
            b = mode_operator(space, sp)
            anti = a @ b + b @ a
            expect = GradedOperator.zero(space, space, anti.level_shift, anti.parity_shift)
            if s + sp == 0:
                expect = expect + GradedOperator.identity(space)
            safe = cutoff - max(abs(s), abs(sp))
            assert (anti - expect).max_abs_entry(max_col_level=safe) == 0, (s, sp)


def test_boson_commutation_relations():
    cutoff = Fraction(4)
    space = enumerate_basis(BOSON, cutoff)
    values = _values_upto(BOSON, 3)
    for m in values:
        for n in values:
            a = mode_operator(space, m)
            b = mode_operator(space, n)
            comm = a @ b - b @ a
            expect = GradedOperator.zero(space, space, comm.level_shift, comm.parity_shift)
            if m + n == 0:
                expect = expect + m * GradedOperator.identity(space)
            safe = cutoff - max(abs(m), abs(n))
            assert (comm - expect).max_abs_entry(max_col_level=safe) == 0, (m, n)


def test_mode_operator_grading():
    space = enumerate_basis(FERMION, 3)
    op = mode_operator(space, Fraction(-3, 2))
    assert op.level_shift == Fraction(3, 2) and op.parity_shift == 1
    op.check_grading()


def test_graded_tensor_identity():
    f = enumerate_basis(FERMION, 2)
    p = tensor_space(f, f, 2)
    ident = graded_tensor(GradedOperator.identity(f), "left", p) \
        @ graded_tensor(GradedOperator.identity(f), "right", p)
    assert (ident - GradedOperator.identity(p)).max_abs_entry() == 0


def test_graded_tensor_left_factor_carries_no_sign():
    f = enumerate_basis(FERMION, 2)
    p = tensor_space(f, f, 2)
    create = mode_operator(f, -HALF)
    left = graded_tensor(create, "left", p)
    vac = StateVector.vacuum(p)
    out = left.apply(vac)
    target = p.index_of((f.index_of((-HALF,)), f.vacuum_index))
    assert out.amplitudes == {target: 1}


def test_graded_tensor_koszul_sign():
    # right-factor creation across an occupied left factor picks up -1
    f = enumerate_basis(FERMION, 2)
    p = tensor_space(f, f, 2)
    create_l = graded_tensor(mode_operator(f, -HALF), "left", p)
    create_r = graded_tensor(mode_operator(f, -HALF), "right", p)
    vec = create_r.apply(create_l.apply(StateVector.vacuum(p)))
    target = p.index_of((f.index_of((-HALF,)), f.index_of((-HALF,))))
    assert vec.amplitudes == {target: -1}


def test_graded_tensor_order_swap_matches_parities():
    f = enumerate_basis(FERMION, 3)
    p = tensor_space(f, f, 3)
    cases = [(-HALF, Fraction(-3, 2)), (-HALF, -HALF), (Fraction(3, 2), -HALF)]
    for va, vb in cases:
        a = graded_tensor(mode_operator(f, va), "left", p)
        b = graded_tensor(mode_operator(f, vb), "right", p)
        sign = (-1) ** (1 * 1)  # both operators are odd
        safe = p.cutoff - max(abs(va), abs(vb))
        assert ((a @ b) - sign * (b @ a)).max_abs_entry(max_col_level=safe) == 0, (va, vb)
    # even x odd commutes without sign
    l0 = mode_operator(f, -HALF) @ mode_operator(f, HALF)  # even parity
    a = graded_tensor(l0, "left", p)
    b = graded_tensor(mode_operator(f, -HALF), "right", p)
    safe = p.cutoff - HALF
    assert ((a @ b) - (b @ a)).max_abs_entry(max_col_level=safe) == 0


def test_insertion_signs_match_brute_force():
    """Sign of a creation product against explicit reordering of operators."""
    space = enumerate_basis(FERMION, Fraction(9, 2))
    seqs = [
        (Fraction(-3, 2), -HALF),
        (-HALF, Fraction(-3, 2)),
        (Fraction(-5, 2), -HALF, Fraction(-3, 2)),
        (-HALF, Fraction(-3, 2), Fraction(-5, 2)),
    ]
    for seq in seqs:
        vec = StateVector.vacuum(space)
        for v in reversed(seq):
            vec = apply_mode(ModeIndex(FERMION, v), vec)
        # parity of the permutation sorting seq ascending
        perm = sorted(range(len(seq)), key=lambda i: seq[i])
        inversions = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm))
                         if perm[i] > perm[j])
        want_sign = -1 if inversions % 2 else 1
        idx = space.index_of(tuple(sorted(seq)))
        assert vec.amplitudes == {idx: want_sign}, seq


def test_cache_roundtrip(tmp_path):
    space = enumerate_basis(BOSON, 3)
    cache.save_space(tmp_path, space)
    loaded = cache.load_space(tmp_path, BOSON, 3)
    assert loaded.dimension == space.dimension
    assert [s.occupied for s in loaded.states] == [s.occupied for s in space.states]

    op = mode_operator(space, -2)
    cache.save_operator(tmp_path, space, "a_minus2", op)
    back = cache.load_operator(tmp_path, space, "a_minus2")
    assert (back - op).max_abs_entry() == 0
    assert back.level_shift == op.level_shift and back.parity_shift == op.parity_shift


def test_cache_header_mismatch(tmp_path):
    space = enumerate_basis(BOSON, 3)
    path = cache.save_space(tmp_path, space)
    text = open(path).read().replace('"dimension": %d' % space.dimension, '"dimension": 1')
    open(path, "w").write(text)
    with pytest.raises(ValueError, match="dimension mismatch"):
        cache.load_space(tmp_path, BOSON, 3)


def test_cache_miss_returns_none(tmp_path):
    assert cache.load_space(tmp_path, FERMION, 5) is None
