"""Virasoro generators on truncated Fock spaces, built from mode bilinears.

Fermion model (c = 1/2):
    L_n = (1/2) sum_m m :b_{n-m+1/2} b_{m-1/2}:
Boson model (c = 1, zero-charge sector):
    L_n = (1/2) sum_m :a_{n-m} a_m:        (a_0 excluded)

Normal ordering puts annihilation modes (positive index) to the right and
drops the contraction, which is exactly the subtraction that makes
L_0|0> = 0; the central term of the algebra then emerges on its own and is
probed independently via <0|[L_m, L_-m]|0>.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import fock
from .fock import FERMION, BOSON, GradedOperator, enumerate_basis

HALF = Fraction(1, 2)

MODELS = (FERMION, BOSON)


@dataclass(frozen=True)
class VirasoroGenerator:
    model: str
    n: int
    realization: GradedOperator

    @property
    def space(self):
        return self.realization.domain


def _fermion_terms(n, cutoff):
    # pairs (s1, s2) = (n-m+1/2, m-1/2) with the prefactor m/2; a finite
    # window of m suffices on the truncated space
    bound = 2 * cutoff + abs(n) + 2
    m = -int(bound)
    terms = []
    while m <= bound:
        if m != 0:
            s1 = Fraction(n) - m + HALF
            s2 = Fraction(m) - HALF
            terms.append((Fraction(m, 2), s1, s2))
        m += 1
    return terms


def _boson_terms(n, cutoff):
    bound = int(2 * cutoff + abs(n) + 2)
    terms = []
    for m in range(-bound, bound + 1):
        s1 = Fraction(n - m)
        s2 = Fraction(m)
        if s1 == 0 or s2 == 0:
            continue
        terms.append((HALF, s1, s2))
    return terms


def _normal_order(species, s1, s2):
    # returns (first_applied, second_applied, sign): annihilators to the right,
    # contraction dropped
    if s1 > 0 and s2 < 0:
        sign = -1 if species == FERMION else 1
        return s2, s1, sign  # :b_{s1} b_{s2}: = sign * b_{s2} b_{s1}
    return s1, s2, 1


def build_virasoro(model, n, space):
    """Matrix of L_n on the truncated space."""
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}")
    if space.species != model:
        raise ValueError("state space species does not match the model")
    if abs(n) > space.cutoff:
        raise ValueError(f"cutoff {space.cutoff} too small to represent L_{n}")
    terms = _fermion_terms(n, space.cutoff) if model == FERMION else _boson_terms(n, space.cutoff)
    op = GradedOperator.zero(space, space, Fraction(-n), 0)
    for j, st in enumerate(space.states):
        for coeff, s1, s2 in terms:
            left_mode, inner_first, sign = _normal_order(model, s1, s2)
            res = fock.apply_mode_to_config(model, inner_first, st.occupied)
            if res is None:
                continue
            c1, occ1 = res
            res = fock.apply_mode_to_config(model, left_mode, occ1)
            if res is None:
                continue
            c2, occ2 = res
            row = space.index_of(occ2)
            if row is not None:
                op.add_entry(row, j, coeff * sign * c1 * c2)
    return VirasoroGenerator(model, n, op)


def central_charge_probe(model, m, cutoff):
    """12 <0|[L_m, L_-m]|0> / (m^3 - m), which must equal c exactly."""
    if m < 2:
        raise ValueError("probe needs m >= 2 (the central term vanishes below)")
    cutoff = Fraction(cutoff)
    if cutoff < m:
        raise ValueError(f"cutoff {cutoff} < m = {m}: matrix elements missing")
    space = enumerate_basis(model, cutoff)
    lp = build_virasoro(model, m, space).realization
    lm = build_virasoro(model, -m, space).realization
    vac = space.vacuum_index
    comm = lp @ lm - lm @ lp
    return Fraction(12) * comm.entry(vac, vac) / (m ** 3 - m)


def commutator_deviation(model, m, n, space, central=None):
    """Largest entry of [L_m, L_n] - (m-n) L_{m+n} - central term, on the safe subspace."""
    if central is None:
        central = central_charge_probe(model, 2, space.cutoff)
    lm = build_virasoro(model, m, space).realization
    ln = build_virasoro(model, n, space).realization
    comm = lm @ ln - ln @ lm
    expect = GradedOperator.zero(space, space, Fraction(-(m + n)), 0)
    if m != n:
        expect = expect + (m - n) * build_virasoro(model, m + n, space).realization
    if m + n == 0:
        cterm = Fraction(central) * (m ** 3 - m) / 12
        expect = expect + cterm * GradedOperator.identity(space)
    safe = space.cutoff - max(abs(m), abs(n))
    return (comm - expect).max_abs_entry(max_col_level=safe)


def hermiticity_deviation(model, n, space):
    """Check L_n^dag = L_{-n} against the gram matrix of the basis."""
    ln = build_virasoro(model, n, space).realization
    lmn = build_virasoro(model, -n, space).realization
    gram = fock.gram_diagonal(space)
    dev = 0
    for j in range(space.dimension):
        for i in range(space.dimension):
            lhs = ln.entry(i, j) * gram[i]
            rhs = lmn.entry(j, i) * gram[j]
            d = abs(lhs - rhs)
            if d > dev:
                dev = d
    return dev


def level_spectrum_deviation(model, space):
    """L_0 must be diagonal with eigenvalue equal to the state level."""
    l0 = build_virasoro(model, 0, space).realization
    dev = 0
    for j in range(space.dimension):
        for i in range(space.dimension):
            want = space.level(j) if i == j else 0
            d = abs(l0.entry(i, j) - want)
            if d > dev:
                dev = d
    return dev
