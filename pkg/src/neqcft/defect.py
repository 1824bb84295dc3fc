"""Defect maps on the product of two chiral fermion Fock spaces.

A point impurity joining two critical Majorana systems scatters the
incoming pair (anti-chiral left, chiral right) into the outgoing pair
(chiral left, anti-chiral right).  On modes the scattering is the rotation

    b^r_s  ->  cos(a) b^l_s + sin(a) br^r_s
    br^l_s ->  cos(a) br^r_s - sin(a) b^l_s

for every half-odd s.  The realization below lives on one concrete product
space F_A (x) F_B whose incoming reading is (br^l, b^r) and whose outgoing
reading is (br^r, b^l): factor A always hosts the anti-chiral mode family
and factor B the chiral one.  Pairing the slots by chirality rather than
by side is what turns the scattering into a genuine one-parameter rotation
group, Theta(a) Theta(b) = Theta(a+b) and Theta(a)^-1 = Theta(-a), while
reproducing the mode relations above verbatim (at a = 0 the matrix is the
identity, which reads exactly as the pure-transmission relabeling
b^r -> b^l; at a = pi/2 it reads as the pure reflection b^r -> br^r,
br^l -> -b^l).

The map is defined on states through the operator-state correspondence:
it fixes the vacuum and acts on creation modes by the rotation above.
All checks below compare honest truncated matrices on the safe subspace.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from . import fock, virasoro
from .fock import FERMION, GradedOperator, ProductSpace, StateVector

FLOAT_TOL = 1e-12

ANTI = "left"   # factor A position label inside the product space
CHI = "right"   # factor B


def _is_exact(x):
    return isinstance(x, (int, Fraction))


@dataclass(frozen=True)
class BogoliubovSpec:
    """Rotation angle stored as the exact or floating pair (cos, sin)."""

    cos_a: object
    sin_a: object

    def __post_init__(self):
        c, s = self.cos_a, self.sin_a
        if _is_exact(c) and _is_exact(s):
            object.__setattr__(self, "cos_a", Fraction(c))
            object.__setattr__(self, "sin_a", Fraction(s))
            if self.cos_a ** 2 + self.sin_a ** 2 != 1:
                raise ValueError("cos^2 + sin^2 must equal 1 exactly")
        else:
            if abs(float(c) ** 2 + float(s) ** 2 - 1.0) > FLOAT_TOL:
                raise ValueError("cos^2 + sin^2 deviates from 1 beyond tolerance")

    @classmethod
    def from_angle(cls, alpha):
        c, s = math.cos(alpha), math.sin(alpha)
        # snap to the exact axis points so that the headline cases stay exact
        for v, ex in ((0.0, 0), (1.0, 1), (-1.0, -1)):
            if abs(c - v) < 1e-15:
                c = ex
            if abs(s - v) < 1e-15:
                s = ex
        return cls(c, s)

    @property
    def is_exact(self):
        return _is_exact(self.cos_a) and _is_exact(self.sin_a)

    @property
    def mode_matrix(self):
        """Rotation acting on the doublet (b^r_s, br^l_s); orthogonal, det 1."""
        c, s = self.cos_a, self.sin_a
        return [[c, s], [-s, c]]

    def compose(self, other):
        c = self.cos_a * other.cos_a - self.sin_a * other.sin_a
        s = self.sin_a * other.cos_a + self.cos_a * other.sin_a
        return BogoliubovSpec(c, s)

    def inverse(self):
        return BogoliubovSpec(self.cos_a, -self.sin_a)


TRANSMISSION = BogoliubovSpec(1, 0)
REFLECTION = BogoliubovSpec(0, 1)


@dataclass
class DefectRealization:
    """Truncated matrix of a defect map, plus the data it was built from.

    ``mode_map`` is the claimed action on the slot doublet (A, B): image of
    c^A_s is map[0][0] c^A_s + map[0][1] c^B_s and likewise for c^B_s.
    """

    space: ProductSpace
    theta: GradedOperator
    source: object = None
    mode_map: object = None

    @property
    def is_exact(self):
        return isinstance(self.source, BogoliubovSpec) and self.source.is_exact

    @property
    def tolerance(self):
        return 0 if self.is_exact else FLOAT_TOL


def scattering_space(cutoff):
    """Product of the anti-chiral and chiral fermion spaces, total level <= cutoff."""
    factor = fock.enumerate_basis(FERMION, cutoff)
    return fock.tensor_space(factor, factor, cutoff)


def _creation_values(cutoff):
    vals = []
    v = Fraction(1, 2)
    while v <= cutoff:
        vals.append(-v)
        v += 1
    return vals


def build_mode_automorphism(matrix, cutoff, source=None):
    """Vacuum-fixing operator acting on creation modes by the given 2x2 matrix.

    ``matrix`` maps the factor doublet (A, B): image of c^A_s is
    m[0][0] c^A_s + m[0][1] c^B_s, image of c^B_s is
    m[1][0] c^A_s + m[1][1] c^B_s.  Orthogonality is not assumed, so this
    can also build the deliberately broken maps used as negative controls.
    """
    space = scattering_space(cutoff)
    emb = {}
    for v in _creation_values(space.cutoff):
        emb[("A", v)] = fock.graded_tensor(fock.mode_operator(space.left, v), ANTI, space)
        emb[("B", v)] = fock.graded_tensor(fock.mode_operator(space.right, v), CHI, space)
    images = {}
    for v in _creation_values(space.cutoff):
        images[("A", v)] = [(matrix[0][0], ("A", v)), (matrix[0][1], ("B", v))]
        images[("B", v)] = [(matrix[1][0], ("A", v)), (matrix[1][1], ("B", v))]

    theta = GradedOperator.zero(space, space, Fraction(0), 0)
    for col, (i, j) in enumerate(space.pairs):
        ops = [("A", v) for v in space.left.states[i].occupied]
        ops += [("B", v) for v in space.right.states[j].occupied]
        vec = StateVector.vacuum(space)
        for key in reversed(ops):
            acc = {}
            for coeff, mkey in images[key]:
                if coeff == 0:
                    continue
                part = emb[mkey].apply(vec)
                for idx, amp in part.amplitudes.items():
                    s = acc.get(idx, 0) + coeff * amp
                    if s == 0:
                        acc.pop(idx, None)
                    else:
                        acc[idx] = s
            vec = StateVector(space, acc)
        for row, amp in vec.amplitudes.items():
            theta.add_entry(row, col, amp)
    return DefectRealization(space, theta, source, mode_map=matrix)


def build_theta_fermion(spec, cutoff):
    """Defect map for a fermion Bogoliubov rotation; spec is a BogoliubovSpec or an angle."""
    if not isinstance(spec, BogoliubovSpec):
        spec = BogoliubovSpec.from_angle(float(spec))
    c, s = spec.cos_a, spec.sin_a
    matrix = [[c, -s], [s, c]]  # A -> cA - sB, B -> sA + cB
    return build_mode_automorphism(matrix, cutoff, source=spec)


def total_virasoro(space, n):
    """L_n acting on both factors of the product space (the diagonal action)."""
    gen = virasoro.build_virasoro(FERMION, n, space.left).realization
    return (fock.graded_tensor(gen, ANTI, space)
            + fock.graded_tensor(virasoro.build_virasoro(FERMION, n, space.right).realization,
                                 CHI, space))


def vacuum_preservation_deviation(real):
    vac = real.space.vacuum_index
    dev = 0
    col = real.theta.columns.get(vac, {})
    for row, val in col.items():
        want = 1 if row == vac else 0
        dev = max(dev, abs(val - want))
    if vac not in col:
        dev = max(dev, 1)
    return dev


def check_intertwining(real, n, cutoff=None):
    """Largest entry of Theta (Lbar^l_n + L^r_n) - (L^l_n + Lbar^r_n) Theta on the safe subspace.

    Both sides are the diagonal Virasoro action on the concrete product
    space, so the condition is the vanishing commutator [Theta, L^tot_n].
    """
    space = real.space
    cutoff = space.cutoff if cutoff is None else Fraction(cutoff)
    if cutoff > space.cutoff:
        raise ValueError(f"cutoff {cutoff} exceeds the realization cutoff {space.cutoff}")
    safe = cutoff - abs(n)
    if not any(space.level(i) <= safe for i in range(space.dimension)):
        raise ValueError(f"empty safe subspace for n={n} at cutoff {cutoff}")
    ltot = total_virasoro(space, n)
    dev = (real.theta @ ltot - ltot @ real.theta).max_abs_entry(max_col_level=safe)
    return dev


def check_momentum_continuity(real):
    """Theta applied to (Lbar^l_-2 + L^r_-2)|0x0> must reproduce (L^l_-2 + Lbar^r_-2)|0x0>."""
    space = real.space
    if space.cutoff < 2:
        raise ValueError("cutoff must be >= 2 to host the stress state")
    ltot = total_virasoro(space, -2)
    vac = StateVector.vacuum(space)
    state = ltot.apply(vac)
    image = real.theta.apply(state)
    dev = 0
    keys = set(state.amplitudes) | set(image.amplitudes)
    for k in keys:
        dev = max(dev, abs(image.amplitudes.get(k, 0) - state.amplitudes.get(k, 0)))
    return dev <= real.tolerance


def check_ope_preservation(real, mode_bound=Fraction(3, 2)):
    """Deviation of the mode images from an algebra automorphism.

    With a claimed mode map the check is twofold: the image combinations
    B_s must satisfy the same anticommutation relations as the modes (which
    holds exactly when the map is orthogonal), and the realization must
    implement them, Theta b_s = B_s Theta.  Without a claimed map (raw or
    corrupted matrices) the conjugated modes are compared directly through
    the exact block inverse.
    """
    space = real.space
    mode_bound = Fraction(mode_bound)
    values = []
    v = Fraction(1, 2)
    while v <= mode_bound:
        values.extend([v, -v])
        v += 1
    raw = {}
    for f, pos in (("A", ANTI), ("B", CHI)):
        factor = space.left if f == "A" else space.right
        for val in values:
            raw[(f, val)] = fock.graded_tensor(fock.mode_operator(factor, val), pos, space)
    if real.mode_map is not None:
        m = real.mode_map
        images = {}
        for (f, v) in raw:
            row = m[0] if f == "A" else m[1]
            images[(f, v)] = row[0] * raw[("A", v)] + row[1] * raw[("B", v)]
    else:
        inv = fock.invert_graded(real.theta)
        images = {k: real.theta @ op @ inv for k, op in raw.items()}
    dev = 0
    keys = sorted(raw, key=str)
    for a in keys:
        # the realization must implement the images: Theta b = B Theta
        resid = real.theta @ raw[a] - images[a] @ real.theta
        dev = max(dev, resid.max_abs_entry(max_col_level=space.cutoff - abs(a[1])))
        for b in keys:
            fa, va = a
            fb, vb = b
            anti = images[a] @ images[b] + images[b] @ images[a]
            expect = GradedOperator.zero(space, space, anti.level_shift, anti.parity_shift)
            if fa == fb and va + vb == 0:
                expect = expect + GradedOperator.identity(space)
            safe = space.cutoff - max(abs(va), abs(vb))
            if safe < 0:
                continue
            dev = max(dev, (anti - expect).max_abs_entry(max_col_level=safe))
    return dev


def compose_defects(a, b):
    """Matrix product of two realizations on the same space."""
    if a.space is not b.space and a.space.dimension != b.space.dimension:
        raise ValueError("realizations live on different spaces")
    src = None
    if isinstance(a.source, BogoliubovSpec) and isinstance(b.source, BogoliubovSpec):
        src = a.source.compose(b.source)
    return DefectRealization(a.space, a.theta @ b.theta, src)


def max_matrix_deviation(a, b, max_col_level=None):
    return (a.theta - b.theta).max_abs_entry(max_col_level=max_col_level)


def reflection_block_mixing(real):
    """Largest entry connecting a one-factor state to a mixed or same-factor state.

    A pure reflection must send A-only states to B-only states and back,
    with no mixing; returns the worst off-block entry over those columns.
    """
    space = real.space
    dev = 0
    for col, (i, j) in enumerate(space.pairs):
        a_only = j == space.right.vacuum_index and i != space.left.vacuum_index
        b_only = i == space.left.vacuum_index and j != space.right.vacuum_index
        if not (a_only or b_only):
            continue
        for row, val in real.theta.columns.get(col, {}).items():
            ri, rj = space.pairs[row]
            ok = (ri == space.left.vacuum_index) if a_only else (rj == space.right.vacuum_index)
            if not ok:
                dev = max(dev, abs(val))
    return dev


# ---------------------------------------------------------------------------
# pure reflection phases from the fusion ring

@dataclass(frozen=True)
class FusionRing:
    """Nonzero fusion pattern of a chiral sector algebra, with conjugation."""

    labels: tuple
    identity: str
    pattern: frozenset  # triples (j, k, m) with nonzero structure constant
    conjugation: dict

    def __post_init__(self):
        if self.identity not in self.labels:
            raise ValueError("identity label missing from labels")
        for j in self.labels:
            jj = self.conjugation.get(j)
            if jj is None or jj not in self.labels:
                raise ValueError(f"conjugation undefined for label {j!r}")
            if self.conjugation.get(jj) != j:
                raise ValueError("conjugation must be an involution")
        for j, k, m in self.pattern:
            for lbl in (j, k, m):
                if lbl not in self.labels:
                    raise ValueError(f"fusion triple uses unknown label {lbl!r}")
        for j in self.labels:
            if (j, self.conjugation[j], self.identity) not in self.pattern:
                raise ValueError(f"(j, jbar, identity) missing from pattern for {j!r}")

    @classmethod
    def from_dict(cls, data):
        return cls(labels=tuple(data["labels"]),
                   identity=data["identity"],
                   pattern=frozenset(tuple(t) for t in data["fusion"]),
                   conjugation=dict(data["conjugation"]))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def ising_ring():
    return FusionRing(labels=("1", "psi"), identity="1",
                      pattern=frozenset({("1", "1", "1"), ("1", "psi", "psi"),
                                         ("psi", "1", "psi"), ("psi", "psi", "1")}),
                      conjugation={"1": "1", "psi": "psi"})


def z3_parafermion_ring():
    return FusionRing(labels=("1", "psi1", "psi2"), identity="1",
                      pattern=frozenset({("1", "1", "1"),
                                         ("1", "psi1", "psi1"), ("psi1", "1", "psi1"),
                                         ("1", "psi2", "psi2"), ("psi2", "1", "psi2"),
                                         ("psi1", "psi1", "psi2"), ("psi2", "psi2", "psi1"),
                                         ("psi1", "psi2", "1"), ("psi2", "psi1", "1")}),
                      conjugation={"1": "1", "psi1": "psi2", "psi2": "psi1"})


def trivial_ring():
    return FusionRing(labels=("1",), identity="1",
                      pattern=frozenset({("1", "1", "1")}), conjugation={"1": "1"})


BUILTIN_RINGS = {"ising": ising_ring, "z3": z3_parafermion_ring, "trivial": trivial_ring}


@dataclass(frozen=True)
class ReflectionSpec:
    """Unit phases per sector, stored exactly as fractions of a full turn.

    ``zetas[label] = Fraction(p, q)`` means the phase exp(2 pi i p / q).
    """

    zetas: dict

    def __post_init__(self):
        for lbl, ph in self.zetas.items():
            if not isinstance(ph, Fraction) or not (0 <= ph < 1):
                raise ValueError(f"phase for {lbl!r} must be a Fraction in [0, 1)")

    def as_complex(self):
        return {lbl: complex(math.cos(2 * math.pi * ph), math.sin(2 * math.pi * ph))
                for lbl, ph in self.zetas.items()}


def _phase_candidates(max_order):
    vals = set()
    for q in range(1, max_order + 1):
        for p in range(q):
            vals.add(Fraction(p, q))
    return sorted(vals)


def solve_reflection_phases(ring, max_order=24):
    """All phase assignments consistent with the fusion pattern.

    Constraints: zeta_identity = 1, zeta_{jbar} = conj(zeta_j), and
    zeta_j zeta_k = zeta_m on every nonzero triple.  Additively on
    fractions of a turn these are linear conditions mod 1.  Solutions are
    enumerated over roots of unity of order <= max_order; an empty result
    means nothing is consistent within that bound (the all-ones assignment
    always is, so valid rings report at least one solution).
    """
    labels = [l for l in ring.labels if l != ring.identity]
    candidates = _phase_candidates(max_order)
    solutions = []

    def consistent(assign):
        for j, k, m in ring.pattern:
            if j in assign and k in assign and m in assign:
                if (assign[j] + assign[k]) % 1 != assign[m]:
                    return False
        for j, ph in assign.items():
            jj = ring.conjugation[j]
            if jj in assign and assign[jj] != (-ph) % 1:
                return False
        return True

    def search(i, assign):
        if i == len(labels):
            solutions.append(ReflectionSpec(dict(assign)))
            return
        lbl = labels[i]
        if lbl in assign:
            search(i + 1, assign)
            return
        jj = ring.conjugation[lbl]
        for ph in candidates:
            assign[lbl] = ph
            fixed_conj = False
            if jj != lbl and jj not in assign:
                assign[jj] = (-ph) % 1
                fixed_conj = True
            if consistent(assign):
                search(i + 1, assign)
            if fixed_conj:
                del assign[jj]
            del assign[lbl]

    search(0, {ring.identity: Fraction(0)})
    uniq = {tuple(sorted(s.zetas.items())): s for s in solutions}
    return sorted(uniq.values(), key=lambda s: tuple(sorted(s.zetas.items())))
