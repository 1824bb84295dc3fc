"""Truncated chiral Fock spaces with exact arithmetic.

Two species of modes are supported:

* Neveu-Schwarz Majorana fermion modes ``b_s``, ``s`` in Z+1/2, with
  ``{b_s, b_s'} = delta_{s+s',0}``.  Negative ``s`` creates.
* Zero-charge u(1) boson modes ``a_n``, ``n`` in Z without 0, with
  ``[a_m, a_n] = m delta_{m+n,0}``.  The zero mode is dropped, so the
  level operator is diagonal on occupation states.

Basis states are products of creation modes applied to the vacuum, written
in canonical ascending order (most negative value leftmost); fermionic
reordering signs are transposition counts against that order, which makes
every sign deterministic.  Levels are exact ``Fraction`` values and matrix
entries stay exact whenever the inputs are exact.

Operators are honest truncations ``P L P`` of the full Fock-space operators
to levels <= cutoff.  Algebraic identities therefore hold only on the safe
subspace of states that cannot leak past the cutoff, levels
<= cutoff - |level_shift|; every check in this package restricts itself
there.

Hermitian structure: ``b_s^dag = b_{-s}`` and ``a_n^dag = a_{-n}``.  This
is a convention (consistent with a real fermion) used only by the
hermiticity checks.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction

FERMION = "fermion"
BOSON = "boson"

HALF = Fraction(1, 2)


def _as_fraction(x):
    return x if isinstance(x, Fraction) else Fraction(x)


def _validate_mode_value(species, value):
    if species == FERMION:
        twice = 2 * value
        if twice.denominator != 1 or twice.numerator % 2 == 0:
            raise ValueError(f"fermion mode value must be half-odd, got {value}")
    elif species == BOSON:
        if value.denominator != 1 or value == 0:
            raise ValueError(f"boson mode value must be a nonzero integer, got {value}")
    else:
        raise ValueError(f"unknown species {species!r}")


@dataclass(frozen=True)
class ModeIndex:
    """A single chiral mode: species, side/chirality labels and mode number."""

    species: str
    value: Fraction
    side: str = "left"
    chirality: str = "chiral"

    def __post_init__(self):
        object.__setattr__(self, "value", _as_fraction(self.value))
        _validate_mode_value(self.species, self.value)
        if self.side not in ("left", "right"):
            raise ValueError(f"bad side {self.side!r}")
        if self.chirality not in ("chiral", "anti-chiral"):
            raise ValueError(f"bad chirality {self.chirality!r}")

    @property
    def is_creation(self):
        return self.value < 0


@dataclass(frozen=True)
class FockState:
    """Occupation configuration: creation mode values in canonical order."""

    species: str
    occupied: tuple
    level: Fraction = field(init=False, compare=False)
    parity: int = field(init=False, compare=False)

    def __post_init__(self):
        occ = tuple(_as_fraction(v) for v in self.occupied)
        object.__setattr__(self, "occupied", occ)
        for v in occ:
            _validate_mode_value(self.species, v)
            if v >= 0:
                raise ValueError("occupied entries must be creation (negative) values")
        if list(occ) != sorted(occ):
            raise ValueError("occupied list must be in canonical ascending order")
        if self.species == FERMION and len(set(occ)) != len(occ):
            raise ValueError("fermionic occupations must be distinct")
        object.__setattr__(self, "level", -sum(occ, Fraction(0)))
        object.__setattr__(self, "parity", len(occ) % 2 if self.species == FERMION else 0)

    def __repr__(self):
        if not self.occupied:
            return "|0>"
        sym = "b" if self.species == FERMION else "a"
        return "".join(f"{sym}({v})" for v in self.occupied) + "|0>"


@dataclass(frozen=True)
class StateSpace:
    """Enumerated truncated Fock space with a deterministic basis order."""

    species: str
    cutoff: Fraction
    states: tuple

    def __post_init__(self):
        object.__setattr__(self, "_index", {s.occupied: i for i, s in enumerate(self.states)})

    @property
    def dimension(self):
        return len(self.states)

    @property
    def vacuum_index(self):
        return self._index[()]

    def index_of(self, occupied):
        return self._index.get(tuple(occupied))

    def level(self, i):
        return self.states[i].level

    def parity(self, i):
        return self.states[i].parity

    def __repr__(self):
        return f"StateSpace({self.species}, cutoff={self.cutoff}, dim={self.dimension})"


def _fermion_configs(cutoff):
    # parts are positive half-odd levels; subsets with distinct parts, sum <= cutoff
    parts = []
    v = HALF
    while v <= cutoff:
        parts.append(v)
        v += 1
    configs = [()]

    def extend(prefix, budget, start):
        for i in range(start, len(parts)):
            p = parts[i]
            if p > budget:
                break
            cfg = prefix + (p,)
            configs.append(cfg)
            extend(cfg, budget - p, i + 1)

    extend((), cutoff, 0)
    return configs


def _boson_configs(cutoff):
    configs = [()]

    def extend(prefix, budget, start):
        p = start
        while p <= budget:
            cfg = prefix + (p,)
            configs.append(cfg)
            extend(cfg, budget - p, p)
            p += 1
    if cutoff >= 1:
        extend((), int(cutoff), 1)
    return configs


def enumerate_basis(species, cutoff):
    """All canonical states with level <= cutoff, ordered by level then lexicographically."""
    cutoff = _as_fraction(cutoff)
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    gen = _fermion_configs if species == FERMION else _boson_configs
    if species not in (FERMION, BOSON):
        raise ValueError(f"unknown species {species!r}")
    states = []
    for cfg in gen(cutoff):
        # cfg holds positive levels of the parts; creation values are their negatives
        occ = tuple(sorted(-p for p in cfg))
        states.append(FockState(species, occ))
    states.sort(key=lambda s: (s.level, s.occupied))
    return StateSpace(species, cutoff, tuple(states))


# ---------------------------------------------------------------------------
# single-mode action on configurations (full Fock space, no truncation)

def _apply_fermion(value, occupied):
    if value < 0:
        if value in occupied:
            return None  # Pauli exclusion
        pos = bisect.bisect_left(occupied, value)
        sign = -1 if pos % 2 else 1
        return sign, occupied[:pos] + (value,) + occupied[pos:]
    target = -value
    try:
        i = occupied.index(target)
    except ValueError:
        return None
    sign = -1 if i % 2 else 1
    return sign, occupied[:i] + occupied[i + 1:]


def _apply_boson(value, occupied):
    if value < 0:
        pos = bisect.bisect_left(occupied, value)
        return 1, occupied[:pos] + (value,) + occupied[pos:]
    target = -value
    mult = occupied.count(target)
    if mult == 0:
        return None
    i = occupied.index(target)
    return mult * value, occupied[:i] + occupied[i + 1:]


def apply_mode_to_config(species, value, occupied):
    """(coefficient, new configuration) or None if the action annihilates."""
    if species == FERMION:
        return _apply_fermion(value, occupied)
    return _apply_boson(value, occupied)


@dataclass
class StateVector:
    """Sparse vector over a StateSpace basis; `truncated` flags dropped weight."""

    space: object
    amplitudes: dict
    truncated: bool = False

    @classmethod
    def vacuum(cls, space):
        return cls(space, {space.vacuum_index: Fraction(1)})

    def is_zero(self):
        return not self.amplitudes

    def __eq__(self, other):
        return self.space is other.space and _clean(self.amplitudes) == _clean(other.amplitudes)


def _clean(amps):
    return {k: v for k, v in amps.items() if v != 0}


def apply_mode(mode, vec):
    """Act with b_s or a_n on a vector; components above the cutoff are dropped and flagged."""
    space = vec.space
    if mode.species != space.species:
        raise ValueError(f"species mismatch: mode {mode.species}, space {space.species}")
    out = {}
    truncated = vec.truncated
    for i, amp in vec.amplitudes.items():
        res = apply_mode_to_config(space.species, mode.value, space.states[i].occupied)
        if res is None:
            continue
        coeff, occ = res
        j = space.index_of(occ)
        if j is None:
            truncated = True
            continue
        out[j] = out.get(j, 0) + coeff * amp
    return StateVector(space, _clean(out), truncated)


# ---------------------------------------------------------------------------
# graded sparse operators

@dataclass
class GradedOperator:
    """Sparse level- and parity-graded linear map between truncated spaces.

    ``columns[j]`` maps a domain basis index to ``{row: entry}``.  Every
    entry connects states whose levels differ by exactly ``level_shift``
    and whose parities differ by ``parity_shift``.  Mutation is limited to
    construction time (``add_entry``); all algebraic operations return new
    operators, so built operators are safe to share across threads.
    """

    domain: object
    codomain: object
    level_shift: Fraction
    parity_shift: int
    columns: dict

    @classmethod
    def zero(cls, domain, codomain, level_shift, parity_shift):
        return cls(domain, codomain, _as_fraction(level_shift), parity_shift % 2, {})

    @classmethod
    def identity(cls, space):
        cols = {j: {j: Fraction(1)} for j in range(space.dimension)}
        return cls(space, space, Fraction(0), 0, cols)

    def add_entry(self, row, col, value):
        if value == 0:
            return
        colmap = self.columns.setdefault(col, {})
        new = colmap.get(row, 0) + value
        if new == 0:
            colmap.pop(row, None)
            if not colmap:
                self.columns.pop(col, None)
        else:
            colmap[row] = new

    def entry(self, row, col):
        return self.columns.get(col, {}).get(row, 0)

    def apply(self, vec):
        if vec.space is not self.domain and vec.space.dimension != self.domain.dimension:
            raise ValueError("vector space does not match operator domain")
        out = {}
        for j, amp in vec.amplitudes.items():
            for row, val in self.columns.get(j, {}).items():
                acc = out.get(row, 0) + val * amp
                if acc == 0:
                    out.pop(row, None)
                else:
                    out[row] = acc
        return StateVector(self.codomain, _clean(out), vec.truncated)

    def __matmul__(self, other):
        if other.codomain.dimension != self.domain.dimension:
            raise ValueError("operator shapes do not compose")
        cols = {}
        for j, mid in other.columns.items():
            acc = {}
            for m, v1 in mid.items():
                for row, v2 in self.columns.get(m, {}).items():
                    s = acc.get(row, 0) + v2 * v1
                    if s == 0:
                        acc.pop(row, None)
                    else:
                        acc[row] = s
            if acc:
                cols[j] = acc
        return GradedOperator(other.domain, self.codomain,
                              self.level_shift + other.level_shift,
                              (self.parity_shift + other.parity_shift) % 2, cols)

    def __add__(self, other):
        if (self.level_shift, self.parity_shift) != (other.level_shift, other.parity_shift):
            raise ValueError("cannot add operators with different grading")
        cols = {j: dict(c) for j, c in self.columns.items()}
        out = GradedOperator(self.domain, self.codomain, self.level_shift, self.parity_shift, cols)
        for j, c in other.columns.items():
            for row, val in c.items():
                out.add_entry(row, j, val)
        return out

    def __sub__(self, other):
        return self + (other * -1)

    def __mul__(self, scalar):
        if scalar == 0:
            return GradedOperator(self.domain, self.codomain, self.level_shift,
                                  self.parity_shift, {})
        cols = {j: {r: v * scalar for r, v in c.items()} for j, c in self.columns.items()}
        return GradedOperator(self.domain, self.codomain, self.level_shift, self.parity_shift, cols)

    __rmul__ = __mul__

    def transpose(self):
        cols = {}
        for j, c in self.columns.items():
            for row, val in c.items():
                cols.setdefault(row, {})[j] = val
        return GradedOperator(self.codomain, self.domain, -self.level_shift, self.parity_shift, cols)

    def max_abs_entry(self, max_col_level=None):
        best = 0
        for j, c in self.columns.items():
            if max_col_level is not None and self.domain.level(j) > max_col_level:
                continue
            for val in c.values():
                a = abs(val)
                if a > best:
                    best = a
        return best

    def restrict_columns(self, max_level):
        cols = {j: dict(c) for j, c in self.columns.items() if self.domain.level(j) <= max_level}
        return GradedOperator(self.domain, self.codomain, self.level_shift, self.parity_shift, cols)

    def check_grading(self):
        for j, c in self.columns.items():
            for row in c:
                dl = self.codomain.level(row) - self.domain.level(j)
                dp = (self.codomain.parity(row) - self.domain.parity(j)) % 2
                if dl != self.level_shift or dp != self.parity_shift:
                    raise AssertionError(
                        f"entry ({row},{j}) violates grading: dl={dl}, dp={dp}")
        return True


def mode_operator(space, value):
    """Matrix of b_s / a_n on a truncated space (entries outside the cutoff dropped)."""
    value = _as_fraction(value)
    _validate_mode_value(space.species, value)
    parity = 1 if space.species == FERMION else 0
    op = GradedOperator.zero(space, space, -value, parity)
    for j, st in enumerate(space.states):
        res = apply_mode_to_config(space.species, value, st.occupied)
        if res is None:
            continue
        coeff, occ = res
        row = space.index_of(occ)
        if row is not None:
            op.add_entry(row, j, coeff)
    return op


def safe_max_deviation(a, b, max_col_level):
    """Largest entry of a - b over columns in the safe subspace."""
    return (a - b).max_abs_entry(max_col_level=max_col_level)


# ---------------------------------------------------------------------------
# graded tensor products

@dataclass(frozen=True)
class ProductSpace:
    """Truncated graded tensor product of two factor spaces (total level <= cutoff)."""

    left: StateSpace
    right: StateSpace
    cutoff: Fraction
    pairs: tuple = field(default=None)

    def __post_init__(self):
        if self.pairs is None:
            pairs = [(i, j)
                     for i in range(self.left.dimension)
                     for j in range(self.right.dimension)
                     if self.left.level(i) + self.right.level(j) <= self.cutoff]
            pairs.sort(key=lambda ij: (self.left.level(ij[0]) + self.right.level(ij[1]),
                                       ij[0], ij[1]))
            object.__setattr__(self, "pairs", tuple(pairs))
        object.__setattr__(self, "_index", {p: n for n, p in enumerate(self.pairs)})

    @property
    def dimension(self):
        return len(self.pairs)

    @property
    def vacuum_index(self):
        return self._index[(self.left.vacuum_index, self.right.vacuum_index)]

    def index_of(self, pair):
        return self._index.get(pair)

    def level(self, n):
        i, j = self.pairs[n]
        return self.left.level(i) + self.right.level(j)

    def parity(self, n):
        i, j = self.pairs[n]
        return (self.left.parity(i) + self.right.parity(j)) % 2


def tensor_space(left, right, cutoff):
    return ProductSpace(left, right, _as_fraction(cutoff))


def graded_tensor(op, position, pspace):
    """Embed a factor operator into the product space with the Koszul sign.

    An operator of odd parity acting on the right factor picks up
    (-1)^(parity of the left factor state); left-factor operators carry no
    sign.
    """
    if position not in ("left", "right"):
        raise ValueError("position must be 'left' or 'right'")
    out = GradedOperator.zero(pspace, pspace, op.level_shift, op.parity_shift)
    for n, (i, j) in enumerate(pspace.pairs):
        if position == "left":
            for row, val in op.columns.get(i, {}).items():
                m = pspace.index_of((row, j))
                if m is not None:
                    out.add_entry(m, n, val)
        else:
            sign = -1 if (op.parity_shift and pspace.left.parity(i)) else 1
            for row, val in op.columns.get(j, {}).items():
                m = pspace.index_of((i, row))
                if m is not None:
                    out.add_entry(m, n, sign * val)
    return out


def gram_diagonal(space):
    """Norms squared of the basis states under b_s^dag = b_{-s}, a_n^dag = a_{-n}.

    Fermionic states are orthonormal; a bosonic mode occupied n times at
    value -k contributes n! * k^n.
    """
    out = []
    for st in space.states:
        g = Fraction(1)
        if space.species == BOSON:
            run = {}
            for v in st.occupied:
                run[v] = run.get(v, 0) + 1
            for v, n in run.items():
                k = -v
                for r in range(1, n + 1):
                    g *= r * k
        out.append(g)
    return out


def invert_graded(op):
    """Exact inverse of a level- and parity-preserving operator, block by block.

    Raises ValueError if any level block is singular.
    """
    if op.level_shift != 0 or op.parity_shift != 0:
        raise ValueError("only grading-preserving operators are invertible in place")
    space = op.domain
    blocks = {}
    for n in range(space.dimension):
        blocks.setdefault(space.level(n), []).append(n)
    inv = GradedOperator.zero(space, space, 0, 0)
    for level, idx in blocks.items():
        k = len(idx)
        pos = {n: a for a, n in enumerate(idx)}
        # dense Gauss-Jordan on the block, exact when entries are exact
        a = [[op.entry(r, c) for c in idx] for r in idx]
        b = [[Fraction(1) if i == j else Fraction(0) for j in range(k)] for i in range(k)]
        for col in range(k):
            piv = None
            best = 0
            for r in range(col, k):
                m = abs(a[r][col])
                if m > best:
                    best = m
                    piv = r
            if piv is None:
                raise ValueError(f"singular level block at level {level}")
            a[col], a[piv] = a[piv], a[col]
            b[col], b[piv] = b[piv], b[col]
            pivval = a[col][col]
            a[col] = [x / pivval for x in a[col]]
            b[col] = [x / pivval for x in b[col]]
            for r in range(k):
                if r == col:
                    continue
                f = a[r][col]
                if f == 0:
                    continue
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                b[r] = [x - f * y for x, y in zip(b[r], b[col])]
        for ci, c in enumerate(idx):
            for ri, r in enumerate(idx):
                inv.add_entry(r, c, b[ri][ci])
    return inv


def level_block_determinants(op):
    """Determinant of each level block of a grading-preserving operator."""
    if op.level_shift != 0 or op.parity_shift != 0:
        raise ValueError("determinants per level block need a grading-preserving operator")
    space = op.domain
    blocks = {}
    for n in range(space.dimension):
        blocks.setdefault(space.level(n), []).append(n)
    dets = {}
    for level, idx in sorted(blocks.items()):
        k = len(idx)
        a = [[op.entry(r, c) for c in idx] for r in idx]
        det = 1
        sign = 1
        for col in range(k):
            piv = None
            best = 0
            for r in range(col, k):
                m = abs(a[r][col])
                if m > best:
                    best = m
                    piv = r
            if piv is None:
                det = 0
                break
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                sign = -sign
            det *= a[col][col]
            inv = a[col][col]
            for r in range(col + 1, k):
                f = a[r][col] / inv
                if f == 0:
                    continue
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
        dets[level] = sign * det if det != 0 else 0
    return dets
