"""Symbolic field dynamics across the impurity and steady-state averages.

Fields are formal products of local factors with positions affine in the
symbols x, t.  The engine implements exactly the symmetric configurations
needed for the transport formulas: fields placed at +x and -x (x > 0),
evolved through the case split t < x versus t > x, and the stationary
scattering map relating the coupled and decoupled dynamics,

    S[phi(x)]   = phi(x)                      for chiral fields at x < 0,
    S[phibar(x)] = phibar(x)                  for anti-chiral fields at x > 0,

with the complementary cases rotated into the opposite chirality on the
mirror point.  Coefficients are exact sympy scalars; for a symbolic angle
they carry cos(alpha), sin(alpha) and the Pythagorean relation is applied
as a rewrite during simplification.

The stress tensor is handled through its fermion bilinear form,
T = -(i/2) (d psi) psi and Tbar = +(i/2) (d psibar) psibar, each factor
transforming individually; recognized bilinears are folded back into
stress factors before taking averages.  Fermion reordering inside a term
follows the same transposition-sign convention as the matrix layer.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

import sympy as sp

X = sp.Symbol("x", positive=True)
T = sp.Symbol("t", positive=True)
T_LEFT = sp.Symbol("T_l", positive=True)
T_RIGHT = sp.Symbol("T_r", positive=True)
ALPHA = sp.Symbol("alpha", real=True)

BEFORE = "t<x"   # fields have not reached the impurity
AFTER = "t>x"    # fields have crossed

FERMION_NAMES = ("psi", "chi1", "chi2")
EVEN_NAMES = ("T", "J", "identity")
KNOWN_NAMES = FERMION_NAMES + EVEN_NAMES


class UnsupportedFieldError(ValueError):
    """Field name outside the configured scattering rules."""


class RegimeError(ValueError):
    """Configuration outside the supported symmetric regime."""


class UnsupportedExpressionError(ValueError):
    """Expression outside the class the averages are defined for."""


def _coeff(c):
    if isinstance(c, Fraction):
        return sp.Rational(c.numerator, c.denominator)
    return sp.sympify(c)


@dataclass(frozen=True)
class LocalField:
    """One local factor: name, side, chirality flag, derivative order, position."""

    name: str
    side: str
    bar: bool = False
    deriv: int = 0
    position: object = X

    def __post_init__(self):
        if self.name not in KNOWN_NAMES:
            raise UnsupportedFieldError(f"unknown field name {self.name!r}")
        if self.side not in ("l", "r"):
            raise ValueError(f"side must be 'l' or 'r', got {self.side!r}")
        if self.deriv < 0:
            raise ValueError("derivative order must be >= 0")
        object.__setattr__(self, "position", sp.expand(sp.sympify(self.position)))

    @property
    def parity(self):
        return 1 if self.name in FERMION_NAMES else 0

    @property
    def chirality(self):
        return "anti-chiral" if self.bar else "chiral"

    def shifted(self, delta):
        return replace(self, position=sp.expand(self.position + delta))

    def __str__(self):
        base = self.name + ("bar" if self.bar else "")
        d = "d" * self.deriv
        return f"{d}{base}^{self.side}({self.position})"


def _sort_key(f):
    # spatial order first (positions are affine in x, t with t > x > 0 in the
    # crossed regime; the sample point fixes a deterministic total order)
    val = f.position.subs({X: 1, T: sp.sqrt(2)})
    return (sp.default_sort_key(val), f.side, f.bar, f.name)


@dataclass(frozen=True)
class FieldExpression:
    """Linear combination of ordered products of local fields."""

    terms: tuple  # of (coeff, factors)

    @classmethod
    def from_field(cls, f, coeff=1):
        return cls(((_coeff(coeff), (f,)),))

    @classmethod
    def zero(cls):
        return cls(())

    @classmethod
    def one(cls, coeff=1):
        return cls(((_coeff(coeff), ()),))

    def __add__(self, other):
        return FieldExpression(self.terms + other.terms)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        c = _coeff(c)
        return FieldExpression(tuple((c * k, fs) for k, fs in self.terms))

    def product(self, other):
        out = []
        for c1, f1 in self.terms:
            for c2, f2 in other.terms:
                out.append((c1 * c2, f1 + f2))
        return FieldExpression(tuple(out))

    def map_factors(self, fn):
        """Extend a single-factor linear map multiplicatively over products."""
        out = FieldExpression.zero()
        for coeff, factors in self.terms:
            piece = FieldExpression.one(coeff)
            for f in factors:
                piece = piece.product(fn(f))
            out = out + piece
        return out

    def normalize(self):
        """Canonically order factors (with fermion signs), merge and simplify."""
        merged = {}
        for coeff, factors in self.terms:
            factors = tuple(f for f in factors if f.name != "identity")
            sign, ordered = _graded_sort(factors)
            key = ordered
            merged[key] = merged.get(key, sp.Integer(0)) + sign * coeff
        terms = []
        for factors, coeff in merged.items():
            c = sp.simplify(sp.expand(coeff))
            if c != 0:
                terms.append((c, factors))
        terms.sort(key=lambda t: tuple(str(f) for f in t[1]))
        return FieldExpression(tuple(terms))

    def subs(self, mapping):
        return FieldExpression(tuple((sp.expand(c.subs(mapping)), fs) for c, fs in self.terms))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for coeff, factors in self.terms:
            fs = "*".join(str(f) for f in factors) if factors else "1"
            parts.append(f"({coeff})*{fs}")
        return " + ".join(parts)


def _group_key(f):
    # factors sharing this key are never reordered (same-point same-field
    # products carry a contraction and must keep their given order)
    return (f.side, f.bar, f.name, sp.srepr(f.position))


def _graded_sort(factors):
    fs = list(factors)
    sign = 1
    # insertion sort; swapping two odd factors with distinct group keys
    # flips the sign, equal group keys are never swapped
    for i in range(1, len(fs)):
        j = i
        while j > 0:
            a, b = fs[j - 1], fs[j]
            if _group_key(a) == _group_key(b) or _sort_key(a) <= _sort_key(b):
                break
            fs[j - 1], fs[j] = b, a
            if a.parity and b.parity:
                sign = -sign
            j -= 1
    return sign, tuple(fs)


# ---------------------------------------------------------------------------
# stress tensor as a fermion bilinear

def stress(side, position, bar=False):
    return LocalField("T", side, bar=bar, position=position)


def fermion(side, position, bar=False, deriv=0, name="psi"):
    return LocalField(name, side, bar=bar, deriv=deriv, position=position)


def expand_stress(expr, left_field="psi", right_field="psi"):
    """Replace stress factors by their bilinear form at the same point."""

    def fn(f):
        if f.name != "T":
            return FieldExpression.from_field(f)
        name = left_field if f.side == "l" else right_field
        dpsi = LocalField(name, f.side, bar=f.bar, deriv=1, position=f.position)
        psi = LocalField(name, f.side, bar=f.bar, deriv=0, position=f.position)
        coeff = sp.I / 2 if f.bar else -sp.I / 2
        return FieldExpression(((coeff, (dpsi, psi)),))

    return expr.map_factors(fn)


def collect_stress(expr):
    """Fold recognized (d psi) psi bilinears at one point back into stress factors."""
    out = []
    for coeff, factors in expr.terms:
        if len(factors) == 2:
            a, b = factors
            same = (a.name == b.name and a.side == b.side and a.bar == b.bar
                    and sp.expand(a.position - b.position) == 0
                    and a.name in FERMION_NAMES)
            if same and a.deriv == 1 and b.deriv == 0:
                k = coeff * (-2 * sp.I) if a.bar else coeff * (2 * sp.I)
                out.append((sp.expand(k), (stress(a.side, a.position, bar=a.bar),)))
                continue
        out.append((coeff, factors))
    return FieldExpression(tuple(out)).normalize()


# ---------------------------------------------------------------------------
# scattering data

def _theta_pair(theta):
    """(cos, sin) from a BogoliubovSpec, a pair, or None for the symbolic angle."""
    if theta is None:
        return sp.cos(ALPHA), sp.sin(ALPHA)
    if hasattr(theta, "cos_a"):
        return _coeff(theta.cos_a), _coeff(theta.sin_a)
    c, s = theta
    return _coeff(c), _coeff(s)


@dataclass(frozen=True)
class ScatteringRules:
    """Mode rotation for the fermion doublet crossing the impurity.

    ``left_field`` names the anti-chiral fermion arriving from the left,
    ``right_field`` the chiral fermion arriving from the right.
    """

    cos_a: object
    sin_a: object
    left_field: str = "psi"
    right_field: str = "psi"

    @classmethod
    def from_theta(cls, theta, left_field="psi", right_field="psi"):
        c, s = _theta_pair(theta)
        return cls(c, s, left_field, right_field)


def _require_symmetric(f):
    pos = sp.expand(f.position)
    want = -X if f.side == "l" else X
    if pos != want:
        raise RegimeError(
            f"field {f} is outside the supported symmetric configuration "
            f"(left fields at -x, right fields at +x)")


def evolve(expr, t, rules, regime=AFTER):
    """Ballistic evolution with scattering on the impurity.

    Chiral factors shift to x - t, anti-chiral ones to x + t; in the
    crossed regime (t > x) the factors that reach the impurity are replaced
    by their rotated images relocated to the mirror point.
    """
    if regime not in (BEFORE, AFTER):
        raise RegimeError(f"unknown regime {regime!r}")
    t = sp.sympify(t)
    c, s = _coeff(rules.cos_a), _coeff(rules.sin_a)

    def fn(f):
        if f.name == "identity":
            return FieldExpression.from_field(f)
        if f.name == "T":
            raise UnsupportedFieldError("expand stress factors before evolving")
        _require_symmetric(f)
        crossing = regime == AFTER
        if not f.bar and f.side == "l":
            return FieldExpression.from_field(f.shifted(-t))
        if f.bar and f.side == "r":
            return FieldExpression.from_field(f.shifted(t))
        if not f.bar and f.side == "r":
            if not crossing:
                return FieldExpression.from_field(f.shifted(-t))
            if f.name != rules.right_field:
                raise UnsupportedFieldError(f"no crossing rule for {f.name!r}")
            km = (-1) ** f.deriv
            trans = LocalField(rules.left_field, "l", bar=False, deriv=f.deriv,
                               position=f.position - t)
            refl = LocalField(rules.right_field, "r", bar=True, deriv=f.deriv,
                              position=t - f.position)
            return FieldExpression(((c, (trans,)), (km * s, (refl,))))
        # anti-chiral on the left
        if not crossing:
            return FieldExpression.from_field(f.shifted(t))
        if f.name != rules.left_field:
            raise UnsupportedFieldError(f"no crossing rule for {f.name!r}")
        km = (-1) ** f.deriv
        trans = LocalField(rules.right_field, "r", bar=True, deriv=f.deriv,
                           position=f.position + t)
        refl = LocalField(rules.left_field, "l", bar=False, deriv=f.deriv,
                          position=-f.position - t)
        return FieldExpression(((c, (trans,)), (-km * s, (refl,))))

    return expr.map_factors(fn).normalize()


def apply_smatrix(expr, theta, theta0=None, left_field="psi", right_field="psi"):
    """Stationary scattering map relating coupled and decoupled dynamics.

    Chiral fields at x < 0 and anti-chiral fields at x > 0 pass through;
    the complementary cases are rotated by the relative angle between the
    defect and the decoupled (pure reflection) dynamics, relocated to the
    mirror point.  With theta equal to theta0 the map is the identity.
    """
    c, s = _theta_pair(theta)
    if theta0 is None:
        c0, s0 = sp.Integer(0), sp.Integer(1)
    else:
        c0, s0 = _theta_pair(theta0)
    tcoef = sp.expand(c * c0 + s * s0)
    rcoef = sp.expand(s * c0 - c * s0)
    expr = expand_stress(expr, left_field, right_field)

    def fn(f):
        if f.name == "identity":
            return FieldExpression.from_field(f)
        if not f.bar and f.side == "l":
            return FieldExpression.from_field(f)
        if f.bar and f.side == "r":
            return FieldExpression.from_field(f)
        km = (-1) ** f.deriv
        if not f.bar and f.side == "r":
            if f.name != right_field:
                raise UnsupportedFieldError(f"no scattering rule for {f.name!r}")
            partner = LocalField(left_field, "l", bar=True, deriv=f.deriv,
                                 position=-f.position)
            return FieldExpression(((tcoef, (f,)), (km * rcoef, (partner,))))
        if f.name != left_field:
            raise UnsupportedFieldError(f"no scattering rule for {f.name!r}")
        partner = LocalField(right_field, "r", bar=False, deriv=f.deriv,
                             position=-f.position)
        return FieldExpression(((tcoef, (f,)), (-km * rcoef, (partner,))))

    return collect_stress(expr.map_factors(fn))


# ---------------------------------------------------------------------------
# averages in the two-temperature product state

@dataclass(frozen=True)
class GibbsWeights:
    """Temperatures of the decoupled halves (natural units).

    Zero is allowed as a ground-state limit; entropy production needs
    strictly positive temperatures.
    """

    t_left: object = T_LEFT
    t_right: object = T_RIGHT

    def __post_init__(self):
        for v in (self.t_left, self.t_right):
            if isinstance(v, (int, float, Fraction)) and v < 0:
                raise ValueError("temperatures must be >= 0")


def expectation(expr, weights=None, c_left=sp.Rational(1, 2), c_right=sp.Rational(1, 2)):
    """Average of stress factors and mismatched fermion bilinears.

    Stress factors contribute (pi c / 12) T^2 for their side; products of
    fermions at mismatched points or sides average to zero by parity of
    the Gaussian state; anything else is outside the supported class.
    """
    weights = weights or GibbsWeights()
    tl, tr = sp.sympify(weights.t_left), sp.sympify(weights.t_right)
    expr = collect_stress(expr.normalize())
    total = sp.Integer(0)
    for coeff, factors in expr.terms:
        if not factors:
            total += coeff
            continue
        if len(factors) == 1 and factors[0].name == "T":
            f = factors[0]
            c = c_left if f.side == "l" else c_right
            temp = tl if f.side == "l" else tr
            total += coeff * sp.pi * c / 12 * temp ** 2
            continue
        if all(f.name in FERMION_NAMES for f in factors):
            if len(factors) % 2 == 1:
                continue  # odd fermion number averages to zero
            if len(factors) == 2:
                a, b = factors
                matched = (a.name == b.name and a.side == b.side and a.bar == b.bar
                           and sp.expand(a.position - b.position) == 0)
                if matched:
                    raise UnsupportedExpressionError(
                        f"coincident-point pair {a}, {b} was not recognized as a stress factor")
                continue  # mismatched pair: zero by Gaussian parity per side
            raise UnsupportedExpressionError("only bilinear fermion products are supported")
        raise UnsupportedExpressionError(
            f"term with factors {[str(f) for f in factors]} is outside the averaging class")
    return sp.simplify(total)


def energy_current(theta, theta0=None, weights=None, side="r", c_left=sp.Rational(1, 2),
                   c_right=sp.Rational(1, 2), left_field="psi", right_field="psi"):
    """Steady energy current, computed by scattering the momentum density.

    Evaluates the average of S[T(x) - Tbar(x)] with the fields placed on
    the requested side of the impurity; the two side choices must agree.
    """
    weights = weights or GibbsWeights()
    pos = X if side == "r" else -X
    p = (FieldExpression.from_field(stress(side, pos))
         - FieldExpression.from_field(stress(side, pos, bar=True)))
    scattered = apply_smatrix(p, theta, theta0, left_field, right_field)
    return sp.simplify(expectation(scattered, weights, c_left, c_right))


def entropy_production(j_e, weights=None):
    """Entropy production rate (1/T_r - 1/T_l) J_E."""
    weights = weights or GibbsWeights()
    tl, tr = sp.sympify(weights.t_left), sp.sympify(weights.t_right)
    return sp.simplify((1 / tr - 1 / tl) * j_e)


def check_global_continuity(theta=None, regime=AFTER):
    """Verify T(x,t) + Tbar(-x,t) = T(x-t) + Tbar(-x+t) by symbolic cancellation."""
    rules = ScatteringRules.from_theta(theta)
    lhs = (expand_stress(FieldExpression.from_field(stress("r", X)))
           + expand_stress(FieldExpression.from_field(stress("l", -X, bar=True))))
    lhs = evolve(lhs, T, rules, regime=regime)
    if regime == AFTER:
        rhs = (FieldExpression.from_field(stress("l", X - T))
               + FieldExpression.from_field(stress("r", T - X, bar=True)))
    else:
        rhs = (FieldExpression.from_field(stress("r", X - T))
               + FieldExpression.from_field(stress("l", T - X, bar=True)))
    rhs = expand_stress(rhs).normalize()
    diff = (lhs - rhs).normalize()
    return all(sp.simplify(c) == 0 for c, _ in diff.terms)


def stress_coefficients(expr):
    """Coefficients of the stress factors in a normalized expression."""
    out = {}
    for coeff, factors in collect_stress(expr).terms:
        if len(factors) == 1 and factors[0].name == "T":
            f = factors[0]
            key = (f.side, f.bar, sp.srepr(f.position))
            out[key] = out.get(key, sp.Integer(0)) + coeff
    return out


def current_report(theta, theta0=None, weights=None):
    """JSON-ready record of a current computation."""
    weights = weights or GibbsWeights()
    j = energy_current(theta, theta0, weights)
    degenerate = any(isinstance(v, (int, float, Fraction)) and v == 0
                     for v in (weights.t_left, weights.t_right))
    sigma = None if degenerate else entropy_production(j, weights)
    numeric_j = None
    numeric_sigma = None
    if not j.free_symbols:
        numeric_j = float(j)
        if sigma is not None and not sigma.free_symbols:
            numeric_sigma = float(sigma)
    return {
        "inputs": {
            "theta_cos_sin": [str(v) for v in _theta_pair(theta)],
            "T_l": str(weights.t_left),
            "T_r": str(weights.t_right),
        },
        "symbolic_result": {"J_E": str(j), "sigma": str(sigma)},
        "numeric_result": {"J_E": numeric_j, "sigma": numeric_sigma},
    }
