"""Optional on-disk cache for enumerated bases and operator matrices.

Files are versioned JSON with a self-describing header (species, cutoff,
dimension) and are written atomically via a temp file and os.replace, so a
crashed writer never leaves a truncated cache entry behind.  Keys are
(species, cutoff) for spaces and (species, cutoff, name) for operators.
"""

from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction

from .fock import FockState, GradedOperator, StateSpace

FORMAT_VERSION = 1


def _frac_str(x):
    return f"{Fraction(x).numerator}/{Fraction(x).denominator}"


def _parse_frac(s):
    num, den = s.split("/")
    return Fraction(int(num), int(den))


def _space_filename(species, cutoff):
    c = Fraction(cutoff)
    return f"{species}_L{c.numerator}_{c.denominator}_basis.json"


def _operator_filename(species, cutoff, name):
    c = Fraction(cutoff)
    return f"{species}_L{c.numerator}_{c.denominator}_{name}.json"


def _atomic_write(path, payload):
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_space(directory, space):
    payload = {
        "format": FORMAT_VERSION,
        "kind": "state_space",
        "species": space.species,
        "cutoff": _frac_str(space.cutoff),
        "dimension": space.dimension,
        "basis": [[_frac_str(v) for v in st.occupied] for st in space.states],
    }
    path = os.path.join(directory, _space_filename(space.species, space.cutoff))
    _atomic_write(path, payload)
    return path


def load_space(directory, species, cutoff):
    """Returns the cached StateSpace or None when absent."""
    path = os.path.join(directory, _space_filename(species, cutoff))
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("format") != FORMAT_VERSION or payload.get("kind") != "state_space":
        raise ValueError(f"unrecognized cache file {path}")
    if payload["species"] != species or _parse_frac(payload["cutoff"]) != Fraction(cutoff):
        raise ValueError(f"cache header mismatch in {path}")
    states = tuple(FockState(species, tuple(_parse_frac(v) for v in occ))
                   for occ in payload["basis"])
    if len(states) != payload["dimension"]:
        raise ValueError(f"cache dimension mismatch in {path}")
    return StateSpace(species, Fraction(cutoff), states)


def save_operator(directory, space, name, op):
    entries = []
    for col, rows in sorted(op.columns.items()):
        for row, val in sorted(rows.items()):
            entries.append([row, col, _frac_str(val)])
    payload = {
        "format": FORMAT_VERSION,
        "kind": "graded_operator",
        "species": space.species,
        "cutoff": _frac_str(space.cutoff),
        "dimension": space.dimension,
        "name": name,
        "level_shift": _frac_str(op.level_shift),
        "parity_shift": op.parity_shift,
        "entries": entries,
    }
    path = os.path.join(directory, _operator_filename(space.species, space.cutoff, name))
    _atomic_write(path, payload)
    return path


def load_operator(directory, space, name):
    path = os.path.join(directory, _operator_filename(space.species, space.cutoff, name))
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("format") != FORMAT_VERSION or payload.get("kind") != "graded_operator":
        raise ValueError(f"unrecognized cache file {path}")
    if (payload["species"] != space.species
            or _parse_frac(payload["cutoff"]) != space.cutoff
            or payload["dimension"] != space.dimension):
        raise ValueError(f"cache header mismatch in {path}")
    op = GradedOperator.zero(space, space, _parse_frac(payload["level_shift"]),
                             payload["parity_shift"])
    for row, col, val in payload["entries"]:
        op.add_entry(row, col, _parse_frac(val))
    return op
