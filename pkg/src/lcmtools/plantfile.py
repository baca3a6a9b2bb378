"""Plant files: JSON documents describing a ``RationalTF``.

Two equivalent forms are accepted (exactly one per file)::

    {"gain": 1, "zeros": [[-2, 0]], "poles": [[-1, 0], [-3, 0]]}

    {"num_coeffs": [1, 2], "den_coeffs": [1, 4, 3]}

Roots are ``[re, im]`` pairs; non-real roots must appear with their
conjugates.  Coefficients are listed in descending powers.
"""

import json

from .exceptions import DomainError
from .rational import RationalTF

ZPK_KEYS = ("gain", "zeros", "poles")
COEFF_KEYS = ("num_coeffs", "den_coeffs")


class PlantFileError(ValueError):
    """Malformed plant document; ``line``/``column`` locate JSON syntax errors."""

    def __init__(self, message, source="<plant>", line=None, column=None):
        self.source, self.line, self.column = source, line, column
        where = source if line is None else f"{source}:{line}:{column}"
        super().__init__(f"{where}: {message}")


def _number(value, what, source):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise PlantFileError(f"{what} must be a number, got {value!r}", source)
    return float(value)


def _roots(value, key, source):
    if not isinstance(value, list):
        raise PlantFileError(f"'{key}' must be a list of [re, im] pairs", source)
    out = []
    for i, pair in enumerate(value):
        if not isinstance(pair, list) or len(pair) != 2:
            raise PlantFileError(f"'{key}'[{i}] must be a [re, im] pair, got {pair!r}", source)
        re = _number(pair[0], f"'{key}'[{i}][0]", source)
        im = _number(pair[1], f"'{key}'[{i}][1]", source)
        out.append(complex(re, im))
    return out


def _coeffs(value, key, source):
    if not isinstance(value, list) or not value:
        raise PlantFileError(f"'{key}' must be a nonempty list of numbers", source)
    return [_number(c, f"'{key}'[{i}]", source) for i, c in enumerate(value)]


def plant_from_dict(doc, source="<plant>"):
    """Build a ``RationalTF`` from an already decoded plant document."""
    if not isinstance(doc, dict):
        raise PlantFileError("plant document must be a JSON object", source)
    has_zpk = any(k in doc for k in ZPK_KEYS)
    has_coeffs = any(k in doc for k in COEFF_KEYS)
    if has_zpk == has_coeffs:
        raise PlantFileError("give exactly one of {gain, zeros, poles} or "
                             "{num_coeffs, den_coeffs}", source)
    unknown = set(doc) - set(ZPK_KEYS + COEFF_KEYS)
    if unknown:
        raise PlantFileError(f"unknown keys: {sorted(unknown)}", source)
    try:
        if has_zpk:
            if "gain" not in doc or "poles" not in doc:
                raise PlantFileError("zero/pole form needs 'gain' and 'poles'", source)
            return RationalTF(_number(doc["gain"], "'gain'", source),
                              _roots(doc.get("zeros", []), "zeros", source),
                              _roots(doc["poles"], "poles", source))
        if not all(k in doc for k in COEFF_KEYS):
            raise PlantFileError("coefficient form needs 'num_coeffs' and 'den_coeffs'", source)
        return RationalTF.from_coeffs(_coeffs(doc["num_coeffs"], "num_coeffs", source),
                                      _coeffs(doc["den_coeffs"], "den_coeffs", source))
    except DomainError as exc:
        raise PlantFileError(str(exc), source) from exc


def loads_plant(text, source="<plant>"):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PlantFileError(exc.msg, source, exc.lineno, exc.colno) from exc
    return plant_from_dict(doc, source)


def load_plant(path):
    """Read and validate a plant file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise PlantFileError(exc.strerror or str(exc), str(path)) from exc
    return loads_plant(text, str(path))


def plant_to_dict(tf):
    """Zero/pole-form document for ``tf`` (inverse of :func:`plant_from_dict`)."""
    pair = lambda z: [float(z.real), float(z.imag)]
    return {"gain": float(tf.gain), "zeros": [pair(z) for z in tf.zeros],
            "poles": [pair(p) for p in tf.poles]}
