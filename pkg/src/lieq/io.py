"""Ingestion, reports, and persistence.

Everything on disk is JSON with rationals encoded as strings ("3/2"), so
exact data never passes through floats; floating-point values appear only
in Monte-Carlo weight fields and are tagged as estimates by their
provenance.  Writes are atomic (temp file + rename) and the artifact
cache is content-addressed: entries are stored under a hash of their
inputs and verified against a content hash on load.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from ._version import __version__
from .core import SubalgebraSetup, ValidationError, validate_raw
from .enveloping import InvariantAlgebraPresentation, QuotientElement
from .library import builtin_algebra, builtin_setup, is_builtin

SCHEMA_VERSION = 1


class IngestError(Exception):
    """Parse or validation failure; `errors` lists every violation found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def encode_fraction(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def decode_fraction(s):
    return Fraction(s)


# -- algebra files -------------------------------------------------------

def ingest(source):
    """Load an algebra description from a builtin name or a JSON file.

    Returns (LieAlgebraData, SubalgebraSetup or None).  All parse and
    validation violations are collected and reported together.
    """
    if isinstance(source, (str, Path)) and is_builtin(str(source)):
        return builtin_algebra(str(source)), builtin_setup(str(source))
    path = Path(source)
    if not path.exists():
        raise IngestError([f"no such file or builtin: {source}"])
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise IngestError(
            [f"{path}: parse error at line {exc.lineno}, column {exc.colno}: "
             f"{exc.msg}"]) from exc
    return parse_algebra_dict(raw, origin=str(path))


def parse_algebra_dict(raw, origin="<dict>"):
    errors = []
    if not isinstance(raw, dict):
        raise IngestError([f"{origin}: top level must be an object"])
    basis = raw.get("basis")
    if not isinstance(basis, list) or not all(isinstance(b, str) for b in basis):
        raise IngestError([f"{origin}: 'basis' must be a list of names"])
    if len(set(basis)) != len(basis):
        errors.append(f"{origin}: duplicate basis names")
    idx = {n: i for i, n in enumerate(basis)}
    brackets = {}
    for entry in raw.get("brackets", []):
        left, right = entry.get("left"), entry.get("right")
        if left not in idx or right not in idx:
            errors.append(f"{origin}: bracket [{left},{right}] uses unknown names")
            continue
        comps = {}
        for name, value in entry.get("result", {}).items():
            if name not in idx:
                errors.append(f"{origin}: bracket result name {name!r} unknown")
                continue
            try:
                comps[idx[name]] = decode_fraction(value)
            except (ValueError, ZeroDivisionError):
                errors.append(f"{origin}: bad rational {value!r} in "
                              f"[{left},{right}]")
        brackets[(idx[left], idx[right])] = comps
    if errors:
        raise IngestError(errors)
    report = validate_raw(tuple(basis), brackets)
    if not report.valid:
        raise IngestError([f"{origin}: {v}" for v in report.violations])
    from .core import LieAlgebraData
    algebra = LieAlgebraData.from_brackets(tuple(basis), brackets)

    setup = None
    h_names = raw.get("subalgebra")
    if h_names is not None:
        lam = {}
        for name, value in (raw.get("lambda") or {}).items():
            try:
                lam[name] = decode_fraction(value)
            except (ValueError, ZeroDivisionError):
                errors.append(f"{origin}: bad rational {value!r} in lambda")
        if errors:
            raise IngestError(errors)
        try:
            setup = SubalgebraSetup.build(algebra, h_names=h_names, lam=lam)
        except ValidationError as exc:
            raise IngestError(
                [f"{origin}: {v}" for v in exc.report.violations]) from exc
    return algebra, setup


def algebra_to_dict(algebra, setup=None, name=None):
    """Inverse of parse_algebra_dict, suitable for JSON round-trips."""
    names = algebra.basis_names
    out = {
        "name": name or "",
        "basis": list(names),
        "brackets": [
            {"left": names[i], "right": names[j],
             "result": {names[k]: encode_fraction(c) for k, c in comps}}
            for i, j, comps in algebra.table
        ],
    }
    if setup is not None:
        snames = setup.algebra.basis_names
        out["subalgebra"] = [snames[i] for i in setup.h_indices]
        out["lambda"] = {
            snames[i]: encode_fraction(v.constant_term())
            for i, v in setup.lam if not v.is_zero()
        }
    return out


# -- atomic writes and reports -------------------------------------------

def atomic_write_text(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, payload):
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(x) for x in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


@dataclass
class RunReport:
    """One CLI invocation's result: config echo, payload, and provenance."""
    command: str
    config: dict
    results: dict
    seeds: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "seeds": self.seeds,
            "timings": self.timings,
        }

    def save(self, path):
        write_json(path, self.to_dict())
        return Path(path)


# -- presentation serialization ------------------------------------------

def _eps_coeff_to_json(co):
    return [[k, encode_fraction(c)] for k, c in sorted(co)]


def _eps_coeff_from_json(raw):
    return tuple((int(k), decode_fraction(c)) for k, c in raw)


def presentation_to_dict(pres):
    products = {}
    for (i, j), val in pres.products.items():
        key = f"{i},{j}"
        if val == "overflow":
            products[key] = "overflow"
        else:
            products[key] = [
                {str(k): encode_fraction(c) for k, c in co.items()}
                for co in val
            ]
    return {
        "max_degree": pres.max_degree,
        "basis": [
            [[list(word), _eps_coeff_to_json(co)] for word, co in b.terms]
            for b in pres.basis
        ],
        "products": products,
        "per_degree_dimensions": {
            str(d): v for d, v in pres.per_degree_dimensions().items()
        },
    }


def presentation_from_dict(raw, setup):
    basis = []
    for terms in raw["basis"]:
        basis.append(QuotientElement(
            setup=setup,
            terms=tuple(sorted((tuple(word), _eps_coeff_from_json(co))
                               for word, co in terms))))
    products = {}
    for key, val in raw["products"].items():
        i, j = (int(x) for x in key.split(","))
        if val == "overflow":
            products[(i, j)] = "overflow"
        else:
            products[(i, j)] = [
                {int(k): decode_fraction(c) for k, c in co.items()}
                for co in val
            ]
    return InvariantAlgebraPresentation(
        setup=setup, max_degree=int(raw["max_degree"]),
        basis=basis, products=products)


# -- content-addressed artifact cache ------------------------------------

def _canonical_json(payload):
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _digest(payload):
    return hashlib.sha256(_canonical_json(payload).encode()).hexdigest()


class ArtifactCache:
    """Content-addressed store keyed by a hash of the producing inputs.

    Stored entries carry a hash of their own content; `load` recomputes
    it and refuses to return corrupted or tampered data.  The tool
    version participates in the key, so version bumps invalidate every
    entry.  Stores are idempotent: identical inputs map to the same path.
    """

    def __init__(self, root):
        self.root = Path(root)

    def key_for(self, kind, inputs):
        return _digest({"kind": kind, "inputs": inputs,
                        "tool_version": __version__})

    def path_for(self, key):
        return self.root / f"{key}.json"

    def store(self, kind, inputs, content):
        key = self.key_for(kind, inputs)
        path = self.path_for(key)
        write_json(path, {
            "kind": kind,
            "key": key,
            "content_hash": _digest(content),
            "content": content,
        })
        return path

    def load(self, kind, inputs):
        """Content dict, or None when absent.  Hash mismatch is an error."""
        key = self.key_for(kind, inputs)
        path = self.path_for(key)
        if not path.exists():
            return None
        entry = json.loads(path.read_text())
        if entry.get("key") != key or entry.get("kind") != kind:
            raise ValueError(f"cache entry {path} does not match its key")
        if _digest(entry.get("content")) != entry.get("content_hash"):
            raise ValueError(f"cache entry {path} failed content verification")
        return entry["content"]
