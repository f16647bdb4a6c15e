"""Loaders for the packaged data tables.

Every table ships as JSON under quadforms/data/.  Form strings are parsed on
load and round-tripped through the polynomial printer once, so a corrupted
fixture fails loudly at load time rather than deep inside a pipeline.  Each
loader accepts an optional directory override (the CLI's --fixtures flag);
hashes of the active files are exposed for reproducibility headers.
"""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .forms_core import GramForm, parse_form, format_form

_FILES = (
    "sp_sets.json",
    "ternary_summary.json",
    "coprime_universal_ternaries.json",
    "quaternary_counts.json",
    "switch_rules.json",
    "method_tallies.json",
    "truant_witnesses.json",
    "congruence_claims.json",
    "substitution_identities.json",
    "genus_fixtures.json",
    "analytic_constants.json",
    "exception_witnesses.json",
    "regular_ternaries.json",
)


def _data_dir() -> Path:
    return Path(str(resources.files("quadforms").joinpath("data")))


def _load(name: str, directory: str | None = None) -> dict:
    base = Path(directory) if directory is not None else _data_dir()
    path = base / name
    if not path.is_file():
        raise FileNotFoundError(f"missing fixture file {path}")
    with open(path, encoding="utf-8") as fp:
        return json.load(fp)


def fixture_hashes(directory: str | None = None) -> dict[str, str]:
    """sha256 of every fixture file, for run-reproducibility headers."""
    base = Path(directory) if directory is not None else _data_dir()
    out = {}
    for name in _FILES:
        path = base / name
        if path.is_file():
            out[name] = hashlib.sha256(path.read_bytes()).hexdigest()[:16]
    return out


def checked_form(text: str) -> GramForm:
    """Parse a fixture form string and verify the printer round-trips it."""
    form = parse_form(text)
    again = parse_form(format_form(form, "polynomial"))
    if again.gram != form.gram:
        raise ValueError(f"fixture form does not round-trip: {text!r}")
    return form


# ---------------------------------------------------------------------------
# critical sets
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def critical_set(p: int, classical: bool = False) -> tuple[int, ...]:
    """The finite representation criterion for coprime-universality at p:
    a form (classical form, if flagged) is coprime-universal iff it
    represents every member."""
    data = _load("sp_sets.json")
    if classical:
        named = data["classical_sets"].get(str(p))
        if named is not None:
            return tuple(named)
        base = data["classical_base_set"]
        return tuple(n for n in base if p == 1 or n % p)
    base = set(data["base_set"])
    base.update(data["extra_elements"].get(str(p), ()))
    return tuple(sorted(n for n in base if p == 1 or n % p))


# ---------------------------------------------------------------------------
# table loaders
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def ternary_summary(directory: str | None = None) -> list[dict]:
    data = _load("ternary_summary.json", directory)
    for seed in data["binary_seeds"]:
        seed["gram"] = checked_form(seed["form"])
    return data


@lru_cache(maxsize=None)
def cu_ternaries(directory: str | None = None) -> dict:
    """Coprime-universal ternaries: {'provable': [(prime, form)...],
    'conjectural': [(prime, label, form)...], 'by_label': {label: form}}."""
    data = _load("coprime_universal_ternaries.json", directory)
    provable = [(row["prime"], checked_form(row["form"])) for row in data["provable"]]
    conjectural = [
        (row["prime"], row["label"], checked_form(row["form"]))
        for row in data["conjectural"]
    ]
    return {
        "provable": provable,
        "conjectural": conjectural,
        "by_label": {label: form for _, label, form in conjectural},
        "classical_provable_5": [
            checked_form(s) for s in data["classical_provable_primes_5"]
        ],
    }


def form_by_label(label: str) -> GramForm:
    return cu_ternaries()["by_label"][label]


@lru_cache(maxsize=None)
def quaternary_counts(directory: str | None = None) -> dict:
    data = _load("quaternary_counts.json", directory)
    data["by_prime"] = {row["prime"]: row for row in data["rows"]}
    data["quintet_forms"] = [checked_form(s) for s in data["obstructed_quintet"]]
    return data


@lru_cache(maxsize=None)
def switch_rules(directory: str | None = None) -> list[dict]:
    rows = _load("switch_rules.json", directory)["rows"]
    for row in rows:
        row["gram"] = checked_form(row["ternary"])
        if "equivalent" in row:
            row["equivalent_gram"] = checked_form(row["equivalent"])
    return rows


def switch_norm_for(prime: int, directory: str | None = None) -> dict[int, int]:
    """Map from switch-rule row index to the switch norm used at this prime."""
    out = {}
    for i, row in enumerate(switch_rules(directory)):
        norm = row["switch"].get(str(prime), row["switch"].get("default"))
        if norm is not None:
            out[i] = norm
    return out


@lru_cache(maxsize=None)
def method_tallies(directory: str | None = None) -> dict[int, dict]:
    rows = _load("method_tallies.json", directory)["rows"]
    return {row["prime"]: row for row in rows}


@lru_cache(maxsize=None)
def truant_witnesses(directory: str | None = None) -> list[dict]:
    rows = _load("truant_witnesses.json", directory)["rows"]
    for row in rows:
        row["gram"] = checked_form(row["form"])
    return rows


@lru_cache(maxsize=None)
def congruence_claims(directory: str | None = None) -> list[dict]:
    rows = _load("congruence_claims.json", directory)["rows"]
    labels = cu_ternaries()["by_label"]
    for row in rows:
        row["gram"] = labels[row["label"]]
    return rows


@lru_cache(maxsize=None)
def substitution_identities(directory: str | None = None) -> list[dict]:
    rows = _load("substitution_identities.json", directory)["rows"]
    labels = cu_ternaries()["by_label"]
    for row in rows:
        row["source_gram"] = labels[row["source"]]
        row["target_gram"] = checked_form(row["target"])
    return rows


@lru_cache(maxsize=None)
def genus_fixtures(directory: str | None = None) -> dict[str, dict]:
    genera = _load("genus_fixtures.json", directory)["genera"]
    for entry in genera.values():
        entry["grams"] = [checked_form(s) for s in entry["members"]]
        if "average_prefix" in entry:
            entry["average"] = [Fraction(s) for s in entry["average_prefix"]]
    return genera


@lru_cache(maxsize=None)
def analytic_constants(directory: str | None = None) -> dict[str, dict]:
    rows = _load("analytic_constants.json", directory)["rows"]
    for row in rows:
        row["gram"] = checked_form(row["form"])
        if "c_e" in row:
            row["c_e_exact"] = Fraction(row["c_e"])
    return {row["id"]: row for row in rows}


@lru_cache(maxsize=None)
def exception_witnesses(directory: str | None = None) -> dict:
    data = _load("exception_witnesses.json", directory)
    for row in data["rows"]:
        row["gram"] = checked_form(row["form"])
        for key in ("regular_sublattice", "universal_sublattice"):
            if key in row:
                row[key]["ternary_gram"] = checked_form(row[key]["ternary"])
    data["by_id"] = {row["id"]: row for row in data["rows"]}
    return data


@lru_cache(maxsize=None)
def regular_ternaries(path: str | None = None) -> list[GramForm]:
    """The curated regular-ternary list, or a drop-in replacement file."""
    if path is None:
        data = _load("regular_ternaries.json")
    else:
        with open(path, encoding="utf-8") as fp:
            data = json.load(fp)
    return [checked_form(s) for s in data["forms"]]
