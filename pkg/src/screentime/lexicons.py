"""Loaders for the editable lexicon data files.

Default files ship under screentime/data/: stop words, a country/alias
table with exclusion rules, dated news events with their term lists,
mention rules (honorific counting), and a name denylist for the ranked
word lists.
"""

from __future__ import annotations

import csv
import json
from datetime import date
from importlib import resources
from pathlib import Path

from .analytics import CountryLexicon, MentionRule, NewsEvent
from .errors import SchemaError


def _default(name: str) -> Path:
    return Path(str(resources.files("screentime").joinpath("data", name)))


def load_stopwords(path: str | Path | None = None) -> frozenset:
    path = Path(path) if path else _default("stopwords.txt")
    words = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.upper())
    return frozenset(words)


def load_name_denylist(path: str | Path | None = None) -> frozenset:
    path = Path(path) if path else _default("name_denylist.txt")
    names = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            names.add(line.upper())
    return frozenset(names)


def load_countries(path: str | Path | None = None) -> CountryLexicon:
    path = Path(path) if path else _default("countries.csv")
    aliases: dict = {}
    exclude_prev: dict = {}
    omitted = set()
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        expected = ["canonical", "alias", "exclude_prev", "omit"]
        if reader.fieldnames != expected:
            raise SchemaError(f"countries.csv header must be {','.join(expected)}", str(path), 1)
        for lineno, row in enumerate(reader, start=2):
            canonical = row["canonical"].strip()
            alias = tuple(row["alias"].strip().upper().split())
            if not canonical or not alias:
                raise SchemaError("canonical and alias are required", str(path), lineno)
            if alias in aliases:
                raise SchemaError(f"duplicate alias {' '.join(alias)!r}", str(path), lineno)
            aliases[alias] = canonical
            prev = row["exclude_prev"].strip()
            if prev:
                exclude_prev[alias] = tuple(p.upper() for p in prev.split(";") if p)
            if row["omit"].strip() == "1":
                omitted.add(canonical)
    return CountryLexicon(aliases, exclude_prev, frozenset(omitted))


def load_events(path: str | Path | None = None) -> list[NewsEvent]:
    path = Path(path) if path else _default("events.csv")
    events = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        expected = ["date", "category", "name", "terms"]
        if reader.fieldnames != expected:
            raise SchemaError(f"events.csv header must be {','.join(expected)}", str(path), 1)
        for lineno, row in enumerate(reader, start=2):
            try:
                day = date.fromisoformat(row["date"].strip())
            except ValueError:
                raise SchemaError("invalid event date", str(path), lineno) from None
            terms = tuple(t.strip() for t in row["terms"].split(";") if t.strip())
            if not terms:
                raise SchemaError("event needs at least one term", str(path), lineno)
            events.append(NewsEvent(day, row["category"].strip(), row["name"].strip(), terms))
    return events


def load_mention_rules(path: str | Path | None = None) -> dict[str, MentionRule]:
    path = Path(path) if path else _default("mention_rules.json")
    data = json.loads(path.read_text(encoding="utf-8"))
    rules = {}
    for name, body in data.items():
        rules[name] = MentionRule(
            name=name,
            target=tuple(body["target"]),
            honorifics=tuple(tuple(h) for h in body.get("honorifics", [])),
            excluded_prev=tuple(body.get("excluded_prev", [])),
            excluded_next=tuple(body.get("excluded_next", [])),
            excluded_first_names=tuple(body.get("excluded_first_names", [])),
        )
    return rules
