# Copyright 2026 The ECO Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Converter stub for bringing an external dialog corpus into this repo.

This script documents, as executable code, exactly what the pipeline
expects on disk. It ships no dataset and implements no corpus-specific
parsing; `load_source` is the one function to fill in for a given source
(a MultiWOZ- or CamRest-style export, or anything else with entity
annotations). Everything downstream of it is implemented and validates
the result.

Expected files, all consumed by the `eco` tool:

kb.json
    {"version": 1,
     "schema": ["name", ...],                          # "name" required
     "entities": [{"name": "golden palace",            # one flat object
                   "area": "north", ...}, ...]}        # per entity
    Entity ids are the array positions. Values are lowercase,
    whitespace-normalized words; "none" marks a missing value.

dialogs.jsonl
    {"kind": "dialogs", "version": 1}                  # header line
    one JSON object per dialog per line:
    {"id": "train-0000", "domain": "eatery",
     "goal": {"constraints": {"food": "thai"}, "requests": ["price"]},
     "meta": {"source_entity": 8},                     # optional
     "turns": [{"user": "...", "response": "...",
                "gold_entity": 3,                      # optional, per turn
                "spans": [{"side": "user"|"response",
                           "start": 0, "end": 2,       # [start, end) words
                           "attribute": "name"}, ...]}, ...]}
    Spans mark where an entity attribute's value is spelled verbatim;
    they are what makes a dialog usable for template extraction.

goals.json
    {"version": 1, "goals": [{"constraints": {...}, "requests": [...]}]}
    Parallel to a dialog file; used by `eco eval --goals`.
"""

import argparse
import json
import re
import sys


def normalize(text: str) -> str:
    """Lowercase, collapse whitespace. Mirrors the C++ side's normalize."""
    return re.sub(r"\s+", " ", text.strip().lower())


def load_source(path: str):
    """Parse the external corpus at `path`.

    Must return (schema_attributes, entities, dialogs) in the shapes the
    emit helpers below expect. Implement this for your source corpus;
    nothing else in the file needs to change.
    """
    raise NotImplementedError(
        "load_source is corpus-specific; this stub documents the target "
        "schema but ships no converter"
    )


def check_kb(attributes, entities):
    if "name" not in attributes:
        raise ValueError("schema must include 'name'")
    if not entities:
        raise ValueError("no entities")
    for i, entity in enumerate(entities):
        if set(entity) != set(attributes):
            raise ValueError(f"entity {i} does not match the schema")
        for attr, value in entity.items():
            if value != normalize(value) or not value:
                raise ValueError(f"entity {i} value {attr!r} not normalized")


def check_dialog(dialog, attributes):
    for ti, turn in enumerate(dialog["turns"]):
        sides = {"user": turn["user"].split(), "response": turn["response"].split()}
        for span in turn.get("spans", []):
            words = sides[span["side"]]
            if not 0 <= span["start"] < span["end"] <= len(words):
                raise ValueError(f"{dialog['id']} turn {ti}: bad span")
            if span["attribute"] not in attributes:
                raise ValueError(f"{dialog['id']} turn {ti}: unknown attribute")


def emit(out_dir: str, attributes, entities, dialogs):
    check_kb(attributes, entities)
    for d in dialogs:
        check_dialog(d, attributes)
    with open(f"{out_dir}/kb.json", "w") as f:
        json.dump(
            {"version": 1, "schema": attributes, "entities": entities},
            f, indent=1,
        )
    with open(f"{out_dir}/dialogs.jsonl", "w") as f:
        f.write(json.dumps({"kind": "dialogs", "version": 1}) + "\n")
        for d in dialogs:
            f.write(json.dumps(d, sort_keys=True) + "\n")
    with open(f"{out_dir}/goals.json", "w") as f:
        json.dump({"version": 1, "goals": [d["goal"] for d in dialogs]}, f, indent=1)


def selftest(out_dir: str):
    """Round-trip a two-line hand-built corpus through the emit path."""
    attributes = ["name", "food"]
    entities = [{"name": "golden palace", "food": "italian"}]
    dialogs = [{
        "id": "ext-0", "domain": "eatery",
        "goal": {"constraints": {"food": "italian"}, "requests": []},
        "turns": [{
            "user": "any italian place",
            "response": "try golden palace",
            "gold_entity": 0,
            "spans": [
                {"side": "user", "start": 1, "end": 2, "attribute": "food"},
                {"side": "response", "start": 1, "end": 3, "attribute": "name"},
            ],
        }],
    }]
    emit(out_dir, attributes, entities, dialogs)
    print(f"selftest wrote kb.json, dialogs.jsonl, goals.json under {out_dir}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--source", help="external corpus to convert")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--selftest", action="store_true",
                    help="emit a tiny hand-built corpus instead of converting")
    args = ap.parse_args()
    if args.selftest:
        selftest(args.out)
        return 0
    if not args.source:
        ap.error("--source is required unless --selftest")
    emit(args.out, *load_source(args.source))
    return 0


if __name__ == "__main__":
    sys.exit(main())
