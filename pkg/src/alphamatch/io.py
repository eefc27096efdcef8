"""Instance and matching JSON formats.

Instance files::

    {
      "families": 100,                      // count, or a list of labels
      "locations": [{"label": "L00", "quota": 9}, ...],
      "quota_mode": "exact",                // or "upper_bound"
      "pi": [[0.12, ...], ...],             // one row per family
      "preferences": [["L03", "L01", ...], ...]
    }

Matching files map family labels to location labels (or null when unassigned).
Labels exist only in files; in memory everything is dense integer ids.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from .errors import InvalidInstance, MalformedMatching
from .model import Instance, Matching, QuotaMode

PathLike = Union[str, Path]


def instance_to_json(inst: Instance) -> dict:
    families: Union[int, list[str]]
    if inst.family_labels is None:
        families = inst.num_families
    else:
        families = list(inst.family_labels)
    return {
        "families": families,
        "locations": [
            {"label": inst.location_label(j), "quota": inst.quotas[j]}
            for j in inst.locations
        ],
        "quota_mode": inst.quota_mode.value,
        "pi": [[float(x) for x in row] for row in inst.pi],
        "preferences": [
            [inst.location_label(j) for j in prefs] for prefs in inst.preferences
        ],
    }


def instance_from_json(obj: dict) -> Instance:
    try:
        raw_families = obj["families"]
        raw_locations = obj["locations"]
        quota_mode = QuotaMode.from_string(obj.get("quota_mode", "exact"))
        pi = obj["pi"]
        raw_preferences = obj["preferences"]
    except (KeyError, ValueError, TypeError) as e:
        raise InvalidInstance([f"bad instance file: {e}"]) from e

    if isinstance(raw_families, int):
        family_labels = None
        num_families = raw_families
    else:
        family_labels = tuple(str(x) for x in raw_families)
        num_families = len(family_labels)

    location_labels = tuple(str(loc["label"]) for loc in raw_locations)
    quotas = tuple(int(loc["quota"]) for loc in raw_locations)
    loc_id = {label: j for j, label in enumerate(location_labels)}
    if len(loc_id) != len(location_labels):
        raise InvalidInstance(["duplicate location labels"])

    preferences = []
    for i, prefs in enumerate(raw_preferences):
        row = []
        for label in prefs:
            if str(label) not in loc_id:
                raise InvalidInstance(
                    [f"unknown location label {label!r} in preferences of family {i}"]
                )
            row.append(loc_id[str(label)])
        preferences.append(tuple(row))

    if len(preferences) != num_families:
        raise InvalidInstance(
            [f"{len(preferences)} preference lists for {num_families} families"]
        )
    try:
        return Instance(
            quotas=quotas,
            pi=pi,
            preferences=tuple(preferences),
            quota_mode=quota_mode,
            family_labels=family_labels,
            location_labels=location_labels,
        )
    except (ValueError, TypeError) as e:
        raise InvalidInstance([str(e)]) from e


def save_instance(inst: Instance, path: PathLike) -> None:
    Path(path).write_text(json.dumps(instance_to_json(inst), indent=2) + "\n")


def load_instance(path: PathLike) -> Instance:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise InvalidInstance([f"not valid JSON: {e}"]) from e
    return instance_from_json(obj)


def matching_to_json(inst: Instance, mu: Matching) -> dict:
    return {
        inst.family_label(i): None if a is None else inst.location_label(a)
        for i, a in enumerate(mu.assignment)
    }


def matching_from_json(inst: Instance, obj: dict) -> Matching:
    loc_id = {inst.location_label(j): j for j in inst.locations}
    assignment = []
    for i in inst.families:
        label = inst.family_label(i)
        if label not in obj:
            raise MalformedMatching(f"family {label!r} missing from matching")
        target = obj[label]
        if target is None:
            assignment.append(None)
        elif str(target) in loc_id:
            assignment.append(loc_id[str(target)])
        else:
            raise MalformedMatching(f"unknown location label {target!r}")
    return Matching(tuple(assignment))


def save_matching(inst: Instance, mu: Matching, path: PathLike) -> None:
    Path(path).write_text(json.dumps(matching_to_json(inst, mu), indent=2) + "\n")


def load_matching(inst: Instance, path: PathLike) -> Matching:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise MalformedMatching(f"not valid JSON: {e}") from e
    return matching_from_json(inst, obj)
