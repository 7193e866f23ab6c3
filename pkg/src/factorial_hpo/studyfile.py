"""Study-file parsing: TOML sections [study], [objective], [[space]], [search].

Unknown keys are rejected so typos fail loudly before any evaluation runs.
"""
from __future__ import annotations

from pathlib import Path
from typing import Any, Mapping

import tomli

from .errors import ConfigError
from .evaluator import ObjectiveSpec, builtin_objective, external_objective
from .optimizer import StudyConfig
from .space import FactorDef, SearchSpace

_STUDY_KEYS = {
    "name",
    "seed",
    "max_iterations",
    "budget",
    "workers",
    "final_strategy",
    "quality_target",
}
_OBJECTIVE_KEYS = {"kind", "name", "command", "direction", "timeout_s"}
_SPACE_KEYS = {"name", "kind", "lower", "upper", "scale"}
_SEARCH_KEYS = {"range_count", "beta", "q", "p", "samples_per_iteration_min"}


def _check_keys(section: str, entry: Mapping[str, Any], allowed: set[str]) -> None:
    unknown = set(entry) - allowed
    if unknown:
        raise ConfigError(
            f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}"
        )


def _parse_objective(obj: Mapping[str, Any]) -> ObjectiveSpec:
    _check_keys("objective", obj, _OBJECTIVE_KEYS)
    kind = obj.get("kind", "builtin")
    timeout_s = float(obj.get("timeout_s", 3600.0))
    if kind == "builtin":
        if "name" not in obj:
            raise ConfigError("[objective] kind=builtin requires a name")
        spec = builtin_objective(obj["name"], timeout_s=timeout_s)
        if "direction" in obj and obj["direction"] != spec.direction:
            raise ConfigError(
                f"builtin {obj['name']!r} has direction {spec.direction!r}"
            )
        return spec
    if kind == "external":
        if "command" not in obj:
            raise ConfigError("[objective] kind=external requires a command")
        return external_objective(
            obj["command"],
            timeout_s=timeout_s,
            direction=obj.get("direction", "minimize"),
        )
    raise ConfigError(f"unknown objective kind {kind!r}")


def _parse_space(entries) -> SearchSpace:
    if not entries:
        raise ConfigError("study file defines no [[space]] entries")
    factors = []
    for entry in entries:
        _check_keys("space", entry, _SPACE_KEYS)
        for key in ("name", "kind", "lower", "upper"):
            if key not in entry:
                raise ConfigError(f"[[space]] entry missing key {key!r}")
        factors.append(
            FactorDef(
                name=entry["name"],
                kind=entry["kind"],
                lower=float(entry["lower"]),
                upper=float(entry["upper"]),
                scale=entry.get("scale", "linear"),
            )
        )
    return SearchSpace(tuple(factors))


def parse_study_file(
    path: str | Path, overrides: Mapping[str, Any] | None = None
) -> tuple[str, StudyConfig]:
    """Parse a study file into (study name, StudyConfig).

    ``overrides`` replace same-named [study]/[search] keys one-for-one.
    """
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomli.load(fh)
    except tomli.TOMLDecodeError as err:
        raise ConfigError(f"{path}: {err}") from err

    _check_keys("<top level>", doc, {"study", "objective", "space", "search"})
    study = dict(doc.get("study", {}))
    search = dict(doc.get("search", {}))
    _check_keys("study", study, _STUDY_KEYS)
    _check_keys("search", search, _SEARCH_KEYS)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key in _STUDY_KEYS:
            study[key] = value
        elif key in _SEARCH_KEYS:
            search[key] = value
        else:
            raise ConfigError(f"unknown override {key!r}")

    name = study.get("name", path.stem)
    objective = _parse_objective(doc.get("objective", {}))
    space = _parse_space(doc.get("space", []))

    beta = search.get("beta")
    if beta is not None and not 0 < beta < 1:
        raise ConfigError("beta must lie in (0, 1)")

    config = StudyConfig(
        space=space,
        objective=objective,
        max_iterations=int(study.get("max_iterations", 3)),
        samples_per_iteration_min=int(search.get("samples_per_iteration_min", 9)),
        range_count=(
            int(search["range_count"]) if "range_count" in search else None
        ),
        beta=float(beta) if beta is not None else None,
        quality_target=(
            float(study["quality_target"]) if "quality_target" in study else None
        ),
        total_budget=int(study["budget"]) if "budget" in study else None,
        workers=int(study.get("workers", 1)),
        seed=int(study.get("seed", 0)),
        final_strategy=study.get("final_strategy", "greedy"),
        q_small=int(search.get("q", 1)),
        p_small=int(search.get("p", 3)),
    )
    return name, config
