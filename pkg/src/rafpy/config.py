"""
JSON run configuration.

A config file has up to three sections::

    {
      "init": {"gamma": 0.5, "power_iters": 200},
      "solver": {"step_size": 2.0, "weight_scheme": {"kind": "raf", "beta": 10.0}},
      "problem": {"model": "real-gaussian", "n": 200, "m": 1000, "seed": 1}
    }

``init`` and ``solver`` use the field names of :class:`~rafpy.init.InitConfig` and
:class:`~rafpy.solver.SolverConfig`; ``problem`` uses the command-line flag names.
Unknown keys are errors. Command-line flags override file values.
"""

from __future__ import annotations

import dataclasses
import json
import os
from collections.abc import Mapping
from pathlib import Path
from typing import Any

from rafpy.init import InitConfig
from rafpy.sensing import Variant
from rafpy.solver import SchemeKind, SolverConfig, WeightScheme

SEED_ENV = "RAF_SEED"

SECTIONS = ("init", "solver", "problem")
PROBLEM_KEYS = (
    "model",
    "n",
    "m",
    "masks",
    "seed",
    "snr",
    "ratios",
    "snrs",
    "mn",
    "gammas",
    "trials",
    "threads",
    "threshold",
)


def load_config(path: os.PathLike[str] | str | None) -> dict[str, dict[str, Any]]:
    """Read and validate a config file; ``None`` gives empty sections."""
    sections: dict[str, dict[str, Any]] = {name: {} for name in SECTIONS}
    if path is None:
        return sections
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        msg = f"config file {path} is not valid JSON: {exc}"
        raise ValueError(msg) from exc
    if not isinstance(data, dict):
        msg = f"config file {path} must hold a JSON object"
        raise ValueError(msg)
    unknown = sorted(set(data) - set(SECTIONS))
    if unknown:
        msg = f"unknown config sections: {unknown}"
        raise ValueError(msg)
    for name, section in data.items():
        if not isinstance(section, dict):
            msg = f"config section '{name}' must be a JSON object"
            raise ValueError(msg)
        sections[name] = section
    bad = sorted(set(sections["problem"]) - set(PROBLEM_KEYS))
    if bad:
        msg = f"unknown problem config keys: {bad}"
        raise ValueError(msg)
    # fail fast on typos even when the section is later overridden
    InitConfig.from_dict(sections["init"])
    SolverConfig.from_dict(sections["solver"])
    return sections


def pick(flag: Any, section: Mapping[str, Any], key: str, default: Any) -> Any:
    """Flag value if given, else the config value, else ``default``."""
    if flag is not None:
        return flag
    return section.get(key, default)


def resolve_seed(flag: int | None, section: Mapping[str, Any]) -> int:
    """``--seed``, then the config file, then ``$RAF_SEED``, then 0."""
    if flag is not None:
        return flag
    if "seed" in section:
        return int(section["seed"])
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            msg = f"{SEED_ENV}={env!r} is not an integer"
            raise ValueError(msg) from None
    return 0


def build_init_config(
    section: Mapping[str, Any], overrides: Mapping[str, Any]
) -> InitConfig:
    base = InitConfig.from_dict(section)
    changes = {key: val for key, val in overrides.items() if val is not None}
    return dataclasses.replace(base, **changes)


def build_solver_config(
    variant: Variant,
    section: Mapping[str, Any],
    overrides: Mapping[str, Any],
    scheme: Mapping[str, Any] | None = None,
) -> SolverConfig:
    """
    Variant defaults, then the ``solver`` section, then flag overrides.

    ``scheme`` holds optional ``kind``/``beta``/``alpha`` flags for the weight scheme.
    """
    parsed = SolverConfig.from_dict(section)
    base = SolverConfig.for_variant(
        variant, **{key: getattr(parsed, key) for key in section}
    )
    changes = {key: val for key, val in overrides.items() if val is not None}
    scheme_flags = {key: val for key, val in (scheme or {}).items() if val is not None}
    if scheme_flags:
        current = base.weight_scheme
        kind = scheme_flags.get("kind", current.kind)
        changes["weight_scheme"] = WeightScheme(
            SchemeKind(kind),
            beta=scheme_flags.get("beta", current.beta),
            alpha=scheme_flags.get("alpha", current.alpha),
        )
    return dataclasses.replace(base, **changes)
