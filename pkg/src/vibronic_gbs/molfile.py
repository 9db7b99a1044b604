"""YAML molecule files and the bundled datasets."""

from __future__ import annotations

import logging
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .models import InputError, MoleculeSpec, ValidationError
from .molecule import log_validation, validate_molecule

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = (
    "name",
    "modes",
    "source",
    "length_unit",
    "omega_initial",
    "omega_final",
    "duschinsky",
    "displacement_d",
    "delta",
    "tdm",
)
TDM_AXIS_KEYS = ("mu0", "mu1", "mu2")
PROVENANCE_FILE = "provenance.yaml"


class ParseError(InputError):
    """Raised when a molecule file is not well-formed YAML or has unknown keys."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        self.message = message
        self.line = line
        self.column = column
        if line is not None and column is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class UnknownDatasetError(InputError):
    """Raised when a molecule name matches neither a file nor a bundled dataset."""


def parse_molecule(path: str | Path) -> MoleculeSpec:
    target = Path(path)
    try:
        text = target.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read molecule file {target}: {exc}") from exc
    return parse_molecule_text(text)


def parse_molecule_text(text: str) -> MoleculeSpec:
    """Parse, validate and return a molecule; warnings go to the log."""
    spec, warnings = _parse(text)
    log_validation(spec, warnings)
    return spec


def validate_document(text: str) -> tuple[MoleculeSpec, list[str]]:
    """Return the molecule and its warnings without logging; raise on any violation."""
    return _parse(text)


def dump_molecule(spec: MoleculeSpec) -> str:
    return yaml.safe_dump(spec.to_mapping(), sort_keys=False, default_flow_style=None)


def list_datasets() -> list[str]:
    folder = resources.files(__package__).joinpath("datasets")
    names = [
        entry.name[: -len(".yaml")]
        for entry in folder.iterdir()
        if entry.name.endswith(".yaml") and entry.name != PROVENANCE_FILE
    ]
    return sorted(names)


def dataset_text(name: str) -> str:
    if name not in list_datasets():
        raise UnknownDatasetError(f"unknown dataset: {name} (available: {', '.join(list_datasets())})")
    return resources.files(__package__).joinpath("datasets").joinpath(f"{name}.yaml").read_text(encoding="utf-8")


def load_dataset(name: str) -> MoleculeSpec:
    logger.info("loading bundled dataset %s", name)
    return parse_molecule_text(dataset_text(name))


def export_dataset(name: str, directory: str | Path) -> Path:
    target = Path(directory) / f"{name}.yaml"
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(dataset_text(name), encoding="utf-8")
    return target


def provenance() -> dict[str, Any]:
    raw = resources.files(__package__).joinpath("datasets").joinpath(PROVENANCE_FILE).read_text(encoding="utf-8")
    data = yaml.safe_load(raw)
    if not isinstance(data, dict):
        raise InputError("dataset provenance must be a YAML object")
    return data


def provenance_mismatches(name: str) -> list[str]:
    """Compare a bundled file's numbers with the published values recorded in its provenance entry."""
    entry = provenance()["files"].get(f"{name}.yaml")
    if entry is None:
        return [f"{name}.yaml: no provenance entry"]
    recorded = entry.get("fields") or {}
    bundled = _numeric_fields(yaml.safe_load(dataset_text(name)))
    problems = [f"{name}.yaml: {path} has no provenance source" for path in bundled if path not in recorded]
    for path, source in recorded.items():
        if path not in bundled:
            problems.append(f"{name}.yaml: {path} is recorded but not bundled")
            continue
        published = np.asarray(source.get("value"), dtype=float)
        value = np.asarray(bundled[path], dtype=float)
        if published.shape != value.shape or not np.array_equal(published, value):
            problems.append(f"{name}.yaml: {path} differs from {source.get('table')} ({source.get('row')})")
    return problems


def _numeric_fields(payload: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    fields: dict[str, Any] = {}
    for key, value in payload.items():
        path = f"{prefix}{key}"
        if isinstance(value, dict):
            fields.update(_numeric_fields(value, f"{path}."))
        elif isinstance(value, (int, float, list)) and not isinstance(value, bool) and key != "modes":
            fields[path] = value
    return fields


def resolve_molecule(name_or_path: str) -> MoleculeSpec:
    """Load a molecule from a file path, falling back to a bundled dataset name."""
    return parse_molecule_text(molecule_text(name_or_path))


def molecule_text(name_or_path: str) -> str:
    candidate = Path(name_or_path).expanduser()
    if candidate.is_file():
        return candidate.read_text(encoding="utf-8")
    if name_or_path in list_datasets():
        return dataset_text(name_or_path)
    raise UnknownDatasetError(
        f"{name_or_path} is neither a molecule file nor a bundled dataset (available: {', '.join(list_datasets())})"
    )


def _parse(text: str) -> tuple[MoleculeSpec, list[str]]:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        payload = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        problem = getattr(exc, "problem", None) or str(exc)
        if mark is not None:
            raise ParseError(str(problem), mark.line + 1, mark.column + 1) from exc
        raise ParseError(str(problem)) from exc

    if node is None or not isinstance(node, yaml.MappingNode) or not isinstance(payload, dict):
        line, column = (node.start_mark.line + 1, node.start_mark.column + 1) if node is not None else (1, 1)
        raise ParseError("molecule file must be a YAML object", line, column)
    _check_keys(node)

    spec, issues = MoleculeSpec.parse_mapping(payload)
    warnings: list[str] = []
    if spec is not None:
        checked, warnings = validate_molecule(spec)
        issues.extend(checked)
        modes = payload.get("modes")
        if modes is not None and (isinstance(modes, bool) or not isinstance(modes, int) or modes != spec.modes):
            issues.insert(0, f"modes: declared {modes!r} but omega_initial has {spec.modes} entries")
    if issues:
        raise ValidationError(list(dict.fromkeys(issues)))
    assert spec is not None
    return spec, warnings


def _check_keys(root: yaml.MappingNode) -> None:
    for key_node, value_node in root.value:
        key = key_node.value
        _require_known(key_node, key, TOP_LEVEL_KEYS, "top level")
        if key != "tdm" or not isinstance(value_node, yaml.MappingNode):
            continue
        for axis_node, axis_value in value_node.value:
            _require_known(axis_node, axis_node.value, ("x", "y", "z"), "tdm")
            if isinstance(axis_value, yaml.MappingNode):
                for field_node, _ in axis_value.value:
                    _require_known(field_node, field_node.value, TDM_AXIS_KEYS, f"tdm.{axis_node.value}")


def _require_known(node: yaml.Node, key: str, allowed: tuple[str, ...], where: str) -> None:
    if key not in allowed:
        raise ParseError(
            f"unknown key {key!r} at {where} (expected one of {', '.join(allowed)})",
            node.start_mark.line + 1,
            node.start_mark.column + 1,
        )
