from __future__ import annotations

from pathlib import Path

import pytest

from vibronic_gbs.config import ConfigError, RunConfig, load_run_config, parse_float_list
from vibronic_gbs.models import Order


def test_defaults_without_file() -> None:
    config = load_run_config(None)

    assert config == RunConfig()
    assert config.order is None
    assert config.tau == 1e-2
    assert config.taus == (1e-1, 3e-2, 1e-2)
    assert config.cutoff == 3
    assert config.shots == 100_000
    assert config.broaden_mode == "sigma"
    assert config.exact_method == "auto"


def test_load_from_yaml(tmp_path: Path) -> None:
    path = tmp_path / "run.yaml"
    path.write_text("order: HT2\ncutoff: 5\naxes: [X, y]\ntaus: 0.3,0.1,0.03\n", encoding="utf-8")

    config = load_run_config(path)

    assert config.order is Order.HT2
    assert config.cutoff == 5
    assert config.axes == ("x", "y")
    assert config.taus == (0.3, 0.1, 0.03)


def test_flags_override_file(tmp_path: Path) -> None:
    path = tmp_path / "run.yaml"
    path.write_text("cutoff: 5\nseed: 11\n", encoding="utf-8")

    config = load_run_config(path).merged({"cutoff": 2, "seed": None})

    assert config.cutoff == 2
    assert config.seed == 11


def test_unknown_keys_are_rejected(tmp_path: Path) -> None:
    path = tmp_path / "run.yaml"
    path.write_text("cutof: 5\n", encoding="utf-8")

    with pytest.raises(ConfigError, match="cutof"):
        load_run_config(path)


def test_non_mapping_is_rejected(tmp_path: Path) -> None:
    path = tmp_path / "run.yaml"
    path.write_text("- 1\n", encoding="utf-8")

    with pytest.raises(ConfigError, match="YAML object"):
        load_run_config(path)


@pytest.mark.parametrize(
    "overrides",
    [{"tau": 0.0}, {"taus": [0.1, 0.01]}, {"cutoff": -1}, {"shots": 0}, {"broaden_mode": "box"}, {"cutoff": 2.5}],
)
def test_invalid_values(overrides: dict) -> None:
    with pytest.raises(ConfigError):
        RunConfig().merged(overrides)


def test_parse_float_list() -> None:
    assert parse_float_list("1e-1, 3e-2,1e-2") == [0.1, 0.03, 0.01]
    with pytest.raises(ConfigError):
        parse_float_list("0.1,abc")
