"""Unit tests for the configuration layer."""

import json

import pytest

from dipolar.config import (
    Config,
    DevelopmentConfig,
    RunConfig,
    TestingConfig,
    dump_effective_config,
    get_config,
    load_run_config,
)
from dipolar.kernels import KernelParams, LayerSeparation
from dipolar.utils.exceptions import ConfigurationError


@pytest.mark.unit
class TestEnvironmentConfig:
    def test_testing_environment(self):
        assert get_config() is TestingConfig
        assert TestingConfig.WORKERS == 1
        assert TestingConfig.NODES == 128

    def test_named_configs(self):
        assert get_config("production").DEBUG is False
        assert get_config("unknown") is DevelopmentConfig

    def test_init_dirs(self, temp_dir, mocker):
        mocker.patch.object(Config, "LOG_DIR", temp_dir / "logs")
        mocker.patch.object(Config, "OUTPUT_DIR", temp_dir / "out")
        Config.init_dirs()
        assert (temp_dir / "logs").is_dir()
        assert (temp_dir / "out").is_dir()


@pytest.mark.unit
class TestRunConfig:
    def test_defaults(self):
        config = RunConfig()
        assert config.command == "energy"
        assert config.lam == 1.0
        assert config.ell == "inf"
        assert config.kernel_params() is None

    def test_lambda_alias(self):
        config = RunConfig(**{"lambda": 0.5, "delta": 0.01, "ell": "2"})
        assert config.kernel_params() == KernelParams(0.5, 0.01, 2.0)

    def test_infinite_ell_spellings(self):
        assert RunConfig(ell="Infinity").ell == "inf"
        assert RunConfig(delta=0.1).kernel_params().ell is LayerSeparation.INFINITE

    def test_dump_uses_alias(self):
        data = RunConfig(lam=0.3).to_dict()
        assert data["lambda"] == 0.3
        assert "lam" not in data


@pytest.mark.unit
class TestLoadRunConfig:
    def test_precedence(self, temp_dir):
        path = temp_dir / "run.json"
        path.write_text(json.dumps({"lambda": 0.4, "delta": 0.02, "nodes": 64}))
        config = load_run_config({"delta": 0.01, "nodes": None, "command": "energy"}, path)
        assert config.delta == 0.01
        assert config.lam == 0.4
        assert config.nodes == 64

    @pytest.mark.parametrize("values", [
        {"delta": 0.7},
        {"delta": 0.0},
        {"lambda": -1.0},
        {"ell": "sideways"},
        {"nodes": 8},
        {"workers": 0},
        {"colour": "blue"},
    ])
    def test_invalid_values(self, values):
        with pytest.raises(ConfigurationError):
            load_run_config(values)

    def test_missing_file(self, temp_dir):
        with pytest.raises(ConfigurationError, match="not found"):
            load_run_config({}, temp_dir / "missing.json")

    def test_invalid_json(self, temp_dir):
        path = temp_dir / "bad.json"
        path.write_text("{")
        with pytest.raises(ConfigurationError, match="not valid JSON"):
            load_run_config({}, path)

    def test_effective_config_file(self, temp_dir):
        config = load_run_config({"delta": 0.05, "output_dir": str(temp_dir)})
        path = dump_effective_config(config, temp_dir / "nested")
        data = json.loads(path.read_text())
        assert path.name == "effective_config.json"
        assert data["delta"] == 0.05
        assert data["lambda"] == 1.0
