"""
Tests for the YAML configuration, the static definitions and the small helpers.
"""

import numpy as np
import pytest

from utils.config import DEFAULTS, Config, Variables
from utils.exceptions import ConfigError, DimensionMismatch
from utils.utils import isNumerical, notZero, parameters_key, parse_sweep, relative_l2_error


class TestConfig:

    def test_repository_defaults(self, config):
        cfg = config.propagator_config(m=9, k=None, steps=300)
        assert (cfg.m, cfg.k, cfg.steps) == (9, None, 300)
        assert cfg.eps == 1e-12
        assert cfg.tail_tol == 1e-11
        assert cfg.stability_weight == 1.5e-3
        assert cfg.min_first_step_iters == 1
        assert config.section('kernels')['tail_tol'] == 1e-11
        assert config.threads == 1

    def test_looser_tail_is_a_per_run_setting(self, config):
        cfg = config.propagator_config(m=7, k=7, steps=350, tail_tol=1.0, min_first_step_iters=12)
        assert (cfg.tail_tol, cfg.min_first_step_iters) == (1.0, 12)
        assert config.propagator_config(m=7, k=7, steps=350, tail_tol=None).tail_tol == 1e-11

    def test_reference_cross_check_settings(self, config):
        settings = config.reference_settings()
        assert (settings['rk4_steps_factor'], settings['rk4_agreement']) == (8, 1e-7)
        assert settings['agreement'] == 1e-10

    def test_none_overrides_are_ignored(self, config):
        cfg = config.propagator_config(m=7, k=7, steps=10, eps=None)
        assert cfg.eps == 1e-12

    def test_missing_sections_use_defaults(self, tmp_path):
        path = tmp_path / 'config.yml'
        path.write_text('propagator:\n  eps: 1.0e-10\n', encoding='utf8')
        config = Config(str(path))
        assert config.propagator_config().eps == 1e-10
        assert config.propagator_config().max_first_step_iters == DEFAULTS['propagator']['max_first_step_iters']
        assert config.reference_settings() == DEFAULTS['reference']

    def test_empty_file(self, tmp_path):
        path = tmp_path / 'config.yml'
        path.write_text('', encoding='utf8')
        assert Config(str(path)).rk45_config().rel_tol == DEFAULTS['rk45']['rel_tol']

    def test_invalid_values(self, config):
        with pytest.raises(ConfigError):
            config.propagator_config(m=1)
        with pytest.raises(ConfigError):
            config.rk45_config(abs_tol=-1.0)
        with pytest.raises(ConfigError):
            config.propagator_config(unknown=3)

    def test_invalid_threads(self, tmp_path):
        path = tmp_path / 'config.yml'
        path.write_text('sweep:\n  threads: 0\n', encoding='utf8')
        with pytest.raises(ConfigError):
            _ = Config(str(path)).threads

    def test_section_must_be_mapping(self, tmp_path):
        path = tmp_path / 'config.yml'
        path.write_text('propagator: 3\n', encoding='utf8')
        with pytest.raises(ConfigError):
            Config(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            Config(str(tmp_path / 'absent.yml'))

    def test_save_to_file(self, tmp_path):
        path = tmp_path / 'config.yml'
        path.write_text('sweep:\n  threads: 3\n', encoding='utf8')
        config = Config(str(path))
        assert config.save_to_file()
        assert Config(str(path)).threads == 3
        assert Config(str(path)).section('propagator') == DEFAULTS['propagator']

    def test_section_is_a_copy(self, config):
        config.section('propagator')['m'] = 99
        assert 'm' not in config.section('propagator')


class TestVariables:

    def test_examples(self, variables):
        assert variables.examples == ['advection', 'oscillator', 'gpe']
        assert variables.example('advection') == {'n': 32, 'T': 5.0}
        assert variables.methods == ['semiglobal', 'rk4', 'rk45']

    def test_tables(self, variables):
        assert variables.tables == [1, 2, 3, 4, 5, 6, 7]
        table = variables.table(2)
        assert (table['example'], table['method'], table['m'], table['k']) == ('oscillator', 'semiglobal', 7, 7)
        assert [row['matvecs'] for row in table['rows']] == [4563, 5213, 7813]

    def test_published_matvec_arithmetic(self, variables):
        """Semiglobal tables count (steps + extra sweeps) * (m + k - 1)."""
        for number in variables.tables:
            table = variables.table(number)
            if table['method'] != 'semiglobal':
                continue
            per_step = table['m'] + table['k'] - 1
            for row in table['rows']:
                assert row['matvecs'] % per_step == 0
                assert row['matvecs'] // per_step >= row['steps']

    def test_unknown(self, variables):
        with pytest.raises(ConfigError):
            variables.example('heat')
        with pytest.raises(ConfigError):
            variables.table(42)


class TestUtils:

    def test_is_numerical(self):
        assert isNumerical('1e-3')
        assert not isNumerical('auto')
        assert not isNumerical(None)

    def test_not_zero(self):
        assert notZero(0, 5) == 5
        assert notZero(2.5, 5) == 2.5

    def test_relative_l2_error(self):
        assert relative_l2_error(np.array([1.0, 1.0]), np.array([1.0, 0.0])) == pytest.approx(1.0)
        assert relative_l2_error(np.zeros(2), np.zeros(2)) == 0.0
        with pytest.raises(DimensionMismatch):
            relative_l2_error(np.zeros(2), np.zeros(3))

    def test_parse_sweep(self):
        assert parse_sweep('steps=350,400,600') == {'steps': [350, 400, 600]}
        assert parse_sweep('steps=300;m=8,9 k=8') == {'steps': [300], 'm': [8, 9], 'k': [8]}
        assert parse_sweep('steps=') == {'steps': []}

    @pytest.mark.parametrize('text', ['dt=0.1', 'steps=1.5', 'm=-3', 'steps=a'])
    def test_parse_sweep_errors(self, text):
        with pytest.raises(ConfigError):
            parse_sweep(text)

    def test_parameters_key(self):
        assert parameters_key({'a': 1, 'b': 2.0}) == parameters_key({'b': 2.0, 'a': 1})
        assert parameters_key({'a': 1}) != parameters_key({'a': 2})
        assert len(parameters_key({})) == 64
