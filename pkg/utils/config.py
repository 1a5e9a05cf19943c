"""
This module provides classes for working with the run-time configuration (config.yml) and
the static model / table definitions (variables.yml).

Minimal requirements
--------------------
* Python 3.8
* PyYAML
"""

__author__ = "Ilya Molodkin"
__date__ = "2026-10-19"
__version__ = "1.0"
__license__ = "MIT License"


import copy
import logging
import traceback
from typing import Dict, List, Optional

import yaml

from utils.exceptions import ConfigError
from utils.reference import RK45Config
from utils.semiglobal import PropagatorConfig


logger = logging.getLogger(__name__)

DEFAULTS: Dict = {
    'propagator': {'eps': 1e-12, 'max_first_step_iters': 50, 'min_first_step_iters': 1, 'tail_tol': 1e-11,
                   'stability_weight': 1.5e-3, 'auto_tail_tol': 1e-11, 'oversampling': 4, 'k_max': 512},
    'kernels': {'tail_tol': 1e-11},
    'rk45': {'abs_tol': 1e-10, 'rel_tol': 1e-8, 'initial_step': None},
    'ground_state': {'tol': 1e-11, 'step': 0.1, 'max_iters': 20000},
    'reference': {'cache_dir': '.reference_cache', 'm': 12, 'k': None, 'steps_factor': 4, 'check_m': 10,
                  'check_k': None, 'check_steps_factor': 3, 'agreement': 1e-10, 'rk4_steps_factor': 8,
                  'rk4_agreement': 1e-7},
    'sweep': {'threads': 1},
    'logging': {'level': 'INFO', 'format': '%(asctime)s %(levelname)s %(name)s: %(message)s'},
}


def load_yaml(path: str) -> Optional[Dict]:
    """
    Loads a YAML file.

    :param path: path to the file
    :type path: str
    :return: the parsed mapping, None on a syntax error
    :rtype: Optional[Dict]
    """
    with open(path, "r", encoding='utf8') as stream:
        try:
            return yaml.safe_load(stream)
        except yaml.YAMLError as e:
            logger.error(f'{type(e).__name__} occurred, args={str(e.args)}')
            logger.debug(traceback.format_exc())
            return None


class Config:
    """
    A class that represents the run-time configuration file.

    Sections missing from the file are filled with :data:`DEFAULTS`.

    :param path: A string that represents the path to the configuration file.
    :type path: str

    :ivar _path: A string that represents the path to the configuration file.
    :ivar _config: A dictionary that stores the configuration.

    :raises FileNotFoundError: If the configuration file does not exist.
    """
    def __init__(self, path: str):
        self._path = path
        self._config: Dict = self.get_config() or {}
        for section, values in DEFAULTS.items():
            current = self._config.get(section) or {}
            if not isinstance(current, dict):
                raise ConfigError('Error@Config.__init__.', f'section {section!r} must be a mapping')
            self._config[section] = {**values, **current}

    def get_config(self) -> Optional[Dict]:
        """
        Loads and returns the configuration file.

        :return: A dictionary that represents the configuration file
        :rtype: Optional[Dict]
        """
        return load_yaml(self._path)

    def section(self, name: str) -> Dict:
        """Returns a copy of a configuration section"""
        if name not in self._config:
            raise ConfigError('Error@Config.section.', f'unknown section {name!r}')
        return copy.deepcopy(self._config[name])

    def propagator_config(self, **overrides) -> PropagatorConfig:
        """
        Builds the semiglobal settings from the ``propagator`` section.

        :param overrides: fields that replace the file values (``m``, ``k``, ``steps``, ``eps``...);
            ``None`` values are ignored except for ``k``.
        :return: the settings
        :rtype: PropagatorConfig
        """
        values = self.section('propagator')
        values.update({key: value for key, value in overrides.items() if value is not None or key == 'k'})
        try:
            return PropagatorConfig(**values)
        except (TypeError, ValueError) as e:
            raise ConfigError('Error@Config.propagator_config.', str(e.args[-1] if e.args else e)) from e

    def rk45_config(self, **overrides) -> RK45Config:
        """Builds the adaptive integrator settings from the ``rk45`` section"""
        values = self.section('rk45')
        values.update({key: value for key, value in overrides.items() if value is not None})
        try:
            return RK45Config(**values)
        except (TypeError, ValueError) as e:
            raise ConfigError('Error@Config.rk45_config.', str(e.args[-1] if e.args else e)) from e

    def ground_state_settings(self) -> Dict:
        return self.section('ground_state')

    def reference_settings(self) -> Dict:
        return self.section('reference')

    def logging_settings(self) -> Dict:
        return self.section('logging')

    @property
    def threads(self) -> int:
        threads = self._config['sweep'].get('threads', 1)
        if not isinstance(threads, int) or threads < 1:
            raise ConfigError('Error@Config.threads.', f'sweep.threads must be a positive integer, got {threads!r}')
        return threads

    @property
    def path(self) -> str:
        return self._path

    def save_to_file(self) -> bool:
        """
        Saves the current configuration to a YAML file.

        :return: True if the configuration is successfully saved, False otherwise.
        :rtype: bool
        """
        result: bool = False
        try:
            with open(self._path, "w", encoding='utf8') as stream:
                yaml.safe_dump(self._config, stream, allow_unicode=True, sort_keys=False)
            result = True
        except (OSError, yaml.YAMLError) as e:
            logger.error(f'{type(e).__name__} occurred, args={str(e.args)}')
            logger.debug(traceback.format_exc())
        return result


class Variables:
    """
    Static definitions: model parameters, methods, output formats and the published tables.

    :param path: path to variables.yml
    :type path: str
    """
    def __init__(self, path: str):
        self._path = path
        self._variables: Dict = load_yaml(path) or {}
        for key in ('examples', 'tables'):
            self._variables.setdefault(key, {})

    @property
    def examples(self) -> List[str]:
        return list(self._variables['examples'])

    @property
    def methods(self) -> List[str]:
        return list(self._variables.get('methods', ['semiglobal', 'rk4', 'rk45']))

    @property
    def formats(self) -> List[str]:
        return list(self._variables.get('formats', ['csv', 'json', 'table']))

    @property
    def tables(self) -> List[int]:
        return sorted(self._variables['tables'])

    def example(self, name: str) -> Dict:
        """
        Returns the model parameters of an example.

        :param name: example name
        :type name: str
        :raises ConfigError: for an unknown example
        :return: keyword arguments of the model constructor
        :rtype: Dict

        :Example:

        >>> Variables('variables.yml').example('advection')
        {'n': 32, 'T': 5.0}
        """
        if name not in self._variables['examples']:
            raise ConfigError('Error@Variables.example.', f'unknown example {name!r}, expected one of {self.examples}')
        return copy.deepcopy(self._variables['examples'][name])

    def table(self, number: int) -> Dict:
        """
        Returns a published table: ``example``, ``method``, optional ``m`` and ``k`` and its
        ``rows`` (``steps``, ``matvecs``, ``error``).

        :raises ConfigError: for an unknown table
        """
        if number not in self._variables['tables']:
            raise ConfigError('Error@Variables.table.', f'unknown table {number!r}, expected one of {self.tables}')
        return copy.deepcopy(self._variables['tables'][number])
