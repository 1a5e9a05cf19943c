"""
The module provides several useful utility functions.

"""

__author__ = "Ilya Molodkin"
__date__ = "2026-10-19"
__version__ = "1.0"
__license__ = "MIT License"


import hashlib
import json
from typing import Any, Dict, List, Union

import numpy as np

from utils.exceptions import ConfigError, DimensionMismatch


def isNumerical(value: Any) -> bool:
    """Checks if the input value can be converted to a floating-point number
    :param value: The value to check
    :type value: Any

    :return: True if the value can be converted to a floating-point number, False otherwise
    :rtype: bool
    """
    try:
        float(value)
        return True
    except (TypeError, ValueError):
        return False


def notZero(initial_value: Union[float, int],
            value_if_zero: Union[float, int]) -> Union[float, int]:
    """
    Return `initial_value` if it is not zero, otherwise return `value_if_zero`
    :param initial_value:   A float or integer representing the initial value to be checked
    :param value_if_zero:   A float or integer representing the value to be returned if
                            `initial_value` is zero.

    :return:                A float or integer representing either `initial_value` or
                            `value_if_zero`, depending on the value of `initial_value`
    :rtype:                 Union[float, int]
    """
    return initial_value if initial_value else value_if_zero


def relative_l2_error(u: np.ndarray, reference: np.ndarray) -> float:
    """
    ``||u - u_ref|| / ||u_ref||`` (unweighted; the grid weight cancels)

    :raises DimensionMismatch: if the shapes differ
    """
    u, reference = np.asarray(u), np.asarray(reference)
    if u.shape != reference.shape:
        raise DimensionMismatch('Error@relative_l2_error.', f'shapes differ: {u.shape} vs {reference.shape}')
    return float(np.linalg.norm(u - reference) / notZero(np.linalg.norm(reference), 1.0))


def parse_sweep(text: str) -> Dict[str, List[int]]:
    """
    Parses a sweep string such as ``steps=350,400,600;m=7,8``

    :param text: ``name=v1,v2,...`` groups separated by ``;`` or whitespace
    :type text: str
    :raises ConfigError: for unknown names or non-integer values

    :return: mapping of ``steps``, ``m`` and ``k`` to their value lists
    :rtype: Dict[str, List[int]]

    :Example:

    >>> parse_sweep('steps=350,400,600')
    {'steps': [350, 400, 600]}
    """
    result: Dict[str, List[int]] = {}
    for group in text.replace(';', ' ').split():
        name, _, values = group.partition('=')
        name = name.strip()
        if name not in ('steps', 'm', 'k'):
            raise ConfigError('Error@parse_sweep.', f'unknown sweep parameter {name!r}')
        items = [item for item in values.split(',') if item.strip()]
        if not all(item.strip().isdigit() for item in items):
            raise ConfigError('Error@parse_sweep.', f'{name} values must be positive integers, got {values!r}')
        result[name] = [int(item) for item in items]
    return result


def parameters_key(parameters: Dict) -> str:
    """Stable sha256 of a parameter mapping"""
    return hashlib.sha256(json.dumps(parameters, sort_keys=True, default=float).encode('utf8')).hexdigest()
