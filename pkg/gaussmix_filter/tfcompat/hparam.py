# Copyright 2016 The TensorFlow Authors. All Rights Reserved.
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
# ==============================================================================
"""Hyperparameter values.

Trimmed down and reworked for study configuration: one ``name=value`` clause
per override (overrides are repeatable on the command line), dotted names are
first-class, and every failure names the offending key.
"""
import json
import numbers
import re

# A legal clause looks like:
#   <variable name> = <rhs>
# where <rhs> is either a single token or [] enclosed list of tokens.
# For example:  "epsilon = 0.5", "clt.ks_factor=1.5" or "n_grid = [50,100,200]"
PARAM_RE = re.compile(r"""
  ^\s*(?P<name>[a-zA-Z][\w\.]*)   # variable name: "epsilon" or "clt.ks_factor"
  \s*=\s*
  ((?P<vals>\[[^\]]*\])          # list of values: "[1,2,3]"
   |
   (?P<val>[^\[\]]*))            # single value: "0.5"
  \s*$""", re.VERBOSE)


def _parse_fail(name, var_type, value):
  raise ValueError(
      'Could not parse hparam \'%s\' of type \'%s\' with value \'%s\'' %
      (name, var_type.__name__, value))


def _unknown_fail(name):
  raise ValueError('Unknown hparam \'%s\'' % name)


def _cast_to_type_if_compatible(name, param_type, value):
  """Cast hparam to the provided type, if compatible.

  Raises:
    ValueError: If the type of `value` is not compatible with param_type.
      * If `param_type` is a string type, but `value` is not.
      * If `param_type` is a boolean, but `value` is not, or vice versa.
      * If `param_type` is an integer type, but `value` is not.
      * If `param_type` is a float type, but `value` is not a numeric type.
  """
  fail_msg = (
      "Could not cast hparam '%s' of type '%s' from value %r" %
      (name, param_type.__name__, value))

  if issubclass(param_type, str) and not isinstance(value, str):
    raise ValueError(fail_msg)

  # Avoid converting a number or string type to a boolean or vice versa.
  if issubclass(param_type, bool) != isinstance(value, bool):
    raise ValueError(fail_msg)

  # Avoid converting float to an integer (the reverse is fine).
  if (issubclass(param_type, numbers.Integral) and
      not isinstance(value, numbers.Integral)):
    raise ValueError(fail_msg)

  if (issubclass(param_type, numbers.Number) and
      not isinstance(value, numbers.Number)):
    raise ValueError(fail_msg)

  return param_type(value)


def _scalar_parser(name, param_type):
  if param_type == bool:
    def parse_bool(value):
      if value in ['true', 'True', '1']:
        return True
      elif value in ['false', 'False', '0']:
        return False
      _parse_fail(name, param_type, value)
    return parse_bool

  if param_type == int:
    def parse_int(value):
      # 64-bit seeds are commonly written in hex
      return int(value, 0)
    return parse_int

  return param_type


def parse_override(clause, type_map):
  """Parses a single ``name=value`` clause into ``(name, value)``.

  Args:
    clause: String such as ``"epsilon=0.5"`` or ``"n_grid=[50,100,200,400]"``.
    type_map: A dictionary mapping hyperparameter names to ``(type, is_list)``.

  Returns:
    A ``(name, value)`` tuple with `value` already converted.

  Raises:
    ValueError: If the clause is malformed, names an unknown hparam, or its
      value cannot be parsed as the declared type.
  """
  m = PARAM_RE.match(clause)
  if not m:
    raise ValueError('Malformed hparam override: %s' % clause)
  m_dict = m.groupdict()
  name = m_dict['name']
  if name not in type_map:
    _unknown_fail(name)
  param_type, is_list = type_map[name]
  parse = _scalar_parser(name, param_type)

  if m_dict['vals'] is not None:
    if not is_list:
      raise ValueError(
          'Must not pass a list for single-valued hparam: %s' % name)
    elements = filter(None, re.split('[ ,]', m_dict['vals'][1:-1]))
    try:
      return name, [parse(e) for e in elements]
    except ValueError:
      _parse_fail(name, param_type, m_dict['vals'])

  if is_list:
    # a bare scalar for a list hparam is a one-element list
    try:
      return name, [parse(m_dict['val'].strip())]
    except ValueError:
      _parse_fail(name, param_type, m_dict['val'])
  try:
    return name, parse(m_dict['val'].strip())
  except ValueError:
    _parse_fail(name, param_type, m_dict['val'])


class HParams(object):
  """Class to hold a set of hyperparameters as name-value pairs.

  Hyperparameters have type, which is inferred from the type of their value
  passed at construction time. The supported types are: integer, float,
  boolean, string, and list of integer, float, boolean, or string.

  Dotted names (``"clt.ks_factor"``) are accepted through the keyword
  dictionary form of the constructor and are reachable with ``getattr``,
  ``get`` and ``values``.

  Example:

  ```python
  hp = HParams(epsilon=0.5, n_grid=[50, 100, 200, 400])
  hp.parse_overrides(['epsilon=0.25'])
  hp.parse_json('{"n_grid": [100, 200, 400, 800]}')
  ```
  """

  def __init__(self, **kwargs):
    # _hparam_types maps the parameter name to a tuple (type, is_list).
    self._hparam_types = {}
    for name, value in kwargs.items():
      self.add_hparam(name, value)

  def add_hparam(self, name, value):
    """Adds {name, value} pair to hyperparameters.

    Raises:
      ValueError: if the name is reserved or a list value is empty.
    """
    if getattr(self, name, None) is not None:
      raise ValueError('Hyperparameter name is reserved: %s' % name)
    if isinstance(value, (list, tuple)):
      if not value:
        raise ValueError(
            'Multi-valued hyperparameters cannot be empty: %s' % name)
      self._hparam_types[name] = (type(value[0]), True)
      value = list(value)
    else:
      self._hparam_types[name] = (type(value), False)
    setattr(self, name, value)

  def set_hparam(self, name, value):
    """Set the value of an existing hyperparameter.

    Raises:
      ValueError: If the name is unknown or there is a type mismatch.
    """
    if name not in self._hparam_types:
      _unknown_fail(name)
    param_type, is_list = self._hparam_types[name]
    if isinstance(value, (list, tuple)):
      if not is_list:
        raise ValueError(
            'Must not pass a list for single-valued hparam: %s' % name)
      setattr(self, name, [
          _cast_to_type_if_compatible(name, param_type, v) for v in value])
    else:
      if is_list:
        raise ValueError(
            'Must pass a list for multi-valued hparam: %s' % name)
      setattr(self, name, _cast_to_type_if_compatible(name, param_type, value))

  def parse_overrides(self, clauses):
    """Override hyperparameter values from ``name=value`` strings.

    Returns:
      The `HParams` instance.
    """
    for clause in clauses:
      name, value = parse_override(clause, self._hparam_types)
      self.set_hparam(name, value)
    return self

  def override_from_dict(self, values_dict):
    for name, value in values_dict.items():
      self.set_hparam(name, value)
    return self

  def parse_json(self, values_json):
    """Override hyperparameter values from a json object.

    Raises:
      ValueError: If `values_json` is not a json object or names an unknown
        hparam.
    """
    values_map = json.loads(values_json)
    if not isinstance(values_map, dict):
      raise ValueError('Config must be a json object of name:value pairs')
    return self.override_from_dict(values_map)

  def to_json(self, indent=None, sort_keys=True):
    return json.dumps(self.values(), indent=indent, sort_keys=sort_keys)

  def values(self):
    """Return the hyperparameter values as a Python dictionary."""
    return {n: getattr(self, n) for n in self._hparam_types.keys()}

  def get(self, key, default=None):
    if key in self._hparam_types:
      return getattr(self, key)
    return default

  def __contains__(self, key):
    return key in self._hparam_types

  def __str__(self):
    return str(sorted(self.values().items()))

  def __repr__(self):
    return '%s(%s)' % (type(self).__name__, self.__str__())
