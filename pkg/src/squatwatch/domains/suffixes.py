"""Public-suffix rule set loaded from a snapshot in the standard list format.

The rule file has one rule per line, '//' comments, '*.' wildcards and '!'
exceptions. Names under a TLD the snapshot does not list fall back to
treating the last label as the suffix.
"""
import dataclasses
import functools
import os
from typing import FrozenSet, Iterable

import idna
from absl import logging

_DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), 'data')
DEFAULT_SNAPSHOT = os.path.join(_DATA_DIR, 'public_suffix_list.dat')


def _ascii_rule(rule: str) -> str:
  if rule.isascii():
    return rule.lower()
  return '.'.join(
      label if label == '*' else idna.encode(label).decode('ascii')
      for label in rule.split('.'))


@dataclasses.dataclass(frozen=True)
class SuffixRules:
  rules: FrozenSet[str]
  # Parents of '*.' rules: 'ck' for '*.ck'.
  wildcards: FrozenSet[str]
  # Exception rules without the '!': 'www.ck' for '!www.ck'.
  exceptions: FrozenSet[str]

  @classmethod
  def from_lines(cls, lines: Iterable[str]) -> 'SuffixRules':
    rules, wildcards, exceptions = set(), set(), set()
    for line in lines:
      # Only the first whitespace-delimited token of a line is the rule.
      tokens = line.split()
      if not tokens or tokens[0].startswith('//'):
        continue
      rule = tokens[0]
      try:
        if rule.startswith('!'):
          exceptions.add(_ascii_rule(rule[1:]))
        elif rule.startswith('*.'):
          wildcards.add(_ascii_rule(rule[2:]))
        else:
          rules.add(_ascii_rule(rule))
      except idna.IDNAError:
        logging.warning('Skipping public-suffix rule that is not IDNA-valid: %s',
                        rule)
    return cls(rules=frozenset(rules),
               wildcards=frozenset(wildcards),
               exceptions=frozenset(exceptions))

  @classmethod
  def load(cls, path: str = DEFAULT_SNAPSHOT) -> 'SuffixRules':
    with open(path, 'r', encoding='utf-8') as fh:
      return cls.from_lines(fh)

  def public_suffix(self, name: str) -> str:
    """Longest matching public suffix of a normalized name."""
    labels = name.split('.')
    for i in range(len(labels)):
      candidate = '.'.join(labels[i:])
      if candidate in self.exceptions:
        return '.'.join(labels[i + 1:])
      if candidate in self.rules:
        return candidate
      parent = '.'.join(labels[i + 1:])
      if i + 1 < len(labels) and parent in self.wildcards:
        return candidate
    return labels[-1]

  def is_suffix(self, name: str) -> bool:
    return self.public_suffix(name) == name


@functools.lru_cache(maxsize=1)
def default_rules() -> SuffixRules:
  return SuffixRules.load()
