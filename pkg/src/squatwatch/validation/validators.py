"""The four checks applied, in order, to every model reply.

format -> consistency -> must-pass -> target existence. Each failure is an
exception carrying its status name and the fixed feedback text that goes
back to the model.
"""
import abc
import dataclasses
import functools
import json
import os
import threading
from typing import (AbstractSet, Dict, Iterable, List, Optional, Sequence,
                    Tuple)

import dns.exception
import dns.resolver
from absl import logging
from squatwatch import utils
from squatwatch.domains import names
from squatwatch.domains import structure
from squatwatch.expansion import index as index_lib
from squatwatch.validation import mustpass

FEEDBACK_DIR = os.path.join(
    os.path.dirname(os.path.dirname(__file__)), 'data', 'feedback')
FINDING_KEYS = frozenset(('s', 'd', 'sx', 'type', 'l'))
_FENCE = '```'


@functools.lru_cache(maxsize=16)
def feedback_text(name: str, directory: str = FEEDBACK_DIR) -> str:
  with open(os.path.join(directory, name + '.txt'), encoding='utf-8') as fh:
    return fh.read().strip()


class ValidationError(Exception):
  status = 'ValidationError'
  template = ''

  def __init__(self, detail: str, feedback_dir: str = FEEDBACK_DIR):
    super().__init__(detail)
    self.detail = detail
    self.feedback = feedback_text(self.template, feedback_dir)


class FormatError(ValidationError):
  status = 'FormatError'
  template = 'format'


class ConsistencyError(ValidationError):
  status = 'ConsistencyError'
  template = 'consistency'


class MustPassError(ValidationError):
  status = 'MustPassError'
  template = 'must_pass'


class TargetExistenceError(ValidationError):
  status = 'TargetExistenceError'
  template = 'target_existence'


@dataclasses.dataclass(frozen=True)
class Finding:
  s: str
  d: str
  sx: str
  squatting_type: structure.SquattingType
  # Targeted legitimate domain as reported.
  l: str

  @property
  def key(self) -> Tuple[str, str, str]:
    return self.s, self.d, self.sx

  @property
  def registrable(self) -> str:
    return f'{self.d}.{self.sx}'


def _unfence(text: str) -> str:
  text = text.strip()
  if text.startswith(_FENCE):
    first_newline = text.find('\n')
    if first_newline == -1 or not text.endswith(_FENCE):
      return text
    text = text[first_newline + 1:-len(_FENCE)].strip()
  return text


def _finding(item, position: int) -> Finding:
  if not isinstance(item, dict) or set(item) != FINDING_KEYS:
    raise ValueError(f'element {position} must have exactly the keys '
                     f'{sorted(FINDING_KEYS)}')
  if not all(isinstance(value, str) for value in item.values()):
    raise ValueError(f'element {position} has a non-string value')
  squatting_type = structure.SquattingType.from_label(item['type'])
  target = names.normalize(item['l'])
  if '.' not in target:
    raise ValueError(f'element {position} target {item["l"]!r} has no suffix')
  return Finding(s=item['s'].strip().lower(), d=item['d'].strip().lower(),
                 sx=item['sx'].strip().lower(), squatting_type=squatting_type,
                 l=target)


def validate_format(response_text: str,
    feedback_dir: str = FEEDBACK_DIR) -> List[Finding]:
  """Parses a single JSON array of findings, allowing only a code fence.

  Raises:
    FormatError: Anything else.
  """
  try:
    parsed = json.loads(_unfence(response_text))
    if not isinstance(parsed, list):
      raise ValueError('reply is not a JSON array')
    return [_finding(item, i) for i, item in enumerate(parsed)]
  except ValueError as e:
    raise FormatError(str(e), feedback_dir) from e


def check_consistency(findings: Iterable[Finding],
    augmented: mustpass.Augmented,
    feedback_dir: str = FEEDBACK_DIR) -> List[Finding]:
  """Keeps one finding per input domain; rejects names not in the input.

  Raises:
    ConsistencyError: A finding names a domain outside the augmented chunk
      or targets its own registrable domain.
  """
  known = {
      (f.s, f.d, f.sx) for f in (mustpass.item_fqdn(i) for i in augmented)
  }
  unique: Dict[Tuple[str, str, str], Finding] = {}
  for finding in findings:
    if finding.key not in known:
      raise ConsistencyError(f'{finding.key} is not an input domain',
                             feedback_dir)
    if finding.l == finding.registrable:
      raise ConsistencyError(f'{finding.registrable} targets itself',
                             feedback_dir)
    unique.setdefault(finding.key, finding)
  return list(unique.values())


def verify_must_pass(findings: Sequence[Finding],
    injected: Iterable[mustpass.MustPassEntry],
    feedback_dir: str = FEEDBACK_DIR) -> None:
  """Squat entries reported with their brand; benign entries not reported.

  The error detail names the entry for the logs; the feedback never does.

  Raises:
    MustPassError: Either rule is broken.
  """
  by_key = {finding.key: finding for finding in findings}
  for entry in injected:
    fqdn = entry.fqdn
    finding = by_key.get((fqdn.s, fqdn.d, fqdn.sx))
    if entry.expected is mustpass.Expectation.BENIGN:
      if finding is not None:
        raise MustPassError(f'{fqdn.raw} reported as squatting', feedback_dir)
    elif finding is None or finding.l != entry.provenance:
      raise MustPassError(f'{fqdn.raw} not reported as targeting '
                          f'{entry.provenance}', feedback_dir)


class ExistenceChecker(abc.ABC):

  @abc.abstractmethod
  def exists(self, domain: str) -> bool:
    """True when `domain` is a real registered domain."""


class OfflineChecker(ExistenceChecker):
  """Reference index plus an optional allowlist, one domain per line."""

  def __init__(self, known: AbstractSet[str] = frozenset()):
    self._known = frozenset(known)

  @classmethod
  def from_file(cls, path: Optional[str]) -> 'OfflineChecker':
    if not path:
      return cls()
    with utils.open_text(path) as fh:
      domains = {
          names.normalize(line.strip())
          for line in fh
          if line.strip() and not line.startswith('#')
      }
    return cls(domains)

  def exists(self, domain: str) -> bool:
    return domain in self._known


class DnsExistenceChecker(ExistenceChecker):
  """Asks DNS for NS records of the target; answers are cached."""

  def __init__(self, resolver: Optional[dns.resolver.Resolver] = None,
      lifetime: float = 5.0):
    self._resolver = resolver or dns.resolver.Resolver()
    self._lifetime = lifetime
    self._cache: Dict[str, bool] = {}
    self._lock = threading.Lock()

  def _lookup(self, domain: str) -> bool:
    try:
      self._resolver.resolve(domain, 'NS', lifetime=self._lifetime)
      return True
    except (dns.resolver.NXDOMAIN, dns.resolver.NoAnswer,
            dns.resolver.NoNameservers):
      return False
    except dns.exception.Timeout:
      logging.warning('NS lookup for %s timed out', domain)
      return False

  def exists(self, domain: str) -> bool:
    with self._lock:
      if domain in self._cache:
        return self._cache[domain]
    found = self._lookup(domain)
    with self._lock:
      self._cache[domain] = found
    return found


def verify_targets(findings: Iterable[Finding],
    index: index_lib.ReferenceIndex,
    checker: Optional[ExistenceChecker] = None,
    feedback_dir: str = FEEDBACK_DIR) -> None:
  """Every target is indexed or confirmed by the checker.

  Raises:
    TargetExistenceError: Some target is neither.
  """
  for finding in findings:
    if finding.l in index:
      continue
    if checker is not None and checker.exists(finding.l):
      continue
    raise TargetExistenceError(f'target {finding.l} does not exist',
                               feedback_dir)
