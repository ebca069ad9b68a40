"""Value types shared by every stage: names, squatting types and verdicts."""
import dataclasses
import enum
import re
from typing import Optional, Tuple

_HOSTNAME_LABEL = re.compile(r'^[a-z0-9-]+$')


class TypoSubtype(enum.Enum):
  MISSING_DOT = 'missing_dot'
  OMISSION = 'omission'
  PERMUTATION = 'permutation'
  REPLACEMENT = 'replacement'
  INSERTION = 'insertion'


class Technique(enum.Enum):
  """The eight squatting techniques, in baseline detection precedence."""
  TYPO = 'typo'
  BIT = 'bit'
  HOMO = 'homo'
  SOUND = 'sound'
  TLD = 'tld'
  LEVEL = 'level'
  COMBO = 'combo'
  HYBRID = 'hybrid'


class VerdictSource(enum.Enum):
  LLM = 'llm'
  BASELINE = 'baseline'
  ORACLE = 'oracle'


@dataclasses.dataclass(frozen=True)
class Fqdn:
  # Subdomain, possibly empty, dot-separated labels.
  s: str
  # Registrable label, left of the public suffix.
  d: str
  # Public suffix, e.g. 'com' or 'co.jp'.
  sx: str
  # The normalized name the parts were taken from.
  raw: str

  def __post_init__(self):
    """Raises error if the parts do not describe `raw`."""
    if not self.d or '.' in self.d:
      raise ValueError(f'registrable label must be one label, not: {self.d!r}')
    if not self.sx:
      raise ValueError(f'public suffix missing for: {self.raw!r}')
    if self.raw != self.raw.lower():
      raise ValueError(f'fqdn must be lowercase: {self.raw!r}')
    if self.raw.startswith('.') or self.raw.endswith('.'):
      raise ValueError(f'fqdn has a leading or trailing dot: {self.raw!r}')
    if join_parts(self.s, self.d, self.sx) != self.raw:
      raise ValueError(
          f'parts {self.s!r}/{self.d!r}/{self.sx!r} do not reassemble {self.raw!r}')

  @property
  def registrable(self) -> str:
    return f'{self.d}.{self.sx}'

  @property
  def subdomain_labels(self) -> Tuple[str, ...]:
    return tuple(self.s.split('.')) if self.s else ()


def join_parts(s: str, d: str, sx: str) -> str:
  return '.'.join(part for part in (s, d, sx) if part)


def is_valid_label(label: str) -> bool:
  """Hostname label check: charset, length and hyphen placement."""
  if not label or len(label) > 63:
    return False
  if label.startswith('-') or label.endswith('-'):
    return False
  return bool(_HOSTNAME_LABEL.match(label))


@dataclasses.dataclass(frozen=True)
class SquattingType:
  technique: Technique
  subtype: Optional[TypoSubtype] = None
  # Underlying techniques of a hybrid squat. Empty when the source (a model
  # reply) only reported the hybrid label.
  components: Tuple[Technique, ...] = ()

  def __post_init__(self):
    if self.subtype is not None and self.technique is not Technique.TYPO:
      raise ValueError(
          f'only typo squats carry a subtype, not: {self.technique.value}')
    if self.components and self.technique is not Technique.HYBRID:
      raise ValueError(
          f'only hybrid squats carry components, not: {self.technique.value}')
    if self.components:
      if len(set(self.components)) < 2:
        raise ValueError(
            f'hybrid needs two or more techniques, not: {self.components}')
      if Technique.HYBRID in self.components:
        raise ValueError('hybrid cannot be a component of itself')

  @property
  def label(self) -> str:
    return self.technique.value

  @classmethod
  def from_label(cls, text: str) -> 'SquattingType':
    """Parses one of the eight canonical labels; raises ValueError otherwise."""
    try:
      return cls(Technique(text))
    except ValueError:
      raise ValueError(f'unknown squatting type: {text!r}') from None


TYPE_VOCABULARY = tuple(technique.value for technique in Technique)


@dataclasses.dataclass(frozen=True)
class Verdict:
  fqdn: Fqdn
  squatting_type: SquattingType
  # Targeted legitimate registrable domain, e.g. 'amazon.com'.
  target: str
  source: VerdictSource

  def __post_init__(self):
    target = self.target
    if target != target.lower() or '.' not in target:
      raise ValueError(f'target is not a registrable domain: {target!r}')
    if target.startswith('.') or target.endswith('.') or '..' in target:
      raise ValueError(f'target is not a registrable domain: {target!r}')
    if target == self.fqdn.registrable:
      raise ValueError(f'{self.fqdn.raw} cannot target its own domain')
