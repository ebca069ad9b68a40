"""Seeded labelled dataset of generated squats and benign names.

Candidates for each technique come from the generators and are kept only
when the hybrid-aware detector assigns them that same technique and brand,
so every label is unambiguous. Sampling uses jax.random so a seed gives the
same dataset on every platform.
"""
import dataclasses
import json
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union

import jax
import numpy as np
from squatwatch import utils
from squatwatch.domains import names
from squatwatch.domains import structure
from squatwatch.squatting import brands as brands_lib
from squatwatch.squatting import detectors
from squatwatch.squatting import generators

Technique = structure.Technique

# Per-technique counts of the reference evaluation set (1,649 squats).
REFERENCE_QUOTAS = {
    Technique.TYPO: 369,
    Technique.HOMO: 249,
    Technique.BIT: 136,
    Technique.SOUND: 33,
    Technique.TLD: 156,
    Technique.COMBO: 706,
}

# Unrelated registrable domains that host level and hybrid squats.
DEFAULT_CARRIERS = ('domain.example', 'account-review.info',
                    'customer-care.online', 'web-access.site',
                    'portal-gateway.xyz', 'notice-center.net')

_BENIGN_PREFIXES = ('www', 'mail', 'login', 'shop', 'support', 'api', 'cdn',
                    'blog', 'm', 'news', 'help', 'accounts', 'static', 'app',
                    'dev', 'docs', 'status', 'images', 'store', 'careers')
_LETTERS = np.array(list('abcdefghijklmnopqrstuvwxyz'))
_BENIGN_STREAM = 1000
# Hybrid candidates multiply fast; a few keywords and carriers are plenty.
_HYBRID_KEYWORDS = 3
_HYBRID_CARRIERS = 2


class QuotaError(ValueError):
  """A quota is larger than the number of usable generated names."""

  def __init__(self, technique: Union[Technique, str], requested: int,
      available: int):
    label = technique.value if isinstance(technique, Technique) else technique
    super().__init__(f'quota for {label} is {requested} but only {available} '
                     f'unambiguous names can be generated')
    self.technique = technique


@dataclasses.dataclass(frozen=True)
class LabeledName:
  fqdn: str
  # None for benign names.
  technique: Optional[Technique]
  subtype: Optional[structure.TypoSubtype]
  target: Optional[str]

  @property
  def is_squat(self) -> bool:
    return self.technique is not None

  def to_json(self) -> str:
    return json.dumps({
        'fqdn': self.fqdn,
        'type': self.technique.value if self.technique else None,
        'subtype': self.subtype.value if self.subtype else None,
        'target': self.target,
    })

  @classmethod
  def from_json(cls, line: str) -> 'LabeledName':
    record = json.loads(line)
    technique = record.get('type')
    subtype = record.get('subtype')
    return cls(
        fqdn=record['fqdn'],
        technique=Technique(technique) if technique else None,
        subtype=structure.TypoSubtype(subtype) if subtype else None,
        target=record.get('target'))


def _raw_candidates(technique: Technique, brand: brands_lib.Brand,
    detector: detectors.BaselineDetector, tlds: Sequence[str],
    carriers: Sequence[str]) -> Iterable[str]:
  t = detector.tables
  if technique in (Technique.TYPO, Technique.BIT, Technique.HOMO,
                   Technique.SOUND):
    return (f'{v}.{brand.suffix}'
            for v in generators.gen_lexical(brand.label, technique, t))
  if technique is Technique.TLD:
    return generators.gen_tld(brand.domain, tlds)
  if technique is Technique.COMBO:
    return (f'{v}.{brand.suffix}'
            for v in generators.gen_combo(brand.label, t.keywords))
  if technique is Technique.LEVEL:
    return generators.gen_level(brand.domain, carriers)
  return generators.gen_hybrid(brand.domain, carriers[:_HYBRID_CARRIERS], t,
                               t.keywords[:_HYBRID_KEYWORDS])


def candidate_pool(technique: Technique,
    detector: detectors.BaselineDetector,
    tlds: Optional[Sequence[str]] = None,
    carriers: Sequence[str] = DEFAULT_CARRIERS) -> List[LabeledName]:
  """Sorted names the detector labels with exactly this technique and brand."""
  tlds = tlds if tlds is not None else detector.brands.suffixes()
  pool: Dict[str, LabeledName] = {}
  for brand in detector.brands:
    for raw in sorted(
        _raw_candidates(technique, brand, detector, tlds, carriers)):
      if raw in pool:
        continue
      try:
        fqdn = names.parse(raw)
      except ValueError:
        continue
      verdict = detector.detect_with_hybrid(fqdn)
      if (verdict is None or verdict.target != brand.domain or
          verdict.squatting_type.technique is not technique):
        continue
      pool[fqdn.raw] = LabeledName(fqdn=fqdn.raw, technique=technique,
                                   subtype=verdict.squatting_type.subtype,
                                   target=brand.domain)
  return [pool[name] for name in sorted(pool)]


def _sample(key: jax.Array, population: int, count: int) -> List[int]:
  if count == 0:
    return []
  picks = jax.random.choice(key, population, shape=(count,), replace=False)
  return [int(i) for i in np.asarray(picks)]


def _benign_pool(detector: detectors.BaselineDetector, key: jax.Array,
    count: int) -> List[LabeledName]:
  """Brand subdomains plus random labels the detector leaves alone."""
  subdomains = sorted(f'{prefix}.{brand.domain}' for brand in detector.brands
                      for prefix in _BENIGN_PREFIXES)
  suffix_list = detector.brands.suffixes() or ('com',)
  total = 2 * count + 16
  length_key, char_key, suffix_key = jax.random.split(key, 3)
  lengths = np.asarray(jax.random.randint(length_key, (total,), 6, 13))
  chars = np.asarray(jax.random.randint(char_key, (total, 12), 0, 26))
  suffix_ids = np.asarray(
      jax.random.randint(suffix_key, (total,), 0, len(suffix_list)))
  randoms = [
      ''.join(_LETTERS[chars[i, :lengths[i]]]) + '.' + suffix_list[suffix_ids[i]]
      for i in range(total)
  ]
  pool = {}
  for raw in subdomains + randoms:
    if raw in pool:
      continue
    fqdn = names.parse(raw)
    if detector.detect_with_hybrid(fqdn) is None:
      pool[raw] = LabeledName(fqdn=raw, technique=None, subtype=None,
                              target=None)
  return list(pool.values())


def build_ground_truth(
    brand_set: brands_lib.BrandSet,
    quotas: Mapping[Union[Technique, str], int],
    seed: int,
    benign: int = 0,
    detector: Optional[detectors.BaselineDetector] = None,
    tlds: Optional[Sequence[str]] = None,
    carriers: Sequence[str] = DEFAULT_CARRIERS) -> List[LabeledName]:
  """Samples `quotas[t]` squats per technique plus `benign` benign names.

  Args:
    brand_set: Brands the squats target.
    quotas: Count per technique; techniques left out get zero.
    seed: Sampling seed.
    benign: Number of benign names.
    detector: Detector over `brand_set`; built when not given.
    tlds: Suffixes for TLD squats. Defaults to the brands' own suffixes.
    carriers: Host domains for level and hybrid squats.

  Returns:
    Labelled names sorted by name.

  Raises:
    QuotaError: A technique (or benign) cannot fill its quota.
  """
  detector = detector or detectors.BaselineDetector(brand_set)
  wanted = {Technique(t) if isinstance(t, str) else t: n
            for t, n in quotas.items()}
  key = jax.random.PRNGKey(seed)
  dataset = []
  for i, technique in enumerate(Technique):
    count = wanted.get(technique, 0)
    if count < 0:
      raise ValueError(f'negative quota for {technique.value}: {count}')
    if count == 0:
      continue
    pool = candidate_pool(technique, detector, tlds, carriers)
    if count > len(pool):
      raise QuotaError(technique, count, len(pool))
    picks = _sample(jax.random.fold_in(key, i), len(pool), count)
    dataset += [pool[j] for j in picks]
  if benign:
    benign_key = jax.random.fold_in(key, _BENIGN_STREAM)
    pool_key, pick_key = jax.random.split(benign_key)
    pool = _benign_pool(detector, pool_key, benign)
    if benign > len(pool):
      raise QuotaError('benign', benign, len(pool))
    dataset += [pool[j] for j in _sample(pick_key, len(pool), benign)]
  return sorted(dataset, key=lambda entry: entry.fqdn)


def write_dataset(dataset: Iterable[LabeledName], path: str) -> int:
  lines = [entry.to_json() + '\n' for entry in dataset]
  utils.atomic_write_text(path, ''.join(lines))
  return len(lines)


def read_dataset(path: str) -> List[LabeledName]:
  with utils.open_text(path) as fh:
    return [LabeledName.from_json(line) for line in fh if line.strip()]
