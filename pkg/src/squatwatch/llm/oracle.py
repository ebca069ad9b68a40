"""Deterministic stand-in for a model, with seeded fault injection.

The oracle reads the input domains out of the prompt, answers with what the
hybrid-aware rule detector finds, then damages that answer according to a
FaultProfile. All randomness is drawn from (seed, request text), so the same
request always gets the same reply.
"""
import dataclasses
import functools
import hashlib
import json
from typing import List, Optional, Union

import numpy as np
from squatwatch.domains import names
from squatwatch.llm import backend
from squatwatch.squatting import brands as brands_lib
from squatwatch.squatting import detectors
from squatwatch.validation import prompt

UNPARSEABLE_REPLY = 'I could not find the input domains in your request.'


@dataclasses.dataclass(frozen=True)
class FaultProfile:
  # Omit the findings of the reply.
  drop_rate: float = 0.0
  # Report a domain that is not in the input.
  hallucinate_rate: float = 0.0
  # Put prose around the JSON array.
  corrupt_format_rate: float = 0.0
  # Name a legitimate domain that does not exist.
  fabricate_target_rate: float = 0.0
  seed: int = 0
  # Faults apply only to the first N attempts of a chunk; 0 means always.
  fault_attempts: int = 0

  def __post_init__(self):
    for field in ('drop_rate', 'hallucinate_rate', 'corrupt_format_rate',
                  'fabricate_target_rate'):
      value = getattr(self, field)
      if not 0.0 <= value <= 1.0:
        raise ValueError(f'{field} must be in [0, 1], got {value}')
    if self.fault_attempts < 0:
      raise ValueError(
          f'fault_attempts must be non-negative, got {self.fault_attempts}')

  def active(self, attempt: int) -> bool:
    return self.fault_attempts == 0 or attempt <= self.fault_attempts


NO_FAULTS = FaultProfile()
hallucinating = functools.partial(FaultProfile, hallucinate_rate=0.5,
                                  fault_attempts=1)
corrupting = functools.partial(FaultProfile, corrupt_format_rate=1.0)


def _rng(request: backend.LlmRequest, seed: int) -> np.random.Generator:
  digest = hashlib.blake2b(
      (request.system_text + '\0' + request.user_text).encode('utf-8'),
      digest_size=8).digest()
  return np.random.default_rng([seed, int.from_bytes(digest, 'little')])


def _findings(records: List[dict],
    detector: detectors.BaselineDetector) -> List[dict]:
  out = []
  for record in records:
    verdict = detector.detect_with_hybrid(names.from_structured(record))
    if verdict is not None:
      out.append({'s': record['s'], 'd': record['d'], 'sx': record['sx'],
                  'type': verdict.squatting_type.label, 'l': verdict.target})
  return out


def _phantom(records: List[dict], rng: np.random.Generator) -> dict:
  taken = {(r['s'], r['d'], r['sx']) for r in records}
  while True:
    label = f'phantom{int(rng.integers(10**6)):06d}'
    if ('', label, 'com') not in taken:
      return {'s': '', 'd': label, 'sx': 'com', 'type': 'combo',
              'l': 'example.com'}


def oracle_respond(
    request: backend.LlmRequest,
    brands: Union[brands_lib.BrandSet, detectors.BaselineDetector],
    faults: FaultProfile = NO_FAULTS) -> backend.LlmResponse:
  """Answers the prompt's Input Domains the way the rule detector would.

  Four uniform draws are taken in a fixed order (drop, hallucinate,
  fabricate, corrupt) whether or not the faults are active. Whether they are
  active depends on `request.attempt`, the attempt number of the chunk loop.
  """
  section = prompt.extract_section(request.user_text, prompt.INPUTS)
  try:
    records = json.loads(section) if section else None
    if not isinstance(records, list):
      raise ValueError('input section is not a list')
    detector = (brands if isinstance(brands, detectors.BaselineDetector) else
                detectors.detector_for(brands))
    findings = _findings(records, detector)
  except (ValueError, TypeError, KeyError):
    return _response(request, UNPARSEABLE_REPLY)

  rng = _rng(request, faults.seed)
  draws = rng.random(4)
  if faults.active(request.attempt):
    if draws[0] < faults.drop_rate:
      findings = []
    if draws[1] < faults.hallucinate_rate:
      findings.append(_phantom(records, rng))
    if draws[2] < faults.fabricate_target_rate and findings:
      victim = findings[int(rng.integers(len(findings)))]
      label = victim['l'].partition('.')[0]
      victim['l'] = f'{label}-official{int(rng.integers(10**6)):06d}.com'
    text = json.dumps(findings)
    if draws[3] < faults.corrupt_format_rate:
      text = 'Here is my analysis of the input domains:\n' + text
  else:
    text = json.dumps(findings)
  return _response(request, text)


def _response(request: backend.LlmRequest, text: str) -> backend.LlmResponse:
  return backend.LlmResponse(
      text=text,
      input_tokens=backend.estimate_tokens(request.system_text +
                                           request.user_text),
      output_tokens=backend.estimate_tokens(text),
      latency_ms=0)


class OracleBackend(backend.Backend):

  def __init__(self, brand_set: brands_lib.BrandSet,
      faults: FaultProfile = NO_FAULTS, max_in_flight: int = 4,
      detector: Optional[detectors.BaselineDetector] = None):
    super().__init__(max_in_flight)
    self.detector = detector or detectors.BaselineDetector(brand_set)
    self.faults = faults

  @property
  def name(self) -> str:
    return 'oracle'

  def _complete(self, request: backend.LlmRequest) -> backend.LlmResponse:
    return oracle_respond(request, self.detector, self.faults)
