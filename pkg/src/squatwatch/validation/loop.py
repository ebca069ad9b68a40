"""Bounded attempt loop that turns one chunk into accepted verdicts."""
import concurrent.futures
import dataclasses
import enum
from typing import Dict, List, Optional, Sequence, Tuple

from absl import logging
from squatwatch import utils
from squatwatch.domains import structure
from squatwatch.expansion import index as index_lib
from squatwatch.expansion import pairs as pairs_lib
from squatwatch.llm import backend as backend_lib
from squatwatch.squatting import brands as brands_lib
from squatwatch.validation import mustpass
from squatwatch.validation import prompt
from squatwatch.validation import validators

TRANSPORT_FEEDBACK = 'transport'


class Status(enum.Enum):
  ACCEPTED = 'Accepted'
  FORMAT_ERROR = 'FormatError'
  CONSISTENCY_ERROR = 'ConsistencyError'
  MUST_PASS_ERROR = 'MustPassError'
  TARGET_EXISTENCE_ERROR = 'TargetExistenceError'
  TRANSPORT_ERROR = 'TransportError'


@dataclasses.dataclass(frozen=True)
class ValidationOutcome:
  status: Status
  verdicts: Tuple[structure.Verdict, ...] = ()
  feedback: str = ''
  attempt: int = 1

  def __post_init__(self):
    if self.attempt < 1:
      raise ValueError(f'attempt must be at least 1, got {self.attempt}')
    if self.status is Status.ACCEPTED and self.feedback:
      raise ValueError('an accepted outcome carries no feedback')
    if self.status is not Status.ACCEPTED and self.verdicts:
      raise ValueError(f'{self.status.value} outcome cannot carry verdicts')

  @property
  def accepted(self) -> bool:
    return self.status is Status.ACCEPTED


@dataclasses.dataclass(frozen=True)
class ChunkResult:
  chunk_id: int
  outcome: ValidationOutcome
  attempts_used: int
  input_tokens: int = 0
  output_tokens: int = 0

  @property
  def accepted(self) -> bool:
    return self.outcome.accepted

  @property
  def verdicts(self) -> Tuple[structure.Verdict, ...]:
    return self.outcome.verdicts


@dataclasses.dataclass(frozen=True)
class TrvSettings:
  max_attempts: int = 3
  # Off: one attempt, format parsing only, no must-pass entries.
  validate: bool = True
  # Off: no reference list in the prompt.
  references: bool = True
  max_output_tokens: int = 4096
  feedback_dir: str = validators.FEEDBACK_DIR

  def __post_init__(self):
    if self.max_attempts < 1:
      raise ValueError(
          f'max_attempts must be at least 1, got {self.max_attempts}')

  @property
  def attempts(self) -> int:
    return self.max_attempts if self.validate else 1


def _verdicts(findings: Sequence[validators.Finding],
    augmented: mustpass.Augmented,
    injected: Sequence[mustpass.MustPassEntry]) -> List[structure.Verdict]:
  by_key: Dict[Tuple[str, str, str], structure.Fqdn] = {}
  for item in augmented:
    fqdn = mustpass.item_fqdn(item)
    by_key[(fqdn.s, fqdn.d, fqdn.sx)] = fqdn
  controls = {(e.fqdn.s, e.fqdn.d, e.fqdn.sx) for e in injected}
  out = []
  for finding in findings:
    fqdn = by_key.get(finding.key)
    if fqdn is None or finding.key in controls:
      continue
    try:
      out.append(structure.Verdict(fqdn=fqdn,
                                   squatting_type=finding.squatting_type,
                                   target=finding.l,
                                   source=structure.VerdictSource.LLM))
    except ValueError as e:
      # Only reachable with validation off.
      logging.debug('Dropping finding %s: %s', finding.key, e)
  return out


def _validate(text: str, augmented: mustpass.Augmented,
    injected: Sequence[mustpass.MustPassEntry],
    index: index_lib.ReferenceIndex,
    checker: Optional[validators.ExistenceChecker],
    settings: TrvSettings) -> List[validators.Finding]:
  findings = validators.validate_format(text, settings.feedback_dir)
  if not settings.validate:
    return findings
  findings = validators.check_consistency(findings, augmented,
                                          settings.feedback_dir)
  validators.verify_must_pass(findings, injected, settings.feedback_dir)
  validators.verify_targets(findings, index, checker, settings.feedback_dir)
  return findings


def process_chunk(chunk: pairs_lib.Chunk, backend: backend_lib.Backend,
    settings: TrvSettings, pool: brands_lib.BrandSet,
    index: index_lib.ReferenceIndex,
    checker: Optional[validators.ExistenceChecker] = None) -> ChunkResult:
  """inject -> prompt -> chat -> validators, until accepted or out of tries.

  The same must-pass entries are used on every attempt. Feedback of failed
  validations accumulates in the prompt; lost transport attempts add none.
  An auth failure ends the loop at once.
  """
  if settings.validate:
    names_in_chunk = {pair.input.raw for pair in chunk.pairs}
    entries = mustpass.select_must_pass(pool, chunk.id, names_in_chunk)
    augmented, chunk = mustpass.inject(chunk, entries)
  else:
    entries, augmented = [], list(chunk.pairs)
  references = chunk.references if settings.references else ()
  feedback: List[str] = []
  input_tokens = output_tokens = 0
  outcome = None
  attempt = 0
  while attempt < settings.attempts:
    attempt += 1
    request = prompt.build_prompt(augmented, references, feedback,
                                  settings.max_output_tokens, attempt)
    try:
      response = backend.chat(request)
    except backend_lib.BackendError as e:
      backend_lib.log_failure(e, chunk=chunk.id, attempt=attempt)
      outcome = ValidationOutcome(Status.TRANSPORT_ERROR,
                                  feedback=TRANSPORT_FEEDBACK, attempt=attempt)
      if isinstance(e, backend_lib.AuthError):
        break
      continue
    input_tokens += response.input_tokens
    output_tokens += response.output_tokens
    try:
      findings = _validate(response.text, augmented, entries, index, checker,
                           settings)
    except validators.ValidationError as e:
      utils.log_event('trv', 'rejected', chunk=chunk.id, attempt=attempt,
                      status=e.status)
      logging.debug('Chunk %d attempt %d: %s', chunk.id, attempt, e.detail)
      feedback.append(e.feedback)
      outcome = ValidationOutcome(Status(e.status), feedback=e.feedback,
                                  attempt=attempt)
      continue
    verdicts = _verdicts(findings, augmented, entries)
    utils.log_event('trv', 'accepted', chunk=chunk.id, attempt=attempt,
                    verdicts=len(verdicts))
    outcome = ValidationOutcome(Status.ACCEPTED, verdicts=tuple(verdicts),
                                attempt=attempt)
    break
  if not outcome.accepted:
    utils.log_event('trv', 'exhausted', chunk=chunk.id, level=logging.WARNING,
                    attempts=attempt, status=outcome.status.value)
  return ChunkResult(chunk_id=chunk.id, outcome=outcome, attempts_used=attempt,
                     input_tokens=input_tokens, output_tokens=output_tokens)


def process_chunks(chunks: Sequence[pairs_lib.Chunk],
    backend: backend_lib.Backend, settings: TrvSettings,
    pool: brands_lib.BrandSet, index: index_lib.ReferenceIndex,
    checker: Optional[validators.ExistenceChecker] = None,
    workers: Optional[int] = None) -> List[ChunkResult]:
  """Chunks run concurrently up to the backend's in-flight limit."""
  workers = workers or backend.max_in_flight
  with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
    return list(
        executor.map(
            lambda chunk: process_chunk(chunk, backend, settings, pool, index,
                                        checker), chunks))
