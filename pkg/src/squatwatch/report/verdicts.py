"""JSONL verdict records: one line per verdict, sorted by input name."""
import dataclasses
import json
from typing import Iterable, List, Optional, TextIO

from squatwatch import utils
from squatwatch.domains import names
from squatwatch.domains import structure
from squatwatch.validation import loop


@dataclasses.dataclass(frozen=True)
class VerdictRecord:
  verdict: structure.Verdict
  # None for verdicts that did not come out of a chunk (baseline runs).
  chunk: Optional[int]
  attempts: int

  def __post_init__(self):
    if self.attempts < 0:
      raise ValueError(f'attempts must be non-negative, got {self.attempts}')
    if self.chunk is None and self.attempts:
      raise ValueError(
          f'attempts={self.attempts} recorded without a chunk for '
          f'{self.verdict.fqdn.raw}')

  def sort_key(self):
    verdict = self.verdict
    return (verdict.fqdn.raw, verdict.squatting_type.label, verdict.target)

  def to_json(self) -> str:
    verdict = self.verdict
    fqdn = verdict.fqdn
    return json.dumps(
        {
            'input': fqdn.raw,
            's': fqdn.s,
            'd': fqdn.d,
            'sx': fqdn.sx,
            'type': verdict.squatting_type.label,
            'target': verdict.target,
            'chunk': self.chunk,
            'attempts': self.attempts,
            'source': verdict.source.value,
        },
        separators=(',', ':'))

  @classmethod
  def from_json(cls, line: str) -> 'VerdictRecord':
    record = json.loads(line)
    fqdn = names.from_structured(record)
    if fqdn.raw != record['input']:
      raise ValueError(
          f'record parts do not reassemble {record["input"]!r}: {fqdn.raw!r}')
    verdict = structure.Verdict(
        fqdn=fqdn,
        squatting_type=structure.SquattingType.from_label(record['type']),
        target=record['target'],
        source=structure.VerdictSource(record.get('source', 'llm')))
    return cls(verdict=verdict, chunk=record['chunk'],
               attempts=record['attempts'])


def from_results(results: Iterable[loop.ChunkResult]) -> List[VerdictRecord]:
  """Records for the verdicts of accepted chunks; rejected chunks add none."""
  records = []
  for result in results:
    if not result.accepted:
      continue
    records += [
        VerdictRecord(verdict, result.chunk_id, result.attempts_used)
        for verdict in result.verdicts
    ]
  return records


def from_baseline(
    verdicts: Iterable[structure.Verdict]) -> List[VerdictRecord]:
  return [VerdictRecord(verdict, None, 0) for verdict in verdicts]


def emit_verdicts(records: Iterable[VerdictRecord], out: TextIO) -> int:
  """Writes records as JSONL sorted by input; returns the record count."""
  count = 0
  for record in sorted(records, key=VerdictRecord.sort_key):
    out.write(record.to_json() + '\n')
    count += 1
  return count


def write_verdicts(records: Iterable[VerdictRecord], path: str) -> int:
  lines = [
      record.to_json() + '\n'
      for record in sorted(records, key=VerdictRecord.sort_key)
  ]
  utils.atomic_write_text(path, ''.join(lines))
  return len(lines)


def read_verdicts(path: str) -> List[VerdictRecord]:
  with utils.open_text(path) as fh:
    return [VerdictRecord.from_json(line) for line in fh if line.strip()]
