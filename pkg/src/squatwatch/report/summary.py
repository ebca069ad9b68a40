"""Run statistics by squatting type and target popularity bucket."""
import dataclasses
import decimal
import json
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np
from squatwatch import utils
from squatwatch.domains import structure
from squatwatch.report import cost as cost_lib
from squatwatch.validation import loop

# (label, best rank still inside the bucket), best bucket first. Targets that
# are unranked share the last bucket.
BUCKETS = (
    ('<1k', 1_000),
    ('1k-10k', 10_000),
    ('10k-100k', 100_000),
    ('100k-1M', 1_000_000),
    ('>1M', None),
)
BUCKET_LABELS = tuple(label for label, _ in BUCKETS)
TYPES = structure.TYPE_VOCABULARY


def bucket_of(rank: Optional[int]) -> str:
  if rank is None:
    return BUCKET_LABELS[-1]
  for label, upper in BUCKETS:
    if upper is None or rank <= upper:
      return label
  raise AssertionError('last bucket is open-ended')


def _percent(count: int, total: int) -> float:
  return round(100.0 * count / total, 1) if total else 0.0


@dataclasses.dataclass(frozen=True)
class RunSummary:
  type_counts: Mapping[str, int]
  bucket_counts: Mapping[str, int]
  # type -> bucket -> count.
  distribution: Mapping[str, Mapping[str, int]]
  chunks_accepted: int = 0
  chunks_rejected: int = 0
  input_tokens: int = 0
  output_tokens: int = 0
  cost_model: Optional[str] = None
  cost_usd: Optional[decimal.Decimal] = None

  def __post_init__(self):
    by_type = sum(self.type_counts.values())
    by_bucket = sum(self.bucket_counts.values())
    if by_type != by_bucket:
      raise ValueError(
          f'type totals ({by_type}) and bucket totals ({by_bucket}) differ')
    for technique, row in self.distribution.items():
      if sum(row.values()) != self.type_counts.get(technique, 0):
        raise ValueError(f'distribution row for {technique} does not add up')
    if (self.cost_model is None) != (self.cost_usd is None):
      raise ValueError('cost_model and cost_usd are set together')

  @property
  def total(self) -> int:
    return sum(self.type_counts.values())

  def type_percentages(self) -> Dict[str, float]:
    return {t: _percent(c, self.total) for t, c in self.type_counts.items()}

  def bucket_percentages(self) -> Dict[str, float]:
    return {b: _percent(c, self.total) for b, c in self.bucket_counts.items()}

  def counts_matrix(self) -> np.ndarray:
    return np.array(
        [[self.distribution[t][b] for b in BUCKET_LABELS] for t in TYPES],
        dtype=np.int64)


def summarize(verdicts: Iterable[structure.Verdict],
    reference_ranks: Mapping[str, int],
    results: Iterable[loop.ChunkResult] = (),
    cost_model: Optional[cost_lib.CostModel] = None) -> RunSummary:
  """Counts verdicts per type and per target bucket.

  Args:
    verdicts: Verdicts of accepted chunks, or of a baseline run.
    reference_ranks: Registrable domain to list rank; targets that are missing
      fall in the '>1M' bucket.
    results: Chunk results of the run, for chunk and token totals.
    cost_model: Prices the token totals when given.

  Returns:
    The summary.
  """
  distribution = {t: {b: 0 for b in BUCKET_LABELS} for t in TYPES}
  for verdict in verdicts:
    bucket = bucket_of(reference_ranks.get(verdict.target))
    distribution[verdict.squatting_type.label][bucket] += 1
  type_counts = {t: sum(distribution[t].values()) for t in TYPES}
  bucket_counts = {
      b: sum(distribution[t][b] for t in TYPES) for b in BUCKET_LABELS
  }
  accepted = rejected = input_tokens = output_tokens = 0
  for result in results:
    if result.accepted:
      accepted += 1
    else:
      rejected += 1
    input_tokens += result.input_tokens
    output_tokens += result.output_tokens
  cost_usd = None
  if cost_model is not None:
    cost_usd = cost_lib.estimate_cost(input_tokens, output_tokens, cost_model)
  summary = RunSummary(
      type_counts=type_counts,
      bucket_counts=bucket_counts,
      distribution=distribution,
      chunks_accepted=accepted,
      chunks_rejected=rejected,
      input_tokens=input_tokens,
      output_tokens=output_tokens,
      cost_model=cost_model.name if cost_model else None,
      cost_usd=cost_usd)
  utils.log_event('report', 'summarized', verdicts=summary.total,
                  accepted=accepted, rejected=rejected)
  return summary


def align_columns(rows: Sequence[Sequence[str]]) -> List[str]:
  widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
  lines = []
  for row in rows:
    cells = [row[0].ljust(widths[0])]
    cells += [cell.rjust(width) for cell, width in zip(row[1:], widths[1:])]
    lines.append('  '.join(cells).rstrip())
  return lines


def format_table(summary: RunSummary) -> str:
  """Aligned text: one row per type, one column per bucket, then totals."""
  type_percent = summary.type_percentages()
  rows = [['type', *BUCKET_LABELS, 'total', '%']]
  for technique in TYPES:
    row = summary.distribution[technique]
    rows.append([
        technique, *(str(row[b]) for b in BUCKET_LABELS),
        str(summary.type_counts[technique]), f'{type_percent[technique]:.1f}'
    ])
  rows.append([
      'total', *(str(summary.bucket_counts[b]) for b in BUCKET_LABELS),
      str(summary.total), f'{100.0 if summary.total else 0.0:.1f}'
  ])
  bucket_percent = summary.bucket_percentages()
  rows.append(['%', *(f'{bucket_percent[b]:.1f}' for b in BUCKET_LABELS), '',
               ''])
  lines = align_columns(rows)
  lines.append(f'chunks accepted: {summary.chunks_accepted}  '
               f'rejected: {summary.chunks_rejected}')
  lines.append(f'tokens in: {summary.input_tokens}  '
               f'out: {summary.output_tokens}')
  if summary.cost_model is not None:
    lines.append(f'cost ({summary.cost_model}): ${summary.cost_usd}')
  return '\n'.join(lines) + '\n'


def to_json(summary: RunSummary) -> str:
  document = {
      'total': summary.total,
      'types': dict(summary.type_counts),
      'type_percent': summary.type_percentages(),
      'buckets': dict(summary.bucket_counts),
      'bucket_percent': summary.bucket_percentages(),
      'distribution': {t: dict(row) for t, row in summary.distribution.items()},
      'chunks': {
          'accepted': summary.chunks_accepted,
          'rejected': summary.chunks_rejected,
      },
      'tokens': {
          'input': summary.input_tokens,
          'output': summary.output_tokens,
      },
      'cost': None if summary.cost_model is None else {
          'model': summary.cost_model,
          'usd': str(summary.cost_usd),
      },
  }
  return json.dumps(document, indent=2) + '\n'


def plot_distribution(summary: RunSummary, name: str) -> str:
  """Heatmap of verdicts by type and bucket; returns the PDF path."""
  return utils.draw(summary.counts_matrix(), name, TYPES, BUCKET_LABELS)
