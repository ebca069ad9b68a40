"""Command bodies behind main.py: ingest, index, detect, baseline, eval, report
and dataset.

Each command takes a PipelineConfig and a text stream for its printed output
and returns an exit code. `run` maps errors onto the exit-code contract.
"""
import collections
import dataclasses
import enum
import sys
import time
from typing import Callable, Dict, List, Mapping, Optional, Sequence, TextIO

from absl import logging
from squatwatch import utils
from squatwatch.domains import names
from squatwatch.domains import structure
from squatwatch.expansion import embedder as embedder_lib
from squatwatch.expansion import index as index_lib
from squatwatch.expansion import pairs as pairs_lib
from squatwatch.feeds import activity
from squatwatch.feeds import observations
from squatwatch.feeds import parsers
from squatwatch.feeds import records
from squatwatch.llm import backend as backend_lib
from squatwatch.llm import oracle
from squatwatch.pipeline import config as config_lib
from squatwatch.report import summary as summary_lib
from squatwatch.report import verdicts as verdicts_lib
from squatwatch.squatting import brands as brands_lib
from squatwatch.squatting import detectors
from squatwatch.squatting import ground_truth
from squatwatch.validation import loop
from squatwatch.validation import mustpass
from squatwatch.validation import validators

PipelineConfig = config_lib.PipelineConfig


class ExitCode(enum.IntEnum):
  OK = 0
  INPUT_ERROR = 2
  INDEX_ERROR = 3
  PARTIAL = 4


class MissingIndexError(config_lib.ConfigError):
  """No sidecar at the configured index path."""


def _read_inputs(path: str) -> List[structure.Fqdn]:
  """One name per line; blank lines and '#' comments are skipped."""
  inputs, skipped = [], 0
  with utils.open_text(path) as fh:
    for line in fh:
      line = line.strip()
      if not line or line.startswith('#'):
        continue
      try:
        inputs.append(names.parse(line))
      except ValueError:
        skipped += 1
  if skipped:
    logging.warning('%s: skipped %d malformed names', path, skipped)
  return inputs


def _reference_ranks(path: str) -> Dict[str, int]:
  ranks = {}
  for rank, raw in sorted(brands_lib.read_ranked_list(path)):
    try:
      ranks.setdefault(names.parse(raw).registrable, rank)
    except ValueError:
      continue
  return ranks


def _embedder(config: PipelineConfig) -> embedder_lib.Embedder:
  return embedder_lib.create_embedder(config.embedder,
                                      config.embedding_endpoint,
                                      config.embedding_api_key_env)


def _load_index(config: PipelineConfig,
    embedder: embedder_lib.Embedder) -> index_lib.ReferenceIndex:
  try:
    return index_lib.ReferenceIndex.load(config.index_path, expected=embedder)
  except FileNotFoundError as e:
    raise MissingIndexError(
        f'no index at {config.index_path}; run the index command first') from e


def _brand_set(config: PipelineConfig) -> brands_lib.BrandSet:
  return brands_lib.BrandSet.load(config.reference_path,
                                  limit=config.brand_limit)


def _backend(config: PipelineConfig,
    brand_set: brands_lib.BrandSet) -> backend_lib.Backend:
  if config.backend == 'oracle':
    return oracle.OracleBackend(brand_set, config.faults, config.max_in_flight,
                                detector=detectors.detector_for(brand_set))
  return backend_lib.ChatCompletionBackend(config.endpoint, config.model,
                                           config.api_key_env,
                                           config.max_in_flight,
                                           config.timeout)


def _checker(config: PipelineConfig) -> validators.ExistenceChecker:
  if config.dns_check:
    return validators.DnsExistenceChecker()
  return validators.OfflineChecker.from_file(config.allowlist_path)


def run_trv(config: PipelineConfig, inputs: Sequence[structure.Fqdn],
    brand_set: brands_lib.BrandSet, index: index_lib.ReferenceIndex,
    embedder: embedder_lib.Embedder) -> List[loop.ChunkResult]:
  """DNX pairing and chunking, then the attempt loop over every chunk."""
  workers = config.workers or None
  k = config.neighbors if config.dnx else 1
  pairs = pairs_lib.pair_inputs(inputs, index, embedder, k=k, workers=workers)
  chunks = pairs_lib.sort_and_chunk(pairs, config.chunk_size,
                                    by_proximate=config.dnx)
  settings = loop.TrvSettings(max_attempts=config.max_attempts,
                              validate=config.trv, references=config.dnx)
  return loop.process_chunks(chunks, _backend(config, brand_set), settings,
                             brand_set.top(mustpass.POOL_SIZE), index,
                             _checker(config), workers=workers)


def _report(config: PipelineConfig, summary: summary_lib.RunSummary,
    out: TextIO) -> None:
  out.write(summary_lib.format_table(summary))
  if config.summary_path:
    utils.atomic_write_text(config.summary_path, summary_lib.to_json(summary))
  if config.plot_path:
    summary_lib.plot_distribution(summary, config.plot_path)


@dataclasses.dataclass(frozen=True)
class EvalReport:
  # type -> (labeled, detected with the labeled target).
  per_type: Mapping[str, Sequence[int]]
  benign: int
  false_positives: int
  wall_seconds: float
  chunks_rejected: int = 0

  @property
  def labeled(self) -> int:
    return sum(labeled for labeled, _ in self.per_type.values())

  @property
  def detected(self) -> int:
    return sum(detected for _, detected in self.per_type.values())

  def accuracy(self, technique: Optional[str] = None) -> float:
    if technique is None:
      labeled, detected = self.labeled, self.detected
    else:
      labeled, detected = self.per_type[technique]
    return round(100.0 * detected / labeled, 1) if labeled else 0.0


def score(labels: Sequence[ground_truth.LabeledName],
    found: Sequence[structure.Verdict], wall_seconds: float,
    chunks_rejected: int = 0) -> EvalReport:
  """A squat counts when some verdict for its name names the labeled target."""
  targets = collections.defaultdict(set)
  for verdict in found:
    targets[verdict.fqdn.raw].add(verdict.target)
  counts = {t: [0, 0] for t in structure.TYPE_VOCABULARY}
  benign = false_positives = 0
  for label in labels:
    if not label.is_squat:
      benign += 1
      false_positives += label.fqdn in targets
      continue
    row = counts[label.technique.value]
    row[0] += 1
    row[1] += label.target in targets.get(label.fqdn, ())
  per_type = {t: tuple(row) for t, row in counts.items() if row[0]}
  return EvalReport(per_type, benign, false_positives, wall_seconds,
                    chunks_rejected)


def format_eval(report: EvalReport) -> str:
  rows = [['type', 'labeled', 'detected', 'accuracy']]
  for technique, (labeled, detected) in report.per_type.items():
    rows.append([technique, str(labeled), str(detected),
                 f'{report.accuracy(technique):.1f}'])
  rows.append(['total', str(report.labeled), str(report.detected),
               f'{report.accuracy():.1f}'])
  lines = summary_lib.align_columns(rows)
  lines.append(f'false positives: {report.false_positives} of '
               f'{report.benign} benign')
  if report.chunks_rejected:
    lines.append(f'rejected chunks: {report.chunks_rejected}')
  lines.append(f'wall time: {report.wall_seconds:.1f}s')
  return '\n'.join(lines) + '\n'


def cmd_ingest(config: PipelineConfig, out: TextIO) -> int:
  """Feeds -> active filter -> first-seen store -> FQDN list."""
  if not config.feed_paths:
    raise config_lib.ConfigError(
        'ingest needs --ct_paths, --pdns_paths or --zone_paths')
  config.require_set('output_path')
  config.require_readable(*(field
                            for field in ('ct_paths', 'pdns_paths', 'zone_paths')
                            if getattr(config, field)))
  stats = records.ParseStats()
  feed_records = []
  for path in config.ct_paths:
    with utils.open_text(path) as fh:
      feed_records += parsers.parse_ct_stream(fh, stats)
  for path in config.pdns_paths:
    with utils.open_text(path) as fh:
      feed_records += parsers.parse_pdns_stream(fh, stats)
  for path in config.zone_paths:
    with utils.open_text(path) as fh:
      feed_records += parsers.parse_zone_stream(
          fh, origin=parsers.zone_origin_from_path(path), stats=stats)
  active = activity.filter_active(feed_records)
  first_seen: Dict[str, int] = {}
  for record in feed_records:
    if record.observed_at:
      first_seen[record.fqdn] = min(first_seen.get(record.fqdn,
                                                   record.observed_at),
                                    record.observed_at)
  if config.seen_path:
    store = observations.ObservationStore.load(config.seen_path)
    fresh = observations.new_observed(active, store, first_seen=first_seen)
  else:
    fresh = active
  lines = sorted(fqdn.raw for fqdn in fresh)
  utils.atomic_write_text(config.output_path,
                          ''.join(line + '\n' for line in lines))
  observed = len({record.fqdn for record in feed_records})
  utils.log_event('ingest', 'done', records=len(feed_records),
                  active=len(active), new=len(lines))
  print(f'parsed={stats.parsed} skipped={stats.skipped} '
        f'filtered={observed - len(active)} new={len(lines)}', file=out)
  return ExitCode.OK


def cmd_index(config: PipelineConfig, out: TextIO) -> int:
  config.require_readable('reference_path')
  embedder = _embedder(config)
  rows = brands_lib.read_ranked_list(config.reference_path)
  index = index_lib.ensure_index(config.index_path, rows, embedder)
  print(f'entries={len(index)} embedder={index.embedder_id}', file=out)
  return ExitCode.OK


def cmd_detect(config: PipelineConfig, out: TextIO) -> int:
  """Exit 4 when any chunk ran out of attempts; its names get no verdicts."""
  config.require_readable('reference_path', 'input_path')
  config.require_set('output_path')
  embedder = _embedder(config)
  index = _load_index(config, embedder)
  brand_set = _brand_set(config)
  inputs = _read_inputs(config.input_path)
  results = run_trv(config, inputs, brand_set, index, embedder)
  found = verdicts_lib.from_results(results)
  verdicts_lib.write_verdicts(found, config.output_path)
  ranks = dict(zip(index.domains, index.ranks.tolist()))
  summary = summary_lib.summarize([r.verdict for r in found], ranks, results,
                                  config.pricing())
  _report(config, summary, out)
  return ExitCode.PARTIAL if summary.chunks_rejected else ExitCode.OK


def cmd_baseline(config: PipelineConfig, out: TextIO) -> int:
  """Rule-based detection; with --dataset_path also prints per-type recall."""
  config.require_readable('reference_path')
  config.require_set('output_path')
  labels = None
  if config.dataset_path:
    config.require_readable('dataset_path')
    labels = ground_truth.read_dataset(config.dataset_path)
    inputs = [names.parse(label.fqdn) for label in labels]
  else:
    config.require_readable('input_path')
    inputs = _read_inputs(config.input_path)
  start = time.perf_counter()
  detector = detectors.detector_for(_brand_set(config))
  found = []
  for fqdn in sorted(set(inputs), key=lambda fqdn: fqdn.raw):
    verdict = detector.detect(fqdn, structure.VerdictSource.BASELINE)
    if verdict is not None:
      found.append(verdict)
  elapsed = time.perf_counter() - start
  verdicts_lib.write_verdicts(verdicts_lib.from_baseline(found),
                              config.output_path)
  utils.log_event('baseline', 'done', inputs=len(inputs), verdicts=len(found))
  _report(config, summary_lib.summarize(
      found, _reference_ranks(config.reference_path)), out)
  if labels is not None:
    out.write(format_eval(score(labels, found, elapsed)))
  return ExitCode.OK


def cmd_eval(config: PipelineConfig, out: TextIO) -> int:
  config.require_readable('reference_path', 'dataset_path')
  labels = ground_truth.read_dataset(config.dataset_path)
  if not labels:
    raise config_lib.ConfigError(f'no labels in {config.dataset_path}')
  start = time.perf_counter()
  embedder = _embedder(config)
  index = _load_index(config, embedder)
  inputs = [names.parse(label.fqdn) for label in labels]
  results = run_trv(config, inputs, _brand_set(config), index, embedder)
  found = verdicts_lib.from_results(results)
  if config.output_path:
    verdicts_lib.write_verdicts(found, config.output_path)
  rejected = sum(not result.accepted for result in results)
  report = score(labels, [r.verdict for r in found],
                 time.perf_counter() - start, rejected)
  utils.log_event('eval', 'done', labeled=report.labeled,
                  detected=report.detected,
                  false_positives=report.false_positives)
  out.write(format_eval(report))
  return ExitCode.PARTIAL if rejected else ExitCode.OK


def cmd_report(config: PipelineConfig, out: TextIO) -> int:
  """Re-summarizes the verdict file named by --input_path."""
  config.require_readable('input_path', 'reference_path')
  found = verdicts_lib.read_verdicts(config.input_path)
  summary = summary_lib.summarize([r.verdict for r in found],
                                  _reference_ranks(config.reference_path))
  _report(config, summary, out)
  return ExitCode.OK


def cmd_dataset(config: PipelineConfig, out: TextIO) -> int:
  config.require_readable('reference_path')
  config.require_set('output_path')
  brand_set = _brand_set(config)
  quotas = config.quotas or ground_truth.REFERENCE_QUOTAS
  dataset = ground_truth.build_ground_truth(
      brand_set, quotas, config.seed, benign=config.benign,
      detector=detectors.detector_for(brand_set))
  count = ground_truth.write_dataset(dataset, config.output_path)
  squats = sum(entry.is_squat for entry in dataset)
  print(f'names={count} squats={squats} benign={count - squats}', file=out)
  return ExitCode.OK


COMMANDS: Dict[str, Callable[[PipelineConfig, TextIO], int]] = {
    'ingest': cmd_ingest,
    'index': cmd_index,
    'detect': cmd_detect,
    'baseline': cmd_baseline,
    'eval': cmd_eval,
    'report': cmd_report,
    'dataset': cmd_dataset,
}


def run(command: str, config: PipelineConfig,
    out: Optional[TextIO] = None) -> int:
  """Runs one command and returns its exit code."""
  out = out or sys.stdout
  try:
    return int(COMMANDS[command](config, out))
  except (index_lib.IndexMismatchError, index_lib.CorruptIndexError,
          MissingIndexError) as e:
    logging.error('%s: %s', command, e)
    return ExitCode.INDEX_ERROR
  except (ValueError, OSError, embedder_lib.EmbeddingError) as e:
    logging.error('%s: %s', command, e)
    return ExitCode.INPUT_ERROR
