"""Runs the four dnx/trv configurations on a seeded dataset and prints a
per-type accuracy and timing table."""
import itertools
import time
from typing import List, Sequence, Tuple

from absl import app
from absl import flags
from squatwatch.domains import names
from squatwatch.expansion import embedder as embedder_lib
from squatwatch.expansion import index as index_lib
from squatwatch.llm import oracle
from squatwatch.pipeline import commands
from squatwatch.pipeline import config as config_lib
from squatwatch.report import summary as summary_lib
from squatwatch.report import verdicts as verdicts_lib
from squatwatch.squatting import brands
from squatwatch.squatting import detectors
from squatwatch.squatting import ground_truth

FLAGS = flags.FLAGS
_REFERENCE_PATH = flags.DEFINE_string('reference_path', None,
                                      'Ranked rank,domain list.')
_BRAND_LIMIT = flags.DEFINE_integer('brand_limit', 50, 'Brands in the study.')
_BENIGN = flags.DEFINE_integer('benign', 1000, 'Benign names in the dataset.')
_SEED = flags.DEFINE_integer('seed', 0, 'Dataset and fault seed.')
_CHUNK_SIZE = flags.DEFINE_integer('chunk_size', 100, 'Pairs per chunk.')
_HALLUCINATE_RATE = flags.DEFINE_float('hallucinate_rate', 0.5,
                                       'Oracle hallucination rate.')
_FABRICATE_TARGET_RATE = flags.DEFINE_float('fabricate_target_rate', 0.5,
                                            'Oracle fabricated target rate.')
_FAULT_ATTEMPTS = flags.DEFINE_integer('fault_attempts', 1,
                                       'Faults on the first N attempts only.')

CONFIGURATIONS = tuple(itertools.product((False, True), (False, True)))


def label(dnx: bool, trv: bool) -> str:
  parts = [name for name, on in (('dnx', dnx), ('trv', trv)) if on]
  return '+'.join(parts) or 'plain'


def run(dataset: Sequence[ground_truth.LabeledName],
    brand_set: brands.BrandSet, index: index_lib.ReferenceIndex,
    embedder: embedder_lib.Embedder, faults: oracle.FaultProfile,
    chunk_size: int = 100,
    configurations: Sequence[Tuple[bool, bool]] = CONFIGURATIONS
) -> List[Tuple[str, commands.EvalReport]]:
  """Scores each (dnx, trv) configuration against the dataset labels."""
  inputs = [names.parse(entry.fqdn) for entry in dataset]
  reports = []
  for dnx, trv in configurations:
    config = config_lib.PipelineConfig(chunk_size=chunk_size, faults=faults,
                                       dnx=dnx, trv=trv)
    start = time.perf_counter()
    results = commands.run_trv(config, inputs, brand_set, index, embedder)
    found = [r.verdict for r in verdicts_lib.from_results(results)]
    rejected = sum(not result.accepted for result in results)
    reports.append((label(dnx, trv),
                    commands.score(dataset, found, time.perf_counter() - start,
                                   rejected)))
  return reports


def format_reports(reports: Sequence[Tuple[str, commands.EvalReport]]) -> str:
  techniques = []
  for _, report in reports:
    techniques += [t for t in report.per_type if t not in techniques]
  rows = [['config', *techniques, 'total', 'fp', 'rejected', 'seconds']]
  for name, report in reports:
    rows.append([
        name, *(f'{report.accuracy(t):.1f}' for t in techniques),
        f'{report.accuracy():.1f}', str(report.false_positives),
        str(report.chunks_rejected), f'{report.wall_seconds:.1f}'
    ])
  return '\n'.join(summary_lib.align_columns(rows)) + '\n'


def main(argv):
  del argv
  rows = brands.read_ranked_list(_REFERENCE_PATH.value)
  brand_set = brands.BrandSet.from_ranked(rows, limit=_BRAND_LIMIT.value)
  dataset = ground_truth.build_ground_truth(
      brand_set, ground_truth.REFERENCE_QUOTAS, _SEED.value,
      benign=_BENIGN.value, detector=detectors.detector_for(brand_set))
  embedder = embedder_lib.NgramHashEmbedder()
  index = index_lib.build_index(rows, embedder)
  faults = oracle.FaultProfile(
      hallucinate_rate=_HALLUCINATE_RATE.value,
      fabricate_target_rate=_FABRICATE_TARGET_RATE.value, seed=_SEED.value,
      fault_attempts=_FAULT_ATTEMPTS.value)
  print(f'{len(dataset)} names over {len(brand_set)} brands')
  print(format_reports(
      run(dataset, brand_set, index, embedder, faults, _CHUNK_SIZE.value)))


if __name__ == '__main__':
  flags.mark_flag_as_required('reference_path')
  app.run(main)
