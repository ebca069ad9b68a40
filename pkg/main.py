"""Domain-squatting detection pipeline.

Usage: python main.py <command> [--flagfile=pipeline.cfg] [--flag=value ...]

Commands: ingest, index, detect, baseline, eval, report, dataset.
"""
import sys

from absl import app
from absl import flags
from squatwatch.llm import oracle
from squatwatch.pipeline import commands
from squatwatch.pipeline import config as config_lib

FLAGS = flags.FLAGS
flags.DEFINE_list('ct_paths', [], 'Certificate-transparency JSONL feeds.')
flags.DEFINE_list('pdns_paths', [], 'Passive-DNS TSV feeds.')
flags.DEFINE_list('zone_paths', [], 'Zone files; origin from the file name.')
flags.DEFINE_string('seen_path', '', 'First-seen store. Empty keeps none.')
flags.DEFINE_string('reference_path', '', 'Ranked rank,domain list.')
flags.DEFINE_integer('brand_limit', 1000, 'Brands taken from the list top.')
flags.DEFINE_string('index_path', 'reference.sqwidx', 'Index sidecar path.')
flags.DEFINE_string('embedder', 'ngram-hash',
                    'ngram-hash, ngram-hash:d<dim> or remote:<model>:d<dim>.')
flags.DEFINE_string('embedding_endpoint', '', 'Remote embedding endpoint.')
flags.DEFINE_string('embedding_api_key_env', 'SQUATWATCH_EMBEDDING_API_KEY',
                    'Environment variable holding the embedding API key.')
flags.DEFINE_integer('neighbors', 3, 'References listed per input.')
flags.DEFINE_integer('chunk_size', 100, 'Pairs per chunk.')
flags.DEFINE_integer('max_attempts', 3, 'Attempts per chunk.')
flags.DEFINE_enum('backend', 'oracle', config_lib.BACKENDS, 'Model backend.')
flags.DEFINE_string('endpoint', '', 'Chat-completion endpoint.')
flags.DEFINE_string('model', '', 'Chat model name.')
flags.DEFINE_string('api_key_env', 'SQUATWATCH_API_KEY',
                    'Environment variable holding the chat API key.')
flags.DEFINE_integer('max_in_flight', 4, 'Concurrent backend requests.')
flags.DEFINE_float('timeout', 60.0, 'Backend request timeout in seconds.')
flags.DEFINE_float('drop_rate', 0.0, 'Oracle: chance to omit findings.')
flags.DEFINE_float('hallucinate_rate', 0.0,
                   'Oracle: chance to report a domain not in the input.')
flags.DEFINE_float('corrupt_format_rate', 0.0,
                   'Oracle: chance to wrap the reply in prose.')
flags.DEFINE_float('fabricate_target_rate', 0.0,
                   'Oracle: chance to name a non-existent target.')
flags.DEFINE_integer('fault_attempts', 0,
                     'Oracle faults only on the first N attempts; 0 = all.')
flags.DEFINE_string('allowlist_path', '',
                    'Extra existing domains for the target check.')
flags.DEFINE_bool('dns_check', False, 'Confirm unknown targets through DNS.')
flags.DEFINE_string('cost_model', 'gpt-3.5',
                    'gpt-3.5, gpt-4o, llama-3-70b or a custom name.')
flags.DEFINE_float('input_rate', None, 'USD per 1M input tokens.')
flags.DEFINE_float('output_rate', None, 'USD per 1M output tokens.')
flags.DEFINE_string('input_path', '', 'FQDN list, or verdict file for report.')
flags.DEFINE_string('output_path', '', 'Output file of the command.')
flags.DEFINE_string('summary_path', '', 'Summary JSON output.')
flags.DEFINE_string('plot_path', '', 'Heatmap output, without .pdf.')
flags.DEFINE_string('dataset_path', '', 'Labelled dataset JSONL.')
flags.DEFINE_list('quotas', [], 'type=count items for the dataset command.')
flags.DEFINE_integer('benign', 0, 'Benign names for the dataset command.')
flags.DEFINE_bool('dnx', True, 'Sort pairs by proximate and list references.')
flags.DEFINE_bool('trv', True, 'Must-pass injection and the validators.')
flags.DEFINE_integer('seed', 0, 'Seed for datasets and oracle faults.')
flags.DEFINE_integer('workers', 0, 'Worker threads; 0 picks the default.')


def config_from_flags() -> config_lib.PipelineConfig:
  faults = oracle.FaultProfile(
      drop_rate=FLAGS.drop_rate,
      hallucinate_rate=FLAGS.hallucinate_rate,
      corrupt_format_rate=FLAGS.corrupt_format_rate,
      fabricate_target_rate=FLAGS.fabricate_target_rate,
      seed=FLAGS.seed,
      fault_attempts=FLAGS.fault_attempts)
  return config_lib.PipelineConfig(
      ct_paths=tuple(FLAGS.ct_paths),
      pdns_paths=tuple(FLAGS.pdns_paths),
      zone_paths=tuple(FLAGS.zone_paths),
      seen_path=FLAGS.seen_path,
      reference_path=FLAGS.reference_path,
      brand_limit=FLAGS.brand_limit,
      index_path=FLAGS.index_path,
      embedder=FLAGS.embedder,
      embedding_endpoint=FLAGS.embedding_endpoint,
      embedding_api_key_env=FLAGS.embedding_api_key_env,
      neighbors=FLAGS.neighbors,
      chunk_size=FLAGS.chunk_size,
      max_attempts=FLAGS.max_attempts,
      backend=FLAGS.backend,
      endpoint=FLAGS.endpoint,
      model=FLAGS.model,
      api_key_env=FLAGS.api_key_env,
      max_in_flight=FLAGS.max_in_flight,
      timeout=FLAGS.timeout,
      faults=faults,
      allowlist_path=FLAGS.allowlist_path,
      dns_check=FLAGS.dns_check,
      cost_model=FLAGS.cost_model,
      input_rate=FLAGS.input_rate,
      output_rate=FLAGS.output_rate,
      input_path=FLAGS.input_path,
      output_path=FLAGS.output_path,
      summary_path=FLAGS.summary_path,
      plot_path=FLAGS.plot_path,
      dataset_path=FLAGS.dataset_path,
      quotas=config_lib.parse_quotas(FLAGS.quotas),
      benign=FLAGS.benign,
      dnx=FLAGS.dnx,
      trv=FLAGS.trv,
      seed=FLAGS.seed,
      workers=FLAGS.workers)


def main(argv):
  if len(argv) != 2 or argv[1] not in commands.COMMANDS:
    raise app.UsageError(
        f'expected one command out of: {", ".join(commands.COMMANDS)}')
  try:
    config = config_from_flags()
  except ValueError as e:
    print(f'config: {e}', file=sys.stderr)
    return commands.ExitCode.INPUT_ERROR
  return commands.run(argv[1], config)


if __name__ == '__main__':
  app.run(main)
