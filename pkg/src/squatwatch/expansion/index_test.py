"""Tests for the reference index, its sidecar and exact nearest search."""
import os

import numpy as np
from absl.testing import absltest
from absl.testing import parameterized
from squatwatch.expansion import embedder
from squatwatch.expansion import index
from squatwatch.squatting import brands

_TESTDATA = os.path.join(os.path.dirname(os.path.dirname(__file__)),
                         'testdata')


def _brute_force(reference, query, k):
  """Full sort of every entry by (-similarity, rank, domain)."""
  similarities = reference.vectors @ query
  order = np.lexsort((np.array(reference.domains), reference.ranks,
                      -similarities))
  return [(reference.domains[i], float(similarities[i])) for i in order[:k]]


def _random_index(size, dimension, seed=0):
  rng = np.random.default_rng(seed)
  vectors = rng.normal(size=(size, dimension))
  vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
  domains = [f'site{i}.com' for i in range(size)]
  return index.ReferenceIndex('test', domains, list(range(1, size + 1)),
                              vectors)


class BuildIndexTest(parameterized.TestCase):

  def setUp(self):
    super().setUp()
    self.embedder = embedder.NgramHashEmbedder()
    self.rows = brands.read_ranked_list(os.path.join(_TESTDATA, 'brands.csv'))

  def test_one_entry_per_domain(self):
    reference = index.build_index(self.rows, self.embedder)
    self.assertLen(reference, 60)
    self.assertEqual(reference.dimension, 256)
    self.assertEqual(reference.rank_of('amazon.com'), 3)
    self.assertIn('bbc.co.uk', reference)

  def test_repeated_domains_keep_best_rank(self):
    reference = index.build_index([(5, 'www.example.com'), (2, 'example.com'),
                                   (9, 'google.com')], self.embedder)
    self.assertEqual(reference.domains, ('example.com', 'google.com'))
    self.assertEqual(reference.rank_of('example.com'), 2)

  def test_empty_list(self):
    with self.assertRaises(ValueError):
      index.build_index([], self.embedder)

  def test_sidecar_round_trip(self):
    reference = index.build_index(self.rows, self.embedder)
    path = os.path.join(self.create_tempdir().full_path, 'ref.idx')
    reference.save(path)
    loaded = index.ReferenceIndex.load(path, expected=self.embedder)
    with self.subTest('header'):
      self.assertEqual(index.read_header(path),
                       (self.embedder.identity, 256, 60))
    with self.subTest('entries'):
      self.assertEqual(loaded.domains, reference.domains)
      np.testing.assert_array_equal(loaded.ranks, reference.ranks)
      np.testing.assert_array_equal(loaded.vectors, reference.vectors)

  def test_mismatched_embedder(self):
    path = os.path.join(self.create_tempdir().full_path, 'ref.idx')
    index.build_index(self.rows, self.embedder).save(path)
    with self.assertRaises(index.IndexMismatchError):
      index.ReferenceIndex.load(path, expected=embedder.NgramHashEmbedder(64))
    with self.assertRaises(index.IndexMismatchError):
      index.ensure_index(path, self.rows, embedder.NgramHashEmbedder(seed=4))

  @parameterized.parameters(b'', b'NOTANIDX', b'SQWIDX01\x05')
  def test_corrupt_header(self, blob):
    path = self.create_tempfile('bad.idx', content=blob, mode='wb').full_path
    with self.assertRaises(index.CorruptIndexError):
      index.ReferenceIndex.load(path)

  def test_truncated_records(self):
    path = os.path.join(self.create_tempdir().full_path, 'ref.idx')
    index.build_index(self.rows, self.embedder).save(path)
    with open(path, 'rb') as fh:
      blob = fh.read()
    with open(path, 'wb') as fh:
      fh.write(blob[:-100])
    with self.assertRaises(index.CorruptIndexError):
      index.ReferenceIndex.load(path)

  def test_ensure_index_replaces_corrupt_sidecar(self):
    path = self.create_tempfile('ref.idx', content=b'garbage',
                                mode='wb').full_path
    with self.assertLogs(level='WARNING'):
      built = index.ensure_index(path, self.rows, self.embedder)
    self.assertLen(index.ReferenceIndex.load(path), len(built))

  def test_ensure_index_is_idempotent(self):
    path = os.path.join(self.create_tempdir().full_path, 'ref.idx')
    index.ensure_index(path, self.rows, self.embedder)
    with open(path, 'rb') as fh:
      first = fh.read()
    index.ensure_index(path, self.rows, self.embedder)
    with open(path, 'rb') as fh:
      self.assertEqual(fh.read(), first)


class NearestTest(parameterized.TestCase):

  @classmethod
  def setUpClass(cls):
    super().setUpClass()
    cls.large = _random_index(100_000, embedder.DEFAULT_DIMENSION)

  def test_matches_full_scan(self):
    reference = self.large
    queries = np.random.default_rng(1).normal(
        size=(1000, reference.dimension))
    queries /= np.linalg.norm(queries, axis=1, keepdims=True)
    for i, query in enumerate(queries):
      self.assertEqual(index.nearest(reference, query, 5),
                       _brute_force(reference, query, 5), i)

  def test_self_query_at_scale(self):
    reference = self.large
    for row in (0, 4_999, 99_999):
      domain, similarity = index.nearest(reference, reference.vectors[row],
                                         1)[0]
      self.assertEqual(domain, f'site{row}.com')
      self.assertAlmostEqual(similarity, 1.0, delta=1e-9)

  def test_self_query(self):
    reference = index.build_index(
        brands.read_ranked_list(os.path.join(_TESTDATA, 'brands.csv')),
        embedder.NgramHashEmbedder())
    domain, similarity = index.nearest(reference,
                                       reference.vector_of('paypal.com'),
                                       1)[0]
    self.assertEqual(domain, 'paypal.com')
    self.assertAlmostEqual(similarity, 1.0, delta=1e-9)

  def test_ties_by_rank_then_domain(self):
    vectors = np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    reference = index.ReferenceIndex('test',
                                     ['c.com', 'b.com', 'a.com', 'd.com'],
                                     [3, 1, 2, 4], vectors)
    self.assertEqual([d for d, _ in index.nearest(reference, [1.0, 0.0], 2)],
                     ['b.com', 'a.com'])

  @parameterized.parameters(1, 3, 10)
  def test_returns_k_entries(self, k):
    self.assertLen(index.nearest(_random_index(100, 8), np.ones(8), k), k)

  def test_k_larger_than_index(self):
    self.assertLen(index.nearest(_random_index(4, 8), np.ones(8), 10), 4)

  def test_bad_queries(self):
    reference = _random_index(4, 8)
    with self.assertRaises(ValueError):
      index.nearest(reference, np.ones(8), 0)
    with self.assertRaises(index.IndexMismatchError):
      index.nearest(reference, np.ones(7), 1)


if __name__ == '__main__':
  absltest.main()
