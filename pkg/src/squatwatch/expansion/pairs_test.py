"""Tests for pairing inputs with references and chunking the pairs."""
import collections
import os
import random

from absl.testing import absltest
from absl.testing import parameterized
from squatwatch.domains import names
from squatwatch.domains import structure
from squatwatch.expansion import embedder
from squatwatch.expansion import index
from squatwatch.expansion import pairs
from squatwatch.squatting import brands

_TESTDATA = os.path.join(os.path.dirname(os.path.dirname(__file__)),
                         'testdata')


def _pair(name, proximate, similarity=0.5):
  fqdn = structure.Fqdn(s='', d=name, sx='com', raw=f'{name}.com')
  return pairs.DomainPair(input=fqdn, proximate=proximate,
                          similarity=similarity)


class PairInputsTest(absltest.TestCase):

  @classmethod
  def setUpClass(cls):
    super().setUpClass()
    cls.embedder = embedder.NgramHashEmbedder()
    cls.reference = index.build_index(
        brands.read_ranked_list(os.path.join(_TESTDATA, 'brands.csv')),
        cls.embedder)

  def _pair_all(self, raws, **kwargs):
    inputs = [names.parse(raw) for raw in raws]
    return pairs.pair_inputs(inputs, self.reference, self.embedder, **kwargs)

  def test_lookalike_pairs_with_brand(self):
    (pair,) = self._pair_all(['amaz0n.com'])
    self.assertEqual(pair.proximate, 'amazon.com')

  def test_exact_match_is_still_paired(self):
    (pair,) = self._pair_all(['example.com'])
    self.assertEqual(pair.proximate, 'example.com')
    self.assertAlmostEqual(pair.similarity, 1.0, delta=1e-9)

  def test_tld_squat_lands_on_brand(self):
    (pair,) = self._pair_all(['paypal.shop'])
    self.assertEqual(pair.proximate, 'paypal.com')

  def test_total_and_order_independent(self):
    raws = ['login.amaz0n.com', 'paypa1.com', 'foo.net', 'exarnple.com',
            'g00gle.com', 'www.example.com']
    first = self._pair_all(raws)
    shuffled = list(raws)
    random.Random(3).shuffle(shuffled)
    self.assertLen(first, len(raws))
    self.assertEqual(self._pair_all(shuffled, workers=2), first)

  def test_neighbors(self):
    (pair,) = self._pair_all(['amaz0n.com'], k=3)
    self.assertLen(pair.neighbors, 3)
    self.assertEqual(pair.neighbors[0], pair.proximate)
    self.assertLen(set(pair.neighbors), 3)

  def test_empty(self):
    self.assertEqual(self._pair_all([]), [])


class SortAndChunkTest(parameterized.TestCase):

  def test_sizes(self):
    chunked = pairs.sort_and_chunk(
        [_pair(f'n{i}', 'amazon.com') for i in range(250)], 100)
    self.assertEqual([len(c.pairs) for c in chunked], [100, 100, 50])
    self.assertEqual([c.id for c in chunked], [0, 1, 2])

  @parameterized.product(size=(1, 99, 100, 101, 1000, 10007),
                         chunk_size=(1, 7, 100))
  def test_partition(self, size, chunk_size):
    rng = random.Random(size * 31 + chunk_size)
    proximates = [f'brand{j}.com' for j in range(13)]
    items = [_pair(f'n{i}', rng.choice(proximates)) for i in range(size)]
    rng.shuffle(items)
    chunked = pairs.sort_and_chunk(items, chunk_size)
    joined = [pair for chunk in chunked for pair in chunk.pairs]
    with self.subTest('sorted'):
      self.assertEqual(
          joined,
          sorted(items, key=lambda p: (p.proximate, p.input.raw)))
    with self.subTest('multiset'):
      self.assertEqual(collections.Counter(joined), collections.Counter(items))
    with self.subTest('sizes'):
      self.assertTrue(all(len(c.pairs) == chunk_size for c in chunked[:-1]))
      self.assertBetween(len(chunked[-1].pairs), 1, chunk_size)

  def test_same_proximate_is_contiguous(self):
    items = [_pair(f'n{i}', f'brand{i % 3}.com') for i in range(30)]
    joined = [p.proximate for c in pairs.sort_and_chunk(items, 7)
              for p in c.pairs]
    runs = [p for i, p in enumerate(joined) if i == 0 or joined[i - 1] != p]
    self.assertLen(runs, 3)

  def test_by_input_order(self):
    items = [_pair('b', 'z.com'), _pair('a', 'y.com'), _pair('c', 'a.com')]
    chunked = pairs.sort_and_chunk(items, 10, by_proximate=False)
    self.assertEqual([p.input.raw for p in chunked[0].pairs],
                     ['a.com', 'b.com', 'c.com'])

  def test_empty_and_invalid(self):
    self.assertEqual(pairs.sort_and_chunk([], 5), [])
    with self.assertRaises(ValueError):
      pairs.sort_and_chunk([], 0)

  def test_references_deduplicated(self):
    chunk = pairs.Chunk(id=0, pairs=(
        pairs.DomainPair(_pair('a', 'x.com').input, 'x.com', 0.9,
                         ('x.com', 'y.com')),
        pairs.DomainPair(_pair('b', 'y.com').input, 'y.com', 0.8,
                         ('y.com', 'x.com', 'z.com')),
    ))
    self.assertEqual(chunk.references, ('x.com', 'y.com', 'z.com'))

  def test_injected_positions_must_increase(self):
    with self.assertRaises(ValueError):
      pairs.Chunk(id=0, pairs=(), injected=((3, None), (2, None)))


if __name__ == '__main__':
  absltest.main()
