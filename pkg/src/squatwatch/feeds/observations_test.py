"""Tests for the first-seen observation store."""
import os
from unittest import mock

from absl.testing import absltest
from squatwatch import utils
from squatwatch.domains import names
from squatwatch.feeds import observations


def _fqdns(*raws):
  return {names.parse_fqdn(raw) for raw in raws}


class NewObservedTest(absltest.TestCase):

  def setUp(self):
    super().setUp()
    self.path = os.path.join(self.create_tempdir().full_path, 'seen.tsv')

  def test_set_difference(self):
    store = observations.ObservationStore.load(self.path)
    store.insert({'b.com': 10})
    fresh = observations.new_observed(_fqdns('a.com', 'b.com'), store, now=20)
    self.assertEqual(fresh, _fqdns('a.com'))

  def test_nothing_new(self):
    store = observations.ObservationStore.load(self.path)
    store.insert({'b.com': 10})
    self.assertEmpty(observations.new_observed(_fqdns('b.com'), store, now=20))

  def test_second_call_returns_nothing(self):
    store = observations.ObservationStore.load(self.path)
    current = _fqdns('a.com', 'b.com')
    self.assertLen(observations.new_observed(current, store, now=1), 2)
    self.assertEmpty(observations.new_observed(current, store, now=2))

  def test_first_seen_is_monotone_and_persisted(self):
    store = observations.ObservationStore.load(self.path)
    observations.new_observed(_fqdns('a.com'), store, now=5,
                              first_seen={'a.com': 3})
    store.insert({'a.com': 99, 'c.com': 7})
    reloaded = observations.ObservationStore.load(self.path)
    self.assertEqual(reloaded.seen, {'a.com': 3, 'c.com': 7})
    with open(self.path, encoding='utf-8') as fh:
      self.assertEqual(fh.read(), 'a.com\t3\nc.com\t7\n')

  def test_write_failure_inserts_nothing(self):
    store = observations.ObservationStore.load(self.path)
    store.insert({'b.com': 1})
    with mock.patch.object(utils, 'atomic_write_text',
                           side_effect=OSError('disk full')):
      with self.assertRaises(OSError):
        observations.new_observed(_fqdns('a.com'), store, now=2)
    self.assertEqual(store.seen, {'b.com': 1})
    self.assertEqual(observations.ObservationStore.load(self.path).seen,
                     {'b.com': 1})

  def test_corrupt_store_rejected(self):
    with open(self.path, 'w', encoding='utf-8') as fh:
      fh.write('a.com no-tab\n')
    with self.assertRaises(ValueError):
      observations.ObservationStore.load(self.path)


if __name__ == '__main__':
  absltest.main()
