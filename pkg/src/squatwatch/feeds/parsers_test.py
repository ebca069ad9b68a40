"""Tests for CT, pDNS and zone feed parsers."""
import os

from absl.testing import absltest
from absl.testing import parameterized
from squatwatch import utils
from squatwatch.feeds import parsers
from squatwatch.feeds import records

_TESTDATA = os.path.join(os.path.dirname(os.path.dirname(__file__)),
                         'testdata')
_NS, _A, _AAAA = records.RrType.NS, records.RrType.A, records.RrType.AAAA


def _by_name(feed_records):
  return {record.fqdn: record for record in feed_records}


class CtStreamTest(absltest.TestCase):

  def test_fan_out(self):
    out = parsers.parse_ct_stream([
        '{"all_domains":["example.com","www.example.com"],'
        '"timestamp":1704067200}'
    ])
    self.assertEqual([r.fqdn for r in out], ['example.com', 'www.example.com'])
    self.assertTrue(all(r.observed_at == 1704067200 for r in out))
    self.assertTrue(all(not r.rr_types for r in out))

  def test_wildcard_strip(self):
    out = parsers.parse_ct_stream(
        ['{"all_domains":["*.Example.com"],"timestamp":1}'])
    self.assertEqual([r.fqdn for r in out], ['example.com'])

  def test_invalid_line_is_counted(self):
    stats = records.ParseStats()
    out = parsers.parse_ct_stream(['{{{ not json'], stats)
    self.assertEmpty(out)
    self.assertEqual(stats.malformed, 1)

  def test_certstream_envelope(self):
    out = parsers.parse_ct_stream([
        '{"message_type":"certificate_update","data":{"leaf_cert":'
        '{"all_domains":["bar.net"]},"seen":1704067400.5}}'
    ])
    self.assertEqual([(r.fqdn, r.observed_at) for r in out],
                     [('bar.net', 1704067400)])

  def test_bad_names_rejected_not_fatal(self):
    stats = records.ParseStats()
    out = parsers.parse_ct_stream(
        ['{"all_domains":["ok.com","bad..com"],"timestamp":5}'], stats)
    self.assertEqual([r.fqdn for r in out], ['ok.com'])
    self.assertEqual(stats.rejected_names, 1)

  def test_fixture_accounting(self):
    stats = records.ParseStats()
    with utils.open_text(os.path.join(_TESTDATA, 'ct.jsonl')) as fh:
      out = parsers.parse_ct_stream(fh, stats)
    with self.subTest('line_conservation'):
      self.assertEqual(stats.parsed + stats.skipped, stats.lines)
    with self.subTest('counts'):
      self.assertEqual((stats.lines, stats.parsed, stats.ignored,
                        stats.malformed), (4, 2, 1, 1))
    with self.subTest('records'):
      self.assertLen(out, 4)
      self.assertEqual(stats.records, 4)


class PdnsStreamTest(parameterized.TestCase):

  @parameterized.parameters(
      ('login.example.com\tA\t192.0.2.5\t1704067200', {_A}),
      ('example.com\tNS\tns1.x.example\t1704067200', {_NS}),
      ('v6.example.com\tAAAA\t2001:db8::1\t1704067200', {_AAAA}),
  )
  def test_record_kinds(self, line, kinds):
    (record,) = parsers.parse_pdns_stream([line])
    self.assertEqual(record.rr_types, frozenset(kinds))
    self.assertEqual(record.source, records.FeedSource.PDNS)

  def test_txt_is_skipped(self):
    stats = records.ParseStats()
    out = parsers.parse_pdns_stream(
        ['example.com\tTXT\tv=spf1\t1704067200'], stats)
    self.assertEmpty(out)
    self.assertEqual(stats.ignored, 1)

  @parameterized.parameters(
      'example.com\tA\t192.0.2.5',
      'example.com\tA\tnot-an-address\t1704067200',
      'example.com\tA\t192.0.2.5\tyesterday',
      'exa mple.com\tA\t192.0.2.5\t1704067200',
  )
  def test_malformed(self, line):
    stats = records.ParseStats()
    self.assertEmpty(parsers.parse_pdns_stream([line], stats))
    self.assertEqual(stats.malformed, 1)


class ZoneStreamTest(parameterized.TestCase):

  def test_qualification(self):
    out = parsers.parse_zone_stream(
        ['example 3600 IN NS ns1.host.example.'], origin='com.')
    self.assertEqual([(r.fqdn, r.rr_types) for r in out],
                     [('example.com', frozenset({_NS}))])

  def test_accumulation(self):
    out = parsers.parse_zone_stream([
        'example 3600 IN NS ns1.host.example.',
        'example IN A 192.0.2.1',
    ], origin='com.')
    self.assertEqual(_by_name(out)['example.com'].rr_types,
                     frozenset({_NS, _A}))

  def test_origin_switch(self):
    out = parsers.parse_zone_stream(
        ['$ORIGIN net.', 'foo IN AAAA 2001:db8::1'], origin='com.')
    self.assertEqual([(r.fqdn, r.rr_types) for r in out],
                     [('foo.net', frozenset({_AAAA}))])

  def test_apex_and_inherited_owner(self):
    out = parsers.parse_zone_stream([
        '@ IN NS ns1.example.',
        'host IN A 192.0.2.1',
        '     IN AAAA 2001:db8::1',
    ], origin='example.com.')
    by_name = _by_name(out)
    self.assertEqual(by_name['example.com'].rr_types, frozenset({_NS}))
    self.assertEqual(by_name['host.example.com'].rr_types,
                     frozenset({_A, _AAAA}))

  def test_unsupported_types_and_classes_skipped(self):
    stats = records.ParseStats()
    out = parsers.parse_zone_stream([
        'example IN MX 10 mail.example.com.',
        'ch CH A 192.0.2.1',
    ], origin='com.', stats=stats)
    self.assertEmpty(out)
    self.assertEqual(stats.ignored, 2)

  def test_owner_named_like_a_class(self):
    out = parsers.parse_zone_stream(['ch IN A 192.0.2.1'], origin='com.')
    self.assertEqual([r.fqdn for r in out], ['ch.com'])

  def test_broken_lines_counted(self):
    stats = records.ParseStats()
    out = parsers.parse_zone_stream([
        'relative IN A 192.0.2.1',
        'example IN A',
        'example IN A 300.1.1.1',
    ], stats=stats)
    self.assertEmpty(out)
    self.assertEqual(stats.malformed, 3)

  def test_fixture(self):
    stats = records.ParseStats()
    path = os.path.join(_TESTDATA, 'com.zone')
    with utils.open_text(path) as fh:
      out = parsers.parse_zone_stream(
          fh, origin=parsers.zone_origin_from_path(path), stats=stats)
    by_name = _by_name(out)
    with self.subTest('names'):
      self.assertEqual(
          set(by_name), {
              'example.com', 'www.example.com', 'amaz0n.com',
              'login.amaz0n.com', 'paypa1.com', 'foo.net', 'bar.net'
          })
    with self.subTest('inherited_owner'):
      self.assertEqual(by_name['paypa1.com'].rr_types,
                       frozenset({_NS, _AAAA}))
    with self.subTest('line_conservation'):
      self.assertEqual((stats.lines, stats.parsed, stats.ignored,
                        stats.malformed), (13, 9, 4, 0))

  @parameterized.parameters(
      ('com.zone', 'com.'),
      ('/feeds/com.txt.gz', 'com.'),
      ('net', 'net.'),
      ('co.uk.zone', 'co.uk.'),
  )
  def test_origin_from_path(self, path, origin):
    self.assertEqual(parsers.zone_origin_from_path(path), origin)


class GzipTest(absltest.TestCase):

  def test_gzip_feed_is_read_transparently(self):
    path = os.path.join(self.create_tempdir().full_path, 'com.zone.gz')
    with utils.open_text(path, 'w') as fh:
      fh.write('example IN NS ns1.example.\n')
    with utils.open_text(path) as fh:
      out = parsers.parse_zone_stream(
          fh, origin=parsers.zone_origin_from_path(path))
    self.assertEqual([r.fqdn for r in out], ['example.com'])


if __name__ == '__main__':
  absltest.main()
