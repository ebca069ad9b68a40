"""Tests for name normalization and decomposition."""
import itertools

import idna
from absl.testing import absltest
from absl.testing import parameterized
from squatwatch.domains import names
from squatwatch.domains import structure


class NormalizeTest(parameterized.TestCase):

  @parameterized.parameters(
      ('WWW.Example.COM.', 'www.example.com'),
      ('example.com', 'example.com'),
      ('  Login.Amaz0n.com ', 'login.amaz0n.com'),
  )
  def test_ascii_names(self, raw: str, expected: str):
    self.assertEqual(names.normalize(raw), expected)

  def test_cyrillic_label_becomes_punycode(self):
    # Second letter is CYRILLIC SMALL LETTER A.
    raw = 'exаmple.com'
    normalized = names.normalize(raw)
    expected_label = idna.encode('exаmple').decode('ascii')
    with self.subTest('ace_prefix'):
      self.assertTrue(normalized.startswith('xn--'))
    with self.subTest('matches_idna'):
      self.assertEqual(normalized, expected_label + '.com')
    with self.subTest('display_form_round_trips'):
      self.assertEqual(names.display_form(normalized), raw)

  @parameterized.parameters('WWW.Example.COM.', 'exаmple.co.jp',
                            'a-b.c-d.example', 'xn--80ak6aa92e.com')
  def test_idempotent(self, raw: str):
    once = names.normalize(raw)
    self.assertEqual(names.normalize(once), once)

  @parameterized.parameters(
      ('example..com', 8),
      ('.example.com', 0),
      ('exa mple.com', 3),
      ('example.c*m', 9),
      ('_dmarc.example.com', 0),
      ('mail.my_host.com', 7),
      ('', 0),
  )
  def test_malformed_reports_position(self, raw: str, position: int):
    with self.assertRaises(names.MalformedNameError) as ctx:
      names.normalize(raw)
    self.assertEqual(ctx.exception.position, position)

  def test_overlong_label_rejected(self):
    with self.assertRaises(names.MalformedNameError):
      names.normalize('a' * 64 + '.com')


class ParseTest(parameterized.TestCase):

  @parameterized.parameters(
      ('www.example.co.jp', 'www', 'example', 'co.jp'),
      ('amazon.com.example.com', 'amazon.com', 'example', 'com'),
      ('example.com', '', 'example', 'com'),
      ('a.b.c.example.co.uk', 'a.b.c', 'example', 'co.uk'),
      ('shop.foo.kawasaki.jp', '', 'shop', 'foo.kawasaki.jp'),
      ('city.kawasaki.jp', '', 'city', 'kawasaki.jp'),
      ('www.ck', '', 'www', 'ck'),
      ('login.example.unlistedtld', 'login', 'example', 'unlistedtld'),
  )
  def test_parts(self, raw: str, s: str, d: str, sx: str):
    fqdn = names.parse_fqdn(raw)
    self.assertEqual((fqdn.s, fqdn.d, fqdn.sx), (s, d, sx))
    self.assertEqual(fqdn.raw, raw)

  @parameterized.parameters('com', 'co.jp', 'anything.ck')
  def test_bare_suffix_rejected(self, raw: str):
    with self.assertRaises(names.BareSuffixError):
      names.parse_fqdn(raw)

  def test_parse_then_reassemble_is_identity(self):
    subdomains = ('', 'www', 'a.b', 'login-portal.eu')
    labels = ('example', 'amaz0n', 'x1-y2')
    suffix_list = ('com', 'co.jp', 'com.au', 'shop', 'zz')
    for s, d, sx in itertools.product(subdomains, labels, suffix_list):
      raw = names.reassemble(s, d, sx)
      fqdn = names.parse_fqdn(raw)
      with self.subTest(raw=raw):
        self.assertEqual(
            names.reassemble(fqdn.s, fqdn.d, fqdn.sx), raw)
        self.assertEqual((fqdn.s, fqdn.d, fqdn.sx), (s, d, sx))


class StructuredTest(parameterized.TestCase):

  def test_to_structured_with_subdomain(self):
    fqdn = structure.Fqdn(s='www', d='amazon', sx='com', raw='www.amazon.com')
    self.assertEqual(names.to_structured(fqdn),
                     {'s': 'www', 'd': 'amazon', 'sx': 'com'})

  def test_to_structured_keeps_empty_subdomain(self):
    fqdn = names.parse_fqdn('example.com')
    self.assertEqual(names.to_structured(fqdn),
                     {'s': '', 'd': 'example', 'sx': 'com'})

  @parameterized.parameters('www.example.co.jp', 'example.com',
                            'amazon.com.example.com')
  def test_round_trip(self, raw: str):
    fqdn = names.parse_fqdn(raw)
    self.assertEqual(names.from_structured(names.to_structured(fqdn)), fqdn)

  @parameterized.parameters(
      {'d': 'example', 'sx': 'com'},
      {'s': '', 'd': 'exa.mple', 'sx': 'com'},
      {'s': '', 'd': 3, 'sx': 'com'},
      {'s': '', 'd': '', 'sx': 'com'},
  )
  def test_from_structured_rejects(self, **record):
    with self.assertRaises(ValueError):
      names.from_structured(record)

  @parameterized.parameters(
      ('www.example.co.jp', 'example.co.jp'),
      ('login.amaz0n.com', 'amaz0n.com'),
      ('example.com', 'example.com'),
  )
  def test_registrable(self, raw: str, expected: str):
    self.assertEqual(names.registrable(names.parse_fqdn(raw)), expected)


if __name__ == '__main__':
  absltest.main()
