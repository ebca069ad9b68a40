"""Tests for squatting variant generators."""
import random
import re

import idna
from absl.testing import absltest
from absl.testing import parameterized
from squatwatch.domains import structure
from squatwatch.squatting import generators
from squatwatch.squatting import tables

_Subtype = structure.TypoSubtype
_VALID = re.compile(r'^[a-z0-9]([a-z0-9-]*[a-z0-9])?$')


def _brute_force_bits(label: str):
  out = set()
  data = label.encode('ascii')
  for i in range(len(data)):
    for bit in range(8):
      flipped = bytearray(data)
      flipped[i] ^= 1 << bit
      try:
        text = flipped.decode('ascii')
      except UnicodeDecodeError:
        continue
      if text != label and _VALID.match(text):
        out.add(text)
  return out


class TypoTest(parameterized.TestCase):

  @parameterized.parameters(
      (_Subtype.OMISSION, 'exampl'),
      (_Subtype.PERMUTATION, 'eaxmple'),
      (_Subtype.REPLACEMENT, 'exampke'),
      (_Subtype.INSERTION, 'examplle'),
      (_Subtype.MISSING_DOT, 'wwwexample'),
  )
  def test_contains(self, subtype, variant):
    self.assertIn(variant, generators.gen_typo('example', subtype))

  def test_omission_count(self):
    # Every deletion of 'example' gives a different string.
    variants = generators.gen_typo('example', _Subtype.OMISSION)
    self.assertLen(variants, 7)
    self.assertEqual(
        variants,
        {'xample', 'eample', 'exmple', 'exaple', 'examle', 'exampe', 'exampl'})

  def test_single_char_omission_is_empty(self):
    self.assertEmpty(generators.gen_typo('a', _Subtype.OMISSION))

  def test_outputs_are_valid_and_differ(self):
    for subtype in _Subtype:
      for label in ('example', 'a-b', 'x1'):
        for variant in generators.gen_typo(label, subtype):
          with self.subTest(subtype=subtype, variant=variant):
            self.assertNotEqual(variant, label)
            self.assertTrue(structure.is_valid_label(variant))


class BitTest(absltest.TestCase):

  def test_example_flips_to_exemple(self):
    self.assertIn('exemple', generators.gen_bit('example'))

  def test_single_letter(self):
    self.assertEqual(generators.gen_bit('a'), {'c', 'e', 'i', 'q'})

  def test_matches_brute_force(self):
    rng = random.Random(2024)
    alphabet = 'abcdefghijklmnopqrstuvwxyz0123456789'
    for _ in range(100):
      label = ''.join(rng.choice(alphabet) for _ in range(rng.randint(1, 15)))
      with self.subTest(label=label):
        self.assertEqual(generators.gen_bit(label), _brute_force_bits(label))

  def test_length_preserved(self):
    for variant in generators.gen_bit('example'):
      self.assertLen(variant, len('example'))


class HomoTest(absltest.TestCase):

  def test_multigraph(self):
    self.assertIn('exarnple', generators.gen_homo('example'))

  def test_cyrillic_variant_is_punycode(self):
    expected = idna.encode('exаmple').decode('ascii')
    variants = generators.gen_homo('example')
    self.assertIn(expected, variants)
    self.assertTrue(expected.startswith('xn--'))

  def test_nothing_to_replace(self):
    self.assertEmpty(generators.gen_homo('fbz'))

  def test_outputs_are_ascii_labels(self):
    for variant in generators.gen_homo('paypal'):
      self.assertTrue(structure.is_valid_label(variant), variant)


class SoundTest(absltest.TestCase):

  def test_example_sounds_like_eggsample(self):
    self.assertIn('eggsample', generators.gen_sound('example'))

  def test_no_token(self):
    self.assertEmpty(generators.gen_sound('zzz'))

  def test_direct_table(self):
    table = tables.HomophoneTable.from_pairs([('for', 'four'), ('for', '4')])
    self.assertEqual(generators.gen_sound('for', table), {'four', '4'})

  def test_greedy_longest_match(self):
    table = tables.HomophoneTable.from_pairs([('ex', 'x'), ('exa', 'eksa')])
    self.assertEqual(generators.gen_sound('example', table), {'eksample'})


class TldTest(absltest.TestCase):

  def test_other_suffixes(self):
    self.assertEqual(
        generators.gen_tld('example.com', ['com', 'shop', 'tech']),
        {'example.shop', 'example.tech'})

  def test_only_own_suffix(self):
    self.assertEmpty(generators.gen_tld('example.com', ['com']))

  def test_count(self):
    tlds = ['com', 'net', 'org', 'shop', 'co.jp']
    self.assertLen(generators.gen_tld('example.com', tlds), len(tlds) - 1)


class ComboAndHybridTest(absltest.TestCase):

  def test_combo_forms(self):
    variants = generators.gen_combo('example', ['secure'])
    self.assertEqual(variants, {'examplesecure', 'secureexample',
                                'example-secure', 'secure-example'})

  def test_level(self):
    self.assertEqual(generators.gen_level('example.com', ['domain.example']),
                     {'example.com.domain.example'})

  def test_hybrid_walkthrough_name(self):
    self.assertIn('exarnple-secure.domain.example',
                  generators.gen_hybrid('example.com', ['domain.example']))

  def test_hybrid_idn_label_encoded_whole(self):
    expected = idna.encode('exаmple-secure').decode('ascii')
    self.assertIn(f'{expected}.domain.example',
                  generators.gen_hybrid('example.com', ['domain.example']))


if __name__ == '__main__':
  absltest.main()
