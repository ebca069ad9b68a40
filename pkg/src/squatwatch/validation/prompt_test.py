"""Tests for prompt construction."""
import json
import re

from absl.testing import absltest
from squatwatch.domains import names
from squatwatch.expansion import pairs
from squatwatch.validation import prompt


def _augmented(*raws):
  return [
      pairs.DomainPair(input=names.parse(raw), proximate='amazon.com',
                       similarity=0.7) for raw in raws
  ]


class BuildPromptTest(absltest.TestCase):

  def test_sections_in_order(self):
    text = prompt.build_prompt(_augmented('login.amaz0n.com'),
                               ['amazon.com']).user_text
    headings = re.findall(r'^# (.+)$', text, flags=re.MULTILINE)
    self.assertEqual(headings, [
        prompt.TASK, prompt.CRITERIA, prompt.OUTPUT, prompt.REFERENCES,
        prompt.INPUTS
    ])

  def test_eight_criteria(self):
    text = prompt.build_prompt(_augmented('example.com'), []).user_text
    criteria = prompt.extract_section(text, prompt.CRITERIA)
    numbered = re.findall(r'^(\d+)\. ', criteria, flags=re.MULTILINE)
    self.assertEqual(numbered, [str(i) for i in range(1, 9)])
    self.assertIn('Hybrid-squatting', criteria)

  def test_persona(self):
    request = prompt.build_prompt(_augmented('example.com'), [])
    self.assertIn('You are a security analyst specialized in identifying '
                  'domain squatting', request.user_text)
    self.assertEqual(request.temperature, 0.0)

  def test_references_deduplicated(self):
    text = prompt.build_prompt(
        _augmented('a.com'),
        ['amazon.com', 'paypal.com', 'amazon.com']).user_text
    self.assertEqual(
        prompt.extract_section(text, prompt.REFERENCES),
        '- amazon.com\n- paypal.com')

  def test_input_records(self):
    text = prompt.build_prompt(
        _augmented('www.amazon.com', 'example.co.jp'), []).user_text
    self.assertEqual(
        json.loads(prompt.extract_section(text, prompt.INPUTS)),
        [{'s': 'www', 'd': 'amazon', 'sx': 'com'},
         {'s': '', 'd': 'example', 'sx': 'co.jp'}])

  def test_byte_stable(self):
    build = lambda: prompt.build_prompt(
        _augmented('paypa1.com', 'foo.net'), ['paypal.com'], ['again'])
    self.assertEqual(build(), build())

  def test_feedback_section(self):
    text = prompt.build_prompt(_augmented('a.com'), [],
                               ['first', 'second']).user_text
    self.assertEqual(
        prompt.extract_section(text, prompt.FEEDBACK),
        '- Attempt 1: first\n- Attempt 2: second')
    self.assertEqual(
        prompt.build_prompt(_augmented('a.com'), [], ['first']).attempt, 2)

  def test_attempt_without_feedback(self):
    request = prompt.build_prompt(_augmented('a.com'), [])
    self.assertIsNone(prompt.extract_section(request.user_text,
                                             prompt.FEEDBACK))
    self.assertEqual(request.attempt, 1)

  def test_explicit_attempt_leaves_text_alone(self):
    default = prompt.build_prompt(_augmented('a.com'), [])
    third = prompt.build_prompt(_augmented('a.com'), [], attempt=3)
    self.assertEqual(third.attempt, 3)
    self.assertEqual(third.user_text, default.user_text)

  def test_empty_chunk(self):
    with self.assertRaises(ValueError):
      prompt.build_prompt([], [])


if __name__ == '__main__':
  absltest.main()
