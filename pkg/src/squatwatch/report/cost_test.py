"""Tests for token cost estimates."""
import decimal

from absl.testing import absltest
from absl.testing import parameterized
from squatwatch.report import cost

D = decimal.Decimal


class EstimateCostTest(parameterized.TestCase):

  @parameterized.parameters(
      ('gpt-3.5', '40.00'),
      ('gpt-4o', '400.00'),
      ('llama-3-70b', '37.40'),
  )
  def test_published_run_totals(self, name, expected):
    model = cost.cost_model(name)
    self.assertEqual(cost.estimate_cost(50_000_000, 10_000_000, model),
                     D(expected))

  def test_zero_tokens(self):
    self.assertEqual(cost.estimate_cost(0, 0, cost.gpt_4o()), D('0.00'))
    self.assertEqual(str(cost.estimate_cost(0, 0, cost.gpt_4o())), '0.00')

  def test_rounds_half_up_to_cents(self):
    # 10,000 input tokens at 0.50 per million is half a cent.
    self.assertEqual(cost.estimate_cost(10_000, 0, cost.gpt_35()), D('0.01'))

  def test_monotone_and_linear(self):
    model = cost.llama_3_70b()
    previous = D(0)
    for millions in range(0, 20):
      current = cost.estimate_cost(millions * 1_000_000, 0, model)
      self.assertGreaterEqual(current, previous)
      self.assertEqual(current, model.input_rate * millions)
      previous = current

  def test_negative_tokens(self):
    with self.assertRaises(ValueError):
      cost.estimate_cost(-1, 0, cost.gpt_35())


class CostModelTest(parameterized.TestCase):

  def test_override_one_rate(self):
    model = cost.cost_model('gpt-4o', output_rate='12.5')
    self.assertEqual(model.input_rate, D('5.00'))
    self.assertEqual(model.output_rate, D('12.5'))

  def test_custom_model_needs_both_rates(self):
    with self.assertRaises(ValueError):
      cost.cost_model('in-house', input_rate=1)
    model = cost.cost_model('in-house', input_rate=1, output_rate=0.59)
    self.assertEqual(model.output_rate, D('0.59'))

  @parameterized.parameters((0, 1), (1, 0), (-1, 1))
  def test_rates_must_be_positive(self, input_rate, output_rate):
    with self.assertRaises(ValueError):
      cost.CostModel('bad', input_rate, output_rate)


if __name__ == '__main__':
  absltest.main()
