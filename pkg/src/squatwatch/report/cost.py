"""Token cost estimates, priced per million tokens."""
import dataclasses
import decimal
import functools
from typing import Callable, Dict, Optional, Union

_CENT = decimal.Decimal('0.01')
_MILLION = decimal.Decimal(1_000_000)

Rate = Union[decimal.Decimal, str, float, int]


def _as_decimal(value: Rate) -> decimal.Decimal:
  # str() keeps 0.59 from turning into its binary approximation.
  return value if isinstance(value, decimal.Decimal) else decimal.Decimal(
      str(value))


@dataclasses.dataclass(frozen=True)
class CostModel:
  name: str
  # USD per million input tokens.
  input_rate: decimal.Decimal
  # USD per million output tokens.
  output_rate: decimal.Decimal

  def __post_init__(self):
    object.__setattr__(self, 'input_rate', _as_decimal(self.input_rate))
    object.__setattr__(self, 'output_rate', _as_decimal(self.output_rate))
    if self.input_rate <= 0 or self.output_rate <= 0:
      raise ValueError(f'rates must be positive, got {self.input_rate}/'
                       f'{self.output_rate} for {self.name}')


# Rates follow from published per-run totals over 50M input and 10M output
# tokens.
gpt_35 = functools.partial(CostModel, name='gpt-3.5', input_rate='0.50',
                           output_rate='1.50')
gpt_4o = functools.partial(CostModel, name='gpt-4o', input_rate='5.00',
                           output_rate='15.00')
llama_3_70b = functools.partial(CostModel, name='llama-3-70b',
                                input_rate='0.59', output_rate='0.79')

PRESETS: Dict[str, Callable[..., CostModel]] = {
    'gpt-3.5': gpt_35,
    'gpt-4o': gpt_4o,
    'llama-3-70b': llama_3_70b,
}


def cost_model(name: str, input_rate: Optional[Rate] = None,
    output_rate: Optional[Rate] = None) -> CostModel:
  """A preset by name, with either rate overridden when given."""
  overrides = {}
  if input_rate is not None:
    overrides['input_rate'] = input_rate
  if output_rate is not None:
    overrides['output_rate'] = output_rate
  if name in PRESETS:
    return PRESETS[name](**overrides)
  if len(overrides) != 2:
    raise ValueError(f'unknown cost model {name!r}; known: '
                     f'{", ".join(sorted(PRESETS))} or give both rates')
  return CostModel(name=name, **overrides)


def estimate_cost(input_tokens: int, output_tokens: int,
    model: CostModel) -> decimal.Decimal:
  """USD, rounded half-up to the cent."""
  if input_tokens < 0 or output_tokens < 0:
    raise ValueError(
        f'token counts must be non-negative: {input_tokens}/{output_tokens}')
  total = (decimal.Decimal(input_tokens) / _MILLION * model.input_rate +
           decimal.Decimal(output_tokens) / _MILLION * model.output_rate)
  return total.quantize(_CENT, rounding=decimal.ROUND_HALF_UP)
