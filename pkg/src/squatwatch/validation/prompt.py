"""Analysis prompt in five fixed sections plus optional reviewer feedback."""
import json
from typing import Iterable, List, Optional, Sequence

from squatwatch.domains import names
from squatwatch.llm import backend
from squatwatch.validation import mustpass

TASK = 'Task Description'
CRITERIA = 'Analysis Criteria'
OUTPUT = 'Output Specification'
REFERENCES = 'Additional Legitimate Domains'
INPUTS = 'Input Domains'
FEEDBACK = 'Reviewer Feedback'

SYSTEM_TEXT = ('You are a security analyst specialized in identifying domain '
               'squatting.')

_TASK_TEXT = """\
You are a security analyst specialized in identifying domain squatting. \
Each input domain is given in a structured form that separates its \
subdomain (s), registrable domain label (d) and public suffix (sx). For \
example, www.example.co.jp is given as {"s":"www","d":"example","sx":"co.jp"} \
and amazon.com.example.com is given as \
{"s":"amazon.com","d":"example","sx":"com"}.
Steps:
1. Read every input domain and its parts.
2. Compare it with well-known legitimate domains, including the additional \
legitimate domains listed below.
3. Decide whether it imitates a legitimate domain using the analysis criteria.
4. Report each squatting domain with its most likely squatting type and the \
legitimate domain it targets."""

_CRITERIA = (
    ('Typo-squatting', 'typing mistakes such as a missing dot, an omitted, '
     'swapped, replaced or inserted character', 'exmaple.com'),
    ('Homograph-squatting', 'visually similar characters or character '
     'sequences, including internationalized characters', 'exarnple.com'),
    ('Bit-squatting', 'a single flipped bit in one character', 'exemple.com'),
    ('Sound-squatting', 'words that sound alike', 'eggsample.com'),
    ('TLD-squatting', 'the legitimate label under a different public suffix',
     'example.shop'),
    ('Combo-squatting', 'the legitimate label combined with extra words',
     'example-secure.com'),
    ('Level-squatting', 'the legitimate domain placed in the subdomain of '
     'another domain', 'example.com.domain.example'),
    ('Hybrid-squatting', 'combining multiple squatting techniques',
     'exarnple-secure.domain.example'),
)

_OUTPUT_TEXT = """\
Provide analysis only for domains with squatting risks. Reply with a single \
JSON array and nothing else. Each element is an object with exactly these keys:
- "s": subdomain, copied from the input
- "d": domain label, copied from the input
- "sx": suffix, copied from the input
- "type": most likely squatting type, one of \
typo, homo, bit, sound, tld, combo, level, hybrid
- "l": the targeted legitimate domain, e.g. "amazon.com"
Reply with [] when no input domain shows a squatting risk."""


def _section(heading: str, body: str) -> str:
  return f'# {heading}\n{body}\n'


def input_records(augmented: mustpass.Augmented) -> List[dict]:
  return [names.to_structured(mustpass.item_fqdn(item)) for item in augmented]


def build_prompt(augmented: mustpass.Augmented,
    references: Iterable[str] = (),
    feedback: Sequence[str] = (),
    max_output_tokens: int = 4096,
    attempt: Optional[int] = None) -> backend.LlmRequest:
  """Byte-stable request for one attempt on one chunk.

  Args:
    augmented: Chunk pairs with must-pass entries in place.
    references: Legitimate domains for this chunk; repeats are dropped.
    feedback: Feedback of earlier failed attempts, oldest first.
    max_output_tokens: Completion budget.
    attempt: Loop attempt; defaults to one more than the feedback count.

  Returns:
    The request; the user text holds the sections.
  """
  if not augmented:
    raise ValueError('cannot build a prompt for an empty chunk')
  criteria = '\n'.join(f'{i}. {name}: {text} (e.g., {example})'
                       for i, (name, text, example) in enumerate(_CRITERIA, 1))
  unique_references = list(dict.fromkeys(references))
  reference_text = '\n'.join(f'- {domain}' for domain in unique_references)
  inputs = json.dumps(input_records(augmented), separators=(',', ':'))
  parts = [
      _section(TASK, _TASK_TEXT),
      _section(CRITERIA, criteria),
      _section(OUTPUT, _OUTPUT_TEXT),
      _section(REFERENCES, reference_text or '(none)'),
      _section(INPUTS, inputs),
  ]
  if feedback:
    parts.append(
        _section(FEEDBACK, '\n'.join(f'- Attempt {i}: {text}'
                                     for i, text in enumerate(feedback, 1))))
  return backend.LlmRequest(system_text=SYSTEM_TEXT,
                            user_text='\n'.join(parts),
                            max_output_tokens=max_output_tokens,
                            attempt=(attempt if attempt is not None else
                                     len(feedback) + 1))


def extract_section(user_text: str, heading: str) -> Optional[str]:
  """Body of the `# heading` section, or None when absent."""
  lines = user_text.split('\n')
  marker = f'# {heading}'
  if marker not in lines:
    return None
  start = lines.index(marker) + 1
  end = start
  while end < len(lines) and not lines[end].startswith('# '):
    end += 1
  return '\n'.join(lines[start:end]).strip()

