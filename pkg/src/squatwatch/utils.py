import gzip
import os
import tempfile
from typing import Optional, Sequence, TextIO

import matplotlib as mpl
import numpy as np
from absl import logging

mpl.use('Agg')
import matplotlib.pyplot as plt


def log_event(stage: str, event: str, chunk: Optional[int] = None,
    level: int = logging.INFO, **fields) -> None:
  """Logs one structured pipeline line: stage=.. chunk=.. event=.. k=v ..."""
  chunk_text = '-' if chunk is None else str(chunk)
  extras = ''.join(f' {key}={value}' for key, value in fields.items())
  logging.log(level, 'stage=%s chunk=%s event=%s%s', stage, chunk_text, event,
              extras)


def open_text(path: str, mode: str = 'r') -> TextIO:
  """Opens a UTF-8 text file, reading or writing gzip when named *.gz."""
  if path.endswith('.gz'):
    return gzip.open(path, mode + 't', encoding='utf-8')
  return open(path, mode, encoding='utf-8', newline='\n')


def atomic_write_text(path: str, text: str) -> None:
  """Writes `text` to a temporary file, then renames it over `path`."""
  directory = os.path.dirname(os.path.abspath(path))
  os.makedirs(directory, exist_ok=True)
  fd, tmp_path = tempfile.mkstemp(dir=directory, prefix='.tmp-')
  try:
    with os.fdopen(fd, 'w', encoding='utf-8', newline='\n') as fh:
      fh.write(text)
    os.replace(tmp_path, path)
  except BaseException:
    if os.path.exists(tmp_path):
      os.remove(tmp_path)
    raise


def draw(counts: np.ndarray, name: str, row_labels: Sequence[str],
    column_labels: Sequence[str]) -> str:
  """Saves a heatmap of `counts` with labelled rows and columns to name.pdf."""
  plt.figure(figsize=(10, 8))
  plt.yticks(np.arange(len(row_labels)), row_labels)
  plt.xticks(np.arange(len(column_labels)), column_labels, rotation=30)
  plt.imshow(counts, cmap='viridis', interpolation='nearest', aspect='auto')
  plt.colorbar()
  for (row, column), value in np.ndenumerate(counts):
    plt.text(column, row, str(int(value)), ha='center', va='center',
             color='white')
  plt.title(os.path.basename(name))
  plt.tight_layout()
  path = name + '.pdf'
  plt.savefig(path)
  plt.close()
  return path
