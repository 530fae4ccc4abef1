"""Line-oriented text serialization for trained models.

Format (UTF-8):

    line 1: ``PAIRNET v1`` or ``LM v1``
    line 2: ``r=<int> m=<int>``
    line 3: ``standardization=<none|present>``; when present, the next two
            lines hold m decimals each (means, then stds)
    then one section per test or class: a ``PAIR <i> <j>`` or ``CLASS <j>``
    header followed by one line of m+1 decimals (bias first).

Floats are written with shortest round-trip precision, so save followed by
load reproduces the model bit for bit.
"""

import numpy as np

from .dataset import Standardization
from .errors import ParseError
from .linear_machine import LinearMachine
from .pairwise_net import PairwiseNetwork, PairwiseTest, enumerate_pairs

MAGIC_PAIRNET = "PAIRNET v1"
MAGIC_LM = "LM v1"


def _fmt_floats(values: np.ndarray) -> str:
    return " ".join(repr(float(v)) for v in values)


def save_model(model, path) -> None:
    """Write a PairwiseNetwork or LinearMachine to a text file."""
    lines = []
    if isinstance(model, PairwiseNetwork):
        lines.append(MAGIC_PAIRNET)
    elif isinstance(model, LinearMachine):
        lines.append(MAGIC_LM)
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    lines.append(f"r={model.r} m={model.m}")
    if model.standardization is None:
        lines.append("standardization=none")
    else:
        lines.append("standardization=present")
        lines.append(_fmt_floats(model.standardization.means))
        lines.append(_fmt_floats(model.standardization.stds))
    if isinstance(model, PairwiseNetwork):
        for t in model.tests:
            lines.append(f"PAIR {t.i} {t.j}")
            lines.append(_fmt_floats(t.weights))
    else:
        for j in range(model.r):
            lines.append(f"CLASS {j + 1}")
            lines.append(_fmt_floats(model.weights[j]))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


class _LineReader:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    def next(self, what: str) -> str:
        while self.pos < len(self.lines):
            line = self.lines[self.pos].strip()
            self.pos += 1
            if line:
                return line
        raise ParseError(f"file truncated: missing {what}", line=self.pos + 1)

    @property
    def lineno(self) -> int:
        return self.pos


def _parse_floats(line: str, count: int, what: str, lineno: int) -> np.ndarray:
    parts = line.split()
    if len(parts) != count:
        raise ParseError(
            f"{what}: expected {count} values, found {len(parts)}", line=lineno
        )
    try:
        return np.asarray([float(p) for p in parts], dtype=np.float64)
    except ValueError as exc:
        raise ParseError(f"{what}: {exc}", line=lineno) from None


def load_model(path):
    """Read a model file back; returns a PairwiseNetwork or LinearMachine."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    rd = _LineReader(text)

    magic = rd.next("magic line")
    if magic not in (MAGIC_PAIRNET, MAGIC_LM):
        raise ParseError(
            f"unrecognized magic '{magic}' (expected '{MAGIC_PAIRNET}' or '{MAGIC_LM}')",
            line=rd.lineno,
        )

    dims = rd.next("dimension line 'r=<int> m=<int>'")
    try:
        r_part, m_part = dims.split()
        if not (r_part.startswith("r=") and m_part.startswith("m=")):
            raise ValueError
        r = int(r_part.removeprefix("r="))
        m = int(m_part.removeprefix("m="))
    except ValueError:
        raise ParseError(
            f"{magic}: malformed dimension line '{dims}'", line=rd.lineno
        ) from None

    std_line = rd.next("standardization line")
    if std_line == "standardization=none":
        standardization = None
    elif std_line == "standardization=present":
        means = _parse_floats(rd.next("standardization means"), m, "means", rd.lineno)
        stds = _parse_floats(rd.next("standardization stds"), m, "stds", rd.lineno)
        standardization = Standardization(means=means, stds=stds)
    else:
        raise ParseError(
            f"{magic}: expected 'standardization=<none|present>', got '{std_line}'",
            line=rd.lineno,
        )

    if magic == MAGIC_PAIRNET:
        tests = []
        for i, j in enumerate_pairs(r):
            header = rd.next(f"section 'PAIR {i} {j}'")
            if header != f"PAIR {i} {j}":
                raise ParseError(
                    f"expected section 'PAIR {i} {j}', got '{header}'", line=rd.lineno
                )
            w = _parse_floats(
                rd.next(f"weights of PAIR {i} {j}"), m + 1, f"PAIR {i} {j}", rd.lineno
            )
            tests.append(PairwiseTest(i=i, j=j, weights=w))
        return PairwiseNetwork(r=r, m=m, tests=tuple(tests), standardization=standardization)

    rows = []
    for j in range(1, r + 1):
        header = rd.next(f"section 'CLASS {j}'")
        if header != f"CLASS {j}":
            raise ParseError(
                f"expected section 'CLASS {j}', got '{header}'", line=rd.lineno
            )
        rows.append(
            _parse_floats(rd.next(f"weights of CLASS {j}"), m + 1, f"CLASS {j}", rd.lineno)
        )
    return LinearMachine(
        r=r, m=m, weights=np.vstack(rows), standardization=standardization
    )
