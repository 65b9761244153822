"""Line-oriented instance files.

    # comment
    tsp 4
    alpha e
    0 .7 .5 1
    ...

`alpha` is optional (default e). Every row carries the full matrix row.
"""

from __future__ import annotations
import logging
import math
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from errors import ParseError, QsaError
from tsp.instance import MIN_CITIES, SYMMETRY_TOL, TspInstance, normalize

logger = logging.getLogger(__name__)


def _content_lines(text: str) -> List[Tuple[int, str]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line))
    return out


def _parse_alpha(token: str, lineno: int) -> float:
    if token.lower() == "e":
        return math.e
    try:
        alpha = float(token)
    except ValueError:
        raise ParseError(f"bad alpha value {token!r}", lineno)
    if not alpha > 1.0 or not math.isfinite(alpha):
        raise ParseError(f"alpha must be > 1, got {token}", lineno)
    return alpha


def parse_instance(text: str) -> TspInstance:
    lines = _content_lines(text)
    if not lines:
        raise ParseError("empty instance file", 1)

    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 2 or parts[0].lower() != "tsp":
        raise ParseError(f"expected 'tsp <n>' header, got {header!r}", lineno)
    try:
        n = int(parts[1])
    except ValueError:
        raise ParseError(f"city count must be an integer, got {parts[1]!r}", lineno)
    if n < MIN_CITIES:
        raise ParseError(f"need n >= {MIN_CITIES}, got {n}", lineno)

    body = lines[1:]
    alpha: Optional[float] = None
    if body and body[0][1].split()[0].lower() == "alpha":
        lineno, line = body[0]
        toks = line.split()
        if len(toks) != 2:
            raise ParseError(f"expected 'alpha <value>', got {line!r}", lineno)
        alpha = _parse_alpha(toks[1], lineno)
        body = body[1:]

    if len(body) != n:
        last = body[-1][0] if body else lineno
        raise ParseError(f"expected {n} matrix rows, found {len(body)}", last)

    rows = []
    for lineno, line in body:
        try:
            row = [float(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"non-numeric entry in row {line!r}", lineno)
        if len(row) != n:
            raise ParseError(f"row has {len(row)} entries, expected {n}", lineno)
        rows.append(row)
    m = np.array(rows)

    for i in range(n):
        lineno = body[i][0]
        if abs(m[i, i]) > SYMMETRY_TOL:
            raise ParseError(f"diagonal entry d[{i + 1},{i + 1}] must be 0", lineno)
        for j in range(n):
            if i == j:
                continue
            if m[i, j] <= 0.0:
                raise ParseError(f"nonpositive distance d[{i + 1},{j + 1}] = {m[i, j]}", lineno)
            if abs(m[i, j] - m[j, i]) > SYMMETRY_TOL:
                raise ParseError(f"asymmetric entries d[{i + 1},{j + 1}] != d[{j + 1},{i + 1}]", lineno)

    m = (m + m.T) / 2.0
    np.fill_diagonal(m, 0.0)
    return TspInstance(normalize(m), alpha=alpha)


def serialize_instance(inst: TspInstance) -> str:
    alpha = "e" if inst.alpha == math.e else repr(inst.alpha)
    lines = [f"tsp {inst.n}", f"alpha {alpha}"]
    for row in inst.dist:
        lines.append(" ".join(f"{x:.12g}" for x in row))
    return "\n".join(lines) + "\n"


def load_instance(path: str | Path) -> TspInstance:
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as e:
        raise ParseError(f"cannot read {p}: {e}")
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        line = raw.count(b"\n", 0, e.start) + 1
        raise ParseError(f"{p} is not valid UTF-8: {e.reason}", line=line) from None
    try:
        inst = parse_instance(text)
    except ParseError as e:
        logger.error(f"failed to parse {p}: {e}")
        raise
    except QsaError as e:
        raise ParseError(str(e))
    logger.info(f"loaded {inst!r} from {p}")
    return inst


def save_instance(inst: TspInstance, path: str | Path) -> None:
    Path(path).write_text(serialize_instance(inst))
