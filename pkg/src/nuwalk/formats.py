"""
Text output formats.

Series CSV: header ``step,P_<a><b>...[,S...][,S_avg]``, one row per step,
values with 12 significant digits.

Matrix dump: a ``#`` header, then one block per matrix introduced by a
``[label]`` line, one row per line, entries as ``re,im`` pairs with 17
significant digits separated by single spaces, blank line between blocks.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "series_header",
    "format_series_csv",
    "format_matrix_dump",
    "read_matrix_dump",
    "write_atomic",
]


def series_header(labels, alpha: int, entropy: bool) -> list[str]:
    a = labels[alpha]
    cols = ["step"] + [f"P_{a}{b}" for b in labels]
    if entropy:
        if len(labels) == 2:
            cols.append("S")
        else:
            cols += [f"S_{g}" for g in labels] + ["S_avg"]
    return cols


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def format_series_csv(series, entropies=None) -> str:
    """CSV text for a :class:`~nuwalk.neutrino.TransitionSeries`."""
    header = series_header(series.labels, series.alpha, entropies is not None)
    lines = [",".join(header)]
    p = series.probabilities
    for t in range(p.shape[0]):
        row = [str(t)] + [_fmt(v) for v in p[t]]
        if entropies is not None:
            if len(series.labels) == 2:
                row.append(_fmt(entropies.entropies[t, 0]))
            else:
                row += [_fmt(v) for v in entropies.entropies[t]]
                row.append(_fmt(entropies.average[t]))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _entry(z: complex) -> str:
    return f"{z.real:.16e},{z.imag:.16e}"


def format_matrix_dump(
    blocks: Mapping[str, np.ndarray] | Iterable[tuple[str, np.ndarray]],
    header: Mapping[str, object] | None = None,
    footer: Mapping[str, object] | None = None,
) -> str:
    items = blocks.items() if isinstance(blocks, Mapping) else blocks
    out = ["# nuwalk matrix dump"]
    if header:
        out.append("# " + " ".join(f"{k}={v}" for k, v in header.items()))
    for label, m in items:
        out.append("")
        out.append(f"[{label}]")
        for row in np.atleast_2d(m):
            out.append(" ".join(_entry(complex(z)) for z in row))
    if footer:
        out.append("")
        for k, v in footer.items():
            out.append(f"# {k}={v}")
    return "\n".join(out) + "\n"


def read_matrix_dump(text: str) -> dict[str, np.ndarray]:
    """Parse a matrix dump back into ``{label: matrix}``."""
    blocks: dict[str, list] = {}
    current = None
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            blocks[current] = []
            continue
        if current is None:
            raise ValueError("matrix row before any block label")
        row = []
        for pair in line.split():
            re, im = pair.split(",")
            row.append(complex(float(re), float(im)))
        blocks[current].append(row)
    return {k: np.array(v, dtype=np.complex128) for k, v in blocks.items()}


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the target directory and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
