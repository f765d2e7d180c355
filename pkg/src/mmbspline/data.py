"""Simulated scatterplot data and the CSV formats used by the CLI."""
import csv
import io
import math

import numpy as np

from .exceptions import MMBSplineError


class DataFormatError(MMBSplineError, ValueError):
    """Malformed CSV input; the message carries the line number."""


def true_curve(x):
    """The smooth test signal ``3 + 0.1 x + sin(2 pi x)``."""
    x = np.asarray(x, dtype=float)
    return 3.0 + 0.1 * x + np.sin(2.0 * np.pi * x)


def simulate(n=1000, x_min=0.0, x_max=10.0, noise_sd=0.5, seed=949030):
    """
    Draw ``x ~ U(x_min, x_max)`` and ``y = true_curve(x) + noise_sd * N(0, 1)``.

    Uses numpy's PCG64 generator, so a given seed reproduces the same sample
    on every platform (but not the stream of other software).
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n!r}")
    if noise_sd < 0:
        raise ValueError(f"noise_sd must be nonnegative, got {noise_sd!r}")
    rng = np.random.default_rng(seed)
    x = rng.uniform(x_min, x_max, n)
    y = true_curve(x) + noise_sd * rng.standard_normal(n)
    return x, y


def _fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17g" % value


def format_columns(header, columns):
    """CSV text with full double precision."""
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in zip(*columns):
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def write_csv(path, header, columns):
    text = format_columns(header, columns)
    if path is None or str(path) == "-":
        import sys

        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def read_columns(path, expected):
    """
    Read a numeric CSV whose header is exactly `expected`.

    Returns one float array per column. Errors name the offending line.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        if [h.strip() for h in header] != list(expected):
            raise DataFormatError(
                f"{path}:1: expected header {','.join(expected)!r}, got {','.join(header)!r}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(expected):
                raise DataFormatError(f"{path}:{lineno}: expected {len(expected)} fields, got {len(row)}")
            try:
                values = [float(cell) for cell in row]
            except ValueError:
                raise DataFormatError(f"{path}:{lineno}: not a number in {row!r}") from None
            if not all(math.isfinite(v) for v in values):
                raise DataFormatError(f"{path}:{lineno}: non-finite value in {row!r}")
            rows.append(values)
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    arr = np.array(rows, dtype=float)
    return [arr[:, k] for k in range(arr.shape[1])]


def read_xy(path):
    return tuple(read_columns(path, ("x", "y")))


def write_xy(path, x, y):
    write_csv(path, ("x", "y"), (x, y))


def grid(x_min, x_max, step):
    """Equidistant points ``x_min, x_min + step, ...`` not exceeding ``x_max``."""
    if not step > 0:
        raise ValueError(f"grid step must be positive, got {step!r}")
    count = int(math.floor((x_max - x_min) / step * (1 + 1e-12))) + 1
    return np.minimum(x_min + step * np.arange(count), x_max)
