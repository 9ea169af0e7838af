"""Text formats "ohara-curve v1" (samples) and "ohara-fourier v1" (coefficients)."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .curve import CurveError, FourierCurve, SampledCurve, make_fourier_curve

CURVE_HEADER = "ohara-curve v1"
FOURIER_HEADER = "ohara-fourier v1"


class FormatError(CurveError):
    """Malformed curve file; the message carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _floats(text: str, line: int, count: int) -> list[float]:
    parts = text.split()
    if len(parts) != count:
        raise FormatError(line, f"expected {count} numbers, found {len(parts)}")
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise FormatError(line, f"not a number ({exc})") from None
    if not all(np.isfinite(vals)):
        raise FormatError(line, "non-finite value")
    return vals


def _ints(text: str, line: int) -> tuple[int, int]:
    parts = text.split()
    if len(parts) != 2:
        raise FormatError(line, "expected two integers")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise FormatError(line, "expected two integers") from None


def parse(text: str) -> SampledCurve | FourierCurve:
    """Parse either format, detected from the header line."""
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise FormatError(1, "empty file")
    header = lines[0].strip()
    if header not in (CURVE_HEADER, FOURIER_HEADER):
        raise FormatError(1, f"unknown header {header!r}")
    if len(lines) < 2:
        raise FormatError(2, "missing size line")
    n, size = _ints(lines[1], 2)
    if n < 2:
        raise FormatError(2, "dimension must be at least 2")
    if header == CURVE_HEADER:
        rows, width = size, n
    else:
        if size < 0:
            raise FormatError(2, "K must be nonnegative")
        rows, width = 2 * size + 1, 2 * n
    body = lines[2:]
    if len(body) > rows:
        raise FormatError(3 + rows, f"extra data after {rows} data lines")
    data = np.array([_floats(t, i + 3, width) for i, t in enumerate(body)]).reshape(-1, width)
    if len(body) < rows:
        raise FormatError(len(lines) + 1, f"unexpected end of file: expected {rows} data lines, "
                                          f"found {len(body)}")
    try:
        if header == CURVE_HEADER:
            return SampledCurve(data)
        return FourierCurve(data[:, 0::2] + 1j * data[:, 1::2])
    except CurveError as exc:
        raise FormatError(2, str(exc)) from None


def read(path: str | Path) -> SampledCurve | FourierCurve:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CurveError(f"cannot read {path}: {exc.strerror}") from None
    return parse(text)


def load_curve(path: str | Path, n_samples: int | None = None) -> SampledCurve:
    """Read a file and return samples; coefficient files are synthesized."""
    obj = read(path)
    if isinstance(obj, FourierCurve):
        return make_fourier_curve(obj, n_samples)
    if n_samples is not None and n_samples != obj.n_samples:
        raise CurveError("sample files keep their own resolution")
    return obj


def _num(x: float) -> str:
    # shortest repr that round-trips exactly
    return repr(float(x))


def format_curve(curve: SampledCurve) -> str:
    out = [CURVE_HEADER, f"{curve.dim} {curve.n_samples}"]
    out.extend(" ".join(_num(v) for v in row) for row in curve.samples)
    return "\n".join(out) + "\n"


def format_fourier(fc: FourierCurve) -> str:
    out = [FOURIER_HEADER, f"{fc.dim} {fc.K}"]
    for row in fc.coeffs:
        out.append(" ".join(f"{_num(c.real)} {_num(c.imag)}" for c in row))
    return "\n".join(out) + "\n"


def write_curve(path: str | Path, curve: SampledCurve | FourierCurve) -> None:
    text = format_fourier(curve) if isinstance(curve, FourierCurve) else format_curve(curve)
    Path(path).write_text(text)
