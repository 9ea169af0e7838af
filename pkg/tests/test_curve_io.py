import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ohara import io
from ohara.curve import (CurveError, FourierCurve, SampledCurve, analyze, embeddedness_constants,
                         ellipse, is_arclength, length, make_circle, make_fourier_curve,
                         reparametrize_arclength, trefoil_coefficients)


def test_circle_length_and_speed():
    c = make_circle(64, length=3.0)
    assert abs(length(c) - 3.0) < 1e-13
    assert is_arclength(c)


def test_ellipse_length_against_elliptic_integral():
    from scipy.special import ellipe
    c = ellipse(256, 2.0, 1.0)
    assert abs(length(c) - 4 * 2.0 * ellipe(1 - 0.25)) < 1e-12
    assert not is_arclength(c)
    r = reparametrize_arclength(c)
    assert is_arclength(r, 1e-10)
    assert abs(length(r) - length(c)) < 1e-11


def test_fourier_roundtrip():
    fc = trefoil_coefficients()
    c = make_fourier_curve(fc, 64)
    back = analyze(c, fc.K)
    np.testing.assert_allclose(back.coeffs, fc.coeffs, atol=1e-14)


def test_rejects_bad_grids_and_degenerate_curves():
    with pytest.raises(CurveError):
        SampledCurve(np.zeros((24, 2)))
    with pytest.raises(CurveError):
        embeddedness_constants(SampledCurve(np.zeros((16, 2))))


def test_embeddedness_of_circle():
    rep = embeddedness_constants(make_circle(128))
    # worst chord ratio is at the antipode: (1/pi) / (1/2)
    assert abs(rep.c_bilip - 2 / np.pi) < 1e-12
    assert abs(rep.c_reg - 1.0) < 1e-12


def test_figure_eight_is_not_embedded():
    t = 2 * np.pi * np.arange(64) / 64
    c = SampledCurve(np.column_stack([np.sin(t), np.sin(2 * t)]))
    assert embeddedness_constants(c).c_bilip < 1e-12


@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=32, max_size=32))
@settings(max_examples=25, deadline=None)
def test_curve_file_roundtrip_is_exact(vals):
    c = SampledCurve(np.array(vals).reshape(16, 2))
    back = io.parse(io.format_curve(c))
    assert np.array_equal(back.samples, c.samples)


def test_fourier_file_roundtrip():
    fc = trefoil_coefficients(1.7)
    back = io.parse(io.format_fourier(fc))
    assert isinstance(back, FourierCurve)
    assert np.array_equal(back.coeffs, fc.coeffs)


@pytest.mark.parametrize("text, line", [
    ("bogus\n", 1),
    ("ohara-curve v1\n", 2),
    ("ohara-curve v1\n2 x\n", 2),
    ("ohara-curve v1\n2 16\n" + "0 0\n" * 3 + "1 nan\n", 6),
    ("ohara-curve v1\n2 16\n" + "0 0\n" * 4 + "1\n", 7),
    ("ohara-curve v1\n2 16\n" + "0 0\n" * 5, 8),
    ("ohara-fourier v1\n2 1\n" + "0 0 0 0\n" * 4, 6),
])
def test_format_errors_carry_line_numbers(text, line):
    with pytest.raises(io.FormatError) as info:
        io.parse(text)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")
