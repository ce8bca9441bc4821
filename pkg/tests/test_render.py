import math

import numpy as np
import pytest

from betatet import Overlay, RenderSpec, export_real_line, render_hue, singular_lattice
from betatet.render import GRAY, colorize, pixel_grid, write_csv

LOG2 = math.log(2.0)


def test_colorize_zero_is_black():
    vals = np.zeros((4, 4), np.complex128)
    st = np.zeros((4, 4), np.int8)
    img = colorize(vals, st)
    assert np.all(img == 0)


def test_colorize_one_is_uniform_red():
    vals = np.ones((4, 4), np.complex128)
    st = np.zeros((4, 4), np.int8)
    img = colorize(vals, st)
    assert np.all(img == img[0, 0])
    r, g, b = img[0, 0]
    assert r > 150 and g == 0 and b == 0


def test_colorize_failures_gray():
    vals = np.full((2, 2), 3.0 + 4.0j, np.complex128)
    st = np.array([[0, 2], [1, 3]], np.int8)
    img = colorize(vals, st)
    assert tuple(img[0, 1]) == GRAY
    assert tuple(img[1, 0]) == GRAY
    assert tuple(img[1, 1]) == GRAY
    assert tuple(img[0, 0]) != GRAY


def test_colorize_nan_never_leaks():
    vals = np.array([[complex("nan"), 1.0]], np.complex128)
    st = np.zeros((1, 2), np.int8)
    img = colorize(vals, st)
    assert tuple(img[0, 0]) == GRAY


def test_render_deep_negative_window_black():
    spec = RenderSpec(window=(-50, -40, -1, 1), resolution=(16, 8), fn="beta",
                      lam=LOG2, depth=100)
    buf = render_hue(spec)
    assert np.all(buf.data <= 1)


def test_render_determinism_bytes():
    spec = RenderSpec(window=(-1, 1, -1, 1), resolution=(64, 64), fn="f",
                      lam=LOG2, depth=25)
    a = render_hue(spec).to_ppm()
    b = render_hue(spec).to_ppm()
    assert a == b


def test_ppm_format():
    spec = RenderSpec(window=(-1, 1, -1, 1), resolution=(10, 6), fn="g",
                      lam=LOG2, depth=10)
    raw = render_hue(spec).to_ppm()
    header, rest = raw.split(b"\n", 1)
    assert header == b"P6"
    dims, rest = rest.split(b"\n", 1)
    assert dims == b"10 6"
    maxval, payload = rest.split(b"\n", 1)
    assert maxval == b"255"
    assert len(payload) == 10 * 6 * 3


def test_singular_lattice_point_renders_gray():
    s_star = 1 + 1j * math.pi / LOG2
    assert singular_lattice(LOG2, (0, 2, 3, 6)).size > 0
    half = 0.5
    spec = RenderSpec(
        window=(s_star.real - half, s_star.real + half,
                s_star.imag - half, s_star.imag + half),
        resolution=(5, 5), fn="beta", lam=LOG2, depth=10)
    buf = render_hue(spec)
    assert tuple(buf.data[2, 2]) == GRAY       # center pixel hits the lattice
    assert tuple(buf.data[0, 0]) != GRAY


def test_pixel_grid_orientation():
    spec = RenderSpec(window=(0, 1, 0, 1), resolution=(2, 2), fn="g", lam=LOG2)
    Z = pixel_grid(spec)
    assert Z[0, 0].imag > Z[1, 0].imag     # top row carries the larger Im
    assert Z[0, 0].real < Z[0, 1].real


def test_f_render_mixes_colored_and_gray():
    # odd resolution puts one pixel exactly on w = 0 (domain failure -> gray);
    # near-center pixels overflow through the reciprocal blowup
    spec = RenderSpec(window=(-1, 1, -1, 1), resolution=(129, 129), fn="f",
                      lam=LOG2, depth=25)
    buf = render_hue(spec)
    flat = buf.data.reshape(-1, 3)
    grayish = np.all(flat == np.array(GRAY, np.uint8), axis=1)
    assert tuple(buf.data[64, 64]) == GRAY
    assert grayish.sum() >= 2
    assert (~grayish).any()


def test_overlays_change_pixels():
    base = RenderSpec(window=(-2, 2, -2, 2), resolution=(64, 64), fn="g",
                      lam=LOG2, depth=10)
    with_disk = RenderSpec(window=(-2, 2, -2, 2), resolution=(64, 64), fn="g",
                           lam=LOG2, depth=10, overlay=Overlay(unit_disk=True))
    a = render_hue(base).data
    b = render_hue(with_disk).data
    assert (a != b).any()
    white = np.all(b == 255, axis=-1)
    assert white.any()


def test_render_spec_validation():
    with pytest.raises(ValueError):
        RenderSpec(window=(1, -1, 0, 1), resolution=(8, 8), fn="g", lam=LOG2)
    with pytest.raises(ValueError):
        RenderSpec(window=(-1, 1, -1, 1), resolution=(0, 8), fn="g", lam=LOG2)
    with pytest.raises(ValueError):
        RenderSpec(window=(-1, 1, -1, 1), resolution=(8, 8), fn="zeta", lam=LOG2)
    with pytest.raises(ValueError):
        RenderSpec(window=(-1, 1, -1, 1), resolution=(8, 8), fn="beta")
    with pytest.raises(ValueError):
        RenderSpec(window=(-1, 1, -1, 1), resolution=(8, 8), fn="g", lam="variable")


def test_export_beta_real_line():
    rows = export_real_line("beta", lam=LOG2, lo=-10, hi=4, samples=141, depth=100)
    assert len(rows) == 141
    assert all(st == "ok" for _, _, st in rows)
    vals = [v.real for _, v, _ in rows]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert abs(rows[0][1]) < 1e-2


def test_export_tet_real_line(high_model):
    rows = export_real_line("tet", lo=-1.9, hi=2.0, samples=100, depth=100,
                            tau_depth=20)
    vals = [v.real for _, v, _ in rows if v is not None]
    assert len(vals) == 100
    assert all(b > a for a, b in zip(vals, vals[1:]))
    xs = [x for x, _, _ in rows]
    i = int(np.argmin(np.abs(xs)))
    assert abs(rows[i][1].real - 1.0) < 0.1


def test_export_two_samples():
    rows = export_real_line("g", lam=LOG2, lo=0.0, hi=0.5, samples=2, depth=10)
    assert len(rows) == 2


def test_export_failures_are_marker_rows(tmp_path, high_model):
    rows = export_real_line("tet", lo=-2.6, hi=-1.5, samples=12, depth=8, tau_depth=5)
    assert len(rows) == 12
    markers = [st for _, v, st in rows if v is None]
    assert markers and all(st != "ok" for st in markers)
    out = tmp_path / "line.csv"
    write_csv(rows, out)
    text = out.read_text().splitlines()
    assert text[0] == "x,re,im,status"
    assert len(text) == 13
    assert any("branch_cut" in line for line in text[1:])


def test_export_validates_samples():
    with pytest.raises(ValueError):
        export_real_line("g", lam=LOG2, lo=0, hi=1, samples=1)
