import math

import numpy as np
import pytest

from dcenters.render import (
    EXTERIOR,
    INTERIOR,
    ORBIT_MARK,
    Viewport,
    decode_ppm,
    encode_ppm,
    interior_mask,
    mask_from_ppm,
    render_julia,
    rotation_mismatch,
)

CUBIC_CENTER = 0.387848 + 0.6853j


def test_viewport_validation():
    with pytest.raises(ValueError):
        Viewport(half_width=0)
    with pytest.raises(ValueError):
        Viewport(width=9000)
    with pytest.raises(ValueError):
        Viewport(max_iter=0)


def test_grid_and_pixel_lookup_agree():
    vp = Viewport(0.5 - 0.25j, 1.0, 40, 30)
    g = vp.grid()
    assert g.shape == (30, 40)
    for r, c in [(0, 0), (29, 39), (12, 7)]:
        assert vp.to_pixel(g[r, c]) == (r, c)
    assert vp.to_pixel(10 + 0j) is None
    assert g[0, 0].imag > g[-1, 0].imag


def test_escape_radius_must_cover_degree():
    with pytest.raises(ValueError):
        interior_mask(0, 2, Viewport(escape_radius=1.5))


def test_ppm_round_trip():
    rgb = np.random.default_rng(0).integers(0, 256, (7, 5, 3), dtype=np.uint8)
    data = encode_ppm(rgb)
    assert data.startswith(b"P6\n5 7\n255\n")
    assert np.array_equal(decode_ppm(data), rgb)
    with pytest.raises(ValueError):
        decode_ppm(b"P3\n1 1\n255\n000")


def test_unit_disk(tmp_path):
    vp = Viewport(0j, 2.0, 256, 256)
    out = tmp_path / "disk.ppm"
    mask = render_julia(0, 2, vp, out)
    assert np.array_equal(mask_from_ppm(out.read_bytes()), mask)
    r = np.abs(vp.grid())
    s = vp.pixel_size
    assert not np.any((r < 1 - s) & ~mask)
    assert not np.any((r > 1 + s) & mask)
    assert mask[vp.to_pixel(0j)]
    assert not mask[vp.to_pixel(1.5 + 0j)]


def test_output_is_byte_identical(tmp_path):
    vp = Viewport(0j, 1.6, 120, 90, max_iter=100)
    a, b = tmp_path / "a.ppm", tmp_path / "b.ppm"
    render_julia(CUBIC_CENTER, 3, vp, a, orbit_n=5)
    render_julia(CUBIC_CENTER, 3, vp, b, orbit_n=5)
    assert a.read_bytes() == b.read_bytes()


def test_basilica_cycle_is_interior():
    vp = Viewport(0j, 2.0, 201, 201)
    mask = interior_mask(-1, 2, vp)
    assert mask[vp.to_pixel(0j)] and mask[vp.to_pixel(-1 + 0j)]


def test_orbit_markers(tmp_path):
    vp = Viewport(0j, 2.0, 101, 101)
    out = tmp_path / "m.ppm"
    render_julia(-1, 2, vp, out, orbit_n=2)
    rgb = decode_ppm(out.read_bytes())
    for z in (0j, -1 + 0j):
        assert tuple(rgb[vp.to_pixel(z)]) == ORBIT_MARK
    colours = {tuple(x) for x in rgb.reshape(-1, 3)}
    assert colours == {INTERIOR, EXTERIOR, ORBIT_MARK}


@pytest.mark.parametrize("size", [128, 200])
def test_threefold_symmetry(size):
    vp = Viewport(0j, 1.6, size, size, max_iter=300)
    mask = interior_mask(CUBIC_CENTER, 3, vp)
    assert mask.any() and not mask.all()
    assert rotation_mismatch(mask, vp, 2 * math.pi / 3).sum() == 0
    # a rotation that is not a symmetry must be caught
    assert rotation_mismatch(mask, vp, math.pi / 2).sum() > 50


def test_disk_is_symmetric_under_any_rotation():
    vp = Viewport(0j, 2.0, 150, 150)
    mask = interior_mask(0, 2, vp)
    for angle in (0.3, 1.0, math.pi):
        assert rotation_mismatch(mask, vp, angle).sum() == 0
