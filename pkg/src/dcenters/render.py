"""Escape-time rendering of filled Julia sets to binary PPM."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .dynamics import critical_orbit

MAX_SIDE = 8192
INTERIOR = (0, 0, 0)
EXTERIOR = (255, 255, 255)
ORBIT_MARK = (220, 30, 30)


@dataclass(frozen=True)
class Viewport:
    center: complex = 0j
    half_width: float = 2.0
    width: int = 512
    height: int = 512
    max_iter: int = 256
    escape_radius: float = 4.0

    def __post_init__(self) -> None:
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        if not (0 < self.width <= MAX_SIDE and 0 < self.height <= MAX_SIDE):
            raise ValueError(f"pixel dimensions must be in 1..{MAX_SIDE}")
        if self.max_iter < 1 or self.escape_radius <= 0:
            raise ValueError("max_iter and escape_radius must be positive")

    @property
    def pixel_size(self) -> float:
        return 2.0 * self.half_width / self.width

    def grid(self) -> np.ndarray:
        """Complex coordinate of every pixel center, row 0 at the top."""
        s = self.pixel_size
        xs = self.center.real + (np.arange(self.width) + 0.5 - self.width / 2) * s
        ys = self.center.imag - (np.arange(self.height) + 0.5 - self.height / 2) * s
        return xs[None, :] + 1j * ys[:, None]

    def to_pixel(self, z: complex) -> Optional[tuple[int, int]]:
        s = self.pixel_size
        col = int(np.floor((z.real - self.center.real) / s + self.width / 2))
        row = int(np.floor(-(z.imag - self.center.imag) / s + self.height / 2))
        if 0 <= col < self.width and 0 <= row < self.height:
            return row, col
        return None


def interior_mask(c: complex, d: int, vp: Viewport) -> np.ndarray:
    """True where the orbit stays within the escape radius for max_iter steps."""
    if vp.escape_radius < 2.0 ** (1.0 / (d - 1)):
        raise ValueError("escape radius too small for this degree")
    z = vp.grid()
    alive = np.ones(z.shape, dtype=bool)
    r2 = vp.escape_radius**2
    for _ in range(vp.max_iter):
        za = z[alive]
        za = za**d + c
        z[alive] = za
        out = (za.real * za.real + za.imag * za.imag) > r2
        if out.any():
            idx = np.flatnonzero(alive)
            alive.flat[idx[out]] = False
        if not alive.any():
            break
    return alive


def encode_ppm(rgb: np.ndarray) -> bytes:
    h, w, _ = rgb.shape
    return f"P6\n{w} {h}\n255\n".encode("ascii") + rgb.astype(np.uint8).tobytes()


def decode_ppm(data: bytes) -> np.ndarray:
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6" or parts[2] != b"255":
        raise ValueError("not a binary PPM with maxval 255")
    w, h = (int(x) for x in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w, 3)


def render_julia(
    c: complex,
    d: int,
    vp: Viewport,
    out_path,
    orbit_n: Optional[int] = None,
) -> np.ndarray:
    """Write the interior mask as a P6 image; returns the mask.

    ``orbit_n`` overlays the first ``orbit_n`` points of the critical orbit.
    """
    mask = interior_mask(c, d, vp)
    rgb = np.empty(mask.shape + (3,), dtype=np.uint8)
    rgb[mask] = INTERIOR
    rgb[~mask] = EXTERIOR
    if orbit_n:
        pts, _ = critical_orbit(c, d, orbit_n)
        for z in [0j] + pts:
            px = vp.to_pixel(complex(z))
            if px is None:
                continue
            r, col = px
            rgb[max(r - 1, 0) : r + 2, max(col - 1, 0) : col + 2] = ORBIT_MARK
    Path(out_path).write_bytes(encode_ppm(rgb))
    return mask


def mask_from_ppm(data: bytes) -> np.ndarray:
    rgb = decode_ppm(data)
    return np.all(rgb == np.array(INTERIOR, dtype=np.uint8), axis=-1)


def _window_extrema(mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # per-pixel (all, any) over the 3x3 neighbourhood
    padded = np.pad(mask, 1, mode="edge")
    lo = np.ones_like(mask)
    hi = np.zeros_like(mask)
    for dr in (0, 1, 2):
        for dc in (0, 1, 2):
            win = padded[dr : dr + mask.shape[0], dc : dc + mask.shape[1]]
            lo &= win
            hi |= win
    return lo, hi


def rotation_mismatch(mask: np.ndarray, vp: Viewport, angle: float) -> np.ndarray:
    """Pixels whose class is contradicted by the rotated image beyond 1-pixel jitter.

    A pixel is tolerated when it sits on the mask boundary itself or when
    some pixel within one pixel of its rotated position shares its class.
    """
    z = vp.grid() * np.exp(1j * angle)
    s = vp.pixel_size
    cols = np.floor((z.real - vp.center.real) / s + vp.width / 2).astype(int)
    rows = np.floor(-(z.imag - vp.center.imag) / s + vp.height / 2).astype(int)
    inside = (cols >= 0) & (cols < vp.width) & (rows >= 0) & (rows < vp.height)
    lo, hi = _window_extrema(mask)
    r, c = rows[inside], cols[inside]
    out = np.zeros_like(mask)
    m = mask[inside]
    out[inside] = np.where(m, ~hi[r, c], lo[r, c])
    return out & (lo == hi)
