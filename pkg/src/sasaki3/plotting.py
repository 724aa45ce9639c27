"""Dependency-free output of grid fields: binary PPM heatmaps and gnuplot tables."""
from __future__ import annotations

import numpy as np

# blue -> white -> red
_STOPS = np.array([[0.23, 0.30, 0.75], [0.87, 0.87, 0.87], [0.71, 0.02, 0.15]])


def colormap(t: np.ndarray) -> np.ndarray:
    """Map values in [0, 1] to RGB bytes."""
    t = np.clip(np.asarray(t, dtype=float), 0, 1) * 2
    lo = np.minimum(t.astype(int), 1)
    w = (t - lo)[..., None]
    rgb = (1 - w) * _STOPS[lo] + w * _STOPS[lo + 1]
    return np.round(255 * rgb).astype(np.uint8)


def write_ppm(path, grid, scale: int = 1) -> None:
    """Heatmap with u to the right and v upward, one pixel (times ``scale``) per node."""
    vals = grid.values
    lo, hi = vals.min(), vals.max()
    t = (vals - lo) / (hi - lo) if hi > lo else np.full(vals.shape, 0.5)
    img = colormap(t.T[::-1])  # rows are v, top row is vmax
    if scale > 1:
        img = img.repeat(scale, axis=0).repeat(scale, axis=1)
    h, w = img.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_ppm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    magic, w, h, maxval, rest = data.split(maxsplit=4)
    if magic != b"P6" or int(maxval) != 255:
        raise ValueError("not an 8-bit binary PPM")
    return np.frombuffer(rest, dtype=np.uint8).reshape(int(h), int(w), 3)


def write_table(path, grid) -> None:
    """``u v value`` lines, blank line between u-rows (gnuplot ``splot ... with pm3d``)."""
    with open(path, "w") as fh:
        fh.write("# u v value\n")
        for i, u in enumerate(grid.u):
            for j, v in enumerate(grid.v):
                fh.write(f"{float(u)!r} {float(v)!r} {float(grid.values[i, j])!r}\n")
            fh.write("\n")
