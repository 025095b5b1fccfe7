"""SLIC superpixel generation.

Localized k-means over joint CIELAB + spatial coordinates: grid-seeded
centers nudged to the lowest-gradient pixel of their 3x3 neighbourhood,
windowed assignment with the size-normalized distance, center updates until
the summed center displacement drops below a threshold, then connectivity
enforcement and dense relabeling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import LabImage, RasterImage, SuperpixelMap
from ..errors import ParameterError
from ._backend import BACKEND, assign_step, get_kernels

__all__ = [
    "BACKEND", "ClusterCenter", "SlicParams", "rgb_to_lab", "init_centers",
    "distance", "segment", "enforce_connectivity", "label_tint_image",
    "boundary_overlay", "get_kernels",
]

# sRGB (D65, 2 degree observer) -> XYZ
_RGB_TO_XYZ = np.array([
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
])
_WHITE = np.array([0.95047, 1.0, 1.08883])


@dataclass(frozen=True)
class ClusterCenter:
    """One SLIC cluster center in joint CIELAB + pixel-coordinate space."""
    l: float
    a: float
    b: float
    x: float
    y: float


@dataclass(frozen=True)
class SlicParams:
    k: int
    m: float = 10.0
    max_iters: int = 10
    residual_threshold: float = 1.0

    def __post_init__(self):
        if self.k < 1:
            raise ParameterError(f"k must be >= 1, got {self.k}")
        if not 1.0 <= self.m <= 40.0:
            raise ParameterError(f"compactness m must be in [1, 40], got {self.m}")
        if self.max_iters < 1:
            raise ParameterError("max_iters must be >= 1")
        if self.residual_threshold < 0:
            raise ParameterError("residual_threshold must be >= 0")


def rgb_to_lab(img: RasterImage) -> LabImage:
    """Per-pixel sRGB -> XYZ (D65) -> CIELAB conversion."""
    srgb = img.data.astype(np.float64) / 255.0
    linear = np.where(srgb > 0.04045, ((srgb + 0.055) / 1.055) ** 2.4, srgb / 12.92)
    xyz = linear @ _RGB_TO_XYZ.T
    t = xyz / _WHITE
    delta = 6.0 / 29.0
    f = np.where(t > delta ** 3, np.cbrt(t), t / (3 * delta * delta) + 4.0 / 29.0)
    lab = np.empty_like(xyz)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return LabImage(lab)


def _grid_shape(k: int, width: int, height: int) -> tuple[int, int]:
    gx = max(1, math.ceil(math.sqrt(k * width / height)))
    gy = math.ceil(k / gx)
    return gx, gy


def _gradient(lab: np.ndarray, x: int, y: int) -> float:
    gx = lab[y, x + 1] - lab[y, x - 1]
    gy = lab[y + 1, x] - lab[y - 1, x]
    return float(np.dot(gx, gx) + np.dot(gy, gy))


def init_centers(lab: LabImage, k: int) -> list[ClusterCenter]:
    """Grid-interval seeding, then move each seed to the lowest-gradient pixel
    of its 3x3 neighbourhood (border pixels excluded; ties keep the seed)."""
    h, w = lab.height, lab.width
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    if k > w * h:
        raise ParameterError(f"k={k} exceeds pixel count {w * h}")
    gx, gy = _grid_shape(k, w, h)
    arr = lab.data
    centers = []
    for j in range(gy):
        for i in range(gx):
            if len(centers) == k:
                break
            px = min(w - 1, int((i + 0.5) * w / gx))
            py = min(h - 1, int((j + 0.5) * h / gy))
            bx, by = px, py
            interior = 1 <= px <= w - 2 and 1 <= py <= h - 2
            best_g = _gradient(arr, px, py) if interior else math.inf
            for ny in (py - 1, py, py + 1):
                for nx in (px - 1, px, px + 1):
                    if (nx, ny) == (px, py):
                        continue
                    if 1 <= nx <= w - 2 and 1 <= ny <= h - 2:
                        g = _gradient(arr, nx, ny)
                        if g < best_g:
                            best_g, bx, by = g, nx, ny
            l, a, b = arr[by, bx]
            centers.append(ClusterCenter(float(l), float(a), float(b),
                                         float(bx), float(by)))
    return centers


def distance(c: ClusterCenter, p: tuple[float, float, float, float, float],
             S: float, m: float) -> float:
    """Size-normalized SLIC distance D' = sqrt(d_c^2 + (d_s/S)^2 * m^2)."""
    pl, pa, pb, px, py = p
    dc2 = (pl - c.l) ** 2 + (pa - c.a) ** 2 + (pb - c.b) ** 2
    ds2 = (px - c.x) ** 2 + (py - c.y) ** 2
    return math.sqrt(dc2 + ds2 / (S * S) * m * m)


def _windows(centers: np.ndarray, S: float, w: int, h: int) -> np.ndarray:
    win = np.empty((centers.shape[0], 4), dtype=np.int64)
    for i in range(centers.shape[0]):
        cx, cy = centers[i, 3], centers[i, 4]
        win[i, 0] = max(0, int(math.floor(cx - S)))
        win[i, 1] = min(w, int(math.floor(cx + S)) + 1)
        win[i, 2] = max(0, int(math.floor(cy - S)))
        win[i, 3] = min(h, int(math.floor(cy + S)) + 1)
    return win


def segment(img: RasterImage, params: SlicParams) -> SuperpixelMap:
    """Full SLIC pipeline; the resulting map has ns <= params.k superpixels."""
    h, w = img.height, img.width
    n = h * w
    if params.k > n:
        raise ParameterError(f"k={params.k} exceeds pixel count {n}")
    lab = rgb_to_lab(img)
    lab_arr = lab.data.copy()  # writable copy; the kernel takes a typed view
    S = math.sqrt(n / params.k)
    inv = (params.m * params.m) / (S * S)

    centers = np.array(
        [[c.l, c.a, c.b, c.x, c.y] for c in init_centers(lab, params.k)],
        dtype=np.float64,
    )
    k = centers.shape[0]
    xs = np.tile(np.arange(w, dtype=np.float64), h)
    ys = np.repeat(np.arange(h, dtype=np.float64), w)
    labels = np.empty((h, w), dtype=np.int32)

    for _ in range(params.max_iters):
        labels.fill(-1)
        dist2 = np.full((h, w), np.inf)
        assign_step(lab_arr, centers, _windows(centers, S, w, h), inv, labels, dist2)

        flat = labels.ravel()
        assigned = flat >= 0
        idx = flat[assigned]
        counts = np.bincount(idx, minlength=k).astype(np.float64)
        new_centers = centers.copy()
        nz = counts > 0
        for col, values in enumerate((lab_arr[..., 0].ravel(), lab_arr[..., 1].ravel(),
                                      lab_arr[..., 2].ravel(), xs, ys)):
            sums = np.bincount(idx, weights=values[assigned], minlength=k)
            new_centers[nz, col] = sums[nz] / counts[nz]
        disp = np.sqrt((new_centers[:, 3] - centers[:, 3]) ** 2
                       + (new_centers[:, 4] - centers[:, 4]) ** 2)
        centers = new_centers
        if float(disp.sum()) <= params.residual_threshold:
            break

    return enforce_connectivity(labels, params.k)


def enforce_connectivity(labels: np.ndarray, k: int) -> SuperpixelMap:
    """Merge small or duplicate components, then relabel densely.

    A 4-connected component is kept iff it is the largest component of its
    provisional label (ties to scan order) and holds at least (N/k)/4 pixels;
    every other component (including unassigned label -1 regions) adopts the
    final label of the most recently scanned adjacent resolved pixel.
    """
    labels = np.asarray(labels)
    h, w = labels.shape
    n = h * w
    min_size = (n / k) / 4.0

    comp_id = np.full((h, w), -1, dtype=np.int32)
    comp_label: list[int] = []
    comp_size: list[int] = []
    comp_pixels: list[list[tuple[int, int]]] = []
    for y in range(h):
        for x in range(w):
            if comp_id[y, x] >= 0:
                continue
            cid = len(comp_label)
            lab = int(labels[y, x])
            stack = [(y, x)]
            comp_id[y, x] = cid
            pixels = [(y, x)]
            while stack:
                cy, cx = stack.pop()
                for ny, nx in ((cy - 1, cx), (cy + 1, cx), (cy, cx - 1), (cy, cx + 1)):
                    if 0 <= ny < h and 0 <= nx < w and comp_id[ny, nx] < 0 \
                            and labels[ny, nx] == lab:
                        comp_id[ny, nx] = cid
                        stack.append((ny, nx))
                        pixels.append((ny, nx))
            comp_label.append(lab)
            comp_size.append(len(pixels))
            comp_pixels.append(pixels)

    # largest component per provisional label (ties to the earlier component)
    largest: dict[int, int] = {}
    for cid, lab in enumerate(comp_label):
        if lab < 0:
            continue
        if lab not in largest or comp_size[cid] > comp_size[largest[lab]]:
            largest[lab] = cid
    kept = [
        comp_label[cid] >= 0 and largest[comp_label[cid]] == cid
        and comp_size[cid] >= min_size
        for cid in range(len(comp_label))
    ]
    if not any(kept):
        kept[int(np.argmax(comp_size))] = True

    final = np.full((h, w), -1, dtype=np.int32)
    next_label = 0
    pending: list[int] = []

    def adopt(cid: int) -> int:
        # final label of the most recently scanned resolved pixel adjacent
        # to this component; -1 if none is resolved yet
        best_order = -1
        best_label = -1
        for (py, px) in comp_pixels[cid]:
            for ny, nx in ((py - 1, px), (py + 1, px), (py, px - 1), (py, px + 1)):
                if 0 <= ny < h and 0 <= nx < w and final[ny, nx] >= 0 \
                        and comp_id[ny, nx] != cid:
                    order = ny * w + nx
                    if order > best_order:
                        best_order = order
                        best_label = int(final[ny, nx])
        return best_label

    for cid in range(len(comp_label)):  # components are indexed in scan order
        if kept[cid]:
            for (py, px) in comp_pixels[cid]:
                final[py, px] = next_label
            next_label += 1
        else:
            target = adopt(cid)
            if target < 0:
                pending.append(cid)
            else:
                for (py, px) in comp_pixels[cid]:
                    final[py, px] = target

    while pending:
        progressed = False
        still = []
        for cid in pending:
            target = adopt(cid)
            if target >= 0:
                for (py, px) in comp_pixels[cid]:
                    final[py, px] = target
                progressed = True
            else:
                still.append(cid)
        pending = still
        if pending and not progressed:  # unreachable unless the whole image merges
            for cid in pending:
                for (py, px) in comp_pixels[cid]:
                    final[py, px] = 0
            break

    return SuperpixelMap(final, next_label)


def label_tint_image(m: SuperpixelMap) -> RasterImage:
    """Debug render: each superpixel tinted by a hash of its label."""
    mixed = (np.arange(m.ns, dtype=np.uint64) * np.uint64(2654435761)) % np.uint64(1 << 24)
    palette = np.stack([(mixed >> np.uint64(s)) & np.uint64(0xFF) for s in (16, 8, 0)],
                       axis=1).astype(np.uint8)
    return RasterImage(palette[m.labels])


def boundary_overlay(img: RasterImage, m: SuperpixelMap,
                     color: tuple[int, int, int] = (255, 0, 0)) -> RasterImage:
    """Debug render: superpixel boundaries drawn over the source image."""
    lab = m.labels
    edge = np.zeros(lab.shape, dtype=bool)
    edge[:, 1:] |= lab[:, 1:] != lab[:, :-1]
    edge[1:, :] |= lab[1:, :] != lab[:-1, :]
    out = img.data.copy()
    out[edge] = color
    return RasterImage(out)
