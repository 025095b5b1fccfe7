"""Pure-numpy assignment kernel, fallback when the compiled extension is absent.

Must stay operation-for-operation identical to the Cython kernel: same
expression grouping, same strict/non-strict comparisons, same center order,
so both backends produce bit-identical label maps.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def assign_step(lab: np.ndarray, centers: np.ndarray, windows: np.ndarray,
                inv: float, labels: np.ndarray, dist2: np.ndarray) -> None:
    """One assignment sweep: per center, claim window pixels with D'^2 <= best.

    lab: (h, w, 3) float64; centers: (k, 5) float64 rows [l, a, b, x, y];
    windows: (k, 4) int64 rows [x0, x1, y0, y1] (half-open);
    labels: (h, w) int32 preset to -1; dist2: (h, w) float64 preset to +inf.
    Ties go to the highest center index (<= update, centers in order).
    """
    k = centers.shape[0]
    for ci in range(k):
        x0, x1, y0, y1 = windows[ci]
        if x0 >= x1 or y0 >= y1:
            continue
        sub = lab[y0:y1, x0:x1]
        dl = sub[:, :, 0] - centers[ci, 0]
        da = sub[:, :, 1] - centers[ci, 1]
        db = sub[:, :, 2] - centers[ci, 2]
        dx = np.arange(x0, x1, dtype=np.float64) - centers[ci, 3]
        dy = np.arange(y0, y1, dtype=np.float64)[:, None] - centers[ci, 4]
        dc2 = (dl * dl + da * da) + db * db
        ds2 = dx * dx + dy * dy
        val = dc2 + ds2 * inv
        region = dist2[y0:y1, x0:x1]
        better = val <= region
        labels[y0:y1, x0:x1][better] = ci
        region[better] = val[better]
