# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled assignment kernel.

Mirrors _numpy_kernel.assign_step exactly: same expression grouping and the
same <= tie rule, so label maps are bit-identical across backends.
"""

import numpy as np
cimport numpy as cnp

BACKEND = "cython"


def assign_step(cnp.float64_t[:, :, ::1] lab, cnp.float64_t[:, ::1] centers,
                cnp.int64_t[:, ::1] windows, double inv,
                cnp.int32_t[:, ::1] labels, cnp.float64_t[:, ::1] dist2):
    cdef Py_ssize_t k = centers.shape[0]
    cdef Py_ssize_t ci, x, y
    cdef Py_ssize_t x0, x1, y0, y1
    cdef double cl, ca, cb, cx, cy
    cdef double dl, da, db, dx, dy, dc2, ds2, val

    for ci in range(k):
        x0 = windows[ci, 0]
        x1 = windows[ci, 1]
        y0 = windows[ci, 2]
        y1 = windows[ci, 3]
        if x0 >= x1 or y0 >= y1:
            continue
        cl = centers[ci, 0]
        ca = centers[ci, 1]
        cb = centers[ci, 2]
        cx = centers[ci, 3]
        cy = centers[ci, 4]
        for y in range(y0, y1):
            dy = (<double> y) - cy
            for x in range(x0, x1):
                dl = lab[y, x, 0] - cl
                da = lab[y, x, 1] - ca
                db = lab[y, x, 2] - cb
                dx = (<double> x) - cx
                dc2 = (dl * dl + da * da) + db * db
                ds2 = dx * dx + dy * dy
                val = dc2 + ds2 * inv
                if val <= dist2[y, x]:
                    labels[y, x] = ci
                    dist2[y, x] = val
