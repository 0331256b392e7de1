"""Texture matrix construction on discretized volumes.

All neighborhood machinery is 3D: 13 unique unit directions at Chebyshev
distance 1 for co-occurrence and runs, the full 26-neighborhood for
zones, tone differences, and dependence counts.
"""
from __future__ import annotations

import numpy as np
from scipy import ndimage

from ..preprocess import DiscretizedVolume

DIRECTIONS_13: tuple[tuple[int, int, int], ...] = tuple(
    (dx, dy, dz)
    for dx in (-1, 0, 1)
    for dy in (-1, 0, 1)
    for dz in (-1, 0, 1)
    if (dx, dy, dz) > (0, 0, 0)
)

OFFSETS_26: tuple[tuple[int, int, int], ...] = tuple(
    (dx, dy, dz)
    for dx in (-1, 0, 1)
    for dy in (-1, 0, 1)
    for dz in (-1, 0, 1)
    if (dx, dy, dz) != (0, 0, 0)
)

_STRUCTURE_26 = np.ones((3, 3, 3), dtype=bool)


def shift_slices(
    dims: tuple[int, int, int], offset: tuple[int, int, int]
) -> tuple[tuple[slice, ...], tuple[slice, ...]]:
    """Slice pair (at_voxel, at_voxel_plus_offset) covering all in-bounds pairs."""
    src = []
    dst = []
    for d, o in zip(dims, offset):
        if o >= 0:
            src.append(slice(0, max(0, d - o)))
            dst.append(slice(min(o, d), d))
        else:
            src.append(slice(min(-o, d), d))
            dst.append(slice(0, max(0, d + o)))
    return tuple(src), tuple(dst)


def glcm_matrices(d: DiscretizedVolume) -> list[np.ndarray]:
    """Symmetrized co-occurrence count matrices, one per direction.

    Directions with no in-mask pair yield an all-zero matrix.
    """
    lv = d.levels
    m = d.mask.flags
    ng = d.ng
    out = []
    for off in DIRECTIONS_13:
        src, dst = shift_slices(d.dims, off)
        valid = m[src] & m[dst]
        a = lv[src][valid] - 1
        b = lv[dst][valid] - 1
        counts = np.bincount(a * ng + b, minlength=ng * ng).reshape(ng, ng)
        out.append((counts + counts.T).astype(np.float64))
    return out


def glrlm_matrices(d: DiscretizedVolume) -> list[np.ndarray]:
    """Run-length count matrices (level x run length), one per direction.

    Runs are maximal collinear stretches of equal level, broken by the
    mask boundary, the volume edge, or a level change.
    """
    lv = d.levels
    m = d.mask.flags
    ng = d.ng
    dims = d.dims
    out = []
    for off in DIRECTIONS_13:
        src, dst = shift_slices(dims, off)
        cont = m[src] & m[dst] & (lv[src] == lv[dst])

        same_prev = np.zeros(dims, dtype=bool)
        same_prev[dst] = cont
        starts = m & ~same_prev
        same_next = np.zeros(dims, dtype=bool)
        same_next[src] = cont
        ends = m & ~same_next

        ts, order_s = _line_sort(starts, off)
        te, _ = _line_sort(ends, off)
        step = off[0] ** 2 + off[1] ** 2 + off[2] ** 2
        lengths = (te - ts) // step + 1

        sx, sy, sz = np.nonzero(starts)
        run_levels = lv[sx[order_s], sy[order_s], sz[order_s]]

        max_len = int(lengths.max())
        counts = np.bincount(
            (run_levels - 1) * max_len + (lengths - 1), minlength=ng * max_len
        ).reshape(ng, max_len)
        out.append(counts.astype(np.float64))
    return out


def _line_sort(where: np.ndarray, off: tuple[int, int, int]):
    """Sort the selected voxels by (line identity, position along the line).

    The cross product of a voxel coordinate with the direction is constant
    along each line, giving a line key; the dot product orders voxels
    within a line.
    """
    x, y, z = (a.astype(np.int64) for a in np.nonzero(where))
    ox, oy, oz = off
    t = x * ox + y * oy + z * oz
    c1 = y * oz - z * oy
    c2 = z * ox - x * oz
    c3 = x * oy - y * ox
    order = np.lexsort((t, c3, c2, c1))
    return t[order], order


def roi_border_distance(mask_flags: np.ndarray) -> np.ndarray:
    """City-block distance from each in-mask voxel to the nearest voxel
    outside the ROI, counting the volume border as outside (minimum 1)."""
    padded = np.pad(mask_flags, 1)
    dist = ndimage.distance_transform_cdt(padded, metric="taxicab")
    return np.asarray(dist)[1:-1, 1:-1, 1:-1].astype(np.int64)


def zone_matrices(d: DiscretizedVolume) -> tuple[np.ndarray, np.ndarray]:
    """(GLSZM, GLDZM): 26-connected equal-level zones tallied by size and
    by minimum border distance."""
    lv = d.levels
    ng = d.ng
    dist = roi_border_distance(d.mask.flags)

    zone_levels: list[int] = []
    zone_sizes: list[np.ndarray] = []
    zone_dists: list[np.ndarray] = []
    for level in range(1, ng + 1):
        present = lv == level
        coords = np.nonzero(present)
        if coords[0].size == 0:
            continue
        # label within the level's bounding box only
        box = tuple(slice(int(c.min()), int(c.max()) + 1) for c in coords)
        labeled, n_zones = ndimage.label(present[box], structure=_STRUCTURE_26)
        sizes = np.bincount(labeled.ravel())[1:]
        mins = ndimage.minimum(dist[box], labels=labeled, index=np.arange(1, n_zones + 1))
        zone_levels.extend([level] * n_zones)
        zone_sizes.append(sizes)
        zone_dists.append(np.atleast_1d(mins).astype(np.int64))

    levels = np.asarray(zone_levels, dtype=np.int64)
    sizes = np.concatenate(zone_sizes)
    dists = np.concatenate(zone_dists)

    max_size = int(sizes.max())
    glszm = np.bincount((levels - 1) * max_size + (sizes - 1), minlength=ng * max_size)
    max_dist = int(dists.max())
    gldzm = np.bincount((levels - 1) * max_dist + (dists - 1), minlength=ng * max_dist)
    return (
        glszm.reshape(ng, max_size).astype(np.float64),
        gldzm.reshape(ng, max_dist).astype(np.float64),
    )


def ngtdm_table(d: DiscretizedVolume) -> tuple[np.ndarray, np.ndarray]:
    """(n_i, s_i) per gray level: counted voxels and summed absolute
    differences from the in-mask 26-neighborhood average.

    Voxels without any in-mask neighbor are excluded from both tallies.
    """
    lv = d.levels
    m = d.mask.flags
    dims = d.dims
    nbr_sum = np.zeros(dims)
    nbr_cnt = np.zeros(dims, dtype=np.int64)
    for off in OFFSETS_26:
        src, dst = shift_slices(dims, off)
        nbr_sum[src] += np.where(m[dst], lv[dst], 0)
        nbr_cnt[src] += m[dst]

    valid = m & (nbr_cnt > 0)
    avg = np.zeros(dims)
    np.divide(nbr_sum, nbr_cnt, out=avg, where=valid)
    diff = np.abs(lv - avg)[valid]
    levels = lv[valid]

    n_i = np.bincount(levels, minlength=d.ng + 1)[1:].astype(np.float64)
    s_i = np.bincount(levels, weights=diff, minlength=d.ng + 1)[1:]
    return n_i, s_i


def ngldm_matrix(d: DiscretizedVolume, alpha: int = 0) -> np.ndarray:
    """Dependence count matrix: rows are levels, column j holds voxels
    with j-1 in-mask neighbors within gray-level tolerance alpha."""
    if alpha < 0:
        raise ValueError(f"alpha must be non-negative, got {alpha}")
    lv = d.levels
    m = d.mask.flags
    dims = d.dims
    dep = np.zeros(dims, dtype=np.int64)
    for off in OFFSETS_26:
        src, dst = shift_slices(dims, off)
        dep[src] += m[src] & m[dst] & (np.abs(lv[src] - lv[dst]) <= alpha)

    levels = lv[m]
    counts = dep[m]
    max_col = int(counts.max()) + 1
    mat = np.bincount((levels - 1) * max_col + counts, minlength=d.ng * max_col)
    return mat.reshape(d.ng, max_col).astype(np.float64)
