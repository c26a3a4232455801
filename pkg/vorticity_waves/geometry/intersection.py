"""
Self-approach and self-intersection of a periodic surface curve

The curve is one period of (x(alpha), y(alpha)) with x(alpha + 2pi) = x(alpha) + 2pi.
Pairs are only compared when they are separated by more than a guard band of
arclength, measured along the curve and across the neighbouring periods.
"""
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

logger = logging.getLogger(__name__)

EPSILON = 1e-14
CHUNK = 256


@dataclass
class GapResult:
    """Closest approach of non-adjacent surface points"""
    gap: float
    pair: Tuple[float, float]
    crosses: bool
    bubble_area: Optional[float] = None
    crossing_point: Optional[Tuple[float, float]] = None


def _orientation(px, py, qx, qy, rx, ry) -> np.ndarray:
    """Signed area of the triplets (p, q, r): > 0 counterclockwise, < 0 clockwise"""
    return (qx - px) * (ry - py) - (qy - py) * (rx - px)


def _intersection_point(p1: np.ndarray, q1: np.ndarray, p2: np.ndarray, q2: np.ndarray) -> Tuple[float, float]:
    d1 = q1 - p1
    d2 = q2 - p2
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(denom) < EPSILON:
        return float("nan"), float("nan")
    t = ((p2[0] - p1[0]) * d2[1] - (p2[1] - p1[1]) * d2[0]) / denom
    point = p1 + t * d1
    return float(point[0]), float(point[1])


def shoelace_area(xs: np.ndarray, ys: np.ndarray) -> float:
    """Area enclosed by a closed polygon"""
    return 0.5 * abs(float(np.dot(xs, np.roll(ys, -1)) - np.dot(ys, np.roll(xs, -1))))


def _extended(alphas, xs, ys, arclength, period_length):
    """Three consecutive periods of the polyline, ordered by parameter"""
    two_pi = 2.0 * np.pi
    ext_alpha = np.concatenate([alphas - two_pi, alphas, alphas + two_pi])
    ext_x = np.concatenate([xs - two_pi, xs, xs + two_pi])
    ext_y = np.concatenate([ys, ys, ys])
    ext_s = np.concatenate([arclength - period_length, arclength, arclength + period_length])
    return ext_alpha, ext_x, ext_y, ext_s


def cumulative_arclength(speeds: np.ndarray) -> Tuple[np.ndarray, float]:
    """Arclength at the nodes from samples of |z_alpha| on a periodic grid"""
    M = speeds.size
    step = 2.0 * np.pi / M
    segment = 0.5 * (speeds + np.roll(speeds, -1)) * step
    arclength = np.concatenate([[0.0], np.cumsum(segment[:-1])])
    return arclength, float(np.sum(segment))


def find_crossings(alphas: np.ndarray, xs: np.ndarray, ys: np.ndarray, speeds: np.ndarray,
                   guard_band: float) -> List[Tuple[int, int, Tuple[float, float]]]:
    """
    Proper crossings between segments of the middle period and segments of the
    extended polyline that are more than ``guard_band`` of arclength apart.

    Returns:
        List of (first segment, second segment, crossing point) with segment
        indices into the extended polyline and first < second
    """
    M = alphas.size
    arclength, length = cumulative_arclength(speeds)
    _, ex, ey, es = _extended(alphas, xs, ys, arclength, length)

    # segment k joins extended points k and k + 1
    ax, ay, bx, by = ex[:-1], ey[:-1], ex[1:], ey[1:]
    smid = 0.5 * (es[:-1] + es[1:])
    crossings = []
    middle = np.arange(M, 2 * M)
    for start in range(0, M, CHUNK):
        rows = middle[start:start + CHUNK]
        p1x, p1y = ax[rows, None], ay[rows, None]
        q1x, q1y = bx[rows, None], by[rows, None]
        o1 = _orientation(p1x, p1y, q1x, q1y, ax[None, :], ay[None, :])
        o2 = _orientation(p1x, p1y, q1x, q1y, bx[None, :], by[None, :])
        o3 = _orientation(ax[None, :], ay[None, :], bx[None, :], by[None, :], p1x, p1y)
        o4 = _orientation(ax[None, :], ay[None, :], bx[None, :], by[None, :], q1x, q1y)
        proper = (o1 * o2 < 0.0) & (o3 * o4 < 0.0)
        proper &= np.abs(smid[rows, None] - smid[None, :]) > guard_band
        for i, j in zip(*np.nonzero(proper)):
            first, second = sorted((int(rows[i]), int(j)))
            point = _intersection_point(
                np.array([ax[first], ay[first]]), np.array([bx[first], by[first]]),
                np.array([ax[second], ay[second]]), np.array([bx[second], by[second]]),
            )
            crossings.append((first, second, point))
    return crossings


def loop_area(alphas: np.ndarray, xs: np.ndarray, ys: np.ndarray, first: int, second: int,
              point: Tuple[float, float]) -> float:
    """Area of the loop closed by the crossing of two extended segments"""
    M = alphas.size
    arclength = np.zeros(M)
    _, ex, ey, _ = _extended(alphas, xs, ys, arclength, 0.0)
    loop_x = np.concatenate([[point[0]], ex[first + 1:second + 1]])
    loop_y = np.concatenate([[point[1]], ey[first + 1:second + 1]])
    return shoelace_area(loop_x, loop_y)


def closest_pair(alphas: np.ndarray, xs: np.ndarray, ys: np.ndarray, speeds: np.ndarray,
                 guard_band: float) -> Tuple[float, int, int]:
    """
    Grid minimum of the distance between middle-period samples and extended
    samples separated by more than the guard band of arclength.

    Returns:
        (distance, middle index, extended index)
    """
    M = alphas.size
    arclength, length = cumulative_arclength(speeds)
    _, ex, ey, es = _extended(alphas, xs, ys, arclength, length)
    best = (np.inf, -1, -1)
    for start in range(0, M, CHUNK):
        rows = np.arange(start, min(start + CHUNK, M))
        dx = xs[rows, None] - ex[None, :]
        dy = ys[rows, None] - ey[None, :]
        dist = np.hypot(dx, dy)
        dist[np.abs(arclength[rows, None] - es[None, :]) <= guard_band] = np.inf
        flat = int(np.argmin(dist))
        i, j = divmod(flat, dist.shape[1])
        if dist[i, j] < best[0]:
            best = (float(dist[i, j]), int(rows[i]), int(j))
    return best


def self_gap(
    alphas: np.ndarray,
    xs: np.ndarray,
    ys: np.ndarray,
    speeds: np.ndarray,
    guard_band: float = 0.5,
    point: Optional[Callable[[float], Tuple[float, float]]] = None,
) -> GapResult:
    """
    Minimum distance between non-adjacent surface points, with crossing and
    bubble detection

    Args:
        alphas: Parameter nodes of one period
        xs, ys: Profile samples
        speeds: |z_alpha| samples, used for arclength
        guard_band: Arclength below which pairs count as adjacent
        point: Exact evaluation alpha -> (x, y) used to refine the grid minimum

    Returns:
        GapResult
    """
    M = alphas.size
    two_pi = 2.0 * np.pi
    crossings = find_crossings(alphas, xs, ys, speeds, guard_band)
    if crossings:
        first, second, where = min(crossings, key=lambda c: c[1] - c[0])
        area = loop_area(alphas, xs, ys, first, second, where)
        ext_alpha = np.concatenate([alphas - two_pi, alphas, alphas + two_pi])
        logger.debug(f"Surface crosses itself near alpha={ext_alpha[first]:.6f}/{ext_alpha[second]:.6f}")
        return GapResult(
            gap=0.0,
            pair=(float(ext_alpha[first]), float(ext_alpha[second])),
            crosses=True,
            bubble_area=area,
            crossing_point=where,
        )

    distance, i, j = closest_pair(alphas, xs, ys, speeds, guard_band)
    period_shift, k = divmod(j, M)
    alpha_i = float(alphas[i])
    alpha_j = float(alphas[k] + (period_shift - 1) * two_pi)
    if point is not None and np.isfinite(distance):
        step = two_pi / M
        arclength, length = cumulative_arclength(speeds)
        ext_alpha, _, _, ext_s = _extended(alphas, xs, ys, arclength, length)

        def objective(pair: np.ndarray) -> float:
            x1, y1 = point(pair[0])
            x2, y2 = point(pair[1])
            return float(np.hypot(x1 - x2, y1 - y2))

        result = minimize(
            objective,
            x0=np.array([alpha_i, alpha_j]),
            method="L-BFGS-B",
            bounds=[(alpha_i - step, alpha_i + step), (alpha_j - step, alpha_j + step)],
        )
        separation = abs(np.interp(result.x[0], ext_alpha, ext_s) - np.interp(result.x[1], ext_alpha, ext_s))
        if result.fun < distance and separation > guard_band:
            distance = float(result.fun)
            alpha_i, alpha_j = float(result.x[0]), float(result.x[1])

    return GapResult(gap=float(distance), pair=(alpha_i, alpha_j), crosses=False)
