"""Pure-Python limit-set DFS kernel.

Mirrors kleinnet._kernel (the Cython build) operation for operation: complex
division is spelled out with the naive real formula in both so the two
backends produce the same floats.  Letters are indexed 0=a, 1=a^-1, 2=b,
3=b^-1; the inverse of letter h is h^1.  Matrices are (m00, m01, m10, m11)
complex tuples, points are homogeneous (u, v) complex pairs, and prefix
matrices are rescaled at every node (the Möbius action is projective) so
entries never overflow at depth.
"""

from __future__ import annotations

BACKEND = "python"

_INF = float("inf")


def _normalized(m00, m01, m10, m11):
    s = max(
        abs(m00.real) + abs(m00.imag),
        abs(m01.real) + abs(m01.imag),
        abs(m10.real) + abs(m10.imag),
        abs(m11.real) + abs(m11.imag),
    )
    return m00 / s, m01 / s, m10 / s, m11 / s


def _emit_candidates(us, vs, eps2, at_floor, out):
    """Classify the candidate set by chart, and append the centroid to `out`
    if its squared diameter beats eps2 (or unconditionally at the depth
    floor).  Returns True when a point was emitted."""
    k = len(us)
    fits0 = []
    fits1 = []
    for i in range(k):
        u, v = us[i], vs[i]
        nu = u.real * u.real + u.imag * u.imag
        nv = v.real * v.real + v.imag * v.imag
        fits0.append(nu <= 4.0 * nv)
        fits1.append(nv <= 4.0 * nu)
    if all(fits0):
        chart = 0
        zs = []
        for i in range(k):
            u, v = us[i], vs[i]
            d = v.real * v.real + v.imag * v.imag
            zs.append(
                complex(
                    (u.real * v.real + u.imag * v.imag) / d,
                    (u.imag * v.real - u.real * v.imag) / d,
                )
            )
    elif all(fits1):
        chart = 1
        zs = []
        for i in range(k):
            u, v = us[i], vs[i]
            d = u.real * u.real + u.imag * u.imag
            zs.append(
                complex(
                    (v.real * u.real + v.imag * u.imag) / d,
                    (v.imag * u.real - v.real * u.imag) / d,
                )
            )
    else:
        chart = -1
        zs = []
    if chart >= 0:
        diam2 = 0.0
        for i in range(k):
            for j in range(i + 1, k):
                dr = zs[i].real - zs[j].real
                di = zs[i].imag - zs[j].imag
                d2 = dr * dr + di * di
                if d2 > diam2:
                    diam2 = d2
        if diam2 < eps2 or at_floor:
            cr = sum(z.real for z in zs) / k
            ci = sum(z.imag for z in zs) / k
            out.append((cr, ci, chart))
            return True
        return False
    if not at_floor:
        return False
    # mixed candidate set at the depth floor: take the majority chart
    n0 = sum(fits0)
    use0 = 2 * n0 >= k
    cr = ci = 0.0
    n = 0
    for i in range(k):
        u, v = us[i], vs[i]
        if use0 and fits0[i]:
            d = v.real * v.real + v.imag * v.imag
            cr += (u.real * v.real + u.imag * v.imag) / d
            ci += (u.imag * v.real - u.real * v.imag) / d
            n += 1
        elif not use0 and fits1[i]:
            d = u.real * u.real + u.imag * u.imag
            cr += (v.real * u.real + v.imag * u.imag) / d
            ci += (v.imag * u.real - v.real * u.imag) / d
            n += 1
    out.append((cr / n, ci / n, 0 if use0 else 1))
    return True


def run_subtree(gens, fixes, epsilon, max_depth, cap, letter):
    """Traverse the subtree of nonbacktracking words starting with `letter`.

    gens: four (m00, m01, m10, m11) complex tuples for a, a^-1, b, b^-1.
    fixes: four homogeneous (u, v) attracting fixed points, one per letter.
    Returns (points, truncated): points are (re, im, chart) triples in DFS
    order, truncated is True when the point cap cut the traversal short.
    """
    eps2 = epsilon * epsilon
    out: list[tuple[float, float, int]] = []
    g = gens[letter]
    root = _normalized(g[0], g[1], g[2], g[3])
    # frame: matrix entries, last letter, depth, next child letter slot
    stack = [(root[0], root[1], root[2], root[3], letter, 1)]
    while stack:
        if len(out) >= cap:
            return out[:cap], True
        m00, m01, m10, m11, last, depth = stack.pop()
        allowed = [h for h in range(4) if h != last ^ 1]
        us = []
        vs = []
        for h in allowed:
            fu, fv = fixes[h]
            us.append(m00 * fu + m01 * fv)
            vs.append(m10 * fu + m11 * fv)
        if _emit_candidates(us, vs, eps2, depth >= max_depth, out):
            continue
        for h in reversed(allowed):
            gh = gens[h]
            c00 = m00 * gh[0] + m01 * gh[2]
            c01 = m00 * gh[1] + m01 * gh[3]
            c10 = m10 * gh[0] + m11 * gh[2]
            c11 = m10 * gh[1] + m11 * gh[3]
            c00, c01, c10, c11 = _normalized(c00, c01, c10, c11)
            stack.append((c00, c01, c10, c11, h, depth + 1))
    return out, False
