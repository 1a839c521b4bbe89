# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython limit-set DFS kernel.

Operation-for-operation mirror of kleinnet._kernel_py (same naive complex
division, same normalization, same traversal order) so both backends emit
the same floats.  See the fallback module for the algorithm notes.
"""

from libc.math cimport fabs

BACKEND = "cython"


cdef inline double _mag1(double complex z):
    return fabs(z.real) + fabs(z.imag)


cdef class _Walker:
    cdef double complex G[4][4]
    cdef double complex fu[4]
    cdef double complex fv[4]
    cdef double eps2
    cdef int max_depth
    cdef Py_ssize_t cap
    cdef list out
    cdef bint truncated

    cdef int walk(self, double complex m00, double complex m01,
                  double complex m10, double complex m11,
                  int last, int depth) except -1:
        cdef int allowed[3]
        cdef double complex us[3]
        cdef double complex vs[3]
        cdef double zr[3]
        cdef double zi[3]
        cdef bint fits0[3]
        cdef bint fits1[3]
        cdef int k = 0, i, j, h, n, n0
        cdef bint all0, all1, use0
        cdef double nu, nv, d, dr, di, d2, diam2, cr, ci
        cdef double complex fu, fv, c00, c01, c10, c11
        cdef double s

        if <Py_ssize_t>len(self.out) >= self.cap:
            self.truncated = True
            return 0

        for h in range(4):
            if h != (last ^ 1):
                allowed[k] = h
                k += 1

        all0 = True
        all1 = True
        for i in range(k):
            h = allowed[i]
            fu = self.fu[h]
            fv = self.fv[h]
            us[i] = m00 * fu + m01 * fv
            vs[i] = m10 * fu + m11 * fv
            nu = us[i].real * us[i].real + us[i].imag * us[i].imag
            nv = vs[i].real * vs[i].real + vs[i].imag * vs[i].imag
            fits0[i] = nu <= 4.0 * nv
            fits1[i] = nv <= 4.0 * nu
            if not fits0[i]:
                all0 = False
            if not fits1[i]:
                all1 = False

        if all0 or all1:
            for i in range(k):
                if all0:
                    d = vs[i].real * vs[i].real + vs[i].imag * vs[i].imag
                    zr[i] = (us[i].real * vs[i].real + us[i].imag * vs[i].imag) / d
                    zi[i] = (us[i].imag * vs[i].real - us[i].real * vs[i].imag) / d
                else:
                    d = us[i].real * us[i].real + us[i].imag * us[i].imag
                    zr[i] = (vs[i].real * us[i].real + vs[i].imag * us[i].imag) / d
                    zi[i] = (vs[i].imag * us[i].real - vs[i].real * us[i].imag) / d
            diam2 = 0.0
            for i in range(k):
                for j in range(i + 1, k):
                    dr = zr[i] - zr[j]
                    di = zi[i] - zi[j]
                    d2 = dr * dr + di * di
                    if d2 > diam2:
                        diam2 = d2
            if diam2 < self.eps2 or depth >= self.max_depth:
                cr = 0.0
                ci = 0.0
                for i in range(k):
                    cr += zr[i]
                    ci += zi[i]
                self.out.append((cr / k, ci / k, 0 if all0 else 1))
                return 0
        elif depth >= self.max_depth:
            # mixed candidate set at the depth floor: majority chart
            n0 = 0
            for i in range(k):
                if fits0[i]:
                    n0 += 1
            use0 = 2 * n0 >= k
            cr = 0.0
            ci = 0.0
            n = 0
            for i in range(k):
                if use0 and fits0[i]:
                    d = vs[i].real * vs[i].real + vs[i].imag * vs[i].imag
                    cr += (us[i].real * vs[i].real + us[i].imag * vs[i].imag) / d
                    ci += (us[i].imag * vs[i].real - us[i].real * vs[i].imag) / d
                    n += 1
                elif (not use0) and fits1[i]:
                    d = us[i].real * us[i].real + us[i].imag * us[i].imag
                    cr += (vs[i].real * us[i].real + vs[i].imag * us[i].imag) / d
                    ci += (vs[i].imag * us[i].real - vs[i].real * us[i].imag) / d
                    n += 1
            self.out.append((cr / n, ci / n, 0 if use0 else 1))
            return 0

        for i in range(k):
            h = allowed[i]
            c00 = m00 * self.G[h][0] + m01 * self.G[h][2]
            c01 = m00 * self.G[h][1] + m01 * self.G[h][3]
            c10 = m10 * self.G[h][0] + m11 * self.G[h][2]
            c11 = m10 * self.G[h][1] + m11 * self.G[h][3]
            s = _mag1(c00)
            d = _mag1(c01)
            if d > s:
                s = d
            d = _mag1(c10)
            if d > s:
                s = d
            d = _mag1(c11)
            if d > s:
                s = d
            self.walk(c00 / s, c01 / s, c10 / s, c11 / s, h, depth + 1)
            if self.truncated:
                return 0
        return 0


def run_subtree(gens, fixes, double epsilon, int max_depth, cap, int letter):
    """Same contract as kleinnet._kernel_py.run_subtree."""
    cdef _Walker w = _Walker()
    cdef int h, e
    cdef double complex m00, m01, m10, m11
    cdef double s, d
    for h in range(4):
        for e in range(4):
            w.G[h][e] = gens[h][e]
        w.fu[h] = fixes[h][0]
        w.fv[h] = fixes[h][1]
    w.eps2 = epsilon * epsilon
    w.max_depth = max_depth
    w.cap = cap
    w.out = []
    w.truncated = False

    m00 = w.G[letter][0]
    m01 = w.G[letter][1]
    m10 = w.G[letter][2]
    m11 = w.G[letter][3]
    s = _mag1(m00)
    d = _mag1(m01)
    if d > s:
        s = d
    d = _mag1(m10)
    if d > s:
        s = d
    d = _mag1(m11)
    if d > s:
        s = d
    w.walk(m00 / s, m01 / s, m10 / s, m11 / s, letter, 1)
    if w.truncated:
        return w.out[: w.cap], True
    return w.out, False
