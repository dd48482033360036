"""Logarithmic solutions for resonant exponent classes.

When ``m`` simplices give exponents in the same class modulo the kernel
lattice, the ``m`` Gamma-series coincide up to scale. Perturbing
``beta -> beta + eps * gamma`` separates them: seed ``i`` moves to
``v0 + eps * delta_i`` with ``delta_i = A_sigma_i^{-1} gamma`` on its simplex.
Writing ``x^(eps delta) = exp(eps delta . log x)`` turns each perturbed
series into a vector over the Laurent series ``Q((eps))`` indexed by
``(u, alpha)`` (offset and log exponents). The flat limit of their span at
``eps = 0`` is computed by valuation elimination; every limit is
annihilated by the box operators (they do not involve ``eps``) and by the
Euler operators (the defect ``eps * gamma`` vanishes at ``eps = 0``).
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Sequence

from . import linalg
from .gkz import AConfig, lattice_vectors
from .linalg import LatticeBasis

Laurent = dict[int, Fraction]


class PrecisionError(ArithmeticError):
    """The eps-expansion was truncated too early."""


def _mul(x: Laurent, y: Laurent, top: int) -> Laurent:
    out: Laurent = {}
    for i, a in x.items():
        for j, b in y.items():
            if i + j < top:
                out[i + j] = out.get(i + j, 0) + a * b
    return {k: v for k, v in out.items() if v}


def _linear(a: Fraction, b: Fraction) -> Laurent:
    return {k: v for k, v in ((0, a), (1, b)) if v}


def _inv_linear(a: Fraction, b: Fraction, top: int) -> Laurent:
    """``1 / (a + b eps)`` up to ``eps^top`` (exclusive)."""
    if a == 0:
        return {-1: 1 / b}
    out, q = {}, Fraction(1) / a
    for k in range(max(top, 0)):
        out[k] = q
        q *= -b / a
        if not q:
            break
    return out


def _factor(v0j: Fraction, dj: Fraction, uj: int, top: int) -> Laurent:
    """``Gamma(w + 1) / Gamma(w + uj + 1)`` with ``w = v0j + dj eps``."""
    out: Laurent = {0: Fraction(1)}
    if uj < 0:
        for k in range(-uj):
            out = _mul(out, _linear(v0j - k, dj), top)
    else:
        for k in range(1, uj + 1):
            out = _mul(out, _inv_linear(v0j + k, dj, top), top)
    return out


def _log_expansion(delta: Sequence[Fraction], top: int) -> list[tuple[tuple[int, ...], Fraction]]:
    """Terms ``(alpha, c)`` of ``exp(eps delta . l)``: ``c eps^|alpha| l^alpha``."""
    support = [j for j, d in enumerate(delta) if d]
    N = len(delta)
    out = [((0,) * N, Fraction(1))]
    frontier = out[:]
    for deg in range(1, top):
        nxt = {}
        for alpha, _ in frontier:
            last = max((j for j in support if alpha[j]), default=-1)
            for j in support:
                if j < last:
                    continue
                a = alpha[:j] + (alpha[j] + 1,) + alpha[j + 1:]
                nxt[a] = math.prod(Fraction(delta[i]) ** a[i] / math.factorial(a[i]) for i in support)
        frontier = list(nxt.items())
        out.extend(frontier)
    return out


def _generator(v0, delta, offsets, top):
    """The perturbed Gamma-series of one seed as ``{(u, alpha): Laurent}``."""
    cache: dict[tuple[int, int], Laurent | Fraction] = {}

    def factor(j, uj):
        key = (j, uj)
        if key not in cache:
            if delta[j] == 0 and v0[j].denominator == 1:
                # exact 1/Gamma for coordinates that stay integral
                m = int(v0[j]) + uj
                cache[key] = Fraction(0) if m < 0 else Fraction(1, math.factorial(m))
            else:
                cache[key] = _factor(v0[j], delta[j], uj, top)
        return cache[key]

    logs = _log_expansion(delta, top)
    vec: dict = {}
    for u in offsets:
        coeff: Laurent = {0: Fraction(1)}
        for j, uj in enumerate(u):
            f = factor(j, uj)
            if isinstance(f, Fraction):
                if not f:
                    coeff = {}
                    break
                coeff = {k: c * f for k, c in coeff.items()}
            else:
                coeff = _mul(coeff, f, top)
            if not coeff:
                break
        if not coeff:
            continue
        for alpha, c in logs:
            deg = sum(alpha)
            entry = {k + deg: a * c for k, a in coeff.items() if k + deg < top}
            if entry:
                vec[(u, alpha)] = entry
    return vec


def _valuation(vec) -> int | None:
    return min((min(e) for e in vec.values() if e), default=None)


def _shift(vec, s: int):
    return {k: {p - s: c for p, c in e.items()} for k, e in vec.items()}


def _combine(vecs, coeffs, top: int):
    out: dict = {}
    for v, c in zip(vecs, coeffs):
        if not c:
            continue
        for k, e in v.items():
            tgt = out.setdefault(k, {})
            for p, a in e.items():
                if p < top:
                    tgt[p] = tgt.get(p, 0) + c * a
    return {k: {p: a for p, a in e.items() if a} for k, e in out.items() if any(e.values())}


def flat_limit(vecs: list[dict], top: int) -> list[dict]:
    """Limits at ``eps = 0`` spanning the flat limit of ``span(vecs)``.

    Entries are exact for powers of eps below ``top``. Raises
    :class:`PrecisionError` if the reduction needs coefficients beyond that
    (which is also how a dependence over ``Q((eps))`` shows up) and
    ``ValueError`` if an input vector is zero.
    """
    vecs = list(vecs)
    tops = [top] * len(vecs)
    derived = [False] * len(vecs)
    for _ in range(64 * len(vecs) + 64):
        for i, v in enumerate(vecs):
            val = _valuation(v)
            if val is None:
                if derived[i]:
                    # cancelled down to the truncation: need more terms
                    raise PrecisionError("eps-expansion exhausted")
                raise ValueError("generators are dependent")
            if val:
                vecs[i] = _shift(v, val)
                tops[i] -= val
        if min(tops) <= 0:
            raise PrecisionError("eps-expansion exhausted")
        keys = sorted({k for v in vecs for k, e in v.items() if 0 in e})
        m = len(vecs)
        rows = [[v.get(k, {}).get(0, 0) for k in keys] + [int(i == j) for j in range(m)] for i, v in enumerate(vecs)]
        R, pivots = linalg._row_echelon(rows, len(keys))
        if len(pivots) == m:
            return [{k: e[0] for k, e in v.items() if 0 in e} for v in vecs]
        coeffs = R[len(pivots)][len(keys):]
        # replace the generator with the most precision left
        k = max((i for i, c in enumerate(coeffs) if c), key=lambda i: tops[i])
        t = min(tops[i] for i, c in enumerate(coeffs) if c)
        vecs[k] = _combine(vecs, coeffs, t)
        tops[k] = t
        derived[k] = True
    raise PrecisionError("valuation elimination did not terminate")


def gamma_candidates(dim: int, count: int = 12) -> list[tuple[int, ...]]:
    """Deterministic perturbation directions; the first few are hand picked."""
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
    out = [tuple(primes[i % len(primes)] + i // len(primes) for i in range(dim))]
    out.append(tuple((-1) ** i * (i + 1) for i in range(dim)))
    rng = random.Random(20240601)
    while len(out) < count:
        out.append(tuple(rng.randint(-9, 9) for _ in range(dim)))
    return out


def resonant_solutions(
    c: AConfig,
    beta: Sequence[Fraction],
    seeds: Sequence,
    L: LatticeBasis,
    order: int,
):
    """Solutions spanned by the ``m`` seeds of one resonant class.

    Returns ``(series, note)``. ``series`` holds ``m`` :class:`LogSeries`
    when the reduction succeeds for some perturbation direction, otherwise
    the single Gamma-series of the class.
    """
    from .series import LogSeries, gamma_series

    m = len(seeds)

    def spread(s):
        return max(sum(abs(a - b) for a, b in zip(s.exponent, o.exponent)) for o in seeds)

    # seeds of one class differ by kernel vectors; base the class at the most
    # central seed and widen the window so every seed's own terms are covered
    centre = min(seeds, key=lambda s: (spread(s), s.exponent))
    v0 = centre.exponent
    order = order + int(spread(centre))
    offsets = lattice_vectors(L, order)
    dim = c.r + c.n
    for gamma in gamma_candidates(dim):
        deltas = []
        for s in seeds:
            A_sigma = [[c.columns[j][i] for j in s.simplex] for i in range(dim)]
            d_sigma = linalg.matvec(linalg.inverse(A_sigma), gamma)
            delta = [Fraction(0)] * c.N
            for val, j in zip(d_sigma, s.simplex):
                delta[j] = val
            deltas.append(tuple(delta))
        # generic directions move every simplex coordinate of every seed
        if len(set(deltas)) < m or any(d[j] == 0 for s, d in zip(seeds, deltas) for j in s.simplex):
            continue
        top = 2 * m + 2
        while top <= 8 * m + 16:
            try:
                vecs = [_generator(v0, d, offsets, top) for d in deltas]
                limits = flat_limit(vecs, top)
            except PrecisionError:
                top *= 2
                continue
            except ValueError:
                break
            series = [LogSeries(v0, {k: a for k, a in lim.items() if a}, order) for lim in limits]
            logs = max(s.log_degree for s in series)
            note = (
                f"resonant class of {_fmt(v0)}: {m} seeds, solved by deformation "
                f"gamma = {_fmt(gamma)} (log degree {logs})"
            )
            return series, note
    s = gamma_series(v0, L, order, config=c, beta=beta)
    return [s], f"resonant class of {_fmt(v0)}: {m} seeds, logarithmic solutions not found"


def _fmt(v) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"
