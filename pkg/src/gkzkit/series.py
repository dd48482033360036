"""Truncated Gamma-series solutions with exact rational coefficients.

A Gamma-series with exponent ``v`` (``A v = beta``) is

    sum over u in L of  prod_j x_j^(v_j + u_j) / Gamma(v_j + u_j + 1)

with ``L`` the kernel lattice of ``A``. Coefficients are stored relative to
the ``u = 0`` term, so they are ratios of Pochhammer products and hence
rational. Truncation keeps offsets with ``|u|_1 <= order``.

When several simplices of a triangulation produce exponents in the same
class modulo ``L`` (resonance), :func:`gamma_family` completes the family
with logarithmic solutions, see :mod:`gkzkit.deform`.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from . import linalg, polytope
from .gkz import AConfig, BoxOperator, EulerOperator, GkzSystem, gkz_system, lattice_vectors
from .linalg import LatticeBasis
from .polytope import Triangulation

Offset = tuple[int, ...]
LogMono = tuple[int, ...]
RatVector = tuple[Fraction, ...]

NEGATIVE_SUPPORT = "negative-support"
GAMMA = "gamma"


class SeedingError(ValueError):
    """An exponent does not satisfy ``A v = beta`` or a simplex is singular."""


def l1(u: Sequence[int]) -> int:
    return sum(abs(x) for x in u)


def _offset_key(u):
    return (l1(u), u)


@dataclass
class FormalSeries:
    """``sum_u terms[u] * x^(base + u)``; only nonzero coefficients are stored.

    Every offset ``u`` with ``|u|_1 <= order`` is known: missing ones are 0.
    ``degenerate`` marks a Gamma-series whose whole window consists of poles.
    """

    base: RatVector
    terms: dict[Offset, Fraction]
    order: int
    degenerate: bool = False

    def is_zero(self) -> bool:
        return not self.terms

    def items(self) -> Iterator[tuple[Offset, LogMono, Fraction]]:
        zero = (0,) * len(self.base)
        for u, c in self.terms.items():
            yield u, zero, c

    @property
    def log_degree(self) -> int:
        return 0


@dataclass
class LogSeries:
    """``sum terms[(u, a)] * x^(base + u) * prod_j log(x_j)^a_j``."""

    base: RatVector
    terms: dict[tuple[Offset, LogMono], Fraction]
    order: int
    degenerate: bool = False

    def is_zero(self) -> bool:
        return not self.terms

    def items(self) -> Iterator[tuple[Offset, LogMono, Fraction]]:
        for (u, a), c in self.terms.items():
            yield u, a, c

    @property
    def log_degree(self) -> int:
        return max((sum(a) for _, a in self.terms), default=0)


def _rebuild(s, base, coeffs: dict[tuple[Offset, LogMono], Fraction], order: int):
    if isinstance(s, LogSeries):
        return LogSeries(base, coeffs, order)
    return FormalSeries(base, {u: c for (u, _), c in coeffs.items()}, order)


def _falling(w: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for i in range(k):
        out *= w - i
    return out


def _ratio_support(vj: Fraction, uj: int) -> Fraction | None:
    """Gamma(v_j + 1) / Gamma(v_j + u_j + 1), or None where it is infinite."""
    if uj == 0:
        return Fraction(1)
    if uj < 0:
        return _falling(vj, -uj)
    den = Fraction(1)
    for k in range(1, uj + 1):
        den *= vj + k
    if den == 0:
        return None
    return 1 / den


def _coefficient_support(v: RatVector, u: Offset) -> Fraction:
    c = Fraction(1)
    for vj, uj in zip(v, u):
        r = _ratio_support(vj, uj)
        if r is None or r == 0:
            return Fraction(0)
        c *= r
    return c


def _coefficient_gamma(v: RatVector, u: Offset) -> Fraction:
    # 1/Gamma(m+1) = 1/m! for integers m >= 0 and 0 for negative integers;
    # non-integer coordinates are taken relative to u = 0
    c = Fraction(1)
    for vj, uj in zip(v, u):
        if vj.denominator == 1:
            m = int(vj) + uj
            if m < 0:
                return Fraction(0)
            c /= math.factorial(m)
        else:
            c *= _ratio_support(vj, uj)
    return c


def gamma_series(
    v: Sequence,
    lattice: LatticeBasis,
    order: int,
    *,
    config: AConfig | None = None,
    beta: Sequence | None = None,
    convention: str = NEGATIVE_SUPPORT,
) -> FormalSeries:
    """Truncated Gamma-series with exponent ``v`` over the kernel ``lattice``.

    ``convention="negative-support"`` (default) takes each coefficient as the
    product of Pochhammer ratios against the ``u = 0`` term and drops offsets
    where a ratio is infinite, i.e. where a negative integer coordinate of
    ``v`` would turn nonnegative. This keeps the negative support of ``v``
    fixed. ``convention="gamma"`` uses plain ``1/Gamma`` values, so a
    negative integer coordinate kills the term; the series is then
    renormalized at its first surviving offset.
    """
    v = tuple(Fraction(x) for x in v)
    if order < 0:
        raise ValueError("order must be nonnegative")
    if len(v) != lattice.ambient_dim:
        raise SeedingError("exponent length does not match the lattice")
    if config is not None and beta is not None:
        if linalg.matvec(config.matrix, v) != [Fraction(b) for b in beta]:
            raise SeedingError(f"A v != beta for v = {_fmt(v)}")
    if convention == NEGATIVE_SUPPORT:
        coeff = _coefficient_support
    elif convention == GAMMA:
        coeff = _coefficient_gamma
    else:
        raise ValueError(f"unknown convention {convention!r}")
    terms = {}
    for u in lattice_vectors(lattice, order):
        c = coeff(v, u)
        if c:
            terms[u] = c
    if not terms:
        return FormalSeries(v, {}, order, degenerate=True)
    lead = terms[min(terms, key=_offset_key)]
    if lead != 1:
        terms = {u: c / lead for u, c in terms.items()}
    return FormalSeries(v, terms, order)


def _derive(w: Sequence[Fraction], alpha: LogMono, nu: Sequence[int]) -> dict[LogMono, Fraction]:
    """``d^nu (x^w log^alpha) = x^(w - nu) * sum out[alpha'] log^alpha'``."""
    state = {tuple(alpha): Fraction(1)}
    for j, k in enumerate(nu):
        wj = w[j]
        for _ in range(k):
            new: dict[LogMono, Fraction] = {}
            for a, c in state.items():
                if wj:
                    new[a] = new.get(a, 0) + c * wj
                if a[j]:
                    b = a[:j] + (a[j] - 1,) + a[j + 1:]
                    new[b] = new.get(b, 0) + c * a[j]
            state = {a: c for a, c in new.items() if c}
            wj -= 1
    return state


def apply_box(s, b: BoxOperator):
    """Apply ``d^nu_plus - d^nu_minus`` termwise.

    The result has base ``s.base - nu_plus``; its offset ``t`` collects the
    ``nu_plus`` image of term ``t`` and the ``nu_minus`` image of term
    ``t - g`` (``g = nu_plus - nu_minus``). Only offsets where both sources
    lie inside the truncation window are kept, so every returned
    coefficient is exact.
    """
    if len(b.nu_plus) != len(s.base):
        raise ValueError("operator and series have different numbers of variables")
    g = b.direction
    m = s.order
    out: dict[tuple[Offset, LogMono], Fraction] = {}
    for u, alpha, c in s.items():
        w = [x + y for x, y in zip(s.base, u)]
        for t, nu, sign in ((u, b.nu_plus, 1), (tuple(x + y for x, y in zip(u, g)), b.nu_minus, -1)):
            tg = tuple(x - y for x, y in zip(t, g))
            if l1(t) > m or l1(tg) > m:
                continue
            for a, val in _derive(w, alpha, nu).items():
                key = (t, a)
                out[key] = out.get(key, 0) + sign * c * val
    base = tuple(x - p for x, p in zip(s.base, b.nu_plus))
    return _rebuild(s, base, {k: v for k, v in out.items() if v}, max(m - b.degree, 0))


def apply_euler(s, e: EulerOperator):
    """``(sum_j weights_j x_j d_j - beta_l)`` applied termwise; exact, no truncation loss."""
    out: dict[tuple[Offset, LogMono], Fraction] = {}
    for u, alpha, c in s.items():
        w = [x + y for x, y in zip(s.base, u)]
        val = c * (sum(a * x for a, x in zip(e.weights, w)) - e.beta_l)
        if val:
            out[(u, alpha)] = out.get((u, alpha), 0) + val
        for j, aj in enumerate(alpha):
            if aj and e.weights[j]:
                b = alpha[:j] + (aj - 1,) + alpha[j + 1:]
                out[(u, b)] = out.get((u, b), 0) + c * e.weights[j] * aj
    return _rebuild(s, s.base, {k: v for k, v in out.items() if v}, s.order)


@dataclass(frozen=True)
class AnnihilationVerdict:
    passed: bool
    max_checked_order: int
    first_failure: tuple[str, Offset] | None = None


def _first_offset(res) -> Offset:
    return min((u for u, _, _ in res.items()), key=_offset_key)


def verify_annihilation(s, system: GkzSystem) -> AnnihilationVerdict:
    """Check all Euler operators exactly and all boxes inside their windows."""
    max_deg = max((b.degree for b in system.boxes), default=0)
    checked = max(s.order - max_deg, 0)
    for e in system.eulers:
        res = apply_euler(s, e)
        if not res.is_zero():
            return AnnihilationVerdict(False, checked, (f"E{e.level + 1}", _first_offset(res)))
    for b in system.boxes:
        res = apply_box(s, b)
        if not res.is_zero():
            return AnnihilationVerdict(False, checked, (str(b), _first_offset(res)))
    return AnnihilationVerdict(True, checked)


def frac_key(v: RatVector) -> tuple[Fraction, ...]:
    """Class of an exponent modulo the kernel lattice (fractional parts)."""
    return tuple(x - math.floor(x) for x in v)


@dataclass(frozen=True)
class Seed:
    exponent: RatVector
    simplex: tuple[int, ...]


def simplex_seeds(c: AConfig, beta: RatVector, simplex: Sequence[int], index: int | None = None) -> list[Seed]:
    """One exponent per class of ``ZA / Z A_sigma``, integer off the simplex.

    Shifts ``sum k_j a_j`` over columns outside the simplex are searched
    breadth first with ``k >= 0``, so each class gets its smallest shift.
    """
    if index is None:
        index = linalg.lattice_index(c.column_lattice(), c.r + c.n)
    simplex = tuple(simplex)
    dim = c.r + c.n
    A_sigma = [[c.columns[j][i] for j in simplex] for i in range(dim)]
    d = linalg.det(A_sigma)
    if d == 0:
        raise SeedingError(f"simplex {simplex} is singular")
    inv = linalg.inverse(A_sigma)
    n_cosets = abs(d) // index
    others = [j for j in range(c.N) if j not in simplex]

    def shift(k):
        return [sum(kk * c.columns[j][i] for kk, j in zip(k, others)) for i in range(dim)]

    def key(x):
        return frac_key(tuple(linalg.matvec(inv, x)))

    start = (0,) * len(others)
    found = {key([0] * dim): start}
    queue = deque([start])
    seen = {start}
    while queue and len(found) < n_cosets:
        k = queue.popleft()
        for pos in range(len(others)):
            k2 = k[:pos] + (k[pos] + 1,) + k[pos + 1:]
            if k2 in seen:
                continue
            seen.add(k2)
            kx = key(shift(k2))
            if kx not in found:
                found[kx] = k2
            queue.append(k2)
    seeds = []
    for k in found.values():
        v_sigma = linalg.matvec(inv, [b - x for b, x in zip(beta, shift(k))])
        v = [Fraction(0)] * c.N
        for kk, j in zip(k, others):
            v[j] = Fraction(kk)
        for val, j in zip(v_sigma, simplex):
            v[j] = val
        seeds.append(Seed(tuple(v), simplex))
    return seeds


def triangulation_seeds(c: AConfig, beta: Sequence, t: Triangulation) -> list[Seed]:
    beta = tuple(Fraction(b) for b in beta)
    index = linalg.lattice_index(c.column_lattice(), c.r + c.n)
    out = []
    for simplex in t.simplices:
        if len(simplex) != c.r + c.n:
            raise SeedingError(f"simplex {tuple(simplex)} does not have {c.r + c.n} vertices")
        out.extend(simplex_seeds(c, beta, simplex, index))
    return out


def initial_exponents(
    c: AConfig, beta: Sequence, t: Triangulation, *, dedupe: bool = True
) -> list[RatVector]:
    """Gamma-series exponents attached to the simplices of ``t``.

    For each simplex and each class of ``ZA / Z A_sigma`` one exponent ``v``
    with integer entries off the simplex; ``sum |det A_sigma| / [Z^d : ZA]``
    of them in total. With ``dedupe`` only the first exponent of each class
    modulo the kernel lattice is kept.
    """
    seeds: list[RatVector] = []
    keys = set()
    for s in triangulation_seeds(c, beta, t):
        k = frac_key(s.exponent)
        if dedupe and k in keys:
            continue
        keys.add(k)
        seeds.append(s.exponent)
    return seeds


@dataclass
class Member:
    series: FormalSeries | LogSeries
    verdict: AnnihilationVerdict | None = None


@dataclass
class SeriesFamily:
    config: AConfig
    beta: RatVector
    members: list[Member]
    triangulation: Triangulation | None = None
    raw_seed_count: int = 0
    diagnostics: list[str] = field(default_factory=list)


def _known(s, absolute: Sequence[Fraction]) -> bool:
    u = [a - b for a, b in zip(absolute, s.base)]
    return all(x.denominator == 1 for x in u) and l1([int(x) for x in u]) <= s.order


def count_independent(f: SeriesFamily) -> int:
    """Dimension of the span of the verified, non-degenerate members.

    Members in different classes modulo the kernel lattice have disjoint
    monomial supports. Within a class the rank of the coefficient vectors
    is taken over monomials that every member in the class has computed,
    which bounds the rank of the full series from below.
    """
    classes: dict[tuple, list] = {}
    for m in f.members:
        s = m.series
        if s.degenerate or s.is_zero():
            continue
        if m.verdict is not None and not m.verdict.passed:
            continue
        classes.setdefault(frac_key(s.base), []).append(s)
    total = 0
    for group in classes.values():
        if len(group) == 1:
            total += 1
            continue
        rows = []
        for s in group:
            row = {}
            for u, a, c in s.items():
                absolute = tuple(b + x for b, x in zip(s.base, u))
                if all(_known(o, absolute) for o in group):
                    row[(absolute, a)] = c
            rows.append(row)
        keys = sorted(set().union(*rows))
        total += linalg.rank([[r.get(k, 0) for k in keys] for r in rows]) if keys else 0
    return total


def gamma_family(
    c: AConfig,
    beta: Sequence,
    t: Triangulation,
    order: int = 6,
    degree_bound: int = 6,
    *,
    system: GkzSystem | None = None,
    convention: str = NEGATIVE_SUPPORT,
    logarithmic: bool = True,
) -> SeriesFamily:
    """Seed, expand and verify the Gamma-series attached to ``t``.

    Exponent classes hit by a single seed give one Gamma-series. A class hit
    by ``m > 1`` seeds is resonant: with ``logarithmic`` the ``m`` solutions
    are recovered by perturbing beta, otherwise one Gamma-series is kept and
    the shortfall is reported.
    """
    from .deform import resonant_solutions

    beta = tuple(Fraction(b) for b in beta)
    system = system or gkz_system(c, beta, degree_bound)
    L = c.kernel()
    raw = triangulation_seeds(c, beta, t)
    fam = SeriesFamily(c, beta, [], t, raw_seed_count=len(raw))
    classes: dict[tuple, list[Seed]] = {}
    for s in raw:
        classes.setdefault(frac_key(s.exponent), []).append(s)
    for key in sorted(classes):
        seeds = classes[key]
        if len(seeds) > 1 and logarithmic:
            sols, note = resonant_solutions(c, beta, seeds, L, order)
            if note:
                fam.diagnostics.append(note)
            for s in sols:
                fam.members.append(Member(s, verify_annihilation(s, system)))
            continue
        if len(seeds) > 1:
            fam.diagnostics.append(
                f"{len(seeds)} seeds share the class of {_fmt(seeds[0].exponent)}; "
                f"{len(seeds) - 1} logarithmic solution(s) not constructed"
            )
        v = seeds[0].exponent
        s = gamma_series(v, L, order, config=c, beta=beta, convention=convention)
        fam.members.append(Member(s, verify_annihilation(s, system)))
    for m in fam.members:
        if m.series.degenerate:
            fam.diagnostics.append(f"exponent {_fmt(m.series.base)}: every offset in the window is a pole")
        elif not m.verdict.passed:
            fam.diagnostics.append(f"exponent {_fmt(m.series.base)}: fails {m.verdict.first_failure[0]}")
    return fam


def _fmt(v: Sequence) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


def candidate_orders(points: Sequence[Sequence[int]], limit: int = 200):
    """Insertion orders tried when searching for a triangulation.

    Lexicographic first, then hull vertices before the remaining points,
    then reverse lexicographic, then permutations of the lexicographic order.
    """
    idx = sorted(range(len(points)), key=lambda i: tuple(points[i]))
    verts = set(polytope.convex_hull(points).vertices)
    yield idx
    yield [i for i in idx if tuple(points[i]) in verts] + [i for i in idx if tuple(points[i]) not in verts]
    yield idx[::-1]
    yield from (list(p) for p in itertools.islice(itertools.permutations(idx), limit))


def find_gamma_family(
    c: AConfig,
    beta: Sequence,
    target: int,
    order: int = 6,
    degree_bound: int = 6,
    simplices: Sequence[Sequence[int]] | None = None,
    *,
    logarithmic: bool = True,
    limit: int = 200,
) -> tuple[SeriesFamily, list[tuple[Triangulation, int]]]:
    """Gamma-family reaching ``target`` independent members, if one is found.

    With explicit ``simplices`` only that triangulation is used. Otherwise
    placing triangulations from :func:`candidate_orders` are tried in turn,
    starting with the lexicographic one; the first family whose count
    reaches ``target`` is returned, or else the best one seen. The second
    return value lists every attempt with its count.
    """
    beta = tuple(Fraction(b) for b in beta)
    system = gkz_system(c, beta, degree_bound)
    if simplices is not None:
        t = Triangulation(tuple(sorted(tuple(sorted(s)) for s in simplices)))
        fam = gamma_family(c, beta, t, order, degree_bound, system=system, logarithmic=logarithmic)
        return fam, [(t, count_independent(fam))]
    attempts: list[tuple[Triangulation, int]] = []
    best, best_n = None, -1
    tried = set()
    for order_ in candidate_orders(c.columns, limit):
        t = polytope.placing_triangulation(c.columns, order_)
        if t.simplices in tried:
            continue
        tried.add(t.simplices)
        fam = gamma_family(c, beta, t, order, degree_bound, system=system, logarithmic=logarithmic)
        n = count_independent(fam)
        attempts.append((t, n))
        if n > best_n:
            best, best_n = fam, n
        if n >= target:
            break
    return best, attempts
