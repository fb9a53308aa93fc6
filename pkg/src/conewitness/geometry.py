"""Exact rational linear algebra and polyhedral cones.

Vectors are plain tuples of :class:`fractions.Fraction`; matrices are tuples of
row tuples.  Nothing in this module touches floating point.

Functionals on a subspace ``W`` are represented by their unique representative
inside ``W`` (so ``f(x) = f . x`` for ``x`` in ``W``).  With that identification
the dual of a cone in ``W`` is again a cone in ``W``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

Vector = tuple[Fraction, ...]
Matrix = tuple[Vector, ...]

DEFAULT_ZONOTOPE_CAP = 16


class CapExceeded(ValueError):
    """An exponential enumeration was refused because its input is over the cap."""


def Q(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.  Floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"refusing inexact value {x!r}; pass an int, Fraction or 'p/q' string")


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    num, sep, den = text.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"malformed rational {text!r}") from None
    if q == 0:
        raise ValueError(f"malformed rational {text!r}: zero denominator")
    return Fraction(p, q)


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def vec(values: Iterable) -> Vector:
    return tuple(Q(v) for v in values)


def zeros(n: int) -> Vector:
    return (Fraction(0),) * n


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def add(a: Vector, b: Vector) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Vector, b: Vector) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a: Vector) -> Vector:
    return tuple(c * x for x in a)


def vsum(vectors: Iterable[Vector], dim: int) -> Vector:
    out = [Fraction(0)] * dim
    for v in vectors:
        for i, x in enumerate(v):
            out[i] += x
    return tuple(out)


def matvec(m: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> Vector:
    return tuple(dot(row, v) for row in m)


def is_zero(v: Sequence[Fraction]) -> bool:
    return all(x == 0 for x in v)


# ---------------------------------------------------------------------------
# Row reduction


def rref(m: Sequence[Sequence]) -> tuple[Matrix, int, tuple[int, ...]]:
    """Reduced row-echelon form of ``m``.

    Returns the full-size reduced matrix (zero rows at the bottom), its rank
    and the pivot columns.
    """
    rows = [list(map(Q, r)) for r in m]
    if not rows:
        return (), 0, ()
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][c]
        if lead != 1:
            rows[r] = [x / lead for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return tuple(tuple(row) for row in rows), r, tuple(pivots)


def rank(m: Sequence[Sequence]) -> int:
    return rref(m)[1]


def nullspace(m: Sequence[Sequence[Fraction]], ncols: int) -> list[Vector]:
    """Basis of ``{x : m x = 0}``."""
    reduced, r, pivots = rref(m) if m else ((), 0, ())
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for i, p in enumerate(pivots):
            x[p] = -reduced[i][f]
        basis.append(tuple(x))
    return basis


def solve_linear(m: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Vector | None:
    """One solution of ``m x = b`` (free variables set to zero), or None if inconsistent."""
    ncols = len(m[0]) if m else 0
    aug = [list(row) + [rhs] for row, rhs in zip(m, b)]
    reduced, r, pivots = rref(aug)
    if pivots and pivots[-1] == ncols:
        return None
    x = [Fraction(0)] * ncols
    for i, p in enumerate(pivots):
        x[p] = reduced[i][ncols]
    return tuple(x)


def inverse(m: Sequence[Sequence[Fraction]]) -> Matrix:
    n = len(m)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    reduced, r, pivots = rref(aug)
    if r < n or pivots[n - 1] != n - 1:
        raise ValueError("matrix is singular")
    return tuple(tuple(row[n:]) for row in reduced)


def transpose(m: Sequence[Sequence[Fraction]]) -> Matrix:
    return tuple(zip(*m)) if m else ()


# ---------------------------------------------------------------------------
# Subspaces


@dataclass(frozen=True)
class Subspace:
    """A linear subspace held by its canonical RREF basis.

    Because the basis is canonical, two equal subspaces compare equal as
    dataclasses.  The coordinates of a vector ``v`` in the subspace are simply
    its entries at the pivot columns.
    """

    ambient_dim: int
    basis: Matrix
    pivots: tuple[int, ...] = field(default=())

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords(self, v: Sequence[Fraction]) -> Vector:
        return tuple(v[p] for p in self.pivots)

    def lift(self, c: Sequence[Fraction]) -> Vector:
        return vsum((scale(x, b) for x, b in zip(c, self.basis)), self.ambient_dim)

    def contains(self, v: Sequence[Fraction]) -> bool:
        return tuple(v) == self.lift(self.coords(v))

    def values(self, f: Sequence[Fraction]) -> Vector:
        """Values of the ambient functional ``f`` on the basis vectors."""
        return tuple(dot(f, b) for b in self.basis)


def span_basis(vectors: Iterable[Sequence], ambient_dim: int | None = None) -> Subspace:
    vs = [vec(v) for v in vectors]
    if ambient_dim is None:
        if not vs:
            raise ValueError("ambient_dim is required for an empty vector set")
        ambient_dim = len(vs[0])
    if any(len(v) != ambient_dim for v in vs):
        raise ValueError("vectors do not share the ambient dimension")
    if not vs:
        return Subspace(ambient_dim, (), ())
    reduced, r, pivots = rref(vs)
    return Subspace(ambient_dim, reduced[:r], pivots)


def full_space(dim: int) -> Subspace:
    return span_basis([tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)], dim)


def subspace_equal(a: Subspace, b: Subspace) -> bool:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError(f"ambient dimension mismatch: {a.ambient_dim} vs {b.ambient_dim}")
    return a.basis == b.basis


# ---------------------------------------------------------------------------
# Cones


def canonical_ray(v: Sequence[Fraction]) -> Vector:
    """Positive rescaling making the first nonzero entry +1 or -1."""
    lead = next(x for x in v if x != 0)
    return tuple(x / abs(lead) for x in v)


def canonical_rays(vectors: Iterable[Sequence[Fraction]]) -> tuple[Vector, ...]:
    return tuple(sorted({canonical_ray(v) for v in vectors if not is_zero(v)}))


@dataclass(frozen=True)
class ConeV:
    """A polyhedral cone given by generators (the empty set is the zero cone)."""

    ambient_dim: int
    generators: tuple[Vector, ...]

    @classmethod
    def of(cls, vectors: Iterable[Sequence], ambient_dim: int | None = None) -> "ConeV":
        vs = [vec(v) for v in vectors]
        if ambient_dim is None:
            if not vs:
                raise ValueError("ambient_dim is required for an empty generator set")
            ambient_dim = len(vs[0])
        if any(len(v) != ambient_dim for v in vs):
            raise ValueError("generators do not share the ambient dimension")
        return cls(ambient_dim, canonical_rays(vs))

    @property
    def span(self) -> Subspace:
        return span_basis(self.generators, self.ambient_dim)


@dataclass(frozen=True)
class ConeH:
    """Facet description relative to a span: ``{v in span : f . v >= 0 for every facet f}``."""

    ambient_dim: int
    span: Subspace
    facet_normals: tuple[Vector, ...]

    def contains(self, v: Sequence[Fraction]) -> bool:
        return self.span.contains(v) and all(dot(f, v) >= 0 for f in self.facet_normals)


def _dd_pointed(rows: Sequence[Vector], r: int) -> list[Vector]:
    """Extreme rays of the pointed cone ``{y in Q^r : a . y >= 0}`` (rank of rows is r).

    Double description: start from a simplicial cone on r independent rows,
    then add the remaining rows one at a time in the given order.  Adjacency
    of two rays is decided by the rank of their common tight rows.
    """
    if r == 0:
        return []
    chosen: list[int] = []
    for i in range(len(rows)):
        if rank([rows[j] for j in chosen] + [rows[i]]) > len(chosen):
            chosen.append(i)
            if len(chosen) == r:
                break
    inv = inverse([rows[i] for i in chosen])
    rays = [tuple(inv[k][j] for k in range(r)) for j in range(r)]
    tight = [frozenset(c for c in chosen if c != chosen[j]) for j in range(r)]
    for i in range(len(rows)):
        if i in chosen:
            continue
        a = rows[i]
        vals = [dot(a, ray) for ray in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        zer = [k for k, v in enumerate(vals) if v == 0]
        new_rays = [rays[k] for k in pos] + [rays[k] for k in zer]
        new_tight = [tight[k] for k in pos] + [tight[k] | {i} for k in zer]
        for p in pos:
            for n in neg:
                common = tight[p] & tight[n]
                if len(common) < r - 2:
                    continue
                if r > 2 and rank([rows[c] for c in common]) != r - 2:
                    continue
                ray = sub(scale(vals[p], rays[n]), scale(vals[n], rays[p]))
                new_rays.append(canonical_ray(ray))
                new_tight.append(common | {i})
        rays, tight = new_rays, new_tight
    return rays


def _cone_from_inequalities(rows: Sequence[Vector], dim: int) -> list[Vector]:
    """Generators of ``{y in Q^dim : a . y >= 0}``, lineality included as +-pairs."""
    rows = [r for r in rows if not is_zero(r)]
    lineality = nullspace(rows, dim) if rows else [
        tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)
    ]
    gens = [v for l in lineality for v in (l, scale(-1, l))]
    if not rows:
        return gens
    reduced, r, _ = rref(rows)
    row_space = reduced[:r]
    # y = row_space^T t restricted to the orthogonal complement of the lineality
    reduced_rows = [tuple(dot(a, q) for q in row_space) for a in rows]
    for t in _dd_pointed(reduced_rows, r):
        gens.append(vsum((scale(x, q) for x, q in zip(t, row_space)), dim))
    return gens


def dual_cone(c: ConeV, relative_to: Subspace | None = None) -> ConeV:
    """Generators of ``{f in W : f . x >= 0 for all x in c}`` with ``W = relative_to``."""
    w = relative_to if relative_to is not None else c.span
    if any(not w.contains(g) for g in c.generators):
        raise ValueError("cone generators do not lie in the given subspace")
    rows = [tuple(dot(b, g) for b in w.basis) for g in c.generators]
    ts = _cone_from_inequalities(rows, w.dim)
    return ConeV.of([w.lift(t) for t in ts], c.ambient_dim)


def dd_convert(c: ConeV) -> ConeH:
    span = c.span
    return ConeH(c.ambient_dim, span, dual_cone(c, span).generators)


def cone_contains(c: ConeV | ConeH, v: Sequence, method: str = "facets") -> bool:
    v = vec(v)
    if method == "lp":
        from .lp import LpProblem, Feasible, solve

        if not isinstance(c, ConeV):
            raise TypeError("the LP route needs generators")
        if len(v) != c.ambient_dim:
            raise ValueError("dimension mismatch")
        k = len(c.generators)
        eqs = tuple((tuple(g[i] for g in c.generators), v[i]) for i in range(c.ambient_dim))
        return isinstance(solve(LpProblem(k, eqs, frozenset(range(k)))), Feasible)
    h = dd_convert(c) if isinstance(c, ConeV) else c
    if len(v) != h.ambient_dim:
        raise ValueError("dimension mismatch")
    return h.contains(v)


def cone_equal(a: ConeV, b: ConeV) -> bool:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    ha, hb = dd_convert(a), dd_convert(b)
    return all(hb.contains(g) for g in a.generators) and all(ha.contains(g) for g in b.generators)


# ---------------------------------------------------------------------------
# Polytopes and zonotopes


def polytope_contains(vertices: Sequence[Sequence], p: Sequence) -> bool:
    from .lp import Feasible, LpProblem, solve

    vs = [vec(v) for v in vertices]
    if not vs:
        raise ValueError("empty vertex set")
    p = vec(p)
    k, d = len(vs), len(p)
    eqs = [(tuple(v[i] for v in vs), p[i]) for i in range(d)]
    eqs.append(((Fraction(1),) * k, Fraction(1)))
    return isinstance(solve(LpProblem(k, tuple(eqs), frozenset(range(k)))), Feasible)


def _strictly_separable(signed: Sequence[Vector], dim: int) -> bool:
    """Is there w with s . w >= 1 for every s (i.e. s . w > 0 strictly)?"""
    from .lp import Feasible, LpProblem, solve

    m = len(signed)
    # variables: w (free, dim) then slacks (m, nonneg): s.w - slack = 1
    eqs = []
    for i, s in enumerate(signed):
        row = list(s) + [Fraction(-int(j == i)) for j in range(m)]
        eqs.append((tuple(row), Fraction(1)))
    problem = LpProblem(dim + m, tuple(eqs), frozenset(range(dim, dim + m)))
    return isinstance(solve(problem), Feasible)


def zonotope_vertices(generators: Sequence[Sequence], cap: int = DEFAULT_ZONOTOPE_CAP) -> list[Vector]:
    """Vertices of ``{sum_a t_a v_a : t_a in [0, 1]}``.

    A subset sum is a vertex iff some functional is positive on exactly the
    chosen generators; that strict separation is checked per subset by LP.
    """
    gens = [vec(g) for g in generators]
    if len(gens) > cap:
        raise CapExceeded(f"{len(gens)} zonotope generators exceed the cap of {cap}")
    if not gens:
        raise ValueError("zonotope needs at least one generator (ambient dimension unknown)")
    dim = len(gens[0])
    nz = [g for g in gens if not is_zero(g)]
    if not nz:
        return [zeros(dim)]
    out = set()
    for size in range(len(nz) + 1):
        for subset in combinations(range(len(nz)), size):
            chosen = set(subset)
            signed = [g if i in chosen else scale(-1, g) for i, g in enumerate(nz)]
            if _strictly_separable(signed, dim):
                out.add(vsum((nz[i] for i in subset), dim))
    return sorted(out)


def hull_vertices(points: Iterable[Sequence]) -> list[Vector]:
    """Extreme points of the convex hull of a finite point set."""
    pts = sorted({vec(p) for p in points})
    return [p for i, p in enumerate(pts) if len(pts) == 1 or not polytope_contains(pts[:i] + pts[i + 1:], p)]


def extreme_rays(c: ConeV) -> tuple[Vector, ...]:
    """Generators of ``c`` that are not conic combinations of the others (pointed cones)."""
    from .lp import Feasible, LpProblem, solve

    gens = c.generators
    keep = []
    for i, g in enumerate(gens):
        others = gens[:i] + gens[i + 1:]
        if not others:
            keep.append(g)
            continue
        eqs = tuple((tuple(o[j] for o in others), g[j]) for j in range(c.ambient_dim))
        if not isinstance(solve(LpProblem(len(others), eqs, frozenset(range(len(others))))), Feasible):
            keep.append(g)
    return tuple(keep)


@dataclass(frozen=True)
class PolytopeH:
    """A polytope as the slice ``x_0 = 1`` of a homogenized facet description."""

    dim: int
    cone: ConeH

    def contains(self, p: Sequence) -> bool:
        return self.cone.contains((Fraction(1),) + vec(p))

    def contains_zonotope(self, generators: Sequence[Sequence]) -> bool:
        """Is ``{sum_j t_j g_j : t in [0, 1]^k}`` inside?  Each facet is minimized in closed form."""
        gens = [(Fraction(0),) + vec(g) for g in generators]
        if not self.contains(zeros(self.dim)):
            return False
        if not all(self.cone.span.contains(g) for g in gens):
            return False
        for f in self.cone.facet_normals:
            if f[0] + sum((min(Fraction(0), dot(f, g)) for g in gens), Fraction(0)) < 0:
                return False
        return True


def polytope_h(points: Iterable[Sequence]) -> PolytopeH:
    pts = [vec(p) for p in points]
    if not pts:
        raise ValueError("empty point set")
    dim = len(pts[0])
    return PolytopeH(dim, dd_convert(ConeV.of([(Fraction(1),) + p for p in pts])))
