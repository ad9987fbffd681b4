"""Maurer-Cartan machinery over Artin coefficients: residuals, gauge action,
exact BCH products via operator exponentials, tangent/obstruction dimensions
and the cohomological isomorphism criterion for deformation functors.

Elements over an Artin algebra live in one of three concrete carriers, each
wrapped in a small context that exposes add/scale/d/bracket/is_zero:
  * TableContext    - finite-dimensional table DGLA with A-valued coefficients,
  * HomContext      - endomorphism complex over an extended ring R (x) A,
  * PairContext     - pair complex over an extended ring (degree 0 = pairs).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import linalg
from . import matrices as mat
from .dgla import (GradedMap, HomComplexDGLA, PairChain, PairComplexDGLA,
                   QComplex, TableDGLA, TElt, DGLAError)
from .pairs import AutomorphismPair, PairError, exp_pair, log_auto
from .poly import Polynomial
from .rings import ArtinAlgebra, ExtendedRing, QuotientRing


class MCError(ValueError):
    pass


MAX_SERIES = 64


# ---------------------------------------------------------------------------
# contexts
# ---------------------------------------------------------------------------

class TableContext:
    """Table DGLA with coefficients in an Artin algebra (elements of L (x) A;
    the maximal-ideal condition is checked on constant terms)."""

    def __init__(self, L: TableDGLA, A: ArtinAlgebra):
        self.L = L
        self.A = A

    def element(self, degree, coeffs) -> TElt:
        return self.L.nf(self.L.element(degree, coeffs, self.A), self.A)

    def zero(self, degree) -> TElt:
        return self.L.zero(degree, self.A)

    def add(self, x, y):
        return self.L.nf(self.L.add(x, y), self.A)

    def sub(self, x, y):
        return self.add(x, self.scale(Fraction(-1), y))

    def scale(self, c, x):
        return self.L.nf(self.L.scale(c, x), self.A)

    def d(self, x):
        return self.L.d(x, self.A)

    def bracket(self, x, y):
        return self.L.bracket(x, y, self.A)

    def is_zero(self, x) -> bool:
        return self.L.is_zero(x, self.A)

    def degree(self, x) -> int:
        return x.degree

    def in_max_ideal(self, x) -> bool:
        return all(self.A.nf(c).constant_term() == 0 for c in x.coeffs)

    # -- exact exponential bookkeeping via a registered faithful rep -------
    def _rep_matrix(self, x: TElt):
        if self.L.rep is None:
            raise MCError("no representation registered for this table DGLA")
        n = len(next(iter(self.L.rep.values())))
        acc = [[self.A.zero() for _ in range(n)] for _ in range(n)]
        for i, c in enumerate(x.coeffs):
            m = self.L.rep[i]
            for a in range(n):
                for b in range(n):
                    if m[a][b]:
                        acc[a][b] = self.A.nf(acc[a][b] + c * m[a][b])
        return acc

    def _unrep(self, matrix) -> TElt:
        """Solve sum_i c_i rep_i = matrix for the coefficients c_i."""
        idx = sorted(self.L.rep)
        n = len(matrix)
        rows = []
        rhs = []
        for a in range(n):
            for b in range(n):
                rows.append([Fraction(self.L.rep[i][a][b]) for i in idx])
                rhs.append(matrix[a][b])
        coeffs = _solve_rational_rows_ring_rhs(rows, rhs, self.A)
        if coeffs is None:
            raise MCError("operator log left the representation image")
        out = [self.A.zero()] * self.L.dim(0)
        for pos, i in enumerate(idx):
            out[i] = coeffs[pos]
        return TElt(0, tuple(out))

    def exp_action(self, x: TElt):
        if not self.in_max_ideal(x):
            raise MCError("exponential needs a maximal-ideal element")
        m = self._rep_matrix(x)
        return _mat_exp_nilpotent(self.A, m)

    def bch(self, a: TElt, b: TElt) -> TElt:
        prod = mat.mat_mul(self.A, self.exp_action(a), self.exp_action(b))
        return self._unrep(_mat_log_unipotent(self.A, prod))


def _solve_rational_rows_ring_rhs(rows, rhs, ring):
    """Solve A c = rhs with A rational and rhs in a ring; None if inconsistent."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(map(Fraction, r)) for r in rows]
    vals = [ring.nf(v) for v in rhs]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        vals[r], vals[piv] = vals[piv], vals[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        vals[r] = ring.nf(vals[r] * Fraction(1, 1) * Fraction(pv.denominator, pv.numerator)) \
            if pv != 1 else vals[r]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
                vals[i] = ring.nf(vals[i] - vals[r] * f)
        pivots.append(c)
        r += 1
    sol = [ring.zero()] * ncols
    for t, pc in enumerate(pivots):
        sol[pc] = vals[t]
    # consistency: zero rows must have zero rhs
    for i in range(len(aug)):
        if all(x == 0 for x in aug[i]) and not vals[i].is_zero():
            return None
    return sol


def _mat_exp_nilpotent(ring, a):
    n = len(a)
    acc = mat.identity_matrix(ring, n)
    term = mat.identity_matrix(ring, n)
    k = 1
    while True:
        term = mat.mat_scale(ring, ring.const(Fraction(1, k)),
                             mat.mat_mul(ring, term, a))
        if mat.mat_is_zero(term):
            return acc
        acc = mat.mat_add(ring, acc, term)
        k += 1
        if k > MAX_SERIES:
            raise MCError("matrix exponential did not truncate")


def _mat_log_unipotent(ring, a):
    n = len(a)
    delta = mat.mat_sub(ring, a, mat.identity_matrix(ring, n))
    acc = mat.zero_matrix(ring, n, n)
    power = mat.identity_matrix(ring, n)
    k = 1
    while True:
        power = mat.mat_mul(ring, power, delta)
        if mat.mat_is_zero(power):
            return acc
        acc = mat.mat_add(ring, acc,
                          mat.mat_scale(ring, ring.const(Fraction((-1) ** (k + 1), k)),
                                        power))
        k += 1
        if k > MAX_SERIES:
            raise MCError("matrix logarithm did not truncate")


class HomContext:
    """Endomorphism complex over an extended ring; elements are GradedMaps
    with entries in the maximal-ideal part for deformation data."""

    def __init__(self, H: HomComplexDGLA):
        self.H = H
        self.ring = H.ring
        if not isinstance(self.ring, ExtendedRing):
            raise MCError("Artin elements need a complex over an extended ring")

    def zero(self, degree):
        return self.H.zero(degree)

    def add(self, x, y):
        return self.H.add(x, y)

    def sub(self, x, y):
        return self.H.add(x, self.H.neg(y))

    def scale(self, c, x):
        return self.H.scale(c, x)

    def d(self, x):
        return self.H.d(x)

    def bracket(self, x, y):
        return self.H.bracket(x, y)

    def is_zero(self, x) -> bool:
        return self.H.is_zero(x)

    def degree(self, x) -> int:
        return x.degree

    def in_max_ideal(self, x) -> bool:
        return all(self.ring.in_max_ideal(v) for _, m in x.blocks for row in m
                   for v in row)

    def exp_action(self, x: GradedMap) -> dict:
        """Blockwise matrix exponential of a degree-zero map."""
        if x.degree != 0:
            raise MCError("exponential of a non-degree-zero map")
        if not self.in_max_ideal(x):
            raise MCError("exponential needs maximal-ideal entries")
        out = {}
        for j in self.H.cx.degrees:
            r = self.H.cx.rank(j)
            b = x.block(j)
            out[j] = _mat_exp_nilpotent(self.ring, b) if b is not None \
                else mat.identity_matrix(self.ring, r)
        return out

    def compose_actions(self, a: dict, b: dict) -> dict:
        return {j: mat.mat_mul(self.ring, a[j], b[j]) for j in a}

    def log_action(self, a: dict) -> GradedMap:
        blocks = {j: _mat_log_unipotent(self.ring, m) for j, m in a.items()}
        return self.H.from_blocks(0, blocks)

    def bch(self, x: GradedMap, y: GradedMap) -> GradedMap:
        return self.log_action(self.compose_actions(self.exp_action(x),
                                                    self.exp_action(y)))


class PairContext:
    """Pair complex over an extended ring: degree 0 elements are PairChains,
    all other degrees graded R-linear maps."""

    def __init__(self, D: PairComplexDGLA):
        self.D = D
        self.ring = D.ring
        if not isinstance(self.ring, ExtendedRing):
            raise MCError("Artin elements need a pair complex over an extended ring")

    def zero(self, degree):
        if degree == 0:
            return self.D.zero_pair()
        return self.D.hom.zero(degree)

    def degree(self, x) -> int:
        return 0 if isinstance(x, PairChain) else x.degree

    def add(self, x, y):
        if isinstance(x, PairChain) and isinstance(y, PairChain):
            return self.D.add_pairs(x, y)
        if isinstance(x, PairChain) or isinstance(y, PairChain):
            raise MCError("cannot add a pair to a plain graded map")
        return self.D.hom.add(x, y)

    def sub(self, x, y):
        if isinstance(y, PairChain):
            return self.add(x, self.D.neg_pair(y))
        return self.D.hom.add(x, self.D.hom.neg(y))

    def scale(self, c, x):
        if isinstance(x, PairChain):
            cc = self.ring.const(c) if not isinstance(c, Polynomial) else c
            return PairChain(tuple(self.ring.nf(cc * h) for h in x.h_values),
                             tuple((j, mat.mat_scale(self.ring, cc, m))
                                   for j, m in x.blocks))
        return self.D.hom.scale(c, x)

    def d(self, x):
        if isinstance(x, PairChain):
            return self.D.d_pair(x)
        return self.D.hom.d(x)

    def bracket(self, x, y):
        xp, yp = isinstance(x, PairChain), isinstance(y, PairChain)
        if xp and yp:
            return self.D.bracket_pairs(x, y)
        if xp:
            return self.D.bracket_pair_hom(x, y)
        if yp:
            return self.D.hom.scale(self.ring.const(-1), self.D.bracket_pair_hom(y, x))
        return self.D.hom.bracket(x, y)

    def is_zero(self, x) -> bool:
        if isinstance(x, PairChain):
            return (all(self.ring.nf(h).is_zero() for h in x.h_values)
                    and all(mat.mat_is_zero(m) for _, m in x.blocks))
        return self.D.hom.is_zero(x)

    def in_max_ideal(self, x) -> bool:
        if isinstance(x, PairChain):
            return (all(self.ring.in_max_ideal(h) for h in x.h_values)
                    and all(self.ring.in_max_ideal(v) for _, m in x.blocks
                            for row in m for v in row))
        return all(self.ring.in_max_ideal(v) for _, m in x.blocks
                   for row in m for v in row)

    # -- exponentials of degree-zero pairs ---------------------------------
    def exp_action(self, chain: PairChain) -> dict:
        """Per-degree automorphism pairs sharing the exponential of h."""
        out = {}
        for j in self.D.cx.degrees:
            if self.D.cx.rank(j) == 0:
                continue
            out[j] = exp_pair(self.D.degree_pair(chain, j))
        return out

    def compose_actions(self, a: dict, b: dict) -> dict:
        return {j: a[j].compose(b[j]) for j in a}

    def log_action(self, autos: dict) -> PairChain:
        h = None
        blocks = {}
        for j, auto in sorted(autos.items()):
            p = log_auto(auto)
            h = p.h_values
            blocks[j] = mat.mat_from_columns(self.ring, list(p.u_values),
                                             self.D.cx.rank(j))
        if h is None:
            return self.D.zero_pair()
        return self.D.pair_chain(h, blocks)

    def bch(self, x: PairChain, y: PairChain) -> PairChain:
        return self.log_action(self.compose_actions(self.exp_action(x),
                                                    self.exp_action(y)))


# ---------------------------------------------------------------------------
# Maurer-Cartan, gauge, BCH
# ---------------------------------------------------------------------------

def mc_residual(ctx, x):
    """dx + (1/2)[x, x]; the element is Maurer-Cartan iff this vanishes."""
    if ctx.degree(x) != 1:
        raise MCError("Maurer-Cartan elements have degree 1")
    return ctx.add(ctx.d(x), ctx.scale(Fraction(1, 2), ctx.bracket(x, x)))


def mc_check(ctx, x) -> bool:
    return ctx.is_zero(mc_residual(ctx, x))


def gauge_act(ctx, a, x, check: bool = True):
    """e^a * x = x + sum_{n>=0} ad_a^n([a,x] - da)/(n+1)!; exact and finite.

    When x is Maurer-Cartan the result is verified to be Maurer-Cartan too.
    """
    if ctx.degree(a) != 0 or ctx.degree(x) != 1:
        raise MCError("gauge needs a degree-0 actor and a degree-1 element")
    was_mc = mc_check(ctx, x) if check else False
    y = ctx.sub(ctx.bracket(a, x), ctx.d(a))
    acc = ctx.add(x, y)
    term = y
    n = 1
    while True:
        term = ctx.scale(Fraction(1, n + 1), ctx.bracket(a, term))
        if ctx.is_zero(term):
            break
        acc = ctx.add(acc, term)
        n += 1
        if n > MAX_SERIES:
            raise MCError("gauge series did not truncate")
    if check and was_mc and not mc_check(ctx, acc):
        raise MCError("gauge action failed to preserve Maurer-Cartan")
    return acc


def bch(ctx, a, b):
    """a bullet b = log(exp a . exp b) through the context's operator action."""
    if ctx.degree(a) != 0 or ctx.degree(b) != 0:
        raise MCError("BCH product needs degree-0 elements")
    if not (ctx.in_max_ideal(a) and ctx.in_max_ideal(b)):
        raise MCError("BCH product needs maximal-ideal elements")
    return ctx.bch(a, b)


# ---------------------------------------------------------------------------
# tangent/obstruction dimensions and the isomorphism criterion
# ---------------------------------------------------------------------------

def tangent_obstruction(L) -> tuple:
    """(dim H^1, dim H^2) for anything exposing cohomology_dims()."""
    dims = L.cohomology_dims()
    return dims.get(1, 0), dims.get(2, 0)


@dataclass
class DGLAMorphism:
    """Degreewise linear map between table DGLAs, as QQ matrices."""

    source: TableDGLA
    target: TableDGLA
    maps: dict  # degree -> matrix (target.dim x source.dim)

    def matrix(self, k):
        if k in self.maps:
            return self.maps[k]
        return [[Fraction(0)] * self.source.dim(k)
                for _ in range(self.target.dim(k))]

    def check_chain_map(self) -> bool:
        def entry(m, i, j):
            return m[i][j] if i < len(m) and m and j < len(m[i]) else Fraction(0)

        for k in set(self.source.dims) | set(self.target.dims):
            rows = self.target.dim(k + 1)
            cols = self.source.dim(k)
            dt = self.target.qcomplex().matrix(k)
            ds = self.source.qcomplex().matrix(k)
            fk = self.matrix(k)
            fk1 = self.matrix(k + 1)
            for i in range(rows):
                for j in range(cols):
                    left = sum((entry(dt, i, t) * entry(fk, t, j)
                                for t in range(self.target.dim(k))), Fraction(0))
                    right = sum((entry(fk1, i, t) * entry(ds, t, j)
                                 for t in range(self.source.dim(k + 1))), Fraction(0))
                    if left != right:
                        return False
        return True

    def induced_cohomology_map(self, k):
        """Matrix of H^k(source) -> H^k(target) in representative bases."""
        sq, tq = self.source.qcomplex(), self.target.qcomplex()
        sreps = sq.cohomology_basis(k)
        treps = tq.cohomology_basis(k)
        timage = []
        if self.target.dim(k - 1):
            dm = tq.matrix(k - 1)
            for j in range(self.target.dim(k - 1)):
                timage.append([dm[i][j] for i in range(self.target.dim(k))])
        cols = []
        for v in sreps:
            img = linalg.mat_vec(self.matrix(k), v) if self.source.dim(k) else []
            # express img in treps modulo the image rows
            unknown_rows = [list(r) for r in treps] + timage
            sol = linalg.solve([list(col) for col in zip(*unknown_rows)] if unknown_rows else [],
                               img)
            if sol is None:
                raise DGLAError("image is not a cocycle class")
            cols.append(sol[:len(treps)])
        out = [[cols[j][i] for j in range(len(cols))] for i in range(len(treps))]
        return out


def functor_iso_criterion(phi: DGLAMorphism) -> dict:
    """H^0 surjective, H^1 bijective, H^2 injective => isomorphism of the
    associated deformation functors.  Reports each condition and the verdict."""
    if not phi.check_chain_map():
        raise DGLAError("not a morphism of complexes")
    h0 = phi.induced_cohomology_map(0)
    h1 = phi.induced_cohomology_map(1)
    h2 = phi.induced_cohomology_map(2)
    h0_rows = len(h0)
    h0_surj = linalg.rank(h0) == h0_rows
    h1_rows, h1_cols = len(h1), len(h1[0]) if h1 else 0
    h1_bij = (h1_rows == h1_cols) and linalg.rank(h1) == h1_rows
    h2_cols = len(h2[0]) if h2 else 0
    h2_inj = linalg.rank(h2) == h2_cols
    return {"h0_surjective": h0_surj, "h1_bijective": h1_bij,
            "h2_injective": h2_inj,
            "isomorphism": h0_surj and h1_bij and h2_inj}
