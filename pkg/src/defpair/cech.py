"""Glued schemes from affine charts, equivariant locally free sheaves and
exact Cech cohomology by torus-weight truncation.

Scope: charts are one-variable affine lines with monomial transition maps
(the projective line and gluings of the same shape); subsets of up to three
charts carry explicit overlap rings.  Sections decompose into weight lines,
each of which is a finite-dimensional exact linear-algebra problem; global
cohomology refuses rings without usable weight data instead of guessing.

Conventions: the overlap ring of a chart subset S is presented in the
coordinates of the frame chart min(S); sheaf data consists of per-chart
generator weights plus, for every pair i < j, the matrix over the overlap
ring expressing chart-j generators in chart-i generator coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional

from . import matrices as mat
from .dgla import QComplex
from .modules import FPModule, FreeComplex
from .pairs import DerivationPair, check_derivation_pair
from .poly import GREVLEX, PolyRing, Polynomial
from .rings import (ArtinAlgebra, ExtendedRing, QuotientRing, RingError,
                    RingMap, extend_ring)


class CechError(ValueError):
    pass


# ---------------------------------------------------------------------------
# weight bookkeeping
# ---------------------------------------------------------------------------

def weight_enumerable(ring: QuotientRing) -> bool:
    """Weight-w monomial bases are provably finite and degree-bounded when
    all variable weights are nonzero and opposite-weight variable products
    are reducible (the Laurent pattern)."""
    w = ring.ambient.weights
    if w is None or any(x == 0 for x in w):
        return False
    leads = [g.lead(ring.ambient.order)[0] for g in ring.gb]
    for i in range(ring.nvars):
        for j in range(i + 1, ring.nvars):
            if w[i] * w[j] < 0:
                mono = tuple(1 if t in (i, j) else 0 for t in range(ring.nvars))
                from .poly import mono_div
                if not any(mono_div(mono, l) is not None for l in leads):
                    return False
    return True


def weight_monomials(ring: QuotientRing, w: int) -> list:
    """All standard monomials of total weight w (exact, finite)."""
    if not weight_enumerable(ring):
        raise CechError("cannot truncate: ring lacks usable weight data")
    weights = ring.ambient.weights
    leads = [g.lead(ring.ambient.order)[0] for g in ring.gb]
    from .poly import mono_div
    n = ring.nvars
    cap = abs(w)
    out = []

    def rec(pos, left_deg, acc, acc_w):
        if pos == n:
            if acc_w == w:
                m = tuple(acc)
                if not any(mono_div(m, l) is not None for l in leads):
                    out.append(m)
            return
        for e in range(left_deg + 1):
            acc.append(e)
            rec(pos + 1, left_deg - e, acc, acc_w + e * weights[pos])
            acc.pop()

    rec(0, cap, [], 0)
    out.sort(key=ring.ambient.order.key)
    return out


def poly_weight_coords(ring: QuotientRing, p: Polynomial, basis_pos: dict):
    """Coordinates of a normal form in a weight-monomial basis; raises when a
    term escapes the basis (wrong weight)."""
    coords = [Fraction(0)] * len(basis_pos)
    for m, c in ring.nf(p).terms.items():
        if m not in basis_pos:
            raise CechError("element has a term outside the expected weight line")
        coords[basis_pos[m]] = c
    return coords


# ---------------------------------------------------------------------------
# glued schemes
# ---------------------------------------------------------------------------

@dataclass
class ChartInclusion:
    """Moves data from the ring of a subset to the ring of a superset."""

    ring_map: RingMap
    der_transport: list  # target-vars x source-vars matrix over the target

    def transport_derivation(self, h_values):
        tgt = self.ring_map.target
        out = []
        for row in self.der_transport:
            acc = tgt.zero()
            for c, h in zip(row, h_values):
                if not c.is_zero():
                    acc = acc + c * self.ring_map(h)
            out.append(tgt.nf(acc))
        return tuple(out)


def make_inclusion(source: QuotientRing, target: QuotientRing,
                   image_names: list) -> ChartInclusion:
    """Inclusion with variable images; derivation transport derived from the
    images (each a single target variable) and Laurent relations."""
    images = [target.var(target.variables.index(nm)) for nm in image_names]
    rmap = RingMap(source, target, tuple(images)).check()
    matched = {}
    for w, nm in enumerate(image_names):
        matched[target.variables.index(nm)] = w
    rows = []
    ncols = source.nvars
    laurent_partner = {}
    for g in target.relations:
        # recognise v*vi - 1 relations to extend derivations to inverses
        terms = dict(g.terms)
        if len(terms) == 2:
            monos = sorted(terms, key=sum)
            if sum(monos[0]) == 0 and sum(monos[1]) == 2 and \
                    sorted(monos[1]).count(1) == 2:
                idxs = [i for i, e in enumerate(monos[1]) if e == 1]
                if len(idxs) == 2 and terms[monos[1]] == -terms[monos[0]]:
                    laurent_partner[idxs[0]] = idxs[1]
                    laurent_partner[idxs[1]] = idxs[0]
    for t in range(target.nvars):
        if t in matched:
            row = [target.zero()] * ncols
            row[matched[t]] = target.one()
            rows.append(row)
        elif t in laurent_partner and laurent_partner[t] in matched:
            partner = laurent_partner[t]
            # h(v_t) = -v_t^2 h(v_partner)
            row = [target.zero()] * ncols
            vt = target.var(t)
            row[matched[partner]] = target.nf(-(vt * vt))
            rows.append(row)
        else:
            raise CechError(
                f"cannot transport derivations to {target.variables[t]!r}")
    return ChartInclusion(rmap, rows)


class GluedScheme:
    """Affine charts with explicit overlap rings for subsets of size <= 3."""

    def __init__(self, charts, rings: dict, inclusions: dict,
                 artin: Optional[ArtinAlgebra] = None):
        self.charts = list(charts)
        self.rings = {frozenset(k): v for k, v in rings.items()}
        self.inclusions = {(frozenset(a), frozenset(b)): v
                           for (a, b), v in inclusions.items()}
        self.artin = artin
        for i, ch in enumerate(self.charts):
            self.rings.setdefault(frozenset([i]), ch)

    @property
    def nchart(self) -> int:
        return len(self.charts)

    def ring(self, indices) -> QuotientRing:
        key = frozenset(indices)
        if key not in self.rings:
            raise CechError(f"no overlap ring for charts {sorted(key)}")
        return self.rings[key]

    def frame(self, indices) -> int:
        return min(indices)

    def inclusion(self, sub, sup) -> ChartInclusion:
        a, b = frozenset(sub), frozenset(sup)
        if a == b:
            ring = self.ring(a)
            ident = RingMap.identity(ring)
            rows = [[ring.one() if i == j else ring.zero()
                     for j in range(ring.nvars)] for i in range(ring.nvars)]
            return ChartInclusion(ident, rows)
        if (a, b) not in self.inclusions:
            raise CechError(f"no inclusion {sorted(a)} -> {sorted(b)}")
        return self.inclusions[(a, b)]

    def subsets(self, size):
        return [frozenset(c) for c in combinations(range(self.nchart), size)]


def projective_line() -> GluedScheme:
    """Two charts QQ[s], QQ[t] glued by t = 1/s, with torus weights 1, -1."""
    c0 = QuotientRing(PolyRing(("s",), GREVLEX, weights=(1,)), smooth_claimed=True)
    c1 = QuotientRing(PolyRing(("t",), GREVLEX, weights=(-1,)), smooth_claimed=True)
    amb = PolyRing(("s", "si"), GREVLEX, weights=(1, -1))
    o01 = QuotientRing(amb, [amb.parse("s*si - 1")], smooth_claimed=True)
    rings = {(0, 1): o01}
    inclusions = {
        ((0,), (0, 1)): make_inclusion(c0, o01, ["s"]),
        ((1,), (0, 1)): make_inclusion(c1, o01, ["si"]),
    }
    return GluedScheme([c0, c1], rings, inclusions)


def projective_line_three_charts() -> GluedScheme:
    """The projective line covered by (U_0, U_1, U_0-again): a redundant
    third chart that produces genuine triple overlaps for cocycle tests."""
    base = projective_line()
    c0, c1 = base.charts
    c2 = QuotientRing(PolyRing(("u",), GREVLEX, weights=(1,)), smooth_claimed=True)
    o01 = base.ring((0, 1))
    # overlap of charts 1 and 2 in chart-1 coordinates
    amb12 = PolyRing(("t", "ti"), GREVLEX, weights=(-1, 1))
    o12 = QuotientRing(amb12, [amb12.parse("t*ti - 1")], smooth_claimed=True)
    rings = {(0, 1): o01, (0, 2): c0, (1, 2): o12, (0, 1, 2): o01}
    inclusions = dict(base.inclusions)
    inclusions.update({
        ((0,), (0, 2)): make_inclusion(c0, c0, ["s"]),
        ((2,), (0, 2)): make_inclusion(c2, c0, ["s"]),
        ((1,), (1, 2)): make_inclusion(c1, o12, ["t"]),
        ((2,), (1, 2)): make_inclusion(c2, o12, ["ti"]),
        ((0,), (0, 1, 2)): make_inclusion(c0, o01, ["s"]),
        ((1,), (0, 1, 2)): make_inclusion(c1, o01, ["si"]),
        ((2,), (0, 1, 2)): make_inclusion(c2, o01, ["s"]),
        ((0, 1), (0, 1, 2)): make_inclusion(o01, o01, ["s", "si"]),
        ((0, 2), (0, 1, 2)): make_inclusion(c0, o01, ["s"]),
        ((1, 2), (0, 1, 2)): make_inclusion(o12, o01, ["si", "s"]),
    })
    return GluedScheme([c0, c1, c2], rings, inclusions)


def extend_scheme(X: GluedScheme, A: ArtinAlgebra) -> GluedScheme:
    """Scalar-extend every ring and inclusion of the scheme by A."""
    ext_rings = {}
    cache = {}

    def ext(ring):
        if id(ring) not in cache:
            cache[id(ring)] = extend_ring(ring, A)
        return cache[id(ring)]

    charts = [ext(c) for c in X.charts]
    for key, ring in X.rings.items():
        ext_rings[tuple(sorted(key))] = ext(ring)
    inclusions = {}
    for (a, b), inc in X.inclusions.items():
        src, tgt = ext(inc.ring_map.source), ext(inc.ring_map.target)
        nb_src = inc.ring_map.source.nvars
        nb_tgt = inc.ring_map.target.nvars
        images = tuple(tgt.from_base(p) for p in inc.ring_map.images) + \
            tuple(tgt.var(nb_tgt + k) for k in range(src.nvars - nb_src))
        rmap = RingMap(src, tgt, images)
        rows = []
        for r in inc.der_transport:
            rows.append([tgt.from_base(c) for c in r] +
                        [tgt.zero()] * (src.nvars - len(r)))
        # Artin variables are fixed; their derivation components vanish
        for i in range(inc.ring_map.target.nvars, tgt.nvars):
            row = [tgt.zero()] * src.nvars
            row[inc.ring_map.source.nvars + (i - inc.ring_map.target.nvars)] = tgt.one()
            rows.append(row)
        inclusions[(tuple(sorted(a)), tuple(sorted(b)))] = ChartInclusion(rmap, rows)
    return GluedScheme(charts, ext_rings, inclusions, artin=A)


# ---------------------------------------------------------------------------
# equivariant locally free sheaves
# ---------------------------------------------------------------------------

class LocallyFreeSheaf:
    """Locally free sheaf on a glued scheme.

    rank r; weights[i] = generator weights on chart i; pair_matrices[(i, j)]
    for i < j = r x r matrix over ring({i,j}) expressing chart-j generators
    in chart-i generator coordinates.
    """

    def __init__(self, scheme: GluedScheme, rank: int, weights: dict,
                 pair_matrices: dict, name: str = "F"):
        self.scheme = scheme
        self.rank = rank
        self.weights = {i: tuple(w) for i, w in weights.items()}
        self.pair_matrices = {tuple(sorted(k)): v for k, v in pair_matrices.items()}
        self.name = name
        for i in range(scheme.nchart):
            if len(self.weights.get(i, ())) != rank:
                raise CechError("one weight per generator per chart expected")

    def pair_matrix(self, i, j):
        """Chart-j generator coordinates -> chart-i coordinates, over
        ring({i,j}); requires i < j."""
        if i >= j:
            raise CechError("pair matrices are stored for i < j")
        return self.pair_matrices[(i, j)]

    def frame_matrix(self, subset, i):
        """Convert chart-i coordinates into frame coordinates over ring(S)."""
        S = frozenset(subset)
        ring = self.scheme.ring(S)
        f = self.scheme.frame(S)
        if i == f:
            return mat.identity_matrix(ring, self.rank)
        pair = frozenset((f, i))
        inc = self.scheme.inclusion(pair, S)
        m = self.pair_matrix(f, i)
        return [[inc.ring_map(x) for x in row] for row in m]

    def restrict(self, chart_i, subset, coords):
        """Restrict a chart-i section to the overlap, in frame coordinates."""
        S = frozenset(subset)
        ring = self.scheme.ring(S)
        inc = self.scheme.inclusion(frozenset([chart_i]), S)
        mapped = tuple(inc.ring_map(c) for c in coords)
        return mat.mat_vec(ring, self.frame_matrix(S, chart_i), mapped)

    def restrict_between(self, sub, sup, coords):
        """Restrict frame coordinates over ring(sub) to ring(sup)."""
        a, b = frozenset(sub), frozenset(sup)
        ring = self.scheme.ring(b)
        inc = self.scheme.inclusion(a, b)
        mapped = tuple(inc.ring_map(c) for c in coords)
        fa, fb = self.scheme.frame(a), self.scheme.frame(b)
        if fa == fb:
            return tuple(ring.nf(c) for c in mapped)
        conv = self.frame_matrix(b, fa)
        return mat.mat_vec(ring, conv, mapped)

    def check_transitions(self) -> bool:
        """Cocycle condition of the gluing data on all stored triples."""
        ok = True
        for S in self.scheme.subsets(3):
            if S not in [frozenset(x) for x in self.scheme.rings]:
                continue
            i, j, k = sorted(S)
            ring = self.scheme.ring(S)
            mij = self._mapped_pair(i, j, S)
            mjk = self._mapped_pair(j, k, S)
            mik = self._mapped_pair(i, k, S)
            if not mat.mat_eq(mat.mat_mul(ring, mij, mjk), mik):
                ok = False
        return ok

    def _mapped_pair(self, i, j, S):
        inc = self.scheme.inclusion(frozenset((i, j)), frozenset(S))
        m = self.pair_matrix(i, j)
        return [[inc.ring_map(x) for x in row] for row in m]

    def section_basis(self, subset, w):
        """Weight-w basis of sections over ring(S): (monomial, generator)."""
        S = frozenset(subset)
        ring = self.scheme.ring(S)
        f = self.scheme.frame(S)
        out = []
        for a in range(self.rank):
            for m in weight_monomials(ring, w - self.weights[f][a]):
                out.append((m, a))
        return out

    def section_coords(self, subset, w, vec, basis=None):
        S = frozenset(subset)
        ring = self.scheme.ring(S)
        f = self.scheme.frame(S)
        basis = basis if basis is not None else self.section_basis(subset, w)
        pos = {lab: t for t, lab in enumerate(basis)}
        coords = [Fraction(0)] * len(basis)
        for a, p in enumerate(vec):
            for m, c in ring.nf(p).terms.items():
                key = (m, a)
                if key not in pos:
                    raise CechError("section term escapes the weight basis")
                coords[pos[key]] = c
        return coords

    def weight_span(self):
        """[min, max] generator weight over all charts."""
        lo = min(min(w) for w in self.weights.values())
        hi = max(max(w) for w in self.weights.values())
        return lo, hi


# -- constructors on the projective line -------------------------------------

def structure_sheaf(X: GluedScheme) -> LocallyFreeSheaf:
    weights = {i: (0,) for i in range(X.nchart)}
    pm = {}
    for S in X.subsets(2):
        i, j = sorted(S)
        pm[(i, j)] = [[X.ring(S).one()]]
    return LocallyFreeSheaf(X, 1, weights, pm, name="O")


def line_bundle(X: GluedScheme, k: int) -> LocallyFreeSheaf:
    """O(k) on the projective line (and its redundant-chart variant).

    Chart-1 is the t-chart; its generator has weight k, and e_1 = s^k e_0 on
    the overlap.  Redundant charts copy chart 0.
    """
    weights = {}
    pm = {}
    for i in range(X.nchart):
        # t-charts carry the twist; s-charts are the reference trivialisation
        w = X.charts[i].ambient.weights[0]
        weights[i] = (k,) if w < 0 else (0,)
    for S in X.subsets(2):
        i, j = sorted(S)
        ring = X.ring(S)
        wi = X.charts[i].ambient.weights[0]
        wj = X.charts[j].ambient.weights[0]
        if wi == wj:
            pm[(i, j)] = [[ring.one()]]
            continue
        # frame chart i; express the twisted generator of the t-chart
        target_w = weights[j][0] - weights[i][0]
        entry = _monomial_of_weight(ring, target_w)
        pm[(i, j)] = [[entry]]
    return LocallyFreeSheaf(X, 1, weights, pm, name=f"O({k})")


def _monomial_of_weight(ring: QuotientRing, w: int) -> Polynomial:
    ms = weight_monomials(ring, w)
    if len(ms) != 1:
        raise CechError(f"no unique weight-{w} monomial in {ring!r}")
    return ring.ambient.monomial(ms[0])


def tangent_sheaf(X: GluedScheme) -> LocallyFreeSheaf:
    """Derivations, trivialised on chart i by d/d(chart variable)."""
    weights = {}
    pm = {}
    for i in range(X.nchart):
        weights[i] = (-X.charts[i].ambient.weights[0],)
    for S in X.subsets(2):
        i, j = sorted(S)
        ring = X.ring(S)
        inc_j = X.inclusion(frozenset([j]), frozenset(S))
        # transport the chart-j frame derivation and read its coordinate on
        # the frame variable of chart i
        hv = inc_j.transport_derivation((X.charts[j].one(),))
        frame_var = X.inclusion(frozenset([i]), frozenset(S)).ring_map.images[0]
        # coordinate of the transported field on the frame generator d/ds
        coord = ring.apply_derivation(hv, frame_var)
        pm[(i, j)] = [[coord]]
    return LocallyFreeSheaf(X, 1, weights, pm, name="Theta")


def sheaf_hom(F: LocallyFreeSheaf, G: LocallyFreeSheaf) -> LocallyFreeSheaf:
    """Hom(F, G) with the conjugation gluing."""
    X = F.scheme
    r, s = F.rank, G.rank
    weights = {}
    for i in range(X.nchart):
        ws = []
        for a in range(s):
            for b in range(r):
                ws.append(G.weights[i][a] - F.weights[i][b])
        weights[i] = tuple(ws)
    pm = {}
    for S in X.subsets(2):
        i, j = sorted(S)
        ring = X.ring(S)
        MG = G.pair_matrix(i, j)
        MF = F.pair_matrix(i, j)
        NF = mat.mat_inverse(ring, MF)
        if NF is None:
            raise CechError("transition matrix is not invertible")
        big = mat.zero_matrix(ring, s * r, s * r)
        # column index of E_ab is a*r + b; f -> MG f NF entrywise
        for a in range(s):
            for b in range(r):
                col = a * r + b
                for c in range(s):
                    for dd in range(r):
                        big[c * r + dd][col] = ring.nf(MG[c][a] * NF[b][dd])
        pm[(i, j)] = big
    return LocallyFreeSheaf(X, s * r, weights, pm,
                            name=f"Hom({F.name},{G.name})")


def pair_sheaf(F: LocallyFreeSheaf) -> LocallyFreeSheaf:
    """The sheaf of derivations of the pair (structure sheaf, F).

    Frame on chart i: (the chart frame derivation with zero values, then the
    elementary endomorphisms E_ab).  Gluing is derived by transporting the
    pair generators, which produces the twisted extension of Theta by
    End(F).
    """
    X = F.scheme
    r = F.rank
    rank = 1 + r * r
    theta = tangent_sheaf(X)
    weights = {}
    for i in range(X.nchart):
        ws = [theta.weights[i][0]]
        for a in range(r):
            for b in range(r):
                ws.append(F.weights[i][a] - F.weights[i][b])
        weights[i] = tuple(ws)
    pm = {}
    for S in X.subsets(2):
        i, j = sorted(S)
        ring = X.ring(S)
        M = F.pair_matrix(i, j)
        N = mat.mat_inverse(ring, M)
        if N is None:
            raise CechError("transition matrix is not invertible")
        inc_j = X.inclusion(frozenset([j]), frozenset(S))
        cols = []
        # transported anchor generator of chart j
        hv = inc_j.transport_derivation((X.charts[j].one(),))
        frame_var = X.inclusion(frozenset([i]), frozenset(S)).ring_map.images[0]
        anchor_coord = ring.apply_derivation(hv, frame_var)
        # u'-matrix of the transported (d/dt, 0) pair: M . h'(N)
        hN = [[ring.apply_derivation(hv, N[p][q]) for q in range(r)]
              for p in range(r)]
        u_theta = mat.mat_mul(ring, M, hN)
        col = [anchor_coord]
        for a in range(r):
            for b in range(r):
                col.append(u_theta[a][b])
        cols.append(tuple(col))
        # endomorphism generators conjugate: E_ab -> M E_ab N
        for a in range(r):
            for b in range(r):
                conj = mat.zero_matrix(ring, r, r)
                for p in range(r):
                    for q in range(r):
                        conj[p][q] = ring.nf(M[p][a] * N[b][q])
                col = [ring.zero()]
                for p in range(r):
                    for q in range(r):
                        col.append(conj[p][q])
                cols.append(tuple(col))
        pm[(i, j)] = mat.mat_from_columns(ring, cols, rank)
    return LocallyFreeSheaf(X, rank, weights, pm, name=f"D({F.name})")


def det_line(F: LocallyFreeSheaf) -> LocallyFreeSheaf:
    """Top exterior power of F."""
    X = F.scheme
    weights = {i: (sum(F.weights[i]),) for i in range(X.nchart)}
    pm = {}
    for S in X.subsets(2):
        i, j = sorted(S)
        ring = X.ring(S)
        pm[(i, j)] = [[mat.det(ring, F.pair_matrix(i, j))]]
    return LocallyFreeSheaf(X, 1, weights, pm, name=f"det({F.name})")


def dual_line(L: LocallyFreeSheaf) -> LocallyFreeSheaf:
    if L.rank != 1:
        raise CechError("dual implemented for line sheaves")
    X = L.scheme
    weights = {i: (-L.weights[i][0],) for i in range(X.nchart)}
    pm = {}
    for S in X.subsets(2):
        i, j = sorted(S)
        ring = X.ring(S)
        inv = ring.inverse(L.pair_matrix(i, j)[0][0])
        if inv is None:
            raise CechError("transition is not a unit")
        pm[(i, j)] = [[inv]]
    return LocallyFreeSheaf(X, 1, weights, pm, name=f"{L.name}^")


def tensor_lines(A: LocallyFreeSheaf, B: LocallyFreeSheaf) -> LocallyFreeSheaf:
    if A.rank != 1 or B.rank != 1:
        raise CechError("tensor implemented for line sheaves")
    X = A.scheme
    weights = {i: (A.weights[i][0] + B.weights[i][0],) for i in range(X.nchart)}
    pm = {}
    for S in X.subsets(2):
        i, j = sorted(S)
        ring = X.ring(S)
        pm[(i, j)] = [[ring.nf(A.pair_matrix(i, j)[0][0] * B.pair_matrix(i, j)[0][0])]]
    return LocallyFreeSheaf(X, 1, weights, pm, name=f"{A.name}(x){B.name}")


def det_of_complex(sheaves: dict) -> LocallyFreeSheaf:
    """Alternating determinant line (x)_j det(E^j)^{(-1)^j} of a complex of
    sheaves given as {degree: LocallyFreeSheaf}."""
    acc = None
    for j in sorted(sheaves):
        piece = det_line(sheaves[j])
        if j % 2:
            piece = dual_line(piece)
        acc = piece if acc is None else tensor_lines(acc, piece)
    if acc is None:
        raise CechError("empty complex has no determinant data")
    return acc


# ---------------------------------------------------------------------------
# Cech cohomology (ordered cochains, weight by weight)
# ---------------------------------------------------------------------------

def cech_weight_complex(X: GluedScheme, F: LocallyFreeSheaf, w: int):
    """The ordered Cech complex of the weight-w line as a QComplex, together
    with the labelled bases per degree."""
    levels = {}
    bases = {}
    max_p = min(X.nchart, 3)
    for p in range(max_p):
        tuples = sorted(tuple(sorted(S)) for S in X.subsets(p + 1))
        labels = []
        for tup in tuples:
            for lab in F.section_basis(tup, w):
                labels.append((tup, lab))
        bases[p] = labels
        levels[p] = len(labels)
    maps = {}
    for p in range(max_p - 1):
        rows = len(bases[p + 1])
        cols = len(bases[p])
        matrix = [[Fraction(0)] * cols for _ in range(rows)]
        tpos = {}
        for t, (tup, lab) in enumerate(bases[p + 1]):
            tpos.setdefault(tup, {})[lab] = t
        for c, (tup, (mono, gen)) in enumerate(bases[p]):
            ring = X.ring(tup)
            vec = [ring.zero()] * F.rank
            vec[gen] = ring.ambient.monomial(mono)
            for sup in sorted(tuple(sorted(S)) for S in X.subsets(p + 2)):
                if not set(tup) <= set(sup):
                    continue
                # position of the omitted index gives the sign
                omitted = (set(sup) - set(tup)).pop()
                h = sorted(sup).index(omitted)
                sign = Fraction((-1) ** h)
                restricted = F.restrict_between(tup, sup, vec)
                sup_basis = F.section_basis(sup, w)
                coords = F.section_coords(sup, w, restricted, basis=sup_basis)
                for x, lab2 in zip(coords, sup_basis):
                    if x:
                        matrix[tpos[sup][lab2]][c] += sign * x
        maps[p] = matrix
    return QComplex(dict(levels), maps), bases


def cech_cohomology(X: GluedScheme, F: LocallyFreeSheaf,
                    weight_bounds: Optional[tuple] = None, margin: int = 2) -> dict:
    """Cohomology dimensions per degree, summed over the weight window.

    The window defaults to the generator-weight span; weights on a margin
    strip around the window are verified to contribute nothing, which pins
    the certificate for the shipped two-chart geometries.
    """
    if weight_bounds is None:
        lo, hi = F.weight_span()
        weight_bounds = (lo - 1, hi + 1)
    lo, hi = weight_bounds
    dims = {}
    by_weight = {}
    for w in range(lo - margin, hi + margin + 1):
        qc, _ = cech_weight_complex(X, F, w)
        h = qc.cohomology()
        by_weight[w] = h
        inside = lo <= w <= hi
        for p, v in h.items():
            if v and not inside:
                raise CechError(
                    f"weight {w} outside the window contributes to H^{p}; "
                    "enlarge the bounds")
            dims[p] = dims.get(p, 0) + (v if inside else 0)
    return {"dims": dims, "by_weight": by_weight, "window": (lo, hi)}


@dataclass
class SheafCohomology:
    """Adapter exposing cohomology_dims() for tangent/obstruction queries."""

    X: GluedScheme
    F: LocallyFreeSheaf
    bounds: Optional[tuple] = None

    def cohomology_dims(self):
        return cech_cohomology(self.X, self.F, self.bounds)["dims"]
