"""Cech-level deformation data: semicosimplicial structure, gluing-cocycle
conditions, locally trivial deformations, pair tangent spaces and the trace
of cocycles down to the determinant line.

All conditions are verified exactly over a fixed Artin coefficient algebra;
no truncation is involved in the checks themselves.  Dimension counts
(tangent spaces, first-order classification) go through the weight-graded
Cech machinery of the sheaf layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional

from . import matrices as mat
from .cech import (CechError, GluedScheme, LocallyFreeSheaf, cech_cohomology,
                   cech_weight_complex, det_of_complex, extend_scheme,
                   pair_sheaf, sheaf_hom, structure_sheaf, tangent_sheaf)
from .dgla import (GradedMap, PairChain, PairComplexDGLA, QComplex, TraceData,
                   pair_complex_dgla)
from .mc import PairContext, gauge_act, mc_check
from .modules import FPModule, FreeComplex
from .pairs import (AutomorphismPair, DerivationPair, check_derivation_pair,
                    exp_pair, identity_auto)
from .poly import Polynomial
from .rings import ArtinAlgebra, QuotientRing, RingMap


# ---------------------------------------------------------------------------
# complexes of sheaves
# ---------------------------------------------------------------------------

class SheafComplex:
    """Bounded complex of locally free sheaves with per-chart differentials.

    chart_diffs[j][i] is the matrix of d: E^j -> E^{j+1} over chart i, in
    chart-i coordinates; compatibility with the gluing is checked on pairs.
    """

    def __init__(self, X: GluedScheme, sheaves: dict, chart_diffs: Optional[dict] = None):
        self.X = X
        self.sheaves = dict(sheaves)
        self.chart_diffs = chart_diffs or {}
        for i in range(X.nchart):
            self.chart_free_complex((i,))  # validates d o d = 0 chartwise
        for S in X.subsets(2):
            self._check_diff_compat(tuple(sorted(S)))

    @property
    def degrees(self):
        return sorted(self.sheaves)

    def rank(self, j) -> int:
        return self.sheaves[j].rank if j in self.sheaves else 0

    def frame_diff(self, subset, j):
        """Differential E^j -> E^{j+1} over ring(S) in frame coordinates."""
        S = tuple(sorted(subset))
        ring = self.X.ring(S)
        f = self.X.frame(S)
        if j not in self.chart_diffs or self.rank(j) == 0 or self.rank(j + 1) == 0:
            return mat.zero_matrix(ring, self.rank(j + 1), self.rank(j))
        inc = self.X.inclusion(frozenset([f]), frozenset(S))
        m = self.chart_diffs[j][f]
        return [[inc.ring_map(x) for x in row] for row in m]

    def chart_free_complex(self, subset) -> FreeComplex:
        S = tuple(sorted(subset))
        ring = self.X.ring(S)
        ranks = {j: self.rank(j) for j in self.degrees}
        diffs = {}
        for j in self.degrees:
            if self.rank(j) and self.rank(j + 1):
                diffs[j] = self.frame_diff(S, j)
        return FreeComplex(ring, ranks, diffs)

    def _check_diff_compat(self, S):
        ring = self.X.ring(S)
        i, j = S
        for deg in self.degrees:
            if self.rank(deg) == 0 or self.rank(deg + 1) == 0:
                continue
            if deg not in self.chart_diffs:
                continue
            # frame version must match the conjugated chart-j version
            dj = self.chart_diffs[deg][j]
            inc_j = self.X.inclusion(frozenset([j]), frozenset(S))
            mapped = [[inc_j.ring_map(x) for x in row] for row in dj]
            Mj1 = self.sheaves[deg + 1].frame_matrix(S, j)
            Mj0 = self.sheaves[deg].frame_matrix(S, j)
            N = mat.mat_inverse(ring, Mj0)
            if N is None:
                raise CechError("transition not invertible")
            conj = mat.mat_mul(ring, Mj1, mat.mat_mul(ring, mapped, N))
            if not mat.mat_eq(conj, self.frame_diff(S, deg)):
                raise CechError(f"differential at degree {deg} does not glue on {S}")


def resolution_complex(X: GluedScheme, F: LocallyFreeSheaf) -> SheafComplex:
    """A locally free sheaf viewed as its own length-zero resolution."""
    return SheafComplex(X, {0: F})


# ---------------------------------------------------------------------------
# semicosimplicial levels and faces (all tuples, sizes <= 3)
# ---------------------------------------------------------------------------

@dataclass
class Semicosimplicial:
    """Cech levels of a sheaf over all (k+1)-tuples, with face operators."""

    X: GluedScheme
    F: LocallyFreeSheaf
    depth: int = 2

    def tuples(self, k):
        return list(product(range(self.X.nchart), repeat=k + 1))

    def level_ring(self, tup):
        return self.X.ring(tuple(sorted(set(tup))))

    def face(self, h, family: dict, k: int) -> dict:
        """The h-th face from level k-1 to level k (restriction families)."""
        out = {}
        for tup in self.tuples(k):
            src = tup[:h] + tup[h + 1:]
            sec = family[src]
            out[tup] = self.F.restrict_between(tuple(sorted(set(src))),
                                               tuple(sorted(set(tup))), sec)
        return out

    def check_simplicial_identities(self) -> bool:
        """d_{k+1} d_l = d_l d_k for k >= l, verified on generator sections."""
        ok = True
        for gen in range(self.F.rank):
            family = {}
            for tup in self.tuples(0):
                ring = self.level_ring(tup)
                vec = [ring.zero()] * self.F.rank
                vec[gen] = ring.one()
                family[tup] = tuple(vec)
            for k in range(2):
                for l in range(k + 1):
                    left = self.face(k + 1, self.face(l, family, 1), 2) if k >= l else None
                    right = self.face(l, self.face(k, family, 1), 2)
                    if left is None:
                        continue
                    for tup in self.tuples(2):
                        ring = self.level_ring(tup)
                        if any(not ring.nf(a - b).is_zero()
                               for a, b in zip(left[tup], right[tup])):
                            ok = False
        return ok


def build_semicosimplicial(X: GluedScheme, F: LocallyFreeSheaf) -> Semicosimplicial:
    if X.nchart == 0:
        raise CechError("empty cover")
    sc = Semicosimplicial(X, F)
    if not sc.check_simplicial_identities():
        raise CechError("simplicial identities fail: incompatible transitions")
    return sc


# ---------------------------------------------------------------------------
# deformation space over an Artin algebra
# ---------------------------------------------------------------------------

class DeformationSpace:
    """Per-tuple pair complexes of a sheaf complex, scalar-extended by A."""

    def __init__(self, SC: SheafComplex, A: ArtinAlgebra):
        self.base = SC
        self.A = A
        self.XE = extend_scheme(SC.X, A)
        self._cplx = {}
        self._ctx = {}

    def ring(self, subset):
        return self.XE.ring(tuple(sorted(set(subset))))

    def pair_complex(self, subset) -> PairComplexDGLA:
        key = tuple(sorted(set(subset)))
        if key not in self._cplx:
            ring = self.XE.ring(key)
            ranks = {j: self.base.rank(j) for j in self.base.degrees}
            diffs = {}
            for j in self.base.degrees:
                if self.base.rank(j) and self.base.rank(j + 1):
                    m = self.base.frame_diff(key, j)
                    diffs[j] = [[ring.from_base(x) for x in row] for row in m]
            cx = FreeComplex(ring, ranks, diffs)
            self._cplx[key] = pair_complex_dgla(ring, cx)
        return self._cplx[key]

    def context(self, subset) -> PairContext:
        key = tuple(sorted(set(subset)))
        if key not in self._ctx:
            self._ctx[key] = PairContext(self.pair_complex(key))
        return self._ctx[key]

    # -- frame conversion matrices over extended rings ---------------------
    def _frame_change(self, j, sub, sup):
        """Degree-j frame conversion (frame(sub) coords -> frame(sup)) over
        the extended ring of sup."""
        subk = tuple(sorted(set(sub)))
        supk = tuple(sorted(set(sup)))
        ring = self.XE.ring(supk)
        fa = self.base.X.frame(subk)
        fb = self.base.X.frame(supk)
        if fa == fb:
            return mat.identity_matrix(ring, self.base.rank(j))
        base_m = self.base.sheaves[j].frame_matrix(supk, fa)
        return [[ring.from_base(x) for x in row] for row in base_m]

    def restrict_hom(self, sub, sup, f: GradedMap) -> GradedMap:
        """Move a graded map to a larger overlap, conjugating frames."""
        subk = tuple(sorted(set(sub)))
        supk = tuple(sorted(set(sup)))
        ring = self.XE.ring(supk)
        inc = self.XE.inclusion(frozenset(subk), frozenset(supk))
        blocks = {}
        for j, m in f.blocks:
            mapped = [[inc.ring_map(x) for x in row] for row in m]
            C1 = self._frame_change(j + f.degree, subk, supk)
            C0 = self._frame_change(j, subk, supk)
            N0 = mat.mat_inverse(ring, C0)
            if N0 is None:
                raise CechError("frame change is not invertible")
            blocks[j] = mat.mat_mul(ring, C1, mat.mat_mul(ring, mapped, N0))
        return self.pair_complex(supk).hom.from_blocks(f.degree, blocks)

    def restrict_chain(self, sub, sup, chain: PairChain) -> PairChain:
        """Move a degree-zero pair chain to a larger overlap."""
        subk = tuple(sorted(set(sub)))
        supk = tuple(sorted(set(sup)))
        ring = self.XE.ring(supk)
        inc = self.XE.inclusion(frozenset(subk), frozenset(supk))
        h = inc.transport_derivation(chain.h_values)
        blocks = {}
        for j in self.base.degrees:
            if self.base.rank(j) == 0:
                continue
            U = chain.block(j)
            mapped = [[inc.ring_map(x) for x in row] for row in U]
            C = self._frame_change(j, subk, supk)
            N = mat.mat_inverse(ring, C)
            if N is None:
                raise CechError("frame change is not invertible")
            conj = mat.mat_mul(ring, C, mat.mat_mul(ring, mapped, N))
            hN = [[ring.apply_derivation(h, N[p][q]) for q in range(len(N[0]))]
                  for p in range(len(N))]
            corr = mat.mat_mul(ring, C, hN)
            blocks[j] = mat.mat_add(ring, conj, corr)
        return self.pair_complex(supk).pair_chain(h, blocks)

    # -- convention: antisymmetric extension of pair-indexed data ------------
    def pair_entry(self, m: dict, i, j) -> PairChain:
        D = self.pair_complex((i, j))
        if i == j:
            return D.zero_pair()
        if (i, j) in m:
            return m[(i, j)]
        if (j, i) in m:
            return D.neg_pair(m[(j, i)])
        raise CechError(f"no cocycle component for the pair ({i},{j})")


# ---------------------------------------------------------------------------
# the gluing-cocycle conditions
# ---------------------------------------------------------------------------

def z1sc_check(space: DeformationSpace, l: dict, m: dict,
               n: Optional[dict] = None) -> dict:
    """The three cocycle conditions for (l, m) with homotopy witness n.

    l[i]: degree-1 graded map over chart i; m[(i,j)] for i<j: degree-0 pair
    chain over the pair overlap; n[(i,j,k)] for i<j<k: degree -1 graded map
    over the triple overlap (missing entries default to zero).  Exact.
    """
    X = space.base.X
    n = n or {}
    report = {"mc": {}, "gauge": {}, "triple": {}}
    for i in range(X.nchart):
        ctx = space.context((i,))
        report["mc"][i] = mc_check(ctx, l[i])
    for S in X.subsets(2):
        i, j = sorted(S)
        ctx = space.context((i, j))
        hom = space.pair_complex((i, j)).hom
        li = space.restrict_hom((i,), (i, j), l[i])
        lj = space.restrict_hom((j,), (i, j), l[j])
        moved = gauge_act(ctx, space.pair_entry(m, i, j), lj, check=False)
        report["gauge"][(i, j)] = hom.eq(li, moved)
    triples = [tuple(sorted(S)) for S in X.subsets(3)]
    degenerate = []
    for i in range(X.nchart):
        for j in range(X.nchart):
            for tup in ((i, i, j), (i, j, i), (j, i, i)):
                if max(tup) < X.nchart and len(set(tup)) <= 2:
                    degenerate.append(tup)
    for tup in triples + sorted(set(degenerate)):
        i, j, k = tup
        key = tuple(sorted(set(tup)))
        if frozenset(key) not in [frozenset(s) for s in space.base.X.rings]:
            continue
        D = space.pair_complex(key)
        ctx = space.context(key)
        mjk = space.restrict_chain((j, k) if j != k else (j,), key,
                                   space.pair_entry(m, j, k))
        mik = space.restrict_chain((i, k) if i != k else (i,), key,
                                   space.pair_entry(m, i, k))
        mij = space.restrict_chain((i, j) if i != j else (i,), key,
                                   space.pair_entry(m, i, j))
        lhs = ctx.log_action(ctx.compose_actions(
            ctx.exp_action(mjk),
            ctx.compose_actions(ctx.exp_action(D.neg_pair(mik)),
                                ctx.exp_action(mij))))
        witness = n.get(tup, None)
        if witness is None:
            rhs_hom = D.hom.zero(0)
        else:
            wn = space.restrict_hom(witness[0], key, witness[1]) \
                if isinstance(witness, tuple) else witness
            lj = space.restrict_hom((j,), key, l[j])
            rhs_hom = D.hom.add(D.hom.d(wn), D.hom.bracket(lj, wn))
        rhs = D.from_hom(rhs_hom)
        report["triple"][tup] = D.pair_eq(lhs, rhs)
    report["passed"] = (all(report["mc"].values()) and all(report["gauge"].values())
                        and all(report["triple"].values()))
    return report


def h1sc_equiv_check(space: DeformationSpace, lm0, lm1, a: dict, b: dict) -> dict:
    """Are (l0, m0) and (l1, m1) equivalent through the witnesses a, b?

    a[i]: degree-0 pair chain per chart; b[(i,j)]: degree -1 graded map per
    pair.  Verifies e^{a_i} * l0_i = l1_i and the pair-level BCH condition
    -m0 . -a_i . m1 . a_j = db + [l0_j, b] exactly.
    """
    l0, m0 = lm0
    l1, m1 = lm1
    X = space.base.X
    report = {"chart": {}, "pair": {}}
    for i in range(X.nchart):
        ctx = space.context((i,))
        hom = space.pair_complex((i,)).hom
        report["chart"][i] = hom.eq(gauge_act(ctx, a[i], l0[i], check=False), l1[i])
    for S in X.subsets(2):
        i, j = sorted(S)
        key = (i, j)
        D = space.pair_complex(key)
        ctx = space.context(key)
        ai = space.restrict_chain((i,), key, a[i])
        aj = space.restrict_chain((j,), key, a[j])
        terms = [D.neg_pair(space.pair_entry(m0, i, j)), D.neg_pair(ai),
                 space.pair_entry(m1, i, j), aj]
        action = None
        for t in terms:
            e = ctx.exp_action(t)
            action = e if action is None else ctx.compose_actions(action, e)
        lhs = ctx.log_action(action)
        bij = b.get(key)
        if bij is None:
            rhs_hom = D.hom.zero(0)
        else:
            l0j = space.restrict_hom((j,), key, l0[j])
            rhs_hom = D.hom.add(D.hom.d(bij), D.hom.bracket(l0j, bij))
        report["pair"][key] = D.pair_eq(lhs, D.from_hom(rhs_hom))
    report["passed"] = all(report["chart"].values()) and all(report["pair"].values())
    return report


# ---------------------------------------------------------------------------
# locally trivial cocycles for a single sheaf
# ---------------------------------------------------------------------------

class PairCocycleSpace:
    """Derivation-pair cocycle data for a locally free sheaf (no complex)."""

    def __init__(self, X: GluedScheme, F: LocallyFreeSheaf, A: ArtinAlgebra):
        self.X = X
        self.F = F
        self.A = A
        self.XE = extend_scheme(X, A)

    def module(self, subset) -> FPModule:
        return FPModule.free(self.XE.ring(tuple(sorted(set(subset)))), self.F.rank)

    def pair(self, subset, h_values, u_matrix) -> DerivationPair:
        ring = self.XE.ring(tuple(sorted(set(subset))))
        M = self.module(subset)
        u_values = tuple(tuple(u_matrix[a][i] for a in range(self.F.rank))
                         for i in range(self.F.rank))
        return check_derivation_pair(ring, M, h_values, u_values)

    def restrict_pair(self, sub, sup, p: DerivationPair) -> DerivationPair:
        subk = tuple(sorted(set(sub)))
        supk = tuple(sorted(set(sup)))
        ring = self.XE.ring(supk)
        inc = self.XE.inclusion(frozenset(subk), frozenset(supk))
        h = inc.transport_derivation(p.h_values)
        r = self.F.rank
        U = [[p.u_values[i][a] for i in range(r)] for a in range(r)]
        mapped = [[inc.ring_map(x) for x in row] for row in U]
        fa = self.X.frame(subk)
        fb = self.X.frame(supk)
        if fa == fb:
            C = mat.identity_matrix(ring, r)
        else:
            C = [[ring.from_base(x) for x in row]
                 for row in self.F.frame_matrix(supk, fa)]
        N = mat.mat_inverse(ring, C)
        conj = mat.mat_mul(ring, C, mat.mat_mul(ring, mapped, N))
        hN = [[ring.apply_derivation(h, N[p2][q]) for q in range(r)]
              for p2 in range(r)]
        out = mat.mat_add(ring, conj, mat.mat_mul(ring, C, hN))
        return self.pair(supk, h, out)

    def entry(self, x: dict, i, j) -> DerivationPair:
        if i == j:
            ring = self.XE.ring((i,))
            M = self.module((i,))
            return DerivationPair(ring, M,
                                  tuple(ring.zero() for _ in range(ring.nvars)),
                                  tuple(M.zero() for _ in range(M.ngens)))
        if (i, j) in x:
            return x[(i, j)]
        if (j, i) in x:
            return x[(j, i)].neg()
        raise CechError(f"no component for pair ({i},{j})")


def locally_trivial_cocycle_check(space: PairCocycleSpace, x: dict) -> dict:
    """exp(x_jk) exp(-x_ik) exp(x_ij) = 1 on every stored triple overlap.

    On success returns the transition data (theta, psi) = exp(x_ij) per
    pair, re-validated as automorphism pairs.
    """
    X = space.X
    report = {"triples": {}, "passed": True}
    triples = [tuple(sorted(S)) for S in X.subsets(3)]
    degenerate = sorted({(i, i, j) for i in range(X.nchart) for j in range(X.nchart)}
                        | {(i, j, i) for i in range(X.nchart) for j in range(X.nchart)}
                        | {(i, j, j) for i in range(X.nchart) for j in range(X.nchart)})
    for tup in triples + [t for t in degenerate if len(set(t)) <= 2]:
        i, j, k = tup
        key = tuple(sorted(set(tup)))
        if frozenset(key) not in [frozenset(s) for s in X.rings]:
            continue
        pj_k = space.restrict_pair((j, k) if j != k else (j,), key,
                                   space.entry(x, j, k))
        pi_k = space.restrict_pair((i, k) if i != k else (i,), key,
                                   space.entry(x, i, k))
        pi_j = space.restrict_pair((i, j) if i != j else (i,), key,
                                   space.entry(x, i, j))
        composed = exp_pair(pj_k).compose(exp_pair(pi_k.neg())).compose(exp_pair(pi_j))
        ok = composed.is_identity()
        report["triples"][tup] = ok
        if not ok:
            report["passed"] = False
            report.setdefault("witness", tup)
    if report["passed"]:
        transitions = {}
        for key, p in x.items():
            auto = exp_pair(p)
            # re-validate the module linearity law psi(t x) = theta(t) psi(x)
            ring = auto.ring
            M = auto.module
            for v in range(ring.nvars):
                t = ring.var(v)
                for g in range(M.ngens):
                    lhs = auto.apply_phi(M.scale(t, M.gen(g)))
                    rhs = M.scale(auto.apply_theta(t), auto.apply_phi(M.gen(g)))
                    if not M.eq(lhs, rhs):
                        raise CechError("transition fails the linearity law")
            transitions[key] = auto
        report["transitions"] = transitions
    return report


def deformation_from_cocycle(space: PairCocycleSpace, x: dict) -> dict:
    """Transition data (theta_ij, psi_ij) = exp(x_ij) of a locally trivial
    deformation; raises when the cocycle condition fails."""
    rep = locally_trivial_cocycle_check(space, x)
    if not rep["passed"]:
        raise CechError(f"cocycle condition fails at triple {rep.get('witness')}")
    return rep["transitions"]


# ---------------------------------------------------------------------------
# trace of cocycles
# ---------------------------------------------------------------------------

def cech_trace(space: DeformationSpace, m: dict) -> dict:
    """Trace the degree-zero components to the determinant line.

    Returns {(i,j): DerivationPair on the rank-one module}; anchors are
    preserved verbatim.
    """
    out = {}
    for (i, j), chain in m.items():
        D = space.pair_complex((i, j))
        traced = TraceData(D).pair_trace(chain)
        out[(i, j)] = traced
    return out


def traced_cocycle_as_pairs(space: DeformationSpace, traced: dict,
                            det_space: PairCocycleSpace) -> dict:
    """Repackage traced pairs as cocycle data for the determinant sheaf."""
    out = {}
    for key, p in traced.items():
        ring = det_space.XE.ring(tuple(sorted(key)))
        out[key] = det_space.pair(tuple(sorted(key)), p.h_values,
                                  [[p.u_values[0][0]]])
    return out


# ---------------------------------------------------------------------------
# tangent spaces of the pair and the long exact sequence
# ---------------------------------------------------------------------------

def _sub_quot_indices(F_pair: LocallyFreeSheaf):
    """Coordinate split of the pair sheaf: position 0 = anchor (tangent
    quotient), the rest = endomorphism subsheaf."""
    return [0], list(range(1, F_pair.rank))


def pair_tangent_spaces(X: GluedScheme, F: LocallyFreeSheaf,
                        weight_bounds: Optional[tuple] = None) -> dict:
    """T^i of the pair (X, F) for a locally free sheaf, with the long exact
    sequence Ext^i -> T^i -> H^i(Theta) -> Ext^{i+1} certified by exact rank
    bookkeeping of the connecting maps, weight by weight."""
    D = pair_sheaf(F)
    H = sheaf_hom(F, F)
    T = tangent_sheaf(X)
    t_out = cech_cohomology(X, D, weight_bounds)
    ext_out = cech_cohomology(X, H, weight_bounds)
    th_out = cech_cohomology(X, T, weight_bounds)
    # per-weight snake bookkeeping
    lo = min(t_out["window"][0], ext_out["window"][0], th_out["window"][0])
    hi = max(t_out["window"][1], ext_out["window"][1], th_out["window"][1])
    exact = True
    max_p = min(X.nchart, 3) - 1
    for w in range(lo, hi + 1):
        qt, bt = cech_weight_complex(X, D, w)
        qe, be = cech_weight_complex(X, H, w)
        qth, bth = cech_weight_complex(X, T, w)
        # coordinate inclusion Hom -> D and projection D -> Theta per degree
        incl = {}
        proj = {}
        for p in range(max_p + 1):
            dpos = {lab: t for t, lab in enumerate(bt[p])}
            mi = [[Fraction(0)] * len(be[p]) for _ in range(len(bt[p]))]
            for c, (tup, (mono, gen)) in enumerate(be[p]):
                mi[dpos[(tup, (mono, gen + 1))]][c] = Fraction(1)
            incl[p] = mi
            mp = [[Fraction(0)] * len(bt[p]) for _ in range(len(bth[p]))]
            tpos = {lab: t for t, lab in enumerate(bth[p])}
            for c, (tup, (mono, gen)) in enumerate(bt[p]):
                if gen == 0:
                    mp[tpos[(tup, (mono, 0))]][c] = Fraction(1)
            proj[p] = mp
        for p in range(max_p + 1):
            re_, rt_, rth_ = (qe.cohomology_dim(p), qt.cohomology_dim(p),
                              qth.cohomology_dim(p))
            i_star = _induced_map(qe, qt, incl, p)
            a_star = _induced_map(qt, qth, proj, p)
            delta = _connecting_map(qe, qt, qth, incl, proj, p)
            from . import linalg
            r1 = linalg.rank(i_star)
            r2 = linalg.rank(a_star)
            r3 = linalg.rank(delta)
            if r1 + r2 != rt_:
                exact = False
            if r2 + r3 != rth_:
                exact = False
            if p + 1 <= max_p:
                nxt = linalg.rank(_induced_map(qe, qt, incl, p + 1))
                if r3 + nxt != qe.cohomology_dim(p + 1):
                    exact = False
    return {"T": t_out["dims"], "ext": ext_out["dims"], "theta": th_out["dims"],
            "les_exact": exact}


def _induced_map(src_qc: QComplex, tgt_qc: QComplex, mats: dict, p: int):
    """Induced map on H^p along a chain map given by per-degree matrices."""
    from . import linalg
    sreps = src_qc.cohomology_basis(p)
    treps = tgt_qc.cohomology_basis(p)
    timage = []
    if tgt_qc.dims.get(p - 1, 0):
        dm = tgt_qc.matrix(p - 1)
        for j in range(tgt_qc.dims[p - 1]):
            timage.append([dm[i][j] for i in range(tgt_qc.dims.get(p, 0))])
    cols = []
    for v in sreps:
        img = linalg.mat_vec(mats[p], v) if v else \
            [Fraction(0)] * len(mats[p])
        basis_rows = [list(r) for r in treps] + timage
        sol = linalg.solve([list(c) for c in zip(*basis_rows)] if basis_rows else [],
                           img)
        if sol is None:
            raise CechError("chain map image is not a cocycle class")
        cols.append(sol[:len(treps)])
    return [[cols[j][i] for j in range(len(cols))] for i in range(len(treps))]


def _connecting_map(sub_qc, tot_qc, quot_qc, incl, proj, p):
    """Snake connecting H^p(quot) -> H^{p+1}(sub) for a degreewise-split
    short exact sequence of complexes given by inclusion/projection."""
    from . import linalg
    qreps = quot_qc.cohomology_basis(p)
    sreps = sub_qc.cohomology_basis(p + 1)
    simage = []
    if sub_qc.dims.get(p, 0):
        dm = sub_qc.matrix(p)
        for j in range(sub_qc.dims[p]):
            simage.append([dm[i][j] for i in range(sub_qc.dims.get(p + 1, 0))])
    cols = []
    # splitting: lift a quotient vector through proj using the coordinate
    # structure (proj has a right inverse with 0/1 entries)
    lift = _right_inverse_01(proj[p], tot_qc.dims.get(p, 0))
    incl_left = _left_inverse_01(incl.get(p + 1, []), sub_qc.dims.get(p + 1, 0),
                                 tot_qc.dims.get(p + 1, 0))
    for v in qreps:
        lifted = linalg.mat_vec(lift, v) if v else [Fraction(0)] * tot_qc.dims.get(p, 0)
        dx = linalg.mat_vec(tot_qc.matrix(p), lifted) if tot_qc.dims.get(p + 1, 0) else []
        pulled = linalg.mat_vec(incl_left, dx) if dx else \
            [Fraction(0)] * sub_qc.dims.get(p + 1, 0)
        basis_rows = [list(r) for r in sreps] + simage
        sol = linalg.solve([list(c) for c in zip(*basis_rows)] if basis_rows else [],
                           pulled)
        if sol is None:
            raise CechError("connecting image is not a cocycle class")
        cols.append(sol[:len(sreps)])
    return [[cols[j][i] for j in range(len(cols))] for i in range(len(sreps))]


def _right_inverse_01(m, ncols):
    """Right inverse of a 0/1 coordinate projection (one 1 per row)."""
    rows = len(m)
    out = [[Fraction(0)] * rows for _ in range(ncols)]
    for i in range(rows):
        for j in range(ncols):
            if m[i][j] == 1:
                out[j][i] = Fraction(1)
                break
    return out


def _left_inverse_01(m, src_dim, tgt_dim):
    """Left inverse of a 0/1 coordinate inclusion (one 1 per column)."""
    out = [[Fraction(0)] * tgt_dim for _ in range(src_dim)]
    for j in range(src_dim):
        for i in range(tgt_dim):
            if i < len(m) and j < len(m[i]) and m[i][j] == 1:
                out[j][i] = Fraction(1)
                break
    return out


# ---------------------------------------------------------------------------
# first-order classification
# ---------------------------------------------------------------------------

def first_order_class_dims(X: GluedScheme, F: LocallyFreeSheaf,
                           weight_bounds=None) -> dict:
    """Dimensions of H^*(X, D(F)): first-order locally trivial cocycles
    modulo coboundaries in degree 1."""
    return cech_cohomology(X, pair_sheaf(F), weight_bounds)["dims"]


def section_to_pair(space: PairCocycleSpace, subset, coords_by_weight: dict,
                    eps) -> DerivationPair:
    """Build eps * (section of D(F)) as a derivation pair over the overlap.

    coords_by_weight: {weight: coordinate vector in the D(F) weight basis}.
    """
    X, F = space.X, space.F
    key = tuple(sorted(set(subset)))
    ring = space.XE.ring(key)
    Dsheaf = pair_sheaf(F)
    f = X.frame(key)
    frame_h = space.XE.inclusion(frozenset([f]), frozenset(key)) \
        .transport_derivation((space.XE.ring((f,)).one(),))
    r = F.rank
    h_total = [ring.zero()] * ring.nvars
    U = mat.zero_matrix(ring, r, r)
    base_ring = X.ring(key)
    for w, coords in coords_by_weight.items():
        basis = Dsheaf.section_basis(key, w)
        for c, (mono, gen) in zip(coords, basis):
            if not c:
                continue
            monom = ring.from_base(base_ring.ambient.monomial(mono, c))
            if gen == 0:
                for v in range(ring.nvars):
                    h_total[v] = ring.nf(h_total[v] + eps * monom * frame_h[v])
            else:
                a, b = divmod(gen - 1, r)
                U[a][b] = ring.nf(U[a][b] + eps * monom)
    return space.pair(key, tuple(h_total), U)


def solve_first_order_witness(space: PairCocycleSpace, x: dict) -> Optional[dict]:
    """Chart sections {a_i} with x_ij = a_i - a_j at first order, or None.

    Works weight by weight on the epsilon coefficient; the caller should
    re-verify via the exponential cocycle equivalence (exact by nilpotency).
    """
    X, F, A = space.X, space.F, space.A
    if A.index != 2 or len(A.m_basis) != 1:
        raise CechError("first-order solving expects a dual-numbers algebra")
    Dsheaf = pair_sheaf(F)
    eps_mono = A.m_basis[0]
    # decompose each x_ij into weight coordinates of the epsilon part
    comp = {}
    for (i, j), p in x.items():
        key = tuple(sorted((i, j)))
        comp[key] = _pair_to_section(space, key, p, eps_mono)
    # weight support of the cocycle, then one linear solve per weight
    support = set()
    for key, sec in comp.items():
        base = X.ring(key)
        for gidx, q in enumerate(sec):
            gw = Dsheaf.weights[X.frame(key)][gidx]
            for m in q.terms:
                support.add(base.ambient.mono_weight(m) + gw)
    a_coords = {i: {} for i in range(X.nchart)}
    from . import linalg
    for w in sorted(support):
        qc, bases = cech_weight_complex(X, Dsheaf, w)
        target = [Fraction(0)] * len(bases[1])
        pos = {lab: t for t, lab in enumerate(bases[1])}
        filled = False
        for key, sec in comp.items():
            base = X.ring(key)
            sec_w = _weight_slice(base, Dsheaf, X.frame(key), sec, w)
            coords = Dsheaf.section_coords(key, w, sec_w)
            for val, lab in zip(coords, Dsheaf.section_basis(key, w)):
                if val:
                    target[pos[(key, lab)]] = val
                    filled = True
        if not filled:
            continue
        # delta a = -x  (so that x = a_i - a_j on each pair)
        sol = linalg.solve(qc.matrix(0), [-t for t in target])
        if sol is None:
            return None
        for t, (tup, lab) in enumerate(bases[0]):
            if sol[t]:
                a_coords[tup[0]].setdefault(w, {})[lab] = sol[t]
    # rebuild chart sections as derivation pairs
    out = {}
    for i in range(X.nchart):
        coords_by_weight = {}
        for w, labs in a_coords[i].items():
            basis = Dsheaf.section_basis((i,), w)
            coords_by_weight[w] = [labs.get(lab, Fraction(0)) for lab in basis]
        ring = space.XE.ring((i,))
        eps = ring.from_artin(A.ambient.monomial(eps_mono))
        out[i] = section_to_pair(space, (i,), coords_by_weight, eps)
    return out


def _pair_to_section(space: PairCocycleSpace, key, p: DerivationPair, eps_mono):
    """Extract the epsilon coefficient of a first-order pair as a D(F)
    section vector over the base overlap ring."""
    X, F = space.X, space.F
    ring = space.XE.ring(key)
    base = X.ring(key)
    f = X.frame(key)
    frame_h = space.XE.inclusion(frozenset([f]), frozenset(key)) \
        .transport_derivation((space.XE.ring((f,)).one(),))
    # anchor coordinate: h = c * frame_h with c = h(frame var)/frame_h(frame var)
    frame_var_idx = 0
    denom = frame_h[frame_var_idx]
    num = p.h_values[frame_var_idx]
    # both are eps * (base element); divide exactly in the base ring
    c_anchor = _eps_coefficient(ring, base, num, eps_mono)
    d_anchor = _eps_unit_coefficient(ring, base, denom, space.A)
    theta_coord = _exact_divide(base, c_anchor, d_anchor)
    r = F.rank
    sec = [theta_coord]
    for a in range(r):
        for b in range(r):
            sec.append(_eps_coefficient(ring, base, p.u_values[b][a], eps_mono))
    return sec


def _weight_slice(base, Dsheaf, frame, sec, w):
    """Keep only the weight-w part of a section coordinate vector."""
    out = []
    for gidx, q in enumerate(sec):
        gw = Dsheaf.weights[frame][gidx]
        terms = {m: c for m, c in q.terms.items()
                 if base.ambient.mono_weight(m) == w - gw}
        out.append(Polynomial(base.ambient, terms))
    return out


def _eps_coefficient(ring, base, value, eps_mono):
    comps = ring.artin_components(value)
    piece = comps.get(eps_mono)
    if piece is None:
        return base.zero()
    return piece


def _eps_unit_coefficient(ring, base, value, A):
    comps = ring.artin_components(value)
    zero_mono = (0,) * len(A.variables)
    return comps.get(zero_mono, base.zero())


def _exact_divide(base, num: Polynomial, den: Polynomial) -> Polynomial:
    if num.is_zero():
        return base.zero()
    from .groebner import solve_in_image
    sol = solve_in_image(base.ambient, [(den,)], (num,), ideal_gens=base.gb,
                         caps=base.caps)
    if sol is None:
        raise CechError("anchor is not a multiple of the frame derivation")
    return base.nf(sol[0])
