"""Derivations and automorphisms of pairs (ring, module).

A derivation of the pair (R, M) is a couple (h, u): h a derivation of R and
u an additive endomorphism of M with u(r*m) - r*u(m) = h(r)*m.  Both maps are
stored by their values on generators; the defining law reconstructs them
everywhere, and validity amounts to exact checks on the defining relations.

Over an extension R (x) A by an Artin local algebra, pairs with values in the
maximal-ideal part are nilpotent; their exponentials are automorphism pairs
(theta, phi) with phi(r*m) = theta(r)*phi(m), and exp/log are mutually
inverse truncating series.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional

from . import matrices as mat
from .groebner import syzygies, solve_in_image, vec_is_zero
from .modules import (FPModule, FreeComplex, ModuleMap, fitting_ideal,
                      kaehler_differentials)
from .rings import ExtendedRing, QuotientRing, RingError


class PairError(ValueError):
    pass


# ---------------------------------------------------------------------------
# derivation pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DerivationPair:
    """(h, u) stored by h(x_i) per ring variable and u(e_j) per generator."""

    ring: QuotientRing
    module: FPModule
    h_values: tuple
    u_values: tuple  # one module element (coefficient tuple) per generator

    def apply_h(self, p):
        return self.ring.apply_derivation(self.h_values, p)

    def apply_u(self, vec):
        """u on a coefficient vector: sum a_j*u(e_j) + h(a_j)*e_j."""
        M = self.module
        out = list(M.zero())
        for j, a in enumerate(vec):
            if not a.is_zero():
                for t in range(M.ngens):
                    out[t] = out[t] + a * self.u_values[j][t]
            ha = self.apply_h(a)
            if not ha.is_zero():
                out[j] = out[j] + ha
        return M.nf(tuple(out))

    def is_zero(self) -> bool:
        return (all(self.ring.nf(p).is_zero() for p in self.h_values)
                and all(self.module.is_zero_elt(v) for v in self.u_values))

    def anchor(self) -> tuple:
        return self.h_values

    def neg(self) -> "DerivationPair":
        return DerivationPair(self.ring, self.module,
                              tuple(-p for p in self.h_values),
                              tuple(tuple(-c for c in v) for v in self.u_values))

    def scale(self, r) -> "DerivationPair":
        return DerivationPair(
            self.ring, self.module,
            tuple(self.ring.nf(r * p) for p in self.h_values),
            tuple(self.module.scale(r, v) for v in self.u_values))

    def add(self, other: "DerivationPair") -> "DerivationPair":
        return DerivationPair(
            self.ring, self.module,
            tuple(self.ring.nf(a + b) for a, b in zip(self.h_values, other.h_values)),
            tuple(self.module.add(u, v) for u, v in zip(self.u_values, other.u_values)))

    def sub(self, other: "DerivationPair") -> "DerivationPair":
        return self.add(other.neg())

    def eq(self, other: "DerivationPair") -> bool:
        return (all(self.ring.nf(a - b).is_zero()
                    for a, b in zip(self.h_values, other.h_values))
                and all(self.module.eq(u, v)
                        for u, v in zip(self.u_values, other.u_values)))


def check_derivation_pair(R: QuotientRing, M: FPModule, h_values, u_values) -> DerivationPair:
    """Validate the generator data of a pair; raises PairError with a witness.

    Over an extended ring the A-block values of h must vanish (A-linearity).
    """
    h_values = tuple(R.nf(p) for p in h_values)
    if len(h_values) != R.nvars:
        raise PairError("h needs one value per ring variable")
    u_values = tuple(M.nf(v) for v in u_values)
    if len(u_values) != M.ngens:
        raise PairError("u needs one value per module generator")
    if isinstance(R, ExtendedRing):
        nb = R.base.nvars
        for i in range(nb, R.nvars):
            if not h_values[i].is_zero():
                raise PairError(f"not A-linear: h({R.variables[i]}) != 0")
    witness = R.derivation_well_defined(h_values)
    if witness is not None:
        raise PairError(f"not a derivation of R: h does not kill {witness}")
    pair = DerivationPair(R, M, h_values, u_values)
    for l, col in enumerate(M.relations):
        acc = list(M.zero())
        for j, r in enumerate(col):
            for t in range(M.ngens):
                acc[t] = acc[t] + r * u_values[j][t]
            hr = pair.apply_h(r)
            if not hr.is_zero():
                acc[j] = acc[j] + hr
        if not M.is_zero_elt(tuple(acc)):
            raise PairError(f"pair condition fails at relation {l}")
    return pair


def zero_pair(R: QuotientRing, M: FPModule) -> DerivationPair:
    return DerivationPair(R, M, tuple(R.zero() for _ in range(R.nvars)),
                          tuple(M.zero() for _ in range(M.ngens)))


def canonical_pair(R: QuotientRing, h_values) -> DerivationPair:
    """(h, h) on M = R (rank-one free); h must be a derivation of R.

    Stored by generator values: u(1) = h(1) = 0, the pair law recovers h.
    """
    M = FPModule.free(R, 1)
    return check_derivation_pair(R, M, h_values, ((R.zero(),),))


def pair_bracket(p: DerivationPair, q: DerivationPair) -> DerivationPair:
    """Componentwise commutator [(h,u),(k,v)] = ([h,k],[u,v])."""
    if p.ring != q.ring or p.module is not q.module:
        if p.module.ngens != q.module.ngens or p.module.relations != q.module.relations:
            raise PairError("bracket of pairs on different carriers")
    R, M = p.ring, p.module
    h = tuple(R.nf(p.apply_h(q.h_values[i]) - q.apply_h(p.h_values[i]))
              for i in range(R.nvars))
    u = tuple(M.sub(p.apply_u(q.u_values[j]), q.apply_u(p.u_values[j]))
              for j in range(M.ngens))
    return check_derivation_pair(R, M, h, u)


def check_arrow_pair(f: ModuleMap, p: DerivationPair, q: DerivationPair) -> tuple:
    """Validate a derivation of the arrow M1 -> M2: shared anchor and
    f u1 = u2 f, checked exactly on the source generators."""
    if any(not f.ring.nf(a - b).is_zero()
           for a, b in zip(p.h_values, q.h_values)):
        raise PairError("anchor mismatch on the two ends of the arrow")
    for i in range(f.source.ngens):
        lhs = f.apply(p.apply_u(f.source.gen(i)))
        rhs = q.apply_u(f.apply(f.source.gen(i)))
        if not f.target.eq(lhs, rhs):
            raise PairError(f"arrow compatibility fails at generator {i}")
    return (p, q)


def derivation_module(R: QuotientRing) -> list:
    """Generators of Der(R) as h-value tuples."""
    if not R.relations:
        basis = []
        for i in range(R.nvars):
            basis.append(tuple(R.one() if j == i else R.zero() for j in range(R.nvars)))
        return basis
    amb = R.ambient
    cols = []
    for i in range(R.nvars):
        cols.append(tuple(g.diff(i) for g in R.relations))
    out = []
    for s in syzygies(amb, cols, ideal_gens=R.gb, caps=R.caps):
        v = tuple(R.nf(p) for p in s)
        if not vec_is_zero(v):
            out.append(v)
    return out


def derivation_in_span(R: QuotientRing, gens: list, h_values) -> Optional[tuple]:
    """Coefficients expressing h in the R-span of `gens` (None if outside)."""
    amb = R.ambient
    sol = solve_in_image(amb, [tuple(g) for g in gens], tuple(h_values),
                         ideal_gens=R.gb, caps=R.caps)
    if sol is None:
        return None
    return tuple(R.nf(p) for p in sol)


@dataclass
class PairModule:
    """Generators of D(R, M) with the anchor-sequence bookkeeping."""

    ring: QuotientRing
    module: FPModule
    generators: list          # DerivationPair
    hom_generators: list      # anchor-zero pairs spanning Hom_R(M, M)
    der_generators: list      # h-value tuples spanning Der(R)

    def anchor_matrix(self):
        """Columns express each generator's anchor over der_generators."""
        cols = []
        for p in self.generators:
            cols.append(derivation_in_span(self.ring, self.der_generators, p.h_values))
        return cols

    def contains(self, pair: DerivationPair) -> Optional[tuple]:
        """Coefficients over the generators, or None."""
        R, M = self.ring, self.module
        amb = R.ambient
        k = M.ngens
        n = R.nvars

        def flat(p):
            v = list(p.h_values)
            for u in p.u_values:
                v.extend(u)
            return tuple(v)

        cols = [flat(p) for p in self.generators]
        # u-coordinates are defined modulo the relation submodule in each slot
        for col in M.relations:
            for j in range(k):
                pad = [R.zero()] * (n + k * k)
                for t in range(k):
                    pad[n + j * k + t] = col[t]
                cols.append(tuple(pad))
        sol = solve_in_image(amb, cols, flat(pair), ideal_gens=R.gb, caps=R.caps)
        if sol is None:
            return None
        return tuple(R.nf(p) for p in sol[:len(self.generators)])

    def exactness_report(self) -> dict:
        """Checks 0 -> Hom(M,M) -> D(R,M) -> Der(R) exactness at the middle."""
        R, M = self.ring, self.module
        amb = R.ambient
        hom_ok = all(all(R.nf(p).is_zero() for p in g.h_values)
                     for g in self.hom_generators)
        # anchor-kernel generators: solve anchor == 0 inside the span
        hom_cols = []
        k = M.ngens
        for g in self.hom_generators:
            flatu = []
            for u in g.u_values:
                flatu.extend(u)
            hom_cols.append(tuple(flatu))
        for col in M.relations:
            for j in range(k):
                pad = [R.zero()] * (k * k)
                for t in range(k):
                    pad[j * k + t] = col[t]
                hom_cols.append(tuple(pad))
        kernel_in_hom = True
        witness = None
        for p in self.generators:
            if all(R.nf(v).is_zero() for v in p.h_values):
                flatu = []
                for u in p.u_values:
                    flatu.extend(u)
                if k and solve_in_image(amb, hom_cols, tuple(flatu),
                                        ideal_gens=R.gb, caps=R.caps) is None:
                    kernel_in_hom = False
                    witness = p
        return {"hom_has_zero_anchor": hom_ok,
                "anchor_kernel_in_hom": kernel_in_hom,
                "witness": witness}


def _pair_system_columns(R: QuotientRing, M: FPModule, include_h: bool):
    """Columns of the defining linear system for (h-values, u-values)."""
    n = R.nvars if include_h else 0
    k = M.ngens
    n_id = len(R.relations)
    n_mod = len(M.relations)
    D = n_id + k * n_mod
    cols = []
    if include_h:
        for i in range(R.nvars):
            col = [g.diff(i) for g in R.relations]
            for rel in M.relations:
                col.extend(rel[a].diff(i) for a in range(k))
            cols.append(tuple(col))
    for b in range(k):
        for a in range(k):
            col = [R.zero()] * n_id
            for l, rel in enumerate(M.relations):
                block = [R.zero()] * k
                block[a] = rel[b]
                col.extend(block)
            cols.append(tuple(col))
    # relation columns of the product target (module relations per block)
    target_rels = []
    for l in range(n_mod):
        for rel in M.relations:
            col = [R.zero()] * D
            for a in range(k):
                col[n_id + l * k + a] = rel[a]
            target_rels.append(tuple(col))
    return cols, target_rels, D


def derivation_pair_module(R: QuotientRing, M: FPModule) -> PairModule:
    """Generators of D(R, M) as the kernel of the explicit linear system.

    Also computes generators of Hom_R(M,M) (the anchor kernel) and of Der(R)
    so that the exact sequence 0 -> Hom -> D -> Der can be certified.
    """
    amb = R.ambient
    n, k = R.nvars, M.ngens
    cols, target_rels, D = _pair_system_columns(R, M, include_h=True)
    gens = []
    if D == 0:
        # no constraints at all: free h-values and u-values
        for i in range(n):
            h = [R.zero()] * n
            h[i] = R.one()
            gens.append(DerivationPair(R, M, tuple(h),
                                       tuple(M.zero() for _ in range(k))))
        for b in range(k):
            for a in range(k):
                u = [list(M.zero()) for _ in range(k)]
                u[b][a] = R.one()
                gens.append(DerivationPair(R, M, tuple(R.zero() for _ in range(n)),
                                           tuple(tuple(vv) for vv in u)))
    else:
        for s in syzygies(amb, cols + target_rels, ideal_gens=R.gb, caps=R.caps):
            h = tuple(R.nf(p) for p in s[:n])
            u = []
            for b in range(k):
                vec = tuple(s[n + b * k + a] for a in range(k))
                u.append(M.nf(vec))
            pair = DerivationPair(R, M, h, tuple(u))
            if not pair.is_zero():
                gens.append(pair)
    validated = [check_derivation_pair(R, M, p.h_values, p.u_values) for p in gens]
    hom = hom_endomorphisms(R, M)
    der = derivation_module(R)
    return PairModule(R, M, validated, hom, der)


def hom_endomorphisms(R: QuotientRing, M: FPModule) -> list:
    """Generators of Hom_R(M, M) as anchor-zero derivation pairs."""
    amb = R.ambient
    k = M.ngens
    if k == 0:
        return []
    cols, target_rels, D = _pair_system_columns(R, M, include_h=False)
    zero_h = tuple(R.zero() for _ in range(R.nvars))
    out = []
    if D == 0:
        for b in range(k):
            for a in range(k):
                u = [list(M.zero()) for _ in range(k)]
                u[b][a] = R.one()
                out.append(DerivationPair(R, M, zero_h, tuple(tuple(v) for v in u)))
        return out
    for s in syzygies(amb, cols + target_rels, ideal_gens=R.gb, caps=R.caps):
        u = []
        for b in range(k):
            vec = tuple(s[b * k + a] for a in range(k))
            u.append(M.nf(vec))
        pair = DerivationPair(R, M, zero_h, tuple(u))
        if not pair.is_zero():
            out.append(check_derivation_pair(R, M, pair.h_values, pair.u_values))
    return out


def lift_anchor(R: QuotientRing, M: FPModule, h_values) -> Optional[DerivationPair]:
    """A pair (h, u) over the given anchor h, or None when the linear system
    for u is infeasible."""
    h_values = tuple(R.nf(p) for p in h_values)
    if R.derivation_well_defined(h_values) is not None:
        return None
    amb = R.ambient
    k = M.ngens
    if k == 0:
        return DerivationPair(R, M, h_values, ())
    n_mod = len(M.relations)
    if n_mod == 0:
        return check_derivation_pair(R, M, h_values,
                                     tuple(M.zero() for _ in range(k)))
    D = k * n_mod
    cols = []
    for b in range(k):
        for a in range(k):
            col = []
            for rel in M.relations:
                block = [R.zero()] * k
                block[a] = rel[b]
                col.extend(block)
            cols.append(tuple(col))
    target_rels = []
    for l in range(n_mod):
        for rel in M.relations:
            col = [R.zero()] * D
            for a in range(k):
                col[l * k + a] = rel[a]
            target_rels.append(tuple(col))
    rhs = []
    for rel in M.relations:
        Rblock = [R.zero()] * k
        for j in range(k):
            hr = R.apply_derivation(h_values, rel[j])
            Rblock[j] = -hr
        rhs.extend(Rblock)
    sol = solve_in_image(amb, cols + target_rels, tuple(rhs),
                         ideal_gens=R.gb, caps=R.caps)
    if sol is None:
        return None
    u = []
    for b in range(k):
        u.append(M.nf(tuple(sol[b * k + a] for a in range(k))))
    return check_derivation_pair(R, M, h_values, tuple(u))


def lie_derivative(R: QuotientRing, h_values) -> DerivationPair:
    """The pair (h, L_h) on the module of differentials, L_h(dx_i) = d(h(x_i))."""
    O = kaehler_differentials(R)
    h_values = tuple(R.nf(p) for p in h_values)
    u_values = []
    for i in range(R.nvars):
        hi = h_values[i]
        u_values.append(O.nf(tuple(R.nf(hi.diff(j)) for j in range(R.nvars))))
    return check_derivation_pair(R, O, h_values, tuple(u_values))


# -- tensor / hom / transpose transfers -------------------------------------

def tensor_module(M: FPModule, N: FPModule) -> FPModule:
    """M (x) N presented on e_i (x) f_j (index i*N.ngens + j)."""
    R = M.ring
    k, m = M.ngens, N.ngens
    rels = []
    for col in M.relations:
        for j in range(m):
            v = [R.zero()] * (k * m)
            for a in range(k):
                v[a * m + j] = col[a]
            rels.append(tuple(v))
    for col in N.relations:
        for i in range(k):
            v = [R.zero()] * (k * m)
            for b in range(m):
                v[i * m + b] = col[b]
            rels.append(tuple(v))
    return FPModule(R, k * m, rels)


def hom_module(M: FPModule, N: FPModule) -> FPModule:
    """Hom(M, N) for free modules: free on E_ab = (e_b -> f_a), index a*M.ngens+b."""
    if M.relations or N.relations:
        raise PairError("hom transfer implemented for free modules")
    return FPModule.free(M.ring, N.ngens * M.ngens)


def tensor_hom_transfer(p: DerivationPair, q: Optional[DerivationPair],
                        mode: str) -> DerivationPair:
    """Transfer two anchor-compatible pairs to the tensor or hom module.

    tensor: (h, u (x) Id + Id (x) v); hom: (h, f -> v f - f u);
    transpose: hom against the canonical (h, h) on R, ignoring q.
    """
    R, M = p.ring, p.module
    if mode == "transpose":
        one = FPModule.free(R, 1)
        q = check_derivation_pair(R, one, p.h_values, ((R.zero(),),))
        mode = "hom"
    if q is None:
        raise PairError("second pair required")
    if any(not R.nf(a - b).is_zero() for a, b in zip(p.h_values, q.h_values)):
        raise PairError("anchor mismatch between the two pairs")
    N = q.module
    if mode == "tensor":
        T = tensor_module(M, N)
        m = N.ngens
        u_values = []
        for i in range(M.ngens):
            for j in range(m):
                v = [R.zero()] * (M.ngens * m)
                for a in range(M.ngens):
                    v[a * m + j] = p.u_values[i][a]
                for b in range(m):
                    v[i * m + b] = v[i * m + b] + q.u_values[j][b]
                u_values.append(T.nf(tuple(v)))
        return check_derivation_pair(R, T, p.h_values, tuple(u_values))
    if mode == "hom":
        H = hom_module(M, N)
        k, m = M.ngens, N.ngens
        u_values = []
        for a in range(m):
            for b in range(k):
                # w = v o E_ab - E_ab o u, evaluated on each e_j
                coords = [R.zero()] * (m * k)
                for j in range(k):
                    # v(E_ab(e_j)) = delta_bj * v(f_a)
                    col = list(N.zero())
                    if j == b:
                        col = list(q.u_values[a])
                    # E_ab(u(e_j)) = u(e_j)_b * f_a   (u-values coordinates)
                    ujb = p.u_values[j][b]
                    col[a] = col[a] - ujb
                    for c in range(m):
                        coords[c * k + j] = coords[c * k + j] + col[c]
                u_values.append(H.nf(tuple(coords)))
        return check_derivation_pair(R, H, p.h_values, tuple(u_values))
    raise PairError(f"unknown transfer mode {mode!r}")


# -- Leibniz extension and the trace of a pair -------------------------------

def _wedge_sort(indices):
    """Sort a tuple of indices; returns (sorted tuple, sign) or (None, 0)."""
    idx = list(indices)
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
            elif idx[j] == idx[j + 1]:
                return None, 0
    return tuple(idx), sign


def exterior_module(M: FPModule, n: int) -> FPModule:
    if M.relations:
        raise PairError("Leibniz extension implemented for free modules")
    from math import comb
    return FPModule.free(M.ring, comb(M.ngens, n))


def leibniz_extension(p: DerivationPair, n: int) -> DerivationPair:
    """The induced pair on the n-th exterior power of a free module."""
    R, M = p.ring, p.module
    W = exterior_module(M, n)
    subsets = list(combinations(range(M.ngens), n))
    pos = {S: t for t, S in enumerate(subsets)}
    u_values = []
    for S in subsets:
        acc = [R.zero()] * len(subsets)
        for spot, i in enumerate(S):
            # replace e_i by u(e_i) = sum_a c_a e_a
            for a in range(M.ngens):
                c = p.u_values[i][a]
                if c.is_zero():
                    continue
                replaced = S[:spot] + (a,) + S[spot + 1:]
                sortd, sign = _wedge_sort(replaced)
                if sign == 0:
                    continue
                acc[pos[sortd]] = acc[pos[sortd]] + c * sign
        u_values.append(W.nf(tuple(acc)))
    return check_derivation_pair(R, W, p.h_values, tuple(u_values))


def trace_pair(p: DerivationPair) -> DerivationPair:
    """The pair induced on the top exterior power (rank-one) of a free module."""
    if p.module.relations:
        raise PairError("trace of a pair needs a free module")
    return leibniz_extension(p, p.module.ngens)


# -- lifting along surjections and resolutions -------------------------------

def lift_through_surjection(p: DerivationPair, f: ModuleMap) -> DerivationPair:
    """Lift (h, u) on M through a surjection f: P ->> M with P free.

    Picks v(e_i) solving f(v_i) = u(f(e_i)); deterministic via the exact
    solver.  Raises PairError when f is not surjective.
    """
    R = p.ring
    P, M = f.source, f.target
    if P.relations:
        raise PairError("lifting needs a free source")
    if not f.cokernel_is_zero():
        raise PairError("map is not surjective: cokernel is nonzero")
    cols = [f.column(j) for j in range(P.ngens)]
    v_values = []
    for i in range(P.ngens):
        target = p.apply_u(f.column(i))
        sol = M.solve(cols, target)
        if sol is None:
            raise PairError("no lift exists for a generator image")
        v_values.append(P.nf(tuple(sol)))
    lifted = check_derivation_pair(R, P, p.h_values, tuple(v_values))
    for i in range(P.ngens):
        lhs = f.apply(lifted.apply_u(P.gen(i)))
        rhs = p.apply_u(f.apply(P.gen(i)))
        if not M.eq(lhs, rhs):
            raise PairError("lift verification failed")
    return lifted


def lift_to_resolution(p: DerivationPair, cx: FreeComplex, aug: ModuleMap) -> dict:
    """Chain-level lift of a pair down a free resolution of M.

    Returns {degree: DerivationPair}; every square f v = u f and d v = v d is
    checked exactly.
    """
    R = p.ring
    lifts = {}
    top = cx.hi
    if top != 0:
        raise PairError("resolution expected to end in degree 0")
    lifts[0] = lift_through_surjection(p, aug)
    for k in sorted(cx.degrees, reverse=True):
        if k == 0:
            continue
        Pk = cx.module(k)
        Pk1 = cx.module(k + 1)
        d = cx.diff(k)
        cols = [tuple(row[j] for row in d) for j in range(Pk.ngens)]
        upper = lifts[k + 1]
        v_values = []
        for j in range(Pk.ngens):
            target = upper.apply_u(Pk1.nf(cols[j]))
            sol = Pk1.solve(cols, target)
            if sol is None:
                raise PairError(f"no chain lift at degree {k}")
            v_values.append(Pk.nf(tuple(sol)))
        lifts[k] = check_derivation_pair(R, Pk, p.h_values, tuple(v_values))
        # verify the square d v = v d exactly on generators
        for j in range(Pk.ngens):
            lhs = mat.mat_vec(R, d, lifts[k].apply_u(Pk.gen(j)))
            rhs = upper.apply_u(Pk1.nf(cols[j]))
            if not Pk1.eq(lhs, rhs):
                raise PairError(f"lift square fails at degree {k}")
    return lifts


# ---------------------------------------------------------------------------
# automorphism pairs, exponential and logarithm
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AutomorphismPair:
    """(theta, phi) over an extended ring, reducing to the identity mod m_A."""

    ring: ExtendedRing
    module: FPModule
    theta_images: tuple  # images of every ring variable
    phi_values: tuple    # phi(e_j) per generator

    def apply_theta(self, p):
        return self.ring.nf(p.substitute(self.ring.ambient, list(self.theta_images)))

    def apply_phi(self, vec):
        M = self.module
        out = list(M.zero())
        for j, a in enumerate(vec):
            if a.is_zero():
                continue
            ta = self.apply_theta(a)
            for t in range(M.ngens):
                out[t] = out[t] + ta * self.phi_values[j][t]
        return M.nf(tuple(out))

    def is_identity(self) -> bool:
        R, M = self.ring, self.module
        return (all(R.nf(self.theta_images[i] - R.var(i)).is_zero()
                    for i in range(R.nvars))
                and all(M.eq(self.phi_values[j], M.gen(j)) for j in range(M.ngens)))

    def compose(self, other: "AutomorphismPair") -> "AutomorphismPair":
        """self o other."""
        R, M = self.ring, self.module
        theta = tuple(self.apply_theta(t) for t in other.theta_images)
        phi = tuple(self.apply_phi(v) for v in other.phi_values)
        return AutomorphismPair(R, M, theta, phi)


def check_automorphism_pair(R: ExtendedRing, M: FPModule, theta_images,
                            phi_values) -> AutomorphismPair:
    theta_images = tuple(R.nf(p) for p in theta_images)
    phi_values = tuple(M.nf(v) for v in phi_values)
    a = AutomorphismPair(R, M, theta_images, phi_values)
    nb = R.base.nvars
    for i in range(nb, R.nvars):
        if not R.nf(theta_images[i] - R.var(i)).is_zero():
            raise PairError("not A-linear: theta moves an Artin variable")
    for g in R.relations:
        if not a.apply_theta(g).is_zero():
            raise PairError(f"theta does not preserve the relation {g}")
    for i in range(R.nvars):
        if not R.in_max_ideal(R.nf(theta_images[i] - R.var(i))):
            raise PairError("theta does not reduce to the identity")
    for j in range(M.ngens):
        delta = M.sub(phi_values[j], M.gen(j))
        if not all(R.in_max_ideal(c) for c in delta):
            raise PairError("phi does not reduce to the identity")
    for l, col in enumerate(M.relations):
        acc = list(M.zero())
        for j, r in enumerate(col):
            tr = a.apply_theta(r)
            for t in range(M.ngens):
                acc[t] = acc[t] + tr * phi_values[j][t]
        if not M.is_zero_elt(tuple(acc)):
            raise PairError(f"phi breaks module relation {l}")
    return a


def identity_auto(R: ExtendedRing, M: FPModule) -> AutomorphismPair:
    return AutomorphismPair(R, M, tuple(R.var(i) for i in range(R.nvars)),
                            tuple(M.gen(j) for j in range(M.ngens)))


def _require_nilpotent(pair: DerivationPair):
    R = pair.ring
    if not isinstance(R, ExtendedRing):
        raise PairError("exponential needs values tensored with an Artin maximal ideal")
    for p in pair.h_values:
        if not R.in_max_ideal(p):
            raise PairError("h value has a nonzero reduction mod m_A")
    for v in pair.u_values:
        for c in v:
            if not R.in_max_ideal(c):
                raise PairError("u value has a nonzero reduction mod m_A")


def exp_pair(pair: DerivationPair, max_iter: int = 64) -> AutomorphismPair:
    """exp(h, u) as an automorphism pair; exact, truncated by nilpotency."""
    _require_nilpotent(pair)
    R, M = pair.ring, pair.module
    theta = []
    for i in range(R.nvars):
        acc = R.var(i)
        term = R.var(i)
        n = 1
        while True:
            term = R.nf(pair.apply_h(term) * Fraction(1, n))
            if term.is_zero():
                break
            acc = R.nf(acc + term)
            n += 1
            if n > max_iter:
                raise PairError("exponential did not truncate")
        theta.append(acc)
    phi = []
    for j in range(M.ngens):
        acc = M.gen(j)
        term = M.gen(j)
        n = 1
        while True:
            term = M.scale(Fraction(1, n), pair.apply_u(term))
            if vec_is_zero(term):
                break
            acc = M.add(acc, term)
            n += 1
            if n > max_iter:
                raise PairError("exponential did not truncate")
        phi.append(acc)
    return check_automorphism_pair(R, M, tuple(theta), tuple(phi))


def log_auto(a: AutomorphismPair, max_iter: int = 64) -> DerivationPair:
    """Logarithm of an automorphism pair lifting the identity; exact."""
    R, M = a.ring, a.module

    def delta_ring(p):
        return R.nf(a.apply_theta(p) - p)

    def delta_mod(vec):
        return M.sub(a.apply_phi(vec), vec)

    h_values = []
    for i in range(R.nvars):
        term = delta_ring(R.var(i))
        acc = term
        n = 2
        while True:
            term = delta_ring(term)
            if term.is_zero():
                break
            acc = R.nf(acc + term * Fraction((-1) ** (n + 1), n))
            n += 1
            if n > max_iter:
                raise PairError("logarithm did not truncate")
        h_values.append(acc)
    u_values = []
    for j in range(M.ngens):
        term = delta_mod(M.gen(j))
        acc = term
        n = 2
        while True:
            term = delta_mod(term)
            if vec_is_zero(term):
                break
            acc = M.add(acc, M.scale(Fraction((-1) ** (n + 1), n), term))
            n += 1
            if n > max_iter:
                raise PairError("logarithm did not truncate")
        u_values.append(acc)
    return check_derivation_pair(R, M, tuple(h_values), tuple(u_values))


def det_auto(a: AutomorphismPair) -> AutomorphismPair:
    """(theta, det phi) on the top exterior power of a free module."""
    M = a.module
    if M.relations:
        raise PairError("determinant needs a free module")
    R = a.ring
    line = FPModule.free(R, 1)
    phi_matrix = [[a.phi_values[j][i] for j in range(M.ngens)]
                  for i in range(M.ngens)]
    d = mat.det(R, phi_matrix)
    return check_automorphism_pair(R, line, a.theta_images, ((d,),))


def bch_pair(p: DerivationPair, q: DerivationPair) -> DerivationPair:
    """p bullet q via log(exp p o exp q); exact for nilpotent pairs."""
    return log_auto(exp_pair(p).compose(exp_pair(q)))


# ---------------------------------------------------------------------------
# Fitting invariance
# ---------------------------------------------------------------------------

@dataclass
class FittingReport:
    ring: QuotientRing
    module: FPModule
    entries: list = field(default_factory=list)  # (index, generator, image, ok)

    @property
    def passed(self) -> bool:
        return all(ok for (_, _, _, ok) in self.entries)

    def failures(self):
        return [(i, g, img) for (i, g, img, ok) in self.entries if not ok]


def fitting_invariance_check(R: QuotientRing, M: FPModule, h_values) -> FittingReport:
    """Does h carry every Fitting ideal of M into itself?  Exact membership."""
    report = FittingReport(R, M)
    h_values = tuple(R.nf(p) for p in h_values)
    for i in range(M.ngens + 1):
        ideal = fitting_ideal(M, i)
        if ideal.is_unit_ideal() or ideal.is_zero_ideal():
            continue
        for g in ideal.gens:
            img = R.apply_derivation(h_values, g)
            report.entries.append((i, g, img, ideal.contains(img)))
    return report
