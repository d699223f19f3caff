"""Net cohomology with Weyl-phase values on finite causal posets.

Cocycles live on canonical 1-simplices.  By default the ambient grid is
twice as fine as the poset grid, so every element hosts interior nodes.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .linalg import Vec, solve_affine
from .nets import AmbientSpace, NetSpec, SymplecticSubspace, intersect, join, local_space, materialize
from .piecewise import (
    ChargePair,
    PiecewiseLinear,
    Q,
    RationalLike,
    SpaceTag,
    TestPair,
    charges,
    closed_union_contains,
    localization,
    ramp,
    space_member,
    tent,
)
from .poset import CausalPoset, IndexElement, disjoint, leq
from .sectors import LEFT_TAIL_ZERO, RIGHT_TAIL_ZERO, action_functional, canonical_representative, local_charge
from .simplicial import Path, Simplex1, Simplex2, edge, enumerate_simplices, iter_paths, NoCommonSupport
from .weyl import IDENTITY, IntervalTooSmall, W, WeylElement, weyl_inverse, weyl_mul


class CohomologyError(ValueError):
    pass


class RepresentativeDoesNotFit(CohomologyError):
    pass


class NoOverlap(CohomologyError):
    pass


class SupportNotCovered(CohomologyError):
    pass


def cohomology_ambient(poset: CausalPoset) -> AmbientSpace:
    return AmbientSpace(poset.window, poset.step / 2)


@dataclass(eq=False)
class Cocycle1:
    poset: CausalPoset
    values: dict[Simplex1, WeylElement]
    ambient: AmbientSpace
    charge: Optional[ChargePair] = None
    side: Optional[str] = None
    reps: dict[IndexElement, TestPair] = field(default_factory=dict)

    def __call__(self, b: Simplex1) -> WeylElement:
        return self.values[b]

    def with_value(self, b: Simplex1, w: WeylElement) -> "Cocycle1":
        vals = dict(self.values)
        vals[b] = w
        return Cocycle1(self.poset, vals, self.ambient, self.charge, self.side, self.reps)


def _host(a: IndexElement) -> tuple[Fraction, Fraction]:
    lo, hi = a.parts[0]
    return lo, hi  # type: ignore[return-value]


def induced_cocycle(charge: ChargePair, poset: CausalPoset, side: str = "l",
                    ambient: Optional[AmbientSpace] = None) -> Cocycle1:
    """z(b) = W(F_{d0 b}) W(F_{d1 b})^-1 for canonical representatives F_a in each a."""
    amb = ambient or cohomology_ambient(poset)
    conv = RIGHT_TAIL_ZERO if side == "l" else LEFT_TAIL_ZERO
    reps: dict[IndexElement, TestPair] = {}
    for a in poset:
        try:
            reps[a] = canonical_representative(charge, _host(a), conv, amb.step).representative
        except IntervalTooSmall as e:
            raise RepresentativeDoesNotFit(f"{a}: {e}") from e
    vals = {}
    for b in enumerate_simplices(poset, 1):
        vals[b] = weyl_mul(W(reps[b.d0.body]), weyl_inverse(W(reps[b.d1.body])))
    return Cocycle1(poset, vals, amb, charge, side, reps)


def identity_cocycle(poset: CausalPoset, ambient: Optional[AmbientSpace] = None) -> Cocycle1:
    amb = ambient or cohomology_ambient(poset)
    return Cocycle1(poset, {b: IDENTITY for b in enumerate_simplices(poset, 1)}, amb, ChargePair(Fraction(0), Fraction(0)))


@dataclass(frozen=True)
class CocycleReport:
    simplices1: int
    simplices2: int
    locality_violations: tuple[Simplex1, ...]
    identity_violations: tuple[Simplex2, ...]
    far_action_violations: tuple[Simplex1, ...] = ()

    @property
    def ok(self) -> bool:
        return not (self.locality_violations or self.identity_violations or self.far_action_violations)


def check_cocycle(z: Cocycle1, strict: bool = False) -> CocycleReport:
    """Locality on every 1-simplex and the cocycle identity on every canonical 2-simplex.

    ``strict`` also asks each value to act trivially on data far away on
    either side, the phase-level form of the separation clause.
    """
    loc_bad, far_bad = [], []
    for b, w in z.values.items():
        if not closed_union_contains(list(b.support.parts), localization(w.F)):
            loc_bad.append(b)
        if strict:
            for side in ("left", "right"):
                if not action_functional(w.F, SpaceTag.Vf, side).trivial:
                    far_bad.append(b)
                    break
    id_bad = []
    tris = enumerate_simplices(z.poset, 2)
    for c in tris:
        lhs = weyl_mul(z(c.d0), z(c.d2))
        if not lhs.same_as(z(c.d1)):
            id_bad.append(c)
    return CocycleReport(len(z.values), len(tris), tuple(loc_bad), tuple(id_bad), tuple(far_bad))


# -- chain decompositions ----------------------------------------------------

def _bump(lo: Fraction, hi: Fraction, integral: Fraction, grid: Optional[Fraction]) -> PiecewiseLinear:
    apex = None
    if grid is not None:
        k = ((lo + hi) / 2 / grid).__floor__()
        for cand in (k * grid, (k + 1) * grid):
            if lo < cand < hi:
                apex = cand
                break
    return tent(lo, hi, 2 * integral / (hi - lo), apex)


def _overlaps(chain: Sequence[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    out = []
    for (a, b), (c, d) in zip(chain, chain[1:]):
        lo, hi = max(a, c), min(b, d)
        if not lo < hi:
            raise NoOverlap(f"({a}, {b}) and ({c}, {d}) do not overlap")
        out.append((lo, hi))
    return out


def _refined_nodes(f: PiecewiseLinear, chain) -> list[Fraction]:
    pts = set(f.breakpoints)
    for a, b in chain:
        pts |= {a, b}
    return sorted(pts)


def chain_decompose(f0: PiecewiseLinear, chain: Sequence[tuple[RationalLike, RationalLike]],
                    grid: Optional[RationalLike] = None) -> list[PiecewiseLinear]:
    """Split a zero-integral density into zero-integral pieces, piece i inside chain[i]."""
    ch = [(Q(a), Q(b)) for a, b in chain]
    g = None if grid is None else Q(grid)
    laps = _overlaps(ch)
    if f0.integral() != 0:
        raise CohomologyError("the density must integrate to zero")
    xs = _refined_nodes(f0, ch)
    pieces = [PiecewiseLinear.constant(0) for _ in ch]
    for k, x in enumerate(xs):
        v = f0(x)
        if not v:
            continue
        left = xs[k - 1] if k > 0 else x
        right = xs[k + 1] if k + 1 < len(xs) else x
        host = next((i for i, (a, b) in enumerate(ch) if a < x < b and a <= left and right <= b), None)
        if host is None:
            raise SupportNotCovered(f"density is nonzero at {x}, outside the chain")
        hat = PiecewiseLinear((left, x, right), (Fraction(0), v, Fraction(0))) if left < x < right else None
        if hat is None:
            raise SupportNotCovered(f"density is nonzero at the edge point {x}")
        pieces[host] = pieces[host] + hat
    running = Fraction(0)
    for i, (lo, hi) in enumerate(laps):
        running += pieces[i].integral()
        if running:
            b = _bump(lo, hi, running, g)
            pieces[i] = pieces[i] - b
            pieces[i + 1] = pieces[i + 1] + b
            running = Fraction(0)
    return [p.simplified() for p in pieces]


def chain_decompose_field(f1: PiecewiseLinear, chain: Sequence[tuple[RationalLike, RationalLike]]) -> list[PiecewiseLinear]:
    """Split a compactly supported field into compact pieces, each sloping only inside chain[i]."""
    ch = [(Q(a), Q(b)) for a, b in chain]
    laps = _overlaps(ch)
    if not f1.is_compact:
        raise CohomologyError("the field must vanish at both ends")
    xs = _refined_nodes(f1, ch)
    rises: list[list[tuple[Fraction, Fraction, Fraction]]] = [[] for _ in ch]
    for x0, x1 in zip(xs, xs[1:]):
        d = f1(x1) - f1(x0)
        if not d:
            continue
        host = next((i for i, (a, b) in enumerate(ch) if a <= x0 and x1 <= b), None)
        if host is None:
            raise SupportNotCovered(f"field slopes on [{x0}, {x1}], outside the chain")
        rises[host].append((x0, x1, d))
    pieces = []
    for rs in rises:
        p = PiecewiseLinear.constant(0)
        for x0, x1, d in rs:
            p = p + ramp(x0, x1, 0, d)
        pieces.append(p)
    running = Fraction(0)
    for i, (lo, hi) in enumerate(laps):
        running += pieces[i].right_tail
        if running:
            step = ramp(lo, hi, 0, running)
            pieces[i] = pieces[i] - step
            pieces[i + 1] = pieces[i + 1] + step
            running = Fraction(0)
    return [p.simplified() for p in pieces]


# -- condition on path intersections -------------------------------------------

def unit_tent(a: IndexElement, amb: AmbientSpace) -> PiecewiseLinear:
    lo, _ = _host(a)
    return tent(lo, lo + 2 * amb.step, 1 / amb.step)


def unit_rise(a: IndexElement, amb: AmbientSpace) -> PiecewiseLinear:
    lo, _ = _host(a)
    return ramp(lo, lo + amb.step, 0, 1)


def witness_pieces(a0: IndexElement, a1: IndexElement, amb: AmbientSpace) -> tuple[TestPair, TestPair]:
    """Density moved from a1 to a0, and a field plateau rising in a1 and falling in a0."""
    w0 = TestPair(f0=(unit_tent(a0, amb) - unit_tent(a1, amb)).simplified())
    w1 = TestPair(f1=(unit_rise(a1, amb) - unit_rise(a0, amb)).simplified())
    return w0, w1


def telescope(p: Path, amb: AmbientSpace, which: int) -> list[TestPair]:
    """Summands of a witness piece, the i-th one localized on the path's i-th support."""
    vs = [v.body for v in p.vertices()]
    out = []
    for prev, nxt in zip(vs, vs[1:]):
        if which == 0:
            out.append(TestPair(f0=(unit_tent(nxt, amb) - unit_tent(prev, amb)).simplified()))
        else:
            out.append(TestPair(f1=(unit_rise(prev, amb) - unit_rise(nxt, amb)).simplified()))
    return out


def _certify_on_path(spec: NetSpec, W_: TestPair, which: int, p: Path, amb: AmbientSpace) -> bool:
    parts = telescope(p, amb, which)
    total = parts[0]
    for s in parts[1:]:
        total = total + s
    if not total.same_as(W_):
        return False
    return all(materialize(spec, sup).contains(s) for s, sup in zip(parts, p.supports()))


@dataclass(frozen=True)
class AAResult:
    status: str  # "holds", "fails" or "undecided"
    intersection: SymplecticSubspace
    join: SymplecticSubspace
    witness: Optional[TestPair]
    certified: tuple[TestPair, ...]
    paths_checked: int


def path_space(spec: NetSpec, p: Path) -> SymplecticSubspace:
    return join([materialize(spec, s) for s in p.supports()])


def condition_aa(spec: NetSpec, b: Simplex1, max_len: int) -> AAResult:
    """Compare the join of the endpoint spaces with the intersection of all path spaces.

    Paths are taken shortest first with minimal supports; larger supports only
    enlarge a path space, so they cannot lower the intersection.  A failure is
    certified when the witness telescopes through the vertices of every path.
    """
    amb = spec.space()
    a0, a1 = b.d0.body, b.d1.body
    J = join([materialize(spec, b.d0.support), materialize(spec, b.d1.support)])
    X: Optional[SymplecticSubspace] = None
    w0, w1 = witness_pieces(a0, a1, amb) if a0 != a1 else (None, None)
    cands = [(i, w) for i, w in ((0, w0), (1, w1)) if w is not None and not J.contains(w)]
    alive = {i for i, _ in cands}
    n = 0
    for p in iter_paths(b.d1, b.d0, spec.poset, max_len):
        n += 1
        ps = path_space(spec, p)
        X = ps if X is None else intersect([X, ps])
        for i, w in cands:
            if i in alive and not _certify_on_path(spec, w, i, p, amb):
                alive.discard(i)
        if X.same(J):
            return AAResult("holds", X, J, None, (), n)
        cert = [w for i, w in cands if i in alive]
        if cert and X.same(join([J, SymplecticSubspace(amb, [amb.coords(w) for w in cert])])):
            return AAResult("fails", X, J, _combined(cert), tuple(cert), n)
    assert X is not None
    if X.same(J):
        return AAResult("holds", X, J, None, (), n)
    cert = [w for i, w in cands if i in alive]
    return AAResult("fails" if cert else "undecided", X, J, _combined(cert) if cert else None, tuple(cert), n)


def _combined(ws: Sequence[TestPair]) -> TestPair:
    out = ws[0]
    for w in ws[1:]:
        out = out + w
    return out.simplified()


# -- coboundaries --------------------------------------------------------------

@dataclass(frozen=True)
class TrivializerWitness:
    values: dict
    in_target: dict
    charges: dict
    residual_dim: int

    def reproduces(self, z: Cocycle1) -> bool:
        return all(weyl_mul(self.values[b.d0.body], weyl_inverse(self.values[b.d1.body])).same_as(w)
                   for b, w in z.values.items())


@dataclass(frozen=True)
class ObstructionCertificate:
    base: IndexElement
    distant: IndexElement
    transporter: TestPair
    forced_charge: ChargePair
    constraint: str

    def verify(self) -> bool:
        """The transporter carries a nonzero charge on the hull of the base element."""
        lo, hi = self.base.inf, self.base.sup
        ch = local_charge(-self.transporter, lo, hi)
        return ch == self.forced_charge and not ch.is_zero


def spanning_tree(poset: CausalPoset, root: Optional[IndexElement] = None,
                  reverse: bool = False) -> tuple[IndexElement, list[tuple[IndexElement, IndexElement]]]:
    els = list(poset.elements)
    if reverse:
        els.reverse()
    r = root if root is not None else els[0]
    seen, order, q = {r}, [], deque([r])
    while q:
        x = q.popleft()
        for y in els:
            if y in seen:
                continue
            try:
                edge(x, y, poset)
            except NoCommonSupport:
                continue
            seen.add(y)
            order.append((x, y))
            q.append(y)
    if len(seen) != len(els):
        raise CohomologyError("poset is not connected")
    return r, order


def _propagate(z: Cocycle1, root: IndexElement, tree) -> dict[IndexElement, TestPair]:
    G = {root: TestPair()}
    for x, y in tree:
        G[y] = (G[x] + z(edge(x, y, z.poset)).F).simplified()
    return G


def _affine_rows(amb: AmbientSpace, T: SymplecticSubspace, G: TestPair):
    g = amb.coords(G)
    for r in T.annihilator_rows():
        yield r, -sum((x * g.get(k, 0) for k, x in r.items()), Fraction(0))


def coboundary_feasibility(z: Cocycle1, target: SpaceTag, root: Optional[IndexElement] = None,
                           reverse: bool = False):
    """Either a trivializer with values localized in the target net, or a certificate that none exists."""
    amb, poset = z.ambient, z.poset
    r, tree = spanning_tree(poset, root, reverse)
    G = _propagate(z, r, tree)
    spaces = {a: local_space(amb, target, a) for a in poset}
    s: Optional[TestPair] = None
    seed = z.reps.get(r)
    if seed is not None and all(spaces[a].contains((G[a] + seed).simplified()) for a in poset):
        s = seed
    else:
        rows = [row for a in poset for row in _affine_rows(amb, spaces[a], G[a])]
        sol = solve_affine(rows, amb.dim)
        if sol is not None:
            s = amb.testpair(sol)
    if s is None:
        return _obstruction(z, target, r, G, spaces)
    H = {a: (G[a] + s).simplified() for a in poset}
    phase = {r: Fraction(0)}
    for x, y in tree:
        zb = z(edge(x, y, poset))
        base = weyl_mul(W(H[y]), weyl_inverse(W(H[x], phase[x])))
        phase[y] = zb.theta - base.theta
    V = {a: W(H[a], phase[a]) for a in poset}
    residual = intersect(list(spaces.values())).dim
    return TrivializerWitness(V, {a: spaces[a].contains(H[a]) for a in poset},
                              {a: charges(H[a])[0] for a in poset}, residual)


def _obstruction(z: Cocycle1, target: SpaceTag, r: IndexElement, G, spaces) -> ObstructionCertificate:
    amb = z.ambient
    for a in z.poset:
        if leq(a, r.hull()) or not disjoint(a, r.hull()):
            continue
        rows = list(_affine_rows(amb, spaces[r], G[r])) + list(_affine_rows(amb, spaces[a], G[a]))
        if solve_affine(rows, amb.dim) is None:
            forced = local_charge(-G[a], r.inf, r.sup)
            msg = (f"a value in {target.value}({r}) has zero charge there, "
                   f"but the transporter to {a} forces charge ({forced.c}, {forced.q})")
            return ObstructionCertificate(r, a, G[a], forced, msg)
    raise CohomologyError("infeasible, but no single distant element isolates the obstruction")


def z0(spec: NetSpec) -> SymplecticSubspace:
    """Elements localized in every local space of the net."""
    X: Optional[SymplecticSubspace] = None
    for o in spec.poset:
        S = materialize(spec, o)
        if X is None:
            X = S
        elif not X.issubspace(S):
            X = intersect([X, S])
        if X.dim == 0:
            break
    assert X is not None
    return X
