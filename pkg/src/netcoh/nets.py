"""Nets of finite-dimensional symplectic subspaces over a grid window.

The ambient space holds grid test pairs on [lo, hi]: f0 is coordinatized by
its values at interior nodes, f1 by its values at all nodes (the two end
values double as the tails).  Local spaces, duals and twists are all exact
null-space computations in these coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Union

from .linalg import Echelon, Vec, axpy, dot
from .piecewise import (
    PiecewiseLinear,
    Q,
    RationalLike,
    SpaceTag,
    TestPair,
)
from .poset import CausalPoset, ComplementPiece, IndexElement, causal_complement, interval, leq

# Complement tests live on a grid this many times finer than the ambient.
# With a factor of 2 a one-cell piece still leaks a spurious direction
# through its shared end nodes; 3 is the smallest factor that does not.
PROBE_REFINEMENT = 3


class NetError(ValueError):
    pass


class AmbientMismatch(NetError):
    pass


class OffGrid(NetError):
    pass


# constraint names used when carving a local space
CHARGE_ZERO = "charge_zero"
LEFT_ZERO = "left_zero"
RIGHT_ZERO = "right_zero"
TAILS_EQUAL = "tails_equal"
TAILS_OPPOSITE = "tails_opposite"
COMPACT_F1 = "compact_f1"

TAG_CONSTRAINTS: dict[SpaceTag, frozenset[str]] = {
    SpaceTag.Va: frozenset({CHARGE_ZERO, LEFT_ZERO, RIGHT_ZERO}),
    SpaceTag.Vb: frozenset({CHARGE_ZERO, TAILS_EQUAL}),
    SpaceTag.Vc: frozenset({TAILS_EQUAL}),
    SpaceTag.Vq: frozenset({CHARGE_ZERO, TAILS_OPPOSITE}),
    SpaceTag.Ve: frozenset({CHARGE_ZERO}),
    SpaceTag.Vf: frozenset(),
    SpaceTag.Vfl: frozenset({RIGHT_ZERO}),
    SpaceTag.Vfr: frozenset({LEFT_ZERO}),
    # both fields compactly supported: the identity-grade subnet
    SpaceTag.Vf0: frozenset({LEFT_ZERO, RIGHT_ZERO, COMPACT_F1}),
}

Region = tuple[tuple[Fraction, Fraction], ...]


def region_of(o: Union[IndexElement, ComplementPiece, Region]) -> Region:
    if isinstance(o, ComplementPiece):
        return () if o.empty else ((o.lo, o.hi),)
    if isinstance(o, IndexElement):
        if not o.is_bounded:
            raise NetError("local spaces are materialized on bounded regions")
        return tuple(o.parts)  # type: ignore[return-value]
    return tuple((Q(a), Q(b)) for a, b in o)


class AmbientSpace:
    """Grid test pairs on a window; dimension 2N for N cells."""

    def __init__(self, window: tuple[RationalLike, RationalLike], step: RationalLike):
        self.lo, self.hi, self.step = Q(window[0]), Q(window[1]), Q(step)
        n = (self.hi - self.lo) / self.step
        if n.denominator != 1 or n < 2:
            raise NetError("the window must hold at least two whole cells")
        self.N = int(n)
        self.dim = 2 * self.N
        self._cache: dict = {}

    # -- coordinates -------------------------------------------------------
    def key(self) -> tuple:
        return (self.lo, self.hi, self.step)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AmbientSpace) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"AmbientSpace([{self.lo}, {self.hi}], step={self.step})"

    @property
    def window(self) -> tuple[Fraction, Fraction]:
        return self.lo, self.hi

    def node(self, k: int) -> Fraction:
        return self.lo + k * self.step

    def node_index(self, x: Fraction) -> int:
        k = (x - self.lo) / self.step
        if k.denominator != 1 or not 0 <= k <= self.N:
            raise OffGrid(f"{x} is not a node of {self}")
        return int(k)

    def i0(self, k: int) -> int:
        """Coordinate of f0 at interior node k (1 <= k <= N-1)."""
        return k - 1

    def i1(self, k: int) -> int:
        """Coordinate of f1 at node k (0 <= k <= N)."""
        return self.N - 1 + k

    def refined(self, factor: int) -> "AmbientSpace":
        return AmbientSpace((self.lo, self.hi), self.step / factor)

    def coords(self, F: TestPair) -> Vec:
        F = F.simplified()
        kinks = [x for f in (F.f0, F.f1) if not f.is_constant() for x in f.breakpoints]
        for x in kinks:
            if not self.lo <= x <= self.hi:
                raise OffGrid(f"breakpoint {x} lies outside the window")
            self.node_index(x)
        if F.f0(self.lo) != 0 or F.f0(self.hi) != 0:
            raise OffGrid("f0 must vanish at the window ends")
        v: Vec = {}
        for k in range(1, self.N):
            x = F.f0(self.node(k))
            if x:
                v[self.i0(k)] = x
        for k in range(self.N + 1):
            x = F.f1(self.node(k))
            if x:
                v[self.i1(k)] = x
        return v

    def testpair(self, v: Vec) -> TestPair:
        xs = tuple(self.node(k) for k in range(self.N + 1))
        f0 = tuple(v.get(self.i0(k), Fraction(0)) if 0 < k < self.N else Fraction(0) for k in range(self.N + 1))
        f1 = tuple(v.get(self.i1(k), Fraction(0)) for k in range(self.N + 1))
        return TestPair(PiecewiseLinear(xs, f0).simplified(), PiecewiseLinear(xs, f1).simplified())

    def split(self, v: Vec) -> tuple[list[Fraction], list[Fraction]]:
        """Node values of f0 and f1, both of length N+1."""
        z = Fraction(0)
        f0 = [z] + [v.get(self.i0(k), z) for k in range(1, self.N)] + [z]
        f1 = [v.get(self.i1(k), z) for k in range(self.N + 1)]
        return f0, f1

    # -- symplectic structure ------------------------------------------------
    def _mass(self, u: list[Fraction]) -> list[Fraction]:
        """P1 mass matrix times a vector of node values."""
        h, n = self.step, self.N
        out = []
        for k in range(n + 1):
            s = Fraction(0)
            if k > 0:
                s += h * (2 * u[k] + u[k - 1]) / 6
            if k < n:
                s += h * (2 * u[k] + u[k + 1]) / 6
            out.append(s)
        return out

    def sigma(self, u: Vec, w: Vec) -> Fraction:
        u0, u1 = self.split(u)
        w0, w1 = self.split(w)
        return sum((a * b for a, b in zip(u0, self._mass(w1))), Fraction(0)) - \
            sum((a * b for a, b in zip(u1, self._mass(w0))), Fraction(0))

    def _mass_sparse(self, u: dict[int, Fraction]) -> dict[int, Fraction]:
        """Mass matrix times a sparse vector of node values."""
        h6 = self.step / 6
        out: dict[int, Fraction] = {}
        for k, x in u.items():
            for j, w in ((k - 1, 1), (k, 2 if k in (0, self.N) else 4), (k + 1, 1)):
                if 0 <= j <= self.N:
                    out[j] = out.get(j, 0) + w * h6 * x
        return out

    def pairing_row(self, t: Vec) -> Vec:
        """Row r with r.g = sigma(g, t) for every g in this ambient."""
        t0: dict[int, Fraction] = {}
        t1: dict[int, Fraction] = {}
        for idx, x in t.items():
            if idx < self.N - 1:
                t0[idx + 1] = x
            else:
                t1[idx - (self.N - 1)] = x
        row: Vec = {}
        for k, x in self._mass_sparse(t1).items():
            if x and 0 < k < self.N:
                row[self.i0(k)] = x
        for k, x in self._mass_sparse(t0).items():
            if x:
                row[self.i1(k)] = -x
        return row

    def coarse_pairing_row(self, t: Vec, fine: "AmbientSpace", factor: int) -> Vec:
        """Row r on this ambient with r.g = sigma(g, t) for t living on ``fine``."""
        fr = fine.pairing_row(t)
        row: Vec = {}
        for idx, x in fr.items():
            if idx < fine.N - 1:
                m, comp = idx + 1, 0
            else:
                m, comp = idx - (fine.N - 1), 1
            k, s = divmod(m, factor)
            for node, w in ((k, Fraction(factor - s, factor)), (k + 1, Fraction(s, factor))):
                if not w or node > self.N:
                    continue
                if comp == 0:
                    if 0 < node < self.N:
                        j = self.i0(node)
                    else:
                        continue
                else:
                    j = self.i1(node)
                nv = row.get(j, 0) + w * x
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
        return row

    def tag_rows(self, constraints: Iterable[str]) -> list[Vec]:
        """Linear conditions on the whole ambient for a constraint set."""
        rows: list[Vec] = []
        L, R = self.i1(0), self.i1(self.N)
        cs = set(constraints)
        if CHARGE_ZERO in cs:
            rows.append({self.i0(k): Fraction(1) for k in range(1, self.N)})
        if LEFT_ZERO in cs:
            rows.append({L: Fraction(1)})
        if RIGHT_ZERO in cs:
            rows.append({R: Fraction(1)})
        if TAILS_EQUAL in cs:
            rows.append({L: Fraction(1), R: Fraction(-1)})
        if TAILS_OPPOSITE in cs:
            rows.append({L: Fraction(1), R: Fraction(1)})
        return rows

    # -- local spaces -------------------------------------------------------
    def local_basis(self, region: Region, constraints: frozenset[str]) -> list[Vec]:
        """Basis of grid pairs localized in the closure of ``region`` obeying ``constraints``."""
        key = (region, constraints)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        n = self.N
        inside_node = [False] * (n + 1)
        inside_cell = [False] * n
        for a, b in region:
            if a < self.lo or b > self.hi:
                raise NetError(f"region ({a}, {b}) leaves the window")
            ka = self.node_index(a)
            kb = self.node_index(b)
            for k in range(ka + 1, kb):
                inside_node[k] = True
            for k in range(ka, kb):
                inside_cell[k] = True
        # reduced variables: free f0 nodes and f1 blocks glued across outside cells
        f0_vars = [k for k in range(1, n) if inside_node[k]]
        block = list(range(n + 1))
        for k in range(n):
            if not inside_cell[k]:
                block[k + 1] = block[k]
        blocks = sorted(set(block))
        touches_outside = {block[0], block[n]}
        for k in range(n):
            if not inside_cell[k]:
                touches_outside.add(block[k])
        if COMPACT_F1 in constraints:
            blocks = [b for b in blocks if b not in touches_outside]
        nv0 = len(f0_vars)
        var_of_block = {b: nv0 + i for i, b in enumerate(blocks)}
        nvars = nv0 + len(blocks)
        rows: list[Vec] = []
        Lb, Rb = var_of_block.get(block[0]), var_of_block.get(block[n])
        if CHARGE_ZERO in constraints and nv0:
            rows.append({i: Fraction(1) for i in range(nv0)})
        for name, coeffs in ((LEFT_ZERO, ((Lb, 1),)), (RIGHT_ZERO, ((Rb, 1),)),
                             (TAILS_EQUAL, ((Lb, 1), (Rb, -1))), (TAILS_OPPOSITE, ((Lb, 1), (Rb, 1)))):
            if name not in constraints:
                continue
            r: Vec = {}
            for var, c in coeffs:
                if var is not None:
                    r[var] = r.get(var, 0) + Fraction(c)
            r = {k: x for k, x in r.items() if x}
            if r:
                rows.append(r)
        reduced = Echelon(nvars, rows).nullspace() if rows else [{i: Fraction(1)} for i in range(nvars)]
        members_of = {b: [k for k in range(n + 1) if block[k] == b] for b in blocks}
        basis = []
        for vec in reduced:
            full: Vec = {}
            for var, x in vec.items():
                if var < nv0:
                    full[self.i0(f0_vars[var])] = x
                else:
                    for k in members_of[blocks[var - nv0]]:
                        full[self.i1(k)] = x
            basis.append(full)
        self._cache[key] = basis
        return basis


class SymplecticSubspace:
    """A subspace of an ambient, stored in echelon form."""

    def __init__(self, ambient: AmbientSpace, vectors: Iterable[Vec] = ()):
        self.ambient = ambient
        self._ech = Echelon(ambient.dim, vectors)

    @property
    def dim(self) -> int:
        return self._ech.rank

    def basis(self) -> list[Vec]:
        return self._ech.basis()

    def generators(self) -> list[TestPair]:
        return [self.ambient.testpair(v) for v in self.basis()]

    def _check(self, other: "SymplecticSubspace") -> None:
        if other.ambient != self.ambient:
            raise AmbientMismatch(f"{self.ambient} vs {other.ambient}")

    def contains(self, x: Union[Vec, TestPair]) -> bool:
        v = self.ambient.coords(x) if isinstance(x, TestPair) else x
        return self._ech.contains(v)

    def issubspace(self, other: "SymplecticSubspace") -> bool:
        self._check(other)
        return all(other._ech.contains(r) for r in self._ech.piv.values())

    def same(self, other: "SymplecticSubspace") -> bool:
        """Exact equality as mutual containment."""
        return self.issubspace(other) and other.issubspace(self)

    def annihilator_rows(self) -> list[Vec]:
        """Euclidean complement: coordinate functionals vanishing on the subspace."""
        return self._ech.nullspace()

    def witness_outside(self, other: "SymplecticSubspace") -> Optional[Vec]:
        """A basis vector of self not in other, if any."""
        for r in self._ech.piv.values():
            if not other._ech.contains(r):
                return dict(r)
        return None

    def __repr__(self) -> str:
        return f"SymplecticSubspace(dim={self.dim}, {self.ambient})"


def join(spaces: Sequence[SymplecticSubspace]) -> SymplecticSubspace:
    if not spaces:
        raise NetError("join of nothing")
    amb = spaces[0].ambient
    for s in spaces[1:]:
        if s.ambient != amb:
            raise AmbientMismatch(f"{amb} vs {s.ambient}")
    return SymplecticSubspace(amb, (r for s in spaces for r in s._ech.piv.values()))


def intersect(spaces: Sequence[SymplecticSubspace]) -> SymplecticSubspace:
    if not spaces:
        raise NetError("intersection of nothing")
    amb = spaces[0].ambient
    for s in spaces[1:]:
        if s.ambient != amb:
            raise AmbientMismatch(f"{amb} vs {s.ambient}")
    if len(spaces) == 1:
        return spaces[0]
    rows = [r for s in spaces for r in s.annihilator_rows()]
    return SymplecticSubspace(amb, Echelon(amb.dim, rows).nullspace())


def sigma_annihilator(test: Iterable[Vec], ambient: AmbientSpace, constraints: Iterable[str] = (),
                      test_ambient: Optional[AmbientSpace] = None, factor: int = 1) -> SymplecticSubspace:
    """Pairs in the ambient obeying ``constraints`` that are sigma-orthogonal to every test vector."""
    rows = ambient.tag_rows(constraints)
    if test_ambient is None:
        rows += [ambient.pairing_row(t) for t in test]
    else:
        rows += [ambient.coarse_pairing_row(t, test_ambient, factor) for t in test]
    return SymplecticSubspace(ambient, Echelon(ambient.dim, rows).nullspace())


@dataclass(frozen=True)
class NetSpec:
    tag: SpaceTag
    poset: CausalPoset
    ambient: Optional[AmbientSpace] = field(default=None, compare=False)

    def space(self) -> AmbientSpace:
        if self.ambient is not None:
            return self.ambient
        return _default_ambient(self.poset.lo, self.poset.hi, self.poset.step)


@lru_cache(maxsize=None)
def _default_ambient(lo: Fraction, hi: Fraction, step: Fraction) -> AmbientSpace:
    return AmbientSpace((lo, hi), step)


@lru_cache(maxsize=None)
def probe_ambient(amb: AmbientSpace) -> AmbientSpace:
    return amb.refined(PROBE_REFINEMENT)


def _piece_constraints(base: frozenset[str], piece: ComplementPiece) -> frozenset[str]:
    # the true complement runs off to infinity, so the outer tail must vanish
    if piece.unbounded and piece.role == "left":
        return base | {LEFT_ZERO}
    if piece.unbounded and piece.role == "right":
        return base | {RIGHT_ZERO}
    return base


def local_space(ambient: AmbientSpace, tag: SpaceTag, o, extra: frozenset[str] = frozenset()) -> SymplecticSubspace:
    cons = TAG_CONSTRAINTS[tag] | extra
    if isinstance(o, ComplementPiece):
        cons = _piece_constraints(cons, o)
    return SymplecticSubspace(ambient, ambient.local_basis(region_of(o), frozenset(cons)))


def materialize(spec: NetSpec, o) -> SymplecticSubspace:
    return local_space(spec.space(), spec.tag, o)


def _maximal_intervals_inside(composite: IndexElement, poset: Optional[CausalPoset]) -> list[IndexElement]:
    out = []
    for a, b in composite.parts:
        comp = interval(a, b)
        if poset is None or comp in poset or poset.kind == "I2":
            out.append(comp)
            continue
        # fall back to the largest grid intervals the poset does hold
        cands = [x for x in poset if x.variant == "interval" and leq(x, comp)]
        out.extend(x for x in cands if not any(x != y and leq(x, y) for y in cands))
    return out


def additive_extension(spec: NetSpec, composite: IndexElement, exhaustive: bool = False) -> SymplecticSubspace:
    """Join of the local spaces of poset intervals inside ``composite``.

    By isotony the maximal such intervals suffice; ``exhaustive`` joins every
    one of them instead and is meant for cross-checking on small posets.
    """
    amb = spec.space()
    if exhaustive:
        parts = [x for x in spec.poset if x.variant == "interval" and leq(x, composite)]
    else:
        parts = _maximal_intervals_inside(composite, spec.poset)
    if not parts:
        return SymplecticSubspace(amb)
    return join([materialize(spec, x) for x in parts])


def _complement_tests(amb: AmbientSpace, o: IndexElement, plan) -> tuple[AmbientSpace, list[Vec]]:
    fine = probe_ambient(amb)
    tests: list[Vec] = []
    for piece in causal_complement(o, amb.window):
        if piece.empty:
            continue
        cons = plan(piece)
        if cons is None:
            continue
        tests.extend(fine.local_basis(region_of(piece), frozenset(cons)))
    return fine, tests


def dual(spec: NetSpec, o: IndexElement) -> SymplecticSubspace:
    """Pairs of the tagged ambient annihilating every complement piece's local space."""
    amb = spec.space()
    base = TAG_CONSTRAINTS[spec.tag]
    fine, tests = _complement_tests(amb, o, lambda p: _piece_constraints(base, p))
    return sigma_annihilator(tests, amb, base, fine, PROBE_REFINEMENT)


def dual_via_pieces(spec: NetSpec, o: IndexElement) -> SymplecticSubspace:
    """Same dual, as the intersection of one annihilator per complement piece."""
    amb = spec.space()
    base = TAG_CONSTRAINTS[spec.tag]
    fine = probe_ambient(amb)
    parts = []
    for piece in causal_complement(o, amb.window):
        if piece.empty:
            continue
        tests = fine.local_basis(region_of(piece), _piece_constraints(base, piece))
        parts.append(sigma_annihilator(tests, amb, base, fine, PROBE_REFINEMENT))
    if not parts:
        return sigma_annihilator([], amb, base)
    return intersect(parts)


def _twist_plan(side: str, o: IndexElement):
    """Constraint sets for each complement piece of the twisted complement of o.

    Left-graded duality tests the far-left piece (and a double interval's
    gap) with charge-neutral data whose field dies off at both ends, and the
    right piece with right-graded data.  Side r is the mirror image.
    """
    neutral = frozenset({CHARGE_ZERO, LEFT_ZERO, RIGHT_ZERO})
    if side not in ("l", "r"):
        raise NetError(f"side must be 'l' or 'r', got {side!r}")
    near, far = ("left", "right") if side == "l" else ("right", "left")
    far_tag = SpaceTag.Vfr if side == "l" else SpaceTag.Vfl

    def plan(piece: ComplementPiece):
        if piece.role == near or piece.role == "gap":
            return _piece_constraints(neutral, piece)
        return _piece_constraints(TAG_CONSTRAINTS[far_tag], piece)
    return plan


def graded_twist(side: str, o: IndexElement, ambient: AmbientSpace) -> SymplecticSubspace:
    """The twisted complement space, on the probe grid."""
    fine, tests = _complement_tests(ambient, o, _twist_plan(side, o))
    return SymplecticSubspace(fine, tests)


def graded_dual(side: str, o: IndexElement, ambient: AmbientSpace) -> SymplecticSubspace:
    tag = SpaceTag.Vfl if side == "l" else SpaceTag.Vfr
    fine, tests = _complement_tests(ambient, o, _twist_plan(side, o))
    return sigma_annihilator(tests, ambient, TAG_CONSTRAINTS[tag], fine, PROBE_REFINEMENT)


def _global_plan(piece: ComplementPiece):
    if piece.role == "gap":
        # compact field on the gap: a global constant would pin the charge
        return frozenset({CHARGE_ZERO, LEFT_ZERO, RIGHT_ZERO})
    return _piece_constraints(TAG_CONSTRAINTS[SpaceTag.Vb], piece)


def global_graded_dual(o: IndexElement, ambient: AmbientSpace) -> SymplecticSubspace:
    fine, tests = _complement_tests(ambient, o, _global_plan)
    return sigma_annihilator(tests, ambient, TAG_CONSTRAINTS[SpaceTag.Vc], fine, PROBE_REFINEMENT)


def global_twist(o: IndexElement, ambient: AmbientSpace) -> SymplecticSubspace:
    fine, tests = _complement_tests(ambient, o, _global_plan)
    return SymplecticSubspace(fine, tests)


def cross_pairing_vanishes(a: SymplecticSubspace, b: SymplecticSubspace) -> bool:
    """sigma(x, y) = 0 for all x in a, y in b (a on the coarse grid, b on a refinement or the same grid)."""
    if a.ambient == b.ambient:
        rows = [a.ambient.pairing_row(t) for t in b.basis()]
    else:
        factor = a.ambient.step / b.ambient.step
        if factor.denominator != 1:
            raise AmbientMismatch("second space must live on a refinement")
        rows = [a.ambient.coarse_pairing_row(t, b.ambient, int(factor)) for t in b.basis()]
    return all(dot(r, x) == 0 for r in rows for x in a.basis())


@dataclass(frozen=True)
class LocalityViolation:
    o1: IndexElement
    o2: IndexElement
    value: Fraction
    left: TestPair
    right: TestPair


@dataclass(frozen=True)
class LocalityReport:
    pairs_checked: int
    violations: tuple[LocalityViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _cross_check(amb: AmbientSpace, s1: SymplecticSubspace, s2: SymplecticSubspace,
                 o1: IndexElement, o2: IndexElement) -> Optional[LocalityViolation]:
    b2 = s2.basis()
    for x in s1.basis():
        for y in b2:
            val = amb.sigma(x, y)
            if val:
                return LocalityViolation(o1, o2, val, amb.testpair(x), amb.testpair(y))
    return None


def check_locality(spec: NetSpec, elements: Optional[Sequence[IndexElement]] = None) -> LocalityReport:
    from .poset import disjoint

    amb = spec.space()
    els = list(elements if elements is not None else spec.poset.elements)
    spaces = {o: materialize(spec, o) for o in els}
    bad, n = [], 0
    for i, o1 in enumerate(els):
        for o2 in els[i + 1:]:
            if not disjoint(o1, o2):
                continue
            n += 1
            v = _cross_check(amb, spaces[o1], spaces[o2], o1, o2)
            if v is not None:
                bad.append(v)
    return LocalityReport(n, tuple(bad))


def check_graded_locality(lspec: NetSpec, rspec: NetSpec,
                          elements: Optional[Sequence[IndexElement]] = None) -> LocalityReport:
    """Left-graded spaces on o1 against right-graded spaces on o2 whenever o1 lies before o2."""
    from .poset import before

    amb = lspec.space()
    if rspec.space() != amb:
        raise AmbientMismatch("graded locality compares nets on one ambient")
    els = list(elements if elements is not None else lspec.poset.elements)
    bad, n = [], 0
    for o1 in els:
        s1 = materialize(lspec, o1)
        for o2 in els:
            if not before(o1, o2):
                continue
            n += 1
            v = _cross_check(amb, s1, materialize(rspec, o2), o1, o2)
            if v is not None:
                bad.append(v)
    return LocalityReport(n, tuple(bad))
