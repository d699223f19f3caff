"""Check implementations behind the batch runner.

Each check takes the scenario, its own parameter dict and a seeded
``random.Random``, and returns an Outcome.  Outcomes hold only ints, strings,
bools and nested lists/dicts, with rationals already turned into "p/q".
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Callable, Optional

from .cohomology import (
    ObstructionCertificate,
    TrivializerWitness,
    check_cocycle,
    coboundary_feasibility,
    condition_aa,
    induced_cocycle,
    z0,
)
from .nets import (
    AmbientSpace,
    NetSpec,
    SymplecticSubspace,
    additive_extension,
    dual,
    global_graded_dual,
    graded_dual,
    local_space,
    materialize,
)
from .piecewise import ChargePair, PiecewiseLinear, Q, SpaceTag, TestPair, charges, symplectic_form
from .poset import (
    CausalPoset,
    IndexElement,
    bot_graph,
    build_poset,
    double_interval,
    flip_check,
    interval,
    is_cofinal,
    is_connected,
    is_directed,
)
from .sectors import (
    LEFT_TAIL_ZERO,
    RIGHT_TAIL_ZERO,
    braiding_phase,
    canonical_representative,
    monodromy,
)
from .simplicial import canonical_simplex1
from .weyl import (
    MobiusMap,
    adjoint_phase,
    mobius_apply_endpoint,
    mobius_apply_element,
    mobius_from_double_interval,
    partition_of_unity,
    xi_apply,
    xi_double_interval,
)

Json = Any


def frac(x: Fraction | int) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def pl_json(f: PiecewiseLinear) -> Json:
    return {"breakpoints": [frac(x) for x in f.breakpoints], "values": [frac(v) for v in f.values]}


def pair_json(F: TestPair) -> Json:
    F = F.simplified()
    return {"f0": pl_json(F.f0), "f1": pl_json(F.f1)}


def basis_json(S: SymplecticSubspace) -> Json:
    return [pair_json(F) for F in S.generators()]


@dataclass
class Outcome:
    status: str
    dimensions: dict[str, Json] = field(default_factory=dict)
    witness: Optional[Json] = None
    detail: str = ""


def _ok(cond: bool) -> str:
    return "pass" if cond else "fail"


@dataclass(frozen=True)
class Context:
    window: tuple[Fraction, Fraction]
    step: Fraction
    poset_kind: str
    limits: dict

    def param_window(self, p: dict) -> tuple[Fraction, Fraction]:
        w = p.get("window")
        return (Q(w[0]), Q(w[1])) if w else self.window

    def param_step(self, p: dict) -> Fraction:
        return Q(p["step"]) if "step" in p else self.step

    def samples(self, p: dict, name: str, default: int) -> int:
        if "samples" in p:
            return int(p["samples"])
        return int(self.limits.get("sampleCounts", {}).get(name, default))


# -- random grid elements --------------------------------------------------------

def grid_nodes(window, step) -> list[Fraction]:
    lo, hi = window
    n = int((hi - lo) / step)
    return [lo + k * step for k in range(n + 1)]


def grid_intervals(window, step, min_cells: int = 2) -> list[IndexElement]:
    xs = grid_nodes(window, step)
    return [interval(a, b) for a, b in combinations(xs, 2) if b - a >= min_cells * step]


def sample_double_intervals(rng: random.Random, window, step, k: int, min_cells: int = 2,
                            want=None) -> list[IndexElement]:
    """k distinct random grid double intervals, sorted; ``want`` filters candidates."""
    xs = grid_nodes(window, step)
    m = min_cells * step
    seen: set[IndexElement] = set()
    tries = 0
    while len(seen) < k and tries < 1000 * k:
        tries += 1
        a, b, c, d = sorted(rng.sample(xs, 4))
        if b - a >= m and d - c >= m:
            E = double_interval(a, b, c, d)
            if want is None or want(E):
                seen.add(E)
    return sorted(seen)


def pick(rng: random.Random, items: list, k: int) -> list:
    if k >= len(items):
        return list(items)
    return sorted(rng.sample(items, k))


def random_element(rng: random.Random, S: SymplecticSubspace, spread: int = 3) -> TestPair:
    v: dict[int, Fraction] = {}
    for b in S.basis():
        a = Fraction(rng.randint(-spread, spread), rng.randint(1, spread))
        for k, x in b.items():
            v[k] = v.get(k, 0) + a * x
    return S.ambient.testpair({k: x for k, x in v.items() if x})


def _tag(p: dict, default: str) -> SpaceTag:
    return SpaceTag[p.get("tag", default)]


def _mismatch(S: SymplecticSubspace, T: SymplecticSubspace) -> Optional[Json]:
    w = S.witness_outside(T) or T.witness_outside(S)
    return None if w is None else pair_json(S.ambient.testpair(w))


# -- nets ----------------------------------------------------------------------

def check_haag_duality(ctx: Context, p: dict, rng: random.Random) -> Outcome:
    tag = _tag(p, "Va")
    amb = AmbientSpace(ctx.window, ctx.step)
    spec = NetSpec(tag, build_poset("I", ctx.window, ctx.step), amb)
    els = pick(rng, grid_intervals(ctx.window, ctx.step), int(p.get("count", 20)))
    for o in els:
        D, M = dual(spec, o), materialize(spec, o)
        if not D.same(M):
            return Outcome("fail", {"checked": len(els), "dual": D.dim, "local": M.dim},
                           {"element": str(o), "pair": _mismatch(D, M)})
    return Outcome("pass", {"checked": len(els)})


def check_double_interval_gap(ctx: Context, p: dict, rng: random.Random) -> Outcome:
    tag = _tag(p, "Va")
    want = int(p.get("gap", 2))
    amb = AmbientSpace(ctx.window, ctx.step)
    spec = NetSpec(tag, build_poset("D", ctx.window, ctx.step), amb)
    els = sample_double_intervals(rng, ctx.window, ctx.step, int(p.get("count", 10)))
    gaps = []
    for E in els:
        D, A, M = dual(spec, E), additive_extension(spec, E), materialize(spec, E)
        gaps.append(D.dim - A.dim)
        if not (A.issubspace(D) and D.dim - A.dim == want and D.same(M)):
            return Outcome("fail", {"checked": len(els), "dual": D.dim, "additive": A.dim, "local": M.dim},
                           {"element": str(E), "pair": _mismatch(D, A)})
    return Outcome("pass", {"checked": len(els), "gap": want})


def check_additivity(ctx: Context, p: dict, rng: random.Random) -> Outcome:
    tags = [SpaceTag[t] for t in p.get("tags", ["Vf", "Vf0"])]
    amb = AmbientSpace(ctx.window, ctx.step)
    poset = build_poset("D", ctx.window, ctx.step)
    els = sample_double_intervals(rng, ctx.window, ctx.step, int(p.get("count", 10)))
    for tag in tags:
        spec = NetSpec(tag, poset, amb)
        for E in els:
            A, M = additive_extension(spec, E), materialize(spec, E)
            if not A.same(M):
                return Outcome("fail", {"tag": tag.value, "additive": A.dim, "local": M.dim},
                               {"element": str(E), "pair": _mismatch(M, A)})
    return Outcome("pass", {"checked": len(els) * len(tags)})


def check_graded_locality(ctx: Context, p: dict, rng: random.Random) -> Outcome:
    n = ctx.samples(p, "graded-locality", 1000)
    amb = AmbientSpace(ctx.window, ctx.step)
    pool = int(p.get("pool", 60))
    els = pick(rng, grid_intervals(ctx.window, ctx.step, 1), pool) + sample_double_intervals(rng, ctx.window, ctx.step, pool, 1)
    cache: dict = {}

    def space(tag, o):
        if (tag, o) not in cache:
            cache[tag, o] = local_space(amb, tag, o)
        return cache[tag, o]

    for _ in range(n):
        while True:
            o1, o2 = rng.choice(els), rng.choice(els)
            if o1.sup <= o2.inf:
                break
        F = random_element(rng, space(SpaceTag.Vfl, o1))
        G = random_element(rng, space(SpaceTag.Vfr, o2))
        s = symplectic_form(F, G)
        if s:
            return Outcome("fail", {"samples": n}, {"o1": str(o1), "o2": str(o2), "F": pair_json(F),
                                                    "G": pair_json(G), "sigma": frac(s)})
    return Outcome("pass", {"samples": n})


def check_graded_duality(ctx: Context, p: dict, rng: random.Random) -> Outcome:
    side = p.get("side", "l")
    tag = SpaceTag.Vfl if side == "l" else SpaceTag.Vfr
    amb = AmbientSpace(ctx.window, ctx.step)
    k = int(p.get("count", 10))
    els = pick(rng, grid_intervals(ctx.window, ctx.step), k) + sample_double_intervals(rng, ctx.window, ctx.step, k)
    for o in els:
        D, M = graded_dual(side, o, amb), local_space(amb, tag, o)
        if not D.same(M):
            return Outcome("fail", {"dual": D.dim, "local": M.dim}, {"element": str(o), "pair": _mismatch(D, M)})
    return Outcome("pass", {"checked": len(els)})


def check_global_graded_duality(ctx: Context, p: dict, rng: random.Random) -> Outcome:
    amb = AmbientSpace(ctx.window, ctx.step)
    k = int(p.get("count", 10))
    els = pick(rng, grid_intervals(ctx.window, ctx.step), k)
    if p.get("double", False):
        els += sample_double_intervals(rng, ctx.window, ctx.step, k)
    for o in els:
        D, M = global_graded_dual(o, amb), local_space(amb, SpaceTag.Vc, o)
        if not D.same(M):
            return Outcome("fail", {"dual": D.dim, "local": M.dim}, {"element": str(o), "pair": _mismatch(D, M)})
    return Outcome("pass", {"checked": len(els)})


# -- cohomology ------------------------------------------------------------------

def _cohomology_poset(ctx: Context, p: dict) -> tuple[CausalPoset, AmbientSpace]:
    w = ctx.param_window(p) if "window" in p else (Fraction(0), Fraction(4))
    h = ctx.param_step(p) if "step" in p else Fraction(1)
    poset = build_poset(p.get("kind", "D"), w, h, ctx.limits.get("maxElements"))
    return poset, AmbientSpace(w, h / 2)


def _endpoint_pairs(poset: CausalPoset, k: int) -> list[tuple[IndexElement, IndexElement]]:
    ivs = [x for x in poset if x.variant == "interval"]
    return [(a, b) for a, b in combinations(ivs, 2) if a.sup <= b.inf][:k]


def check_condition_aa(ctx: Context, p: dict, rng: random.Random) -> Outcome:
    tag = _tag(p, "Vf")
    poset, amb = _cohomology_poset(ctx, p)
    spec = NetSpec(tag, poset, amb)
    max_len = int(p.get("maxPathLen", ctx.limits.get("maxPathLen", 3)))
    expect = p.get("expect", "holds")
    pairs = _endpoint_pairs(poset, int(p.get("count", 5)))
    statuses = []
    for a0, a1 in pairs:
        r = condition_aa(spec, canonical_simplex1(a0, a1, poset), max_len)
        statuses.append(r.status)
        wit = None if r.witness is None else {"endpoints": [str(a0), str(a1)], "pair": pair_json(r.witness),
                                              "certified": [pair_json(w) for w in r.certified]}
        dims = {"pairs": len(pairs), "intersection": r.intersection.dim, "join": r.join.dim}
        if r.status != expect:
            return Outcome("fail", dims, wit or {"endpoints": [str(a0), str(a1)]}, f"condition {r.status}")
    return Outcome("pass", {"pairs": len(pairs), "status": expect}, wit if expect == "fails" else None)


def check_cocycle_triviality(ctx: Context, p: dict, rng: random.Random) -> Outcome:
    poset, amb = _cohomology_poset(ctx, p)
    charge_list = [ChargePair.of(Q(c), Q(q)) for c, q in p.get("charges", [[1, 0], [0, 1], [1, 1], [0, 0]])]
    trivial_tags = [SpaceTag[t] for t in p.get("trivialIn", ["Vf", "Vfl"])]
    obstruct_tag = SpaceTag[p.get("obstructIn", "Va")]
    rows = []
    for ch in charge_list:
        z = induced_cocycle(ch, poset, "l", amb)
        if not check_cocycle(z).ok:
            return Outcome("fail", {}, {"charge": [frac(ch.c), frac(ch.q)]}, "not a cocycle")
        for tag in trivial_tags:
            w = coboundary_feasibility(z, tag)
            if not (isinstance(w, TrivializerWitness) and w.reproduces(z) and all(w.in_target.values())):
                return Outcome("fail", {}, {"charge": [frac(ch.c), frac(ch.q)], "tag": tag.value}, "no trivializer")
        res = coboundary_feasibility(z, obstruct_tag)
        obstructed = isinstance(res, ObstructionCertificate) and res.verify()
        if obstructed != (not ch.is_zero):
            return Outcome("fail", {}, {"charge": [frac(ch.c), frac(ch.q)], "tag": obstruct_tag.value},
                           "obstruction does not match the charge")
        if obstructed:
            rows.append({"charge": [frac(ch.c), frac(ch.q)], "base": str(res.base), "distant": str(res.distant),
                         "transporter": pair_json(res.transporter)})
    return Outcome("pass", {"charges": len(charge_list), "simplices": len(z.values)}, rows or None)


Z0_TRIVIAL = ("Va", "Vq", "Vf0", "Vfl", "Vfr")
Z0_CONSTANT = ("Vb", "Vc", "Vf")


def check_z0(ctx: Context, p: dict, rng: random.Random) -> Outcome:
    w = ctx.param_window(p) if "window" in p else (Fraction(0), Fraction(4))
    h = ctx.param_step(p) if "step" in p else Fraction(1)
    amb = AmbientSpace(w, h / 2)
    table = {}
    for kind in p.get("kinds", ["I", "D"]):
        poset = build_poset(kind, w, h, ctx.limits.get("maxElements"))
        for t in Z0_TRIVIAL + Z0_CONSTANT:
            X = z0(NetSpec(SpaceTag[t], poset, amb))
            table[f"{kind}:{t}"] = X.dim
            want = 0 if t in Z0_TRIVIAL else 1
            if X.dim != want or (want == 1 and not _is_constant_family(X)):
                return Outcome("fail", table, {"net": f"{kind}:{t}", "basis": basis_json(X)})
    return Outcome("pass", table)


def _is_constant_family(X: SymplecticSubspace) -> bool:
    F, = X.generators()
    return F.f0.is_zero() and F.f1.is_constant() and F.f1.left_tail != 0


# -- sectors and geometry ----------------------------------------------------------

def _random_charge(rng: random.Random) -> ChargePair:
    return ChargePair(Fraction(rng.randint(-4, 4), rng.randint(1, 3)), Fraction(rng.randint(-4, 4), rng.randint(1, 3)))


def check_braiding(ctx: Context, p: dict, rng: random.Random) -> Outcome:
    n = ctx.samples(p, "braiding", 100)
    for _ in range(n):
        r, t = _random_charge(rng), _random_charge(rng)
        a = canonical_representative(r, (0, 2), RIGHT_TAIL_ZERO, 1)
        b = canonical_representative(t, (4, 6), LEFT_TAIL_ZERO, 1)
        got = braiding_phase(a, b).exponent
        want = -(r.c * t.q + r.q * t.c)
        mono, mono_want = monodromy(r, t), -2 * (r.c * t.q + r.q * t.c)
        if got != want or mono != mono_want:
            return Outcome("fail", {"samples": n}, {"rho": [frac(r.c), frac(r.q)], "tau": [frac(t.c), frac(t.q)],
                                                    "exponent": frac(got), "monodromy": frac(mono)})
    pure = [ChargePair.of(1, 0), ChargePair.of(2, 0), ChargePair.of(0, 1), ChargePair.of(0, 3)]
    for r in pure:
        for t in pure:
            if (r.q == 0) == (t.q == 0) and monodromy(r, t) != 0:
                return Outcome("fail", {}, {"rho": [frac(r.c), frac(r.q)], "tau": [frac(t.c), frac(t.q)]})
    for _ in range(10):
        r = _random_charge(rng)
        a = canonical_representative(r, (0, 2), RIGHT_TAIL_ZERO, 1)
        b = canonical_representative(r, (4, 6), LEFT_TAIL_ZERO, 1)
        if braiding_phase(a, b).exponent != -2 * r.c * r.q:
            return Outcome("fail", {}, {"self": [frac(r.c), frac(r.q)]})
    return Outcome("pass", {"samples": n})


def check_mobius(ctx: Context, p: dict, rng: random.Random) -> Outcome:
    k = int(p.get("count", 50))
    def lengths_differ(E: IndexElement) -> bool:
        return E.parts[0][1] - E.parts[0][0] != E.parts[1][1] - E.parts[1][0]
    chosen = sample_double_intervals(rng, ctx.window, ctx.step, k, 1, lengths_differ)
    equal = sample_double_intervals(rng, ctx.window, ctx.step, 10, 1, lambda E: not lengths_differ(E))
    for E in chosen:
        (al, be), (ga, de) = E.parts
        g = mobius_from_double_interval(E)
        ok = (mobius_apply_endpoint(g, al) == al and mobius_apply_endpoint(g, de) == de
              and mobius_apply_endpoint(g, -be + al + de) == ga and mobius_apply_endpoint(g, -ga + al + de) == be)
        xi = xi_double_interval(E)
        ok = ok and mobius_apply_element(xi, E) == E and mobius_apply_element(xi, interval(be, ga)) == interval(be, ga)
        if not ok:
            return Outcome("fail", {"checked": len(chosen)}, {"element": str(E), "matrix": _matrix(g)})
    for E in equal:
        if not mobius_from_double_interval(E).is_identity():
            return Outcome("fail", {}, {"element": str(E)})
    return Outcome("pass", {"checked": len(chosen)})


def _matrix(m: MobiusMap) -> Json:
    return [[frac(x) for x in row] for row in m.m]


def check_xi_swap(ctx: Context, p: dict, rng: random.Random) -> Outcome:
    amb = AmbientSpace(ctx.window, ctx.step)
    els = pick(rng, grid_intervals(ctx.window, ctx.step, 1), int(p.get("count", 20)))
    for I in els:
        L, R = local_space(amb, SpaceTag.Vfl, I), local_space(amb, SpaceTag.Vfr, I)
        imL = SymplecticSubspace(amb, [amb.coords(xi_apply(I, F.simplified())) for F in L.generators()])
        imR = SymplecticSubspace(amb, [amb.coords(xi_apply(I, F.simplified())) for F in R.generators()])
        if not (imL.same(R) and imR.same(L)):
            return Outcome("fail", {"left": L.dim, "right": R.dim}, {"element": str(I), "pair": _mismatch(imL, R)})
    return Outcome("pass", {"checked": len(els)})


def check_partition_of_unity(ctx: Context, p: dict, rng: random.Random) -> Outcome:
    one = TestPair(f1=PiecewiseLinear.constant(1))
    ivs = grid_intervals(ctx.window, ctx.step, 1)
    for I in ivs:
        Fl, Fr = partition_of_unity(I, ctx.step)
        if not (Fl + Fr).same_as(one):
            return Outcome("fail", {}, {"element": str(I), "sum": pair_json(Fl + Fr)})
    n = ctx.samples(p, "partition-of-unity", 500)
    amb = AmbientSpace(ctx.window, ctx.step)
    lo, hi = ctx.window
    for _ in range(n):
        I = rng.choice([x for x in ivs if x.sup < hi])
        k = rng.randint(-3, 3)
        Fl, _ = partition_of_unity(I, ctx.step)
        nodes = [x for x in grid_nodes(ctx.window, ctx.step) if x >= I.sup]
        a, b = sorted(rng.sample(nodes, 2))
        G = random_element(rng, local_space(amb, SpaceTag.Vfr, interval(a, b)))
        ph = adjoint_phase(Fl.scaled(k), G)
        if ph != 0:
            return Outcome("fail", {"samples": n}, {"element": str(I), "G": pair_json(G), "phase": frac(ph)})
    return Outcome("pass", {"intervals": len(ivs), "samples": n})


# -- posets ------------------------------------------------------------------------

def check_poset_facts(ctx: Context, p: dict, rng: random.Random) -> Outcome:
    w = ctx.param_window(p) if "window" in p else (Fraction(0), Fraction(3))
    h = ctx.param_step(p) if "step" in p else Fraction(1, 2)
    P = {k: build_poset(k, w, h) for k in ("I", "I2", "D", "J")}
    facts = {}
    for k in ("I", "I2", "D", "J"):
        facts[f"{k}:directed"] = is_directed(P[k])
        facts[f"{k}:connected"] = is_connected(P[k])
    for a, b in (("I", "I2"), ("I", "D"), ("I", "J"), ("I2", "D"), ("I2", "J")):
        facts[f"{a}<{b}:cofinal"] = is_cofinal(P[a], P[b])
    want = {"I:directed": True, "I:connected": True, "I2:directed": True, "I2:connected": True,
            "D:directed": True, "D:connected": True, "J:directed": False, "J:connected": False,
            "I<I2:cofinal": True, "I<D:cofinal": True, "I<J:cofinal": False,
            "I2<D:cofinal": True, "I2<J:cofinal": False}
    bad = {k: v for k, v in facts.items() if want[k] != v}
    return Outcome(_ok(not bad), {k: v for k, v in facts.items()}, bad or None)


def check_bot_graph(ctx: Context, p: dict, rng: random.Random) -> Outcome:
    w = ctx.param_window(p) if "window" in p else (Fraction(-2), Fraction(2))
    h = ctx.param_step(p) if "step" in p else Fraction(1, 2)
    want = int(p.get("components", 2))
    dims, bad = {}, {}
    for k in p.get("kinds", ["I", "I2", "D", "J"]):
        g = bot_graph(build_poset(k, w, h))
        dims[f"{k}:components"] = g.component_count
        dims[f"{k}:interleaved"] = len(g.interleaved)
        if g.component_count != want:
            bad[k] = {"components": g.component_count, "interleaved_sample": [[str(x), str(y)] for x, y in g.interleaved[:3]]}
    return Outcome(_ok(not bad), dims, bad or None)


def check_flip(ctx: Context, p: dict, rng: random.Random) -> Outcome:
    w, h = ctx.param_window(p), ctx.param_step(p)
    res = {k: flip_check(build_poset(k, w, h, ctx.limits.get("maxElements"))) for k in p.get("kinds", ["I", "J"])}
    return Outcome(_ok(all(res.values())), res, None if all(res.values()) else {"kinds": [k for k, v in res.items() if not v]})


CHECKS: dict[str, Callable[[Context, dict, random.Random], Outcome]] = {
    "haag-duality": check_haag_duality,
    "double-interval-gap": check_double_interval_gap,
    "additivity": check_additivity,
    "graded-locality": check_graded_locality,
    "graded-duality": check_graded_duality,
    "global-graded-duality": check_global_graded_duality,
    "condition-aa": check_condition_aa,
    "cocycle-triviality": check_cocycle_triviality,
    "z0": check_z0,
    "braiding": check_braiding,
    "mobius": check_mobius,
    "xi-swap": check_xi_swap,
    "poset-facts": check_poset_facts,
    "bot-graph": check_bot_graph,
    "flip-check": check_flip,
    "partition-of-unity": check_partition_of_unity,
}

# checks that rely on the space inversion and need a window symmetric about 0
NEEDS_SYMMETRIC = frozenset({"flip-check"})
