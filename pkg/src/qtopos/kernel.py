"""A presheaf-topos engine over arbitrary finite posets.

Implements presheaves of finite sets together with the categorical
structure the quantum layer needs: subobjects, the subobject classifier,
Heyting operations, exponentials, power objects and lower-set truth values.
Everything is enumerated explicitly; guards turn combinatorial blow-ups
into ``SizeLimit`` errors instead of hangs.

Conventions
-----------
* Poset elements are strings; ``leq`` holds ``(u, v)`` iff ``u <= v``.
* Component points may be any value with a stable ``repr``; components are
  stored as tuples sorted by ``repr`` so all enumeration output is
  deterministic.
* A sieve at ``v`` is the sorted tuple of its member elements, and the
  points of ``omega(base)`` at ``v`` are exactly these tuples.
* Power-object points and exponential points are nested sorted tuples, so
  equality is plain ``==`` everywhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import (
    BaseMismatch,
    NotGlobalElement,
    NotNatural,
    ParentMismatch,
    SizeLimit,
    ValidationError,
)

GLOBAL_SEARCH_LIMIT = 10 ** 7
COMPONENT_LIMIT = 10 ** 6


def _pkey(point) -> str:
    return repr(point)


def _sorted_points(points) -> tuple:
    return tuple(sorted(points, key=_pkey))


@dataclass(frozen=True)
class FinPoset:
    """A finite poset; ``leq`` is reflexive, antisymmetric and transitive."""

    elements: tuple[str, ...]
    leq: frozenset[tuple[str, str]]

    def le(self, u: str, v: str) -> bool:
        return (u, v) in self.leq

    def down(self, v: str) -> tuple[str, ...]:
        return tuple(u for u in self.elements if self.le(u, v))

    def strict_pairs(self) -> list[tuple[str, str]]:
        """All (u, v) with u < v, in canonical order."""
        return [(u, v) for u in self.elements for v in self.elements
                if u != v and self.le(u, v)]

    def strict_down_pairs(self) -> list[tuple[str, str]]:
        """All (frm, to) with to < frm: the keys of restriction maps."""
        return [(v, u) for (u, v) in self.strict_pairs()]


def finposet(elements, pairs=()) -> FinPoset:
    """Build a poset from order pairs, closing reflexively and transitively."""
    elems = tuple(sorted(elements))
    if len(set(elems)) != len(elems):
        raise ValidationError("poset elements must be unique")
    index = {e: i for i, e in enumerate(elems)}
    n = len(elems)
    rel = [[False] * n for _ in range(n)]
    for i in range(n):
        rel[i][i] = True
    for (u, v) in pairs:
        if u not in index or v not in index:
            raise ValidationError(f"order pair ({u!r}, {v!r}) mentions unknown elements")
        rel[index[u]][index[v]] = True
    for k in range(n):
        for i in range(n):
            if rel[i][k]:
                row_k = rel[k]
                row_i = rel[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    for i in range(n):
        for j in range(n):
            if i != j and rel[i][j] and rel[j][i]:
                raise ValidationError(
                    f"order is not antisymmetric: {elems[i]!r} and {elems[j]!r}")
    leq = frozenset((elems[i], elems[j]) for i in range(n) for j in range(n)
                    if rel[i][j])
    return FinPoset(elements=elems, leq=leq)


def _extension_desc(base: FinPoset) -> list[str]:
    """A linear extension listing every element after all strictly above it."""
    placed: list[str] = []
    remaining = set(base.elements)
    while remaining:
        ready = sorted(u for u in remaining
                       if not any(u != w and base.le(u, w) for w in remaining))
        placed.extend(ready)
        remaining.difference_update(ready)
    return placed


@dataclass(frozen=True)
class Presheaf:
    """Finite sets indexed by poset elements, with restriction maps downward."""

    base: FinPoset
    sets: dict
    restrictions: dict

    def component(self, v: str) -> tuple:
        return self.sets[v]

    def restrict(self, x, frm: str, to: str):
        if frm == to:
            return x
        return self.restrictions[(frm, to)][x]


def presheaf(base: FinPoset, sets, restrictions) -> Presheaf:
    """Validate and normalise a presheaf: totality plus functoriality."""
    comps = {}
    for v in base.elements:
        if v not in sets:
            raise ValidationError(f"missing component for element {v!r}")
        pts = _sorted_points(sets[v])
        if len(set(pts)) != len(pts):
            raise ValidationError(f"duplicate points in component {v!r}")
        comps[v] = pts
    if set(sets) - set(base.elements):
        raise ValidationError("components given for elements outside the poset")

    expected = set(base.strict_down_pairs())
    maps = {}
    for pair in expected:
        if pair not in restrictions:
            raise ValidationError(f"missing restriction map for {pair!r}")
        frm, to = pair
        mapping = dict(restrictions[pair])
        if set(mapping) != set(comps[frm]):
            raise ValidationError(f"restriction {pair!r} is not total")
        for x, y in mapping.items():
            if y not in comps[to]:
                raise ValidationError(
                    f"restriction {pair!r} sends {x!r} outside the target component")
        maps[pair] = mapping
    if set(restrictions) - expected:
        raise ValidationError("restriction maps given for non-comparable pairs")

    for (u, v) in base.strict_pairs():
        for w in base.elements:
            if w != u and w != v and base.le(w, u):
                via = maps[(u, w)]
                direct = maps[(v, w)]
                step = maps[(v, u)]
                for x in comps[v]:
                    if direct[x] != via[step[x]]:
                        raise ValidationError(
                            f"functoriality fails on the chain {w!r} < {u!r} < {v!r}")
    return Presheaf(base=base, sets=comps, restrictions=maps)


@dataclass(frozen=True)
class Subobject:
    """A sub-presheaf: componentwise subsets closed under restriction."""

    of: Presheaf
    parts: dict

    def part(self, v: str) -> tuple:
        return self.parts[v]


def subobject(of: Presheaf, parts) -> Subobject:
    norm = {}
    for v in of.base.elements:
        pts = _sorted_points(parts.get(v, ()))
        for x in pts:
            if x not in of.sets[v]:
                raise ValidationError(f"point {x!r} at {v!r} is not in the parent")
        norm[v] = pts
    for (frm, to) in of.base.strict_down_pairs():
        for x in norm[frm]:
            if of.restrict(x, frm, to) not in norm[to]:
                raise ValidationError(
                    f"parts are not closed under restriction {frm!r} -> {to!r}")
    return Subobject(of=of, parts=norm)


def full_subobject(x: Presheaf) -> Subobject:
    return Subobject(of=x, parts={v: x.sets[v] for v in x.base.elements})


def empty_subobject(x: Presheaf) -> Subobject:
    return Subobject(of=x, parts={v: () for v in x.base.elements})


@dataclass(frozen=True)
class LowerSet:
    """A downward-closed set of poset elements; the canonical truth values."""

    base: FinPoset
    members: frozenset

    @property
    def sorted_members(self) -> tuple[str, ...]:
        return tuple(sorted(self.members))

    @property
    def is_full(self) -> bool:
        return len(self.members) == len(self.base.elements)

    @property
    def is_empty(self) -> bool:
        return not self.members


def lowerset(base: FinPoset, members) -> LowerSet:
    mem = frozenset(members)
    for v in mem:
        if v not in base.elements:
            raise ValidationError(f"{v!r} is not an element of the poset")
        for u in base.elements:
            if base.le(u, v) and u not in mem:
                raise ValidationError(
                    f"not downward closed: {v!r} is in but {u!r} below it is not")
    return LowerSet(base=base, members=mem)


def full_lowerset(base: FinPoset) -> LowerSet:
    return LowerSet(base=base, members=frozenset(base.elements))


def empty_lowerset(base: FinPoset) -> LowerSet:
    return LowerSet(base=base, members=frozenset())


@dataclass(frozen=True)
class NatTransform:
    """A natural transformation between presheaves on the same poset."""

    source: Presheaf
    target: Presheaf
    components: dict

    def at(self, v: str, x):
        return self.components[v][x]


def nat_transform(source: Presheaf, target: Presheaf, components) -> NatTransform:
    if source.base != target.base:
        raise BaseMismatch("source and target live over different posets")
    comps = {}
    for v in source.base.elements:
        if v not in components:
            raise NotNatural(f"missing component at {v!r}")
        mapping = dict(components[v])
        if set(mapping) != set(source.sets[v]):
            raise NotNatural(f"component at {v!r} is not total")
        for x, y in mapping.items():
            if y not in target.sets[v]:
                raise NotNatural(f"component at {v!r} lands outside the target")
        comps[v] = mapping
    for (u, v) in source.base.strict_pairs():
        for x in source.sets[v]:
            left = target.restrict(comps[v][x], v, u)
            right = comps[u][source.restrict(x, v, u)]
            if left != right:
                raise NotNatural(f"naturality square fails for {u!r} <= {v!r}")
    return NatTransform(source=source, target=target, components=comps)


def terminal(base: FinPoset) -> Presheaf:
    """The terminal presheaf: one point everywhere."""
    sets = {v: ("*",) for v in base.elements}
    restr = {pair: {"*": "*"} for pair in base.strict_down_pairs()}
    return presheaf(base, sets, restr)


def global_elements(x: Presheaf) -> list[NatTransform]:
    """All compatible families of points, as arrows from the terminal."""
    base = x.base
    space = 1
    for v in base.elements:
        space *= len(x.sets[v])
        if space > GLOBAL_SEARCH_LIMIT:
            raise SizeLimit(
                f"global-element search space exceeds {GLOBAL_SEARCH_LIMIT}")
    if space == 0:
        return []
    order = _extension_desc(base)
    uppers = {v: [u for u in order[:i] if base.le(v, u)]
              for i, v in enumerate(order)}
    results: list[dict] = []
    assign: dict = {}

    def rec(i: int) -> None:
        if i == len(order):
            results.append(dict(assign))
            return
        v = order[i]
        ups = uppers[v]
        if ups:
            forced = x.restrict(assign[ups[0]], ups[0], v)
            candidates = (forced,)
        else:
            candidates = x.sets[v]
        for pt in candidates:
            if all(x.restrict(assign[u], u, v) == pt for u in ups):
                assign[v] = pt
                rec(i + 1)
                del assign[v]

    rec(0)
    one = terminal(base)
    return [nat_transform(one, x, {v: {"*": pts[v]} for v in base.elements})
            for pts in results]


def _lower_sets_below(base: FinPoset, dv: tuple[str, ...],
                      limit: int) -> list[tuple]:
    """All downward-closed subsets of ``dv``, each as a tuple in dv order."""
    ascending = [u for u in reversed(_extension_desc(base)) if u in dv]
    preds = {u: [w for w in dv if w != u and base.le(w, u)] for u in dv}
    out: list[tuple] = []
    current: set = set()

    def rec(i: int) -> None:
        if i == len(ascending):
            out.append(tuple(u for u in dv if u in current))
            if len(out) > limit:
                raise SizeLimit(f"more than {limit} sieves in one component")
            return
        u = ascending[i]
        rec(i + 1)
        if all(w in current for w in preds[u]):
            current.add(u)
            rec(i + 1)
            current.remove(u)

    rec(0)
    return out


def omega(base: FinPoset) -> Presheaf:
    """The subobject classifier: sieves (lower sets below each element)."""
    sets = {}
    down_cache = {v: base.down(v) for v in base.elements}
    for v in base.elements:
        sieves = _lower_sets_below(base, down_cache[v], COMPONENT_LIMIT)
        sets[v] = _sorted_points(sieves)
    restr = {}
    for (frm, to) in base.strict_down_pairs():
        below = set(down_cache[to])
        restr[(frm, to)] = {s: tuple(u for u in s if u in below)
                            for s in sets[frm]}
    return presheaf(base, sets, restr)


def characteristic(k: Subobject) -> NatTransform:
    """The classifying arrow of a subobject, landing in ``omega``."""
    x = k.of
    om = omega(x.base)
    comps = {}
    for v in x.base.elements:
        dv = x.base.down(v)
        comps[v] = {pt: tuple(u for u in dv
                              if x.restrict(pt, v, u) in k.parts[u])
                    for pt in x.sets[v]}
    return nat_transform(x, om, comps)


def subobject_from_characteristic(chi: NatTransform) -> Subobject:
    """Pull the maximal sieve back along a classifying arrow."""
    x = chi.source
    if chi.target != omega(x.base):
        raise NotNatural("arrow does not land in the subobject classifier")
    parts = {}
    for v in x.base.elements:
        principal = x.base.down(v)
        parts[v] = tuple(pt for pt in x.sets[v]
                         if chi.components[v][pt] == principal)
    return subobject(x, parts)


def _same_parent(j: Subobject, k: Subobject) -> Presheaf:
    if j.of != k.of:
        raise ParentMismatch("subobjects live over different presheaves")
    return j.of


def heyting_meet(j: Subobject, k: Subobject) -> Subobject:
    x = _same_parent(j, k)
    return Subobject(of=x, parts={
        v: tuple(pt for pt in j.parts[v] if pt in k.parts[v])
        for v in x.base.elements})


def heyting_join(j: Subobject, k: Subobject) -> Subobject:
    x = _same_parent(j, k)
    return Subobject(of=x, parts={
        v: _sorted_points(set(j.parts[v]) | set(k.parts[v]))
        for v in x.base.elements})


def heyting_implies(j: Subobject, k: Subobject) -> Subobject:
    """Largest subobject whose meet with ``j`` lies inside ``k``."""
    x = _same_parent(j, k)
    parts = {}
    for v in x.base.elements:
        good = []
        for pt in x.sets[v]:
            ok = True
            for u in x.base.down(v):
                y = x.restrict(pt, v, u)
                if y in j.parts[u] and y not in k.parts[u]:
                    ok = False
                    break
            if ok:
                good.append(pt)
        parts[v] = tuple(good)
    return Subobject(of=x, parts=parts)


def heyting_not(j: Subobject) -> Subobject:
    return heyting_implies(j, empty_subobject(j.of))


def subobject_leq(j: Subobject, k: Subobject) -> bool:
    x = _same_parent(j, k)
    return all(set(j.parts[v]) <= set(k.parts[v]) for v in x.base.elements)


def product(a: Presheaf, b: Presheaf) -> Presheaf:
    """Componentwise cartesian product."""
    if a.base != b.base:
        raise BaseMismatch("factors live over different posets")
    base = a.base
    sets = {v: _sorted_points(itertools.product(a.sets[v], b.sets[v]))
            for v in base.elements}
    restr = {}
    for (frm, to) in base.strict_down_pairs():
        restr[(frm, to)] = {(pa, pb): (a.restrict(pa, frm, to),
                                       b.restrict(pb, frm, to))
                            for (pa, pb) in sets[frm]}
    return presheaf(base, sets, restr)


def _function_space(domain: tuple, codomain: tuple) -> list[dict]:
    """All functions domain -> codomain as dicts, in canonical order."""
    out = []
    for images in itertools.product(codomain, repeat=len(domain)):
        out.append(dict(zip(domain, images)))
    return out


def exponential(a: Presheaf, b: Presheaf) -> Presheaf:
    """The presheaf of natural partial families ``b ** a``.

    The component at ``v`` consists of families of functions
    ``f_u : a(u) -> b(u)`` for every ``u <= v``, natural in ``u``; points are
    encoded as sorted tuples of ``(u, graph)`` pairs.
    """
    if a.base != b.base:
        raise BaseMismatch("exponential factors live over different posets")
    base = a.base
    order_all = _extension_desc(base)
    sets = {}
    for v in base.elements:
        dv = base.down(v)
        bound = 1
        for u in dv:
            bound *= max(1, len(b.sets[u])) ** len(a.sets[u])
            if len(b.sets[u]) == 0 and len(a.sets[u]) > 0:
                bound = 0
        if bound > COMPONENT_LIMIT:
            raise SizeLimit(
                f"exponential component at {v!r} exceeds {COMPONENT_LIMIT}")
        order = [u for u in order_all if u in dv]
        uppers = {u: [w for w in order[:i] if base.le(u, w)]
                  for i, u in enumerate(order)}
        families: list[dict] = []
        chosen: dict = {}

        def rec(i: int) -> None:
            if i == len(order):
                families.append(dict(chosen))
                return
            u = order[i]
            for fn in _function_space(a.sets[u], b.sets[u]):
                natural = True
                for w in uppers[u]:
                    fw = chosen[w]
                    for pt in a.sets[w]:
                        if b.restrict(fw[pt], w, u) != fn[a.restrict(pt, w, u)]:
                            natural = False
                            break
                    if not natural:
                        break
                if natural:
                    chosen[u] = fn
                    rec(i + 1)
                    del chosen[u]

        rec(0)
        encoded = [tuple((u, tuple((pt, fam[u][pt]) for pt in a.sets[u]))
                   for u in dv)
                   for fam in families]
        sets[v] = _sorted_points(encoded)
    restr = {}
    for (frm, to) in base.strict_down_pairs():
        below = set(base.down(to))
        restr[(frm, to)] = {enc: tuple(entry for entry in enc
                                       if entry[0] in below)
                            for enc in sets[frm]}
    return presheaf(base, sets, restr)


def _relative_subobjects(x: Presheaf, elems: tuple[str, ...],
                         limit: int = COMPONENT_LIMIT) -> list[dict]:
    """All families S(u) <= x(u) over ``elems`` closed under restriction."""
    base = x.base
    order = [u for u in _extension_desc(base) if u in elems]
    uppers = {u: [w for w in order[:i] if base.le(u, w)]
              for i, u in enumerate(order)}
    families: list[dict] = []
    chosen: dict = {}

    def rec(i: int) -> None:
        if i == len(order):
            families.append(dict(chosen))
            if len(families) > limit:
                raise SizeLimit(f"more than {limit} relative subobjects")
            return
        u = order[i]
        forced = set()
        for w in uppers[u]:
            forced.update(x.restrict(pt, w, u) for pt in chosen[w])
        fixed = _sorted_points(forced)
        free = [pt for pt in x.sets[u] if pt not in forced]
        for mask in range(2 ** len(free)):
            extra = [free[i2] for i2 in range(len(free)) if mask >> i2 & 1]
            chosen[u] = _sorted_points(set(fixed) | set(extra))
            rec(i + 1)
        del chosen[u]

    rec(0)
    return families


def all_subobjects(x: Presheaf, limit: int = COMPONENT_LIMIT) -> list[Subobject]:
    """Every subobject of ``x``, in a canonical deterministic order."""
    return [Subobject(of=x, parts=fam)
            for fam in _relative_subobjects(x, x.base.elements, limit)]


def _encode_relative(parts: dict, elems) -> tuple:
    return tuple((u, parts[u]) for u in sorted(elems))


def power_object(x: Presheaf) -> Presheaf:
    """The power object: at ``v``, all subobjects of ``x`` below ``v``."""
    base = x.base
    sets = {}
    for v in base.elements:
        dv = base.down(v)
        fams = _relative_subobjects(x, dv)
        sets[v] = _sorted_points(_encode_relative(fam, dv) for fam in fams)
    restr = {}
    for (frm, to) in base.strict_down_pairs():
        below = set(base.down(to))
        restr[(frm, to)] = {enc: tuple(entry for entry in enc
                                       if entry[0] in below)
                            for enc in sets[frm]}
    return presheaf(base, sets, restr)


def name_of(k: Subobject) -> NatTransform:
    """The global element of the power object that picks out ``k``."""
    x = k.of
    px = power_object(x)
    comps = {v: {"*": _encode_relative(k.parts, x.base.down(v))}
             for v in x.base.elements}
    return nat_transform(terminal(x.base), px, comps)


def hom_set(x: Presheaf, y: Presheaf) -> list[NatTransform]:
    """All natural transformations x -> y, enumerated by backtracking."""
    if x.base != y.base:
        raise BaseMismatch("presheaves live over different posets")
    base = x.base
    bound = 1
    for v in base.elements:
        bound *= max(1, len(y.sets[v])) ** len(x.sets[v])
        if len(y.sets[v]) == 0 and len(x.sets[v]) > 0:
            return []
        if bound > GLOBAL_SEARCH_LIMIT:
            raise SizeLimit(f"hom-set search space exceeds {GLOBAL_SEARCH_LIMIT}")
    order = _extension_desc(base)
    uppers = {v: [u for u in order[:i] if base.le(v, u)]
              for i, v in enumerate(order)}
    results: list[dict] = []
    chosen: dict = {}

    def rec(i: int) -> None:
        if i == len(order):
            results.append(dict(chosen))
            return
        v = order[i]
        for fn in _function_space(x.sets[v], y.sets[v]):
            natural = True
            for u in uppers[v]:
                fu = chosen[u]
                for pt in x.sets[u]:
                    if y.restrict(fu[pt], u, v) != fn[x.restrict(pt, u, v)]:
                        natural = False
                        break
                if not natural:
                    break
            if natural:
                chosen[v] = fn
                rec(i + 1)
                del chosen[v]

    rec(0)
    return [nat_transform(x, y, comps) for comps in results]


def truth_value_membership(x: NatTransform, k: Subobject) -> LowerSet:
    """Where a global element lies inside a subobject, as a lower set."""
    parent = k.of
    if x.target != parent:
        raise NotGlobalElement("the element does not live in the subobject's parent")
    if x.source != terminal(parent.base):
        raise NotGlobalElement("the transformation is not a global element")
    members = {v for v in parent.base.elements
               if x.components[v]["*"] in k.parts[v]}
    return lowerset(parent.base, members)


def truth_value_inclusion(j: Subobject, k: Subobject) -> LowerSet:
    """Hereditary inclusion [[ j <= k ]] as a lower set."""
    x = _same_parent(j, k)
    members = set()
    for v in x.base.elements:
        if all(set(j.parts[u]) <= set(k.parts[u]) for u in x.base.down(v)):
            members.add(v)
    return lowerset(x.base, members)


def truth_value_element_of(t: Subobject, k: Subobject) -> LowerSet:
    """Where ``k``'s name lies inside a subobject of the power object."""
    x = k.of
    if t.of != power_object(x):
        raise ParentMismatch("first argument is not a subobject of the power object")
    members = set()
    for v in x.base.elements:
        enc = _encode_relative(k.parts, x.base.down(v))
        if enc in t.parts[v]:
            members.add(v)
    return lowerset(x.base, members)


def _same_base(a: LowerSet, b: LowerSet) -> FinPoset:
    if a.base != b.base:
        raise BaseMismatch("lower sets live over different posets")
    return a.base


def lowerset_meet(a: LowerSet, b: LowerSet) -> LowerSet:
    return LowerSet(base=_same_base(a, b), members=a.members & b.members)


def lowerset_join(a: LowerSet, b: LowerSet) -> LowerSet:
    return LowerSet(base=_same_base(a, b), members=a.members | b.members)


def lowerset_implies(a: LowerSet, b: LowerSet) -> LowerSet:
    base = _same_base(a, b)
    members = {v for v in base.elements
               if all(u in b.members or u not in a.members
                      for u in base.down(v))}
    return LowerSet(base=base, members=frozenset(members))


def lowerset_not(a: LowerSet) -> LowerSet:
    return lowerset_implies(a, empty_lowerset(a.base))


def lowerset_heyting(op: str, a: LowerSet, b: LowerSet | None = None) -> LowerSet:
    """Dispatch on 'meet' | 'join' | 'implies' | 'not'."""
    if op == "not":
        if b is not None:
            raise ValidationError("'not' is unary")
        return lowerset_not(a)
    if b is None:
        raise ValidationError(f"{op!r} needs two arguments")
    table = {"meet": lowerset_meet, "join": lowerset_join,
             "implies": lowerset_implies}
    if op not in table:
        raise ValidationError(f"unknown lower-set operation {op!r}")
    return table[op](a, b)
