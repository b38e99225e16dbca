"""The spectral presheaf and contextual truth values.

This is the quantum layer on top of the generic kernel: each context
contributes its blocks as a finite set, restriction coarsens blocks, and
projectors are approximated per context by the smallest dominating (outer)
or largest dominated (inner) sums of blocks.  Truth values of propositions
land in the lower sets of the context poset, and the global-section search
decides whether a noncontextual valuation exists at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import kernel
from .contexts import Context, ContextPoset
from .errors import (
    Ambiguity,
    DimensionMismatch,
    DownwardClosureViolation,
    NotInContext,
    NotUnitNorm,
    SizeLimit,
    ValidationError,
)
from .numerics import (
    Tolerance,
    as_operator,
    as_vector,
    eigensystem,
    frob,
    proj_leq,
    require_projector,
)

KS_NODE_LIMIT = 10 ** 7


def poset_base(poset: ContextPoset) -> kernel.FinPoset:
    """The context poset as a bare kernel poset of keys."""
    return kernel.finposet([c.key for c in poset.contexts], poset.leq)


@dataclass(frozen=True, eq=False)
class SpectralPresheaf:
    """Blocks per context, restricted by coarsening."""

    poset: ContextPoset
    underlying: kernel.Presheaf

    @property
    def base(self) -> kernel.FinPoset:
        return self.underlying.base


def spectral_presheaf(poset: ContextPoset,
                      tol: Tolerance = Tolerance()) -> SpectralPresheaf:
    """Build the spectral presheaf of a context poset.

    The component at a context is the tuple of its block indices; the
    restriction map to a smaller context sends each block to the unique
    coarser block above it, and raises ``Ambiguity`` otherwise.
    """
    base = poset_base(poset)
    sets = {c.key: tuple(range(len(c.blocks))) for c in poset.contexts}
    restrictions = {}
    for (frm, to) in base.strict_down_pairs():
        fine = poset.context(frm)
        coarse = poset.context(to)
        mapping = {}
        for qi, q in enumerate(fine.blocks):
            parents = [pi for pi, p in enumerate(coarse.blocks)
                       if proj_leq(q, p, tol)]
            if len(parents) != 1:
                raise Ambiguity(
                    f"block {qi} of {frm} lies under {len(parents)} blocks of {to}")
            mapping[qi] = parents[0]
        restrictions[(frm, to)] = mapping
    underlying = kernel.presheaf(base, sets, restrictions)
    return SpectralPresheaf(poset=poset, underlying=underlying)


@dataclass(frozen=True, eq=False)
class SpectralElement:
    """One block of one context: a local valuation."""

    context: Context
    block: int

    def __post_init__(self):
        if not 0 <= self.block < len(self.context.blocks):
            raise ValidationError(
                f"block index {self.block} out of range for {self.context.key}")


def evaluate(element: SpectralElement, operator,
             tol: Tolerance = Tolerance()) -> float:
    """The value of an operator of the context at a spectral element."""
    ctx = element.context
    op = as_operator(operator)
    if op.shape[0] != ctx.dim:
        raise DimensionMismatch(
            f"operator dimension {op.shape[0]} != context dimension {ctx.dim}")
    bound = tol.scaled(ctx.dim)
    coeffs = [complex(np.trace(p @ op)) / float(np.trace(p).real)
              for p in ctx.blocks]
    recon = sum(c.real * p for c, p in zip(coeffs, ctx.blocks))
    if frob(recon - op) > bound or max(abs(c.imag) for c in coeffs) > bound:
        raise NotInContext(
            f"operator is not a real combination of the blocks of {ctx.key}")
    return float(coeffs[element.block].real)


def _overlap_indices(proj: np.ndarray, ctx: Context, tol: Tolerance) -> tuple[int, ...]:
    bound = tol.scaled(ctx.dim)
    return tuple(i for i, p in enumerate(ctx.blocks)
                 if frob(p @ proj) > bound)


def daseinise_projector(projector, ctx: Context,
                        tol: Tolerance = Tolerance()) -> np.ndarray:
    """Outer approximation: smallest block sum dominating the projector."""
    p = require_projector(projector, tol, "projector")
    if p.shape[0] != ctx.dim:
        raise DimensionMismatch(
            f"projector dimension {p.shape[0]} != context dimension {ctx.dim}")
    picked = _overlap_indices(p, ctx, tol)
    out = sum((ctx.blocks[i] for i in picked),
              np.zeros((ctx.dim, ctx.dim), dtype=complex))
    out.setflags(write=False)
    return out


def daseinise_projector_inner(projector, ctx: Context,
                              tol: Tolerance = Tolerance()) -> np.ndarray:
    """Inner approximation: largest block sum dominated by the projector."""
    p = require_projector(projector, tol, "projector")
    eye = np.eye(p.shape[0], dtype=complex)
    out = eye - daseinise_projector(eye - p, ctx, tol)
    out = (out + out.conj().T) / 2
    out.setflags(write=False)
    return out


def daseinise_block_indices(projector, ctx: Context,
                            tol: Tolerance = Tolerance(),
                            inner: bool = False) -> tuple[int, ...]:
    """Indices of the blocks summed by the chosen approximation."""
    p = require_projector(projector, tol, "projector")
    if inner:
        eye = np.eye(p.shape[0], dtype=complex)
        dropped = set(_overlap_indices(eye - p, ctx, tol))
        return tuple(i for i in range(len(ctx.blocks)) if i not in dropped)
    return _overlap_indices(p, ctx, tol)


def delta_subobject(projector, presheaf: SpectralPresheaf,
                    tol: Tolerance = Tolerance()) -> kernel.Subobject:
    """The outer approximation of a projector as a subobject of the presheaf."""
    p = require_projector(projector, tol, "projector")
    parts = {c.key: _overlap_indices(p, c, tol)
             for c in presheaf.poset.contexts}
    return kernel.subobject(presheaf.underlying, parts)


@dataclass(frozen=True, eq=False)
class PseudoState:
    """A unit vector as a subobject: its support blocks in every context."""

    psi: np.ndarray
    subobject: kernel.Subobject


def pseudo_state(psi, presheaf: SpectralPresheaf,
                 tol: Tolerance = Tolerance()) -> PseudoState:
    vec = as_vector(psi, presheaf.poset.dim)
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > tol.eps:
        raise NotUnitNorm(f"state norm {norm!r} is not 1 within tolerance")
    proj = np.outer(vec, vec.conj())
    sub = delta_subobject(proj, presheaf, tol)
    for key, part in sub.parts.items():
        if not part:
            raise ValidationError(f"pseudo-state is empty at context {key}")
    return PseudoState(psi=vec, subobject=sub)


@dataclass(frozen=True, eq=False)
class TruthObject:
    """Per context, the filter of block sums the state almost surely passes.

    Members are bitmasks over block indices; bit i set means block i is in
    the sum.
    """

    psi: np.ndarray
    members: dict

    def contains(self, key: str, mask: int) -> bool:
        return mask in self.members[key]


def truth_object(psi, poset: ContextPoset,
                 tol: Tolerance = Tolerance()) -> TruthObject:
    vec = as_vector(psi, poset.dim)
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > tol.eps:
        raise NotUnitNorm(f"state norm {norm!r} is not 1 within tolerance")
    members = {}
    for ctx in poset.contexts:
        weights = [float(np.vdot(vec, p @ vec).real) for p in ctx.blocks]
        good = frozenset(
            mask for mask in range(1, 2 ** len(ctx.blocks))
            if sum(w for i, w in enumerate(weights) if mask >> i & 1)
            >= 1.0 - tol.eps)
        members[ctx.key] = good
    obj = TruthObject(psi=vec, members=members)
    for ctx in poset.contexts:
        full = 2 ** len(ctx.blocks) - 1
        if full not in obj.members[ctx.key]:
            raise ValidationError(f"identity missing from filter at {ctx.key}")
    return obj


def truth_value_pseudo(projector, psi, presheaf: SpectralPresheaf,
                       tol: Tolerance = Tolerance()) -> kernel.LowerSet:
    """Contexts where the state's support lies inside the outer approximation."""
    state = pseudo_state(psi, presheaf, tol)
    delta = delta_subobject(projector, presheaf, tol)
    members = {key for key in presheaf.base.elements
               if set(state.subobject.parts[key]) <= set(delta.parts[key])}
    for (u, v) in presheaf.base.strict_pairs():
        if v in members and u not in members:
            raise DownwardClosureViolation(
                f"truth set contains {v} but not {u} below it")
    return kernel.LowerSet(base=presheaf.base, members=frozenset(members))


def truth_value_truthobject(projector, psi, poset: ContextPoset,
                            tol: Tolerance = Tolerance()) -> kernel.LowerSet:
    """Contexts where the outer approximation is almost surely true."""
    vec = as_vector(psi, poset.dim)
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > tol.eps:
        raise NotUnitNorm(f"state norm {norm!r} is not 1 within tolerance")
    p = require_projector(projector, tol, "projector")
    base = poset_base(poset)
    members = set()
    for ctx in poset.contexts:
        approx = daseinise_projector(p, ctx, tol)
        if float(np.vdot(vec, approx @ vec).real) >= 1.0 - tol.eps:
            members.add(ctx.key)
    return kernel.lowerset(base, members)


@dataclass(frozen=True, eq=False)
class TruthAssignment:
    """A choice of one block per context."""

    assignments: dict

    def items_sorted(self) -> tuple[tuple[str, int], ...]:
        return tuple(sorted(self.assignments.items()))


def validate_assignment(presheaf: SpectralPresheaf,
                        assignment: TruthAssignment) -> bool:
    """Check restriction compatibility of a total assignment, from scratch."""
    x = presheaf.underlying
    picks = assignment.assignments
    if set(picks) != set(x.base.elements):
        return False
    for key, block in picks.items():
        if block not in x.sets[key]:
            return False
    for (u, v) in x.base.strict_pairs():
        if x.restrict(picks[v], v, u) != picks[u]:
            return False
    return True


@dataclass(frozen=True, eq=False)
class KsResult:
    """Outcome of the global-section search."""

    status: str
    sections: tuple[TruthAssignment, ...]
    nodes_explored: int


def ks_search(presheaf: SpectralPresheaf, max_solutions: int = 8,
              tol: Tolerance = Tolerance()) -> KsResult:
    """Exhaustive backtracking search for global sections.

    Contexts are assigned fewest-blocks-first with block indices ascending;
    ``NoSection`` is reported only after the whole space is exhausted.
    """
    if not presheaf.poset.contexts:
        raise ValidationError("cannot search an empty poset")
    if max_solutions < 1:
        raise ValidationError("max_solutions must be positive")
    x = presheaf.underlying
    base = x.base
    order = sorted(base.elements, key=lambda key: (len(x.sets[key]), key))
    position = {key: i for i, key in enumerate(order)}
    comparable = {key: [] for key in order}
    for (u, v) in base.strict_pairs():
        if position[u] < position[v]:
            comparable[v].append((u, "down"))
        else:
            comparable[u].append((v, "up"))
    assign: dict = {}
    sections: list[dict] = []
    nodes = 0

    def rec(i: int) -> bool:
        nonlocal nodes
        if i == len(order):
            sections.append(dict(assign))
            return len(sections) >= max_solutions
        key = order[i]
        for block in x.sets[key]:
            nodes += 1
            if nodes > KS_NODE_LIMIT:
                raise SizeLimit(f"search exceeded {KS_NODE_LIMIT} nodes")
            ok = True
            for other, direction in comparable[key]:
                if direction == "down":
                    # other is below key: key's block must coarsen to it
                    if x.restrict(block, key, other) != assign[other]:
                        ok = False
                        break
                else:
                    if x.restrict(assign[other], other, key) != block:
                        ok = False
                        break
            if ok:
                assign[key] = block
                if rec(i + 1):
                    return True
                del assign[key]
        return False

    rec(0)
    found = [TruthAssignment(assignments=s)
             for s in sorted(sections, key=lambda s: tuple(sorted(s.items())))]
    for sec in found:
        if not validate_assignment(presheaf, sec):
            raise ValidationError("search produced an inconsistent section")
    status = "SectionsExist" if found else "NoSection"
    return KsResult(status=status, sections=tuple(found), nodes_explored=nodes)


def daseinise_observable(operator, ctx: Context,
                         tol: Tolerance = Tolerance()) -> tuple[np.ndarray, np.ndarray]:
    """Inner and outer spectral-order approximations of a Hermitian operator.

    Returns ``(inner, outer)``.  With eigenvalues a_1 < ... < a_m and
    cumulative spectral projectors E_k, the outer approximation uses the
    inner daseinisation of each E_k and the inner approximation the outer
    one; both lie in the context and ``outer - inner`` is positive
    semidefinite.
    """
    pairs = eigensystem(operator, tol)
    dim = ctx.dim
    if pairs[0][1].shape[0] != dim:
        raise DimensionMismatch(
            f"operator dimension {pairs[0][1].shape[0]} != context dimension {dim}")
    zero = np.zeros((dim, dim), dtype=complex)
    cumulative = []
    total = zero
    for _value, proj in pairs:
        total = total + proj
        cumulative.append(total)
    outer = zero
    inner = zero
    prev_f = zero
    prev_g = zero
    for (value, _proj), e_k in zip(pairs, cumulative):
        f_k = daseinise_projector_inner(e_k, ctx, tol)
        g_k = daseinise_projector(e_k, ctx, tol)
        outer = outer + value * (f_k - prev_f)
        inner = inner + value * (g_k - prev_g)
        prev_f, prev_g = f_k, g_k
    outer = (outer + outer.conj().T) / 2
    inner = (inner + inner.conj().T) / 2
    outer.setflags(write=False)
    inner.setflags(write=False)
    return inner, outer


def value_interval(element: SpectralElement, operator,
                   tol: Tolerance = Tolerance()) -> tuple[float, float]:
    """The [inner, outer] value interval of an observable at an element."""
    inner, outer = daseinise_observable(operator, element.context, tol)
    return (evaluate(element, inner, tol), evaluate(element, outer, tol))
