"""Contexts and the context poset.

A context is a commutative subalgebra of observables, stored as its
partition of unity. Coarser partitions sit below finer ones, and the
partial order of contexts is where all the later structure lives.
"""
import numpy as np

from qtopos.contexts import (
    build_poset,
    builtin_scenario,
    context_from_commuting_set,
    context_intersection,
)

SZ = np.diag([1.0, -1.0])
SX = np.array([[0.0, 1.0], [1.0, 0.0]])

ctx = context_from_commuting_set([SZ], label="sz")
print("context generated by sigma_z:")
for i, block in enumerate(ctx.blocks):
    print(f"  block {i} (rank {round(np.trace(block).real)}):")
    print("   ", np.array_str(block.real, precision=3).replace("\n", "\n    "))

other = context_from_commuting_set([SX], label="sx")
print("\nintersection of the sz and sx contexts:",
      context_intersection(ctx, other))
print("(None: the only shared projectors are 0 and the identity)")

dim, ops, maximal = builtin_scenario("mermin-square")
poset = build_poset(maximal, closure="intersections")
print(f"\nmermin-square poset: {len(poset.contexts)} contexts")
for c in poset.contexts:
    kind = "maximal" if len(c.blocks) == 4 else "shared eigencontext"
    print(f"  {c.key:>10}  blocks={len(c.blocks)}  ({kind})")
strict = sorted((lo, hi) for lo, hi in poset.leq if lo != hi)
print(f"strict inclusions: {len(strict)}")
for lo, hi in strict[:4]:
    print(f"  {lo} < {hi}")
print("  ...")
