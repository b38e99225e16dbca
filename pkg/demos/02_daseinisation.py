"""Daseinisation: approximating a projector inside each context.

A projector P rarely belongs to a given context V. The outer
daseinisation is the smallest block sum of V dominating P, the inner
one the largest block sum dominated by P. Together they bracket P.
"""
import numpy as np

from qtopos.contexts import build_poset, builtin_scenario
from qtopos.quantum import daseinise_projector, daseinise_projector_inner

P_XPLUS = np.array([[0.5, 0.5], [0.5, 0.5]])  # projector onto |x+>

_, _, maximal = builtin_scenario("pauli2")
poset = build_poset(maximal)

print("P = |x+><x+| daseinised in each qubit context:")
for ctx in poset.contexts:
    outer = daseinise_projector(P_XPLUS, ctx)
    inner = daseinise_projector_inner(P_XPLUS, ctx)
    print(f"\n  context {ctx.label}:")
    print(f"    outer rank {round(np.trace(outer).real)}, "
          f"inner rank {round(np.trace(inner).real)}")
    if np.allclose(outer, P_XPLUS):
        print("    P lies in this context, both approximations are P itself")
    else:
        print("    P is skew to this partition: outer inflates to the")
        print("    identity, inner deflates to zero, nothing in between")

print("\nThe sandwich inner <= P <= outer holds in every context;")
print("coarser contexts can only keep or widen the gap, never shrink it.")
