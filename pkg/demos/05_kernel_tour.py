"""The presheaf-topos kernel on bare posets.

Everything quantum sits on a generic engine: presheaves of finite
sets over a finite poset, their subobjects, the classifier Omega of
sieves, Heyting operations, exponentials, and power objects. On a
two-element chain the internal logic is already non-Boolean.
"""
from qtopos import kernel as K

chain = K.finposet(("bottom", "top"), (("bottom", "top"),))
om = K.omega(chain)
print("two-element chain bottom < top")
print("Omega(top):   ", list(om.component("top")))
print("Omega(bottom):", list(om.component("bottom")))

one = K.terminal(chain)
subs = K.all_subobjects(one)
print(f"\nsubobjects of the terminal presheaf: {len(subs)}")
print(f"global elements of Omega:            {len(K.global_elements(om))}")

# the middle subobject breaks excluded middle
j = K.subobject(one, {"bottom": one.component("bottom"), "top": ()})
neg = K.heyting_not(j)
lem = K.heyting_join(j, neg)
whole = K.full_subobject(one)
print("\nJ        =", dict(j.parts))
print("not J    =", dict(neg.parts))
print("J or not J =", dict(lem.parts), "!= whole", dict(whole.parts))
print("not not J  =", dict(K.heyting_not(neg).parts), "(the whole again)")

anti = K.finposet(("a", "b", "c"))
om3 = K.omega(anti)
print(f"\nthree-element antichain: {len(K.all_subobjects(K.terminal(anti)))} "
      "subobjects of 1, every one complemented (Boolean logic)")

x = K.presheaf(chain, {"top": ("0", "1"), "bottom": ("0", "1")},
               {("top", "bottom"): {"0": "0", "1": "1"}})
counts = (len(K.all_subobjects(x)),
          len(K.hom_set(x, om)),
          len(K.global_elements(K.power_object(x))))
print(f"\ncounting check on a 2x2 presheaf X: |Sub(X)| = |Hom(X,Omega)| = "
      f"|Gamma(PX)| = {counts}")
exp = K.exponential(x, x)
print(f"|Hom(1, X^X)| = {len(K.hom_set(one, exp))} = "
      f"|Hom(X, X)| = {len(K.hom_set(x, x))}")
