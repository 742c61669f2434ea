"""Tour of the algebra backends: shapes, labels, axioms, and the bracket.

Run: python3 demos/01_algebra_tour.py
"""

import numpy as np

from superkdv import AlgebraDescriptor, get_algebra, validate_algebra

print("Backends and their channel structure")
print("-" * 60)
for name in ("scalar", "grassmann:2", "grassmann:3", "grassmann:4", "symplectic:1", "symplectic:2"):
    desc = AlgebraDescriptor.from_string(name)
    print(f"{name:>12}: even {desc.even_dim:3d} {desc.even_labels[:4]}"
          f"{'...' if desc.even_dim > 4 else ''}")
    print(f"{'':>12}  odd  {desc.odd_dim:3d} {desc.odd_labels[:4]}"
          f"{'...' if desc.odd_dim > 4 else ''}")

print()
print("Axiom validation (the acceptance backends, plus the degenerate one)")
print("-" * 60)
for name in ("scalar", "grassmann:2", "grassmann:6", "symplectic:3", "grassmann:1"):
    report = validate_algebra(AlgebraDescriptor.from_string(name))
    print(f"{name:>12}: {'pass' if report.passed else 'FAIL'}"
          + ("" if report.passed else f"  ({report.failures[0]['name']})"))

print()
print("The bracket [q1, q2] = q1 q2 - q2 q1 in coordinates")
print("-" * 60)
desc = AlgebraDescriptor.from_string("grassmann:3")
alg = get_algebra(desc)
rng = np.random.default_rng(0)
q1 = rng.uniform(-1, 1, desc.odd_dim)
q2 = rng.uniform(-1, 1, desc.odd_dim)
br = alg.odd_commutator(q1, q2)
print("grassmann:3, random q1, q2:")
print("  [q1,q2] + [q2,q1]        =", np.max(np.abs(br + alg.odd_commutator(q2, q1))))
print("  [q1,q2] - 2 odd_mul(q1,q2) =",
      np.max(np.abs(br - 2 * alg.odd_mul(q1, q2))))

desc = AlgebraDescriptor.from_string("symplectic:2")
alg = get_algebra(desc)
print("symplectic:2, basis pairs (bracket lands on the nil channel):")
for i, j in ((0, 2), (1, 3), (0, 1)):
    br = alg.odd_commutator(np.eye(4)[i], np.eye(4)[j])
    print(f"  [e{i+1},e{j+1}] = unit*{br[0]:+.0f} + nil*{br[1]:+.0f}")

print()
print("Any product of brackets sharing an argument vanishes identically:")
rng = np.random.default_rng(1)
for name in ("grassmann:4", "symplectic:2"):
    desc = AlgebraDescriptor.from_string(name)
    alg = get_algebra(desc)
    a, b = rng.uniform(-1, 1, desc.odd_dim), rng.uniform(-1, 1, desc.odd_dim)
    sq = alg.even_mul(alg.odd_commutator(a, b), alg.odd_commutator(a, b))
    print(f"  {name:>12}: [a,b]*[a,b] max = {np.max(np.abs(sq)):.2e}")
