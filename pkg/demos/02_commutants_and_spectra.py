"""Compute commutants and multiplicity spectra on small GNS spaces.

A multi-matrix algebra viewed as a Hilbert space under its trace carries a
left action, a right action, and the conjugation J with J L(b) J = R(b*).
The multiplicity spectrum of the abelian algebra generated by left-A and
right-B actions is the finite stand-in for the type decomposition behind the
mixed invariant: for masas in a full matrix algebra it is always {1}, and the
block count says how fine the joint decomposition is.
"""

import numpy as np

from puklab import (
    GnsSpace,
    TracedAlgebraShape,
    build_gadget,
    commutant,
    cutdown_spectrum,
    finite_puk_spectrum,
    generate_algebra,
    minimal_projections,
    mixed_spectrum,
    truncated_masa_pair,
)


def diag_units(n):
    return [np.diag(np.eye(n, dtype=complex)[i]) for i in range(n)]


print("== the commutation theorem, numerically ==")
for shape in (TracedAlgebraShape.full_matrix(3), TracedAlgebraShape.from_blocks((2, 1))):
    space = GnsSpace(shape)
    D = shape.total_dim
    # the block-diagonal matrix units generate the multi-matrix algebra
    units = []
    for sl, d in zip(shape.block_slices(), shape.blocks):
        for i in range(d):
            for j in range(d):
                u = np.zeros((D, D), dtype=complex)
                u[sl.start + i, sl.start + j] = 1.0
                units.append(u)
    left = generate_algebra([space.left(u) for u in units])
    comm = commutant(left)
    print(
        f"blocks {shape.blocks}: left action spans dim {left.dim}, "
        f"its commutant has dim {comm.dim} (the right action)"
    )

print("\n== mixed spectra ==")
shape2 = TracedAlgebraShape.full_matrix(2)
rep = mixed_spectrum(diag_units(2), diag_units(2), shape2)
print("diagonal masa against itself in M_2:", rep.as_set, f"({rep.block_count} blocks)")

rep = mixed_spectrum([np.eye(2, dtype=complex)], [np.eye(2, dtype=complex)], shape2)
print("scalars against scalars (degenerate, allowed):", rep.as_set)

a_gens, b_gens = truncated_masa_pair(2, 2)
rep = mixed_spectrum(a_gens, b_gens, TracedAlgebraShape.full_matrix(4))
print("diagonal of M_2 (x) M_2 against its step-conjugate:", rep.as_set,
      f"({rep.block_count} blocks)")

print("\n== the invariant of the diagonal masa at finite size ==")
print("Cutting away the span of the masa itself leaves the off-diagonal")
print("corners, one rank-one block per ordered pair:")
for n in (2, 3, 4):
    rep = finite_puk_spectrum(diag_units(n), TracedAlgebraShape.full_matrix(n))
    print(f"  M_{n}: spectrum {rep.as_set} with {rep.block_count} blocks (n^2-n = {n*n-n})")

print("\n== cutting down by a corner ==")
space = GnsSpace(shape2)
gens = [space.left(u) for u in diag_units(2)] + [space.right(u) for u in diag_units(2)]
alg = generate_algebra(gens)
full = minimal_projections(alg, seed=0)
print("full spectrum:", full.multiset)
corner = space.left(diag_units(2)[0]) @ space.right(diag_units(2)[1])
print("corner e_0 J e_1 J:", cutdown_spectrum(alg, corner).multiset)

print("\nstep unitary used for the conjugated pair:")
print(np.round(build_gadget(2).v.real, 3))
