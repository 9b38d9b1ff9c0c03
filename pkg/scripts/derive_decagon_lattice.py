"""Print the decagon contact lattice found by the edge-pair search."""
import numpy as np

from interlock.tilings import DECAGON_APOTHEM, derive_decagon_lattice

lat = derive_decagon_lattice()
np.set_printoptions(precision=12, suppress=True)
print("apothem", DECAGON_APOTHEM)
print("basis t1", lat.basis[0])
print("basis t2", lat.basis[1])
print("contact edges", lat.contact_edges)
for v in lat.neighbor_vectors:
    print("neighbour", v)
