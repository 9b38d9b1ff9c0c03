"""Write the negative-control fixtures into fixtures/."""
from pathlib import Path

import numpy as np

from interlock import io
from interlock.assembly import Assembly, build_layer, detect_contacts
from interlock.geometry import HalfSpace, hrep_to_vrep
from interlock.reconstruct import Element, identify_shape

OUT = Path(__file__).resolve().parent.parent / "fixtures"


def cube(center) -> Element:
    c = np.asarray(center, dtype=float)
    hs = [HalfSpace(s * e, 0.5 + s * (e @ c)) for e in np.eye(3) for s in (1.0, -1.0)]
    body = hrep_to_vrep(hs, 3)
    return Element(body, (int(c[0]), int(c[1])), [], identify_shape(body), {}, c)


def cubic_packing(n: int = 5) -> Assembly:
    elements = [cube((i, j, 0)) for i in range(n) for j in range(n)]
    interior = [0 < i < n - 1 and 0 < j < n - 1 for i in range(n) for j in range(n)]
    return Assembly(elements, detect_contacts(elements), interior)


def main() -> None:
    OUT.mkdir(exist_ok=True)
    io.write_json(io.assembly_to_doc(cubic_packing(), "cubic-packing"), OUT / "cubic_packing.json")
    for fam, name in (("square-tetra", "single_tetra.json"), ("hex-cube", "single_cube.json")):
        io.write_json(io.assembly_to_doc(build_layer(fam, 1, 1)), OUT / name)


if __name__ == "__main__":
    main()
