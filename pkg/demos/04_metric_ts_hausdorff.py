"""Behavioral distance on a metric transition system (Hausdorff lifting).

States carry a numeric proposition value and a set of successors
(demos/data/fig1_right.json).  The distance of two states is the max of
the proposition distance and the Hausdorff distance between the successor
sets, solved as a least fixed point over [0, inf].
"""

import json
from pathlib import Path

from behametric import behavioral_distances, load_system

doc = json.loads((Path(__file__).parent / "data" / "fig1_right.json").read_text())
system = load_system(doc)

matrix = behavioral_distances(system)
print(f"exact fixed point after {matrix.iterations} iterations\n")

pairs = [("x1", "y1"), ("x2", "y2"), ("x2", "y3"), ("x3", "y2"), ("x3", "y3")]
for a, b in pairs:
    print(f"d({a},{b}) = {matrix.get(a, b).mag}")

print()
print("d(x1,y1) is driven by the successor sets: the Hausdorff distance")
print("matches every successor to the closest one on the other side and")
print("takes the worst case, here 3/10 between the y3 and x3 branches.")
