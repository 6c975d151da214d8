"""Behavioral distance on a probabilistic transition system, exactly.

The system (demos/data/fig1_left.json): state x moves to u with
probability 1/2 - eps and to z with 1/2 + eps; y moves to u and z with
1/2 each; u loops forever; z terminates.  With discount c the distance
between x and y comes out as exactly c * eps.

Run:  python3 03_probabilistic_distance.py [--eps 1/20] [--c 9/10]
"""

import argparse
import json
from fractions import Fraction
from pathlib import Path

from behametric import IterationOptions, behavioral_distances, load_system
from behametric.fixpoint import trace_to_csv

parser = argparse.ArgumentParser()
parser.add_argument("--eps", default="1/20")
parser.add_argument("--c", default="9/10")
args = parser.parse_args()

doc = json.loads((Path(__file__).parent / "data" / "fig1_left.json").read_text())
system = load_system(doc, eps=Fraction(args.eps), c=Fraction(args.c))

matrix = behavioral_distances(system, IterationOptions(trace=True))
print(f"converged after {matrix.iterations} iterations (exact arithmetic)\n")

print("iterates of the fixed-point computation:")
print(trace_to_csv(matrix))

c, eps = Fraction(args.c), Fraction(args.eps)
print(f"d(u,z) = {matrix.get('u', 'z').mag}   (u never terminates, z always does)")
print(f"d(x,y) = {matrix.get('x', 'y').mag}   (= c*eps = {c * eps})")
