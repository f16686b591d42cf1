#!/usr/bin/env python3
"""Play the box-deletion game against the cut-out covering strategy and
print the move transcript plus the survival potential of the outcome cell.
"""
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from gamecert.families import RcoSpec, covering_strategy_for_rco, generate_rco
from gamecert.gamesim import play_game, potential_phi, steering_policy

spec = RcoSpec(4, 5, m=2, t=1)
member = generate_rco(spec, depth=4)
strategy = covering_strategy_for_rco(member, c=0.5)

# steer straight at the first removed box: the strategy must delete it
cut = member.of_kind("cut", 1)[0]
transcript = play_game(steering_policy(cut.box.center), strategy, depth=4)
print(transcript.to_text())

hit = transcript.outcome_inside_deleted()
print(f"outcome center: {tuple(map(str, transcript.outcome_box.center))}")
print(f"outcome swallowed by a deletion: {hit is not None}"
      + (f" (move {hit.move}, exponent {hit.exponent})" if hit else ""))

# these ratios sit outside the certified regime (>= 1/5), so there is no
# default witness; any small threshold shows the potential bookkeeping
delta = 0.01
for level in (1, 2, 3):
    row = potential_phi(transcript, transcript.moves[level - 1].box, level, delta)
    phi = "0" if row.phi_log == float("-inf") else f"exp({row.phi_log:+.6f})"
    print(f"potential at level {level}: {phi}  survives threshold: {row.surviving}")

# the origin dodges every corner-placed cut; replay shows it surviving
safe = play_game(steering_policy((Fraction(0), Fraction(0))), strategy, depth=4)
print(f"\nsteering to the origin instead: swallowed by a deletion = "
      f"{safe.outcome_inside_deleted() is not None}")
