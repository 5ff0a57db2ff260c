#!/usr/bin/env python3
"""Regenerate the bundled toy word embeddings.

The bundled file exists so the cluster feature group works out of the box
and so clustering tests have a deterministic fixture.  Vectors are
synthetic: each thematic word group gets a well-separated random mean and
every word is that mean plus small noise, which gives k-means something
honest to find.  Swap in real embeddings (same text format: token followed
by its values, space-separated) for any serious run.

Usage: python3 scripts/make_toy_embeddings.py [output_path]
"""

import random
import sys
from pathlib import Path

DIM = 8
SEED = 2024
NOISE = 0.25
SPREAD = 3.0

GROUPS = {
    "transit_nouns": """
        metro bus train coach rail railway station platform terminal depot
        route line track fare ticket token pass card counter gate exit
        entrance escalator lift coachway carriage compartment seat
    """,
    "disruption": """
        delay delayed late cancel cancelled cancellation breakdown broken
        fault faulty jam jammed stuck halt halted stopped crowd crowded
        rush queue overcrowded congestion blocked closure closed failure
        outage disruption disrupted
    """,
    "negative_affect": """
        bad worst terrible horrible awful poor angry furious annoyed
        annoying frustrated frustrating disappointed disgusting pathetic
        useless ridiculous shame shameful mess dirty filthy unsafe rude
        hopeless miserable
    """,
    "positive_affect": """
        good great excellent wonderful awesome amazing nice fine perfect
        happy glad pleased comfortable clean safe smooth reliable helpful
        friendly convenient timely efficient improved better best
    """,
    "people": """
        i me my we us our you your he she it they them their passenger
        passengers commuter commuters driver conductor guard staff crew
        people public everyone somebody
    """,
    "actions": """
        go going went come coming reach reached travel travelling ride
        riding board boarding alight wait waiting run running stop start
        arrive arrived depart departed move moving
    """,
    "time_place": """
        today tomorrow yesterday morning evening night noon hour minute
        week month city town market school office home street road junction
        crossing bridge north south east west central
    """,
    "chatter": """
        weather rain sunny movie music game cricket food lunch dinner tea
        coffee phone book news shop friend party holiday weekend fun nice
        story picture photo
    """,
}


def main(out_path):
    rng = random.Random(SEED)
    lines = []
    seen = set()
    for words in GROUPS.values():
        mean = [rng.gauss(0.0, SPREAD) for _ in range(DIM)]
        for word in words.split():
            if word in seen:
                continue
            seen.add(word)
            vec = [m + rng.gauss(0.0, NOISE) for m in mean]
            lines.append(word + " " + " ".join(f"{v:.4f}" for v in vec))
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines)} vectors (dim {DIM}) to {out_path}")


if __name__ == "__main__":
    default = Path(__file__).resolve().parent.parent / "src" / "complaintminer" / "features" / "data" / "toy_embeddings.txt"
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else default)
