#!/usr/bin/env python3
# Copyright 2026 The sidescore Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes a small seeded tabular dataset with a hidden ordinal severity.

Each row has a latent severity s in [0, 1]. Eight features are noisy monotone
functions of s, four are pure noise. `side` is a noisy reading of s and
`target` is a second, independent noisy reading used only for evaluation.
"""

import argparse
import csv
import math
import random


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data/synthetic_tabular.csv")
    parser.add_argument("--rows", type=int, default=600)
    parser.add_argument("--seed", type=int, default=5)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    header = ["id"] + [f"f{i}" for i in range(12)] + ["side", "target"]
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in range(args.rows):
            s = rng.random()
            signal = [
                s + rng.gauss(0, 0.15),
                s * s + rng.gauss(0, 0.15),
                math.sqrt(s) + rng.gauss(0, 0.15),
                math.exp(s) + rng.gauss(0, 0.3),
                -s + rng.gauss(0, 0.2),
                math.log1p(3 * s) + rng.gauss(0, 0.2),
                math.sin(1.5 * s) + rng.gauss(0, 0.15),
                2 * s + rng.gauss(0, 0.5),
            ]
            noise = [rng.gauss(0, 1) for _ in range(4)]
            side = 10 * s + rng.gauss(0, 1.0)
            target = 10 * s + rng.gauss(0, 1.0)
            writer.writerow([row] + [f"{v:.6f}" for v in signal + noise] + [f"{side:.4f}", f"{target:.4f}"])


if __name__ == "__main__":
    main()
