# Copyright 2026 The EntityForge Authors
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

"""Regenerates sample_prices.csv (synthetic, see README.md)."""

import math
import sys

# (first block, rounding exponent for x = 1 USD)
STEPS = [
    (160000, 7), (192000, 6), (229000, 5), (231000, 6), (232000, 5),
    (244000, 6), (249000, 5), (446000, 4), (447000, 5), (453000, 4),
    (497000, 3), (507000, 4), (510000, 3), (513000, 4), (582000, 3),
    (587000, 4), (588000, 3), (592000, 4), (593000, 3), (596000, 4),
    (617000, 3), (619000, 4), (641000, 3),
]


def exponent_at(block):
    current = None
    for start, i in STEPS:
        if start <= block:
            current = i
    return current


def main(out):
    out.write("block_index,usd_per_btc\n")
    for block in range(160000, 700001, 1000):
        i = exponent_at(block)
        # i holds exactly when 10^(7-i) < usd <= 10^(8-i).
        low = 10.0 ** (7 - i)
        wiggle = 0.5 + 0.5 * math.sin(block / 7919.0)
        usd = low * (1.3 + 7.5 * wiggle)
        out.write(f"{block},{usd:.2f}\n")


if __name__ == "__main__":
    main(sys.stdout)
