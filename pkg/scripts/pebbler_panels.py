#!/usr/bin/env python3
"""Print per-round panels (budget, work, storage) for every schedule family.

For the chosen order k, each family gets a column triple: the set-up budget
or reversal work spent that round, the live pebble count at the start of the
round, and the emitted chain element's index if any.  A summary table of
worst-case work and storage across orders follows, next to the predicted
bounds max(k+1, 2k-2), k+1, k-1 and ceil(k/2).
"""

import argparse

from chainpebble.cli import default_seed
from chainpebble.owf import builtin
from chainpebble.pebbler import run_trace
from chainpebble.schedule import FAMILIES


def print_panel(owf, family, k, seed):
    rows = run_trace(owf, family, k, seed)
    print(f"\n{family} pebbler, order {k} (chain length {1 << k})")
    print(f"{'round':>5} {'hashes':>6} {'pebbles':>7}  output")
    emitted = (1 << k) - 1
    for row in rows:
        label = ""
        if row.output is not None:
            label = f"x_{emitted} = {row.output.hex()}"
            emitted -= 1
        print(f"{row.round:>5} {row.hashes:>6} {row.storage:>7}  {label}")


def print_summary(owf, seed, k_max):
    print(f"\nworst-case work / storage by order (measured vs predicted)")
    header = f"{'k':>3}"
    for family in FAMILIES:
        header += f" | {family:>16}"
    print(header + " |   speed1-pred  speed2/opt-pred  opt-work-pred")
    for k in range(1, k_max + 1):
        line = f"{k:>3}"
        for family in FAMILIES:
            rows = run_trace(owf, family, k, seed)
            work = max(row.hashes for row in rows[1 << k:]) if k else 0
            store = max(row.storage for row in rows)
            line += f" | w={work:>2} s={store:>2}   "
        line += f" |   s={max(k + 1, 2 * k - 2):>2}        s={k + 1:>2}            w={(k + 1) // 2:>2}"
        print(line)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--k", type=int, default=4, help="panel order (default 4)")
    parser.add_argument("--k-max", type=int, default=10, dest="k_max",
                        help="largest order in the summary table")
    parser.add_argument("--owf", default="testmix64",
                        choices=("md5", "davies-meyer-aes128", "testmix64"))
    args = parser.parse_args()
    owf = builtin(args.owf)
    seed = default_seed(owf)
    for family in FAMILIES:
        print_panel(owf, family, args.k, seed)
    print_summary(owf, seed, args.k_max)


if __name__ == "__main__":
    main()
