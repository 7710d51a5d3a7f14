#!/usr/bin/env python3
"""Print the divided-derivative generator tables D_n E, D_n g, D_n h for a
chosen field: all n < q and every p-power up to q^2.

Usage: python scripts/generator_tables.py [q]
"""

import sys

from dqmf import DerivationEngine, FieldConfig


def main():
    q = int(sys.argv[1]) if len(sys.argv) > 1 else 5
    cfg = FieldConfig.from_q(q)
    engine = DerivationEngine(cfg)
    print(f"# field F_{q} (p={cfg.p}, e={cfg.e}), computable orders 0..{engine.limit}")
    orders = list(range(q))
    v = cfg.p
    while v <= q * q:
        if v not in orders:
            orders.append(v)
        v *= cfg.p
    for gen in ("E", "g", "h"):
        print(f"\n## D_n {gen}")
        for n in orders:
            print(f"D_{n} {gen} = {engine.d_generator(gen, n)}")


if __name__ == "__main__":
    main()
