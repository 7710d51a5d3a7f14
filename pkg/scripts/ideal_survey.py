#!/usr/bin/env python3
"""Survey hyperdifferential stability of the classified ideals, with the
principal ideals (E) and (g) as negative controls.

Usage: python scripts/ideal_survey.py [q] [n_max]
"""

import sys

from dqmf import DerivationEngine, FieldConfig, IdealId, RatT, check_hyperstable


def main():
    q = int(sys.argv[1]) if len(sys.argv) > 1 else 5
    cfg = FieldConfig.from_q(q)
    engine = DerivationEngine(cfg)
    n_max = min(int(sys.argv[2]) if len(sys.argv) > 2 else 64, engine.limit)
    T = RatT(cfg, cfg.poly_T)
    ideals = [
        IdealId("h"),
        IdealId("P0"),
        IdealId("Pinf"),
        IdealId("Pd", T),
        IdealId("Pd", T + cfg.rat_one),
        IdealId("max", cfg.rat_zero),
        IdealId("max", T),
        IdealId("E"),
        IdealId("g"),
    ]
    for ideal in ideals:
        report = check_hyperstable(engine, ideal, n_max)
        if report.passed:
            print(f"{ideal.describe():>14}: stable through n = {n_max}")
        else:
            gen, n, witness = next(e for e in report.entries if e[1] is not None)
            print(f"{ideal.describe():>14}: escapes at n = {n}  (D_{n} {gen} leaves residue {witness})")


if __name__ == "__main__":
    main()
