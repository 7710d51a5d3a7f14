"""The runnable verification battery behind `dqmf verify`.

Each check returns {check, params, pass, witness?}; the CLI exits nonzero
if any fails.  The pytest acceptance suite runs the same material at full
scale; this battery is sized to finish in seconds per field.
"""

from __future__ import annotations

import random

from .algebra import RatT, d_power
from .hyperd import DerivationEngine
from .qmring import QmPoly, associated_polynomial, grading
from .tseries import evaluate, expand_E, expand_g, expand_h, hyper_derive, nu_infinity
from .verify import (
    IdealId,
    check_hyperstable,
    diagram_inclusions,
    h_power_quotient,
    munu_congruence,
    random_isobaric,
)

__all__ = ["run_suite", "CHECKS"]


def _inv_d(cfg, i, k):
    return RatT._raw(cfg, cfg.poly_one, d_power(i, k, cfg))


def _d(cfg, i):
    return RatT(cfg, d_power(i, 1, cfg))


def generator_table(cfg, gen: str, n: int) -> QmPoly:
    """Expected D_n of a generator for n < q or n a p-power <= q^2."""
    p, q, e = cfg.p, cfg.q, cfg.e
    mono = QmPoly.monomial
    if 0 <= n < q:
        if gen == "E":
            return mono(cfg, n + 1, 0, 0)
        if gen == "g":
            if n == 0:
                return mono(cfg, 0, 1, 0)
            if n == 1:
                return -(mono(cfg, 1, 1, 0) + mono(cfg, 0, 0, 1))
            return QmPoly.zero(cfg)
        return mono(cfg, n, 0, 1)
    # p-power range [q, q^2]
    i = 0
    m = n
    while m % p == 0:
        m //= p
        i += 1
    if m != 1 or n > q * q:
        raise ValueError("table covers n < q and p-powers up to q^2 only")
    s = p ** (i - e)
    if n < q * q:
        if gen == "E":
            return mono(cfg, n + 1, 0, 0) + mono(cfg, 0, s - 1, s + 1, _inv_d(cfg, 1, s))
        if gen == "g":
            return mono(cfg, n, 1, 0)
        return (
            mono(cfg, n, 0, 1)
            + mono(cfg, q, s - 1, s, _inv_d(cfg, 1, s - 1))
            - mono(cfg, 0, s, s + 1, _inv_d(cfg, 1, s))
        )
    d1, inv_d2 = _d(cfg, 1), _inv_d(cfg, 2, 1)
    if gen == "E":
        return (
            mono(cfg, n + 1, 0, 0)
            + mono(cfg, 0, q - 1, q + 1, _inv_d(cfg, 1, q))
            + mono(cfg, 0, 2 * q, 2, inv_d2)
        )
    if gen == "g":
        return (
            mono(cfg, n, 1, 0)
            - mono(cfg, 0, q + 1, q, d1 * inv_d2)
            + mono(cfg, 0, 0, 2 * q - 1, _inv_d(cfg, 1, q - 1) - d1 * d1 * inv_d2)
        )
    return (
        mono(cfg, n, 0, 1)
        + mono(cfg, q, q - 1, q, _inv_d(cfg, 1, q - 1))
        - mono(cfg, 0, 2 * q + 1, 2, inv_d2)
        - mono(cfg, 0, q, q + 1, d1 * inv_d2 + _inv_d(cfg, 1, q))
    )


def p_powers_upto(cfg, bound):
    out = []
    v = 1
    while v <= bound:
        out.append(v)
        v *= cfg.p
    return out


def series_check_orders(cfg):
    q = cfg.q
    ns = set(range(1, q + 1))
    for pk in p_powers_upto(cfg, q * q):
        ns.add(pk)
        if pk - 1 >= 1:
            ns.add(pk - 1)
        if pk - q >= 1:
            ns.add(pk - q)
    return sorted(ns)


def _check_generator_tables(cfg, engine, rng, n_max, order):
    bad = []
    for gen in ("E", "g", "h"):
        for n in list(range(cfg.q)) + p_powers_upto(cfg, cfg.q**2):
            if engine.d_generator(gen, n) != generator_table(cfg, gen, n):
                bad.append((gen, n))
    return {"check": "generator_tables", "params": f"q={cfg.q}", "pass": not bad,
            **({"witness": str(bad)} if bad else {})}


def _check_series_commutation(cfg, engine, rng, n_max, order):
    N = order or (cfg.q**2 + cfg.q + 2)
    gens = {"E": QmPoly.gen_E(cfg), "g": QmPoly.gen_g(cfg), "h": QmPoly.gen_h(cfg)}
    series = {"E": expand_E(cfg, N), "g": expand_g(cfg, N), "h": expand_h(cfg, N)}
    bad = []
    for name, f in gens.items():
        for n in series_check_orders(cfg):
            if evaluate(engine.derive(f, n), N) != hyper_derive(series[name], n):
                bad.append((name, n))
    return {"check": "series_commutation", "params": f"q={cfg.q} N={N}", "pass": not bad,
            **({"witness": str(bad)} if bad else {})}


def _check_leading_terms(cfg, engine, rng, n_max, order):
    N = order or (cfg.q**2 + cfg.q + 2)
    q = cfg.q
    E, g, h = expand_E(cfg, N), expand_g(cfg, N), expand_h(cfg, N)
    one = cfg.rat_one
    probes = [
        ("E t", E.coeff(1), one),
        ("E t^(q^2-2q+2)", E.coeff(q * q - 2 * q + 2), one),
        ("g 1", g.coeff(0), one),
        ("g t^(q-1)", g.coeff(q - 1), -_d(cfg, 1)),
        ("h t", h.coeff(1), -one),
        ("h t^(q^2-2q+2)", h.coeff(q * q - 2 * q + 2), -one),
        ("DqE t^2", hyper_derive(E, q).coeff(2), _inv_d(cfg, 1, 1)),
        ("Dqg t^q", hyper_derive(g, q).coeff(q), one),
        ("Dqh t^2", hyper_derive(h, q).coeff(2), -_inv_d(cfg, 1, 1)),
        ("Dq2E t^2", hyper_derive(E, q * q).coeff(2), _inv_d(cfg, 2, 1)),
        ("Dq2g t^q", hyper_derive(g, q * q).coeff(q), _d(cfg, 1) * _inv_d(cfg, 2, 1)),
        ("Dq2h t^2", hyper_derive(h, q * q).coeff(2), -_inv_d(cfg, 2, 1)),
    ]
    bad = [name for name, got, want in probes if got != want]
    if nu_infinity(h) != 1:
        bad.append("nu(h)")
    return {"check": "series_leading_terms", "params": f"q={cfg.q} N={N}", "pass": not bad,
            **({"witness": str(bad)} if bad else {})}


def _check_ideals(cfg, engine, rng, n_max, order):
    from .verify import random_ratt

    n_max = min(n_max, engine.limit)
    ideals = [IdealId("h"), IdealId("P0"), IdealId("Pinf")]
    for _ in range(2):
        d = cfg.rat_zero
        while d.is_zero():
            d = random_ratt(cfg, rng, 1)
        ideals.append(IdealId("Pd", d))
    ideals.append(IdealId("max", random_ratt(cfg, rng, 1)))
    failures = []
    for ideal in ideals:
        rep = check_hyperstable(engine, ideal, n_max)
        if not rep.passed:
            failures.append(rep.to_json())
    # negative controls: (g) escapes at n = 1, (E) at n = q
    for tag, horizon in (("g", 1), ("E", cfg.q)):
        rep = check_hyperstable(engine, IdealId(tag), horizon)
        if rep.passed:
            failures.append({"ideal": tag, "unexpected": "stable"})
    diag = diagram_inclusions(engine, [i.param for i in ideals if i.tag == "Pd"],
                              [i.param for i in ideals if i.tag == "max"])
    failures.extend([name for name, ok in diag if not ok])
    return {"check": "ideal_stability", "params": f"q={cfg.q} n_max={n_max}",
            "pass": not failures, **({"witness": str(failures)} if failures else {})}


def _check_munu(cfg, engine, rng, n_max, order):
    bad = []
    for mu in range(0, 4):
        for nu in range(0, 4):
            for n in range(0, min(16, engine.limit) + 1):
                if not munu_congruence(engine, mu, nu, n):
                    bad.append((mu, nu, n))
    return {"check": "munu_congruence", "params": f"q={cfg.q}", "pass": not bad,
            **({"witness": str(bad)} if bad else {})}


def _check_h_quotients(cfg, engine, rng, n_max, order):
    r_max = min(n_max, engine.limit)
    bad = []
    for n in range(-3, 4):
        for r in range(0, r_max + 1):
            if h_power_quotient(engine, n, r) is None:
                bad.append((n, r))
    return {"check": "h_power_quotients", "params": f"q={cfg.q} r<={r_max}",
            "pass": not bad, **({"witness": str(bad)} if bad else {})}


def _check_dual_route(cfg, engine, rng, n_max, order):
    bad = []
    for _ in range(10):
        f = random_isobaric(cfg, rng, w_max=14)
        s = grading(f)
        n = rng.randint(1, min(12, engine.limit))
        lhs = engine.transform_depth_poly(associated_polynomial(f), s.w, n)
        rhs = associated_polynomial(engine.derive(f, n))
        if lhs != rhs:
            bad.append((str(f), n))
    return {"check": "depth_poly_dual_route", "params": f"q={cfg.q}", "pass": not bad,
            **({"witness": str(bad)} if bad else {})}


def _check_weight_divisibility(cfg, engine, rng, n_max, order):
    from .verify import weight_divisibility_check

    samples = [
        QmPoly.gen_E(cfg),
        QmPoly.gen_g(cfg),
        QmPoly.monomial(cfg, 1, 1, 0) + QmPoly.gen_h(cfg),
        random_isobaric(cfg, rng, 12),
    ]
    bad = [k for k in (0, 1) if cfg.p**k <= engine.limit
           and not weight_divisibility_check(engine, k, samples)]
    return {"check": "weight_divisibility", "params": f"q={cfg.q}", "pass": not bad,
            **({"witness": str(bad)} if bad else {})}


def _check_kernels(cfg, engine, rng, n_max, order):
    bad = []
    for k in (0, 1):
        pk1 = cfg.p ** (k + 1)
        if cfg.p**k > engine.limit:
            continue
        for w in range(1, 6 * (cfg.q - 1) + 1):
            for m in (0, 1):
                kernel = engine.kernel_on_modular(w, m, k)
                if w % pk1 != 0:
                    if kernel:
                        bad.append((w, m, k, "nonempty"))
                    continue
                for v in kernel:
                    root = v
                    try:
                        for _ in range(k + 1):
                            root = root.pth_root()
                    except ArithmeticError:
                        bad.append((w, m, k, "not a p-power"))
    return {"check": "kernel_suite", "params": f"q={cfg.q}", "pass": not bad,
            **({"witness": str(bad)} if bad else {})}


CHECKS = {
    "generator_tables": _check_generator_tables,
    "series_commutation": _check_series_commutation,
    "series_leading_terms": _check_leading_terms,
    "ideal_stability": _check_ideals,
    "munu_congruence": _check_munu,
    "h_power_quotients": _check_h_quotients,
    "depth_poly_dual_route": _check_dual_route,
    "weight_divisibility": _check_weight_divisibility,
    "kernel_suite": _check_kernels,
}


def run_suite(cfg, n_max=32, order=None, seed=20260808, names=None):
    engine = DerivationEngine(cfg)
    rng = random.Random(seed)
    selected = names or list(CHECKS)
    results = []
    for name in selected:
        if name not in CHECKS:
            results.append({"check": name, "pass": False, "witness": "unknown check"})
            continue
        results.append(CHECKS[name](cfg, engine, rng, n_max, order))
    return results
