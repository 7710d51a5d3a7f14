"""The divided-derivative engine on K[E,g,h].

D_n is assembled from the generator values at p-power orders (direct
tables), digit composition for everything else, and Leibniz convolution
over monomial factors.  Powers of a generator are peeled off one p-power
atom at a time so that Frobenius sparsity (D_m of a p^k-th power vanishes
unless p^k | m) keeps the convolutions short.  A single engine instance
memoizes per (generator, order) and per (monomial, order); instances are
independent and safe to use in parallel with one engine per thread.
"""

from __future__ import annotations

from .algebra import FieldConfig, RatT, binom_mod_p, d_power, linear_solve
from .qmring import DepthPoly, QmPoly, grading, modular_basis

__all__ = ["DerivationEngine", "OrderOutOfRange", "depth_drop"]


class OrderOutOfRange(ValueError):
    """The requested derivative order exceeds the computable range."""


def depth_drop(w: int, l: int, n: int, p: int) -> bool:
    """True iff order-n differentiation drops the depth below l + n.

    The criterion is the vanishing of C(w - l + n - 1, n) mod p; it governs
    generic elements of weight w and depth l.
    """
    if n < 1:
        raise ValueError("depth_drop needs n >= 1")
    return binom_mod_p(w - l + n - 1, n, p) == 0


def _lowest_digit_split(n: int, p: int):
    """Split n at its lowest nonzero base-p digit: n = low + rest.

    ``low`` is digit * p^pos for the lowest nonzero digit, so C(n, rest) = 1
    and D_n = D_rest o D_low.
    """
    pos = 0
    m = n
    while m % p == 0:
        m //= p
        pos += 1
    digit = m % p
    low = digit * p**pos
    return low, n - low, digit, pos


class DerivationEngine:
    """Divided derivatives D_n on K[E,g,h] for 0 <= n <= p*q^2 - 1."""

    def __init__(self, cfg: FieldConfig):
        self.cfg = cfg
        self.limit = cfg.p * cfg.q**2 - 1
        self._gen_memo: dict = {}
        self._mono_memo: dict = {}
        self._E = QmPoly.gen_E(cfg)
        self._g = QmPoly.gen_g(cfg)
        self._h = QmPoly.gen_h(cfg)

    # -- generator values ----------------------------------------------------

    def _inv_d(self, i: int, k: int) -> RatT:
        """1/d_i^k as a canonical rational function (d_i is monic)."""
        return RatT._raw(self.cfg, self.cfg.poly_one, d_power(i, k, self.cfg))

    def _table_p_power(self, gen: str, i: int) -> QmPoly:
        """Direct generator tables for D_{p^i}, valid for p^i <= q^2."""
        cfg = self.cfg
        p, q, e = cfg.p, cfg.q, cfg.e
        n = p**i
        mono = QmPoly.monomial
        if n < q:
            if gen == "E":
                return mono(cfg, n + 1, 0, 0)
            if gen == "g":
                if n == 1:
                    return -(mono(cfg, 1, 1, 0) + mono(cfg, 0, 0, 1))
                return QmPoly.zero(cfg)
            return mono(cfg, n, 0, 1)
        if n < q * q:
            s = p ** (i - e)
            if gen == "E":
                return mono(cfg, n + 1, 0, 0) + mono(cfg, 0, s - 1, s + 1, self._inv_d(1, s))
            if gen == "g":
                return mono(cfg, n, 1, 0)
            return (
                mono(cfg, n, 0, 1)
                + mono(cfg, q, s - 1, s, self._inv_d(1, s - 1))
                - mono(cfg, 0, s, s + 1, self._inv_d(1, s))
            )
        # n == q^2
        d1 = RatT._raw(cfg, d_power(1, 1, cfg), cfg.poly_one)
        inv_d2 = self._inv_d(2, 1)
        if gen == "E":
            return (
                mono(cfg, n + 1, 0, 0)
                + mono(cfg, 0, q - 1, q + 1, self._inv_d(1, q))
                + mono(cfg, 0, 2 * q, 2, inv_d2)
            )
        if gen == "g":
            c_last = self._inv_d(1, q - 1) - d1 * d1 * inv_d2
            return (
                mono(cfg, n, 1, 0)
                - mono(cfg, 0, q + 1, q, d1 * inv_d2)
                + mono(cfg, 0, 0, 2 * q - 1, c_last)
            )
        c_last = d1 * inv_d2 + self._inv_d(1, q)
        return (
            mono(cfg, n, 0, 1)
            + mono(cfg, q, q - 1, q, self._inv_d(1, q - 1))
            - mono(cfg, 0, 2 * q + 1, 2, inv_d2)
            - mono(cfg, 0, q, q + 1, c_last)
        )

    def d_generator(self, gen: str, n: int) -> QmPoly:
        """D_n of a single generator, any 0 <= n <= limit."""
        if gen not in ("E", "g", "h"):
            raise ValueError(f"unknown generator {gen!r}")
        if n < 0 or n > self.limit:
            raise OrderOutOfRange(f"order {n} outside [0, {self.limit}]")
        if n == 0:
            return {"E": self._E, "g": self._g, "h": self._h}[gen]
        key = (gen, n)
        out = self._gen_memo.get(key)
        if out is not None:
            return out
        p = self.cfg.p
        low, rest, digit, pos = _lowest_digit_split(n, p)
        if rest == 0 and digit == 1:
            out = self._table_p_power(gen, pos)
        elif rest == 0:
            # single digit >= 2: D_n = digit^{-1} * D_{p^pos} o D_{n - p^pos}
            prev = self.d_generator(gen, n - p**pos)
            out = self.derive(prev, p**pos).scale_int(pow(digit, p - 2, p))
        else:
            # C(n, rest) = 1, so D_n = D_rest o D_low
            out = self.derive(self.d_generator(gen, low), rest)
        self._gen_memo[key] = out
        return out

    # -- derivatives of monomials and polynomials -----------------------------

    def _derive_monomial(self, mono: tuple, n: int) -> QmPoly:
        """D_n(E^a g^b h^c) by atom peeling plus Leibniz convolution."""
        if mono == (0, 0, 0):
            return QmPoly.one(self.cfg) if n == 0 else QmPoly.zero(self.cfg)
        if n == 0:
            return QmPoly.monomial(self.cfg, *mono)
        key = (mono, n)
        out = self._mono_memo.get(key)
        if out is not None:
            return out
        p = self.cfg.p
        a, b, c = mono
        if a:
            gen, exp, rest_of = "E", a, lambda x: (x, b, c)
        elif b:
            gen, exp, rest_of = "g", b, lambda x: (a, x, c)
        else:
            gen, exp, rest_of = "h", c, lambda x: (a, b, x)
        _, _, _, pos = _lowest_digit_split(exp, p)
        pk = p**pos
        rest = rest_of(exp - pk)
        # D_r(gen^{p^pos}) = (D_{r/p^pos} gen)^{p^pos}, zero unless p^pos | r
        total = QmPoly.zero(self.cfg)
        for r in range(0, n + 1, pk):
            right = self._derive_monomial(rest, n - r)
            if right.is_zero():
                continue
            left = self.d_generator(gen, r // pk)
            if left.is_zero():
                continue
            if pos:
                left = left.frobenius_pow(pos)
            total = total + left * right
        self._mono_memo[key] = total
        return total

    def derive(self, f: QmPoly, n: int) -> QmPoly:
        """D_n f for any f in K[E,g,h], 0 <= n <= limit."""
        if n < 0 or n > self.limit:
            raise OrderOutOfRange(f"order {n} outside [0, {self.limit}]")
        if n == 0:
            return f
        out = QmPoly.zero(self.cfg)
        for mono, v in f.terms.items():
            part = self._derive_monomial(mono, n)
            if not part.is_zero():
                out = out + part.scale(v)
        return out

    def depth_drop(self, w: int, l: int, n: int) -> bool:
        return depth_drop(w, l, n, self.cfg.p)

    # -- depth polynomial transport -------------------------------------------

    def transform_depth_poly(self, P: DepthPoly, w: int, n: int) -> DepthPoly:
        """Depth polynomial of D_n f from the depth polynomial P of f.

        Coefficient of Y^j is sum_r C(n + w + r - j - 1, r) D_{n-r} P_{j-r};
        equals associated_polynomial(derive(f, n)).
        """
        if n < 0 or n > self.limit:
            raise OrderOutOfRange(f"order {n} outside [0, {self.limit}]")
        cfg = self.cfg
        l = P.degree if not P.is_zero() else 0
        out = []
        for j in range(n + l + 1):
            acc = QmPoly.zero(cfg)
            for r in range(n + 1):
                src = j - r
                if src < 0 or src > P.degree:
                    continue
                bm = binom_mod_p(n + w + r - j - 1, r, cfg.p)
                if bm == 0:
                    continue
                term = self.derive(P.coeff(src), n - r)
                if not term.is_zero():
                    acc = acc + term.scale_int(bm)
            out.append(acc)
        return DepthPoly(cfg, out)

    # -- generator derivatives up to modular forms -----------------------------

    def derivative_mod_h_residue(self, i: int):
        """The modular residues of D_{p^i} on E, g, h.

        Returns (D_{p^i}E - E^{p^i+1},
                 D_{p^i}g - C(q-2+p^i, p^i) E^{p^i} g,
                 D_{p^i}h - E^{p^i}h - E^q D_{p^i-q}h), asserting that each
        is modular (depth 0) and lies in the ideal (h).
        """
        cfg = self.cfg
        n = cfg.p**i
        if n > self.limit:
            raise OrderOutOfRange(f"p^{i} exceeds limit {self.limit}")
        mono = QmPoly.monomial
        rE = self.d_generator("E", n) - mono(cfg, n + 1, 0, 0)
        cg = binom_mod_p(cfg.q - 2 + n, n, cfg.p)
        rg = self.d_generator("g", n) - mono(cfg, n, 1, 0).scale_int(cg)
        rh = self.d_generator("h", n) - mono(cfg, n, 0, 1)
        if n >= cfg.q:
            rh = rh - mono(cfg, cfg.q, 0, 0) * self.d_generator("h", n - cfg.q)
        for r in (rE, rg, rh):
            assert r.deg_E() <= 0, "residue is not modular"
            assert all(k[2] >= 1 for k in r.terms), "residue is not divisible by h"
        return rE, rg, rh

    # -- kernels on modular forms ----------------------------------------------

    def kernel_on_modular(self, w: int, m: int, k: int):
        """Basis of the modular forms of grading (w, m) killed by D_1 .. D_{p^k}.

        Solves for the joint kernel of D_{p^j}, j = 0..k, on the span of
        modular_basis(w, m); by digit composition this kills every D_n with
        1 <= n < p^{k+1}.
        """
        cfg = self.cfg
        if cfg.p**k > self.limit:
            raise OrderOutOfRange(f"p^{k} exceeds limit {self.limit}")
        basis = modular_basis(w, m, cfg)
        if not basis:
            return []
        images = {}
        row_keys = set()
        for j in range(k + 1):
            n = cfg.p**j
            for bc in basis:
                img = self._derive_monomial((0, bc[0], bc[1]), n)
                images[(n, bc)] = img
                row_keys.update((n, mono) for mono in img.terms)
        if not row_keys:
            sols = [
                [cfg.rat_one if i == jdx else cfg.rat_zero for i in range(len(basis))]
                for jdx in range(len(basis))
            ]
        else:
            rows = []
            for key in sorted(row_keys):
                n, mono = key
                rows.append(
                    [images[(n, bc)].terms.get(mono, cfg.rat_zero) for bc in basis]
                )
            _, sols = linear_solve(rows)
        out = []
        for vec in sols:
            f = QmPoly.zero(cfg)
            for coeff, (b, c) in zip(vec, basis):
                if not coeff.is_zero():
                    f.terms[(0, b, c)] = coeff
            out.append(f)
        return out

    # -- bookkeeping -------------------------------------------------------------

    def check_memo_isobaric(self):
        """Every memoized generator derivative is isobaric with the expected grading."""
        from .qmring import monomial_signature

        gens = {"E": (1, 0, 0), "g": (0, 1, 0), "h": (0, 0, 1)}
        for (gen, n), val in self._gen_memo.items():
            if val.is_zero():
                continue
            s = grading(val)
            base = monomial_signature(self.cfg, *gens[gen])
            q = self.cfg.q
            assert s.w == base.w + 2 * n
            assert q == 2 or s.m == (base.m + n) % (q - 1)
            assert s.l <= base.l + n
        return True
