"""Differential polynomials in u, xi and the bracket [xi^(a), xi^(b)].

A monomial is a product of u-derivatives u^(k), bracket factors C(a, b)
standing for [xi^(a), xi^(b)] with a > b, and at most one bare odd factor
xi^(c); its coefficient is a polynomial in the coupling L with exact
rational coefficients.  Bare products of two odd symbols are not
representable: the graded interface only exposes odd pairs through the
bracket, and the engine enforces the same restriction.

The normal form is unique: brackets are oriented (C(a, a) vanishes,
C(a, b) with a < b flips sign), factor lists are sorted, equal monomials
merge, zero coefficients drop.  Total x-differentiation is the Leibniz
rule with D C(a, b) = C(a+1, b) + C(a, b+1).

Equality modulo total derivatives is decided by randomized instantiation:
both sides are evaluated on random band-limited fields over two different
algebra backends with random couplings, and their quadratures compared.
That test is sound for refutation; for confirmation it is as reliable as
the trial count and the backends' ability to distinguish monomials (see
equal_mod_total_derivative for the one known blind sector).
"""

from fractions import Fraction

import numpy as np

from .algebra import AlgebraDescriptor
from .errors import ExpressionSyntaxError, GradingError, SuperKdVError
from .fields import EvenField, OddField, PeriodicGrid, build_initial_condition, quadrature

# ---------------------------------------------------------------------------
# coefficient arithmetic: sparse polynomials in L over Fraction

def _lp(c=1, power=0):
    c = Fraction(c)
    return {} if c == 0 else {power: c}


def _lp_add(a, b):
    out = dict(a)
    for p, c in b.items():
        s = out.get(p, Fraction(0)) + c
        if s:
            out[p] = s
        else:
            out.pop(p, None)
    return out


def _lp_mul(a, b):
    out = {}
    for pa, ca in a.items():
        for pb, cb in b.items():
            p = pa + pb
            s = out.get(p, Fraction(0)) + ca * cb
            if s:
                out[p] = s
            else:
                out.pop(p, None)
    return out


def _lp_scale(a, c):
    c = Fraction(c)
    return {p: v * c for p, v in a.items()} if c else {}


def _lp_eval_float(a, lam):
    return sum(float(c) * lam ** p for p, c in a.items())


def _orient_comm(a, b):
    """Canonical bracket orientation: (pair, sign) or None when it vanishes."""
    if a == b:
        return None
    return ((a, b), 1) if a > b else ((b, a), -1)


class DiffPolynomial:
    """Normal-form differential polynomial.

    terms maps (even_factors, comm_factors, odd_factor) to a coefficient
    polynomial in L; even_factors is a sorted tuple of derivative orders
    of u, comm_factors a sorted tuple of oriented (a, b) bracket pairs,
    odd_factor a derivative order of xi or None.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for key, lp in terms.items():
                if lp:
                    self.terms[key] = dict(lp)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero():
        return DiffPolynomial()

    @staticmethod
    def constant(c, lam_power=0):
        return DiffPolynomial({((), (), None): _lp(c, lam_power)})

    @staticmethod
    def u(order=0):
        return DiffPolynomial({((order,), (), None): _lp(1)})

    @staticmethod
    def xi(order=0):
        return DiffPolynomial({((), (), order): _lp(1)})

    @staticmethod
    def bracket(a, b):
        oriented = _orient_comm(a, b)
        if oriented is None:
            return DiffPolynomial()
        pair, sign = oriented
        return DiffPolynomial({((), (pair,), None): _lp(sign)})

    # -- structure ---------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def gradings(self):
        return {key[2] is not None for key in self.terms}

    def is_even(self):
        return self.gradings() <= {False}

    def is_odd(self):
        return self.gradings() <= {True}

    def __eq__(self, other):
        return isinstance(other, DiffPolynomial) and self.terms == other.terms

    def __hash__(self):
        raise TypeError("DiffPolynomial is mutable-by-construction; not hashable")

    # -- ring operations ----------------------------------------------------

    def _merged(self, key, lp):
        cur = self.terms.get(key)
        merged = _lp_add(cur, lp) if cur else dict(lp)
        if merged:
            self.terms[key] = merged
        else:
            self.terms.pop(key, None)

    def __add__(self, other):
        out = DiffPolynomial(self.terms)
        for key, lp in other.terms.items():
            out._merged(key, lp)
        return out

    def __neg__(self):
        return DiffPolynomial({k: _lp_scale(lp, -1) for k, lp in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c, lam_power=0):
        c = Fraction(c)
        if c == 0:
            return DiffPolynomial()
        return DiffPolynomial({
            (k[0], k[1], k[2]): {p + lam_power: v * c for p, v in lp.items()}
            for k, lp in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, DiffPolynomial):
            return self.scaled(other)
        out = DiffPolynomial()
        for (e1, c1, o1), lp1 in self.terms.items():
            for (e2, c2, o2), lp2 in other.terms.items():
                if o1 is not None and o2 is not None:
                    raise GradingError(
                        "product of two odd terms; only the bracket "
                        "[xi^(a), xi^(b)] represents odd pairs")
                key = (tuple(sorted(e1 + e2)), tuple(sorted(c1 + c2)),
                       o1 if o1 is not None else o2)
                out._merged(key, _lp_mul(lp1, lp2))
        return out

    __rmul__ = __mul__

    # -- calculus ------------------------------------------------------------

    def differentiate_total(self):
        """Total x-derivative by the Leibniz rule."""
        out = DiffPolynomial()
        for (even, comms, odd), lp in self.terms.items():
            for i, k in enumerate(even):
                bumped = tuple(sorted(even[:i] + (k + 1,) + even[i + 1:]))
                out._merged((bumped, comms, odd), lp)
            for i, (a, b) in enumerate(comms):
                rest = comms[:i] + comms[i + 1:]
                for pair in ((a + 1, b), (a, b + 1)):
                    oriented = _orient_comm(*pair)
                    if oriented is None:
                        continue
                    newpair, sign = oriented
                    out._merged((even, tuple(sorted(rest + (newpair,))), odd),
                                _lp_scale(lp, sign))
            if odd is not None:
                out._merged((even, comms, odd + 1), lp)
        return out

    def differentiated(self, times=1):
        p = self
        for _ in range(times):
            p = p.differentiate_total()
        return p

    def __repr__(self):
        return f"DiffPolynomial({to_text(self)})"


def commutator(p, q):
    """Bracket of two odd polynomials, expanded by bilinearity over the
    even coefficients: [E xi^(a), F xi^(b)] = E F [xi^(a), xi^(b)]."""
    if not (p.is_odd() and q.is_odd()):
        raise GradingError("commutator needs two odd-graded polynomials")
    out = DiffPolynomial()
    for (e1, c1, o1), lp1 in p.terms.items():
        for (e2, c2, o2), lp2 in q.terms.items():
            oriented = _orient_comm(o1, o2)
            if oriented is None:
                continue
            pair, sign = oriented
            key = (tuple(sorted(e1 + e2)), tuple(sorted(c1 + c2 + (pair,))), None)
            out._merged(key, _lp_scale(_lp_mul(lp1, lp2), sign))
    return out


# ---------------------------------------------------------------------------
# parsing

_TOKEN_CHARS = {"+", "-", "*", "/", "^", "(", ")", "[", "]", ","}


def _tokenize(text):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _TOKEN_CHARS:
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch == "'":
            j = i
            while j < n and text[j] == "'":
                j += 1
            tokens.append(("PRIME", j - i, i))
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("INT", int(text[i:j]), i))
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < n and text[j].isalnum():
                j += 1
            tokens.append(("NAME", text[i:j], i))
            i = j
            continue
        raise ExpressionSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(("END", None, n))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise ExpressionSyntaxError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        return tok

    def parse(self):
        poly = self.expression()
        tok = self.peek()
        if tok[0] != "END":
            raise ExpressionSyntaxError(f"unexpected trailing {tok[1]!r}", tok[2])
        return poly

    def expression(self):
        sign = 1
        if self.peek()[0] in ("+", "-"):
            sign = -1 if self.next()[0] == "-" else 1
        poly = self.term().scaled(sign)
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            nxt = self.term()
            poly = poly + (nxt if op == "+" else -nxt)
        return poly

    def term(self):
        poly = self.factor()
        while self.peek()[0] == "*":
            star_pos = self.next()[2]
            try:
                poly = poly * self.factor()
            except GradingError:
                raise ExpressionSyntaxError(
                    "product of two odd expressions; use [A,B]", star_pos)
        return poly

    def factor(self):
        poly = self.atom()
        while self.peek()[0] == "^":
            caret_pos = self.peek()[2]
            self.next()
            tok = self.next()
            if tok[0] != "INT":
                raise ExpressionSyntaxError("exponent must be an integer", tok[2])
            power = tok[1]
            if power < 0:
                raise ExpressionSyntaxError("exponent must be nonnegative", tok[2])
            result = DiffPolynomial.constant(1)
            for _ in range(power):
                try:
                    result = result * poly
                except GradingError:
                    raise ExpressionSyntaxError(
                        "power of an odd expression is not representable",
                        caret_pos)
            poly = result
        return poly

    def _derivative_suffix(self):
        """Postfix primes or ^(k) immediately after a symbol name."""
        order = 0
        while True:
            tok = self.peek()
            if tok[0] == "PRIME":
                order += self.next()[1]
            elif (tok[0] == "^" and self.tokens[self.pos + 1][0] == "("
                  and self.tokens[self.pos + 2][0] == "INT"
                  and self.tokens[self.pos + 3][0] == ")"):
                self.pos += 2
                order += self.next()[1]
                self.next()
            else:
                return order

    def _xi_entry(self):
        tok = self.next()
        if tok[0] != "NAME" or tok[1] != "xi":
            raise ExpressionSyntaxError(
                "commutator entries must be xi derivatives", tok[2])
        return self._derivative_suffix()

    def atom(self):
        tok = self.next()
        kind, value, pos = tok
        if kind == "INT":
            num = Fraction(value)
            if self.peek()[0] == "/":
                self.next()
                den = self.expect("INT")
                if den[1] == 0:
                    raise ExpressionSyntaxError("division by zero", den[2])
                num /= den[1]
            return DiffPolynomial.constant(num)
        if kind == "NAME":
            if value == "u":
                return DiffPolynomial.u(self._derivative_suffix())
            if value == "xi":
                return DiffPolynomial.xi(self._derivative_suffix())
            if value == "L":
                return DiffPolynomial.constant(1, lam_power=1)
            if value == "D":
                self.expect("(")
                inner = self.expression()
                self.expect(")")
                return inner.differentiate_total()
            raise ExpressionSyntaxError(f"unknown symbol {value!r}", pos)
        if kind == "(":
            inner = self.expression()
            self.expect(")")
            return inner
        if kind == "[":
            a = self._xi_entry()
            self.expect(",")
            b = self._xi_entry()
            self.expect("]")
            return DiffPolynomial.bracket(a, b)
        if kind == "-":
            return -self.atom()
        raise ExpressionSyntaxError(f"unexpected {value!r}", pos)


def parse(text):
    """Parse expression text into a normal-form DiffPolynomial."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printing

def _fmt_fraction(c):
    return str(c) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_factor(base, power):
    return base if power == 1 else f"{base}^{power}"


def _fmt_symbol(name, order):
    return name if order == 0 else f"{name}^({order})"


def _term_pieces(key, power_of_lam, coeff):
    even, comms, odd = key
    pieces = []
    if power_of_lam:
        pieces.append(_fmt_factor("L", power_of_lam))
    for k in sorted(set(even)):
        pieces.append(_fmt_factor(_fmt_symbol("u", k), even.count(k)))
    seen = []
    for pair in comms:
        if pair in seen:
            continue
        seen.append(pair)
        base = f"[{_fmt_symbol('xi', pair[0])},{_fmt_symbol('xi', pair[1])}]"
        pieces.append(_fmt_factor(base, comms.count(pair)))
    if odd is not None:
        pieces.append(_fmt_symbol("xi", odd))
    if not pieces or abs(coeff) != 1:
        pieces.insert(0, _fmt_fraction(abs(coeff)))
    return "*".join(pieces)


def to_text(poly):
    """Canonical text form; parse(to_text(p)) == p."""
    if poly.is_zero():
        return "0"
    entries = []
    for key in sorted(poly.terms,
                      key=lambda k: (k[2] is not None, k[0], k[1],
                                     -1 if k[2] is None else k[2])):
        for power in sorted(poly.terms[key]):
            entries.append((key, power, poly.terms[key][power]))
    parts = []
    for i, (key, power, coeff) in enumerate(entries):
        text = _term_pieces(key, power, coeff)
        if i == 0:
            parts.append(text if coeff > 0 else f"-{text}")
        else:
            parts.append(f"{'+' if coeff > 0 else '-'} {text}")
    return " ".join(parts)


# ---------------------------------------------------------------------------
# numeric instantiation

def instantiate(poly, u, xi, lam):
    """Evaluate a polynomial on concrete fields.

    Even-graded input returns an EvenField, odd-graded an OddField; the
    zero polynomial counts as even.  Derivatives are cached per order.
    """
    gradings = poly.gradings()
    if gradings == {False, True}:
        raise GradingError("cannot instantiate a mixed-grading polynomial")
    odd_graded = gradings == {True}
    grid, desc = u.grid, u.descriptor
    u_cache, xi_cache = {0: u}, {0: xi}

    def ud(k):
        if k not in u_cache:
            u_cache[k] = u.derivative(k)
        return u_cache[k]

    def xid(c):
        if c not in xi_cache:
            xi_cache[c] = xi.derivative(c)
        return xi_cache[c]

    total = OddField.zeros(grid, desc) if odd_graded else EvenField.zeros(grid, desc)
    for (even, comms, odd), lp in poly.terms.items():
        coeff = _lp_eval_float(lp, lam)
        acc = EvenField.zeros(grid, desc)
        acc.data[0] = coeff
        for k in even:
            acc = acc * ud(k)
        for a, b in comms:
            acc = acc * xid(a).commutator(xid(b))
        if odd is not None:
            total = total + acc * xid(odd)
        else:
            total = total + acc
    return total


# ---------------------------------------------------------------------------
# equality modulo total derivatives

MC_BACKENDS = ("grassmann:3", "symplectic:2")
MC_GRID = (2 * np.pi, 64)
MC_MAX_MODE = 3


class EquivalenceVerdict:
    """Outcome of the randomized density comparison."""

    def __init__(self, equal, trials, tol, witness=None):
        self.equal = equal
        self.trials = trials
        self.tol = tol
        self.witness = witness

    def __bool__(self):
        return self.equal

    def __repr__(self):
        if self.equal:
            return f"equal ({self.trials} trials, tol {self.tol:g})"
        return f"different (witness {self.witness})"


def _trial_instantiation(diff, backend, trial_seed, lam):
    grid = PeriodicGrid(*MC_GRID)
    desc = AlgebraDescriptor.from_string(backend)
    u, xi = build_initial_condition(
        f"random_bandlimited(max_mode={MC_MAX_MODE},amplitude=0.6,seed={trial_seed})",
        grid, desc)
    residual = quadrature(instantiate(diff, u, xi, lam)).norm()
    scale = 1.0
    for key, lp in diff.terms.items():
        single = DiffPolynomial({key: lp})
        scale += quadrature(instantiate(single, u, xi, lam)).norm()
    return residual, scale


def equal_mod_total_derivative(p, q, trials=32, tol=1e-8, seed=0, backends=None):
    """Randomized decision of p == q modulo total x-derivatives.

    Instantiates p - q on random band-limited fields over two backends and
    random couplings in [-2, 2], and accepts when every quadrature is at
    most tol times a cancellation-aware scale (1 plus the per-monomial
    integral magnitudes).  Both default backends annihilate products of
    two brackets on four independent arguments, so densities differing
    only in that sector need a wider backend (pass e.g. grassmann:4).
    """
    if not (p.is_even() and q.is_even()):
        raise GradingError("densities must be even-graded")
    diff = p - q
    if diff.is_zero():
        return EquivalenceVerdict(True, 0, tol)
    if backends is None:
        backends = MC_BACKENDS
    root = np.random.default_rng(seed)
    trial_seeds = root.integers(0, 2 ** 62, size=trials)
    for i in range(trials):
        rng = np.random.default_rng(trial_seeds[i])
        backend = backends[int(rng.integers(len(backends)))]
        lam = float(rng.uniform(-2.0, 2.0))
        residual, scale = _trial_instantiation(diff, backend, int(trial_seeds[i]), lam)
        if residual > tol * scale:
            witness = {"backend": backend, "lambda": lam,
                       "seed": int(trial_seeds[i]),
                       "residual": residual, "scale": scale}
            return EquivalenceVerdict(False, i + 1, tol, witness)
    return EquivalenceVerdict(True, trials, tol)


# ---------------------------------------------------------------------------
# deformation expansion and the conserved-quantity table

def gardner_coefficients(order):
    """Symbolic inverse-deformation coefficients (z_n, sigma_n), n <= order."""
    if order > 10:
        raise SuperKdVError("supported up to order 10")
    zs = [DiffPolynomial.u()]
    ss = [DiffPolynomial.xi()]
    for n in range(1, order + 1):
        zn = -zs[n - 1].differentiate_total()
        sn = -ss[n - 1].differentiate_total()
        for a in range(n - 1):
            b = n - 2 - a
            zn = zn - zs[a] * zs[b]
            zn = zn - commutator(ss[a].differentiate_total(), ss[b]).scaled(1, 1)
            sn = sn - zs[a] * ss[b]
        zs.append(zn)
        ss.append(sn)
    return list(zip(zs, ss))


def conserved_density_poly(n):
    """The H_n densities as polynomials, n in {0, 2, 4, 6}."""
    u, D = DiffPolynomial.u, DiffPolynomial
    c10, c21, c30, c32 = (D.bracket(1, 0), D.bracket(2, 1),
                          D.bracket(3, 0), D.bracket(3, 2))
    if n == 0:
        return u(0)
    if n == 2:
        return u(0) * u(0) + c10.scaled(1, 1)
    if n == 4:
        return (u(0) * u(0) * u(0)).scaled(2) + u(1) * u(1) \
            + (u(0) * c10).scaled(4, 1) + c21.scaled(1, 1)
    if n == 6:
        u2 = u(0) * u(0)
        return ((u2 * u2).scaled(5) + (u(0) * (u(1) * u(1))).scaled(10)
                + u(2) * u(2)
                + (u2 * c10).scaled(15, 1)
                + (u(0) * c21).scaled(-2, 1)
                + (u(0) * c30).scaled(-8, 1)
                + (c10 * c10).scaled(3, 2)
                + c32.scaled(1, 1))
    raise SuperKdVError(f"no conserved density tabulated for order {n}")


class CoefficientTable:
    """Result of matching deformation integrals against the H_n family."""

    def __init__(self, entries, odd_orders_vanish):
        self.entries = entries
        self.odd_orders_vanish = odd_orders_vanish

    @property
    def all_ok(self):
        return self.odd_orders_vanish and all(e["verified"] for e in self.entries)

    def as_dict(self):
        return {"entries": [dict(e, c=str(e["c"])) for e in self.entries],
                "odd_orders_vanish": self.odd_orders_vanish}

    def __str__(self):
        lines = ["order   constant   verified"]
        for e in self.entries:
            lines.append(f"{e['n']:>5}   {str(e['c']):>8}   "
                         f"{'yes' if e['verified'] else 'NO'}")
        lines.append("odd-order integrals vanish: "
                     f"{'yes' if self.odd_orders_vanish else 'NO'}")
        return "\n".join(lines)


def reproduce_conserved_quantities(max_order=6, trials=32, tol=1e-8, seed=0):
    """Fit constants c with int z_n == c * H_n mod total derivatives.

    For each even n <= max_order a least-squares fit over random
    instantiations determines c, which is snapped to a small rational and
    re-verified with equal_mod_total_derivative; all odd orders must
    vanish.  Returns a CoefficientTable.
    """
    if max_order % 2 or max_order > 8:
        raise SuperKdVError("max_order must be even and at most 8")
    coeffs = gardner_coefficients(max_order)
    zero = DiffPolynomial.zero()
    odd_ok = True
    for n in range(1, max_order + 1, 2):
        verdict = equal_mod_total_derivative(coeffs[n][0], zero,
                                             trials=trials, tol=tol, seed=seed + n)
        odd_ok = odd_ok and verdict.equal
    entries = []
    root = np.random.default_rng(seed)
    trial_seeds = root.integers(0, 2 ** 62, size=trials)
    for n in range(0, max_order + 1, 2):
        zn = coeffs[n][0]
        hn = conserved_density_poly(n)
        num = den = 0.0
        for i in range(trials):
            rng = np.random.default_rng(trial_seeds[i])
            backend = MC_BACKENDS[int(rng.integers(len(MC_BACKENDS)))]
            lam = float(rng.uniform(-2.0, 2.0))
            grid = PeriodicGrid(*MC_GRID)
            desc = AlgebraDescriptor.from_string(backend)
            u, xi = build_initial_condition(
                f"random_bandlimited(max_mode={MC_MAX_MODE},amplitude=0.6,"
                f"seed={int(trial_seeds[i])})", grid, desc)
            a = quadrature(instantiate(zn, u, xi, lam)).coords
            b = quadrature(instantiate(hn, u, xi, lam)).coords
            num += float(a @ b)
            den += float(b @ b)
        if den == 0.0:
            entries.append({"n": n, "c": Fraction(0), "verified": False})
            continue
        c = Fraction(num / den).limit_denominator(64)
        verdict = equal_mod_total_derivative(zn, hn.scaled(c),
                                             trials=trials, tol=tol, seed=seed + n)
        entries.append({"n": n, "c": c, "verified": verdict.equal})
    return CoefficientTable(entries, odd_ok)


# ---------------------------------------------------------------------------
# formal time derivative along the extended flow

def _rhs_polys():
    u, xi = DiffPolynomial.u, DiffPolynomial.xi
    u_t = (-u(3) + (u(0) * u(1)).scaled(6)
           + DiffPolynomial.bracket(2, 0).scaled(3, 1))
    xi_t = -xi(3) + (u(1) * xi(0)).scaled(3) + (u(0) * xi(1)).scaled(3)
    return u_t, xi_t


def evolutionary_derivative(poly):
    """Formal d/dt of a polynomial along the extended flow.

    Substitutes the right-hand sides for u_t and xi_t through the Leibniz
    rule; useful for checking conservation symbolically, e.g.
    equal_mod_total_derivative(evolutionary_derivative(H), 0).
    """
    u_t, xi_t = _rhs_polys()
    ut_cache, xit_cache = {0: u_t}, {0: xi_t}

    def ut(k):
        if k not in ut_cache:
            ut_cache[k] = ut(k - 1).differentiate_total()
        return ut_cache[k]

    def xit(c):
        if c not in xit_cache:
            xit_cache[c] = xit(c - 1).differentiate_total()
        return xit_cache[c]

    out = DiffPolynomial()
    for (even, comms, odd), lp in poly.terms.items():
        base = DiffPolynomial({((), (), None): lp})
        for i, k in enumerate(even):
            rest_key = (even[:i] + even[i + 1:], comms, odd)
            out = out + _rebuild(rest_key, base) * ut(k)
        for i, (a, b) in enumerate(comms):
            rest_key = (even, comms[:i] + comms[i + 1:], odd)
            slot = commutator(xit(a), DiffPolynomial.xi(b)) \
                + commutator(DiffPolynomial.xi(a), xit(b))
            out = out + _rebuild(rest_key, base) * slot
        if odd is not None:
            rest_key = (even, comms, None)
            out = out + _rebuild(rest_key, base) * xit(odd)
    return out


def _rebuild(key, coeff_poly):
    even, comms, odd = key
    mono = DiffPolynomial({(tuple(sorted(even)), tuple(sorted(comms)), odd): _lp(1)})
    return coeff_poly * mono
