"""Graded algebra backends.

An element splits into an even part (commutative, with unit) and an odd
part.  The evolution systems only ever use three products:

    even_mul:        even * even -> even   (commutative, associative)
    mixed_mul:       even * odd  -> odd    (even and odd parts commute,
                                            so one product suffices)
    odd_commutator:  [odd, odd]  -> even   (antisymmetric)

Three backends realize the interface:

  scalar        plain reals, no odd part.
  grassmann:N   exterior algebra on N anticommuting generators t1..tN,
                graded by monomial degree parity.  The full odd*odd
                product is exposed as odd_mul.
  symplectic:n  Q = R^(2n) carrying the standard symplectic form
                omega(e_i, e_(n+i)) = 1.  The even part is the
                dual-number plane span{unit, nil} with nil*nil = 0 and
                nil*q = 0 for odd q, and [q, p] = omega(q, p)*nil.
                This nilpotent Heisenberg quotient is associative, so
                every product identity the transformations rely on
                (e.g. q1*[q2,q3] = [q1,q2]*q3 and [q,p]^2 = 0) holds
                exactly; a model with [q, p] proportional to the unit
                would violate them.

Basis order is fixed so snapshots are portable: Grassmann monomials by
ascending generator bitmask, symplectic odd basis e1..en, e(n+1)..e(2n).
All coordinate arrays carry the channel on the leading axis; trailing
axes broadcast, so the same tables serve single values (dim,) and grid
fields (dim, N).
"""

from functools import lru_cache

import numpy as np

from .errors import DescriptorMismatch, GradingError, SuperKdVError

KINDS = ("scalar", "grassmann", "symplectic")


def _popcount(m):
    return bin(m).count("1")


def _grassmann_label(mask):
    if mask == 0:
        return "unit"
    return "".join(f"t{b + 1}" for b in range(mask.bit_length()) if mask >> b & 1)


class AlgebraDescriptor:
    """Backend selector; serializes to "scalar", "grassmann:N" or "symplectic:n".

    grassmann:1 is constructible (so it can be handed to validate_algebra,
    which reports its nondegeneracy failure) but unusable for dynamics.
    """

    _MAX_GENERATORS = {"grassmann": 10, "symplectic": 64}

    def __init__(self, kind, generators=0):
        if kind not in KINDS:
            raise SuperKdVError(f"unknown algebra kind {kind!r}")
        if kind == "scalar":
            generators = 0
        elif generators < 1:
            raise SuperKdVError(f"{kind} backend needs a positive generator count")
        elif generators > self._MAX_GENERATORS[kind]:
            raise SuperKdVError(
                f"{kind}:{generators} exceeds the supported maximum "
                f"{kind}:{self._MAX_GENERATORS[kind]}")
        self.kind = kind
        self.generators = int(generators)

    @property
    def even_dim(self):
        if self.kind == "grassmann":
            return 2 ** (self.generators - 1)
        if self.kind == "symplectic":
            return 2  # unit and nil channels
        return 1

    @property
    def odd_dim(self):
        if self.kind == "grassmann":
            return 2 ** (self.generators - 1)
        if self.kind == "symplectic":
            return 2 * self.generators
        return 0

    @property
    def even_labels(self):
        if self.kind == "grassmann":
            n = self.generators
            return tuple(_grassmann_label(m) for m in range(2 ** n) if _popcount(m) % 2 == 0)
        if self.kind == "symplectic":
            return ("unit", "nil")
        return ("unit",)

    @property
    def odd_labels(self):
        if self.kind == "grassmann":
            n = self.generators
            return tuple(_grassmann_label(m) for m in range(2 ** n) if _popcount(m) % 2 == 1)
        if self.kind == "symplectic":
            return tuple(f"e{i + 1}" for i in range(2 * self.generators))
        return ()

    def __str__(self):
        if self.kind == "scalar":
            return "scalar"
        return f"{self.kind}:{self.generators}"

    def __repr__(self):
        return f"AlgebraDescriptor({str(self)!r})"

    def __eq__(self, other):
        return (isinstance(other, AlgebraDescriptor)
                and self.kind == other.kind and self.generators == other.generators)

    def __hash__(self):
        return hash((self.kind, self.generators))

    @staticmethod
    def from_string(text):
        text = text.strip()
        if text == "scalar":
            return AlgebraDescriptor("scalar")
        if ":" in text:
            kind, _, num = text.partition(":")
            kind = kind.strip()
            try:
                gen = int(num)
            except ValueError:
                raise SuperKdVError(f"bad generator count in descriptor {text!r}")
            return AlgebraDescriptor(kind, gen)
        raise SuperKdVError(f"bad algebra descriptor {text!r}; "
                            "expected scalar, grassmann:N or symplectic:n")


def _require_same(d1, d2):
    if d1 != d2:
        raise DescriptorMismatch(f"operands over {d1} and {d2}")


class _BilinearMap:
    """Sparse bilinear product out[k] = sum_(i,j) s*a[i]*b[j] on basis triples."""

    def __init__(self, triples, out_dim):
        self.out_dim = out_dim
        triples = sorted(triples, key=lambda t: t[2])
        self.nnz = len(triples)
        if self.nnz:
            self.i = np.array([t[0] for t in triples])
            self.j = np.array([t[1] for t in triples])
            k = np.array([t[2] for t in triples])
            self.s = np.array([float(t[3]) for t in triples])
            # reduceat segment starts: one segment per distinct output index
            self.k_unique, self.starts = np.unique(k, return_index=True)

    def __call__(self, a, b):
        shape = np.broadcast_shapes(a.shape[1:], b.shape[1:])
        out = np.zeros((self.out_dim,) + shape)
        if not self.nnz:
            return out
        contrib = a[self.i] * b[self.j]
        contrib *= self.s.reshape((-1,) + (1,) * len(shape))
        out[self.k_unique] = np.add.reduceat(contrib, self.starts, axis=0)
        return out


def _grassmann_products(n):
    """COO triples of the full exterior product, split by operand grading."""
    masks = list(range(2 ** n))
    evens = [m for m in masks if _popcount(m) % 2 == 0]
    odds = [m for m in masks if _popcount(m) % 2 == 1]
    e_index = {m: i for i, m in enumerate(evens)}
    o_index = {m: i for i, m in enumerate(odds)}
    ee, eo, oo = [], [], []
    for ma in masks:
        for mb in masks:
            if ma & mb:
                continue  # repeated generator: product vanishes
            k = ma | mb
            inv = sum(_popcount(ma >> (b + 1)) for b in range(n) if mb >> b & 1)
            s = -1 if inv % 2 else 1
            pa, pb = _popcount(ma) % 2, _popcount(mb) % 2
            if pa == 0 and pb == 0:
                ee.append((e_index[ma], e_index[mb], e_index[k], s))
            elif pa == 0 and pb == 1:
                eo.append((e_index[ma], o_index[mb], o_index[k], s))
            elif pa == 1 and pb == 1:
                oo.append((o_index[ma], o_index[mb], e_index[k], s))
            # odd*even is recovered from eo since [Q, P] = 0
    return ee, eo, oo


class Algebra:
    """Product tables for one descriptor; all methods are pure.

    Arguments are plain coordinate arrays (leading axis = channel).  The
    EvenValue/OddValue wrappers below add descriptor checking for scalar
    level work; field-level code calls these methods directly.
    """

    def __init__(self, descriptor):
        self.descriptor = descriptor
        E, O = descriptor.even_dim, descriptor.odd_dim
        if descriptor.kind == "scalar":
            ee, eo, oo = [(0, 0, 0, 1)], [], None
            half = []
        elif descriptor.kind == "symplectic":
            n = descriptor.generators
            ee = [(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1)]  # nil*nil = 0 omitted
            eo = [(0, j, j, 1) for j in range(O)]  # nil annihilates Q
            half = [(i, n + i, 1, 1.0) for i in range(n)]
            oo = None
        else:
            ee, eo, oo = _grassmann_products(descriptor.generators)
            half = oo  # [a,b] = ab - ba evaluated literally below
        self._ee = _BilinearMap(ee, E)
        self._eo = _BilinearMap(eo, O)
        # one orientation only; the commutator is half(a,b) - half(b,a), which
        # makes antisymmetry bitwise exact instead of roundoff-exact
        self._half = _BilinearMap(half, E)
        self._oo = _BilinearMap(oo, E) if oo is not None else None

    def unit(self):
        u = np.zeros(self.descriptor.even_dim)
        u[0] = 1.0
        return u

    def even_mul(self, a, b):
        return self._ee(a, b)

    def mixed_mul(self, a, q):
        return self._eo(a, q)

    def odd_commutator(self, q1, q2):
        return self._half(q1, q2) - self._half(q2, q1)

    def odd_mul(self, q1, q2):
        if self._oo is None:
            raise GradingError(
                f"the {self.descriptor.kind} backend has no odd*odd product; "
                "only the commutator is part of the interface")
        return self._oo(q1, q2)


@lru_cache(maxsize=None)
def _cached_algebra(kind, generators):
    return Algebra(AlgebraDescriptor(kind, generators))


def get_algebra(descriptor):
    return _cached_algebra(descriptor.kind, descriptor.generators)


def value_norm(coords):
    """Max-absolute-coordinate norm used for all drift and residual reports."""
    coords = np.asarray(coords)
    return float(np.max(np.abs(coords))) if coords.size else 0.0


class _Value:
    __slots__ = ("descriptor", "coords")

    def __init__(self, descriptor, coords, _dim):
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (_dim,):
            raise SuperKdVError(f"expected {_dim} coordinates, got shape {coords.shape}")
        self.descriptor = descriptor
        self.coords = coords

    def norm(self):
        return value_norm(self.coords)

    def __eq__(self, other):
        return (type(self) is type(other) and self.descriptor == other.descriptor
                and np.array_equal(self.coords, other.coords))

    def __add__(self, other):
        _require_same(self.descriptor, other.descriptor)
        if type(other) is not type(self):
            raise GradingError("cannot add even and odd values")
        return type(self)(self.descriptor, self.coords + other.coords)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return type(self)(self.descriptor, -self.coords)

    def __repr__(self):
        return f"{type(self).__name__}({self.descriptor}, {self.coords.tolist()})"


class EvenValue(_Value):
    """Element of the even part P in the fixed basis (channel 0 is the unit)."""

    def __init__(self, descriptor, coords):
        super().__init__(descriptor, coords, descriptor.even_dim)

    @staticmethod
    def unit(descriptor):
        return EvenValue(descriptor, get_algebra(descriptor).unit())

    @staticmethod
    def zero(descriptor):
        return EvenValue(descriptor, np.zeros(descriptor.even_dim))

    def __mul__(self, other):
        if isinstance(other, EvenValue):
            _require_same(self.descriptor, other.descriptor)
            return EvenValue(self.descriptor,
                             get_algebra(self.descriptor).even_mul(self.coords, other.coords))
        if isinstance(other, OddValue):
            _require_same(self.descriptor, other.descriptor)
            return OddValue(self.descriptor,
                            get_algebra(self.descriptor).mixed_mul(self.coords, other.coords))
        return EvenValue(self.descriptor, self.coords * float(other))

    __rmul__ = __mul__


class OddValue(_Value):
    """Element of the odd part Q in the fixed basis."""

    def __init__(self, descriptor, coords):
        super().__init__(descriptor, coords, descriptor.odd_dim)

    @staticmethod
    def zero(descriptor):
        return OddValue(descriptor, np.zeros(descriptor.odd_dim))

    def __mul__(self, other):
        if isinstance(other, EvenValue):
            return other * self  # [Q, P] = 0
        if isinstance(other, OddValue):
            raise GradingError("bare odd*odd product is not part of the interface; "
                               "use commutator() (or odd_mul on the grassmann backend)")
        return OddValue(self.descriptor, self.coords * float(other))

    def __rmul__(self, other):
        return self.__mul__(other)

    def commutator(self, other):
        _require_same(self.descriptor, other.descriptor)
        return EvenValue(self.descriptor,
                         get_algebra(self.descriptor).odd_commutator(self.coords, other.coords))

    def odd_mul(self, other):
        _require_same(self.descriptor, other.descriptor)
        return EvenValue(self.descriptor,
                         get_algebra(self.descriptor).odd_mul(self.coords, other.coords))


class ValidationReport:
    """Axiom check results for one descriptor."""

    def __init__(self, descriptor):
        self.descriptor = descriptor
        self.checks = []

    def record(self, name, passed, detail=""):
        self.checks.append({"name": name, "passed": bool(passed), "detail": detail})

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if not c["passed"]]

    def as_dict(self):
        return {
            "descriptor": str(self.descriptor),
            "even_dim": self.descriptor.even_dim,
            "odd_dim": self.descriptor.odd_dim,
            "passed": self.passed,
            "checks": self.checks,
        }

    def __str__(self):
        lines = [f"algebra {self.descriptor}: {'pass' if self.passed else 'FAIL'}"]
        for c in self.checks:
            mark = "ok  " if c["passed"] else "FAIL"
            detail = f"  [{c['detail']}]" if c["detail"] else ""
            lines.append(f"  {mark} {c['name']}{detail}")
        return "\n".join(lines)


def _generator_coords(descriptor):
    """Odd coordinates of the generating set of Q (degree-1 monomials for
    grassmann, the full basis for symplectic).  Nondegeneracy is a statement
    about these generators: for grassmann N >= 3 the top odd monomial
    commutes with everything, yet the algebra is perfectly usable, so the
    check deliberately does not range over all odd basis elements."""
    O = descriptor.odd_dim
    gens = []
    if descriptor.kind == "grassmann":
        odd_masks = [m for m in range(2 ** descriptor.generators) if _popcount(m) % 2 == 1]
        for i, m in enumerate(odd_masks):
            if _popcount(m) == 1:
                g = np.zeros(O)
                g[i] = 1.0
                gens.append((_grassmann_label(m), g))
    elif descriptor.kind == "symplectic":
        for i in range(O):
            g = np.zeros(O)
            g[i] = 1.0
            gens.append((f"e{i + 1}", g))
    return gens


def validate_algebra(descriptor, seed=0, trials=20):
    """Check the algebra axioms on random samples and exhaustive basis pairs.

    Returns a ValidationReport listing any violated axiom.  Nondegeneracy
    ([q, qhat] != 0 for some qhat) is checked on the generating set of Q;
    grassmann:1 fails it ([t1, t1] = 0 is the only candidate).
    """
    alg = get_algebra(descriptor)
    report = ValidationReport(descriptor)
    rng = np.random.default_rng(seed)
    E, O = descriptor.even_dim, descriptor.odd_dim

    def rand_even():
        return rng.uniform(-1.0, 1.0, E)

    def rand_odd():
        return rng.uniform(-1.0, 1.0, O)

    worst_comm = worst_assoc = worst_mixed = 0.0
    for _ in range(trials):
        a, b, c = rand_even(), rand_even(), rand_even()
        ab = alg.even_mul(a, b)
        worst_comm = max(worst_comm, value_norm(ab - alg.even_mul(b, a)))
        worst_assoc = max(worst_assoc,
                          value_norm(alg.even_mul(ab, c) - alg.even_mul(a, alg.even_mul(b, c))))
        if O:
            q = rand_odd()
            worst_mixed = max(worst_mixed,
                              value_norm(alg.mixed_mul(ab, q)
                                         - alg.mixed_mul(a, alg.mixed_mul(b, q))))
    report.record("even_mul commutative", worst_comm <= 1e-12, f"max dev {worst_comm:.2e}")
    report.record("even_mul associative", worst_assoc <= 1e-12, f"max dev {worst_assoc:.2e}")

    a = rand_even()
    dev = value_norm(alg.even_mul(alg.unit(), a) - a)
    report.record("unit neutral", dev == 0.0, f"max dev {dev:.2e}")

    if O:
        report.record("mixed_mul associative over P", worst_mixed <= 1e-12,
                      f"max dev {worst_mixed:.2e}")
        worst = 0.0
        for _ in range(trials):
            q1, q2 = rand_odd(), rand_odd()
            worst = max(worst, value_norm(alg.odd_commutator(q1, q2)
                                          + alg.odd_commutator(q2, q1)))
        q = rand_odd()
        worst = max(worst, value_norm(alg.odd_commutator(q, q)))
        report.record("odd_commutator antisymmetric", worst == 0.0, f"max dev {worst:.2e}")

        if descriptor.kind == "grassmann":
            worst = 0.0
            for i in range(O):
                for j in range(O):
                    q1, q2 = np.zeros(O), np.zeros(O)
                    q1[i] = q2[j] = 1.0
                    worst = max(worst, value_norm(alg.odd_commutator(q1, q2)
                                                  - 2.0 * alg.odd_mul(q1, q2)))
            report.record("commutator is twice the odd product", worst == 0.0,
                          f"max dev {worst:.2e}")

        gens = _generator_coords(descriptor)
        degenerate = []
        for label, g in gens:
            partners = (np.eye(O)[i] for i in range(O))
            if not any(value_norm(alg.odd_commutator(g, p)) > 0.0 for p in partners):
                degenerate.append(label)
        report.record("nondegenerate on generators", not degenerate,
                      "all generators pair" if not degenerate
                      else "no partner for " + ", ".join(degenerate))
    return report
