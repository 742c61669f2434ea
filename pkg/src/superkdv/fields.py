"""Periodic-grid algebra-valued fields and their x-calculus.

A field stores one coordinate channel per algebra basis element as a row
of a (dim, N) array.  Differentiation is spectral (rfft per channel,
multiply by (ik)^order, Nyquist zeroed for odd orders), quadrature is the
periodic trapezoid dx*sum, and the 2/3-rule dealias filter zeroes every
mode above N//3.  The integrals the conserved quantities need are taken
over one period of a box chosen large enough that localized profiles
decay to machine-negligible values at the boundary.
"""

import warnings

import numpy as np

from .algebra import EvenValue, OddValue, get_algebra, value_norm
from .errors import (DescriptorMismatch, GradingError, NonFiniteFieldError,
                     SuperKdVError)


class PeriodicGrid:
    """Uniform periodic grid on [0, L) with N a power of two >= 16."""

    def __init__(self, L, N):
        L = float(L)
        N = int(N)
        if L <= 0:
            raise SuperKdVError("grid length must be positive")
        if N < 16 or N & (N - 1):
            raise SuperKdVError(f"grid size must be a power of two >= 16, got {N}")
        self.L = L
        self.N = N
        self.dx = L / N
        self.x = np.arange(N) * self.dx
        self.k = 2.0 * np.pi * np.fft.rfftfreq(N, d=self.dx)  # modes 0..N/2
        self.dealias_keep = N // 3  # highest surviving mode index

    def derivative_symbol(self, order):
        sym = (1j * self.k) ** order
        if order % 2:
            sym[-1] = 0.0  # Nyquist has no well-defined odd derivative
        return sym

    @property
    def dealias_mask(self):
        return (np.arange(self.N // 2 + 1) <= self.dealias_keep)

    @property
    def k_max_active(self):
        """Largest wavenumber the dealias filter lets survive."""
        return 2.0 * np.pi * self.dealias_keep / self.L

    def __eq__(self, other):
        return isinstance(other, PeriodicGrid) and self.L == other.L and self.N == other.N

    def __hash__(self):
        return hash((self.L, self.N))

    def __repr__(self):
        return f"PeriodicGrid(L={self.L}, N={self.N})"


def _require_compatible(f, g):
    if f.grid != g.grid:
        raise SuperKdVError(f"fields on different grids: {f.grid} vs {g.grid}")
    if f.descriptor != g.descriptor:
        raise DescriptorMismatch(f"fields over {f.descriptor} and {g.descriptor}")


class _Field:
    __slots__ = ("grid", "descriptor", "data")

    _part = None  # "even" or "odd"

    def __init__(self, grid, descriptor, data):
        dim = descriptor.even_dim if self._part == "even" else descriptor.odd_dim
        data = np.asarray(data, dtype=float)
        if data.shape != (dim, grid.N):
            raise SuperKdVError(
                f"{self._part} field over {descriptor} needs shape {(dim, grid.N)}, "
                f"got {data.shape}")
        self.grid = grid
        self.descriptor = descriptor
        self.data = data

    @classmethod
    def zeros(cls, grid, descriptor):
        dim = descriptor.even_dim if cls._part == "even" else descriptor.odd_dim
        return cls(grid, descriptor, np.zeros((dim, grid.N)))

    @property
    def labels(self):
        return (self.descriptor.even_labels if self._part == "even"
                else self.descriptor.odd_labels)

    def channels(self):
        return dict(zip(self.labels, self.data))

    def derivative(self, order=1):
        if not np.all(np.isfinite(self.data)):
            raise NonFiniteFieldError("non-finite samples in spectral derivative")
        spec = np.fft.rfft(self.data, axis=-1) * self.grid.derivative_symbol(order)
        return type(self)(self.grid, self.descriptor,
                          np.fft.irfft(spec, n=self.grid.N, axis=-1))

    def dealiased(self):
        spec = np.fft.rfft(self.data, axis=-1)
        spec[..., ~self.grid.dealias_mask] = 0.0
        return type(self)(self.grid, self.descriptor,
                          np.fft.irfft(spec, n=self.grid.N, axis=-1))

    def quadrature(self):
        coords = self.grid.dx * self.data.sum(axis=-1)
        wrap = EvenValue if self._part == "even" else OddValue
        return wrap(self.descriptor, coords)

    def rolled(self, points):
        """Shift by an integer number of grid points (periodic translation)."""
        return type(self)(self.grid, self.descriptor, np.roll(self.data, points, axis=-1))

    def norm(self):
        return value_norm(self.data)

    def __add__(self, other):
        if type(other) is not type(self):
            raise GradingError("cannot add even and odd fields")
        _require_compatible(self, other)
        return type(self)(self.grid, self.descriptor, self.data + other.data)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return type(self)(self.grid, self.descriptor, -self.data)

    def __repr__(self):
        return (f"{type(self).__name__}({self.grid}, {self.descriptor}, "
                f"max|.|={self.norm():.3g})")


class EvenField(_Field):
    _part = "even"

    def __mul__(self, other):
        alg = get_algebra(self.descriptor)
        if isinstance(other, EvenField):
            _require_compatible(self, other)
            return EvenField(self.grid, self.descriptor,
                             alg.even_mul(self.data, other.data))
        if isinstance(other, OddField):
            _require_compatible(self, other)
            return OddField(self.grid, self.descriptor,
                            alg.mixed_mul(self.data, other.data))
        return EvenField(self.grid, self.descriptor, self.data * float(other))

    __rmul__ = __mul__


class OddField(_Field):
    _part = "odd"

    def __mul__(self, other):
        if isinstance(other, EvenField):
            return other * self  # [Q, P] = 0
        if isinstance(other, OddField):
            raise GradingError("bare odd*odd field product; use commutator()")
        return OddField(self.grid, self.descriptor, self.data * float(other))

    def __rmul__(self, other):
        return self.__mul__(other)

    def commutator(self, other):
        _require_compatible(self, other)
        alg = get_algebra(self.descriptor)
        return EvenField(self.grid, self.descriptor,
                         alg.odd_commutator(self.data, other.data))

    def odd_mul(self, other):
        _require_compatible(self, other)
        alg = get_algebra(self.descriptor)
        return EvenField(self.grid, self.descriptor,
                         alg.odd_mul(self.data, other.data))


def spectral_derivative(f, order=1):
    return f.derivative(order)


def quadrature(f):
    return f.quadrature()


# ---------------------------------------------------------------------------
# initial conditions

class SolitonIC:
    """u(x) = -2 kappa^2 sech^2(kappa (x - x0)) on the unit channel, odd zero."""

    name = "soliton"

    def __init__(self, kappa=1.0, x0=None):
        self.kappa = float(kappa)
        self.x0 = None if x0 is None else float(x0)

    def params(self):
        return {"kappa": self.kappa, "x0": self.x0}


class GaussianIC:
    """Periodic bump A*exp(-(L/(2 pi w))^2 (1-cos(2 pi (x-c)/L))) on one channel.

    Matches exp(-(x-c)^2/(2 w^2)) to second order near the center and is
    exactly periodic.  channel is "even:LABEL" or "odd:LABEL" (or an index
    in place of the label).
    """

    name = "gaussian"

    def __init__(self, amplitude=1.0, width=1.0, center=None, channel="even:unit"):
        self.amplitude = float(amplitude)
        self.width = float(width)
        self.center = None if center is None else float(center)
        self.channel = channel

    def params(self):
        return {"amplitude": self.amplitude, "width": self.width,
                "center": self.center, "channel": self.channel}


class ZeroIC:
    """Both fields identically zero."""

    name = "zero"

    def params(self):
        return {}


class RandomBandlimitedIC:
    """Seeded trig polynomials (modes 0..max_mode) on every channel of both
    fields, each field rescaled so its largest coordinate sample equals
    amplitude.  Mode 0 is included so the mean of u starts at O(amplitude)."""

    name = "random_bandlimited"

    def __init__(self, max_mode=5, amplitude=0.5, seed=0):
        self.max_mode = int(max_mode)
        self.amplitude = float(amplitude)
        self.seed = int(seed)

    def params(self):
        return {"max_mode": self.max_mode, "amplitude": self.amplitude,
                "seed": self.seed}


def _resolve_channel(spec, descriptor):
    part, _, label = str(spec).partition(":")
    part = part.strip()
    if part not in ("even", "odd"):
        raise SuperKdVError(f"bad channel spec {spec!r}; expected even:LABEL or odd:LABEL")
    labels = descriptor.even_labels if part == "even" else descriptor.odd_labels
    label = label.strip() or "0"
    if label in labels:
        return part, labels.index(label)
    try:
        idx = int(label)
    except ValueError:
        raise SuperKdVError(f"unknown {part} channel {label!r}; have {labels}")
    if not 0 <= idx < len(labels):
        raise SuperKdVError(f"{part} channel index {idx} out of range for {descriptor}")
    return part, idx


def build_initial_condition(spec, grid, descriptor):
    """Realize an IC spec (object or "name(k=v,...)" string) as field pair."""
    if isinstance(spec, str):
        spec = parse_ic(spec)
    even = EvenField.zeros(grid, descriptor)
    odd = OddField.zeros(grid, descriptor)
    x = grid.x
    if isinstance(spec, SolitonIC):
        x0 = grid.L / 2 if spec.x0 is None else spec.x0
        kappa = spec.kappa
        arg = np.minimum(np.abs(kappa * (x - x0)), 350.0)
        even.data[0] = -2.0 * kappa ** 2 / np.cosh(arg) ** 2
        tail = 1.0 / np.cosh(min(abs(kappa) * grid.L / 2, 350.0)) ** 2
        if tail > 1e-10:
            warnings.warn(
                f"soliton tail sech^2(kappa L/2) = {tail:.2e} does not decay "
                "inside the periodic box; quadrature-based invariants will "
                "see the wrap-around")
    elif isinstance(spec, GaussianIC):
        c = grid.L / 2 if spec.center is None else spec.center
        part, idx = _resolve_channel(spec.channel, descriptor)
        sharp = (grid.L / (2.0 * np.pi * spec.width)) ** 2
        profile = spec.amplitude * np.exp(-sharp * (1.0 - np.cos(2.0 * np.pi * (x - c) / grid.L)))
        (even if part == "even" else odd).data[idx] = profile
    elif isinstance(spec, ZeroIC):
        pass
    elif isinstance(spec, RandomBandlimitedIC):
        rng = np.random.default_rng(spec.seed)
        modes = np.arange(spec.max_mode + 1)
        basis_cos = np.cos(2.0 * np.pi * np.outer(modes, x) / grid.L)
        basis_sin = np.sin(2.0 * np.pi * np.outer(modes, x) / grid.L)
        for field in (even, odd):
            for ch in range(field.data.shape[0]):
                a = rng.uniform(-1.0, 1.0, len(modes))
                b = rng.uniform(-1.0, 1.0, len(modes))
                field.data[ch] = a @ basis_cos + b @ basis_sin
            peak = field.norm()
            if peak > 0:
                field.data *= spec.amplitude / peak
    else:
        raise SuperKdVError(f"unknown IC spec {spec!r}")
    return even, odd


_IC_CLASSES = {cls.name: cls for cls in (SolitonIC, GaussianIC,
                                         RandomBandlimitedIC, ZeroIC)}


def parse_ic(text):
    """Parse "name(arg=value, ...)" into an IC spec (CLI surface).

    Examples: soliton(kappa=1,x0=20); random_bandlimited(max_mode=5,
    amplitude=0.5,seed=7); gaussian(amplitude=0.2,width=3,channel=odd:e1).
    """
    text = text.strip()
    name, sep, rest = text.partition("(")
    name = name.strip()
    if name not in _IC_CLASSES:
        raise SuperKdVError(f"unknown IC {name!r}; have {sorted(_IC_CLASSES)}")
    kwargs = {}
    if sep:
        if not rest.endswith(")"):
            raise SuperKdVError(f"unbalanced parentheses in IC spec {text!r}")
        body = rest[:-1].strip()
        if body:
            for item in body.split(","):
                key, eq, val = item.partition("=")
                if not eq:
                    raise SuperKdVError(f"IC arguments must be key=value, got {item!r}")
                key = key.strip()
                val = val.strip()
                if key == "channel":
                    kwargs[key] = val
                elif key == "seed" or key == "max_mode":
                    kwargs[key] = int(val)
                else:
                    kwargs[key] = float(val)
    try:
        return _IC_CLASSES[name](**kwargs)
    except TypeError as exc:
        raise SuperKdVError(f"bad arguments for IC {name}: {exc}")
