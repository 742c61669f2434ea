"""Conserved quantities of the flows and drift reports over trajectories.

For the extended system the first four conserved integrals are

  H0 = int u
  H2 = int u^2 + L [xi', xi]
  H4 = int 2 u^3 + (u')^2 + 4 L u [xi', xi] + L [xi'', xi']
  H6 = int 5 u^4 + 10 u (u')^2 + (u'')^2 + 15 L u^2 [xi', xi]
           - 2 L u [xi'', xi'] - 8 L u [xi''', xi]
           + 3 L^2 [xi', xi]^2 + L [xi''', xi'']

with L the coupling.  The [xi', xi]^2 term is kept for fidelity to the
densities produced by the deformation expansion even though a product of
brackets sharing an argument vanishes identically in every admissible
finite-dimensional realization, so it contributes nothing numerically.

The modified system conserves the integral of

  h = 1/2 (v')^2 + 1/2 v^4 + 1/2 L^2 [eta, eta']^2
      + 1/2 L [eta'', eta'] + 3/2 L v^2 [eta', eta]

which reduces to 1/2 u^2 + L/2 [xi', xi] under the Miura substitution.

drift_report evaluates the quantities appropriate to a trajectory's
system (the H_k for extended and skdv_grassmann, int h for modified, and
the H_k of the mapped fields for gardner) and reports each quantity's
worst relative excursion from its initial value.
"""

import numpy as np

from .algebra import value_norm
from .errors import SuperKdVError
from .fields import quadrature

H_LABELS = ("H0", "H2", "H4", "H6")
DRIFT_FLOOR = 1e-12


def conserved_densities(u, xi, lam, which=H_LABELS):
    """Map label -> EvenField whose quadrature is the conserved quantity."""
    bad = [w for w in which if w not in H_LABELS]
    if bad:
        raise SuperKdVError(f"unknown conserved quantities {bad}; have {H_LABELS}")
    out = {}
    up = u.derivative(1)
    have_odd = bool(xi.data.shape[0]) and lam != 0.0
    if have_odd:
        xip = xi.derivative(1)
        c10 = xip.commutator(xi)
        c21 = xi.derivative(2).commutator(xip)
    if "H0" in which:
        out["H0"] = u
    if "H2" in which:
        h = u * u
        if have_odd:
            h = h + lam * c10
        out["H2"] = h
    if "H4" in which:
        h = 2.0 * ((u * u) * u) + up * up
        if have_odd:
            h = h + (4.0 * lam) * (u * c10) + lam * c21
        out["H4"] = h
    if "H6" in which:
        u2 = u * u
        h = 5.0 * (u2 * u2) + 10.0 * (u * (up * up)) + u.derivative(2) * u.derivative(2)
        if have_odd:
            xippp = xi.derivative(3)
            h = (h + (15.0 * lam) * (u2 * c10)
                 + (-2.0 * lam) * (u * c21)
                 + (-8.0 * lam) * (u * xippp.commutator(xi))
                 + (3.0 * lam * lam) * (c10 * c10)
                 + lam * xippp.commutator(xi.derivative(2)))
        out["H6"] = h
    return out


def conserved_quantities(u, xi, lam, which=H_LABELS):
    """Map label -> EvenValue, the quadrature of each conserved density."""
    return {label: quadrature(density)
            for label, density in conserved_densities(u, xi, lam, which).items()}


def hamiltonian_density(v, eta, lam):
    """Conserved density of the modified system."""
    vp = v.derivative(1)
    v2 = v * v
    h = 0.5 * (vp * vp) + 0.5 * (v2 * v2)
    if eta.data.shape[0] and lam != 0.0:
        etap = eta.derivative(1)
        c = eta.commutator(etap)
        h = (h + (0.5 * lam * lam) * (c * c)
             + (0.5 * lam) * eta.derivative(2).commutator(etap)
             + (1.5 * lam) * (v2 * etap.commutator(eta)))
    return h


def reduced_hamiltonian_density(u, xi, lam):
    """What hamiltonian_density becomes in the extended variables."""
    h = 0.5 * (u * u)
    if xi.data.shape[0] and lam != 0.0:
        h = h + (0.5 * lam) * xi.derivative(1).commutator(xi)
    return h


class ConservedReport:
    """Time series of conserved quantities plus their relative drifts.

    values[label] has shape (records, even_dim); drift[label] is the worst
    max-abs deviation from the initial value, divided by the initial
    value's norm (floored to avoid dividing by an exact zero).
    """

    def __init__(self, kind, times, labels, channel_labels, values):
        self.kind = kind
        self.times = np.asarray(times, dtype=float)
        self.labels = tuple(labels)
        self.channel_labels = tuple(channel_labels)
        self.values = values
        self.drift = {}
        for label in self.labels:
            series = values[label]
            dev = np.max(np.abs(series - series[0]), axis=1, initial=0.0)
            self.drift[label] = float(np.max(dev)
                                      / max(value_norm(series[0]), DRIFT_FLOOR))

    @property
    def max_drift(self):
        return max(self.drift.values())

    def header(self):
        cols = ["time"]
        for label in self.labels:
            cols.extend(f"{label}[{ch}]" for ch in self.channel_labels)
        return cols

    def rows(self):
        for i, t in enumerate(self.times):
            row = [t]
            for label in self.labels:
                row.extend(self.values[label][i])
            yield row

    def __str__(self):
        lines = [f"conserved quantities for the {self.kind} system "
                 f"({len(self.times)} records, t in "
                 f"[{self.times[0]:g}, {self.times[-1]:g}])"]
        for label in self.labels:
            lines.append(f"  {label}: start {value_norm(self.values[label][0]):.6g}"
                         f"  relative drift {self.drift[label]:.3e}")
        return "\n".join(lines)


def drift_report(traj, quantities=None):
    """Evaluate the conserved quantities appropriate to traj's system at
    every record and report their relative drifts."""
    kind = traj.kind
    lam = traj.lam
    if kind == "modified":
        labels = ("H",) if quantities is None else tuple(quantities)
        if labels != ("H",):
            raise SuperKdVError(
                "the modified system conserves the quadrature of its "
                "hamiltonian density; track quantities=('H',)")
        series = [quadrature(hamiltonian_density(s.even, s.odd, lam)).coords
                  for s in traj]
        values = {"H": np.array(series)}
        channel_labels = traj[0].descriptor.even_labels
        return ConservedReport(kind, traj.times, labels, channel_labels, values)

    labels = H_LABELS if quantities is None else tuple(quantities)
    if kind == "gardner":
        from .transforms import to_extended
        states = [to_extended(s) for s in traj]
    else:
        states = list(traj)
    per_label = {label: [] for label in labels}
    for s in states:
        vals = conserved_quantities(s.even, s.odd, lam, labels)
        for label in labels:
            per_label[label].append(vals[label].coords)
    values = {label: np.array(rows) for label, rows in per_label.items()}
    channel_labels = traj[0].descriptor.even_labels
    return ConservedReport(kind, traj.times, labels, channel_labels, values)
