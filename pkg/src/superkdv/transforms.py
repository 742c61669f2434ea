"""Maps between the evolution systems and the supersymmetry generator.

The substitution u = v' + v^2 - L [eta, eta'], xi = eta' + v eta sends
solutions of the modified system to solutions of the extended one, and

  u  = z + e z' + e^2 (z^2 + L [s', s])
  xi = s + e s' + e^2 z s

does the same for the deformed (gardner) system at deformation e.  Both
facts are checked numerically here by comparing a centered time
difference of the mapped trajectory against the extended right-hand side.

The supersymmetry generator with constant odd parameter p is

  du = L [p, xi'],    dxi = u p,

a linear map on states that commutes with the extended flow.
"""

import numpy as np

from .dynamics import SystemState, Trajectory, integrate, rhs_state
from .errors import SuperKdVError
from .fields import OddField


def miura(v, eta, lam):
    """Image (u, xi) of modified-system fields under the Miura substitution."""
    etap = eta.derivative(1)
    u = v.derivative(1) + v * v + (-lam) * eta.commutator(etap)
    xi = etap + v * eta
    return u, xi


def gardner_map(z, sigma, lam, eps):
    """Image (u, xi) of deformed-system fields at deformation eps."""
    sp = sigma.derivative(1)
    u = z + eps * z.derivative(1) + (eps * eps) * (z * z)
    if sigma.data.shape[0] and lam != 0.0:
        u = u + (eps * eps * lam) * sp.commutator(sigma)
    xi = sigma + eps * sp + (eps * eps) * (z * sigma)
    return u, xi


def inverse_gardner_series(u, xi, lam, eps, order=8):
    """Invert the gardner map as a power series in eps, truncated at the
    given order.  The residual of the round trip is O(eps^(order+1))."""
    if order < 0:
        raise SuperKdVError("series order must be >= 0")
    zs, ss = [u], [xi]
    for n in range(1, order + 1):
        zn = -zs[n - 1].derivative(1)
        sn = -ss[n - 1].derivative(1)
        for a in range(n - 1):
            b = n - 2 - a
            zn = zn - zs[a] * zs[b]
            if xi.data.shape[0] and lam != 0.0:
                zn = zn + (-lam) * ss[a].derivative(1).commutator(ss[b])
            sn = sn - zs[a] * ss[b]
        zs.append(zn)
        ss.append(sn)
    z, s = zs[0], ss[0]
    for n in range(1, order + 1):
        z = z + (eps ** n) * zs[n]
        s = s + (eps ** n) * ss[n]
    return z, s


def _constant_odd_field(grid, param):
    data = np.repeat(np.asarray(param.coords, dtype=float)[:, None], grid.N, axis=1)
    return OddField(grid, param.descriptor, data)


def susy_variation(u, xi, param, lam, use_odd_mul=False):
    """Supersymmetry generator: du = L [p, xi'], dxi = u p.

    param is a constant odd element (an OddValue).  With use_odd_mul the
    bracket is replaced by twice the plain odd product, which is the same
    thing on a grassmann backend.
    """
    pf = _constant_odd_field(u.grid, param)
    xip = xi.derivative(1)
    if use_odd_mul:
        du = (2.0 * lam) * pf.odd_mul(xip)
    else:
        du = lam * pf.commutator(xip)
    dxi = u * pf
    return du, dxi


def to_extended(state):
    """Map one state of any system onto extended-system fields."""
    if state.kind == "modified":
        u, xi = miura(state.even, state.odd, state.lam)
    elif state.kind == "gardner":
        u, xi = gardner_map(state.even, state.odd, state.lam, state.epsilon)
    else:
        u, xi = state.even, state.odd
    return SystemState("extended", u, xi, state.time, state.lam)


def to_extended_trajectory(traj):
    return Trajectory([to_extended(s) for s in traj])


def fd_flow_residual(traj, dealias=True):
    """How well the recorded states solve their own system.

    Compares a fourth-order centered time difference of the records
    against the right-hand side at interior records, and returns the
    worst sample deviation relative to the largest right-hand side.
    Needs at least five uniformly spaced records.
    """
    times = traj.times
    if len(times) < 5:
        raise SuperKdVError("need at least five records for the time difference")
    spacing = np.diff(times)
    delta = spacing[0]
    if np.max(np.abs(spacing - delta)) > 1e-9 * max(delta, 1e-12):
        raise SuperKdVError("records are not uniformly spaced in time")
    worst = 0.0
    scale = 1e-12
    for i in range(2, len(times) - 2):
        re, ro = rhs_state(traj[i], dealias=dealias)
        scale = max(scale, re.norm(), ro.norm())
        for part in ("even", "odd"):
            f = [getattr(traj[j], part).data for j in range(i - 2, i + 3)]
            fd = (-f[4] + 8.0 * f[3] - 8.0 * f[1] + f[0]) / (12.0 * delta)
            rhs = re.data if part == "even" else ro.data
            if fd.size:
                worst = max(worst, float(np.max(np.abs(fd - rhs))))
    return worst / scale


def flow_commutation_defect(state, param, dt, steps, scheme="rk4", dealias=True):
    """Norm of (flow then susy) minus (susy then flow), relative to the
    evolved fields.  Exact commutation gives pure roundoff here."""
    du, dxi = susy_variation(state.even, state.odd, param, state.lam)
    shifted = state.replace_fields(state.even + du, state.odd + dxi)
    a = integrate(shifted, dt, steps, scheme=scheme, record_every=steps,
                  dealias=dealias).final
    b = integrate(state, dt, steps, scheme=scheme, record_every=steps,
                  dealias=dealias).final
    du_b, dxi_b = susy_variation(b.even, b.odd, param, state.lam)
    defect = max(np.max(np.abs(a.even.data - (b.even + du_b).data), initial=0.0),
                 np.max(np.abs(a.odd.data - (b.odd + dxi_b).data), initial=0.0))
    scale = max(b.even.norm(), b.odd.norm(), 1.0)
    return float(defect) / scale
