"""Heavy rigid body in Euler-angle chart ``(φ, θ, ψ, p_φ, p_θ, p_ψ)``.

The Hess-Appel'rot Hamiltonian
``H = ½(a M1² + a M2² + b M3² + 2c M1 M3) + k cos θ`` has the invariant relation
``M3 = p_φ = 0``. The contact form ``p dq + dφ`` is exact-symplectic with the
same ``dp∧dq`` as the canonical form.
"""
from dataclasses import dataclass

import numpy as np

from ..errors import ChartSingular
from ..fields import OneForm, ScalarField
from .isoenergetic import standard_one_form

PHI, THETA, PSI, P_PHI, P_THETA, P_PSI = range(6)


@dataclass(frozen=True)
class HessAppelrotModel:
    a: float = 1.0
    b: float = 0.8
    c: float = 0.3
    k: float = 0.5
    theta_margin: float = 0.2

    ambient_dim = 6

    def __post_init__(self):
        if not 0 < self.theta_margin < np.pi / 2:
            raise ValueError("theta_margin must lie in (0, π/2)")

    def _check(self, x):
        th = x[THETA]
        if not self.theta_margin <= th <= np.pi - self.theta_margin:
            raise ChartSingular(f"θ = {th:.4f} outside the chart margin")

    def _moments(self, x):
        """M1, M2 and their gradients."""
        self._check(x)
        phi, th = x[PHI], x[THETA]
        pphi, pth, ppsi = x[P_PHI], x[P_THETA], x[P_PSI]
        s, co = np.sin(th), np.cos(th)
        sf, cf = np.sin(phi), np.cos(phi)
        Q = ppsi - pphi * co
        M1 = sf / s * Q + pth * cf
        M2 = cf / s * Q - pth * sf
        dQs = pphi - Q * co / s**2  # d/dθ (Q / sin θ)
        g1 = np.zeros(6)
        g1[PHI] = M2
        g1[THETA] = sf * dQs
        g1[P_PHI] = -sf * co / s
        g1[P_THETA] = cf
        g1[P_PSI] = sf / s
        g2 = np.zeros(6)
        g2[PHI] = -M1
        g2[THETA] = cf * dQs
        g2[P_PHI] = -cf * co / s
        g2[P_THETA] = -sf
        g2[P_PSI] = cf / s
        return M1, M2, g1, g2

    def M1(self):
        return ScalarField(
            "M1", lambda x: float(self._moments(x)[0]), lambda x: self._moments(x)[2]
        )

    def M2(self):
        return ScalarField(
            "M2", lambda x: float(self._moments(x)[1]), lambda x: self._moments(x)[3]
        )

    def M3(self):
        e = np.zeros(6)
        e[P_PHI] = 1.0
        return ScalarField("M3", lambda x: float(x[P_PHI]), lambda x: e.copy())

    def Mz(self):
        e = np.zeros(6)
        e[P_PSI] = 1.0
        return ScalarField("Mz", lambda x: float(x[P_PSI]), lambda x: e.copy())

    def hamiltonian(self):
        a, b, c, k = self.a, self.b, self.c, self.k

        def value(x):
            M1, M2, _, _ = self._moments(x)
            M3 = x[P_PHI]
            return float(
                0.5 * (a * M1**2 + a * M2**2 + b * M3**2 + 2 * c * M1 * M3)
                + k * np.cos(x[THETA])
            )

        def grad(x):
            M1, M2, g1, g2 = self._moments(x)
            M3 = x[P_PHI]
            g3 = np.zeros(6)
            g3[P_PHI] = 1.0
            g = a * M1 * g1 + a * M2 * g2 + b * M3 * g3 + c * (M3 * g1 + M1 * g3)
            g[THETA] -= k * np.sin(x[THETA])
            return g

        return ScalarField("H", value, grad)

    def contact_form(self):
        base = standard_one_form(6)
        W = base.d(np.zeros(6))

        def coefficients(x):
            c = np.zeros(6)
            c[:3] = x[3:]
            c[PHI] += 1.0
            return c

        return OneForm("alpha", coefficients, lambda x: W)

    def fields(self):
        return {
            "H": self.hamiltonian(),
            "M1": self.M1(),
            "M2": self.M2(),
            "M3": self.M3(),
            "Mz": self.Mz(),
        }

    def sample(self, rng, count, on_sigma=False, momentum_scale=1.0):
        lo, hi = self.theta_margin, np.pi - self.theta_margin
        pts = np.empty((count, 6))
        pts[:, PHI] = rng.uniform(0, 2 * np.pi, count)
        pts[:, THETA] = rng.uniform(lo, hi, count)
        pts[:, PSI] = rng.uniform(0, 2 * np.pi, count)
        pts[:, 3:] = momentum_scale * rng.standard_normal((count, 3))
        if on_sigma:
            pts[:, P_PHI] = 0.0
        return pts


def hess_appelrot_fields(model):
    out = model.fields()
    out["alpha"] = model.contact_form()
    return out
