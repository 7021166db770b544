from dataclasses import dataclass, fields, replace

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    on_manifold_tol: float = 1e-8
    projection_tol: float = 1e-12
    residual_tol: float = 1e-8
    rank_tol: float = 1e-10
    fd_crosscheck_tol: float = 1e-6
    max_iter: int = 50
    chart_floor: float = 0.05

    def updated(self, **overrides):
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
        return replace(self, **overrides)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_TOLERANCES = Tolerances()

# central-difference step scale: balances O(h^2) truncation against roundoff
FD_STEP = float(np.cbrt(np.finfo(float).eps))
