"""Force-directed placement as explicit energy minimisation.

The energy of planar positions ``z`` is

    E(z) = sum_{i != j} a_ij |z_i - z_j|^3 / (3 delta) - delta^2 ln |z_i - z_j|

summed over ordered pairs; adjacent vertices settle at distance ``delta``
when isolated from the rest of the graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import kernels
from .errors import CoincidentVertices, NotConnected
from .graph import ContactGraph, connected_components


@dataclass(frozen=True)
class LayoutConfig:
    delta: float = 1.0
    max_iterations: int = 2000
    gradient_tolerance: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if not self.gradient_tolerance > 0:
            raise ValueError("gradient_tolerance must be positive")


@dataclass
class VertexPositions:
    coordinates: np.ndarray
    final_energy: float
    converged: bool
    iterations: int = 0
    energy_trace: list[float] | None = None


def _coords(pos) -> np.ndarray:
    return np.asarray(pos.coordinates if isinstance(pos, VertexPositions) else pos, dtype=np.float64)


def _eval(g: ContactGraph, z: np.ndarray, delta: float, with_grad: bool = True):
    try:
        return kernels.layout_energy_grad(z, g.indptr, g.indices, float(delta), with_grad)
    except ValueError as exc:
        raise CoincidentVertices(str(exc)) from None


def layout_energy(g: ContactGraph, pos, delta: float) -> float:
    return _eval(g, _coords(pos), delta, with_grad=False)[0]


def layout_gradient(g: ContactGraph, pos, delta: float) -> np.ndarray:
    return _eval(g, _coords(pos), delta)[1]


def _min_separation(z: np.ndarray) -> float:
    if len(z) < 2:
        return math.inf
    d, _ = cKDTree(z).query(z, k=2)
    return float(d[:, 1].min())


def minimize_layout(g: ContactGraph, cfg: LayoutConfig = LayoutConfig(), record: bool = False) -> VertexPositions:
    """Gradient descent with Barzilai-Borwein steps and backtracking.

    Starts from uniform random positions in a square of side
    ``delta * sqrt(n)``.  Only steps that lower the energy (Armijo
    condition) and keep every pair at least ``1e-9 * delta`` apart are
    accepted, so the energy trace is non-increasing.
    """
    n = g.n
    if n < 2:
        return VertexPositions(np.zeros((n, 2)), 0.0, True, 0, [0.0] if record else None)
    if connected_components(g).count != 1:
        raise NotConnected("layout requires a connected graph; lay out components separately")
    delta = cfg.delta
    rng = np.random.default_rng(cfg.seed)
    z = rng.uniform(0.0, delta * math.sqrt(n), size=(n, 2))
    min_sep = 1e-9 * delta
    while _min_separation(z) <= min_sep:
        z = z + rng.uniform(-1e-6 * delta, 1e-6 * delta, size=z.shape)
    energy, grad = _eval(g, z, delta)
    trace = [energy] if record else None
    step = 0.1 * delta / max(np.abs(grad).max(), 1e-300)
    converged = False
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        gnorm2 = float(np.sum(grad * grad))
        if np.abs(grad).max() < cfg.gradient_tolerance:
            converged = True
            it -= 1
            break
        accepted = False
        while step * math.sqrt(gnorm2) >= 1e-15 * delta:
            trial = z - step * grad
            if _min_separation(trial) > min_sep:
                e_new, g_new = _eval(g, trial, delta)
                if e_new <= energy - 1e-4 * step * gnorm2:
                    accepted = True
                    break
            step *= 0.5
        if not accepted:
            break
        s = (trial - z).ravel()
        y = (g_new - grad).ravel()
        sy = float(s @ y)
        z, energy, grad = trial, e_new, g_new
        if trace is not None:
            trace.append(energy)
        step = float(s @ s) / sy if sy > 0 else 2.0 * step
    else:
        converged = bool(np.abs(grad).max() < cfg.gradient_tolerance)
    return VertexPositions(z, energy, converged, it, trace)
