"""Reduction of the DC network onto the generator buses.

The bus susceptance Laplacian is partitioned into generator (G) and interior
(I) blocks; eliminating the interior buses by Schur complement gives the
generator-to-generator coupling matrix and, for a given load profile, the
constant power each generator carries. A unit load at an interior bus splits
across generators according to the corresponding column of -B_GI @ inv(B_II),
which is the participation vector used by the simulator.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import cho_solve
from scipy.linalg.lapack import dpotrf

from .model import GridModel


class NumericalError(ArithmeticError):
    """Raised when the interior susceptance block cannot be factored."""

    def __init__(self, message: str, bus: int | None = None):
        super().__init__(message)
        self.bus = bus


def susceptance_laplacian(model: GridModel) -> NDArray:
    """Weighted graph Laplacian of the branch susceptances, (B, B)."""
    sus = model.line_susceptance_pu
    return np.diag(sus.sum(axis=1)) - sus


def _partition(model: GridModel) -> tuple[NDArray, NDArray]:
    gen = np.array([b - 1 for b in model.generator_buses], dtype=int)
    mask = np.ones(model.bus_count, dtype=bool)
    mask[gen] = False
    return gen, np.nonzero(mask)[0]


def _interior_factor(laplacian: NDArray, interior: NDArray):
    """Cholesky factor of B_II; reports the bus behind a failing pivot.

    For a connected network with at least one generator this block is
    positive definite, so a failure here means a genuinely degenerate
    partition (for example an interior island with no path to a generator).
    """
    block = laplacian[np.ix_(interior, interior)]
    factor, info = dpotrf(block, lower=1)
    if info != 0:
        pivot_bus = int(interior[info - 1]) + 1 if info > 0 else None
        raise NumericalError(
            f"interior susceptance block is singular at pivot bus {pivot_bus}",
            bus=pivot_bus)
    return factor


def kron_reduce(model: GridModel,
                load_injection_mw: NDArray | None = None) -> tuple[NDArray, NDArray]:
    """Eliminate non-generator buses from the DC power-flow equations.

    Parameters
    ----------
    model : GridModel
    load_injection_mw : per-bus load in MW (length B); defaults to zero.

    Returns
    -------
    reduced : (N, N) symmetric coupling matrix in pu such that the electrical
        power of generator i is base_mva * (reduced @ phase)_i + constant_i.
    constant_mw : (N,) share of the load carried by each generator.
    """
    if load_injection_mw is None:
        loads = np.zeros(model.bus_count)
    else:
        loads = np.asarray(load_injection_mw, dtype=float)
        if loads.shape != (model.bus_count,):
            raise ValueError(f"load_injection_mw must have length {model.bus_count}")

    laplacian = susceptance_laplacian(model)
    gen, interior = _partition(model)
    if interior.size == 0:
        return laplacian[np.ix_(gen, gen)].copy(), loads[gen].copy()

    factor = _interior_factor(laplacian, interior)
    b_gi = laplacian[np.ix_(gen, interior)]
    # inv(B_II) applied to both the coupling block and the interior loads
    solved = cho_solve((factor, True), np.column_stack([laplacian[np.ix_(interior, gen)],
                                                        loads[interior]]))
    reduced = laplacian[np.ix_(gen, gen)] - b_gi @ solved[:, :-1]
    reduced = 0.5 * (reduced + reduced.T)
    constant = loads[gen] - b_gi @ solved[:, -1]
    return reduced, constant


def load_participation(model: GridModel, bus: int) -> NDArray:
    """Fraction of a load step at ``bus`` carried by each generator.

    The entries sum to 1; a step at a generator bus lands entirely on that
    generator.
    """
    if not 1 <= bus <= model.bus_count:
        raise ValueError(f"bus {bus} outside 1..{model.bus_count}")
    weights = np.zeros(model.generator_count)
    if bus in model.generator_buses:
        weights[model.generator_buses.index(bus)] = 1.0
        return weights

    laplacian = susceptance_laplacian(model)
    gen, interior = _partition(model)
    factor = _interior_factor(laplacian, interior)
    unit = np.zeros(interior.size)
    unit[np.nonzero(interior == bus - 1)[0][0]] = 1.0
    return -laplacian[np.ix_(gen, interior)] @ cho_solve((factor, True), unit)


def effective_resistance(model: GridModel, bus_a: int, bus_b: int) -> float:
    """Two-point effective resistance of the susceptance graph.

    A standard electrical-distance measure: smaller means the buses are more
    tightly coupled.
    """
    for bus in (bus_a, bus_b):
        if not 1 <= bus <= model.bus_count:
            raise ValueError(f"bus {bus} outside 1..{model.bus_count}")
    pseudo = np.linalg.pinv(susceptance_laplacian(model))
    i, j = bus_a - 1, bus_b - 1
    return float(pseudo[i, i] + pseudo[j, j] - 2.0 * pseudo[i, j])
