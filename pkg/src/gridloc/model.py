"""Grid model types and the 39-bus New England test system defaults.

Buses are numbered 1..B and generators 1..N throughout; arrays are indexed
0-based internally. The model is a DC (linearized) description: branch
susceptances 1/x with resistances and transformer taps ignored, which is the
usual approximation for frequency-dynamics studies on this system.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray


class ConfigurationError(ValueError):
    """Raised when model or experiment parameters are inconsistent."""


def _readonly(values, dtype=float) -> NDArray:
    out = np.array(values, dtype=dtype)
    out.setflags(write=False)
    return out


def _connected(susceptance: NDArray) -> bool:
    # plain breadth-first traversal over the nonzero pattern
    adjacency = np.abs(susceptance) > 0.0
    seen = np.zeros(susceptance.shape[0], dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        i = stack.pop()
        for j in np.nonzero(adjacency[i])[0]:
            if not seen[j]:
                seen[j] = True
                stack.append(int(j))
    return bool(seen.all())


@dataclass(frozen=True)
class GridModel:
    """Network topology and machine parameters.

    Instances are immutable after construction (arrays are marked read-only),
    so a single model can be shared freely across threads and workers.
    """

    bus_count: int
    generator_buses: tuple[int, ...]   # bus id of each generator, ascending
    inertia_s: NDArray                 # H_i, seconds on machine base
    rating_mva: NDArray                # S_i, machine base power
    damping_pu: NDArray                # D_i, pu power per pu frequency
    droop_gain: NDArray                # 1/R_i, pu power per pu frequency
    governor_time_constant_s: NDArray  # T_g,i
    line_susceptance_pu: NDArray       # (B, B) symmetric, zero diagonal
    nominal_frequency_hz: float = 60.0
    base_power_mva: float = 100.0

    def __post_init__(self):
        n = len(self.generator_buses)
        if self.bus_count < 1:
            raise ConfigurationError("bus_count must be at least 1")
        if n < 1:
            raise ConfigurationError("generator_buses must be nonempty")
        if len(set(self.generator_buses)) != n:
            raise ConfigurationError("generator_buses contains a duplicate bus")
        for b in self.generator_buses:
            if not 1 <= b <= self.bus_count:
                raise ConfigurationError(f"generator_buses: bus {b} outside 1..{self.bus_count}")
        if tuple(sorted(self.generator_buses)) != tuple(self.generator_buses):
            raise ConfigurationError("generator_buses must be ascending")

        for name in ("inertia_s", "rating_mva", "damping_pu", "droop_gain",
                     "governor_time_constant_s"):
            arr = _readonly(getattr(self, name))
            if arr.shape != (n,):
                raise ConfigurationError(f"{name} must have one entry per generator")
            object.__setattr__(self, name, arr)
        for name in ("inertia_s", "rating_mva", "governor_time_constant_s"):
            arr = getattr(self, name)
            if not np.all(arr > 0.0):
                i = int(np.argmin(arr))
                raise ConfigurationError(f"{name} must be positive (generator {i + 1})")
        for name in ("damping_pu", "droop_gain"):
            if not np.all(getattr(self, name) >= 0.0):
                raise ConfigurationError(f"{name} must be nonnegative")

        sus = _readonly(self.line_susceptance_pu)
        if sus.shape != (self.bus_count, self.bus_count):
            raise ConfigurationError("line_susceptance_pu must be (bus_count, bus_count)")
        if not np.array_equal(sus, sus.T):
            raise ConfigurationError("line_susceptance_pu must be symmetric")
        if np.any(np.diag(sus) != 0.0):
            raise ConfigurationError("line_susceptance_pu must have a zero diagonal")
        if np.any(sus < 0.0):
            raise ConfigurationError("line_susceptance_pu entries must be nonnegative")
        if not _connected(sus):
            raise ConfigurationError("line_susceptance_pu graph is not connected")
        object.__setattr__(self, "line_susceptance_pu", sus)

        if self.nominal_frequency_hz <= 0.0:
            raise ConfigurationError("nominal_frequency_hz must be positive")
        if self.base_power_mva <= 0.0:
            raise ConfigurationError("base_power_mva must be positive")

    @property
    def generator_count(self) -> int:
        return len(self.generator_buses)

    def content_hash(self) -> str:
        """Stable hash of every parameter, used in trace file headers."""
        h = hashlib.sha256()
        h.update(f"{self.bus_count} {self.generator_buses} "
                 f"{self.nominal_frequency_hz!r} {self.base_power_mva!r}".encode())
        for name in ("inertia_s", "rating_mva", "damping_pu", "droop_gain",
                     "governor_time_constant_s", "line_susceptance_pu"):
            h.update(np.ascontiguousarray(getattr(self, name)).tobytes())
        return h.hexdigest()


@dataclass(frozen=True)
class DisturbanceScenario:
    """A single load-step event; ``bus is None`` means no disturbance."""

    bus: int | None
    magnitude_mw: float
    onset_time_s: float = 0.0
    duration_s: float = 3.0   # post-onset horizon covered by the trace

    def __post_init__(self):
        if self.bus is None:
            if self.magnitude_mw != 0.0:
                raise ConfigurationError("no-disturbance scenario must have magnitude 0")
        else:
            if self.bus < 1:
                raise ConfigurationError(f"bus must be a positive id, got {self.bus}")
            if self.magnitude_mw <= 0.0:
                raise ConfigurationError("disturbance magnitude_mw must be positive")
        if self.duration_s <= 0.0:
            raise ConfigurationError("duration_s must be positive")

    @property
    def label_index(self) -> int:
        """Class label: the bus id, or 0 for no disturbance."""
        return 0 if self.bus is None else self.bus


@dataclass(frozen=True)
class FrequencyTrace:
    """Sampled generator frequencies; column 0 is the onset instant t_0."""

    scenario: DisturbanceScenario
    sample_period_s: float
    samples_hz: NDArray            # (N, T)
    pre_onset_frequency_hz: NDArray  # (N,), steady state before t_0

    def __post_init__(self):
        if self.sample_period_s <= 0.0:
            raise ConfigurationError("sample_period_s must be positive")
        samples = _readonly(self.samples_hz)
        pre = _readonly(self.pre_onset_frequency_hz)
        if samples.ndim != 2 or samples.shape[1] < 1:
            raise ConfigurationError("samples_hz must be (generators, samples)")
        if pre.shape != (samples.shape[0],):
            raise ConfigurationError("pre_onset_frequency_hz must have one entry per generator")
        if not np.all(np.isfinite(samples)):
            raise ConfigurationError("samples_hz contains non-finite values")
        object.__setattr__(self, "samples_hz", samples)
        object.__setattr__(self, "pre_onset_frequency_hz", pre)

    @property
    def generator_count(self) -> int:
        return self.samples_hz.shape[0]

    @property
    def sample_count(self) -> int:
        return self.samples_hz.shape[1]


# --------------------------------------------------------------------------
# 39-bus New England test system data
# --------------------------------------------------------------------------

# (from bus, to bus, reactance x pu on 100 MVA); standard published branch set,
# including the generator step-up transformers
_IEEE39_BRANCHES = (
    (1, 2, 0.0411), (1, 39, 0.0250), (2, 3, 0.0151), (2, 25, 0.0086),
    (2, 30, 0.0181), (3, 4, 0.0213), (3, 18, 0.0133), (4, 5, 0.0128),
    (4, 14, 0.0129), (5, 6, 0.0026), (5, 8, 0.0112), (6, 7, 0.0092),
    (6, 11, 0.0082), (6, 31, 0.0250), (7, 8, 0.0046), (8, 9, 0.0363),
    (9, 39, 0.0250), (10, 11, 0.0043), (10, 13, 0.0043), (10, 32, 0.0200),
    (12, 11, 0.0435), (12, 13, 0.0435), (13, 14, 0.0101), (14, 15, 0.0217),
    (15, 16, 0.0094), (16, 17, 0.0089), (16, 19, 0.0195), (16, 21, 0.0135),
    (16, 24, 0.0059), (17, 18, 0.0082), (17, 27, 0.0173), (19, 20, 0.0138),
    (19, 33, 0.0142), (20, 34, 0.0180), (21, 22, 0.0140), (22, 23, 0.0096),
    (22, 35, 0.0143), (23, 24, 0.0350), (23, 36, 0.0272), (25, 26, 0.0323),
    (25, 37, 0.0232), (26, 27, 0.0147), (26, 28, 0.0474), (26, 29, 0.0625),
    (28, 29, 0.0151), (29, 38, 0.0156),
)

IEEE39_GENERATOR_BUSES = (30, 31, 32, 33, 34, 35, 36, 37, 38, 39)

# H on machine base and machine rating; the products H_i * S_i reproduce the
# standard dynamic data on the 100 MVA system base (bus 39 aggregates the
# external interconnection, hence the large rating)
_IEEE39_INERTIA_S = (4.20, 3.03, 3.58, 2.86, 2.60, 3.48, 2.64, 2.70, 3.45, 5.00)
_IEEE39_RATING_MVA = (1000.0, 1000.0, 1000.0, 1000.0, 1000.0,
                      1000.0, 1000.0, 900.0, 1000.0, 10000.0)

# active-power load profile (MW); the 21 loaded buses are the default
# disturbance locations
IEEE39_LOAD_MW = {
    1: 97.6, 3: 322.0, 4: 500.0, 7: 233.8, 8: 522.0, 9: 6.5, 12: 8.53,
    15: 320.0, 16: 329.0, 18: 158.0, 20: 680.0, 21: 274.0, 23: 247.5,
    24: 308.6, 25: 224.0, 26: 139.0, 27: 281.0, 28: 206.0, 29: 283.5,
    31: 9.2, 39: 1104.0,
}

IEEE39_LOAD_BUSES = tuple(sorted(IEEE39_LOAD_MW))

_IEEE39_BUS_COUNT = 39


def ieee39_load_vector() -> NDArray:
    """Per-bus load in MW as a dense length-39 vector."""
    loads = np.zeros(_IEEE39_BUS_COUNT)
    for bus, mw in IEEE39_LOAD_MW.items():
        loads[bus - 1] = mw
    return loads


def _resolve_override(default, override, name, count):
    """Merge a scalar, full-length sequence, or {generator id: value} override."""
    values = np.array(default, dtype=float)
    if override is None:
        return values
    if isinstance(override, dict):
        for gen, value in override.items():
            gen = int(gen)
            if not 1 <= gen <= count:
                raise ConfigurationError(f"{name}: unknown generator {gen}")
            values[gen - 1] = float(value)
        return values
    arr = np.asarray(override, dtype=float)
    if arr.ndim == 0:
        return np.full(count, float(arr))
    if arr.shape != (count,):
        raise ConfigurationError(f"{name} override must be scalar, length {count}, or a dict")
    return arr


def build_ieee39(*, inertia_s=None, rating_mva=None, damping_pu=None,
                 droop_gain=None, governor_time_constant_s=None,
                 nominal_frequency_hz: float = 60.0,
                 base_power_mva: float = 100.0) -> GridModel:
    """Build the 39-bus test model with documented defaults.

    Defaults: published branch reactances (susceptance 1/x), generators 1..10
    at buses 30..39, H_i between 2.6 and 5.0 s on machine base, damping
    D_i = 1.0 pu, droop gain 1/R_i = 20 (5% droop), governor time constant
    0.5 s, 60 Hz, 100 MVA system base. Each parameter can be overridden with
    a scalar, a length-10 sequence, or a {generator id: value} mapping.
    """
    susceptance = np.zeros((_IEEE39_BUS_COUNT, _IEEE39_BUS_COUNT))
    for i, j, x in _IEEE39_BRANCHES:
        b = 1.0 / x
        susceptance[i - 1, j - 1] += b
        susceptance[j - 1, i - 1] += b

    count = len(IEEE39_GENERATOR_BUSES)
    return GridModel(
        bus_count=_IEEE39_BUS_COUNT,
        generator_buses=IEEE39_GENERATOR_BUSES,
        inertia_s=_resolve_override(_IEEE39_INERTIA_S, inertia_s, "inertia_s", count),
        rating_mva=_resolve_override(_IEEE39_RATING_MVA, rating_mva, "rating_mva", count),
        damping_pu=_resolve_override(np.ones(count), damping_pu, "damping_pu", count),
        droop_gain=_resolve_override(np.full(count, 20.0), droop_gain, "droop_gain", count),
        governor_time_constant_s=_resolve_override(
            np.full(count, 0.5), governor_time_constant_s,
            "governor_time_constant_s", count),
        line_susceptance_pu=susceptance,
        nominal_frequency_hz=nominal_frequency_hz,
        base_power_mva=base_power_mva,
    )
