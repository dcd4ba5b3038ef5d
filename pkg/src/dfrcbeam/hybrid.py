"""Partially-connected hybrid beamformer model.

The analog stage connects each antenna to exactly one RF chain through a
phase shifter, so it is stored as one phase per antenna rather than as a
matrix; the block-diagonal unit-modulus structure then holds by construction
and cannot be violated by any numerical step.  The baseband stage is a dense
complex matrix over RF chains and streams.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


def _canonical_phases(phases: np.ndarray) -> np.ndarray:
    out = np.asarray(phases, dtype=float) % TWO_PI
    # fmod of a tiny negative can round up to the modulus itself
    out[out >= TWO_PI] = 0.0
    return out


@dataclass(frozen=True)
class AnalogBeamformer:
    """Phase-shifter network mapping `num_rf_chains` chains onto `num_antennas` antennas.

    Antenna i is wired to chain i // (num_antennas // num_rf_chains); `phases`
    holds the shifter setting per antenna, canonicalized to [0, 2pi).
    """

    num_antennas: int
    num_rf_chains: int
    phases: np.ndarray

    def __post_init__(self) -> None:
        if self.num_antennas < 1 or self.num_rf_chains < 1:
            raise ValueError("antenna and RF chain counts must be >= 1")
        if self.num_antennas % self.num_rf_chains != 0:
            raise ValueError(
                f"num_antennas={self.num_antennas} is not divisible by "
                f"num_rf_chains={self.num_rf_chains}"
            )
        phases = _canonical_phases(self.phases)
        if phases.shape != (self.num_antennas,):
            raise ValueError(f"phases must have shape ({self.num_antennas},)")
        if not np.all(np.isfinite(phases)):
            raise ValueError("phases must be finite")
        object.__setattr__(self, "phases", phases)

    @property
    def block_size(self) -> int:
        return self.num_antennas // self.num_rf_chains

    def chain_of_antenna(self) -> np.ndarray:
        """RF chain index feeding each antenna, in antenna order."""
        return np.arange(self.num_antennas) // self.block_size

    def to_matrix(self) -> np.ndarray:
        """Dense (num_antennas x num_rf_chains) matrix with one unit-modulus entry per row."""
        m = np.zeros((self.num_antennas, self.num_rf_chains), dtype=complex)
        m[np.arange(self.num_antennas), self.chain_of_antenna()] = np.exp(1j * self.phases)
        return m


@dataclass(frozen=True)
class BasebandBeamformer:
    """Dense digital precoder over (num_rf_chains x num_streams)."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
            raise ValueError("baseband matrix must be 2-D and nonempty")
        object.__setattr__(self, "matrix", m)

    @property
    def num_rf_chains(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_streams(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class HybridBeamformer:
    """Analog and baseband stages whose product is the transmit beamformer."""

    analog: AnalogBeamformer
    baseband: BasebandBeamformer

    def __post_init__(self) -> None:
        if self.baseband.num_rf_chains != self.analog.num_rf_chains:
            raise ValueError(
                f"baseband has {self.baseband.num_rf_chains} RF chains, "
                f"analog stage has {self.analog.num_rf_chains}"
            )

    def materialize(self) -> np.ndarray:
        return materialize_product(self.analog, self.baseband.matrix)


def materialize_product(analog: AnalogBeamformer, baseband: np.ndarray) -> np.ndarray:
    """Dense product of the two stages without forming the analog matrix.

    Row i of the result is exp(j phases[i]) times the baseband row of the
    chain feeding antenna i.
    """
    baseband = np.asarray(baseband)
    if baseband.shape[0] != analog.num_rf_chains:
        raise ValueError(
            f"baseband has {baseband.shape[0]} rows, expected {analog.num_rf_chains}"
        )
    rows = np.repeat(baseband, analog.block_size, axis=0)
    return np.exp(1j * analog.phases)[:, None] * rows


def normalize_power(
    bb: BasebandBeamformer, num_antennas: int, num_rf_chains: int, total_power: float
) -> BasebandBeamformer:
    """Rescale the baseband stage so the hybrid product carries `total_power`.

    Each analog row has unit modulus and each baseband row is repeated
    num_antennas / num_rf_chains times in the product, so
    ||product||_F^2 = (num_antennas / num_rf_chains) * ||baseband||_F^2 and the
    power constraint becomes ||baseband||_F^2 = num_rf_chains * total_power / num_antennas.
    """
    if num_antennas < 1 or num_rf_chains < 1 or num_antennas % num_rf_chains != 0:
        raise ValueError("num_antennas must be a positive multiple of num_rf_chains")
    if not total_power > 0:
        raise ValueError("total_power must be positive")
    norm_sq = float(np.sum(np.abs(bb.matrix) ** 2))
    if norm_sq == 0.0:
        raise ValueError("cannot power-normalize a zero baseband matrix")
    target = num_rf_chains * total_power / num_antennas
    return BasebandBeamformer(bb.matrix * math.sqrt(target / norm_sq))


def hybrid_to_json(hb: HybridBeamformer) -> str:
    """Serialize to a JSON document; floats round-trip exactly."""
    doc = {
        "num_antennas": hb.analog.num_antennas,
        "num_rf_chains": hb.analog.num_rf_chains,
        "num_streams": hb.baseband.num_streams,
        "phases": hb.analog.phases.tolist(),
        "baseband": [[z.real, z.imag] for z in hb.baseband.matrix.ravel()],
    }
    return json.dumps(doc, indent=2) + "\n"


def hybrid_from_json(text: str) -> HybridBeamformer:
    doc = json.loads(text)
    analog = AnalogBeamformer(
        num_antennas=int(doc["num_antennas"]),
        num_rf_chains=int(doc["num_rf_chains"]),
        phases=np.asarray(doc["phases"], dtype=float),
    )
    flat = np.asarray(doc["baseband"], dtype=float)
    if flat.ndim != 2 or flat.shape[1] != 2:
        raise ValueError("baseband entries must be [real, imag] pairs")
    matrix = (flat[:, 0] + 1j * flat[:, 1]).reshape(
        analog.num_rf_chains, int(doc["num_streams"])
    )
    return HybridBeamformer(analog, BasebandBeamformer(matrix))
