"""Schmidt-spectrum and entropy diagnostics across register cuts.

The spectrum across a cut is computed from the Gram matrix of whichever side
of the bipartition is smaller; for pipeline states that side is small and the
eigenvalue problem is cheap and numerically stable. A transform that acts
entirely on one side of a cut cannot change that cut's spectrum, which is
what the locality check verifies for the control-register Fourier transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import OutcomeDistribution, marginal
from .errors import CapacityError, RangeError
from .pipeline import pre_measurement_states
from .registers import DEFAULT_QUBIT_CAP, ProblemInstance, StateVector

EIGENVALUE_FLOOR = 1e-14
DEFAULT_SIDE_CAP = 4096


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Non-increasing Schmidt eigenvalues across one register cut.

    cut_after = p means the cut separates registers 1..p from the rest
    (register 1 is the control register).
    """

    cut_after: int
    eigenvalues: tuple[float, ...]

    def rank(self) -> int:
        return len(self.eigenvalues)

    def to_json_dict(self) -> dict:
        return {"cut_after": self.cut_after, "eigenvalues": list(self.eigenvalues)}


def schmidt_spectrum(
    state: StateVector, cut_after: int, side_cap: int = DEFAULT_SIDE_CAP
) -> SchmidtSpectrum:
    """Eigenvalues of the reduced state across the cut after register `cut_after`."""
    layout = state.layout
    if not 1 <= cut_after <= layout.ell:
        raise RangeError(f"cut_after must lie in [1, {layout.ell}], got {cut_after}")
    left_dim = layout.q << ((cut_after - 1) * layout.L)
    right_dim = layout.dim // left_dim
    if min(left_dim, right_dim) > side_cap:
        raise CapacityError(
            f"both sides of the cut exceed {side_cap} (dims {left_dim} x {right_dim})"
        )
    matrix = np.zeros((left_dim, right_dim), dtype=np.complex128)
    for index, amp in state.nonzero_items():
        matrix[index // right_dim, index % right_dim] = amp
    if left_dim <= right_dim:
        gram = matrix @ matrix.conj().T
    else:
        gram = matrix.conj().T @ matrix
    eigenvalues = np.linalg.eigvalsh(gram)[::-1]
    kept = tuple(float(v) for v in eigenvalues if v > EIGENVALUE_FLOOR)
    return SchmidtSpectrum(cut_after=cut_after, eigenvalues=kept)


def schmidt_spectrum_of_amplitudes(
    matrix: np.ndarray, cut_after: int = 1
) -> SchmidtSpectrum:
    """Spectrum of an explicit (left, right) amplitude matrix; test helper."""
    if matrix.shape[0] <= matrix.shape[1]:
        gram = matrix @ matrix.conj().T
    else:
        gram = matrix.conj().T @ matrix
    eigenvalues = np.linalg.eigvalsh(gram)[::-1]
    kept = tuple(float(v) for v in eigenvalues if v > EIGENVALUE_FLOOR)
    return SchmidtSpectrum(cut_after=cut_after, eigenvalues=kept)


def von_neumann_entropy(spectrum: SchmidtSpectrum) -> float:
    """Entropy of the spectrum in bits, with 0*log(0) = 0."""
    return float(
        -sum(v * math.log2(v) for v in spectrum.eigenvalues if v > 0.0)
    )


@dataclass(frozen=True)
class LocalityReport:
    """Schmidt spectrum across the (control | function registers) cut,
    immediately before and after the Fourier transform."""

    n: int
    x: int
    ell: int
    eigenvalues_before: tuple[float, ...]
    eigenvalues_after: tuple[float, ...]
    max_deviation: float
    entropy_before_bits: float
    entropy_after_bits: float
    tolerance: float = 1e-10

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "x": self.x,
            "ell": self.ell,
            "eigenvalues_before": list(self.eigenvalues_before),
            "eigenvalues_after": list(self.eigenvalues_after),
            "max_deviation": self.max_deviation,
            "entropy_before_bits": self.entropy_before_bits,
            "entropy_after_bits": self.entropy_after_bits,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def spectra_deviation(a: SchmidtSpectrum, b: SchmidtSpectrum) -> float:
    """Max difference of descending eigenvalues, padding the shorter with zeros."""
    width = max(len(a.eigenvalues), len(b.eigenvalues))
    worst = 0.0
    for i in range(width):
        va = a.eigenvalues[i] if i < len(a.eigenvalues) else 0.0
        vb = b.eigenvalues[i] if i < len(b.eigenvalues) else 0.0
        worst = max(worst, abs(va - vb))
    return worst


def qft_locality_check(
    instance: ProblemInstance,
    ell: int = 1,
    backend: str = "sparse",
    qubit_cap: int = DEFAULT_QUBIT_CAP,
) -> LocalityReport:
    """Verify the transform on the control register leaves the
    (control | function registers) Schmidt spectrum unchanged."""
    before, after = pre_measurement_states(
        instance, ell=ell, backend=backend, qubit_cap=qubit_cap
    )
    spec_before = schmidt_spectrum(before, cut_after=1)
    spec_after = schmidt_spectrum(after, cut_after=1)
    return LocalityReport(
        n=instance.n,
        x=instance.x,
        ell=ell,
        eigenvalues_before=spec_before.eigenvalues,
        eigenvalues_after=spec_after.eigenvalues,
        max_deviation=spectra_deviation(spec_before, spec_after),
        entropy_before_bits=von_neumann_entropy(spec_before),
        entropy_after_bits=von_neumann_entropy(spec_after),
    )


@dataclass(frozen=True)
class CorrelationReport:
    """Joint statistics of two function registers."""

    position_i: int
    position_j: int
    p_equal: float
    p_unequal: float
    table: tuple[tuple[int, int, float], ...]

    def to_json_dict(self) -> dict:
        return {
            "position_i": self.position_i,
            "position_j": self.position_j,
            "p_equal": self.p_equal,
            "p_unequal": self.p_unequal,
            "table": [
                {"yi": yi, "yj": yj, "probability": prob} for yi, yj, prob in self.table
            ],
        }


def register_correlation(
    dist: OutcomeDistribution, i: int = 2, j: int = 3
) -> CorrelationReport:
    """Contingency table over the values of function registers i and j."""
    if i == j:
        raise RangeError("need two distinct registers")
    if min(i, j) < 2:
        raise RangeError("correlation is defined between function registers (positions >= 2)")
    i, j = sorted((i, j))
    pair = marginal(dist, (i, j))
    p_equal = 0.0
    p_unequal = 0.0
    table = []
    for (yi, yj), prob in pair.sorted_items():
        table.append((yi, yj, prob))
        if yi == yj:
            p_equal += prob
        else:
            p_unequal += prob
    return CorrelationReport(
        position_i=i,
        position_j=j,
        p_equal=float(p_equal),
        p_unequal=float(p_unequal),
        table=tuple(table),
    )
