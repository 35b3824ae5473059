"""Register layout, global index packing, and the state-vector container.

Index packing contract: the control register occupies the most significant
bits, followed by the function registers in order. For a layout with control
width s, function width L and ell function registers,

    index = a * 2**(ell*L) + sum_i y_i * 2**((ell - i) * L),   i = 1..ell

so measuring the control value is an index shift and the Fourier transform
touches a contiguous stride pattern.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, NotCoprimeError, RangeError
from .numtheory import gcd

DEFAULT_QUBIT_CAP = 26
SPARSE_AMPLITUDE_FLOOR = 1e-15

DENSE = "dense"
SPARSE = "sparse"


def choose_modulus_power(n: int) -> tuple[int, int]:
    """The unique (q, s) with q = 2**s and n**2 <= q < 2*n**2."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    s = (n * n - 1).bit_length()
    q = 1 << s
    assert n * n <= q < 2 * n * n
    return q, s


@dataclass(frozen=True)
class ProblemInstance:
    """One order-finding run: modulus n, base x, control-register size q = 2**s."""

    n: int
    x: int
    q: int
    s: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"n must be >= 3, got {self.n}")
        if not 1 < self.x < self.n:
            raise ValueError(f"base must satisfy 1 < x < n, got x={self.x}, n={self.n}")
        g = gcd(self.x, self.n)
        if g != 1:
            raise NotCoprimeError(self.x, self.n, g)
        if self.q != 1 << self.s:
            raise ValueError(f"q={self.q} is not 2**{self.s}")
        if not self.n**2 <= self.q < 2 * self.n**2:
            raise ValueError(f"q={self.q} outside [n^2, 2n^2) for n={self.n}")

    @classmethod
    def create(cls, n: int, x: int) -> "ProblemInstance":
        q, s = choose_modulus_power(n)
        return cls(n=n, x=x, q=q, s=s)

    @property
    def function_register_width(self) -> int:
        """Bit width that holds every residue in [0, n)."""
        return (self.n - 1).bit_length()

    def layout(self, ell: int = 1, qubit_cap: int = DEFAULT_QUBIT_CAP) -> "RegisterLayout":
        return RegisterLayout(
            s=self.s, L=self.function_register_width, ell=ell, qubit_cap=qubit_cap
        )


@dataclass(frozen=True)
class RegisterLayout:
    """Widths of the control register (s) and the ell function registers (L each)."""

    s: int
    L: int
    ell: int
    qubit_cap: int = DEFAULT_QUBIT_CAP

    def __post_init__(self):
        if self.s < 1 or self.L < 1:
            raise ValueError("register widths must be >= 1")
        if self.ell < 1:
            raise ValueError(f"need at least one function register, got ell={self.ell}")
        if self.total_qubits > self.qubit_cap:
            raise CapacityError(
                f"layout needs {self.total_qubits} qubits, cap is {self.qubit_cap} "
                f"(raise the cap explicitly to allow this)"
            )

    @property
    def total_qubits(self) -> int:
        return self.s + self.ell * self.L

    @property
    def q(self) -> int:
        """Control-register dimension."""
        return 1 << self.s

    @property
    def function_dim(self) -> int:
        """Dimension of one function register."""
        return 1 << self.L

    @property
    def right_dim(self) -> int:
        """Combined dimension of all function registers."""
        return 1 << (self.ell * self.L)

    @property
    def dim(self) -> int:
        return 1 << self.total_qubits

    def pack_index(self, a: int, ys) -> int:
        """Global basis index for control value a and function values ys."""
        if not 0 <= a < self.q:
            raise RangeError(f"control value {a} outside [0, {self.q})")
        ys = tuple(ys)
        if len(ys) != self.ell:
            raise RangeError(f"expected {self.ell} function values, got {len(ys)}")
        index = a
        for y in ys:
            if not 0 <= y < self.function_dim:
                raise RangeError(f"function value {y} outside [0, {self.function_dim})")
            index = (index << self.L) | y
        return index

    def unpack_index(self, index: int) -> tuple[int, tuple[int, ...]]:
        """Inverse of pack_index."""
        if not 0 <= index < self.dim:
            raise RangeError(f"index {index} outside [0, {self.dim})")
        mask = self.function_dim - 1
        ys = []
        for _ in range(self.ell):
            ys.append(index & mask)
            index >>= self.L
        return index, tuple(reversed(ys))

    def outcome_of_index(self, index: int) -> tuple[int, ...]:
        a, ys = self.unpack_index(index)
        return (a, *ys)


class StateVector:
    """Complex amplitudes over the full register space, dense or sparse.

    Dense states hold a flat complex128 array of length layout.dim; sparse
    states hold a dict from packed index to amplitude and store only nonzero
    entries.
    """

    def __init__(self, layout: RegisterLayout, backend: str, data):
        if backend not in (DENSE, SPARSE):
            raise ValueError(f"unknown backend {backend!r}")
        self.layout = layout
        self.backend = backend
        self.data = data

    @classmethod
    def zeros(cls, layout: RegisterLayout, backend: str = SPARSE) -> "StateVector":
        if backend == DENSE:
            _check_dense_capacity(layout)
            return cls(layout, DENSE, np.zeros(layout.dim, dtype=np.complex128))
        return cls(layout, SPARSE, {})

    def amplitude(self, index: int) -> complex:
        if self.backend == DENSE:
            return complex(self.data[index])
        return complex(self.data.get(index, 0.0))

    def nonzero_items(self):
        """Iterate (index, amplitude) over stored nonzero entries."""
        if self.backend == DENSE:
            for index in np.nonzero(self.data)[0]:
                yield int(index), complex(self.data[index])
        else:
            yield from self.data.items()

    def nonzero_count(self) -> int:
        if self.backend == DENSE:
            return int(np.count_nonzero(self.data))
        return len(self.data)

    def norm_squared(self) -> float:
        if self.backend == DENSE:
            return float(np.vdot(self.data, self.data).real)
        return float(sum(abs(v) ** 2 for v in self.data.values()))

    def densify(self) -> "StateVector":
        """Dense copy with identical amplitudes."""
        _check_dense_capacity(self.layout)
        if self.backend == DENSE:
            return StateVector(self.layout, DENSE, self.data.copy())
        dense = np.zeros(self.layout.dim, dtype=np.complex128)
        for index, amp in self.data.items():
            dense[index] = amp
        return StateVector(self.layout, DENSE, dense)

    def sparsify(self, floor: float = SPARSE_AMPLITUDE_FLOOR) -> "StateVector":
        """Sparse copy, dropping amplitudes with magnitude <= floor."""
        if self.backend == SPARSE:
            kept = {i: v for i, v in self.data.items() if abs(v) > floor}
            return StateVector(self.layout, SPARSE, kept)
        kept = {}
        for index in np.nonzero(np.abs(self.data) > floor)[0]:
            kept[int(index)] = complex(self.data[index])
        return StateVector(self.layout, SPARSE, kept)

    def dump(self, path) -> None:
        """Write the text snapshot: header line, then one 'index re im' line per entry."""
        layout = self.layout
        with open(path, "w") as fh:
            fh.write(f"{layout.s} {layout.L} {layout.ell} {self.backend}\n")
            for index, amp in sorted(self.nonzero_items()):
                fh.write(f"{index} {amp.real:.17g} {amp.imag:.17g}\n")

    @classmethod
    def load(cls, path, qubit_cap: int = DEFAULT_QUBIT_CAP) -> "StateVector":
        with open(path) as fh:
            header = fh.readline().split()
            if len(header) != 4:
                raise ValueError(f"malformed snapshot header: {header}")
            s, L, ell = (int(v) for v in header[:3])
            backend = header[3]
            layout = RegisterLayout(s=s, L=L, ell=ell, qubit_cap=max(qubit_cap, s + ell * L))
            state = cls.zeros(layout, backend)
            for line in fh:
                index_str, re_str, im_str = line.split()
                state.data[int(index_str)] = complex(float(re_str), float(im_str))
        return state


def _check_dense_capacity(layout: RegisterLayout) -> None:
    if layout.total_qubits > layout.qubit_cap:
        raise CapacityError(
            f"dense allocation needs {layout.total_qubits} qubits, cap is {layout.qubit_cap}"
        )


def pack_index(layout: RegisterLayout, a: int, ys) -> int:
    return layout.pack_index(a, ys)


def unpack_index(layout: RegisterLayout, index: int) -> tuple[int, tuple[int, ...]]:
    return layout.unpack_index(index)


def norm_squared(state: StateVector) -> float:
    return state.norm_squared()


def densify(state: StateVector) -> StateVector:
    return state.densify()


def sparsify(state: StateVector, floor: float = SPARSE_AMPLITUDE_FLOOR) -> StateVector:
    return state.sparsify(floor)
