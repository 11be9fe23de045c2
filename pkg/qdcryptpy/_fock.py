# -*- coding: utf-8 -*-
"""
Bosonic Fock-space states for the interferometric encoder.

A collection efficiency is a beamsplitter into a loss mode, the encoder is a
Mach-Zehnder interferometer with a phase on its second arm, and the loss
mode is traced out at the end.
"""
import itertools
from math import comb, factorial, sqrt
from typing import Dict, Hashable, List, Optional, Sequence, Tuple, Union

import numpy as np

from qdcryptpy._numlin import as_hermitian, min_eigenvalue

PHOTON_CUTOFF = 3


class FockBasis:
    """
    Occupation-number basis of ``modes`` bosonic modes truncated at
    ``max_total`` photons, ordered lexicographically with vacuum first.
    """

    def __init__(self, modes: int, max_total: int = PHOTON_CUTOFF):
        if modes < 1:
            raise ValueError("modes must be positive!")
        if max_total < 0:
            raise ValueError("max_total must be non-negative!")
        self.modes = modes
        self.max_total = max_total
        self.labels: List[Tuple[int, ...]] = [
            occ for occ in itertools.product(range(max_total + 1), repeat=modes)
            if sum(occ) <= max_total
        ]
        self._index: Dict[Tuple[int, ...], int] = {occ: i for i, occ in enumerate(self.labels)}

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, occ: Sequence[int]) -> int:
        return self._index[tuple(occ)]

    def photon_numbers(self) -> np.ndarray:
        return np.array([sum(occ) for occ in self.labels])

    def __eq__(self, other):
        return isinstance(other, FockBasis) and self.modes == other.modes and self.max_total == other.max_total

    def __repr__(self):
        return f"FockBasis(modes={self.modes}, max_total={self.max_total})"


Labels = Union[FockBasis, Sequence[Hashable]]


def _labels_of(basis: Labels) -> List:
    return list(basis.labels) if isinstance(basis, FockBasis) else list(basis)


class PureState:
    """Normalized amplitude vector over a basis."""

    def __init__(self, basis: Labels, amplitudes, check: bool = True):
        self.basis = basis
        self.amplitudes = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if self.amplitudes.size != len(_labels_of(basis)):
            raise ValueError("amplitude count does not match the basis dimension")
        if check:
            norm = float(np.sum(np.abs(self.amplitudes) ** 2))
            if abs(norm - 1.0) > 1e-12:
                raise ValueError(f"state is not normalized: |psi|^2 = {norm:.15f}")

    @classmethod
    def from_occupations(cls, basis: FockBasis, amplitudes: Dict[Tuple[int, ...], complex]) -> "PureState":
        vec = np.zeros(basis.dim, dtype=complex)
        for occ, amp in amplitudes.items():
            vec[basis.index(occ)] = amp
        return cls(basis, vec)

    def amplitude(self, occ: Sequence[int]) -> complex:
        return complex(self.amplitudes[self.basis.index(occ)])

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(self.basis, np.outer(self.amplitudes, self.amplitudes.conj()))


class DensityMatrix:
    """Unit-trace positive Hermitian matrix over an explicit ordered basis."""

    def __init__(self, basis: Labels, matrix, check: bool = True):
        self.basis = basis
        self.matrix = as_hermitian(matrix) if check else np.asarray(matrix, dtype=complex)
        if self.matrix.shape[0] != len(_labels_of(basis)):
            raise ValueError("matrix dimension does not match the basis dimension")
        if check:
            tr = float(np.real(np.trace(self.matrix)))
            if abs(tr - 1.0) > 1e-12:
                raise ValueError(f"density matrix trace is {tr:.15f}, expected 1")
            w = min_eigenvalue(self.matrix)
            if w < -1e-10:
                raise ValueError(f"density matrix is not positive: minimum eigenvalue {w:.3e}")

    @property
    def labels(self) -> List:
        return _labels_of(self.basis)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


def _check_mode(state: PureState, mode: int):
    if not isinstance(state.basis, FockBasis):
        raise ValueError("mode operations need a Fock basis")
    if not 0 <= mode < state.basis.modes:
        raise ValueError(f"invalid mode index {mode} for {state.basis.modes} modes")


def apply_beamsplitter(state: PureState, mode_a: int, mode_b: int, r: float) -> PureState:
    """
    Beamsplitter of reflectivity ``r`` on creation operators:
    a† -> √r a† + √(1-r) b†,  b† -> √(1-r) a† - √r b†.

    :param state: state over a FockBasis
    :param mode_a: first input mode
    :param mode_b: second input mode, distinct from mode_a
    :param r: reflectivity in [0, 1]
    """
    _check_mode(state, mode_a)
    _check_mode(state, mode_b)
    if mode_a == mode_b:
        raise ValueError("beamsplitter modes must be distinct!")
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"reflectivity must lie in [0, 1], got {r}")
    basis = state.basis
    sr, st = sqrt(r), sqrt(1.0 - r)
    out = np.zeros(basis.dim, dtype=complex)
    for occ, c in zip(basis.labels, state.amplitudes):
        if c == 0:
            continue
        na, nb = occ[mode_a], occ[mode_b]
        norm = c / sqrt(factorial(na) * factorial(nb))
        for j in range(na + 1):
            wa = comb(na, j) * sr ** j * st ** (na - j)
            for k in range(nb + 1):
                wb = comb(nb, k) * st ** k * (-sr) ** (nb - k)
                p = j + k
                q = na + nb - p
                new = list(occ)
                new[mode_a], new[mode_b] = p, q
                out[basis.index(new)] += norm * wa * wb * sqrt(factorial(p) * factorial(q))
    return PureState(basis, out, check=False)


def apply_phase(state: PureState, mode: int, phi: float) -> PureState:
    """Multiply every amplitude by exp(i n_mode phi)."""
    _check_mode(state, mode)
    n = np.array([occ[mode] for occ in state.basis.labels])
    return PureState(state.basis, state.amplitudes * np.exp(1j * n * phi), check=False)


def partial_trace(state: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Trace out every mode not listed in ``keep``."""
    basis = state.basis
    if not isinstance(basis, FockBasis):
        raise ValueError("partial trace over modes needs a Fock basis")
    keep = sorted(set(keep))
    if not keep or any(k < 0 or k >= basis.modes for k in keep):
        raise ValueError(f"invalid mode subset {keep} for {basis.modes} modes")
    traced = [k for k in range(basis.modes) if k not in keep]
    reduced = FockBasis(len(keep), basis.max_total)
    out = np.zeros((reduced.dim, reduced.dim), dtype=complex)
    groups: Dict[Tuple[int, ...], List[Tuple[int, int]]] = {}
    for i, occ in enumerate(basis.labels):
        env = tuple(occ[k] for k in traced)
        groups.setdefault(env, []).append((i, reduced.index([occ[k] for k in keep])))
    for members in groups.values():
        for i, ri in members:
            for j, rj in members:
                out[ri, rj] += state.matrix[i, j]
    return DensityMatrix(reduced, out, check=False)


def mzi_coefficients(phi: float, y: float, eta: float = 1.0) -> Tuple[complex, complex, complex]:
    """Images of the source creation operator on (mode 0, mode 1, loss mode 2)."""
    s = sqrt(eta)
    c0 = s * (y + (1 - y) * np.exp(1j * phi))
    c1 = s * sqrt(y * (1 - y)) * (1 - np.exp(1j * phi))
    return complex(c0), complex(c1), sqrt(1.0 - eta)


def _emitted(populations: Sequence[float], eta: float) -> PureState:
    p = np.asarray(populations, dtype=float)
    if p.size > PHOTON_CUTOFF + 1 and np.any(p[PHOTON_CUTOFF + 1:] != 0):
        raise ValueError(f"populations above n={PHOTON_CUTOFF} are not supported")
    p = np.pad(p[:PHOTON_CUTOFF + 1], (0, max(0, PHOTON_CUTOFF + 1 - p.size)))
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValueError(f"populations must be non-negative and sum to 1, got {list(p)}")
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"collection efficiency must lie in [0, 1], got {eta}")
    basis = FockBasis(3, PHOTON_CUTOFF)
    amps = {(n, 0, 0): sqrt(p[n]) for n in range(PHOTON_CUTOFF + 1)}
    return apply_beamsplitter(PureState.from_occupations(basis, amps), 0, 2, eta)


def _reduced(psi: PureState, coherent: bool) -> DensityMatrix:
    rho = np.outer(psi.amplitudes, psi.amplitudes.conj())
    if not coherent:
        # photon number is conserved by every optic, so dephasing here equals dephasing at emission
        n = psi.basis.photon_numbers()
        rho = np.where(n[:, None] == n[None, :], rho, 0.0)
    out = partial_trace(DensityMatrix(psi.basis, rho, check=False), keep=[0, 1])
    return DensityMatrix(out.basis, out.matrix)


def encode_state(populations: Sequence[float], eta: float, phi: float, y: float = 0.5,
                 coherent: bool = True) -> DensityMatrix:
    """
    Encode an emitted photon-number state through the lossy interferometer.

    Args:
        populations: p_0..p_3 of the emitted state, summing to one.
        eta: collection efficiency in [0, 1].
        phi: interferometer phase, radians.
        y: reflectivity of both interferometer beamsplitters.
        coherent: keep coherences between emitted photon numbers.

    Returns:
        two-mode DensityMatrix over FockBasis(2, 3).
    """
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"interferometer reflectivity must lie in [0, 1], got {y}")
    psi = _emitted(populations, eta)
    psi = apply_beamsplitter(psi, 0, 1, y)
    psi = apply_phase(psi, 1, phi)
    psi = apply_beamsplitter(psi, 0, 1, y)
    return _reduced(psi, coherent)


def encode_splitter_state(populations: Sequence[float], eta: float, r: float, phi: float,
                          coherent: bool = True) -> DensityMatrix:
    """
    Encode through one beamsplitter of reflectivity ``r`` and a phase on
    the transmitted arm: a single photon leaves as √r|v0> + e^{iφ}√(1-r)|v1>.
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"splitter reflectivity must lie in [0, 1], got {r}")
    psi = _emitted(populations, eta)
    psi = apply_beamsplitter(psi, 0, 1, r)
    psi = apply_phase(psi, 1, phi)
    return _reduced(psi, coherent)


def dumps_density_matrix(state: DensityMatrix) -> str:
    """Plain-text form: a ``# basis:`` header then one row per line of ``re,im`` entries."""
    labels = ";".join(",".join(str(v) for v in lab) if isinstance(lab, tuple) else str(lab)
                      for lab in state.labels)
    lines = [f"# basis: {labels}"]
    if isinstance(state.basis, FockBasis):
        lines.insert(0, f"# fock: modes={state.basis.modes} max_total={state.basis.max_total}")
    for row in state.matrix:
        lines.append(" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row))
    return "\n".join(lines) + "\n"


def loads_density_matrix(text: str, check: bool = True) -> DensityMatrix:
    basis: Optional[Labels] = None
    labels: List[str] = []
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("# fock:"):
            kv = dict(part.split("=") for part in line[len("# fock:"):].split())
            basis = FockBasis(int(kv["modes"]), int(kv["max_total"]))
        elif line.startswith("# basis:"):
            labels = line[len("# basis:"):].strip().split(";")
        elif not line.startswith("#"):
            rows.append([complex(float(re), float(im)) for re, im in (e.split(",") for e in line.split())])
    if basis is None:
        basis = labels
    return DensityMatrix(basis, np.array(rows, dtype=complex), check=check)
