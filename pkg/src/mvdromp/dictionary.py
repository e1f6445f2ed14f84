"""Redundant DOA dictionaries built from uniform-linear-array steering vectors."""

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError, DomainError
from .linalg import as_complex_matrix, as_complex_vector

NORM_TOL = 1e-12


@dataclass(frozen=True)
class AngleGrid:
    """Uniform angle grid ``start_deg, start_deg + step_deg, ..., stop_deg`` (inclusive)."""

    start_deg: float
    stop_deg: float
    step_deg: float

    def __post_init__(self):
        if not self.step_deg > 0:
            raise ConfigurationError(f"grid step must be positive, got {self.step_deg}")
        if not self.start_deg < self.stop_deg:
            raise ConfigurationError(
                f"grid start ({self.start_deg}) must be below stop ({self.stop_deg})"
            )
        steps = (self.stop_deg - self.start_deg) / self.step_deg
        if abs(steps - round(steps)) > 1e-9:
            raise ConfigurationError(
                f"grid span {self.stop_deg - self.start_deg} is not a whole number "
                f"of {self.step_deg} degree steps"
            )

    @property
    def size(self) -> int:
        return int(round((self.stop_deg - self.start_deg) / self.step_deg)) + 1

    def angles(self) -> np.ndarray:
        # index-based so the endpoint lands exactly; rounding strips fp dust like 8.000000000000002
        idx = np.arange(self.size)
        return np.round(self.start_deg + idx * self.step_deg, 10)

    def index_of(self, angle_deg: float) -> int:
        """Grid index of an on-grid angle."""
        pos = (angle_deg - self.start_deg) / self.step_deg
        idx = int(round(pos))
        if abs(pos - idx) > 1e-6 or not 0 <= idx < self.size:
            raise DomainError(f"{angle_deg} deg is not a grid point")
        return idx


@dataclass(frozen=True, eq=False)
class Dictionary:
    """Matrix of unit-norm atoms, optionally tagged with the grid angle of each atom.

    ``atoms`` is ``(M, N)``; grid indices are 0-based.
    """

    atoms: np.ndarray
    grid: Optional[np.ndarray] = None
    spacing_wavelengths: Optional[float] = None
    _gram: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        atoms = as_complex_matrix(self.atoms, "atoms")
        atoms.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        norms = np.linalg.norm(atoms, axis=0)
        bad = np.flatnonzero(np.abs(norms - 1.0) > NORM_TOL)
        if bad.size:
            raise DomainError(f"atoms {bad[:5].tolist()} are not unit norm")
        if self.grid is not None:
            grid = np.asarray(self.grid, dtype=float)
            if grid.shape != (atoms.shape[1],):
                raise ConfigurationError(
                    f"grid has {grid.size} angles for {atoms.shape[1]} atoms"
                )
            if np.any(np.diff(grid) <= 0):
                raise ConfigurationError("grid angles must be strictly increasing")
            grid.setflags(write=False)
            object.__setattr__(self, "grid", grid)

    @classmethod
    def from_matrix(cls, matrix, grid=None, normalize=False):
        """Wrap an arbitrary matrix, optionally normalizing its columns first."""
        a = as_complex_matrix(matrix, "matrix")
        if normalize:
            a = a / np.linalg.norm(a, axis=0)
        return cls(atoms=a, grid=grid)

    @property
    def element_count(self) -> int:
        return self.atoms.shape[0]

    @property
    def n_atoms(self) -> int:
        return self.atoms.shape[1]

    @property
    def shape(self):
        return self.atoms.shape

    def gram(self) -> np.ndarray:
        """``A^H A`` (cached)."""
        if "gram" not in self._gram:
            g = self.atoms.conj().T @ self.atoms
            g.setflags(write=False)
            self._gram["gram"] = g
        return self._gram["gram"]

    def angles_of(self, indices) -> list:
        if self.grid is None:
            raise DomainError("dictionary carries no grid angles")
        return [float(self.grid[i]) for i in indices]


def steering_vectors(element_count, spacing_wavelengths, angles_deg):
    """Unit-norm ULA steering vectors, one column per angle.

    Entry ``m`` of the column for angle ``theta`` (measured from broadside) is
    ``exp(2j*pi*d*m*sin(theta)) / sqrt(M)`` with the phase reference at
    element 0.
    """
    m = np.arange(element_count)[:, None]
    s = np.sin(np.deg2rad(np.atleast_1d(np.asarray(angles_deg, dtype=float))))
    return np.exp(2j * np.pi * spacing_wavelengths * m * s[None, :]) / math.sqrt(element_count)


def build_ula_dictionary(element_count: int, spacing_wavelengths: float, grid: AngleGrid) -> Dictionary:
    """Dictionary of normalized ULA steering vectors over ``grid``.

    >>> d = build_ula_dictionary(12, 0.5, AngleGrid(0.0, 30.0, 0.2))
    >>> d.shape
    (12, 151)
    """
    if int(element_count) != element_count or element_count < 2:
        raise ConfigurationError(f"element_count must be an integer >= 2, got {element_count}")
    if not spacing_wavelengths > 0:
        raise ConfigurationError(f"spacing must be positive, got {spacing_wavelengths}")
    angles = grid.angles()
    atoms = steering_vectors(int(element_count), float(spacing_wavelengths), angles)
    return Dictionary(atoms=atoms, grid=angles, spacing_wavelengths=float(spacing_wavelengths))


def identity_dictionary(size: int) -> Dictionary:
    return Dictionary(atoms=np.eye(size, dtype=np.complex128))


def coherence_pair(dictionary: Dictionary):
    """Return ``(coherence, (n, m))`` for the most coherent pair of distinct atoms."""
    if dictionary.n_atoms < 2:
        raise DomainError("mutual coherence needs at least two atoms")
    g = np.abs(dictionary.gram())
    np.fill_diagonal(g, -1.0)
    flat = int(np.argmax(g))
    n, m = divmod(flat, g.shape[1])
    return float(min(g[n, m], 1.0)), (min(n, m), max(n, m))


def mutual_coherence(dictionary: Dictionary) -> float:
    """Largest ``|A_n^H A_m|`` over distinct atoms."""
    return coherence_pair(dictionary)[0]


def cross_correlation_row(dictionary: Dictionary, x) -> np.ndarray:
    """``|A^H x|``, one entry per atom."""
    x = as_complex_vector(x, "x")
    if x.shape[0] != dictionary.element_count:
        raise DomainError(
            f"x has length {x.shape[0]}, dictionary has {dictionary.element_count} rows"
        )
    return np.abs(dictionary.atoms.conj().T @ x)


def export_dictionary_csv(dictionary: Dictionary, path) -> None:
    """Write the atoms as CSV.

    Layout: header ``row,part,<angle or index per atom>``; then two rows per
    array element ``m`` (``part`` = ``re`` then ``im``), one column per atom.
    Values use ``repr`` so they round-trip exactly.
    """
    labels = (
        [repr(float(a)) for a in dictionary.grid]
        if dictionary.grid is not None
        else [str(n) for n in range(dictionary.n_atoms)]
    )
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "part", *labels])
        for m, row in enumerate(dictionary.atoms):
            w.writerow([m, "re", *(repr(float(v)) for v in row.real)])
            w.writerow([m, "im", *(repr(float(v)) for v in row.imag)])


def read_dictionary_csv(path) -> Dictionary:
    """Inverse of :func:`export_dictionary_csv`."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if header[:2] != ["row", "part"] or len(body) % 2:
        raise ConfigurationError(f"{path}: not a dictionary CSV")
    re = np.array([[float(v) for v in r[2:]] for r in body[0::2]])
    im = np.array([[float(v) for v in r[2:]] for r in body[1::2]])
    labels = header[2:]
    try:
        grid = np.array([float(v) for v in labels])
        if np.any(np.diff(grid) <= 0) or all(v.isdigit() for v in labels):
            grid = None
    except ValueError:
        grid = None
    return Dictionary(atoms=re + 1j * im, grid=grid)
