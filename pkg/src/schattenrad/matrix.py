"""Dense complex matrices, block constructions and seeded generators.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. None of the
functions here modify their arguments.

Random matrices come from a Philox (counter-based) bit generator keyed by
``numpy.random.SeedSequence(seed)``, so a ``(kind, n, seed)`` triple maps to
the same matrix on every platform numpy supports.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

KINDS = ("ginibre", "hermitian", "unitary", "nilpotent_upper", "scaled_ginibre")


class MatrixFormatError(ValueError):
    """A matrix file or literal does not follow the expected schema."""


def as_matrix(a, *, square: bool = False, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    if square and m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    return m


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T.copy()


def re_part(a) -> np.ndarray:
    """Hermitian part ``(A + A*)/2``."""
    m = as_matrix(a, square=True)
    return (m + m.conj().T) / 2


def im_part(a) -> np.ndarray:
    """Skew part ``(A - A*)/(2i)``; Hermitian, and ``A = re_part(A) + 1j*im_part(A)``."""
    m = as_matrix(a, square=True)
    return (m - m.conj().T) / 2j


def rotate(a, theta: float) -> np.ndarray:
    return np.exp(1j * theta) * as_matrix(a)


def direct_sum(a, b) -> np.ndarray:
    a = as_matrix(a, square=True, name="A")
    b = as_matrix(b, square=True, name="B")
    na, nb = a.shape[0], b.shape[0]
    out = np.zeros((na + nb, na + nb), dtype=np.complex128)
    out[:na, :na] = a
    out[na:, na:] = b
    return out


def block2(a11, a12, a21, a22) -> np.ndarray:
    """Assemble ``[[A11, A12], [A21, A22]]`` from four square blocks of equal size."""
    blocks = [as_matrix(x, square=True, name=f"A{ij}") for x, ij in
              zip((a11, a12, a21, a22), ("11", "12", "21", "22"))]
    n = blocks[0].shape[0]
    if any(blk.shape != (n, n) for blk in blocks):
        raise ValueError("block2 needs four square blocks of the same size, got "
                         + ", ".join(str(blk.shape) for blk in blocks))
    return np.block([[blocks[0], blocks[1]], [blocks[2], blocks[3]]])


def off_diag(a, b) -> np.ndarray:
    """The off-diagonal block matrix ``[[0, A], [B, 0]]``."""
    a = as_matrix(a, square=True, name="A")
    b = as_matrix(b, square=True, name="B")
    if a.shape != b.shape:
        raise ValueError(f"off_diag blocks differ in size: {a.shape} vs {b.shape}")
    z = np.zeros_like(a)
    return block2(z, a, b, z)


@dataclass(frozen=True)
class BlockPartition:
    """Split of an ``(grid*block_dim)``-square matrix into ``grid**2`` square blocks."""

    grid: int
    block_dim: int

    def __post_init__(self):
        if self.grid < 1 or self.block_dim < 1:
            raise ValueError(f"grid and block_dim must be positive, got {self.grid}, {self.block_dim}")

    @property
    def size(self) -> int:
        return self.grid * self.block_dim


def extract_blocks(t, part: BlockPartition) -> list[list[np.ndarray]]:
    t = as_matrix(t, square=True, name="T")
    if t.shape[0] != part.size:
        raise ValueError(f"T has size {t.shape[0]}, partition expects {part.size}")
    m = part.block_dim
    return [[t[i * m:(i + 1) * m, j * m:(j + 1) * m].copy() for j in range(part.grid)]
            for i in range(part.grid)]


def assemble_blocks(grid: list[list[np.ndarray]]) -> np.ndarray:
    return np.block([[np.asarray(b, dtype=np.complex128) for b in row] for row in grid])


# -- random generators ------------------------------------------------------

def _rng(seed: int) -> np.random.Generator:
    if not 0 <= int(seed) < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def _ginibre(rng: np.random.Generator, n: int) -> np.ndarray:
    # real and imaginary parts each have variance 1/2
    z = rng.standard_normal((2, n, n)) * np.sqrt(0.5)
    return z[0] + 1j * z[1]


def random_matrix(kind: str, n: int, seed: int, sigma: float = 1.0) -> np.ndarray:
    """Deterministic random ``n x n`` matrix of the given kind.

    ``kind`` is one of ``ginibre``, ``hermitian``, ``unitary``,
    ``nilpotent_upper`` or ``scaled_ginibre`` (Ginibre times ``sigma``).
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if kind not in KINDS:
        raise ValueError(f"unknown generator kind {kind!r}; expected one of {KINDS}")
    g = _ginibre(_rng(seed), n)
    if kind == "ginibre":
        return g
    if kind == "scaled_ginibre":
        return sigma * g
    if kind == "hermitian":
        return (g + g.conj().T) / 2
    if kind == "nilpotent_upper":
        return np.triu(g, k=1)
    # Haar unitary: QR with the phases of R's diagonal pushed back into Q
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    ph = np.where(d == 0, 1.0, d / np.abs(d))
    return q * ph


def child_seed(seed: int, index: int) -> int:
    """Stable 64-bit seed for the ``index``-th input drawn under ``seed``."""
    h = hashlib.blake2b(f"{int(seed)}:{int(index)}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


# -- JSON matrix files -----------------------------------------------------

def matrix_to_json(a) -> dict:
    m = as_matrix(a)
    return {
        "rows": m.shape[0],
        "cols": m.shape[1],
        "data": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def matrix_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise MatrixFormatError("matrix file must hold a JSON object")
    for key in ("rows", "cols", "data"):
        if key not in obj:
            raise MatrixFormatError(f"missing field {key!r}")
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if not (isinstance(rows, int) and rows >= 1):
        raise MatrixFormatError(f"field 'rows' must be a positive integer, got {rows!r}")
    if not (isinstance(cols, int) and cols >= 1):
        raise MatrixFormatError(f"field 'cols' must be a positive integer, got {cols!r}")
    if not isinstance(data, list) or len(data) != rows:
        raise MatrixFormatError(f"field 'data' must be a list of {rows} rows")
    out = np.empty((rows, cols), dtype=np.complex128)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise MatrixFormatError(f"field 'data' row {i} must hold {cols} entries")
        for j, z in enumerate(row):
            if (not isinstance(z, list) or len(z) != 2
                    or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in z)):
                raise MatrixFormatError(f"field 'data' entry [{i}][{j}] must be [re, im]")
            out[i, j] = complex(z[0], z[1])
    if not np.all(np.isfinite(out)):
        raise MatrixFormatError("field 'data' has non-finite entries")
    return out


def load_matrix(path) -> np.ndarray:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"{path}: not valid JSON ({exc})") from exc
    return matrix_from_json(obj)


def save_matrix(a, path) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(a)) + "\n")
