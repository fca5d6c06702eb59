"""Sparse symmetric matrices and extremal eigenvalue routines.

Only the upper triangle is stored; symmetry is by construction.  A dense
eigendecomposition path serves as the verification oracle for the iterative
smallest-eigenvalue solver used everywhere else.
"""

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

_DENSE_CAP = 2000
_ARPACK_MAXITER = 50000


class SparseSym:
    """Symmetric real matrix stored as upper-triangle COO entries.

    entries is a list of (i, j, value) with i <= j; duplicates are rejected.
    """

    def __init__(self, n, entries):
        if n < 0:
            raise ValueError("negative dimension")
        seen = set()
        clean = []
        for i, j, v in entries:
            i, j, v = int(i), int(j), float(v)
            if i > j:
                i, j = j, i
            if not (0 <= i <= j < n):
                raise ValueError(f"entry ({i},{j}) out of range for n={n}")
            if (i, j) in seen:
                raise ValueError(f"duplicate entry ({i},{j})")
            seen.add((i, j))
            clean.append((i, j, v))
        self.n = n
        self.entries = clean

    @classmethod
    def from_dense(cls, M, tol=0.0):
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("square matrix required")
        if not np.allclose(M, M.T, atol=1e-12):
            raise ValueError("matrix is not symmetric")
        n = M.shape[0]
        ent = [(i, j, M[i, j]) for i in range(n) for j in range(i, n)
               if abs(M[i, j]) > tol]
        return cls(n, ent)

    @classmethod
    def identity(cls, n):
        return cls(n, [(i, i, 1.0) for i in range(n)])

    @classmethod
    def zeros(cls, n):
        return cls(n, [])

    def to_dense(self):
        M = np.zeros((self.n, self.n))
        for i, j, v in self.entries:
            M[i, j] = v
            if i != j:
                M[j, i] = v
        return M

    def to_csr(self):
        if not self.entries:
            return sp.csr_matrix((self.n, self.n))
        rows, cols, vals = [], [], []
        for i, j, v in self.entries:
            rows.append(i); cols.append(j); vals.append(v)
            if i != j:
                rows.append(j); cols.append(i); vals.append(v)
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.n, self.n))

    def diagonal(self):
        d = np.zeros(self.n)
        for i, j, v in self.entries:
            if i == j:
                d[i] = v
        return d

    def __eq__(self, other):
        return (isinstance(other, SparseSym) and self.n == other.n
                and sorted(self.entries) == sorted(other.entries))

    def __repr__(self):
        return f"SparseSym(n={self.n}, nnz={len(self.entries)})"


class Spectrum:
    """Full sorted eigenvalue list with the absolute resolution it was computed at."""

    def __init__(self, eigenvalues, tolerance):
        ev = sorted(float(x) for x in eigenvalues)
        self.eigenvalues = ev
        self.tolerance = float(tolerance)

    def __len__(self):
        return len(self.eigenvalues)

    def min(self):
        return self.eigenvalues[0]

    def max(self):
        return self.eigenvalues[-1]


def lambda_min(M, tol=1e-10):
    """Smallest eigenvalue of a SparseSym, within +-tol.

    Small systems use the dense path directly.  Larger ones use shift-invert
    Lanczos with the shift placed one unit below the Gershgorin lower bound,
    so the target eigenvalue is always the one nearest the shift.  The
    starting vector is fixed (normalized all-ones) for reproducibility.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if M.n == 0:
        raise ValueError("empty matrix has no eigenvalues")
    if M.n <= 8:
        return float(np.linalg.eigvalsh(M.to_dense())[0])
    A = M.to_csr().tocsc()
    # Gershgorin: min_i (a_ii - sum_{j != i} |a_ij|) bounds the spectrum below.
    diag = A.diagonal()
    absrow = np.abs(A).sum(axis=1).A1 - np.abs(diag)
    sigma = float(np.min(diag - absrow)) - 1.0
    v0 = np.ones(M.n) / np.sqrt(M.n)
    try:
        vals = spla.eigsh(A, k=1, sigma=sigma, which="LM", v0=v0,
                          tol=tol, maxiter=_ARPACK_MAXITER,
                          return_eigenvectors=False)
    except spla.ArpackNoConvergence as exc:
        raise RuntimeError(
            f"eigensolver failed to converge within {_ARPACK_MAXITER} iterations"
        ) from exc
    return float(vals[0])


def eig_dense(M):
    """Full spectrum by dense symmetric eigendecomposition (oracle path)."""
    if M.n > _DENSE_CAP:
        raise ValueError(f"dense path capped at n={_DENSE_CAP}")
    if M.n == 0:
        return Spectrum([], 0.0)
    ev = np.linalg.eigvalsh(M.to_dense())
    scale = max(1.0, float(np.max(np.abs(ev))))
    return Spectrum(ev, 1e-9 * scale)


def rank_and_kernel(M, tol=None):
    """(rank, kernel_dim) from the eigenvalue magnitudes; rank + kernel = n.

    tol=None uses 1e-8 times the largest eigenvalue magnitude (scale-free).
    """
    if tol is not None and tol <= 0:
        raise ValueError("tol must be positive")
    if M.n == 0:
        return (0, 0)
    ev = np.array(eig_dense(M).eigenvalues)
    if tol is None:
        scale = float(np.max(np.abs(ev))) if len(ev) else 0.0
        tol = 1e-8 * scale if scale > 0 else 1e-12
    kernel = int(np.sum(np.abs(ev) < tol))
    return (M.n - kernel, kernel)


def write_matrix_market(M, path):
    """Write a SparseSym in Matrix Market symmetric coordinate format (1-based)."""
    lines = ["%%MatrixMarket matrix coordinate real symmetric"]
    lines.append(f"{M.n} {M.n} {len(M.entries)}")
    for i, j, v in sorted(M.entries):
        # store lower triangle as MM symmetric convention expects row >= col
        lines.append(f"{j + 1} {i + 1} {v!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix_market(path):
    """Read a symmetric Matrix Market coordinate file into a SparseSym."""
    with open(path) as fh:
        header = fh.readline()
        if "matrixmarket" not in header.lower() or "symmetric" not in header.lower():
            raise ValueError(f"{path}: not a symmetric MatrixMarket file")
        line = fh.readline()
        while line.startswith("%"):
            line = fh.readline()
        nrow, ncol, nnz = (int(x) for x in line.split())
        if nrow != ncol:
            raise ValueError(f"{path}: non-square matrix")
        entries = []
        for _ in range(nnz):
            parts = fh.readline().split()
            r, c = int(parts[0]) - 1, int(parts[1]) - 1
            entries.append((min(r, c), max(r, c), float(parts[2])))
    return SparseSym(nrow, entries)
