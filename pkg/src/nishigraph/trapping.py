"""Topological and spectral invariant panel for trapping-set incidence matrices.

The variable-node graph is the column-interaction graph of the incidence
matrix: adjacency H^T H with its diagonal zeroed, so off-diagonal entry (i, j)
counts the checks shared by variables i and j.
"""

import json

import numpy as np

from .sparse import SparseSym, Spectrum, eig_dense, rank_and_kernel

_NEG_TOL = -1e-8


class TrappingSet:
    """Binary check/variable incidence; a = variable count, b = odd-degree checks."""

    def __init__(self, H):
        H = np.asarray(H, dtype=int)
        if H.ndim != 2 or H.size == 0:
            raise ValueError("nonempty 2-D incidence matrix required")
        if not np.isin(H, (0, 1)).all():
            raise ValueError("incidence entries must be 0/1")
        self.H = H
        self.a = int(H.shape[1])
        self.b = int(np.sum(H.sum(axis=1) % 2 == 1))

    @classmethod
    def from_text(cls, text):
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([int(ch) for ch in line.split()] if " " in line
                        else [int(ch) for ch in line])
        return cls(np.array(rows, dtype=int))

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            return cls.from_text(fh.read())

    @classmethod
    def from_tanner(cls, g, var_indices):
        """Extract the trapping set induced by a variable subset of a Tanner graph."""
        var_indices = sorted(set(var_indices))
        col_of = {v: c for c, v in enumerate(var_indices)}
        rows = {}
        for c, v in g.edges:
            if v in col_of:
                rows.setdefault(c, set()).add(col_of[v])
        H = np.zeros((len(rows), len(var_indices)), dtype=int)
        for r, check in enumerate(sorted(rows)):
            for c in rows[check]:
                H[r, c] = 1
        return cls(H)

    def label(self):
        return f"TS({self.a},{self.b})"


class InvariantReport:
    """One column of the invariant panel for a single trapping set."""

    FIELDS = ("rho", "r_crit", "neg_modes_r1", "genus", "k0", "k1",
              "kervaire", "betti0", "betti1_mod2", "cycle_rank")

    def __init__(self, **kw):
        for f in self.FIELDS:
            setattr(self, f, kw[f])

    def to_dict(self):
        return {f: getattr(self, f) for f in self.FIELDS}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def variable_adjacency(ts):
    """(A_vn, D_vn, L): zero-diagonal H^T H, its degree matrix, and D - A."""
    G = ts.H.T @ ts.H
    A = G.astype(float).copy()
    np.fill_diagonal(A, 0.0)
    d = A.sum(axis=1)
    n = ts.a
    A_s = SparseSym.from_dense(A)
    D_s = SparseSym(n, [(i, i, d[i]) for i in range(n) if d[i] != 0])
    L_s = SparseSym.from_dense(np.diag(d) - A)
    return A_s, D_s, L_s


def spectral_radius(ts):
    """(rho, r_crit): largest eigenvalue magnitude of A_vn and its square root."""
    A, _, _ = variable_adjacency(ts)
    ev = eig_dense(A).eigenvalues
    rho = max(abs(ev[0]), abs(ev[-1])) if ev else 0.0
    return rho, float(np.sqrt(rho))


def betti(ts, tol=1e-8):
    """(betti0, betti1_mod2_formula, cycle_rank).

    betti0 is the Laplacian kernel dimension of the variable-node graph.  The
    second value is the rank-nullity expression n - rank(L) - betti0, exposed
    separately because it is identically zero.  cycle_rank is |E| - |V| + c
    on the bipartite check/variable subgraph itself.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    _, _, L = variable_adjacency(ts)
    rank, kernel = rank_and_kernel(L, tol)
    betti0 = kernel
    betti1_formula = ts.a - rank - betti0
    # bipartite subgraph: variables plus the checks that actually touch them
    H = ts.H
    live_rows = [r for r in range(H.shape[0]) if H[r].any()]
    n_vertices = ts.a + len(live_rows)
    n_edges = int(H.sum())
    parent = list(range(n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for idx, r in enumerate(live_rows):
        for c in range(ts.a):
            if H[r, c]:
                ra, rb = find(ts.a + idx), find(c)
                if ra != rb:
                    parent[ra] = rb
    comps = len({find(x) for x in range(n_vertices)})
    cycle_rank = n_edges - n_vertices + comps
    return betti0, betti1_formula, cycle_rank


def _uniform_bethe_hessian(A_support, beta):
    """Weighted Bethe-Hessian with coupling +1 on every edge of the support."""
    t = np.tanh(beta)
    t2 = t * t
    if t2 >= 1 - 1e-12:
        raise ValueError("couplings saturated: tanh^2(beta) too close to 1")
    n = A_support.shape[0]
    H = np.eye(n)
    c_diag = t2 / (1 - t2)
    c_off = t / (1 - t2)
    for i in range(n):
        for j in range(i + 1, n):
            if A_support[i, j]:
                H[i, i] += c_diag
                H[j, j] += c_diag
                H[i, j] -= c_off
                H[j, i] -= c_off
    return H


def negative_modes(ts, r=1.0):
    """Count of negative eigenvalues of the uniform-coupling Bethe-Hessian at beta=r.

    Couplings are +1 on every edge of the variable-node graph (multiplicities
    ignored); eigenvalues below -1e-8 count as negative.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    A, _, _ = variable_adjacency(ts)
    support = A.to_dense() != 0
    H = _uniform_bethe_hessian(support, r)
    ev = np.linalg.eigvalsh(H)
    return int(np.sum(ev < _NEG_TOL))


def continuous_genus(ts):
    """Scalar twist measure: (sum sqrt(lambda+) - sum sqrt(-lambda-)) / (2 sqrt(n)).

    Computed on the combinatorial Laplacian of the variable-node graph, whose
    spectrum is nonnegative, so the second sum is empty.
    """
    _, _, L = variable_adjacency(ts)
    ev = np.array(eig_dense(L).eigenvalues)
    pos = ev[ev > 1e-12]
    neg = ev[ev < -1e-12]
    return float((np.sqrt(pos).sum() - np.sqrt(-neg).sum()) / (2 * np.sqrt(ts.a)))


def dirac_spectrum(ts):
    """Spectrum of [[0, A_vn], [A_vn^T, 0]]; symmetric about zero."""
    A, _, _ = variable_adjacency(ts)
    Ad = A.to_dense()
    n = ts.a
    D = np.zeros((2 * n, 2 * n))
    D[:n, n:] = Ad
    D[n:, :n] = Ad.T
    return eig_dense(SparseSym.from_dense(D))


def kasparov_k(S, T):
    """(k0, k1) of the block operator [[0, S, T], [S^T, 0, 0], [T^T, 0, 0]].

    k0 is the kernel dimension of the square of the operator (equal to the
    kernel of the operator itself, as it is symmetric); k1 is its rank mod 2.
    """
    S = np.atleast_2d(np.asarray(S, dtype=float))
    T = np.atleast_2d(np.asarray(T, dtype=float))
    if S.shape[0] != T.shape[0]:
        raise ValueError(f"row counts differ: {S.shape[0]} vs {T.shape[0]}")
    a = S.shape[0]
    ms, mt = S.shape[1], T.shape[1]
    n = a + ms + mt
    D = np.zeros((n, n))
    D[:a, a:a + ms] = S
    D[:a, a + ms:] = T
    D[a:a + ms, :a] = S.T
    D[a + ms:, :a] = T.T
    rank, kernel = rank_and_kernel(SparseSym.from_dense(D))
    return kernel, rank % 2


def spanning_forest_incidence(ts):
    """Vertex-by-edge 0/1 incidence of a BFS spanning forest of the variable graph."""
    A, _, _ = variable_adjacency(ts)
    Ad = A.to_dense() != 0
    n = ts.a
    visited = [False] * n
    forest_edges = []
    for root in range(n):
        if visited[root]:
            continue
        visited[root] = True
        queue = [root]
        while queue:
            u = queue.pop(0)
            for w in range(n):
                if Ad[u, w] and not visited[w]:
                    visited[w] = True
                    forest_edges.append((min(u, w), max(u, w)))
                    queue.append(w)
    inc = np.zeros((n, len(forest_edges)), dtype=int)
    for e, (u, w) in enumerate(sorted(forest_edges)):
        inc[u, e] = 1
        inc[w, e] = 1
    return inc


def invariant_panel(ts):
    """Assemble the full invariant panel for one trapping set.

    The block operator uses S = H^T (variables by checks) and T = the
    spanning-forest incidence of the variable-node graph, the orientation
    forced by the equal-row-count requirement.
    """
    rho, r_crit = spectral_radius(ts)
    neg = negative_modes(ts, 1.0)
    genus = continuous_genus(ts)
    k0, k1 = kasparov_k(ts.H.T, spanning_forest_incidence(ts))
    betti0, betti1_formula, cycle_rank = betti(ts)
    return InvariantReport(rho=rho, r_crit=r_crit, neg_modes_r1=neg,
                           genus=genus, k0=k0, k1=k1, kervaire=k1,
                           betti0=betti0, betti1_mod2=betti1_formula,
                           cycle_rank=cycle_rank)
