"""Quasi-cyclic Tanner-graph construction and cycle machinery.

A protograph cell holds a list of circulant shifts; an empty list is a zero
block and a list with several distinct shifts is a multi-edge-type cell.
Lifting replaces each shift k by the LxL identity shifted right by k, so a
check i in block-row r couples to variable (i + k) mod L in block-column c.
"""

import math

import numpy as np

from .sparse import SparseSym


class METProtograph:
    """Block description of a QC-LDPC code: per-cell shift lists plus circulant size.

    cells[r][c] is a list of shifts in [0, L); None entries mark shifts left
    free for the lift optimizer (only when allow_unset=True).
    """

    def __init__(self, cells, L, allow_unset=False):
        if L < 1:
            raise ValueError("circulant size must be >= 1")
        if not cells or not cells[0]:
            raise ValueError("empty protograph")
        width = len(cells[0])
        nonempty = 0
        for r, row in enumerate(cells):
            if len(row) != width:
                raise ValueError("ragged protograph rows")
            for c, cell in enumerate(row):
                seen = set()
                for k in cell:
                    if k is None:
                        if not allow_unset:
                            raise ValueError(f"unset shift in cell ({r},{c})")
                        continue
                    if not (0 <= k < L):
                        raise ValueError(f"shift {k} out of range [0,{L}) in cell ({r},{c})")
                    if k in seen:
                        raise ValueError(
                            f"repeated shift {k} in cell ({r},{c}) would create parallel edges")
                    seen.add(k)
                nonempty += bool(cell)
        if nonempty == 0:
            raise ValueError("protograph has no nonzero cell")
        self.cells = [[list(cell) for cell in row] for row in cells]
        self.m_b = len(cells)
        self.n_b = width
        self.L = int(L)

    def weight_matrix(self):
        """Integer matrix of per-cell shift counts (the protograph weights)."""
        return np.array([[len(c) for c in row] for row in self.cells], dtype=int)

    def has_unset(self):
        return any(k is None for row in self.cells for cell in row for k in cell)


class TannerGraph:
    """Bipartite check/variable graph; edges are (check, var) index pairs."""

    def __init__(self, n_checks, n_vars, edges, family_tag="generic"):
        if family_tag not in ("spherical", "toroidal", "generic"):
            raise ValueError(f"unknown family tag {family_tag!r}")
        seen = set()
        for c, v in edges:
            if not (0 <= c < n_checks and 0 <= v < n_vars):
                raise ValueError(f"edge ({c},{v}) out of range")
            if (c, v) in seen:
                raise ValueError(f"duplicate edge ({c},{v})")
            seen.add((c, v))
        self.n_checks = int(n_checks)
        self.n_vars = int(n_vars)
        self.edges = sorted(seen)
        self.family_tag = family_tag

    # Global vertex ids put variables first (0..n_vars-1), checks after.
    def n_vertices(self):
        return self.n_vars + self.n_checks

    def check_id(self, c):
        return self.n_vars + c

    def adjacency_lists(self):
        adj = [[] for _ in range(self.n_vertices())]
        for c, v in self.edges:
            g = self.check_id(c)
            adj[v].append(g)
            adj[g].append(v)
        return [sorted(a) for a in adj]

    def check_degrees(self):
        d = [0] * self.n_checks
        for c, _ in self.edges:
            d[c] += 1
        return d

    def var_degrees(self):
        d = [0] * self.n_vars
        for _, v in self.edges:
            d[v] += 1
        return d


class Cycle:
    """Closed simple cycle in a Tanner graph, stored as a global-vertex sequence."""

    def __init__(self, vertices):
        if len(vertices) < 4 or len(vertices) % 2 != 0:
            raise ValueError("cycle length must be even and >= 4")
        if len(set(vertices)) != len(vertices):
            raise ValueError("repeated vertex in cycle")
        self.vertices = list(vertices)
        self.length = len(vertices)

    def edge_set(self):
        es = set()
        k = self.length
        for idx in range(k):
            a, b = self.vertices[idx], self.vertices[(idx + 1) % k]
            es.add((min(a, b), max(a, b)))
        return frozenset(es)

    def var_nodes(self, g):
        return [v for v in self.vertices if v < g.n_vars]


def lift(proto):
    """Expand a protograph into its lifted Tanner graph.

    Shift k in cell (r, c) contributes edges (r*L + i, c*L + (i + k) mod L)
    for all i, i.e. each circulant is the identity shifted right by k.
    """
    if proto.has_unset():
        raise ValueError("protograph has unset shifts; run the optimizer first")
    L = proto.L
    edges = []
    for r, row in enumerate(proto.cells):
        for c, cell in enumerate(row):
            for k in cell:
                for i in range(L):
                    edges.append((r * L + i, c * L + (i + k) % L))
    tag = {1: "spherical", 2: "toroidal"}.get(proto.m_b, "generic")
    return TannerGraph(proto.m_b * L, proto.n_b * L, edges, family_tag=tag)


def block_cycle_consistent(shifts, L):
    """True iff the alternating shift sum around a block cycle is 0 mod L."""
    if len(shifts) % 2 != 0 or len(shifts) < 4:
        raise ValueError("block cycle needs an even number (>= 4) of shifts")
    alt = sum(a if idx % 2 == 0 else -a for idx, a in enumerate(shifts))
    return alt % L == 0


def girth(g):
    """Length of the shortest cycle, or math.inf if the graph is a forest."""
    adj = g.adjacency_lists()
    n = g.n_vertices()
    best = math.inf
    for root in range(n):
        dist = [-1] * n
        parent = [-1] * n
        dist[root] = 0
        queue = [root]
        while queue:
            nxt = []
            for u in queue:
                for w in adj[u]:
                    if dist[w] == -1:
                        dist[w] = dist[u] + 1
                        parent[w] = u
                        nxt.append(w)
                    elif w != parent[u] and dist[w] >= dist[u]:
                        best = min(best, dist[u] + dist[w] + 1)
            queue = nxt
    return best


def enumerate_cycles(g, max_len):
    """All simple cycles of length <= max_len, each reported once.

    Depth-first search from each anchor vertex, restricted to vertices with
    larger index so every cycle is discovered from its minimum vertex; the
    edge set deduplicates the two traversal directions.
    """
    if max_len % 2 != 0:
        raise ValueError("max_len must be even")
    if max_len > 12:
        raise ValueError("cycle enumeration capped at length 12")
    adj = g.adjacency_lists()
    found = {}

    def dfs(start, path, on_path):
        u = path[-1]
        for w in adj[u]:
            if w == start and len(path) >= 4:
                cyc = Cycle(list(path))
                found.setdefault(cyc.edge_set(), cyc)
            elif w > start and w not in on_path and len(path) < max_len:
                path.append(w)
                on_path.add(w)
                dfs(start, path, on_path)
                on_path.discard(w)
                path.pop()

    for start in range(g.n_vertices()):
        dfs(start, [start], {start})
    return sorted(found.values(), key=lambda c: (c.length, c.vertices))


def ace(cycle, g):
    """Approximate cycle EMD: sum of (degree - 2) over the cycle's variable nodes."""
    graph_edges = {(min(gc, gv), max(gc, gv))
                   for gc, gv in ((g.check_id(c), v) for c, v in g.edges)}
    if not cycle.edge_set() <= graph_edges:
        raise ValueError("cycle is not contained in the graph")
    vdeg = g.var_degrees()
    return sum(vdeg[v] - 2 for v in cycle.var_nodes(g))


def bipartite_adjacency(g):
    """(A, D) for the bipartite graph with variables first, then checks.

    A = [[0, H^T], [H, 0]] with zero diagonal; D holds the row sums of A.
    """
    n = g.n_vertices()
    ent = []
    for c, v in g.edges:
        gc = g.check_id(c)
        ent.append((v, gc, 1.0))
    A = SparseSym(n, ent)
    deg = np.zeros(n)
    for c, v in g.edges:
        deg[v] += 1
        deg[g.check_id(c)] += 1
    D = SparseSym(n, [(i, i, deg[i]) for i in range(n) if deg[i] != 0])
    return A, D


class LiftSearchResult:
    """Outcome of a greedy lift search: best shifts plus achieved quality."""

    def __init__(self, proto, girth_achieved, min_ace_achieved, satisfied, restarts_used):
        self.proto = proto
        self.girth = girth_achieved
        self.min_ace = min_ace_achieved
        self.satisfied = satisfied
        self.restarts_used = restarts_used


def _score_lift(proto, min_girth):
    g = lift(proto)
    gir = girth(g)
    if math.isinf(gir):
        return (math.inf, 0, math.inf), gir, math.inf
    scan = min(int(min_girth) + 4, 12)
    scan -= scan % 2
    cycles = enumerate_cycles(g, scan) if scan >= 4 else []
    n_short = sum(1 for c in cycles if c.length == gir)
    aces = [ace(c, g) for c in cycles if c.length < min_girth + 4]
    min_ace_found = min(aces) if aces else math.inf
    return (gir, -n_short, min_ace_found), gir, min_ace_found


def optimize_lift(proto_pattern, L, min_girth, min_ace, seed,
                  restarts=24, steps=150):
    """Greedy randomized search for shifts meeting girth and ACE targets.

    Hill-climbs single-shift changes under the lexicographic objective
    (girth, -count of minimum-girth cycles, minimum ACE); deterministic per
    seed, first restart reaching the target wins.
    """
    if L < 2:
        raise ValueError("circulant size must be >= 2 for a lift search")
    if proto_pattern.m_b > 8 or proto_pattern.n_b > 8 or L > 64:
        raise ValueError("lift search capped at 8x8 blocks and L <= 64")
    rng = np.random.default_rng(seed)
    free = [(r, c, idx)
            for r, row in enumerate(proto_pattern.cells)
            for c, cell in enumerate(row)
            for idx, k in enumerate(cell) if k is None]

    def build(assign):
        cells = [[list(cell) for cell in row] for row in proto_pattern.cells]
        for (r, c, idx), k in zip(free, assign):
            cells[r][c][idx] = int(k)
        return METProtograph(cells, L)

    def random_assign():
        for _ in range(200):
            assign = [int(rng.integers(0, L)) for _ in free]
            try:
                build(assign)
            except ValueError:
                continue
            return assign
        raise RuntimeError("could not draw a valid shift assignment")

    if not free:
        proto = METProtograph(proto_pattern.cells, L)
        _, gir, mace = _score_lift(proto, min_girth)
        sat = gir >= min_girth and (math.isinf(mace) or mace >= min_ace)
        return LiftSearchResult(proto, gir, mace, sat, 0)

    def meets(gir, mace):
        return gir >= min_girth and (math.isinf(mace) or mace >= min_ace)

    best = None  # (score, assign, gir, mace, restart_index)
    for restart in range(restarts):
        assign = random_assign()
        score, gir, mace = _score_lift(build(assign), min_girth)
        for _ in range(steps):
            if meets(gir, mace):
                break
            pos = int(rng.integers(0, len(free)))
            old = assign[pos]
            assign[pos] = int(rng.integers(0, L))
            try:
                cand_score, cand_g, cand_a = _score_lift(build(assign), min_girth)
            except ValueError:
                assign[pos] = old
                continue
            if cand_score > score:
                score, gir, mace = cand_score, cand_g, cand_a
            else:
                assign[pos] = old
        if best is None or score > best[0]:
            best = (score, list(assign), gir, mace, restart)
        if meets(gir, mace):
            best = (score, list(assign), gir, mace, restart)
            break
    _, assign, gir, mace, restart = best
    return LiftSearchResult(build(assign), gir, mace, meets(gir, mace), restart + 1)


def parse_exponent_text(text):
    """Parse the exponent-matrix text format.

    First non-comment line is `L=<int>`; each later line is one block-row of
    whitespace-separated cells, a cell being `-1` (zero block) or a
    comma-separated shift list.
    """
    L = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if L is None:
            if not line.startswith("L="):
                raise ValueError(f"line {lineno}: expected header 'L=<int>'")
            try:
                L = int(line[2:])
            except ValueError:
                raise ValueError(f"line {lineno}: bad circulant size {line[2:]!r}") from None
            continue
        row = []
        for cellno, tok in enumerate(line.split()):
            if tok == "-1":
                row.append([])
                continue
            try:
                shifts = [int(s) for s in tok.split(",")]
            except ValueError:
                raise ValueError(
                    f"line {lineno}: cell {cellno} is not a shift list: {tok!r}") from None
            for k in shifts:
                if not (0 <= k < L):
                    raise ValueError(
                        f"line {lineno}: cell {cellno} shift {k} outside [0,{L})")
            row.append(shifts)
        rows.append(row)
    if L is None or not rows:
        raise ValueError("missing header or block rows")
    return METProtograph(rows, L)


def read_exponent_file(path):
    with open(path) as fh:
        try:
            return parse_exponent_text(fh.read())
        except ValueError as exc:
            raise ValueError(f"{path}: {exc}") from None


def write_exponent_file(proto, path):
    lines = [f"L={proto.L}"]
    for row in proto.cells:
        lines.append(" ".join(",".join(str(k) for k in cell) if cell else "-1"
                              for cell in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
