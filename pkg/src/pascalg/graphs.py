"""Substitution-graph hierarchy: triangle graphs, vertex-to-triangle expansion,
finite quotients of the complete graph, Pascal balls, line graphs, coverings.

Vertices carry hierarchical word addresses over {A, B, C}: the first letter
names the top-level sub-triangle, the last letter the position inside the
deepest cell. The corner labelled X of a level-n triangle graph has address
X^n, and the parent map drops the final letter.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field

LETTERS = ("A", "B", "C")
GAMMA0_LABELS = ("a", "b", "c", "d")


@dataclass(frozen=True)
class VertexAddress:
    side: str = "none"  # "main" | "dual" | "none"
    word: tuple[str, ...] = ()
    root: str = ""  # base vertex name for quotient graphs, "" otherwise
    label: str = ""  # free-form label for derived graphs (line graphs)

    def text(self) -> str:
        if self.label:
            return self.label
        w = "".join(self.word)
        if self.side != "none":
            return f"{self.side}:{w}"
        if self.root:
            return f"{self.root}:{w}" if w else self.root
        return w


@dataclass(frozen=True)
class SubstGraph:
    vertices: tuple[VertexAddress, ...]
    neighbors: tuple[tuple[int, ...], ...]
    boundary: frozenset[int]
    level: int
    kind: str = ""
    parent: tuple[int, ...] | None = None
    parent_graph: "SubstGraph | None" = None

    # -- basic accessors ----------------------------------------------------

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return sum(len(ns) for ns in self.neighbors) // 2

    def edges(self):
        for i, ns in enumerate(self.neighbors):
            for j in ns:
                if i < j:
                    yield (i, j)

    def degree(self, i: int) -> int:
        return len(self.neighbors[i])

    def index(self) -> dict[VertexAddress, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def vertex_id(self, side: str, word: str, root: str = "") -> int:
        return self.index()[VertexAddress(side, tuple(word), root)]

    def fibers(self) -> dict[int, list[int]]:
        """Parent vertex -> list of child vertices (requires parent map)."""
        if self.parent is None:
            raise ValueError("graph has no parent map")
        out: dict[int, list[int]] = {}
        for child, par in enumerate(self.parent):
            out.setdefault(par, []).append(child)
        return out

    # -- structural checks ---------------------------------------------------

    def validate(self) -> None:
        for i, ns in enumerate(self.neighbors):
            if i in ns:
                raise ValueError("self-loop")
            if len(set(ns)) != len(ns):
                raise ValueError("repeated neighbor")
            for j in ns:
                if i not in self.neighbors[j]:
                    raise ValueError("asymmetric adjacency")
            want = 2 if i in self.boundary else 3
            if self.kind != "line" and len(ns) != want:
                raise ValueError(f"vertex {i} has valence {len(ns)}, expected {want}")
        if not is_connected(self):
            raise ValueError("graph not connected")
        if self.parent is not None:
            for par, fiber in self.fibers().items():
                if len(fiber) != 3 or not _is_triangle(self, fiber):
                    raise ValueError(f"fiber of {par} is not a triangle")

    # -- export ---------------------------------------------------------------

    def to_json(self) -> str:
        data = {
            "level": self.level,
            "vertices": [
                {
                    "id": i,
                    "address": v.text(),
                    "side": v.side,
                    "boundary": i in self.boundary,
                }
                for i, v in enumerate(self.vertices)
            ],
            "edges": sorted([i, j] for i, j in self.edges()),
        }
        return json.dumps(data, sort_keys=True, indent=1)

    def to_dot(self) -> str:
        lines = ["graph G {"]
        for i, v in enumerate(self.vertices):
            shape = ', shape="doublecircle"' if i in self.boundary else ""
            lines.append(f'  v{i} [label="{v.text()}"{shape}];')
        for i, j in sorted(self.edges()):
            lines.append(f"  v{i} -- v{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _is_triangle(g: SubstGraph, trio: list[int]) -> bool:
    a, b, c = trio
    return b in g.neighbors[a] and c in g.neighbors[a] and c in g.neighbors[b]


def _build(vertices, edge_set, boundary, level, kind, parent=None, parent_graph=None) -> SubstGraph:
    n = len(vertices)
    ns: list[list[int]] = [[] for _ in range(n)]
    for i, j in edge_set:
        ns[i].append(j)
        ns[j].append(i)
    g = SubstGraph(
        vertices=tuple(vertices),
        neighbors=tuple(tuple(sorted(x)) for x in ns),
        boundary=frozenset(boundary),
        level=level,
        kind=kind,
        parent=tuple(parent) if parent is not None else None,
        parent_graph=parent_graph,
    )
    g.validate()
    return g


# ---------------------------------------------------------------------------
# triangle graphs
# ---------------------------------------------------------------------------


def _triangle_words(n: int) -> list[tuple[str, ...]]:
    return list(itertools.product(LETTERS, repeat=n))


def _triangle_edges(n: int, idx, side: str = "none") -> set[tuple[int, int]]:
    """Adjacency of the level-n triangle graph on word addresses.

    In-cell edges share all but the last letter; gluing edges pair
    u+X+Y^k with u+Y+X^k at every level.
    """
    edges = set()
    for w in _triangle_words(n):
        for x in LETTERS:
            w2 = w[:-1] + (x,)
            if w2 != w:
                e = (idx[(side, w)], idx[(side, w2)])
                edges.add((min(e), max(e)))
    for plen in range(n - 1):
        k = n - plen - 1
        for u in itertools.product(LETTERS, repeat=plen):
            for x, y in itertools.combinations(LETTERS, 2):
                a = idx[(side, u + (x,) + (y,) * k)]
                b = idx[(side, u + (y,) + (x,) * k)]
                edges.add((min(a, b), max(a, b)))
    return edges


def triangle_graph(n: int) -> SubstGraph:
    """Level-n triangle graph: 3^n vertices, 3 boundary corners."""
    if n < 1:
        raise ValueError("triangle level must be >= 1 (level 0 is a point)")
    words = _triangle_words(n)
    vertices = [VertexAddress("none", w) for w in words]
    idx = {("none", w): i for i, w in enumerate(words)}
    edges = _triangle_edges(n, idx)
    boundary = [idx[("none", (x,) * n)] for x in LETTERS]
    parent = None
    parent_graph = None
    if n >= 2:
        parent_graph = triangle_graph(n - 1)
        pidx = {v.word: i for i, v in enumerate(parent_graph.vertices)}
        parent = [pidx[w[:-1]] for w in words]
    return _build(vertices, edges, boundary, n, "triangle", parent, parent_graph)


def pascal_ball(m: int) -> SubstGraph:
    """Two level-m triangle graphs joined at their A-corners (the apexes).

    2*3^m vertices; the 4 corners away from the apex edge have valence 2 and
    are the truncation boundary.
    """
    if m < 1:
        raise ValueError("ball radius exponent must be >= 1")
    words = _triangle_words(m)
    vertices = [VertexAddress(side, w) for side in ("main", "dual") for w in words]
    idx = {(v.side, v.word): i for i, v in enumerate(vertices)}
    edges = _triangle_edges(m, idx, "main") | _triangle_edges(m, idx, "dual")
    apex_m = idx[("main", ("A",) * m)]
    apex_d = idx[("dual", ("A",) * m)]
    edges.add((min(apex_m, apex_d), max(apex_m, apex_d)))
    boundary = [idx[(s, (x,) * m)] for s in ("main", "dual") for x in ("B", "C")]
    parent = None
    parent_graph = None
    if m >= 2:
        parent_graph = pascal_ball(m - 1)
        pidx = {(v.side, v.word): i for i, v in enumerate(parent_graph.vertices)}
        parent = [pidx[(v.side, v.word[:-1])] for v in vertices]
    return _build(vertices, edges, boundary, m, "ball", parent, parent_graph)


def apexes(ball: SubstGraph) -> tuple[int, int]:
    idx = ball.index()
    w = ("A",) * ball.level
    return idx[VertexAddress("main", w)], idx[VertexAddress("dual", w)]


def safety_radius(ball: SubstGraph) -> int:
    """Vertices within this distance of the apex edge see true infinite-graph
    neighborhoods (conservative bound; the corners sit at distance 2^m - 1)."""
    return 2 ** (ball.level - 1)


# ---------------------------------------------------------------------------
# vertex-to-triangle expansion (the "replace every vertex by a triangle" step)
# ---------------------------------------------------------------------------


def _child_letter(g: SubstGraph, p: int, q: int) -> str:
    """Letter assigned to the child of p facing q.

    For word-addressed graphs this is the first letter of q's word past the
    common prefix with p's word, which reproduces the canonical triangle
    addressing; otherwise letters follow sorted neighbor order.
    """
    vp, vq = g.vertices[p], g.vertices[q]
    if vp.word and vq.word:
        if vp.side == vq.side and vp.root == vq.root:
            k = 0
            while k < len(vp.word) and vp.word[k] == vq.word[k]:
                k += 1
            if k < len(vq.word):
                return vq.word[k]
        else:
            # cross-component edge (the apex edge of a ball): both are
            # A-corners, keep the A direction
            return vq.word[0]
    order = sorted(g.neighbors[p], key=lambda r: (g.vertices[r].root, g.vertices[r].side, g.vertices[r].word))
    return LETTERS[order.index(q)]


def hat(g: SubstGraph) -> SubstGraph:
    """Replace every vertex by a triangle; boundary vertices keep a copy of
    themselves. Fibers of the parent map are exactly the triangles of the
    result."""
    for i in range(len(g)):
        if g.degree(i) not in (2, 3):
            raise ValueError("expansion needs valence 2 or 3 everywhere")
    children: dict[tuple[int, str], int] = {}
    vertices: list[VertexAddress] = []
    parent: list[int] = []
    child_of: dict[tuple[int, int], int] = {}  # (p, q) -> child of p facing q
    self_child: dict[int, int] = {}

    def add(p: int, letter: str) -> int:
        vp = g.vertices[p]
        vid = len(vertices)
        vertices.append(VertexAddress(vp.side, vp.word + (letter,), vp.root))
        parent.append(p)
        return vid

    for p in range(len(g)):
        vp = g.vertices[p]
        letters_used = {}
        if p in g.boundary:
            letters_used[vp.word[-1] if vp.word else "A"] = ("self", p)
        proposals = [(q, _child_letter(g, p, q)) for q in g.neighbors[p]]
        if len({letter for _, letter in proposals} | set(letters_used)) < len(proposals) + len(letters_used):
            # address-derived letters clash (possible for quotient graphs,
            # where letters are cosmetic); fall back to sorted order
            order = sorted(
                g.neighbors[p],
                key=lambda r: (g.vertices[r].root, g.vertices[r].side, g.vertices[r].word),
            )
            free = [x for x in LETTERS if x not in letters_used]
            proposals = list(zip(order, free))
        for q, letter in proposals:
            letters_used[letter] = ("pair", q)
        for letter in sorted(letters_used):
            tag, q = letters_used[letter]
            vid = add(p, letter)
            if tag == "self":
                self_child[p] = vid
            else:
                child_of[(p, q)] = vid
        children[p] = None  # placeholder to keep insertion order obvious

    edges = set()

    def link(a: int, b: int) -> None:
        edges.add((min(a, b), max(a, b)))

    for p in range(len(g)):
        fiber = [v for v in range(len(vertices)) if parent[v] == p]
        for a, b in itertools.combinations(fiber, 2):
            link(a, b)
    for p, q in g.edges():
        link(child_of[(p, q)], child_of[(q, p)])

    boundary = [self_child[p] for p in g.boundary]
    # canonical vertex order: sort by address, remap
    side_rank = {"none": 0, "main": 1, "dual": 2}
    order = sorted(
        range(len(vertices)),
        key=lambda v: (vertices[v].root, side_rank[vertices[v].side], vertices[v].word),
    )
    remap = {old: new for new, old in enumerate(order)}
    vertices2 = [vertices[o] for o in order]
    edges2 = {(min(remap[a], remap[b]), max(remap[a], remap[b])) for a, b in edges}
    parent2 = [parent[o] for o in order]
    boundary2 = [remap[b] for b in boundary]
    return _build(vertices2, edges2, boundary2, g.level + 1, g.kind, parent2, g)


# ---------------------------------------------------------------------------
# finite quotients of the complete graph on four labels
# ---------------------------------------------------------------------------


def complete_graph_k4() -> SubstGraph:
    vertices = [VertexAddress("none", (), root=r) for r in GAMMA0_LABELS]
    edges = {(i, j) for i in range(4) for j in range(i + 1, 4)}
    return _build(vertices, edges, [], 0, "gamma")


def gamma_graph(n: int) -> SubstGraph:
    """n-fold vertex-to-triangle expansion of the complete graph on 4 vertices:
    4*3^n vertices, 3-regular, no boundary."""
    g = complete_graph_k4()
    for _ in range(n):
        g = hat(g)
    return g


# ---------------------------------------------------------------------------
# line graph
# ---------------------------------------------------------------------------


def line_graph(g: SubstGraph) -> SubstGraph:
    """Vertices are the edges of g; two edges are adjacent when they share an
    endpoint."""
    edge_list = sorted(g.edges())
    eidx = {e: i for i, e in enumerate(edge_list)}
    vertices = [
        VertexAddress(label=f"{g.vertices[a].text()}~{g.vertices[b].text()}")
        for a, b in edge_list
    ]
    edges = set()
    for v in range(len(g)):
        incident = sorted(
            eidx[(min(v, w), max(v, w))] for w in g.neighbors[v]
        )
        for a, b in itertools.combinations(incident, 2):
            edges.add((a, b))
    # boundary: anything of valence < 4 (only near truncation corners)
    n = len(edge_list)
    deg = [0] * n
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    boundary = [i for i in range(n) if deg[i] < 4]
    return _build(vertices, edges, boundary, g.level, "line")


def line_vertex_map(g: SubstGraph) -> dict[tuple[int, int], int]:
    return {e: i for i, e in enumerate(sorted(g.edges()))}


# ---------------------------------------------------------------------------
# distances, bipartiteness, automorphisms
# ---------------------------------------------------------------------------


def bfs_distances(g: SubstGraph, sources) -> list[int]:
    dist = [-1] * len(g)
    q = deque()
    for s in sources:
        dist[s] = 0
        q.append(s)
    while q:
        v = q.popleft()
        for w in g.neighbors[v]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                q.append(w)
    return dist


def is_connected(g: SubstGraph) -> bool:
    if len(g) == 0:
        return True
    return min(bfs_distances(g, [0])) >= 0


def graph_distance(g: SubstGraph, a: int, b: int) -> int:
    return bfs_distances(g, [a])[b]


def is_partageable(g: SubstGraph):
    """Bipartiteness test. Returns (True, (part0, part1)) with the unique
    partition, or (False, None)."""
    if not is_connected(g):
        raise ValueError("input must be connected")
    color = [-1] * len(g)
    color[0] = 0
    q = deque([0])
    while q:
        v = q.popleft()
        for w in g.neighbors[v]:
            if color[w] < 0:
                color[w] = 1 - color[v]
                q.append(w)
            elif color[w] == color[v]:
                return False, None
    p0 = frozenset(i for i, c in enumerate(color) if c == 0)
    p1 = frozenset(i for i, c in enumerate(color) if c == 1)
    return True, (p0, p1)


def automorphism_from_corner_perm(g: SubstGraph, perm: dict[str, str]) -> list[int]:
    """Automorphism of a triangle graph induced by a permutation of {A, B, C},
    acting letterwise on addresses."""
    if g.kind != "triangle":
        raise ValueError("corner permutations act on triangle graphs")
    if sorted(perm) != list(LETTERS) or sorted(perm.values()) != list(LETTERS):
        raise ValueError("not a permutation of A, B, C")
    idx = g.index()
    out = []
    for v in g.vertices:
        image = VertexAddress(v.side, tuple(perm[x] for x in v.word), v.root)
        out.append(idx[image])
    for a, b in g.edges():
        if out[b] not in g.neighbors[out[a]]:
            raise AssertionError("letterwise map failed to preserve an edge")
    return out


def automorphism_count(g: SubstGraph) -> int:
    """Brute-force count of graph automorphisms (small graphs only)."""
    n = len(g)
    degs = [g.degree(i) for i in range(n)]
    order = sorted(range(n), key=lambda v: -degs[v])
    count = 0

    def extend(k: int, image: dict[int, int], used: set[int]) -> int:
        nonlocal count
        if k == n:
            count += 1
            return count
        v = order[k]
        for w in range(n):
            if w in used or degs[w] != degs[v]:
                continue
            ok = True
            for u in g.neighbors[v]:
                if u in image and image[u] not in g.neighbors[w]:
                    ok = False
                    break
            if not ok:
                continue
            for u in image:
                if u not in g.neighbors[v] and image[u] in g.neighbors[w]:
                    ok = False
                    break
            if ok:
                image[v] = w
                used.add(w)
                extend(k + 1, image, used)
                del image[v]
                used.discard(w)
        return count

    return extend(0, {}, set())


# ---------------------------------------------------------------------------
# coverings onto the complete graph on {a, b, c, d}
# ---------------------------------------------------------------------------


class CoveringError(ValueError):
    pass


@dataclass
class CoveringMap:
    target_labels: dict[int, str] = field(default_factory=dict)

    def check(self, g: SubstGraph) -> None:
        for v in range(len(g)):
            lv = self.target_labels[v]
            seen = {self.target_labels[w] for w in g.neighbors[v]}
            if lv in seen or len(seen) != len(g.neighbors[v]):
                raise CoveringError(f"local bijection fails at vertex {v}")
            if v not in g.boundary and seen != set(GAMMA0_LABELS) - {lv}:
                raise CoveringError(f"interior vertex {v} misses a label")


def _propagate(g: SubstGraph, assign: dict[int, str]) -> dict[int, str] | None:
    """Arc-consistency propagation of covering labels; None on contradiction."""
    cand = {v: set(GAMMA0_LABELS) for v in range(len(g))}
    for v, lab in assign.items():
        cand[v] = {lab}
    changed = True
    while changed:
        changed = False
        for v in range(len(g)):
            if len(cand[v]) == 1:
                lv = next(iter(cand[v]))
                for w in g.neighbors[v]:
                    if lv in cand[w]:
                        cand[w] = cand[w] - {lv}
                        if not cand[w]:
                            return None
                        changed = True
                if v not in g.boundary:
                    # neighbor labels are exactly the other three: any label
                    # possible at only one neighbor is forced there
                    ns = list(g.neighbors[v])
                    fixed = {next(iter(cand[w])) for w in ns if len(cand[w]) == 1}
                    if len(fixed) < len([w for w in ns if len(cand[w]) == 1]):
                        return None
                    for lab in set(GAMMA0_LABELS) - {lv}:
                        spots = [w for w in ns if lab in cand[w]]
                        if not spots:
                            return None
                        if len(spots) == 1 and len(cand[spots[0]]) > 1:
                            cand[spots[0]] = {lab}
                            changed = True
            # two fixed distinct neighbor labels of a fixed interior vertex
            # force the third neighbor
    out = {}
    for v, c in cand.items():
        if len(c) != 1:
            return {"_open": True, "cand": cand}  # type: ignore[return-value]
        out[v] = next(iter(c))
    return out


def enumerate_coverings(g: SubstGraph, anchors: dict[int, str]) -> list[CoveringMap]:
    """All covering labelings extending the anchors (backtracking search with
    propagation)."""
    results: list[CoveringMap] = []

    def search(assign: dict[int, str]) -> None:
        res = _propagate(g, assign)
        if res is None:
            return
        if "_open" not in res:
            cm = CoveringMap(res)  # type: ignore[arg-type]
            try:
                cm.check(g)
            except CoveringError:
                return
            if all(cm.target_labels != r.target_labels for r in results):
                results.append(cm)
            return
        cand = res["cand"]  # type: ignore[index]
        v = min((x for x in cand if len(cand[x]) > 1), key=lambda x: len(cand[x]))
        for lab in sorted(cand[v]):
            nxt = {u: next(iter(c)) for u, c in cand.items() if len(c) == 1}
            nxt[v] = lab
            search(nxt)

    search(dict(anchors))
    return results


def covering_to_gamma0(g: SubstGraph, anchors: dict[int, str]) -> CoveringMap:
    """The unique covering onto the complete 4-vertex graph extending the
    anchors. Raises CoveringError if none or several exist."""
    found = enumerate_coverings(g, anchors)
    if not found:
        raise CoveringError("no covering extends the anchors")
    if len(found) > 1:
        raise CoveringError(f"{len(found)} coverings extend the anchors")
    return found[0]
