"""Binomial-parity plane model of the Pascal graph.

Cells are the lattice positions carrying an odd binomial coefficient in the
two-triangle configuration anchored at (0,0) and (1,0). Each present cell
belongs to exactly one triangle whose shape determines the cell's type
(a, b or c); contracting every triangle to its even-coordinate head halves
the configuration and realizes the parent map in the plane.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import graphs as G

DIRECTIONS = {
    "T": (1, 0),
    "S": (0, 1),
    "T-1S": (-1, 1),
    "T-1": (-1, 0),
    "S-1": (0, -1),
    "TS-1": (1, -1),
}
DIR_BY_VEC = {v: k for k, v in DIRECTIONS.items()}

# (type, external direction) classes and the six symmetries ----------------

S3_MATRICES = {
    "e": ((1, 0), (0, 1)),
    "i": ((-1, -1), (0, 1)),
    "r": ((0, 1), (-1, -1)),
    "r2": ((-1, -1), (1, 0)),
    "ri": ((0, 1), (1, 0)),
    "ir": ((1, 0), (-1, -1)),
}
# permutation of the three types induced by each symmetry (images of a,b,c)
S3_TYPE_PERM = {
    "e": ("a", "b", "c"),
    "i": ("b", "a", "c"),
    "r": ("c", "a", "b"),
    "r2": ("b", "c", "a"),
    "ri": ("a", "c", "b"),
    "ir": ("c", "b", "a"),
}


def s3_apply(name: str, cell: tuple[int, int]) -> tuple[int, int]:
    (m00, m01), (m10, m11) = S3_MATRICES[name]
    x, y = cell
    return (m00 * x + m01 * y, m10 * x + m11 * y)


def s3_compose(g: str, h: str) -> str:
    """g*h acts as: apply h, then g."""
    gm, hm = S3_MATRICES[g], S3_MATRICES[h]
    prod = tuple(
        tuple(sum(gm[i][k] * hm[k][j] for k in range(2)) for j in range(2)) for i in range(2)
    )
    for name, m in S3_MATRICES.items():
        if m == prod:
            return name
    raise AssertionError("not closed")


@dataclass(frozen=True)
class BrechetId:
    triangle_type: str  # 'a' | 'b' | 'c'
    external_dir: str  # one of DIRECTIONS


class NotInModelError(ValueError):
    pass


# ---------------------------------------------------------------------------
# presence and local classification
# ---------------------------------------------------------------------------


def cell_present(x: int, y: int) -> bool:
    """Cell value of the base two-triangle configuration."""
    if y > 0:
        return False
    if x <= 0:
        k, l = -x, -y
        return (k & l) == 0  # odd binomial iff no carries
    k, l = x + y - 1, -y
    if k < 0:
        return False
    return (k & l) == 0


def presence_for(symmetry: str = "e"):
    """Presence predicate of the symmetry-transformed configuration."""
    if symmetry == "e":
        return cell_present
    inv = next(n for n in S3_MATRICES if s3_compose(symmetry, n) == "e")

    def present(x: int, y: int) -> bool:
        return cell_present(*s3_apply(inv, (x, y)))

    return present


_TYPE_PATTERNS = {
    "a": ((-1, 0), (0, -1)),
    "b": ((1, 0), (1, -1)),
    "c": ((0, 1), (-1, 1)),
}


def cell_type(cell: tuple[int, int], present=cell_present) -> str:
    """Type of the triangle containing the cell (exactly one pattern fits)."""
    x, y = cell
    if not present(x, y):
        raise NotInModelError(f"cell {cell} absent")
    hits = [
        t
        for t, (d1, d2) in _TYPE_PATTERNS.items()
        if present(x + d1[0], y + d1[1]) and present(x + d2[0], y + d2[1])
    ]
    if len(hits) != 1:
        raise NotInModelError(f"cell {cell} matches {hits}")
    return hits[0]


def triangle_cells(cell: tuple[int, int], present=cell_present) -> tuple[tuple[int, int], ...]:
    t = cell_type(cell, present)
    d1, d2 = _TYPE_PATTERNS[t]
    x, y = cell
    return (cell, (x + d1[0], y + d1[1]), (x + d2[0], y + d2[1]))


def contract_cell(cell: tuple[int, int], present=cell_present) -> tuple[int, int]:
    """Parent cell: the even-coordinate head of the containing triangle, halved."""
    for c in triangle_cells(cell, present):
        if c[0] % 2 == 0 and c[1] % 2 == 0:
            return (c[0] // 2, c[1] // 2)
    raise NotInModelError(f"triangle of {cell} has no even-coordinate head")


def plane_contract(cells: set[tuple[int, int]], present=cell_present):
    """Classify each cell and contract one level.

    Returns (parent cell set, {cell: (type, parent cell)}).
    """
    info = {}
    parents = set()
    for c in sorted(cells):
        t = cell_type(c, present)
        p = contract_cell(c, present)
        info[c] = (t, p)
        parents.add(p)
    return parents, info


def external_neighbor(cell: tuple[int, int], present=cell_present) -> tuple[int, int]:
    tri = set(triangle_cells(cell, present))
    x, y = cell
    ext = [
        (x + d[0], y + d[1])
        for d in DIRECTIONS.values()
        if present(x + d[0], y + d[1]) and (x + d[0], y + d[1]) not in tri
    ]
    if len(ext) != 1:
        raise NotInModelError(f"cell {cell} has {len(ext)} external neighbors")
    return ext[0]


def brechet_of(cell: tuple[int, int], present=cell_present) -> BrechetId:
    t = cell_type(cell, present)
    ext = external_neighbor(cell, present)
    vec = (ext[0] - cell[0], ext[1] - cell[1])
    return BrechetId(t, DIR_BY_VEC[vec])


def brechet_classes() -> dict[str, BrechetId]:
    """The six admissible (type, direction) classes as the symmetry orbit of
    the base class at (0,0)."""
    base = brechet_of((0, 0))
    out = {}
    for s in S3_MATRICES:
        t = S3_TYPE_PERM[s]["abc".index(base.triangle_type)]
        vec = s3_apply(s, DIRECTIONS[base.external_dir])
        out[s] = BrechetId(t, DIR_BY_VEC[vec])
    return out


def alpha_pairing() -> dict[str, str]:
    """Pairing of the six classes by crossing the external edge, derived from
    the plane configuration (one sample cell per class, symmetry-transported)."""
    classes = brechet_classes()
    by_class = {v: k for k, v in classes.items()}
    pairing: dict[str, str] = {}
    for s in S3_MATRICES:
        present = presence_for(s)
        cell = s3_apply(s, (0, 0))  # = (0,0); the transformed config moves around it
        b = brechet_of(cell, present)
        assert b == classes[s], "symmetry transport failed"
        ext = external_neighbor(cell, present)
        pairing[s] = by_class[brechet_of(ext, present)]
    for k, v in pairing.items():
        if pairing[v] != k or v == k:
            raise AssertionError("external pairing is not a fixed-point-free involution")
    return pairing


# ---------------------------------------------------------------------------
# patch extraction and the anchored comparison with the ball
# ---------------------------------------------------------------------------


def _window_cells(m: int) -> list[tuple[int, int]]:
    lo = -(2**m) - 2
    hi = 2**m + 4
    return [
        (x, y)
        for x in range(lo, hi)
        for y in range(lo, 2)
        if cell_present(x, y)
    ]


def patch_addresses(m: int) -> dict[tuple[int, int], tuple[str, str]]:
    """Map each cell of the two level-m triangles around the anchors to
    (component, word): component 'main' for ancestry (0,0), 'dual' for (1,0).

    Letters read the type of each iterated contraction, deepest level last.
    """
    cells = _window_cells(m)
    types: dict[tuple[int, int], list[str]] = {c: [] for c in cells}
    current = {c: c for c in cells}
    for _ in range(m):
        for c in cells:
            cur = current[c]
            types[c].append(cell_type(cur))
            current[c] = contract_cell(cur)
    out = {}
    for c in cells:
        anc = current[c]
        if anc == (0, 0):
            comp = "main"
        elif anc == (1, 0):
            comp = "dual"
        else:
            continue
        word = "".join(t.upper() for t in reversed(types[c]))
        out[c] = (comp, word)
    return out


def parity_patch(m: int):
    """Subgraph of the plane configuration on the two anchored level-m
    triangles plus their joining edge, with the cell -> vertex map."""
    addr = patch_addresses(m)
    cells = sorted(addr)
    vidx = {c: i for i, c in enumerate(cells)}
    vertices = [
        G.VertexAddress(label=f"({c[0]},{c[1]})") for c in cells
    ]
    edges = set()
    for c in cells:
        for d in DIRECTIONS.values():
            n = (c[0] + d[0], c[1] + d[1])
            if n in vidx:
                a, b = vidx[c], vidx[n]
                edges.add((min(a, b), max(a, b)))
    n = len(cells)
    deg = [0] * n
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    boundary = [i for i in range(n) if deg[i] == 2]
    g = G.SubstGraph(
        vertices=tuple(vertices),
        neighbors=tuple(
            tuple(sorted(j for j in range(n) if (min(i, j), max(i, j)) in edges and i != j))
            for i in range(n)
        ),
        boundary=frozenset(boundary),
        level=m,
        kind="patch",
    )
    return g, vidx, addr


LETTER_SWAP = {"A": "B", "B": "A", "C": "C"}


def patch_ball_isomorphism(m: int) -> dict[tuple[int, int], tuple[str, str]]:
    """Explicit anchored isomorphism patch(m) -> ball(m), verified edgewise.

    The dual triangle of the plane configuration is the mirror image of the
    main one, so its words transport through the A<->B letter swap.
    """
    ball = G.pascal_ball(m)
    _, vidx, addr = parity_patch(m)

    def ball_address(c):
        comp, word = addr[c]
        if comp == "dual":
            word = "".join(LETTER_SWAP[x] for x in word)
        return (comp, word)

    bidx = {(v.side, "".join(v.word)): i for i, v in enumerate(ball.vertices)}
    mapping = {}
    images = set()
    for c in addr:
        key = ball_address(c)
        if key not in bidx:
            raise AssertionError(f"cell {c} maps to missing address {key}")
        mapping[c] = key
        images.add(key)
    if len(images) != len(ball):
        raise AssertionError("cell-to-address map is not a bijection")
    # edge preservation, both directions
    cell_ids = {c: i for i, c in enumerate(sorted(addr))}
    patch_edges = set()
    for c in addr:
        for d in DIRECTIONS.values():
            nb = (c[0] + d[0], c[1] + d[1])
            if nb in addr:
                e = tuple(sorted((bidx[mapping[c]], bidx[mapping[nb]])))
                patch_edges.add(e)
    ball_edges = {tuple(sorted(e)) for e in ball.edges()}
    if patch_edges != ball_edges:
        raise AssertionError("patch and ball edge sets differ under the address map")
    if mapping[(0, 0)] != ("main", "A" * m) or mapping[(1, 0)] != ("dual", "A" * m):
        raise AssertionError("anchors do not map to the apexes")
    return mapping


def contraction_fixed_cells(window: int = 8) -> list[tuple[int, int]]:
    """Cells of the base configuration fixed by one contraction step."""
    out = []
    for x in range(-window, window + 1):
        for y in range(-window, 2):
            if cell_present(x, y) and contract_cell((x, y)) == (x, y):
                out.append((x, y))
    return sorted(out)


def interior_brechet(word: str) -> str:
    """Class name of the brechet of the patch cell with the given main-side
    word (must be realized in the anchored configuration)."""
    m = len(word)
    addr = patch_addresses(m)
    cells = [c for c, (comp, w) in addr.items() if comp == "main" and w == word]
    if not cells:
        raise NotInModelError(f"word {word} not realized")
    classes = brechet_classes()
    by_class = {v: k for k, v in classes.items()}
    names = {by_class[brechet_of(c)] for c in cells}
    if len(names) != 1:
        raise AssertionError(f"brechet of {word} is not well defined: {names}")
    return names.pop()
