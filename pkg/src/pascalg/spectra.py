"""Exact adjacency-operator linear algebra on the graph family: closed-form
characteristic polynomials, decimation identities, eigenspaces, the
eigenvector lift between levels, and spectral moments of the apex vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from . import graphs as G
from .exactalg import (
    IntPolynomial,
    QuadraticScalar,
    char_poly_exact,
    exact_kernel,
    exact_rank,
    poly_add,
    poly_compose,
    poly_mul,
    poly_pow,
    rank_mod_p,
)

K_POLY = [2, 1]  # X + 2
L_POLY = [0, 1]  # X
M_POLY = [-2, 1]  # X - 2
F_POLY = [-3, -1, 1]  # X^2 - X - 3


# ---------------------------------------------------------------------------
# adjacency and parent operators
# ---------------------------------------------------------------------------


def adjacency(g: G.SubstGraph) -> np.ndarray:
    n = len(g)
    a = np.zeros((n, n), dtype=np.int64)
    for i, j in g.edges():
        a[i, j] = 1
        a[j, i] = 1
    return a


def adjacency_sparse(g: G.SubstGraph) -> sp.csr_matrix:
    rows, cols = [], []
    for i, j in g.edges():
        rows += [i, j]
        cols += [j, i]
    n = len(g)
    return sp.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(n, n))


def parent_matrix(g: G.SubstGraph) -> sp.csr_matrix:
    """0/1 matrix of the parent projection: rows parent vertices, columns
    child vertices. Its transpose is the pullback."""
    if g.parent is None or g.parent_graph is None:
        raise ValueError("graph has no parent map")
    np_, nc = len(g.parent_graph), len(g)
    cols = np.arange(nc)
    rows = np.array(g.parent)
    return sp.csr_matrix((np.ones(nc, dtype=np.int64), (rows, cols)), shape=(np_, nc))


def parent_pullback(g: G.SubstGraph, values):
    """Compose with the parent map (child vertex -> parent value)."""
    if g.parent is None:
        raise ValueError("graph has no parent map")
    return [values[p] for p in g.parent]


def parent_pushsum(g: G.SubstGraph, values):
    """Sum over parent fibers."""
    if g.parent is None or g.parent_graph is None:
        raise ValueError("graph has no parent map")
    out = [0] * len(g.parent_graph)
    for child, p in enumerate(g.parent):
        out[p] = out[p] + values[child]
    return out


# ---------------------------------------------------------------------------
# closed-form characteristic polynomial of the quotient graphs
# ---------------------------------------------------------------------------


def closed_form_quotient_charpoly(n: int) -> IntPolynomial:
    """Characteristic polynomial of the neighbor-sum operator on the level-n
    quotient graph, as the exact expanded product
    (X-3)(X+1)^3 prod_p (m.f^p)^3 (l.f^p)^(2*3^(n-1-p)) (k.f^p)^(1+2*3^(n-1-p)).
    """
    out = poly_mul([-3, 1], poly_pow([1, 1], 3))
    fp = [0, 1]  # f^0 = X
    for p in range(n):
        e = 3 ** (n - 1 - p)
        out = poly_mul(out, poly_pow(poly_compose(M_POLY, fp), 3))
        out = poly_mul(out, poly_pow(poly_compose(L_POLY, fp), 2 * e))
        out = poly_mul(out, poly_pow(poly_compose(K_POLY, fp), 1 + 2 * e))
        fp = poly_compose(F_POLY, fp)
    return IntPolynomial(out)


def quotient_charpoly_factors(n: int) -> list[tuple[IntPolynomial, int]]:
    """Factored form [(factor, exponent)] of the same polynomial."""
    out = [(IntPolynomial([-3, 1]), 1), (IntPolynomial([1, 1]), 3)]
    fp = [0, 1]
    for p in range(n):
        e = 3 ** (n - 1 - p)
        out.append((IntPolynomial(poly_compose(M_POLY, fp)), 3))
        out.append((IntPolynomial(poly_compose(L_POLY, fp)), 2 * e))
        out.append((IntPolynomial(poly_compose(K_POLY, fp)), 1 + 2 * e))
        fp = poly_compose(F_POLY, fp)
    return out


def eigenvalue_multiplicity_closed_form(n: int, x: int) -> int:
    return closed_form_quotient_charpoly(n).root_multiplicity(x)


# ---------------------------------------------------------------------------
# decimation identities
# ---------------------------------------------------------------------------


def interior_row_mask(g: G.SubstGraph, radius: int) -> np.ndarray:
    """Rows whose `radius`-neighborhood avoids the truncation boundary."""
    if not g.boundary:
        return np.ones(len(g), dtype=bool)
    dist = G.bfs_distances(g, sorted(g.boundary))
    return np.array([d > radius for d in dist])


def verify_decimation_identities(g: G.SubstGraph) -> dict:
    """Exact operator identities between a graph and its parent:
    pushsum .. pullback = 3, (A^2 - A - 3) pullback = pullback A_parent,
    pushsum A pullback = 6 + A_parent.
    All checked as integer matrix identities, restricted to rows whose
    neighborhoods survive truncation when the graph has a boundary.
    """
    a_child = adjacency_sparse(g)
    a_par = adjacency_sparse(g.parent_graph)
    pi = parent_matrix(g)
    report = {}
    # pushsum of pullback is multiplication by 3
    m0 = (pi @ pi.T - 3 * sp.identity(len(g.parent_graph), dtype=np.int64)).toarray()
    report["pushsum_pullback_is_3"] = not m0.any()
    # conjugation identity, exact away from truncated rows (needs radius 2)
    lhs = (a_child @ a_child - a_child) @ pi.T - 3 * pi.T
    rhs = pi.T @ a_par
    diff = (lhs - rhs).toarray()
    mask = interior_row_mask(g, 2)
    report["conjugation_identity"] = not diff[mask].any()
    report["conjugation_identity_rows_checked"] = int(mask.sum())
    # compression identity, exact everywhere (boundary rows included)
    m2 = (pi @ a_child @ pi.T - 6 * sp.identity(len(g.parent_graph), dtype=np.int64) - a_par).toarray()
    report["compression_identity"] = not m2.any()
    report["ok"] = bool(
        report["pushsum_pullback_is_3"]
        and report["conjugation_identity"]
        and report["compression_identity"]
    )
    return report


# ---------------------------------------------------------------------------
# exact eigenspaces
# ---------------------------------------------------------------------------


def eigenspace_exact(g: G.SubstGraph, x) -> list[list]:
    """Exact basis of the kernel of (A - x I) over Q or Q(sqrt d)."""
    n = len(g)
    if isinstance(x, QuadraticScalar):
        zero = QuadraticScalar.of(0, 0, x.d)
        rows = [[zero] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = zero - x
        one = zero + 1
    else:
        x = Fraction(x)
        rows = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = -x
        one = Fraction(1)
    for i, j in g.edges():
        rows[i][j] = one
        rows[j][i] = one
    basis = exact_kernel(rows, n)
    for v in basis:
        check_eigenvector(g, v, x)
    return basis


def check_eigenvector(g: G.SubstGraph, v, x) -> None:
    for i in range(len(g)):
        acc = sum((v[j] for j in g.neighbors[i]), start=v[i] * 0)
        if acc != x * v[i]:
            raise AssertionError(f"residual nonzero at vertex {i}")


def eigenspace_dimension_certified(g: G.SubstGraph, x: int) -> int:
    """Exact dimension of ker(A - xI) for integer x.

    Lower bound from an exact constraint basis is matched against the modular
    rank bound (rank mod p never exceeds the rational rank), so the returned
    dimension is certified without full rational elimination.
    """
    n = len(g)
    a = adjacency(g) - x * np.eye(n, dtype=np.int64)
    upper = n - rank_mod_p(a)
    if upper == 0:
        return 0
    if x in (0, -2) and g.parent is not None:
        basis = constrained_eigenbasis(g, x)
    else:
        basis = eigenspace_exact(g, x)
        return len(basis)
    lower = exact_rank([list(v) for v in basis])
    if lower != upper:
        raise AssertionError(
            f"certification gap at eigenvalue {x}: constraints give {lower}, modular bound {upper}"
        )
    return upper


def constrained_eigenbasis(g: G.SubstGraph, eigenvalue: int) -> list[list[Fraction]]:
    """Eigenvectors at 0 / -2 via the structural constraints: fiber sums
    vanish and values across non-fiber edges are equal (eigenvalue 0) or
    opposite (eigenvalue -2).

    Exact basis of the constraint space; each element is verified to satisfy
    the eigenvector equation on interior rows, and globally for boundaryless
    graphs.
    """
    if eigenvalue not in (0, -2):
        raise ValueError("constraint form exists for eigenvalues 0 and -2 only")
    if g.parent is None:
        raise ValueError("needs a parent map")
    sign = Fraction(1) if eigenvalue == 0 else Fraction(-1)
    n = len(g)
    fibers = g.fibers()
    rows = []
    # cross-fiber edges carry the symmetry constraint
    for i, j in g.edges():
        if g.parent[i] != g.parent[j]:
            row = [Fraction(0)] * n
            row[i] = Fraction(1)
            row[j] = -sign
            rows.append(row)
    for fiber in fibers.values():
        row = [Fraction(0)] * n
        for v in fiber:
            row[v] = Fraction(1)
        rows.append(row)
    # boundary self-children have no cross edge; a true eigenvector needs
    # the local equation there as well
    for b in g.boundary:
        row = [Fraction(0)] * n
        for w in g.neighbors[b]:
            row[w] = Fraction(1)
        row[b] = row[b] - Fraction(eigenvalue)
        rows.append(row)
    basis = exact_kernel(rows, n)
    if not g.boundary:
        for v in basis:
            check_eigenvector(g, v, Fraction(eigenvalue))
    return basis


# ---------------------------------------------------------------------------
# the eigenvector lift between levels
# ---------------------------------------------------------------------------


def eigen_lift(g: G.SubstGraph, psi, x):
    """Lift an eigenvector of the parent graph at eigenvalue f(x) to one of g
    at eigenvalue x: (x - 1) * pullback + A * pullback."""
    pull = parent_pullback(g, psi)
    out = []
    for i in range(len(g)):
        acc = sum((pull[j] for j in g.neighbors[i]), start=pull[i] * 0)
        out.append((x - 1) * pull[i] + acc)
    return out


def lift_norm_factor(x):
    """Squared-norm ratio of the lift: x (x + 2) (2x - 1)."""
    return x * (x + 2) * (2 * x - 1)


def vector_norm_sq(v):
    return sum((z * z for z in v), start=v[0] * 0)


def inner(u, v):
    return sum((a * b for a, b in zip(u, v)), start=u[0] * 0)


def verify_eigen_lift(g: G.SubstGraph, psi, y, x) -> dict:
    """Check the lift of a parent eigenvector at y = f(x): eigen-equation at
    x, and the exact norm law, in the scalar field of x."""
    fx = x * x - x - 3
    if fx != y:
        raise ValueError("x does not map to y")
    lifted = eigen_lift(g, psi, x)
    eigen_ok = True
    for i in range(len(g)):
        acc = sum((lifted[j] for j in g.neighbors[i]), start=lifted[i] * 0)
        if acc != x * lifted[i]:
            eigen_ok = False
            break
    ratio_ok = vector_norm_sq(lifted) == lift_norm_factor(x) * vector_norm_sq(psi)
    return {"eigen": eigen_ok, "norm_law": ratio_ok, "ok": eigen_ok and ratio_ok}


# ---------------------------------------------------------------------------
# zero-eigenvalue interior patch and the measured norm constants
# ---------------------------------------------------------------------------


def zero_mode_interior(a, b, c):
    """Unique interior values of a kernel vector on a level-2 cell with
    prescribed corner values: symmetric across the three inner cross edges."""
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    x = (c - a - b) / 2
    y = (b - a - c) / 2
    z = (a - b - c) / 2
    return {"AB": x, "BA": x, "AC": y, "CA": y, "BC": z, "CB": z}


def zero_mode_interior_square_sum(a, b, c) -> Fraction:
    vals = zero_mode_interior(a, b, c)
    return sum(v * v for v in vals.values())


def _cell2_id(g: G.SubstGraph, v: int) -> tuple[str, tuple[str, ...]]:
    va = g.vertices[v]
    return (va.side, va.word[:-2])


def theta_vertices(ball: G.SubstGraph) -> list[frozenset[int]]:
    """Edges exterior to the level-2 cells of a ball: the edge-graph points
    supporting kernel vectors."""
    out = []
    for i, j in ball.edges():
        if _cell2_id(ball, i) != _cell2_id(ball, j):
            out.append(frozenset((i, j)))
    return sorted(out, key=sorted)


def build_zero_mode(ball: G.SubstGraph, psi: dict[frozenset[int], Fraction]) -> list[Fraction]:
    """Kernel vector on the ball from values on exterior level-2 edges:
    constant on each supported edge, interior of each touched level-2 cell
    filled by the unique local solution."""
    vals = [Fraction(0)] * len(ball)
    touched = set()
    for e, c in psi.items():
        for v in e:
            vals[v] = Fraction(c)
            touched.add(_cell2_id(ball, v))
    idx = ball.index()
    for side, pref in touched:
        corners = {x: vals[idx[G.VertexAddress(side, pref + (x, x))]] for x in G.LETTERS}
        interior = zero_mode_interior(corners["A"], corners["B"], corners["C"])
        for key, value in interior.items():
            vals[idx[G.VertexAddress(side, pref + tuple(key))]] = value
    return vals


@dataclass
class NormConstantReport:
    alpha: Fraction
    beta: Fraction
    stated_alpha: Fraction
    status: str  # "confirmed" | "erratum-candidate"
    probes: list

    def as_dict(self):
        return {
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "stated_alpha": str(self.stated_alpha),
            "status": self.status,
        }


def zero_mode_norm_constants(ball: G.SubstGraph) -> NormConstantReport:
    """Measure (alpha, beta) in ||Q psi||^2 = alpha ||psi||^2 + beta <A psi, psi>
    from independent probe vectors on the edge graph.

    The source text states alpha = 3; the brute-forced value is pinned and a
    disagreement is reported as an erratum candidate, not a failure.
    """
    if ball.level < 3:
        raise ValueError("ball level must be >= 3")
    thetas = theta_vertices(ball)
    am, ad = G.apexes(ball)
    apex_edge = frozenset((am, ad))
    assert apex_edge in thetas
    # a theta vertex adjacent to the apex edge (shares a level-2 cell)
    cells_of_apex = {_cell2_id(ball, v) for v in apex_edge}
    nb = next(
        e for e in thetas if e != apex_edge and any(_cell2_id(ball, v) in cells_of_apex for v in e)
    )
    far = next(
        e
        for e in thetas
        if e != apex_edge
        and all(_cell2_id(ball, v) not in cells_of_apex for v in e)
        and min(G.bfs_distances(ball, list(e))[v] for v in apex_edge) < G.safety_radius(ball)
        and not any(
            _cell2_id(ball, v) == _cell2_id(ball, w) for v in e for w in nb
        )
    )
    probes = [
        {apex_edge: Fraction(1)},
        {apex_edge: Fraction(1), nb: Fraction(1)},
        {apex_edge: Fraction(1), far: Fraction(1)},
    ]
    rows = []
    rhs = []
    details = []
    for psi in probes:
        vec = build_zero_mode(ball, psi)
        # exactness of the kernel equation on all rows untouched by truncation
        mask = interior_row_mask(ball, 1)
        for i in range(len(ball)):
            if not mask[i] and vec[i] == 0:
                continue
            acc = sum(vec[j] for j in ball.neighbors[i])
            if acc != 0:
                raise AssertionError("zero-mode construction failed the kernel equation")
        norm_psi = sum(c * c for c in psi.values())
        pair = Fraction(0)
        for e1 in psi:
            for e2 in psi:
                if e1 != e2 and _edges_adjacent(ball, e1, e2):
                    pair += psi[e1] * psi[e2]
        norm_q = vector_norm_sq(vec)
        rows.append((norm_psi, pair))
        rhs.append(norm_q)
        details.append({"psi_norm": norm_psi, "pairing": pair, "lift_norm": norm_q})
    # solve the 2-parameter fit exactly and demand consistency on the rest
    (n1, p1), (n2, p2) = rows[0], rows[1]
    det = n1 * p2 - n2 * p1
    if det == 0:
        raise AssertionError("probe vectors degenerate")
    alpha = (rhs[0] * p2 - rhs[1] * p1) / det
    beta = (n1 * rhs[1] - n2 * rhs[0]) / det
    for (nn, pp), target in zip(rows, rhs):
        if alpha * nn + beta * pp != target:
            raise AssertionError("norm constants inconsistent across probes")
    status = "confirmed" if alpha == 3 else "erratum-candidate"
    return NormConstantReport(alpha, beta, Fraction(3), status, details)


def _edges_adjacent(ball: G.SubstGraph, e1: frozenset, e2: frozenset) -> bool:
    """Edge-graph adjacency: two exterior edges sharing a level-2 cell."""
    return any(_cell2_id(ball, v) == _cell2_id(ball, w) for v in e1 for w in e2)


def kappa_factor(x):
    """Norm scaling of the isomorphism onto the edge graph along the f-preimage
    chain of 0: product of f^k(x)(2 f^k(x) - 1) / (f^k(x) + 2)."""
    out = x * 0 + 1
    cur = x
    while cur != 0:
        out = out * (cur * (2 * cur - 1)) / (cur + 2)
        cur = cur * cur - cur - 3
        if isinstance(cur, QuadraticScalar) and cur.b == 0:
            cur = cur.a
    return out


def lifted_zero_mode_scaling(ball: G.SubstGraph, d: int = 13) -> dict:
    """Lift the apex-edge kernel probe one level and verify the scaling law of
    the edge-graph isomorphism in Q(sqrt d): the lifted vector is an exact
    eigenvector at x with f(x) = 0 and
    ||lift/(x+2)||^2 = kappa(x) * (alpha ||psi||^2 + beta <A psi, psi>).
    """
    parent = ball.parent_graph
    thetas = theta_vertices(parent)
    am, ad = G.apexes(parent)
    psi = {frozenset((am, ad)): Fraction(1)}
    phi = build_zero_mode(parent, psi)
    consts = zero_mode_norm_constants(parent if parent.level >= 3 else ball)
    out = {}
    for sgn in (1, -1):
        x = QuadraticScalar.of(Fraction(1, 2), Fraction(sgn, 2), d)  # (1 +- sqrt13)/2
        phi_q = [QuadraticScalar.of(c, 0, d) for c in phi]
        res = verify_eigen_lift(ball, phi_q, 0, x)
        lifted = eigen_lift(ball, phi_q, x)
        scaled = [z / (x + 2) for z in lifted]
        kappa = kappa_factor(x)
        want = kappa * (consts.alpha * Fraction(1) + consts.beta * Fraction(0))
        got = vector_norm_sq(scaled)
        out[f"x=(1{'+' if sgn > 0 else '-'}sqrt13)/2"] = {
            "eigen": res["eigen"],
            "norm_law": res["norm_law"],
            "edge_scaling": got == want,
        }
    out["ok"] = all(v["eigen"] and v["norm_law"] and v["edge_scaling"] for v in out.values() if isinstance(v, dict))
    return out


# ---------------------------------------------------------------------------
# apex vectors, moments, and the self-similarity fixtures
# ---------------------------------------------------------------------------


def apex_difference_vector(ball: G.SubstGraph) -> list[Fraction]:
    am, ad = G.apexes(ball)
    v = [Fraction(0)] * len(ball)
    v[am], v[ad] = Fraction(1), Fraction(-1)
    return v


def apex_sum_vector(ball: G.SubstGraph) -> list[Fraction]:
    am, ad = G.apexes(ball)
    v = [Fraction(0)] * len(ball)
    v[am], v[ad] = Fraction(1), Fraction(1)
    return v


class TruncationUnsafeError(ValueError):
    pass


def neighbor_sum(g: G.SubstGraph, v):
    return [sum((v[j] for j in g.neighbors[i]), start=v[i] * 0) for i in range(len(g))]


def graph_moment(g: G.SubstGraph, v, n: int) -> Fraction:
    """Exact <A^n v, v>. On balls the support must stay clear of truncation."""
    if g.boundary:
        support = [i for i, c in enumerate(v) if c != 0]
        dist = G.bfs_distances(g, sorted(g.boundary))
        room = min(dist[i] for i in support)
        if n + 1 >= room:
            raise TruncationUnsafeError(
                f"moment order {n} reaches within {room} of the truncation boundary"
            )
    half = n // 2
    left = list(v)
    for _ in range(half):
        left = neighbor_sum(g, left)
    right = list(v)
    for _ in range(n - half):
        right = neighbor_sum(g, right)
    return inner(left, right)


def phi0_graph_moments(max_order: int, ball: G.SubstGraph | None = None) -> list[Fraction]:
    if ball is None:
        level = max(3, (max_order + 2).bit_length() + 1)
        ball = G.pascal_ball(level)
    v = apex_difference_vector(ball)
    return [graph_moment(ball, v, n) for n in range(max_order + 1)]


def lifted_vector_graph_moments(max_order: int, ball: G.SubstGraph) -> list[Fraction]:
    """Moments of (A + 2) applied to the apex difference vector."""
    v = apex_difference_vector(ball)
    av = neighbor_sum(ball, v)
    w = [a + 2 * b for a, b in zip(av, v)]
    return [graph_moment(ball, w, n) for n in range(max_order + 1)]


def verify_fixture_relations(ball: G.SubstGraph) -> dict:
    """Exact self-similarity identities of the two apex vectors: the pullback
    of the lower-level apex difference equals (A + 2) of the apex difference,
    and the pullback of the apex sum equals A of the apex sum."""
    if ball.parent_graph is None:
        raise ValueError("need level >= 2")
    phi_lo = apex_difference_vector(ball.parent_graph)
    psi_lo = apex_sum_vector(ball.parent_graph)
    phi_hi = apex_difference_vector(ball)
    psi_hi = apex_sum_vector(ball)
    lhs1 = parent_pullback(ball, phi_lo)
    rhs1 = [a + 2 * b for a, b in zip(neighbor_sum(ball, phi_hi), phi_hi)]
    lhs2 = parent_pullback(ball, psi_lo)
    rhs2 = neighbor_sum(ball, psi_hi)
    return {
        "difference_vector_identity": lhs1 == rhs1,
        "sum_vector_identity": lhs2 == rhs2,
        "ok": lhs1 == rhs1 and lhs2 == rhs2,
    }


def maximum_principle_checks(g: G.SubstGraph) -> dict:
    """Valence-3 extremal eigenvalues: the +3 space is the constants; the -3
    space is trivial unless the graph is bipartite."""
    n = len(g)
    a = adjacency(g)
    dim3 = n - rank_mod_p(a - 3 * np.eye(n, dtype=np.int64))
    const = [Fraction(1)] * n
    check_eigenvector(g, const, Fraction(3))
    bip, _ = G.is_partageable(g)
    dim_neg3 = n - rank_mod_p(a + 3 * np.eye(n, dtype=np.int64))
    return {
        "top_dim": dim3,
        "top_is_constants": dim3 == 1,
        "bottom_dim": dim_neg3,
        "bottom_expected": 1 if bip else 0,
        "ok": dim3 == 1 and dim_neg3 == (1 if bip else 0),
    }


def eigenbasis_csv(g: G.SubstGraph, basis, header=True) -> str:
    lines = []
    if header:
        lines.append("vertex,value_num,value_den,surd_num,surd_den")
    for v in basis:
        for i, val in enumerate(v):
            addr = g.vertices[i].text()
            if isinstance(val, QuadraticScalar):
                lines.append(
                    f"{addr},{val.a.numerator},{val.a.denominator},{val.b.numerator},{val.b.denominator}"
                )
            else:
                fr = Fraction(val)
                lines.append(f"{addr},{fr.numerator},{fr.denominator},0,1")
        lines.append("")
    return "\n".join(lines)
