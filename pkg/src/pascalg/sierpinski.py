"""Transport to the edge graph: the edge lift, its operator identities, the
conjugated dynamics y -> y^2 - 3y, and the spectral moments of the lifted
apex-difference vector.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import graphs as G
from . import julia
from . import spectra as S
from . import transfer as T


def xi_star(g: G.SubstGraph, phi):
    """Edge lift: the value on an edge is the sum of the endpoint values.
    Returns (line graph vector, edge index map)."""
    emap = G.line_vertex_map(g)
    out = [phi[0] * 0] * len(emap)
    for (i, j), e in emap.items():
        out[e] = phi[i] + phi[j]
    return out, emap


def xi_down(g: G.SubstGraph, psi, emap=None):
    """Adjoint of the edge lift: sum over incident edges."""
    if emap is None:
        emap = G.line_vertex_map(g)
    out = [psi[0] * 0] * len(g)
    for (i, j), e in emap.items():
        out[i] = out[i] + psi[e]
        out[j] = out[j] + psi[e]
    return out


def verify_xi_identities(g: G.SubstGraph, seed: int = 0) -> dict:
    """Exact identities of the edge lift: (A_edge - 1) lift = lift A and
    `down lift = 3 + A`, on rows clear of truncation; plus a spot check that
    vectors orthogonal to the lift image are -2 eigenvectors of the edge
    graph."""
    lg = G.line_graph(g)
    emap = G.line_vertex_map(g)
    inv = {e: ij for ij, e in emap.items()}
    vert_mask = S.interior_row_mask(g, 1)
    edge_mask = np.array([bool(vert_mask[inv[e][0]] and vert_mask[inv[e][1]]) for e in range(len(lg))])

    rng = np.random.default_rng(seed)
    probes = [
        [Fraction(1)] * len(g),
        S.apex_difference_vector(g) if g.kind == "ball" else None,
        [Fraction(int(x)) for x in rng.integers(-3, 4, size=len(g))],
    ]
    ok_conj = True
    ok_comp = True
    for phi in probes:
        if phi is None:
            continue
        lift, _ = xi_star(g, phi)
        a_lift = S.neighbor_sum(lg, lift)
        lhs = [a - b for a, b in zip(a_lift, lift)]
        aphi = S.neighbor_sum(g, phi)
        rhs, _ = xi_star(g, aphi)
        ok_conj = ok_conj and all(
            l == r for l, r, m in zip(lhs, rhs, edge_mask) if m
        )
        down = xi_down(g, lift, emap)
        want = [3 * p + q for p, q in zip(phi, aphi)]
        ok_comp = ok_comp and all(
            d == wv for d, wv, m in zip(down, want, vert_mask) if m
        )
    # orthogonal complement spot check: psi = w - lift((3+A)^-1 down w)
    ok_orth = True
    if not g.boundary:
        n = len(g)
        a = S.adjacency(g)
        for _ in range(3):
            w = [Fraction(int(x)) for x in rng.integers(-3, 4, size=len(lg))]
            target = xi_down(g, w, emap)
            u = _solve_fraction(a + 3 * np.eye(n, dtype=np.int64), target)
            lift_u, _ = xi_star(g, u)
            psi = [x - y for x, y in zip(w, lift_u)]
            if any(v != 0 for v in xi_down(g, psi, emap)):
                ok_orth = False
                break
            apsi = S.neighbor_sum(lg, psi)
            if any(x != -2 * y for x, y in zip(apsi, psi)):
                ok_orth = False
                break
    return {
        "conjugation": ok_conj,
        "compression": ok_comp,
        "orthogonal_complement": ok_orth,
        "ok": ok_conj and ok_comp and ok_orth,
    }


def _solve_fraction(a: np.ndarray, b):
    """Exact solve of a x = b for an integer matrix with Fraction rhs."""
    n = a.shape[0]
    rows = [[Fraction(int(a[i, j])) for j in range(n)] + [Fraction(b[i])] for i in range(n)]
    from .exactalg import exact_rref

    rows, pivots = exact_rref(rows)
    if len(pivots) != n:
        raise ValueError("singular system")
    x = [Fraction(0)] * n
    for r, c in enumerate(pivots):
        x[c] = rows[r][n]
    return x


def edge_complement_dimension(g: G.SubstGraph) -> dict:
    """Dimension of the -2 eigenspace of the edge graph equals the corank of
    the lift: edges minus vertices for a boundaryless valence-3 graph."""
    lg = G.line_graph(g)
    n = len(lg)
    a = S.adjacency(lg)
    dim = n - S.rank_mod_p(a + 2 * np.eye(n, dtype=np.int64))
    want = g.n_edges - len(g)
    return {"dim": dim, "expected": want, "ok": dim == want}


def g_eval(x):
    return x * x - 3 * x


def g_conjugation_suite(count: int = 64, seed: int = 3) -> dict:
    """The conjugated dynamics y = x + 1: g(x+1) = f(x) + 1, the shifted
    branch weight, the shifted moment weight, and the coding roundtrip of the
    shifted Cantor set."""
    pts = julia.sample_points(int(math.log2(count)))
    xs = np.array(pts)
    gamma = T.WEIGHTS["gamma_w"]
    rho = T.WEIGHTS["rho"]
    c_w = T.WEIGHTS["c_w"]
    k = T.WEIGHTS["k"]
    h = T.WEIGHTS["h"]
    checks = {
        "conjugacy": float(np.max(np.abs(g_eval(xs + 1) - (xs * xs - xs - 3 + 1)))),
        "weight_shift": float(np.max(np.abs(gamma(xs + 1) - rho(xs)))),
        "density_shift": float(np.max(np.abs(c_w(xs + 1) - k(xs + 1) * h(xs)))),
    }
    # membership under the shifted dynamics along shifted codes
    rng = np.random.default_rng(seed)
    ok_code = True
    for _ in range(32):
        code = tuple(int(c) for c in rng.choice((-2, 3), size=14))
        x = julia.code_to_point(code, 1e-4).value
        y = x + 1.0
        cur = y
        for sym in code:
            if not (-1 - 1e-6 <= cur <= 4 + 1e-6):
                ok_code = False
                break
            # shifted coding intervals are the originals plus one
            if sym == -2 and not cur <= (1 - math.sqrt(5)) / 2 + 1 + 1e-6:
                ok_code = False
                break
            if sym == 3 and not cur >= (1 + math.sqrt(5)) / 2 + 1 - 1e-6:
                ok_code = False
                break
            cur = g_eval(cur)
    checks["shifted_coding"] = ok_code
    checks["ok"] = (
        checks["conjugacy"] < 1e-10
        and checks["weight_shift"] < 1e-10
        and checks["density_shift"] < 1e-10
        and ok_code
    )
    return checks


def theta0_vector(ball: G.SubstGraph):
    phi0 = S.apex_difference_vector(ball)
    return xi_star(ball, phi0)


def theta0_graph_moments(max_order: int, ball: G.SubstGraph | None = None) -> list[Fraction]:
    if ball is None:
        level = max(3, (max_order + 3).bit_length() + 1)
        ball = G.pascal_ball(level)
    lg = G.line_graph(ball)
    theta0, _ = theta0_vector(ball)
    # edge-graph truncation safety inherits from the vertex distances
    return [_edge_moment(ball, lg, theta0, n) for n in range(max_order + 1)]


def _edge_moment(ball, lg, vec, n):
    emap = G.line_vertex_map(ball)
    inv = {e: ij for ij, e in emap.items()}
    dist = G.bfs_distances(ball, sorted(ball.boundary))
    support = [e for e, c in enumerate(vec) if c != 0]
    room = min(min(dist[inv[e][0]], dist[inv[e][1]]) for e in support)
    if n + 1 >= room:
        raise S.TruncationUnsafeError(f"edge moment order {n} too close to truncation")
    half = n // 2
    left = list(vec)
    for _ in range(half):
        left = S.neighbor_sum(lg, left)
    right = list(vec)
    for _ in range(n - half):
        right = S.neighbor_sum(lg, right)
    return S.inner(left, right)


def theta0_moment_check(max_order: int = 10, ball: G.SubstGraph | None = None,
                        tol: float = 1e-8) -> list[T.MomentRow]:
    graph_vals = theta0_graph_moments(max_order, ball)
    return T.moment_table(graph_vals, T.theta0_moment_transfer, tol)
