"""Formations, bearing constraint sets, and the matrices built from them.

A formation binds a directed graph to agent positions in R^d.  From it we
derive the stacked edge vectors, the unit bearings, and the bearing rigidity
matrix (the Jacobian of the stacked bearings with respect to the stacked
positions).  A bearing constraint set carries per-edge desired unit bearings
and yields the bearing Laplacian, the matrix-weighted graph Laplacian that
drives the closed-loop dynamics.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegenerateEdgeError, DimensionMismatchError
from .graph import DirectedGraph, expanded_incidence, out_edges
from .linalg import projector, span_basis

#: Edges shorter than this have numerically meaningless bearings.
DEGENERATE_EDGE_TOL = 1e-9

#: How far a supplied constraint bearing may deviate from unit length.
UNIT_BEARING_TOL = 1e-12


def _check_stacked(p: np.ndarray, n: int, d: int) -> np.ndarray:
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size != n * d:
        raise DimensionMismatchError(
            f"stacked positions must have length {n * d}, got {p.size}"
        )
    if not np.all(np.isfinite(p)):
        raise ValueError("positions must be finite")
    return p


@dataclass(frozen=True, eq=False)
class Formation:
    """A directed graph with stacked agent positions p in R^(d*n).

    Agent i occupies components (i-1)*d .. i*d-1 of p.  Construction fails
    with DegenerateEdgeError if any edge is shorter than the degeneracy
    threshold, so bearings are always well defined on a live instance.
    Instances are immutable; derived matrices are computed once and cached.
    """

    graph: DirectedGraph
    d: int
    p: np.ndarray

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"dimension must be >= 2, got {self.d}")
        p = _check_stacked(self.p, self.graph.n, self.d)
        object.__setattr__(self, "p", p)
        points = self.points
        for k, (i, j) in enumerate(self.graph.edges):
            length = float(np.linalg.norm(points[j - 1] - points[i - 1]))
            if length <= DEGENERATE_EDGE_TOL:
                raise DegenerateEdgeError(k, i, j, length)

    @classmethod
    def from_points(cls, graph: DirectedGraph, points: np.ndarray) -> "Formation":
        """Build from an (n, d) array of agent positions."""
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[0] != graph.n:
            raise DimensionMismatchError(
                f"expected a ({graph.n}, d) position array, got shape {points.shape}"
            )
        return cls(graph, points.shape[1], points.reshape(-1))

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def m(self) -> int:
        return self.graph.m

    @property
    def points(self) -> np.ndarray:
        """Positions as an (n, d) array (a reshaped view of p)."""
        return self.p.reshape(self.graph.n, self.d)

    @cached_property
    def edge_vectors(self) -> np.ndarray:
        """Stacked edge vectors (head minus tail), length d*m."""
        return expanded_incidence(self.graph, self.d) @ self.p

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(self.edge_vectors.reshape(self.m, self.d), axis=1)

    @cached_property
    def bearings(self) -> np.ndarray:
        """Stacked unit bearings, length d*m: the bearing function at p."""
        e = self.edge_vectors.reshape(self.m, self.d)
        return (e / self.edge_lengths[:, None]).reshape(-1)

    @cached_property
    def bearing_rigidity_matrix(self) -> np.ndarray:
        """Jacobian of the stacked bearings with respect to p, shape (dm, dn).

        Closed form: block-diagonal stack of P_g_k / |e_k| applied to the
        expanded incidence matrix, where P is the orthogonal projector that
        annihilates the bearing of edge k.
        """
        Hbar = expanded_incidence(self.graph, self.d)
        g = self.bearings.reshape(self.m, self.d)
        R = np.zeros((self.d * self.m, self.d * self.graph.n))
        for k in range(self.m):
            rows = slice(k * self.d, (k + 1) * self.d)
            R[rows] = (projector(g[k]) / self.edge_lengths[k]) @ Hbar[rows]
        return R

    @cached_property
    def trivial_motion_basis(self) -> np.ndarray:
        """Orthonormal basis of the translations-plus-scaling span, (dn, d+1).

        Spanned by the d columns of ones-kron-identity together with p
        itself; these directions never change any bearing.
        """
        translations = np.kron(np.ones(self.graph.n), np.eye(self.d)).T
        return span_basis(np.column_stack([translations, self.p]))

    def translated(self, t: np.ndarray) -> "Formation":
        """New formation with every agent shifted by the d-vector t."""
        t = np.asarray(t, dtype=float).reshape(-1)
        if t.size != self.d:
            raise DimensionMismatchError(f"translation must have length {self.d}")
        return Formation(self.graph, self.d, self.p + np.tile(t, self.graph.n))

    def scaled(self, factor: float) -> "Formation":
        """New formation with positions scaled about the origin."""
        return Formation(self.graph, self.d, float(factor) * self.p)


@dataclass(frozen=True, eq=False)
class BearingConstraintSet:
    """Per-edge desired unit bearings defining a target formation shape.

    Targets are usually produced from a realizing formation, but raw unit
    vectors are accepted too, which is why this is a type of its own.
    """

    graph: DirectedGraph
    d: int
    bearings: np.ndarray  # (m, d), unit rows in edge order

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"dimension must be >= 2, got {self.d}")
        b = np.asarray(self.bearings, dtype=float)
        if b.shape != (self.graph.m, self.d):
            raise DimensionMismatchError(
                f"bearings must have shape ({self.graph.m}, {self.d}), got {b.shape}"
            )
        if not np.all(np.isfinite(b)):
            raise ValueError("bearings must be finite")
        norms = np.linalg.norm(b, axis=1)
        bad = np.where(np.abs(norms - 1.0) > UNIT_BEARING_TOL)[0]
        if bad.size:
            k = int(bad[0])
            raise ValueError(
                f"bearing {k} has norm {norms[k]:.15g}; constraints must be unit vectors"
            )
        object.__setattr__(self, "bearings", b)

    @classmethod
    def from_formation(cls, f: Formation) -> "BearingConstraintSet":
        """Constraint set realized by a formation's own bearings."""
        return cls(f.graph, f.d, f.bearings.reshape(f.m, f.d))

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def m(self) -> int:
        return self.graph.m

    @cached_property
    def edge_projectors(self) -> np.ndarray:
        """(m, d, d) stack of orthogonal projectors, one per constraint bearing."""
        out = np.empty((self.graph.m, self.d, self.d))
        for k in range(self.graph.m):
            out[k] = projector(self.bearings[k])
        return out

    @cached_property
    def bearing_laplacian(self) -> np.ndarray:
        """Matrix-weighted graph Laplacian of the constraints, shape (dn, dn).

        Off-diagonal block (i, j) is minus the projector of edge (i, j);
        diagonal block i sums the projectors of agent i's outgoing edges.
        An agent with no outgoing edges contributes an all-zero block row,
        which is what makes the matrix asymmetric for directed graphs.
        """
        n, d = self.graph.n, self.d
        L = np.zeros((d * n, d * n))
        for i in range(1, n + 1):
            ri = slice((i - 1) * d, i * d)
            for k, j in out_edges(self.graph, i):
                P = self.edge_projectors[k]
                L[ri, (j - 1) * d:j * d] -= P
                L[ri, ri] += P
        return L

    def satisfaction_residuals(self, p: np.ndarray) -> np.ndarray:
        """Per-edge norms of the constraint projectors applied to p_i - p_j.

        Zero exactly when the relative position of each constrained pair is
        parallel to its desired bearing.  Well defined for any p, including
        configurations with coincident agents.
        """
        p = _check_stacked(p, self.graph.n, self.d)
        pts = p.reshape(self.graph.n, self.d)
        r = np.empty(self.graph.m)
        for k, (i, j) in enumerate(self.graph.edges):
            r[k] = np.linalg.norm(self.edge_projectors[k] @ (pts[i - 1] - pts[j - 1]))
        return r
