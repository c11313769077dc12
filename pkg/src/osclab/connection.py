"""Levi-Civita product, curvature, and the flat left-symmetric product.

The connection is computed at algebra level from the Koszul identity

    k_u(L_x y, z) = 1/2 (k_u([x,y],z) - k_u([y,z],x) + k_u([z,x],y)),

stored as a rank-3 coefficient array L[a,b,c] with L_{e_a} e_b = sum_c
L[a,b,c] e_c.

Curvature sign convention: R(x,y) = L_{[x,y]} - [L_x, L_y]. The opposite
sign is common elsewhere; this one makes R(x,y) = 1/4 ad_{[x,y]} for the
bi-invariant metric (u = id).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .algebra import LambdaSpec, _as_elem, basis_brackets
from .metrics import Metric


@dataclass(frozen=True)
class ConnTable:
    """Levi-Civita product as a coefficient array, tied to its metric."""

    metric: Metric
    coeffs: np.ndarray  # L[a, b, c]

    @property
    def spec(self) -> LambdaSpec:
        return self.metric.spec

    @cached_property
    def left_mult(self) -> np.ndarray:
        """M[a] = matrix of L_{e_a} (columns indexed by the argument)."""
        m = np.ascontiguousarray(self.coeffs.transpose(0, 2, 1))
        m.setflags(write=False)
        return m

    def left_mult_of(self, x) -> np.ndarray:
        """Matrix of L_x for an arbitrary element x."""
        x = _as_elem(self.spec, x)
        return np.einsum("a,abc->cb", x, self.coeffs)

    def product(self, x, y) -> np.ndarray:
        """L_x y."""
        x, y = _as_elem(self.spec, x), _as_elem(self.spec, y)
        return np.einsum("a,abc,b->c", x, self.coeffs, y)


def levi_civita(metric: Metric) -> ConnTable:
    """Solve the Koszul linear system for every basis pair.

    One LU factorization of the k_u Gram matrix is shared by all
    right-hand sides.
    """
    spec = metric.spec
    B = basis_brackets(spec)
    gram = metric.gram_u
    # K[a, b, z] = k_u([e_a, e_b], e_z)
    K = np.einsum("abk,kz->abz", B, gram)
    rhs = 0.5 * (K - K.transpose(2, 0, 1) + K.transpose(1, 2, 0))
    lu = scipy.linalg.lu_factor(gram)
    flat = rhs.reshape(spec.dim * spec.dim, spec.dim).T
    coeffs = scipy.linalg.lu_solve(lu, flat).T.reshape(spec.dim, spec.dim, spec.dim)
    coeffs.setflags(write=False)
    return ConnTable(metric, coeffs)


def torsion_residual(table: ConnTable) -> float:
    """max |L_x y - L_y x - [x, y]| over basis pairs."""
    B = basis_brackets(table.spec)
    r = table.coeffs - table.coeffs.transpose(1, 0, 2) - B
    return float(np.max(np.abs(r)))


def compatibility_residual(table: ConnTable) -> float:
    """max |k_u(L_x y, z) + k_u(y, L_x z)| over basis triples."""
    gram = table.metric.gram_u
    t = np.einsum("abk,kc->abc", table.coeffs, gram)
    return float(np.max(np.abs(t + t.transpose(0, 2, 1))))


def closed_form_L(metric: Metric, x) -> np.ndarray:
    """Matrix of L_x via 1/2 (ad_x - u^-1 ad_{u(x)} + u^-1 ad_x u).

    Valid whenever the base form is the bi-invariant one; must agree with
    the Koszul table columns.
    """
    from .algebra import ad

    spec = metric.spec
    x = _as_elem(spec, x)
    u = metric.iso.matrix
    uinv = metric.iso.inv
    adx = ad(spec, x)
    adux = ad(spec, u @ x)
    return 0.5 * (adx - uinv @ adux + uinv @ adx @ u)


@dataclass(frozen=True)
class CurvOp:
    """The curvature operator R(x, y) as a matrix."""

    x: np.ndarray
    y: np.ndarray
    matrix: np.ndarray


def curvature(table: ConnTable, x, y) -> CurvOp:
    """R(x, y) = L_{[x,y]} - [L_x, L_y]."""
    from .algebra import bracket

    spec = table.spec
    x, y = _as_elem(spec, x), _as_elem(spec, y)
    mx, my = table.left_mult_of(x), table.left_mult_of(y)
    mbr = table.left_mult_of(bracket(spec, x, y))
    return CurvOp(x, y, mbr - (mx @ my - my @ mx))


def _curvature_basis(spec: LambdaSpec, coeffs: np.ndarray) -> np.ndarray:
    """R[a, b] over all basis pairs, for an arbitrary product table."""
    B = basis_brackets(spec)
    M = coeffs.transpose(0, 2, 1)
    l_br = np.einsum("abc,cxy->abxy", B, M)
    comm = np.einsum("aij,bjk->abik", M, M)
    comm = comm - comm.transpose(1, 0, 2, 3)
    return l_br - comm


def curvature_basis(table: ConnTable) -> np.ndarray:
    return _curvature_basis(table.spec, table.coeffs)


def flatness_residual(table) -> float:
    """max-entry norm of R(e_a, e_b) over all basis pairs; 0 means flat.

    Accepts a ConnTable or an AffineProduct.
    """
    return float(np.max(np.abs(_curvature_basis(table.spec, table.coeffs))))


def curvature_norms(table: ConnTable) -> dict[str, float]:
    """Per basis pair a < b, the max-entry norm of R(e_a, e_b)."""
    spec = table.spec
    R = curvature_basis(table)
    names = spec.basis_names
    out = {}
    for a in range(spec.dim):
        for b in range(a + 1, spec.dim):
            out[f"R({names[a]},{names[b]})"] = float(np.max(np.abs(R[a, b])))
    return out


def local_symmetry_residual(table: ConnTable) -> float:
    """max residual of [L_z, R(x,y)] = R(L_z x, y) + R(x, L_z y) over basis triples."""
    spec = table.spec
    L = table.coeffs
    M = table.left_mult
    R = curvature_basis(table)
    lhs = np.einsum("zij,xyjk->zxyik", M, R) - np.einsum("xyij,zjk->zxyik", R, M)
    rhs = np.einsum("zxc,cyik->zxyik", L, R) + np.einsum("zyc,xcik->zxyik", L, R)
    return float(np.max(np.abs(lhs - rhs)))


@dataclass(frozen=True)
class AffineProduct:
    """Left-symmetric product inducing a flat torsion-free connection."""

    spec: LambdaSpec
    coeffs: np.ndarray

    def product(self, x, y) -> np.ndarray:
        x, y = _as_elem(self.spec, x), _as_elem(self.spec, y)
        return np.einsum("a,abc,b->c", x, self.coeffs, y)

    def right_mult_of(self, y) -> np.ndarray:
        """Matrix of x -> r(x, y)."""
        y = _as_elem(self.spec, y)
        return np.einsum("b,abc->ca", y, self.coeffs)


def affine_product(spec: LambdaSpec) -> AffineProduct:
    """The complete flat left-invariant product:

    r(x, y) = 1/2 [x, y] on the derived ideal, r(e_-1, y) = [e_-1, y],
    r(., e_-1) = 0. Its skew part is the bracket, its associator is
    symmetric in the first two slots, and right multiplications are
    nilpotent, so the induced connection is flat and complete.
    """
    B = basis_brackets(spec)
    r = 0.5 * B
    r[0, :, :] = B[0, :, :]
    r[:, 0, :] = 0.0
    r.setflags(write=False)
    return AffineProduct(spec, r)


def skew_minus_bracket_residual(prod: AffineProduct) -> float:
    B = basis_brackets(prod.spec)
    return float(np.max(np.abs(prod.coeffs - prod.coeffs.transpose(1, 0, 2) - B)))


def associator_symmetry_residual(prod: AffineProduct) -> float:
    """max |A(x,y,z) - A(y,x,z)| with A(x,y,z) = r(x, r(y,z)) - r(r(x,y), z)."""
    r = prod.coeffs
    a1 = np.einsum("bcm,amk->abck", r, r)
    a2 = np.einsum("abm,mck->abck", r, r)
    assoc = a1 - a2
    return float(np.max(np.abs(assoc - assoc.transpose(1, 0, 2, 3))))


def right_mult_nilpotency_residual(prod: AffineProduct, n_random: int = 10,
                                   seed: int = 0) -> float:
    """max |R_y^dim| over basis vectors and random y; 0 certifies completeness."""
    spec = prod.spec
    rng = np.random.default_rng(seed)
    worst = 0.0
    ys = [np.eye(spec.dim)[a] for a in range(spec.dim)]
    ys += [rng.standard_normal(spec.dim) for _ in range(n_random)]
    for y in ys:
        m = prod.right_mult_of(y)
        worst = max(worst, float(np.max(np.abs(np.linalg.matrix_power(m, spec.dim)))))
    return worst


def connection_report(metric: Metric) -> dict:
    """Residual summary used by the CLI."""
    table = levi_civita(metric)
    return {
        "torsion_residual": torsion_residual(table),
        "compat_residual": compatibility_residual(table),
        "flatness_residual": flatness_residual(table),
        "locsym_residual": local_symmetry_residual(table),
        "curvature_norms": curvature_norms(table),
    }
