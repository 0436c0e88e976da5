"""Collocation discretization of the twisted Gauss-Kuzmin-Wirsing transfer
operator

    (H_{s,t}^{(j)} f)(x) = sum_n e^{i<t, phi_j(1/(n+x))>} (n+x)^{-s} f(1/(n+x)),

its m-fold composite, dominant eigenpairs, the root s_0(t) of
lambda(s_0(t), t) = 1, operator-norm probes on the line Re s = 2, and the
asymptotic mean/variance functionals of the cost.

Basis: polynomial interpolation at Chebyshev-Lobatto nodes mapped to [0,1];
branch images 1/(n+x) are analytic there, so spectral accuracy is reached at
modest degree.  Branches n > Nb are folded in with a midpoint Euler-Maclaurin
tail in n (order 4), whose integral term is evaluated after the substitution
y = 1/(u+x).  The n-tail assumes the cost is continuous at small arguments;
floor-type costs are only used with t = 0 where the weight is cost-free.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .costs import CostFunction, make_builtin
from .oscint import LOG2, xi, integrate_xi

ENTROPY_D1 = math.pi**2 / (12 * LOG2)  # -d/ds lambda at (2,0) for m = 1


class DeclaredMomentError(ValueError):
    """Cost's declared alpha0 too small for the requested functional."""


class ResolventConditionError(RuntimeError):
    """(Id - H^m) solve residual exceeded tolerance."""


# ----------------------------------------------------------------------
# Chebyshev-Lobatto collocation on [0,1]
# ----------------------------------------------------------------------

def cheb_nodes(N: int) -> np.ndarray:
    """N+1 Chebyshev-Lobatto points on [0,1], decreasing from 1 to 0."""
    return 0.5 * (1.0 + np.cos(np.pi * np.arange(N + 1) / N))


def _bary_weights(N: int) -> np.ndarray:
    w = np.ones(N + 1)
    w[1::2] = -1.0
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def cardinal_matrix(nodes: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """C[a, i] = L_i(ys[a]) for the Lagrange cardinal functions of nodes."""
    w = _bary_weights(len(nodes) - 1)
    diff = ys[:, None] - nodes[None, :]
    out = np.empty((len(ys), len(nodes)))
    exact = np.abs(diff) < 1e-15
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = w[None, :] / diff
        out = terms / terms.sum(axis=1)[:, None]
    hit = exact.any(axis=1)
    if np.any(hit):
        out[hit] = 0.0
        idx = np.argmax(exact[hit], axis=1)
        out[np.nonzero(hit)[0], idx] = 1.0
    return out


def integration_weights(nodes: np.ndarray) -> np.ndarray:
    """Weights w with w @ f(nodes) = int_0^1 p(x) dx for the interpolant p
    (Clenshaw-Curtis on the mapped Lobatto grid)."""
    N = len(nodes) - 1
    theta = np.pi * np.arange(N + 1) / N
    V = np.cos(np.outer(np.arange(N + 1), theta))  # T_j at the nodes
    moments = np.zeros(N + 1)
    for j in range(0, N + 1, 2):
        moments[j] = 0.5 * (2.0 / (1.0 - j * j)) if j != 1 else 0.0
    moments[0] = 1.0
    return np.linalg.solve(V, moments)


# ----------------------------------------------------------------------
# operator assembly
# ----------------------------------------------------------------------

@dataclass
class OperatorDiscretization:
    N: int
    Nb: int
    tail_order: int
    s: complex
    t: np.ndarray
    cost: CostFunction | None
    nodes: np.ndarray
    int_weights: np.ndarray
    factors: list[np.ndarray]  # H^{(j)} collocation matrices, j = 1..m
    matrix: np.ndarray  # Pi_{s,t} = H^{(m)} ... H^{(1)}

    @property
    def m(self) -> int:
        return len(self.factors)

    def apply(self, values: np.ndarray) -> np.ndarray:
        return self.matrix @ values

    def integral(self, values: np.ndarray) -> complex:
        return complex(self.int_weights @ values)


def _branch_weight(s: complex, t: np.ndarray, cost, j: int, y: np.ndarray,
                   base: np.ndarray) -> np.ndarray:
    """e^{i<t, phi_j(y)>} * base^{-s} for branch images y = 1/(n+x)."""
    w = np.exp(-s * np.log(base))
    if cost is not None and np.any(t != 0.0):
        ph = cost.eval_many(j, y) @ t
        w = w * np.exp(1j * ph)
    return w


def _assemble_factor(s: complex, t: np.ndarray, cost, j: int,
                     nodes: np.ndarray, Nb: int, tail_order: int) -> np.ndarray:
    N1 = len(nodes)
    M = np.zeros((N1, N1), dtype=complex)
    for n in range(1, Nb + 1):
        y = 1.0 / (n + nodes)
        w = _branch_weight(s, t, cost, j, y, n + nodes)
        M += w[:, None] * cardinal_matrix(nodes, y)

    # Euler-Maclaurin tail over n > Nb (midpoint form, order tail_order)
    def F(u: float) -> np.ndarray:
        y = 1.0 / (u + nodes)
        w = _branch_weight(s, t, cost, j, y, u + nodes)
        return w[:, None] * cardinal_matrix(nodes, y)

    U = Nb + 0.5
    M += _tail_integral(s, t, cost, j, nodes, U)
    h = 0.25
    d1 = (F(U - 2 * h) - 8 * F(U - h) + 8 * F(U + h) - F(U + 2 * h)) / (12 * h)
    M += d1 / 24.0
    if tail_order >= 4:
        d3 = (-F(U - 3 * h) + 8 * F(U - 2 * h) - 13 * F(U - h)
              + 13 * F(U + h) - 8 * F(U + 2 * h) + F(U + 3 * h)) / (8 * h**3)
        M -= 7.0 * d3 / 5760.0
    return M


def _tail_integral(s: complex, t: np.ndarray, cost, j: int,
                   nodes: np.ndarray, U: float) -> np.ndarray:
    """int_U^inf F(u) du after y = 1/(u+x): int_0^{1/(U+x)} g(y) y^{s-2} dy."""
    N1 = len(nodes)
    out = np.zeros((N1, N1), dtype=complex)
    gl_nodes, gl_w = np.polynomial.legendre.leggauss(24)
    for i, x in enumerate(nodes):
        y0 = 1.0 / (U + x)
        edges = y0 * np.concatenate([[0.0], 2.0 ** np.arange(-48, 1, dtype=float)])
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        ys = (mid[:, None] + half[:, None] * gl_nodes[None, :]).ravel()
        ws = (half[:, None] * gl_w[None, :]).ravel()
        fac = np.exp((s - 2.0) * np.log(ys)) * ws
        if cost is not None and np.any(t != 0.0):
            fac = fac * np.exp(1j * (cost.eval_many(j, ys) @ t))
        out[i] = fac @ cardinal_matrix(nodes, ys)
    return out


def build_operator(s: complex, t=0.0, cost: CostFunction | None = None,
                   N: int = 32, Nb: int = 128, tail_order: int = 4) -> OperatorDiscretization:
    """Collocation matrix of Pi_{s,t} = H^{(m)} ... H^{(1)}."""
    if N < 8 or Nb < 10:
        raise ValueError("need N >= 8 and Nb >= 10")
    if complex(s).real <= 1.0:
        raise ValueError("branch sum diverges for Re(s) <= 1")
    s = complex(s)
    m = cost.m if cost is not None else 1
    t = np.atleast_1d(np.asarray(t, dtype=float))
    nodes = cheb_nodes(N)
    factors = [
        _assemble_factor(s, t, cost, j, nodes, Nb, tail_order)
        for j in range(1, m + 1)
    ]
    matrix = factors[0]
    for f in factors[1:]:
        matrix = f @ matrix  # H^{(m)} ... H^{(1)}
    return OperatorDiscretization(
        N, Nb, tail_order, s, t, cost, nodes, integration_weights(nodes),
        factors, matrix,
    )


# ----------------------------------------------------------------------
# dominant spectrum
# ----------------------------------------------------------------------

@dataclass
class SpectralResult:
    lam: complex
    eigfn: np.ndarray  # values at the nodes, normalized to unit integral
    subdominant_modulus: float
    resolution_error: float
    nodes: np.ndarray

    def eigfn_at(self, xs: np.ndarray) -> np.ndarray:
        return cardinal_matrix(self.nodes, np.atleast_1d(np.asarray(xs, float))) @ self.eigfn

    def to_json(self) -> dict:
        return {
            "lambda": {"re": self.lam.real, "im": self.lam.imag},
            "eigfn_nodes": self.nodes.tolist(),
            "eigfn_re": self.eigfn.real.tolist(),
            "eigfn_im": self.eigfn.imag.tolist(),
            "subdominant_modulus": self.subdominant_modulus,
            "resolution_error": self.resolution_error,
        }


class EigenConvergenceError(RuntimeError):
    """Power iteration failed to settle: (s,t) out of the perturbative regime."""


def _power_iteration(M: np.ndarray, weights: np.ndarray, v0: np.ndarray,
                     max_iter: int = 8000, tol: float = 1e-15):
    # weights is the eigenvalue functional; it must not annihilate the
    # dominant eigenvector of M (for deflated iterations pass a generic one)
    v = v0.astype(complex)
    lam_old = 0.0
    for _ in range(max_iter):
        w = M @ v
        lam = (weights @ w) / (weights @ v)
        v = w / np.max(np.abs(w))
        if abs(lam - lam_old) < tol * max(1.0, abs(lam)):
            return lam, v
        lam_old = lam
    raise EigenConvergenceError("power iteration did not converge")


def leading_eigen(disc: OperatorDiscretization, *, resolution_check: bool = True) -> SpectralResult:
    """Dominant eigenpair by power iteration, subdominant modulus by a single
    deflation, resolution error by re-solving at half the degree."""
    nodes, weights = disc.nodes, disc.int_weights
    v0 = xi(nodes)
    lam, v = _power_iteration(disc.matrix, weights, v0)
    v = v / (weights @ v)  # unit integral

    lam_left, u = _power_iteration(disc.matrix.T, weights, v0)
    denom = u @ v
    deflated = disc.matrix - lam * np.outer(v, u) / denom
    rng = np.random.default_rng(12345)
    w0 = rng.standard_normal(len(nodes)) + 1j * rng.standard_normal(len(nodes))
    w0 = w0 - v * (u @ w0) / denom
    # the integral functional annihilates the subdominant eigenspace; use a
    # generic functional for the deflated iteration
    phi = rng.standard_normal(len(nodes))
    try:
        lam2, _ = _power_iteration(deflated, phi, w0, max_iter=4000, tol=1e-12)
        sub = abs(lam2)
    except EigenConvergenceError:
        sub = float("nan")

    res_err = 0.0
    if resolution_check and disc.N >= 16:
        half = build_operator(disc.s, disc.t, disc.cost, N=disc.N // 2,
                              Nb=disc.Nb, tail_order=disc.tail_order)
        lam_half, _ = _power_iteration(half.matrix, half.int_weights, xi(half.nodes))
        res_err = abs(lam - lam_half)
    return SpectralResult(lam, v, sub, res_err, nodes)


def eigenvalue(s: complex, t=0.0, cost: CostFunction | None = None,
               N: int = 32, Nb: int = 128) -> complex:
    disc = build_operator(s, t, cost, N=N, Nb=Nb)
    lam, _ = _power_iteration(disc.matrix, disc.int_weights, xi(disc.nodes))
    return lam


def entropy_constant(m: int = 1) -> float:
    """The constant d = m pi^2/(12 log 2) = -d/ds lambda(2,0)."""
    return m * ENTROPY_D1


def solve_s0(t, cost: CostFunction, *, N: int = 32, Nb: int = 128,
             tol: float = 1e-12, max_iter: int = 40) -> complex:
    """Solve lambda(s_0(t), t) = 1 near s = 2 by a Newton step seeded with
    the analytic slope -d, then secant iteration."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    d = entropy_constant(cost.m if cost is not None else 1)

    def F(s: complex) -> complex:
        return eigenvalue(s, t, cost, N=N, Nb=Nb) - 1.0

    s0 = 2.0 + 0.0j
    f0 = F(s0)
    if abs(f0) <= tol:
        return s0
    s1 = s0 - f0 / (-d)
    f1 = F(s1)
    for _ in range(max_iter):
        if abs(f1) <= tol:
            return s1
        denom = f1 - f0
        if denom == 0:
            break
        s2 = s1 - f1 * (s1 - s0) / denom
        s0, f0, s1, f1 = s1, f1, s2, F(s2)
    if abs(f1) <= 1e-10:
        return s1
    raise EigenConvergenceError(
        f"s0 iteration stalled at s = {s1} with |lambda - 1| = {abs(f1):.2e}"
    )


# ----------------------------------------------------------------------
# asymptotic mean and variance of the cost
# ----------------------------------------------------------------------

def _window_funcs(cost: CostFunction):
    """phi-window and log T-product as float evaluators on (0,1]."""
    m = cost.m

    def window(xs: np.ndarray) -> np.ndarray:
        xs = np.atleast_1d(np.asarray(xs, float))
        total = np.zeros((len(xs), cost.d))
        cur = xs.copy()
        for j in range(1, m + 1):
            total += cost.eval_many(j, cur)
            if j < m:
                cur = 1.0 / cur - np.floor(1.0 / cur)
                cur[cur <= 0.0] = 1.0
        return total

    def log_T_prod(xs: np.ndarray) -> np.ndarray:
        xs = np.atleast_1d(np.asarray(xs, float))
        out = np.zeros(len(xs))
        cur = xs.copy()
        for j in range(m):
            out += np.log(cur)
            if j < m - 1:
                cur = 1.0 / cur - np.floor(1.0 / cur)
                cur[cur <= 0.0] = 1.0
        return out

    return window, log_T_prod


def _apply_H_pow_to_function(fn, m: int, nodes: np.ndarray, Nb: int = 200):
    """(H^m [fn])(nodes) with the first application done on the exact
    function values (fn may be non-polynomial near 0), later ones via the
    collocation matrix."""
    disc = build_operator(2.0, 0.0, None, N=len(nodes) - 1, Nb=Nb)
    gl_nodes, gl_w = np.polynomial.legendre.leggauss(24)

    def H_once_exact(xs: np.ndarray) -> np.ndarray:
        out = np.zeros(len(xs), dtype=complex)
        for n in range(1, Nb + 1):
            y = 1.0 / (n + xs)
            out += fn(y) / (n + xs) ** 2
        for i, x in enumerate(xs):
            y0 = 1.0 / (Nb + 0.5 + x)
            edges = y0 * np.concatenate([[0.0], 2.0 ** np.arange(-48, 1, dtype=float)])
            mid = 0.5 * (edges[1:] + edges[:-1])
            half = 0.5 * (edges[1:] - edges[:-1])
            ys = (mid[:, None] + half[:, None] * gl_nodes[None, :]).ravel()
            ws = (half[:, None] * gl_w[None, :]).ravel()
            out[i] += np.sum(fn(ys) * ws)
            u = Nb + 0.5

            def g(uu):
                return fn(np.array([1.0 / (uu + x)]))[0] / (uu + x) ** 2

            h = 0.25
            out[i] += (g(u - 2 * h) - 8 * g(u - h) + 8 * g(u + h) - g(u + 2 * h)) / (12 * h) / 24.0
        return out

    vals = H_once_exact(nodes)
    for _ in range(m - 1):
        vals = disc.matrix @ vals
    return vals, disc


def asymptotic_variance(cost: CostFunction, *, N: int = 40, Nb: int = 200,
                        resolvent_tol: float = 1e-8):
    """(mu_phi, Sigma_phi): asymptotic mean vector and variance matrix of the
    Birkhoff sums of the cost, via psi = phi + mu*log T-product and the
    resolvent K[psi] = (Id - H^m)^{-1} N^m [psi xi] / xi.

    Requires declared alpha0 > 2 (second moments must exist).
    """
    if not cost.alpha0 > 2:
        raise DeclaredMomentError(
            f"alpha0 = {cost.alpha0} <= 2: variance functional undefined"
        )
    m, d = cost.m, cost.d
    dd = entropy_constant(m)
    window, log_T_prod = _window_funcs(cost)

    mu = np.array([
        complex(integrate_xi(lambda x: window(x)[:, r])).real / dd
        for r in range(d)
    ])

    def psi(xs: np.ndarray) -> np.ndarray:
        return window(xs) + np.outer(log_T_prod(xs), mu)

    nodes = cheb_nodes(N)
    weights = integration_weights(nodes)
    xin = xi(nodes)

    # chi xi = (Id - H^m + P)^{-1} H^m [psi xi]  (P kills the neutral direction;
    # P[psi xi] = 0 by construction of psi)
    chi = np.zeros((len(nodes), d))
    disc = None
    for r in range(d):
        rhs, disc = _apply_H_pow_to_function(
            lambda y, r=r: psi(y)[:, r] * xi(y), m, nodes, Nb=Nb
        )
        Hm = np.linalg.matrix_power(disc.matrix, m) if m > 1 else disc.matrix
        P = np.outer(xin, weights)
        A = np.eye(len(nodes)) - Hm + P
        u = np.linalg.solve(A, rhs)
        resid = np.max(np.abs(A @ u - rhs)) / max(1.0, np.max(np.abs(rhs)))
        if resid > resolvent_tol:
            raise ResolventConditionError(f"resolvent residual {resid:.2e}")
        chi[:, r] = u.real / xin

    def chi_at(xs: np.ndarray) -> np.ndarray:
        return cardinal_matrix(nodes, np.atleast_1d(xs)) @ chi

    sigma = np.zeros((d, d))
    for r in range(d):
        for c in range(r, d):
            pp = complex(
                integrate_xi(lambda x: psi(x)[:, r] * psi(x)[:, c])
            ).real
            pk = complex(
                integrate_xi(lambda x: psi(x)[:, r] * chi_at(x)[:, c])
            ).real
            kp = complex(
                integrate_xi(lambda x: psi(x)[:, c] * chi_at(x)[:, r])
            ).real
            sigma[r, c] = sigma[c, r] = (pp + pk + kp) / dd
    return mu.real, sigma


# ----------------------------------------------------------------------
# operator-norm probes on Re s = 2
# ----------------------------------------------------------------------

def _apply_H_to_witness(s: complex, theta_knots: np.ndarray, theta_vals: np.ndarray,
                        xs: np.ndarray, Nb: int = 400) -> np.ndarray:
    """(H_s f)(xs) for the witness f = xi * exp(i theta), theta piecewise
    linear; direct branches plus a midpoint-EM tail."""

    def f(y):
        th = np.interp(y, theta_knots, theta_vals)
        return xi(y) * np.exp(1j * th)

    out = np.zeros(len(xs), dtype=complex)
    for n in range(1, Nb + 1):
        y = 1.0 / (n + xs)
        out += np.exp(-s * np.log(n + xs)) * f(y)
    gl_nodes, gl_w = np.polynomial.legendre.leggauss(24)
    for i, x in enumerate(xs):
        y0 = 1.0 / (Nb + 0.5 + x)
        edges = y0 * np.concatenate([[0.0], 2.0 ** np.arange(-40, 1, dtype=float)])
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        ys = (mid[:, None] + half[:, None] * gl_nodes[None, :]).ravel()
        ws = (half[:, None] * gl_w[None, :]).ravel()
        out[i] += np.sum(np.exp((s - 2.0) * np.log(ys)) * f(ys) * ws)
    return out


def spectral_gap_probe(tau: float, sigma: float = 2.0, grid: int = 24,
                       *, n_witness: int = 64, seed: int = 7) -> float:
    """Witness-based estimate of ||H_{sigma+i tau}||_0: the maximum over a
    family of witnesses f = xi e^{i theta} (theta == 0 included, then random
    piecewise-linear phases) of sup_x |H[f](x)| / xi(x).

    This is a lower bound on the true norm used as its estimate; the row-sum
    upper bound is exposed separately (operator_norm_rowsum_bound).
    """
    s = complex(sigma, tau)
    xs = cheb_nodes(grid)[1:-1]
    rng = np.random.default_rng(seed)
    best = 0.0
    knots = np.linspace(0.0, 1.0, 9)
    zero = np.zeros_like(knots)
    families = [zero] + [rng.uniform(0, 2 * np.pi, size=len(knots)) for _ in range(n_witness)]
    for th in families:
        vals = _apply_H_to_witness(s, knots, th, xs)
        best = max(best, float(np.max(np.abs(vals) / xi(xs))))
    return best


def operator_norm_rowsum_bound(tau: float, sigma: float = 2.0, grid: int = 24) -> float:
    """sup_x (1/xi(x)) sum_n |(n+x)^{-s}| xi(1/(n+x)): the triangle-inequality
    row-sum bound (equals 1 at sigma = 2 for every tau)."""
    xs = cheb_nodes(grid)[1:-1]
    vals = _apply_H_to_witness(complex(sigma, 0.0), np.array([0.0, 1.0]),
                               np.array([0.0, 0.0]), xs)
    return float(np.max(np.abs(vals) / xi(xs)))
