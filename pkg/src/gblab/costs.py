"""m-periodic vector-valued cost families on (0,1].

A cost is a family phi_1..phi_m of R^d-valued functions, piecewise regular on
the Gauss cells [1/(n+1), 1/n], with declared moment metadata: alpha0 is the
supremum of exponents a with integral |phi|^a < infinity (consumers subtract
their own epsilon), kappa0/lambda0 the declared Holder data.

Transcendental ingredients of the estermann and modsym built-ins come from
provider objects (see gblab.arithfun); this module stays dependency-light.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np

GAMMA0 = float(np.euler_gamma)


class CostDomainError(ValueError):
    """Cost evaluated outside (0,1] or produced a non-finite value."""


def floor_inv(xs: np.ndarray) -> np.ndarray:
    """floor(1/x) with cells (1/(n+1), 1/n] closed on the right.

    The 2^-50 relative nudge keeps x = float(1/n) in cell n despite the
    1/x round-trip landing an ulp below n; sweep kernels use exact integer
    division instead, so this only affects quadrature nodes.
    """
    return np.floor((1.0 + 2.0**-50) / xs)


class EstermannProvider(Protocol):
    zeta_half_sq: float

    def curly_e(self, u: np.ndarray) -> np.ndarray: ...


class ModSymProvider(Protocol):
    weight: int

    def phi_f(self, u: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class CostFunction:
    """An m-periodic family of R^d-valued costs with moment metadata."""

    label: str
    m: int
    d: int
    alpha0: float
    kappa0: float
    lambda0: float
    params: dict = field(default_factory=dict)
    # vectorized evaluator: (j in 1..m, xs array) -> (len(xs), d) array
    eval_vec: Callable[[int, np.ndarray], np.ndarray] = None
    # id of the specialized sweep kernel, if one exists (see birkhoff)
    kernel_id: int | None = None

    def eval_many(self, j: int, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if xs.size and (xs.min() <= 0.0 or xs.max() > 1.0):
            raise CostDomainError("cost argument outside (0,1]")
        jj = (j - 1) % self.m + 1
        out = np.asarray(self.eval_vec(jj, np.atleast_1d(xs)), dtype=float)
        out = out.reshape(-1, self.d)
        if not np.all(np.isfinite(out)):
            raise CostDomainError(f"non-finite cost value for {self.label}")
        return out


def eval_cost(c: CostFunction, j: int, x: float) -> np.ndarray:
    """phi_j(x) as a length-d vector; j is reduced mod m."""
    return c.eval_many(j, np.array([float(x)]))[0]


def _scalar(fn):
    def ev(j, xs):
        return fn(xs)[:, None]

    return ev


def make_builtin(kind: str, **params) -> CostFunction:
    """Construct one of the paper-backed built-in costs.

    kinds: constant, log, floor_power(lambda_), dedekind,
    estermann(provider), modsym(provider), custom(fn, ...).
    """
    if kind == "constant":
        value = float(params.get("value", 1.0))
        return CostFunction(
            "constant", 1, 1, math.inf, 1.0, 1.0, {"value": value},
            _scalar(lambda xs: np.full_like(xs, value)), kernel_id=0,
        )

    if kind == "log":
        # -log x, the denominator-detecting cost: S(a/q) = log q
        return CostFunction(
            "log", 1, 1, math.inf, 1.0, 1.0, {},
            _scalar(lambda xs: -np.log(xs)), kernel_id=1,
        )

    if kind == "floor_power":
        lam = float(params["lambda_"])
        if lam <= 0:
            raise ValueError("floor_power requires lambda > 0")
        return CostFunction(
            "floor_power", 1, 1, 1.0 / lam, 1.0, min(1.0, 0.5 / lam),
            {"lambda_": lam},
            _scalar(lambda xs: floor_inv(xs) ** lam), kernel_id=2,
        )

    if kind == "dedekind":
        # phi_j(x) = (-1)^{j-1} floor(1/x): 12*s(x) up to the bounded defect
        def ev(j, xs):
            sign = 1.0 if j % 2 == 1 else -1.0
            return (sign * floor_inv(xs))[:, None]

        return CostFunction("dedekind", 2, 1, 1.0, 1.0, 0.5, {}, ev, kernel_id=3)

    if kind == "identity":
        # smooth bounded cost phi(x) = x; the quasi-powers workhorse
        return CostFunction(
            "identity", 1, 1, math.inf, 1.0, 1.0, {},
            _scalar(lambda xs: xs), kernel_id=4,
        )

    if kind == "estermann":
        provider: EstermannProvider = params.get("provider")
        if provider is None:
            raise ValueError("estermann cost requires an arithfun provider")
        z2 = provider.zeta_half_sq

        def ev(j, xs):
            sgn = -1.0 if j % 2 == 1 else 1.0  # argument sign (-1)^j
            L = np.log(1.0 / xs) + GAMMA0 - math.log(8 * math.pi)
            s = 0.5 / np.sqrt(xs)
            ee = provider.curly_e(sgn * xs)
            re = s * (L - math.pi / 2) + z2 + ee.real
            im = (1.0 if j % 2 == 1 else -1.0) * s * (L + math.pi / 2) + ee.imag
            return np.stack([re, im], axis=1)

        return CostFunction(
            "estermann", 2, 2, 2.0, 0.5, 1.0, {"provider": provider}, ev,
        )

    if kind == "modsym":
        provider: ModSymProvider = params.get("provider")
        if provider is None:
            raise ValueError("modsym cost requires an arithfun form provider")
        k = provider.weight
        omega = (-1j) ** (k // 2 - 1)

        def ev(j, xs):
            sgn = 1.0 if j % 2 == 1 else -1.0  # (-1)^{j-1}
            vals = omega ** (j - 1) * provider.phi_f(sgn * xs)
            return np.stack([vals.real, vals.imag], axis=1)

        return CostFunction(
            "modsym", 4, 2, math.inf, 0.9, 1.0,
            {"provider": provider, "weight": k}, ev,
        )

    if kind == "custom":
        fn = params["fn"]
        m = int(params.get("m", 1))
        d = int(params.get("d", 1))
        alpha0 = float(params.get("alpha0", math.inf))
        label = params.get("label", "custom")

        if m == 1 and d == 1:
            ev = _scalar(lambda xs: np.asarray(fn(xs), dtype=float))
        else:
            def ev(j, xs):
                return np.asarray(fn(j, xs), dtype=float).reshape(len(xs), d)

        return CostFunction(
            label, m, d, alpha0,
            float(params.get("kappa0", 1.0)), float(params.get("lambda0", 1.0)),
            {}, ev, kernel_id=4 if label == "identity" else None,
        )

    raise ValueError(f"unknown cost kind: {kind}")


def window_cost(c: CostFunction, xs: np.ndarray) -> np.ndarray:
    """The m-step window phi(x) = sum_{j=1..m} phi_j(T^{j-1} x), evaluated in
    floating point (T iterated numerically; exact orbits are the birkhoff
    module's job)."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    total = np.zeros((len(xs), c.d))
    cur = xs.copy()
    for j in range(1, c.m + 1):
        total += c.eval_many(j, cur)
        if j < c.m:
            cur = 1.0 / cur
            cur -= np.floor(cur)
            cur[cur == 0.0] = 1.0  # endpoint convention: T(1/n) treated via x=1 cell
    return total
