"""Small numerical kernels shared across the package.

Matrix powers and inverses delegate to numpy's linear algebra with explicit
conditioning checks layered on top; the spectral radius, scalar root finder,
and finite-difference derivatives are self-contained so their convergence
and failure behaviour stays under our control.
"""

from __future__ import annotations

import numpy as np

from .errors import BracketError, ConvergenceError, NonFiniteError, SingularMatrixError

SINGULARITY_TOL = 1e-12
SPECTRAL_TOL = 1e-10
SPECTRAL_MAX_ITER = 10_000
DERIV_STEP = 1e-5
DERIV_STEP_SECOND = 2e-4
ROOT_TOL = 1e-12
ROOT_MAX_ITER = 200


def mat_pow(m: np.ndarray, k: int) -> np.ndarray:
    """Non-negative integer matrix power (k = 0 gives the identity)."""
    if k < 0:
        raise ValueError("matrix power requires k >= 0")
    return np.linalg.matrix_power(np.asarray(m, dtype=float), k)


def mat_inv(m: np.ndarray) -> np.ndarray:
    """Inverse with an explicit near-singularity check.

    Real input stays real; complex input (e.g. MGF evaluation off the real
    axis) is inverted in complex arithmetic.

    Raises:
        SingularMatrixError: determinant is tiny relative to the matrix scale,
            or the inverse fails to reproduce the identity to a scaled
            residual of 1e-8.
    """
    m = np.asarray(m)
    m = m.astype(complex) if np.iscomplexobj(m) else m.astype(float)
    n = m.shape[0]
    scale = np.abs(m).max()
    if scale == 0.0:
        raise SingularMatrixError("zero matrix")
    det = np.linalg.det(m)
    if abs(det) < SINGULARITY_TOL * scale**n:
        raise SingularMatrixError(f"near-singular matrix: |det| = {abs(det):.3e}")
    try:
        inv = np.linalg.inv(m)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(str(exc)) from exc
    residual = np.abs(m @ inv - np.eye(n)).max()
    if residual > 1e-8 * max(1.0, np.abs(inv).max() * scale):
        raise SingularMatrixError(f"ill-conditioned inverse: residual = {residual:.3e}")
    return inv


def spectral_radius(m: np.ndarray, tol: float = SPECTRAL_TOL,
                    max_iter: int = SPECTRAL_MAX_ITER) -> float:
    """Largest absolute eigenvalue of a non-negative matrix, by power iteration.

    Intended for entrywise non-negative matrices (Perron-Frobenius regime),
    where the dominant eigenvalue is real and the iteration is monotone
    enough for a simple ratio test.

    Raises:
        ConvergenceError: the eigenvalue ratio fails to stabilise.
    """
    m = np.asarray(m, dtype=float)
    if np.any(m < 0):
        raise ValueError("spectral_radius expects a non-negative matrix")
    n = m.shape[0]
    v = np.full(n, 1.0 / n)
    lam = 0.0
    for _ in range(max_iter):
        w = m @ v
        norm = np.abs(w).max()
        if norm == 0.0:
            return 0.0  # nilpotent-like action on the positive cone
        w /= norm
        if abs(norm - lam) <= tol * max(1.0, abs(norm)):
            return float(norm)
        lam = norm
        v = w
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} steps (last ratio {lam:.6e})"
    )


def find_root(f, lo: float, hi: float, tol: float = ROOT_TOL,
              max_iter: int = ROOT_MAX_ITER) -> float:
    """Root of a scalar function on a bracketing interval.

    Uses bisection with secant acceleration (a safeguarded false-position
    step), succeeding when either |f(x)| <= tol or the bracket width shrinks
    below tol * max(1, |x|). Infinite function values at the endpoints are
    tolerated; they simply force bisection.

    Raises:
        BracketError: f(lo) and f(hi) do not straddle zero.
        ConvergenceError: iteration cap reached.
    """
    flo, fhi = f(lo), f(hi)
    if not np.isfinite(flo) and not np.isfinite(fhi):
        raise BracketError("function is non-finite at both endpoints")
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise BracketError(
            f"no sign change on [{lo!r}, {hi!r}]: f(lo)={flo!r}, f(hi)={fhi!r}"
        )
    a, b, fa, fb = lo, hi, flo, fhi
    last_side = 0
    stalled = 0
    for _ in range(max_iter):
        # Force bisection when secant updates hug one endpoint (regula-falsi
        # stagnation on convex functions) so the bracket provably shrinks.
        secant = (stalled < 2 and np.isfinite(fa) and np.isfinite(fb)
                  and fa != fb)
        if secant:
            x = b - fb * (b - a) / (fb - fa)
            if not (min(a, b) < x < max(a, b)):
                x = 0.5 * (a + b)
                secant = False
        else:
            x = 0.5 * (a + b)
        fx = f(x)
        if np.isnan(fx):
            raise NonFiniteError(f"f({x!r}) is NaN during root search")
        if fx == 0.0:
            return float(x)
        if abs(fx) <= tol and np.isfinite(fx):
            return float(x)
        if np.sign(fx) == np.sign(fa):
            a, fa = x, fx
            side = -1
        else:
            b, fb = x, fx
            side = 1
        stalled = stalled + 1 if (secant and side == last_side) else (1 if secant else 0)
        last_side = side
        if abs(b - a) <= tol * max(1.0, abs(x)):
            return float(0.5 * (a + b))
    raise ConvergenceError(f"root search did not converge in {max_iter} iterations")


def derivative(f, x: float, order: int = 1, step: float | None = None) -> float:
    """First or second derivative by central differences with one Richardson pass.

    Args:
        f: scalar function, assumed smooth near x.
        x: evaluation point.
        order: 1 or 2.
        step: base step; the default scales DERIV_STEP (first order) or
            DERIV_STEP_SECOND (second order, where roundoff grows as 1/h^2)
            by max(1, |x|).

    Raises:
        NonFiniteError: any stencil evaluation is non-finite.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if step is not None:
        h = step
    else:
        base = DERIV_STEP if order == 1 else DERIV_STEP_SECOND
        h = base * max(1.0, abs(x))

    def central(hh: float) -> float:
        if order == 1:
            num = f(x + hh) - f(x - hh)
            return num / (2.0 * hh)
        num = f(x + hh) - 2.0 * f(x) + f(x - hh)
        return num / (hh * hh)

    d1 = central(h)
    d2 = central(h / 2.0)
    if not (np.isfinite(d1) and np.isfinite(d2)):
        raise NonFiniteError(f"non-finite stencil for derivative at x={x!r}")
    # Richardson: central differences have error O(h^2)
    return float((4.0 * d2 - d1) / 3.0)
