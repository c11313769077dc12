"""Adaptive embedded Runge-Kutta 5(4) integrator with blow-up detection.

Dormand-Prince pair, FSAL, PI step-size control. Termination is explicit
about why integration stopped:

    completed       reached the end of the time span
    blowup          solution max-norm exceeded the blow-up threshold
    step_underflow  controller pushed the step below h_min while the norm
                    was increasing

A step underflow with non-increasing norm raises instead, since that is
stiffness or a bug, not incompleteness evidence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Dormand-Prince coefficients.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
                187 / 2100, 1 / 40])
_E = _B5 - _B4

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
# PI controller exponents for an order-5 propagator.
_ALPHA = 0.7 / 5
_BETA = 0.4 / 5

COMPLETED = "completed"
BLOWUP = "blowup"
STEP_UNDERFLOW = "step_underflow"


@dataclass
class IntegrationResult:
    ts: np.ndarray
    ys: np.ndarray
    status: str
    t_detected: float | None = None
    n_steps: int = 0
    n_rejected: int = 0
    message: str = ""


def _error_norm(err, y_old, y_new, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y_old), np.abs(y_new))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _initial_step(f, t0, y0, f0, direction, rtol, atol):
    # Hairer-style two-stage guess.
    scale = atol + rtol * np.abs(y0)
    d0 = float(np.sqrt(np.mean((y0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * direction * f0
    f1 = f(t0 + h0 * direction, y1)
    d2 = float(np.sqrt(np.mean(((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1)


def solve_rk45(f, t_span, y0, rtol=1e-10, atol=1e-12, h_min=1e-13,
               blowup_threshold=1e8, max_steps=2_000_000,
               checkpoints=None) -> IntegrationResult:
    """Integrate y' = f(t, y) over t_span, recording every accepted step.

    ``checkpoints``: optional increasing times inside the span that the
    integrator must land on exactly (used to compare solutions on a shared
    grid). Backward integration (t1 < t0) is supported.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    y = np.asarray(y0, dtype=float).copy()
    direction = 1.0 if t1 >= t0 else -1.0
    span = abs(t1 - t0)
    if span == 0.0:
        return IntegrationResult(np.array([t0]), y[None, :].copy(), COMPLETED)

    stops = [t1]
    if checkpoints is not None:
        inside = [float(c) for c in checkpoints
                  if (c - t0) * direction > 0 and (t1 - c) * direction > 0]
        stops = sorted(inside, key=lambda c: (c - t0) * direction) + [t1]

    f0 = f(t0, y)
    if not np.all(np.isfinite(f0)):
        raise FloatingPointError(f"right-hand side not finite at t={t0}")
    h = min(_initial_step(f, t0, y, f0, direction, rtol, atol), span)

    ts, ys = [t0], [y.copy()]
    t = t0
    k = np.empty((7, y.size))
    k[6] = f0  # FSAL slot holds f(t, y)
    err_prev = 1.0
    n_steps = n_rejected = 0
    norm_prev = float(np.max(np.abs(y)))
    stop_i = 0

    while (t1 - t) * direction > 0:
        if n_steps >= max_steps:
            raise RuntimeError(f"step budget {max_steps} exhausted at t={t}")
        next_stop = stops[stop_i]
        h = min(h, abs(next_stop - t))
        h = max(h, h_min)
        k[0] = k[6]
        t_new = t + h * direction
        failed_before = False
        while True:
            for i in range(1, 7):
                yi = y + (h * direction) * (k[:i].T @ _A[i])
                k[i] = f(t + _C[i] * h * direction, yi)
            y_new = yi  # stage 7 input equals the order-5 solution
            if not np.all(np.isfinite(y_new)):
                if float(np.max(np.abs(y))) >= norm_prev:
                    return IntegrationResult(
                        np.array(ts), np.array(ys), BLOWUP, t_detected=t,
                        n_steps=n_steps, n_rejected=n_rejected,
                        message="state left the finite range while growing")
                raise FloatingPointError(
                    f"non-finite state near t={t + h * direction} with non-growing norm")
            err_vec = (h * direction) * (k.T @ _E)
            err = _error_norm(err_vec, y, y_new, rtol, atol)
            if err <= 1.0:
                break
            n_rejected += 1
            failed_before = True
            factor = max(_MIN_FACTOR, _SAFETY * err ** (-_ALPHA))
            h *= factor
            if h < h_min:
                if float(np.max(np.abs(y))) >= norm_prev:
                    return IntegrationResult(
                        np.array(ts), np.array(ys), STEP_UNDERFLOW, t_detected=t,
                        n_steps=n_steps, n_rejected=n_rejected,
                        message=f"step underflow below h_min={h_min:g} with growing norm")
                raise RuntimeError(
                    f"step size underflow at t={t} without norm growth; "
                    "refusing to report incompleteness")
            t_new = t + h * direction

        # Accepted.
        n_steps += 1
        norm_prev = float(np.max(np.abs(y)))
        t, y = t_new, y_new
        ts.append(t)
        ys.append(y.copy())
        norm_now = float(np.max(np.abs(y)))
        if norm_now > blowup_threshold:
            return IntegrationResult(
                np.array(ts), np.array(ys), BLOWUP, t_detected=t,
                n_steps=n_steps, n_rejected=n_rejected,
                message=f"max-norm {norm_now:.3e} exceeded threshold")
        if abs(t - next_stop) <= 1e-14 * max(1.0, abs(next_stop)) and stop_i < len(stops) - 1:
            stop_i += 1
        factor = _SAFETY * err ** (-_ALPHA) * err_prev ** _BETA if err > 0 else _MAX_FACTOR
        if failed_before:
            factor = min(1.0, factor)
        h *= min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
        err_prev = max(err, 1e-10)

    return IntegrationResult(np.array(ts), np.array(ys), COMPLETED,
                             n_steps=n_steps, n_rejected=n_rejected)
