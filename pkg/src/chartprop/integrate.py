"""Adaptive Dormand-Prince 5(4) integration with dense output.

The chart ODE systems are small (3 or 8 real unknowns) and non-stiff
for bounded drives, so an explicit embedded pair with PI step control
is the right tool. The integrator is deliberately generic: it works on
flat real vectors and knows nothing about charts except through an
optional escape predicate, which lets it stop cleanly when a Riccati
trajectory runs off its coordinate chart.

Dense output uses the classic 4th-order interpolant attached to the
pair, exact at both step endpoints, so requested sample times never
trigger extra right-hand-side evaluations or step-size manipulation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

# Dormand-Prince 5(4) tableau. _A rows hold the stage weights, _C the
# stage times, _E the (5th minus 4th order) error weights including the
# first-same-as-last stage, _D the dense-output weights.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = (
    np.array([], dtype=float),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
)
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920,
               -17253 / 339200, 22 / 525, -1 / 40])
_D = np.array([-12715105075 / 11282082432, 0.0, 87487479700 / 32700410799,
               -10690763975 / 1880347072, 701980252875 / 199316789632,
               -1453857185 / 822651844, 69997945 / 29380423])

# PI controller constants (step exponent 1/5 with 0.04 Lund stabilization).
_EXPO = 0.17
_BETA = 0.04
_SAFETY = 0.9
_FAC_MIN = 0.1   # strongest allowed shrink of h/h_new
_FAC_MAX = 5.0   # strongest allowed growth of h/h_new


class IntegrationError(RuntimeError):
    """Base class for integration failures."""


class ChartSingularityError(IntegrationError):
    """The trajectory ran off its coordinate chart (Riccati blow-up)."""

    def __init__(self, time):
        self.time = time
        super().__init__(f"chart singularity near t = {time:.12g}")


class StepLimitError(IntegrationError):
    """The step budget ran out before reaching the end time."""


class NonFiniteDerivativeError(IntegrationError):
    """The right-hand side returned NaN or infinity."""

    def __init__(self, time):
        self.time = time
        super().__init__(f"non-finite derivative at t = {time:.12g}")


@dataclass(frozen=True)
class IntegratorSettings:
    """Step-control parameters.

    initial_step defaults to max_step / 100; the controller adapts
    within a couple of steps anyway, so the starting guess only needs
    the right order of magnitude.
    """

    max_step: float
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    initial_step: Optional[float] = None
    max_steps: int = 10_000_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")
        if self.initial_step is None:
            object.__setattr__(self, "initial_step", self.max_step / 100.0)
        if not self.initial_step > 0:
            raise ValueError("initial_step must be positive")
        if not self.max_steps > 0:
            raise ValueError("max_steps must be positive")


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of one integration run.

    times is strictly increasing and starts at t_start. For a completed
    run it ends at t_end; for an early stop (singularity, step limit)
    it ends at the last committed step time and `status` says why.
    """

    times: np.ndarray            # (N,)
    states: np.ndarray           # (N, d) flat real states
    status: str                  # "completed" | "singularity" | "step_limit"
    singularity_time: Optional[float] = None

    def require_completed(self) -> "Trajectory":
        if self.status == "singularity":
            raise ChartSingularityError(self.singularity_time)
        if self.status == "step_limit":
            raise StepLimitError(
                f"step limit hit at t = {self.times[-1]:.12g}")
        return self

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def _dense_eval(y0, y1, k, h, thetas):
    # 4th-order interpolant over one accepted step; exact at theta 0 and 1.
    delta = y1 - y0
    bspl = h * k[0] - delta
    cont4 = delta - h * k[6] - bspl
    cont5 = h * (_D @ k)
    th = np.asarray(thetas)[:, None]
    return y0 + th * (delta + (1.0 - th) * (bspl + th * (cont4 + (1.0 - th) * cont5)))


def integrate(rhs, initial, t_start, t_end, settings: IntegratorSettings,
              sample_times, escape=None) -> Trajectory:
    """Propagate d/dt y = rhs(t, y) from t_start to t_end.

    rhs maps (t, flat state) to a flat derivative array. sample_times
    must lie within [t_start, t_end]; t_start and t_end are always
    included in the output grid. escape, if given, is a predicate on
    the flat state; the run stops with singularity status once only
    escaping steps remain, bracketing the blow-up within one tiny step.
    """
    t_start = float(t_start)
    t_end = float(t_end)
    if not t_end > t_start:
        raise ValueError("t_end must exceed t_start")
    span = t_end - t_start

    samples = np.unique(np.concatenate(
        (np.asarray(sample_times, dtype=float).ravel(), [t_start, t_end])))
    if samples[0] < t_start or samples[-1] > t_end:
        raise ValueError("sample times must lie within [t_start, t_end]")

    y = np.array(initial, dtype=float)
    if y.ndim != 1:
        raise ValueError("initial state must be a flat vector")

    out_times = [t_start]
    out_states = [y.copy()]
    next_sample = 1  # samples[0] == t_start is already recorded

    k1 = np.asarray(rhs(t_start, y), dtype=float)
    if not np.all(np.isfinite(k1)):
        raise NonFiniteDerivativeError(t_start)

    n_stages = 7
    k = np.empty((n_stages, y.size))
    k[0] = k1

    h = min(settings.initial_step, settings.max_step, span)
    h_floor = 1e-12 * span
    facold = 1e-4
    just_rejected = False
    status = None
    singularity_time = None
    t = t_start
    attempts = 0

    while True:
        if t >= t_end:
            status = "completed"
            break
        if attempts >= settings.max_steps:
            status = "step_limit"
            break
        attempts += 1

        h = min(h, settings.max_step, t_end - t)
        hits_end = (h == t_end - t)

        for i in range(1, n_stages):
            yi = y + h * (_A[i] @ k[:i])
            k[i] = rhs(t + _C[i] * h, yi)
        y1 = yi  # the 7th stage input is the 5th-order result

        err_vec = h * (_E @ k)
        scale = settings.abs_tol + settings.rel_tol * np.maximum(np.abs(y),
                                                                 np.abs(y1))
        with np.errstate(invalid="ignore", over="ignore"):
            err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))

        if not np.isfinite(err):
            # A wild stage (often overflow past a blow-up) poisons the
            # estimate; shrink hard and retry.
            h *= 0.1
            just_rejected = True
            if h < h_floor:
                raise NonFiniteDerivativeError(t)
            continue

        if err > 1.0:
            fac11 = err ** _EXPO
            h = h / min(_FAC_MAX, fac11 / _SAFETY)
            just_rejected = True
            if h < h_floor:
                raise IntegrationError(f"step size underflow at t = {t:.12g}")
            continue

        if escape is not None and escape(y1):
            # The step is accurate but lands outside the chart. Halve
            # until a step stays inside; if none does, the blow-up is
            # bracketed within [t, t + h] and we stop here.
            if h <= 2.0 * h_floor:
                status = "singularity"
                singularity_time = t
                break
            h *= 0.5
            just_rejected = True
            continue

        # step accepted
        t1 = t_end if hits_end else t + h
        end = np.searchsorted(samples, t1, side="right")
        if end > next_sample:
            batch = samples[next_sample:end]
            rows = _dense_eval(y, y1, k, h, (batch - t) / h)
            if batch[-1] == t1:
                rows[-1] = y1
            out_times.extend(batch.tolist())
            out_states.extend(rows)
            next_sample = end

        fac11 = err ** _EXPO
        fac = fac11 / (facold ** _BETA)
        fac = min(_FAC_MAX, max(_FAC_MIN, fac / _SAFETY))
        h_next = h / fac
        if just_rejected:
            h_next = min(h_next, h)
        facold = max(err, 1e-4)
        just_rejected = False

        y = y1.copy()
        k[0] = k[6]  # first-same-as-last
        t = t1
        h = h_next

    if out_times[-1] != t:
        # early stop: close the trajectory at the last committed state
        out_times.append(t)
        out_states.append(y.copy())

    return Trajectory(times=np.array(out_times),
                      states=np.array(out_states),
                      status=status,
                      singularity_time=singularity_time)


@dataclass(frozen=True)
class ConvergenceScenario:
    """One integration problem with a trusted answer at t_end.

    reconstruct maps the flat final state to an evolution operator,
    reference is the trusted operator at t_end.
    """

    rhs: object
    initial: np.ndarray
    t_start: float
    t_end: float
    max_step: float
    reconstruct: object
    reference: np.ndarray


def convergence_probe(scenario: ConvergenceScenario, tolerances) -> list:
    """Final-time operator error at each tolerance, tightest last.

    Returns [(tolerance, frobenius_error), ...] sorted loosest first.
    Errors should fall as the tolerance tightens; a flat or rising
    tail signals an accuracy floor or an integrator defect.
    """
    rows = []
    for tol in sorted(tolerances, reverse=True):
        settings = IntegratorSettings(max_step=scenario.max_step,
                                      rel_tol=tol, abs_tol=tol * 1e-3)
        traj = integrate(scenario.rhs, scenario.initial, scenario.t_start,
                         scenario.t_end, settings,
                         [scenario.t_end]).require_completed()
        u = scenario.reconstruct(traj.final_state)
        err = float(np.linalg.norm(u - scenario.reference))
        rows.append((float(tol), err))
    return rows
