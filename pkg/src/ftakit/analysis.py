"""BDD-based fault tree metrics.

Minimal cut sets, time-bounded unreliability (scalar and over a time
grid), importance measures, and two numerical approximations of the mean
time to failure.  Everything here is read-only over a frozen manager.
"""

from __future__ import annotations

import enum
from typing import Mapping, Sequence

import numpy as np

from .bdd import DEFAULT_SOLUTION_CAP, BddManager, BddRef
from .curves import TimeCurve
from .errors import AnalysisError, InputError, UndefinedMeasureError
from .model import Distribution, Exponential, FaultTree, is_static
from .ordering import VariableOrder
from .translate import translate

DEFAULT_CHUNK_SIZE = 1024
MTTF_DEFAULT_EPSILON = 1e-12
MTTF_DEFAULT_INITIAL_STEP = 1e-10
MTTF_DEFAULT_SAMPLES = 10**6


class ImportanceMeasure(enum.Enum):
    BIRNBAUM = "birnbaum"
    CRITICAL = "critical"
    VESELY_FUSSELL = "vesely-fussell"
    RAW = "raw"
    RRW = "rrw"


def probabilities_at(distributions: Mapping[str, Distribution], t: float) -> dict[str, float]:
    """Per-BE failure probability within time bound ``t``."""
    single = np.asarray([t], dtype=np.float64)
    return {name: float(dist.cdf(single)[0]) for name, dist in distributions.items()}


def minimal_cut_sets(
    sft: FaultTree,
    order: VariableOrder | None = None,
    max_order: int | None = None,
    cap: int = DEFAULT_SOLUTION_CAP,
    kernel: str | None = None,
) -> tuple[frozenset[str], ...]:
    """All inclusion-minimal BE sets whose joint failure fails the tree.

    ``max_order`` keeps only cut sets of at most that cardinality (a
    post-filter over the enumerated minimal solutions).
    """
    if not is_static(sft):
        raise InputError("minimal cut sets are defined for static fault trees")
    result = translate(sft, order=order, kernel=kernel)
    manager = result.manager
    minimal = manager.minsol(result.root)
    cuts = manager.enumerate_solutions(minimal, cap=cap)
    if max_order is not None:
        cuts = [c for c in cuts if len(c) <= max_order]
    return tuple(sorted(cuts, key=lambda c: (len(c), sorted(c))))


def unreliability(bdd: BddRef, probs: Mapping[str, float]) -> float:
    """Exact top-event failure probability under BE independence."""
    return bdd.manager.probability(bdd, probs)


def _prob_matrix(
    manager: BddManager,
    distributions: Mapping[str, Distribution],
    times: np.ndarray,
) -> np.ndarray:
    matrix = np.empty((len(manager.order), len(times)), dtype=np.float64)
    for i, name in enumerate(manager.order):
        dist = distributions.get(name)
        if dist is None:
            raise InputError(f"no distribution given for basic event {name!r}")
        matrix[i] = dist.cdf(times)
    return matrix


def unreliability_curve(
    bdd: BddRef,
    distributions: Mapping[str, Distribution],
    times: Sequence[float] | np.ndarray,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> TimeCurve:
    """Unreliability over a whole time grid, ``chunk_size`` points per pass.

    Each BDD pass memoises a chunk of values per node, so the result is
    bitwise identical to evaluating the grid point by point.
    """
    if chunk_size < 1:
        raise InputError("chunk size must be positive")
    manager = bdd.manager
    times = np.asarray(times, dtype=np.float64)
    if times.size == 0:
        raise InputError("at least one time point is required")
    values = np.empty_like(times)
    for start in range(0, len(times), chunk_size):
        chunk = times[start:start + chunk_size]
        matrix = _prob_matrix(manager, distributions, chunk)
        values[start:start + chunk_size] = manager.probability_chunk(bdd, matrix)
    return TimeCurve(times=times, values=np.clip(values, 0.0, 1.0))


def birnbaum(bdd: BddRef, be: str, probs: Mapping[str, float]) -> float:
    """Sensitivity of the top event to ``be``: P[fail | be] - P[fail | not be]."""
    manager = bdd.manager
    high = manager.probability(manager.restrict(bdd, be, 1), probs)
    low = manager.probability(manager.restrict(bdd, be, 0), probs)
    return high - low


def importance(
    bdd: BddRef,
    be: str,
    probs: Mapping[str, float],
    measure: ImportanceMeasure | str,
) -> float:
    """One importance measure for one basic event.

    critical:        BI(be) * P(be) / U
    vesely-fussell:  P[some minimal cut set containing be fully failed] / U
    raw:             P[fail | be] / U
    rrw:             U / P[fail | not be]
    """
    measure = ImportanceMeasure(measure)
    manager = bdd.manager
    if measure is ImportanceMeasure.BIRNBAUM:
        return birnbaum(bdd, be, probs)

    total = manager.probability(bdd, probs)
    if total == 0.0:
        raise UndefinedMeasureError(
            f"{measure.value} is undefined: the top event cannot fail")
    if measure is ImportanceMeasure.CRITICAL:
        return birnbaum(bdd, be, probs) * probs[be] / total
    if measure is ImportanceMeasure.RAW:
        return manager.probability(manager.restrict(bdd, be, 1), probs) / total
    if measure is ImportanceMeasure.RRW:
        low = manager.probability(manager.restrict(bdd, be, 0), probs)
        if low == 0.0:
            raise UndefinedMeasureError(
                f"rrw is undefined for {be!r}: the tree cannot fail without it")
        return total / low
    # Vesely-Fussell: rebuild the union of cut sets containing the event
    cuts = manager.enumerate_solutions(manager.minsol(bdd))
    union = manager.false
    for cut in cuts:
        if be not in cut:
            continue
        conj = manager.true
        for name in sorted(cut):
            conj = manager.apply_and(conj, manager.var(name))
        union = manager.apply_or(union, conj)
    return manager.probability(union, probs) / total


def _survival_on_grid(
    bdd: BddRef,
    distributions: Mapping[str, Distribution],
    times: np.ndarray,
    chunk_size: int,
) -> np.ndarray:
    curve = unreliability_curve(bdd, distributions, times, chunk_size=chunk_size)
    return 1.0 - curve.values


def _check_mttf_preconditions(bdd: BddRef, distributions: Mapping[str, Distribution]) -> None:
    manager = bdd.manager
    for name in manager.order:
        dist = distributions.get(name)
        if dist is None:
            raise InputError(f"no distribution given for basic event {name!r}")
        if not isinstance(dist, Exponential):
            raise InputError("the mean time to failure requires exponential "
                             f"basic events; {name!r} is not")
    if bdd == manager.false or not manager.evaluate_bits(
            bdd, [True] * len(manager.order)):
        raise AnalysisError("mean time to failure diverges: the top event "
                            "never fails even with every component failed")


def _trapezoid_panel(
    survival,
    a: float,
    b: float,
    epsilon: float,
    rel_tol: float = 1e-9,
    start_points: int = 17,
    max_points: int = 1 << 21,
) -> float:
    """Composite trapezoid on [a, b], doubling until the Richardson
    estimate |T_2n - T_n| / 3 drops below max(epsilon / 10, rel_tol * |T_2n|)."""
    xs = np.linspace(a, b, start_points)
    ys = survival(xs)
    h = (b - a) / (start_points - 1)
    total = h * (ys[0] / 2 + ys[1:-1].sum() + ys[-1] / 2)
    points = start_points
    while True:
        mids = (xs[:-1] + xs[1:]) / 2
        refined = total / 2 + (h / 2) * survival(mids).sum()
        estimate = abs(refined - total) / 3.0
        if estimate <= max(epsilon / 10.0, rel_tol * abs(refined)):
            return refined
        xs = np.sort(np.concatenate([xs, mids]))
        h /= 2
        total = refined
        points = 2 * points - 1
        if points > max_points:
            raise AnalysisError("quadrature did not converge on a panel; "
                                "the integrand may be too irregular")


def mttf_limit(
    bdd: BddRef,
    distributions: Mapping[str, Distribution],
    epsilon: float = MTTF_DEFAULT_EPSILON,
    initial_step: float = MTTF_DEFAULT_INITIAL_STEP,
    growth: float = 10.0,
    max_panels: int = 400,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> float:
    """Expected failure time by integrating survival panel by panel.

    Panels start at ``initial_step`` wide and grow geometrically; the sum
    stops once a panel contributes less than ``epsilon``.
    """
    _check_mttf_preconditions(bdd, distributions)

    def survival(times: np.ndarray) -> np.ndarray:
        return _survival_on_grid(bdd, distributions, times, chunk_size)

    total = 0.0
    left = 0.0
    right = initial_step
    for _ in range(max_panels):
        panel = _trapezoid_panel(survival, left, right, epsilon)
        total += panel
        if abs(panel) < epsilon:
            return total
        left = right
        right *= growth
    raise AnalysisError(f"mean time to failure did not converge within "
                        f"{max_panels} panels")


def mttf_substitution(
    bdd: BddRef,
    distributions: Mapping[str, Distribution],
    samples: int = MTTF_DEFAULT_SAMPLES,
    chunk_size: int = 8192,
) -> float:
    """Expected failure time via the substitution t = u / (1 - u).

    Composite trapezoid over ``samples`` uniform points in [0, 1); the
    integrand vanishes at u -> 1 because survival decays exponentially.
    """
    if samples < 2:
        raise InputError("at least two samples are required")
    _check_mttf_preconditions(bdd, distributions)
    u = np.arange(samples, dtype=np.float64) / samples
    times = u / (1.0 - u)
    scale = 1.0 / (1.0 - u) ** 2
    integrand = np.empty_like(u)
    for start in range(0, samples, chunk_size):
        stop = min(start + chunk_size, samples)
        grid = times[start:stop]
        survival = _survival_on_grid(bdd, distributions, grid, chunk_size)
        integrand[start:stop] = survival * scale[start:stop]
    h = 1.0 / samples
    # endpoint u = 1 contributes 0
    return float(h * (integrand[0] / 2 + integrand[1:].sum()))
