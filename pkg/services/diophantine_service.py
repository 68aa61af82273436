import logging
import math
import threading
from typing import Dict, List, Optional, Tuple

from core.config import settings
from core.exactnum import ALPHA, KAPPA, QuadNum, ZERO, q
from core.exceptions import BelowThreshold, NoAdmissiblePair, NotRepresentable, PreconditionError
from models.diophantine import (
    ApproxResult, IntervalExtension, SegmentKind, SegmentPartition, ThresholdReport
)

logger = logging.getLogger(__name__)


def _fractional(x: QuadNum) -> QuadNum:
    return x - math.floor(x)


def _max_circle_gap(points: List[QuadNum]) -> QuadNum:
    pts = sorted(points)
    gap = pts[0] + 1 - pts[-1]
    for a, b in zip(pts, pts[1:]):
        if b - a > gap:
            gap = b - a
    return gap


class DiophantineService:
    """Approximation of reals by m1 + m2*alpha and {1, alpha} partitions"""

    def __init__(self):
        self._thresholds: Dict[QuadNum, ThresholdReport] = {}
        self._lock = threading.Lock()

    # ============================================
    # Distance to N + N*alpha
    # ============================================

    def distance_to_lattice(self, x: QuadNum) -> QuadNum:
        """Exact distance from x to {m1 + m2*alpha : m1, m2 >= 0}"""
        best: Optional[QuadNum] = None
        m2 = 0
        while True:
            r = x - ALPHA * m2
            if r.sign() < 0:
                d = -r
                if best is None or d < best:
                    best = d
                break
            f = math.floor(r)
            for m1 in (f, f + 1):
                d = abs(r - m1)
                if best is None or d < best:
                    best = d
            m2 += 1
        return best

    def n_of_eps(self, eps) -> int:
        """
        Least integer N such that every x >= N is within eps of N + N*alpha

        Args:
            eps: Positive rational tolerance

        Returns:
            The certified threshold N(eps)
        """
        return self.threshold_report(eps).threshold

    def threshold_report(self, eps) -> ThresholdReport:
        """
        Certify N(eps) by scanning grid points at resolution eps/4 up to a horizon

        Beyond the horizon every point is covered by the circle gap bound: when
        the fractional parts of j*alpha, j <= M, leave no gap of length 2*eps,
        every x >= M*alpha + 1 is within eps of the lattice. Below it a grid
        point g certifies its half-cell when dist(g) + h/2 < eps.

        Raises:
            PreconditionError: If eps is not positive
        """
        eps = q(eps)
        if eps.sign() <= 0:
            raise PreconditionError(f"eps must be positive, got {eps}")

        with self._lock:
            cached = self._thresholds.get(eps)
        if cached is not None:
            return cached

        # Horizon from the circle gaps of {j * alpha}
        fracs = [ZERO]
        m = 0
        while not _max_circle_gap(fracs) < eps * 2:
            m += 1
            fracs.append(_fractional(ALPHA * m))
        horizon = ALPHA * m + 1

        # Grid scan
        h = eps / settings.SCAN_RESOLUTION_DIVISOR
        half = h / 2
        steps = math.ceil(horizon / h)
        last_fail: Optional[QuadNum] = None
        for i in range(steps + 1):
            x = h * i
            if not self.distance_to_lattice(x) + half < eps:
                last_fail = x
        threshold = 0 if last_fail is None else math.ceil(last_fail + h)

        report = ThresholdReport(
            eps=str(eps),
            threshold=threshold,
            horizon=horizon,
            resolution=str(h),
            scanned_points=steps + 1,
        )
        logger.debug("N(%s) = %d (horizon %s, %d grid points)", eps, threshold, horizon, steps + 1)

        with self._lock:
            self._thresholds[eps] = report
        return report

    # ============================================
    # Pair selection
    # ============================================

    def select_pair(
        self,
        x: QuadNum,
        eps: QuadNum,
        cap1: Optional[int] = None,
        cap2: Optional[int] = None
    ) -> Optional[Tuple[int, int]]:
        """
        Deterministic admissible pair for x

        An exact representation wins; otherwise the smallest m2, then the
        smallest m1, with |x - (m1 + m2*alpha)| < eps and both caps respected.
        """
        exact = x.integer_components()
        if exact is not None and exact[0] >= 0 and exact[1] >= 0:
            if (cap1 is None or exact[0] <= cap1) and (cap2 is None or exact[1] <= cap2):
                return exact

        m2_max = math.floor((x + eps) / ALPHA)
        if cap2 is not None:
            m2_max = min(m2_max, cap2)
        for m2 in range(0, m2_max + 1):
            r = x - ALPHA * m2
            # smallest integer in (r - eps, r + eps), clipped to [0, cap1]
            m1 = max(0, math.floor(r - eps) + 1)
            if cap1 is not None and m1 > cap1:
                continue
            if r - m1 < eps and m1 - r < eps:
                return m1, m2
        return None

    def approx(self, x, eps) -> ApproxResult:
        """
        Approximate x by m1 + m2*alpha within eps

        Args:
            x: Value to approximate
            eps: Tolerance

        Returns:
            ApproxResult with err = x - (m1 + m2*alpha)

        Raises:
            BelowThreshold: If x < N(eps) and x has no exact representation
            NoAdmissiblePair: If no pair is found
        """
        x, eps = q(x), q(eps)
        exact = x.integer_components()
        if exact is None or min(exact) < 0:
            threshold = self.n_of_eps(eps)
            if x < threshold:
                raise BelowThreshold(f"x = {x} is below N({eps}) = {threshold}")

        pair = self.select_pair(x, eps)
        if pair is None:
            raise NoAdmissiblePair(f"no m1 + m2*alpha within {eps} of {x}")
        m1, m2 = pair
        return ApproxResult(m1=m1, m2=m2, err=x - QuadNum(m1, m2))

    # ============================================
    # Partitions
    # ============================================

    def partition_exact(self, length, start=ZERO) -> SegmentPartition:
        """
        Canonical partition of m1 + m2*alpha: alternate one, alpha, then the leftover kind

        Raises:
            NotRepresentable: If the components are not non-negative integers
        """
        length = q(length)
        comps = length.integer_components()
        if comps is None or comps[0] < 0 or comps[1] < 0:
            raise NotRepresentable(f"{length} is not m1 + m2*alpha with m1, m2 >= 0")
        ones, alphas = comps
        paired = min(ones, alphas)
        labels = [SegmentKind.ONE, SegmentKind.ALPHA] * paired
        labels += [SegmentKind.ONE] * (ones - paired)
        labels += [SegmentKind.ALPHA] * (alphas - paired)
        return SegmentPartition(start=q(start), labels=labels)

    def canonical_partition(self, k: int, start=ZERO) -> SegmentPartition:
        """K ones alternating with K alphas, the partition of K(1+alpha)"""
        return self.partition_exact(KAPPA * k, start)

    def extend_interval(self, a, k_inner: int, k_outer: int, eps) -> IntervalExtension:
        """
        Extend a tiled inner interval [a, a + K(1+alpha)) to [0, K'(1+alpha))

        The inner interval moves by delta so that a + delta = m1 + m2*alpha;
        [0, a + delta) and the remainder are then partitioned canonically.

        Args:
            a: Start of the inner interval inside the outer one
            k_inner: K
            k_outer: K'
            eps: Largest admissible shift

        Returns:
            IntervalExtension with delta and the three partitions

        Raises:
            BelowThreshold: If a < N(eps)
            PreconditionError: If the inner interval ends too close to the outer end
            NoAdmissiblePair: If no pair meets the error bound under the caps
        """
        a, eps = q(a), q(eps)
        if k_outer <= k_inner or k_inner < 0:
            raise PreconditionError(f"need K' > K >= 0, got K={k_inner}, K'={k_outer}")
        threshold = self.n_of_eps(eps)
        if a < threshold:
            raise BelowThreshold(f"inner start {a} is below N({eps}) = {threshold}")
        if a + KAPPA * k_inner + threshold > KAPPA * k_outer:
            raise PreconditionError(f"inner interval starting at {a} leaves less than N({eps}) before the outer end")

        cap = k_outer - k_inner
        pair = self.select_pair(a, eps, cap, cap)
        if pair is None:
            raise NoAdmissiblePair(f"no m1, m2 <= {cap} within {eps} of {a}")
        m1, m2 = pair
        shifted = QuadNum(m1, m2)
        delta = shifted - a

        first = self.partition_exact(shifted)
        middle = self.canonical_partition(k_inner, shifted)
        last = self.partition_exact(QuadNum(cap - m1, cap - m2), shifted + KAPPA * k_inner)
        logger.debug("extend [%s, +%dκ) into %dκ: delta=%s (m1=%d, m2=%d)", a, k_inner, k_outer, delta, m1, m2)
        return IntervalExtension(delta=delta, m1=m1, m2=m2, first=first, middle=middle, last=last)


# Create service instance
diophantine_service = DiophantineService()
