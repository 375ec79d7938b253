from collections.abc import Sequence

import numpy as np
import structlog
from numpy.typing import NDArray
from scipy.stats import norm, rankdata

from shared.errors import EmptyInput, InvalidParameter, NotApplicable
from shared.schemas.evaluation import SignificanceResult

logger = structlog.get_logger(__name__)


def _exact_p(doubled_ranks: NDArray[np.int64], observed: int) -> float:
    """Two-sided p over all 2^n sign patterns, in doubled integer ranks."""
    n = doubled_ranks.size
    patterns = (np.arange(2**n, dtype=np.int64)[:, None] >> np.arange(n)) & 1
    total = int(doubled_ranks.sum())
    w2 = patterns @ doubled_ranks
    extreme = np.abs(2 * w2 - total) >= abs(2 * observed - total)
    return float(np.count_nonzero(extreme)) / float(2**n)


def _normal_p(w: float, n: int, ranks: NDArray[np.float64]) -> float:
    mean = n * (n + 1) / 4.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    variance = n * (n + 1) * (2 * n + 1) / 24.0 - float(
        np.sum(tie_counts**3 - tie_counts)
    ) / 48.0
    z = max(0.0, abs(w - mean) - 0.5) / np.sqrt(variance)
    return float(min(1.0, 2.0 * norm.sf(z)))


def wilcoxon_signed_rank(
    x: Sequence[float],
    y: Sequence[float],
    alpha: float = 0.05,
    exact_threshold: int = 12,
) -> SignificanceResult:
    """Paired two-sided signed-rank test on x - y.

    Zero differences are discarded and tied magnitudes share average ranks.
    The statistic is the rank sum of the positive differences.
    """
    if len(x) != len(y):
        raise InvalidParameter(f"paired samples differ in length: {len(x)} != {len(y)}")
    if len(x) == 0:
        raise EmptyInput("signed-rank test needs at least one pair")

    diffs = np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64)
    diffs = diffs[diffs != 0.0]
    n = int(diffs.size)
    if n == 0:
        raise NotApplicable("all paired differences are zero")

    ranks = rankdata(np.abs(diffs), method="average")
    w = float(np.sum(ranks[diffs > 0]))

    if n <= exact_threshold:
        # average ranks are multiples of 1/2
        doubled = np.rint(2 * ranks).astype(np.int64)
        p_value = _exact_p(doubled, int(doubled[diffs > 0].sum()))
        method = "exact"
    else:
        p_value = _normal_p(w, n, ranks)
        method = "normal"

    logger.debug("Signed-rank test", n_effective=n, statistic=w, p_value=p_value)
    return SignificanceResult(
        statistic=w,
        n_effective=n,
        p_value=p_value,
        significant=p_value < alpha,
        alpha=alpha,
        method=method,
    )
