"""Lower real branch of the Lambert W function."""

import math

from .errors import DomainError

_BRANCH_POINT = -math.exp(-1.0)


def lambert_w_minus1(x: float) -> float:
    """Solve ``w * exp(w) = x`` for ``w <= -1``, with ``-1/e <= x < 0``.

    Works on the log form ``ln(-w) + w - ln(-x) = 0``. Its left side falls
    monotonically on ``(-inf, -1]``, so a bracket always holds the root.
    Newton steps that leave the bracket are replaced by bisection.
    """
    x = float(x)
    if not math.isfinite(x) or x >= 0.0:
        raise DomainError(f"W_-1 is defined on [-1/e, 0), got {x}")
    if x <= _BRANCH_POINT:
        # accept rounding of -1/e itself
        if x < _BRANCH_POINT * (1.0 + 4 * 2.0**-52):
            raise DomainError(f"W_-1 is defined on [-1/e, 0), got {x}")
        return -1.0

    log_target = math.log(-x)

    def h(w):
        return math.log(-w) + w - log_target

    hi = -1.0
    lo = -700.0
    while h(lo) >= 0.0:
        lo *= 2.0

    w = max(lo, min(log_target - math.log(-log_target) if log_target < -1.0 else -2.0, hi))
    for _ in range(400):
        hw = h(w)
        if hw == 0.0:
            break
        if hw > 0.0:
            hi = w
        else:
            lo = w
        slope = 1.0 + 1.0 / w
        step_ok = slope != 0.0
        if step_ok:
            nxt = w - hw / slope
            step_ok = lo < nxt < hi
        if not step_ok:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - w) <= 1e-16 * abs(w) or hi - lo <= 2e-16 * abs(lo):
            w = nxt
            break
        w = nxt
    return w
