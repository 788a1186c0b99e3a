"""Character-level add/delete diff counts for property values."""

from __future__ import annotations


def _strip_common(a: str, b: str) -> tuple[str, str]:
    start = 0
    limit = min(len(a), len(b))
    while start < limit and a[start] == b[start]:
        start += 1
    end_a, end_b = len(a), len(b)
    while end_a > start and end_b > start and a[end_a - 1] == b[end_b - 1]:
        end_a -= 1
        end_b -= 1
    return a[start:end_a], b[start:end_b]


def _myers(a: str, b: str, limit: int) -> int | None:
    """Length of the shortest add/delete script, or None if it exceeds ``limit``.

    Greedy forward search over diagonals (Myers, O((N+M)D)).
    """
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        d = n + m
        return d if d <= limit else None
    if abs(n - m) > limit:
        return None
    max_d = min(n + m, limit)
    offset = max_d + 1
    v = [0] * (2 * max_d + 3)
    for d in range(max_d + 1):
        for k in range(-d, d + 1, 2):
            if k == -d or (k != d and v[offset + k - 1] < v[offset + k + 1]):
                x = v[offset + k + 1]
            else:
                x = v[offset + k - 1] + 1
            y = x - k
            while x < n and y < m and a[x] == b[y]:
                x += 1
                y += 1
            v[offset + k] = x
            if x >= n and y >= m:
                return d
    return None


def diff_ops(a: str, b: str) -> int:
    """Minimal number of single-character adds and deletes turning ``a`` into ``b``."""
    a, b = _strip_common(a, b)
    return _myers(a, b, len(a) + len(b))


def bounded_diff_ops(a: str, b: str, max_ops: int) -> int | None:
    """Like :func:`diff_ops` but gives up once the count would exceed ``max_ops``."""
    a, b = _strip_common(a, b)
    return _myers(a, b, max_ops)


def similarity(a: str | None, b: str | None, max_ops: int) -> int | None:
    """Score of a similar value pair, or None when the pair is not eligible.

    Eligible means both values are non-null and at most ``max_ops`` adds and
    deletes apart.
    """
    if max_ops < 0:
        raise ValueError("max_ops must be non-negative")
    if a is None or b is None:
        return None
    return bounded_diff_ops(a, b, max_ops)
