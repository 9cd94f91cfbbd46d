from __future__ import annotations


def diff_lines(a: str, b: str) -> int:
    """Number of lines inserted, deleted or modified to turn ``a`` into ``b``.

    Computed as the minimal line-level edit script in which replacing one line
    by another costs the same as a single insertion or deletion, so a one-line
    rename counts 1. The measure is symmetric and a metric on texts.
    """
    left = a.splitlines()
    right = b.splitlines()
    if len(left) < len(right):
        left, right = right, left
    # Strip the common prefix and suffix; they never change the minimum.
    start = 0
    while start < len(right) and left[start] == right[start]:
        start += 1
    end_l, end_r = len(left), len(right)
    while end_r > start and left[end_l - 1] == right[end_r - 1]:
        end_l -= 1
        end_r -= 1
    left = left[start:end_l]
    right = right[start:end_r]
    if not right:
        return len(left)
    previous = list(range(len(right) + 1))
    for i, line in enumerate(left, start=1):
        current = [i] + [0] * len(right)
        for j, other in enumerate(right, start=1):
            current[j] = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (line != other),
            )
        previous = current
    return previous[-1]
