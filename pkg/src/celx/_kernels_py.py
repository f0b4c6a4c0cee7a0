"""Pure-Python kernels; the compiled module mirrors these signatures exactly."""

from __future__ import annotations

from collections.abc import Sequence


def hilbert_basis(matrix: Sequence[Sequence[int]], ncols: int) -> list[tuple[int, ...]]:
    """Minimal nonzero natural solutions of ``matrix · x = 0``.

    Contejean–Devie completion: grow candidates one unit at a time, only in
    directions that move their image towards the origin, and discard any
    candidate that dominates a solution already found.
    """
    rows = len(matrix)
    cols = [tuple(matrix[i][j] for i in range(rows)) for j in range(ncols)]
    frontier: dict[tuple[int, ...], tuple[int, ...]] = {}
    for j in range(ncols):
        e = [0] * ncols
        e[j] = 1
        frontier[tuple(e)] = cols[j]
    basis: list[tuple[int, ...]] = []
    while frontier:
        pending = []
        for v, img in frontier.items():
            if any(img):
                pending.append((v, img))
            else:
                basis.append(v)
        nxt: dict[tuple[int, ...], tuple[int, ...]] = {}
        for v, img in pending:
            for j in range(ncols):
                col = cols[j]
                if sum(a * b for a, b in zip(img, col)) >= 0:
                    continue
                w = list(v)
                w[j] += 1
                w = tuple(w)
                if w in nxt:
                    continue
                if any(all(bi <= wi for bi, wi in zip(b, w)) for b in basis):
                    continue
                nxt[w] = tuple(a + b for a, b in zip(img, col))
        frontier = nxt
    return sorted(basis)


def horn_search(
    sources: Sequence[Sequence[int]],
    nets: Sequence[Sequence[int]],
    budget: Sequence[int],
    target: Sequence[int],
) -> list[int] | None:
    """Generator multiplicities ``c`` with ``Σ c·sources ≤ budget`` and ``Σ c·nets = target``.

    Each generator must have a nonempty source vector, so the budget bounds
    the search.  Returns the first solution in the order that prefers larger
    multiplicities for earlier generators, or ``None``.
    """
    n = len(sources)
    dims = len(budget)
    counts = [0] * n
    dead: set[tuple] = set()

    def rec(i: int, bud: tuple[int, ...], res: tuple[int, ...]) -> bool:
        if not any(res):
            for k in range(i, n):
                counts[k] = 0
            return True
        if i == n:
            return False
        key = (i, bud, res)
        if key in dead:
            return False
        src, net = sources[i], nets[i]
        cap = min((bud[d] // src[d] for d in range(dims) if src[d]), default=0)
        for k in range(cap, -1, -1):
            counts[i] = k
            nb = tuple(bud[d] - k * src[d] for d in range(dims))
            nr = tuple(res[d] - k * net[d] for d in range(dims))
            if rec(i + 1, nb, nr):
                return True
        counts[i] = 0
        dead.add(key)
        return False

    if rec(0, tuple(budget), tuple(target)):
        return counts
    return None
