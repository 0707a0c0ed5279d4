"""Exact dense/sparse linear solving over a Scalar field.

Small systems only (at most a few hundred rows); plain Gaussian elimination
with exact division.
"""

from __future__ import annotations

from .scalars import Field, Scalar

__all__ = ["solve_dense", "solve_unique_sparse", "LinearSolveError"]


class LinearSolveError(ValueError):
    pass


def solve_dense(a, b, field: Field):
    """Solve A x = b for square exact A.  Raises on singular A."""
    n = len(a)
    m = [row[:] + [b[i]] for i, row in enumerate(a)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not m[r][col].is_zero():
                piv = r
                break
        if piv is None:
            raise LinearSolveError("singular system")
        m[col], m[piv] = m[piv], m[col]
        inv = m[col][col].inverse()
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and not m[r][col].is_zero():
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


def solve_unique_sparse(rows, nunknowns: int, field: Field):
    """Solve an overdetermined sparse system requiring a unique solution.

    ``rows`` is an iterable of ({col: Scalar}, rhs Scalar) pairs.  Returns the
    solution list.  Raises LinearSolveError("no solution") if inconsistent and
    LinearSolveError("non-unique solution") if rank-deficient.
    """
    pivots: dict[int, tuple[dict[int, Scalar], Scalar]] = {}
    queue = [({c: v for c, v in row.items() if not v.is_zero()}, rhs) for row, rhs in rows]
    # short rows first keeps elimination fill low
    queue.sort(key=lambda item: len(item[0]))
    sol = None
    deferred = []
    for row, rhs in queue:
        if sol is not None:
            deferred.append((row, rhs))
            continue
        row = dict(row)
        while True:
            if not row:
                if not rhs.is_zero():
                    raise LinearSolveError("no solution")
                break
            lead = min(row)
            if lead not in pivots:
                inv = row[lead].inverse()
                row = {c: v * inv for c, v in row.items()}
                rhs = rhs * inv
                pivots[lead] = (row, rhs)
                break
            prow, prhs = pivots[lead]
            f = row[lead]
            new = {}
            for c, v in row.items():
                w = v - f * prow.get(c, field.zero())
                if not w.is_zero():
                    new[c] = w
            for c, v in prow.items():
                if c not in row:
                    w = -f * v
                    if not w.is_zero():
                        new[c] = w
            row = new
            rhs = rhs - f * prhs
        if len(pivots) == nunknowns:
            sol = _back_substitute(pivots, nunknowns, field)
    if sol is None:
        raise LinearSolveError("non-unique solution")
    # remaining rows only need to be consistent with the solution
    for row, rhs in deferred:
        acc = rhs
        for c, v in row.items():
            acc = acc - v * sol[c]
        if not acc.is_zero():
            raise LinearSolveError("no solution")
    return sol


def _back_substitute(pivots, nunknowns: int, field: Field):
    sol = [field.zero()] * nunknowns
    for lead in sorted(pivots, reverse=True):
        row, rhs = pivots[lead]
        val = rhs
        for c, v in row.items():
            if c != lead:
                val = val - v * sol[c]
        sol[lead] = val
    return sol
