"""Sparse exact linear algebra over a field.

Rows are dicts ``column -> scalar`` with no stored zeros; columns are hashable
labels (basis names, word tuples, ...).  Everything is plain fraction-exact
Gaussian elimination — the dimensions in this package are tiny, so clarity
beats asymptotics.  The test suite carries an independent dense oracle that
never calls into this module.
"""

from __future__ import annotations


def row_add(target, source, factor):
    """target += factor * source, dropping cancellations."""
    if not factor:
        return
    for col, val in source.items():
        new = target.get(col)
        new = val * factor if new is None else new + val * factor
        if new:
            target[col] = new
        else:
            target.pop(col, None)


class Echelon:
    """Row echelon accumulator with recorded pivots.

    ``column_order`` fixes pivot preference and makes every reduction
    deterministic; columns absent from the order are rejected.
    """

    def __init__(self, column_order):
        self.column_order = list(column_order)
        self.rank_of = {c: i for i, c in enumerate(self.column_order)}
        self.rows = []  # list of (pivot_col, row_dict) sorted as inserted
        self.pivots = {}  # pivot_col -> index into self.rows

    def reduce_row(self, row):
        """Return a copy of ``row`` reduced against the current echelon."""
        work = dict(row)
        for col, val in sorted(row.items(), key=lambda cv: self.rank_of[cv[0]]):
            if col not in work:
                continue
            idx = self.pivots.get(col)
            if idx is not None:
                row_add(work, self.rows[idx][1], -work[col])
        # a single left-to-right pass can reintroduce earlier pivots; loop
        changed = True
        while changed:
            changed = False
            for col in sorted(work, key=self.rank_of.get):
                idx = self.pivots.get(col)
                if idx is not None and work.get(col):
                    row_add(work, self.rows[idx][1], -work[col])
                    changed = True
                    break
        return work

    def insert(self, row):
        """Reduce ``row`` and add it if independent.  Returns the residual."""
        work = self.reduce_row(row)
        if not work:
            return work
        pivot = min(work, key=self.rank_of.get)
        inv = 1 / work[pivot]
        normal = {c: v * inv for c, v in work.items()}
        self.pivots[pivot] = len(self.rows)
        self.rows.append((pivot, normal))
        return work

    @property
    def rank(self):
        return len(self.rows)


def rank(rows, column_order):
    ech = Echelon(column_order)
    for row in rows:
        ech.insert(row)
    return ech.rank


def solve(rows, column_order, rhs):
    """Solve ``x . rows = rhs`` for coefficients x over the listed rows.

    ``rows`` spans a subspace; we look for a combination of them equal to
    ``rhs``.  Returns the coefficient list (aligned with ``rows``) or None
    when ``rhs`` is outside the span.
    """
    ech = Echelon(column_order)
    trackers = []  # parallel combination bookkeeping
    for i, row in enumerate(rows):
        work = dict(row)
        combo = {i: _one_like(row, rhs)}
        _reduce_tracked(ech, trackers, work, combo)
        if work:
            pivot = min(work, key=ech.rank_of.get)
            inv = 1 / work[pivot]
            ech.pivots[pivot] = len(ech.rows)
            ech.rows.append((pivot, {c: v * inv for c, v in work.items()}))
            trackers.append({k: v * inv for k, v in combo.items()})
    target = dict(rhs)
    combo = {}
    _reduce_tracked(ech, trackers, target, combo)
    if target:
        return None
    coeffs = [None] * len(rows)
    for i, v in combo.items():
        coeffs[i] = -v
    return coeffs


def _one_like(row, rhs):
    for v in row.values():
        return v / v
    for v in rhs.values():
        return v / v
    return 1


def _reduce_tracked(ech, trackers, work, combo):
    changed = True
    while changed:
        changed = False
        for col in sorted(work, key=ech.rank_of.get):
            idx = ech.pivots.get(col)
            if idx is not None and work.get(col):
                factor = -work[col]
                row_add(work, ech.rows[idx][1], factor)
                row_add(combo, trackers[idx], factor)
                changed = True
                break


def invert_matrix(entries, labels, field):
    """Invert the square matrix given as ``{(row, col): scalar}`` over labels.

    Returns the inverse in the same sparse form, or None when singular.
    Plain Gauss-Jordan on dense lists (the spaces here have dimension <= 8).
    """
    n = len(labels)
    index = {lab: i for i, lab in enumerate(labels)}
    zero, one = field.zero(), field.one()
    mat = [[zero for _ in range(n)] for _ in range(n)]
    for (r, c), v in entries.items():
        mat[index[r]][index[c]] = v
    aug = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if mat[r][col]), None)
        if pivot is None:
            return None
        mat[col], mat[pivot] = mat[pivot], mat[col]
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / mat[col][col]
        mat[col] = [v * inv for v in mat[col]]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and mat[r][col]:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[col])]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    out = {}
    for i in range(n):
        for j in range(n):
            if aug[i][j]:
                out[(labels[i], labels[j])] = aug[i][j]
    return out
