"""Multilinear families and their coalgebra lifts.

A family of multilinear maps {f_(k,g): k inputs, genus label g} lifts to an
operator on words: the first-order (coderivation) rule applies the map to
each contiguous block (tensor flavor) or each position subset (symmetric
flavor) with Koszul signs; genus labels weight terms by that power of the
loop parameter.  Second-order operators additionally carry zero-input
two-output pieces (multiplication by a bivector) or one-input two-output
pieces; all of them run through one evaluation engine, so composition,
commutators and square-zero checks need no per-kind code.

hbar bookkeeping: operator states are dicts {hbar_order: WordSum}; every
piece adds its own weight, and caps are applied at the end so truncation can
never reorder contributions.
"""

from __future__ import annotations

import itertools

from .errors import InvalidInput, ParityError
from .graded import merge_sign
from .reports import RelationReport
from .words import (
    SYMMETRIC,
    TENSOR,
    WordSum,
    basis_words,
    canonicalize,
    check_flavor,
    word_degree,
)


class MultilinearFamily:
    """Graded multilinear maps indexed by (arity, genus).

    ``components`` maps (k, g) to a table {input_tuple: Element}.  Symmetric
    tables are canonicalized at construction; conflicting redundant entries
    raise InvalidInput, and outputs must be homogeneous of degree
    (sum of input degrees) + ``degree``.
    """

    def __init__(self, space, flavor, degree, components):
        check_flavor(flavor)
        self.space = space
        self.flavor = flavor
        self.degree = degree
        self.components = {}
        for key, table in components.items():
            try:
                arity, genus = key
            except (TypeError, ValueError):
                raise InvalidInput(f"component keys must be (arity, genus), got {key!r}")
            if arity < 0 or genus < 0:
                raise InvalidInput(f"arity and genus must be >= 0, got {key}")
            canon_table = {}
            for word, value in table.items():
                word = tuple(word)
                if len(word) != arity:
                    raise InvalidInput(
                        f"component ({arity},{genus}) has a table entry of length {len(word)}"
                    )
                if value.is_zero():
                    continue
                canon, sign = canonicalize(self.space, word, flavor)
                if sign == 0:
                    raise InvalidInput(
                        f"entry {word} repeats an odd factor; its value must be omitted"
                    )
                adjusted = value if sign == 1 else -value
                if canon in canon_table:
                    if canon_table[canon] != adjusted:
                        raise InvalidInput(
                            f"entries for {word} conflict under graded symmetry at {canon}"
                        )
                    continue
                if not adjusted.is_homogeneous():
                    raise ParityError(f"value at {word} has mixed degree")
                expected = sum(self.space.degree(n) for n in canon) + degree
                actual = adjusted.degree()
                if actual is not None and actual != expected:
                    raise ParityError(
                        f"value at {word} has degree {actual}, expected {expected}",
                    )
                canon_table[canon] = adjusted
            if canon_table:
                self.components[(arity, genus)] = canon_table

    def arities(self):
        return sorted({k for k, _ in self.components})

    def genera(self):
        return sorted({g for _, g in self.components})

    def value(self, arity, genus, word):
        """Evaluate one component on a (not necessarily canonical) tuple."""
        table = self.components.get((arity, genus))
        if not table:
            return None
        canon, sign = canonicalize(self.space, tuple(word), self.flavor)
        if sign == 0:
            return None
        value = table.get(canon)
        if value is None:
            return None
        return value if sign == 1 else -value

    def map_values(self, fn):
        """New family with every output Element transformed by ``fn``."""
        out = {}
        for key, table in self.components.items():
            new_table = {w: fn(v) for w, v in table.items()}
            out[key] = {w: v for w, v in new_table.items() if not v.is_zero()}
        return MultilinearFamily(self.space, self.flavor, self.degree, out)


class OperationPiece:
    """One (k inputs, any-length word output) operation with an hbar weight.

    ``table`` maps canonical input tuples to WordSum outputs (their word
    length determines the operator order: length 1 = coderivation piece,
    length 2 = second-order piece).  ``degree`` is the operator parity used
    for tensor-flavor block signs.
    """

    __slots__ = ("arity_in", "degree", "table", "hbar")

    def __init__(self, arity_in, degree, table, hbar=0):
        if hbar < 0:
            raise InvalidInput("hbar weight must be >= 0")
        self.arity_in = arity_in
        self.degree = degree
        self.table = table
        self.hbar = hbar

    def max_output_length(self):
        longest = 1
        for ws in self.table.values():
            for w in ws.terms:
                longest = max(longest, len(w))
        return longest


class Coderivation:
    """A lifted operator on words (order 1 or 2), with hbar-weighted pieces."""

    def __init__(self, space, flavor, degree, pieces):
        check_flavor(flavor)
        self.space = space
        self.flavor = flavor
        self.degree = degree
        self.pieces = list(pieces)
        self.order = 1
        for p in self.pieces:
            if p.max_output_length() > 2:
                raise InvalidInput("operation pieces may emit at most 2 factors")
            self.order = max(self.order, p.max_output_length())

    # -- construction ------------------------------------------------------

    @classmethod
    def lift_family(cls, family, hbar_from_genus=True):
        """First-order lift; genus labels become hbar weights by default."""
        pieces = []
        for (arity, genus), table in sorted(family.components.items()):
            ws_table = {}
            for word, value in table.items():
                ws = WordSum(family.space, family.flavor)
                for name, coeff in value.items():
                    ws.add_word((name,), coeff)
                ws_table[word] = ws
            pieces.append(
                OperationPiece(
                    arity, family.degree, ws_table,
                    hbar=genus if hbar_from_genus else 0,
                )
            )
        return cls(family.space, family.flavor, family.degree, pieces)

    @classmethod
    def lift_bivector(cls, bivector, hbar=0):
        """Second-order lift of a length-2 symmetric word sum.

        Acts by multiplication: the empty word maps to the bivector itself,
        and a length-n word picks up both legs (n+2 outputs).
        """
        if bivector.flavor != SYMMETRIC:
            raise InvalidInput("second-order lifts exist on the symmetric side only")
        degree = None
        for w in bivector.terms:
            if len(w) != 2:
                raise InvalidInput("second-order cogenerator must be a sum of 2-words")
            d = word_degree(bivector.space, w)
            if degree is None:
                degree = d
            elif degree != d:
                raise ParityError("bivector has mixed degree")
        if degree is None:
            degree = 0  # zero bivector: a vacuous piece, parity irrelevant
        piece = OperationPiece(0, degree, {(): bivector.copy()}, hbar=hbar)
        return cls(bivector.space, SYMMETRIC, degree, [piece])

    def plus(self, other):
        if other.space is not self.space or other.flavor != self.flavor:
            raise InvalidInput("cannot combine operators over different spaces/flavors")
        if (other.degree - self.degree) % 2:
            raise ParityError("cannot combine operators of different parity")
        return Coderivation(self.space, self.flavor, self.degree, self.pieces + other.pieces)

    # -- evaluation --------------------------------------------------------

    def apply_word(self, word, max_hbar=None):
        """Apply to one basis word.  Returns {hbar_order: WordSum}."""
        word = tuple(word)
        degrees = [self.space.degree(n) for n in word]
        out = {}
        for piece in self.pieces:
            if max_hbar is not None and piece.hbar > max_hbar:
                continue
            target = out.get(piece.hbar)
            if target is None:
                target = out[piece.hbar] = WordSum(self.space, self.flavor)
            if self.flavor == TENSOR:
                self._apply_tensor(piece, word, degrees, target)
            else:
                self._apply_symmetric(piece, word, degrees, target)
        return {h: ws for h, ws in out.items() if not ws.is_zero()}

    def _apply_tensor(self, piece, word, degrees, target):
        k = piece.arity_in
        if k > len(word):
            return
        for r in range(len(word) - k + 1):
            block = word[r : r + k]
            value = piece.table.get(block)
            if value is None:
                continue
            sign = 1
            if piece.degree % 2 and sum(degrees[:r]) % 2:
                sign = -1
            for vw, vc in value.terms.items():
                target.add_word(word[:r] + vw + word[r + k :], sign * vc)

    def _apply_symmetric(self, piece, word, degrees, target):
        k = piece.arity_in
        if k > len(word):
            return
        for chosen in itertools.combinations(range(len(word)), k):
            rest = tuple(i for i in range(len(word)) if i not in chosen)
            sign = merge_sign(chosen, rest, degrees)
            block = tuple(word[i] for i in chosen)
            canon, s2 = canonicalize(self.space, block, SYMMETRIC)
            if s2 == 0:
                continue
            value = piece.table.get(canon)
            if value is None:
                continue
            total = sign * s2
            rest_names = tuple(word[i] for i in rest)
            for vw, vc in value.terms.items():
                target.add_word(vw + rest_names, total * vc)

    def apply_state(self, state, max_hbar=None):
        """Apply to {hbar: WordSum}; hbar weights accumulate."""
        out = {}
        for h0, ws in state.items():
            for word, coeff in ws.terms.items():
                step = self.apply_word(word, max_hbar=None)
                for h1, sub in step.items():
                    h = h0 + h1
                    if max_hbar is not None and h > max_hbar:
                        continue
                    target = out.get(h)
                    if target is None:
                        target = out[h] = WordSum(self.space, self.flavor)
                    target.add(sub.scaled(coeff))
        return {h: ws for h, ws in out.items() if not ws.is_zero()}


def lift_first_order(family):
    return Coderivation.lift_family(family)


def lift_second_order(bivector, hbar=0):
    return Coderivation.lift_bivector(bivector, hbar=hbar)


def graded_commutator(m, n, max_arity, max_hbar=None):
    """[m, n] = m n - (-1)^(|m||n|) n m, extracted as a lifted operator.

    The commutator of lifted operators is again one; its cogenerators are
    recovered by corestriction on basis words up to ``max_arity``: the
    word-length-1 outputs give the first-order family and the remaining
    length-2 outputs the second-order pieces.  The result reproduces the
    direct evaluation on all words within the truncation (verified here;
    violations mean the inputs were not order <= 2 and raise).
    """
    if m.space is not n.space or m.flavor != n.flavor:
        raise InvalidInput("commutator needs operators on the same coalgebra")
    space, flavor = m.space, m.flavor
    sign = -1 if (m.degree % 2) and (n.degree % 2) else 1
    degree = m.degree + n.degree

    def evaluate(word):
        out = {}
        for inner, outer, s in ((n, m, 1), (m, n, -sign)):
            mid = inner.apply_word(word, max_hbar=max_hbar)
            res = outer.apply_state(mid, max_hbar=max_hbar)
            for h, ws in res.items():
                target = out.get(h)
                if target is None:
                    target = out[h] = WordSum(space, flavor)
                target.add(ws if s == 1 else ws.scaled(-space.field.one()))
        return {h: ws for h, ws in out.items() if not ws.is_zero()}

    # Fit cogenerators arity by arity: at each word length the difference
    # between the direct evaluation and the pieces found so far consists of
    # the new length-1-output (first-order) and length-2-output (second-order)
    # cogenerators at exactly this arity; anything else disproves order <= 2.
    pieces = []
    for length in range(0, max_arity + 1):
        current = Coderivation(space, flavor, degree, pieces)
        new_first = {}
        new_second = {}
        for word in basis_words(space, length, flavor):
            got = evaluate(word)
            fit = current.apply_word(word, max_hbar=max_hbar)
            for h in sorted(set(got) | set(fit)):
                diff = WordSum(space, flavor)
                if h in got:
                    diff.add(got[h])
                if h in fit:
                    diff.add(fit[h].scaled(-space.field.one()))
                for out_word, coeff in diff.terms.items():
                    if len(out_word) == 1:
                        new_first.setdefault(h, {}).setdefault(
                            word, WordSum(space, flavor)
                        ).add_word(out_word, coeff)
                    elif len(out_word) == 2:
                        new_second.setdefault(h, {}).setdefault(
                            word, WordSum(space, flavor)
                        ).add_word(out_word, coeff)
                    else:
                        raise InvalidInput(
                            "commutator is not an order-<=2 lifted operator "
                            f"(unmatched output at word {word}, hbar {h})"
                        )
        for tables in (new_first, new_second):
            for h in sorted(tables):
                clean = {w: ws for w, ws in tables[h].items() if not ws.is_zero()}
                if clean:
                    pieces.append(OperationPiece(length, degree, clean, hbar=h))
    return Coderivation(space, flavor, degree, pieces)


def check_square_zero(op, max_arity, max_hbar=0, kind="square-zero"):
    """Evaluate (1/2)[op, op] = op . op (op odd) per (arity, hbar) bucket.

    Walks every canonical basis word up to ``max_arity``, pushes it through
    the operator twice with hbar tracking, and records the residual terms.
    All checked buckets appear in the report, empty or not.
    """
    if op.degree % 2 == 0:
        raise InvalidInput("square-zero checks expect an odd operator")
    report = RelationReport(
        kind=kind,
        flavor=op.flavor,
        truncation={"max_arity": max_arity, "max_hbar": max_hbar},
    )
    for length in range(0, max_arity + 1):
        for h in range(0, max_hbar + 1):
            report.buckets.setdefault((length, h), [])
        for word in basis_words(op.space, length, op.flavor):
            once = op.apply_word(word, max_hbar=max_hbar)
            twice = op.apply_state(once, max_hbar=max_hbar)
            for h in sorted(twice):
                ws = twice[h]
                if ws.is_zero():
                    continue
                entries = report.buckets.setdefault((length, h), [])
                for out_word, coeff in ws.items():
                    entries.append((word, out_word, str(coeff)))
    return report
