"""Words over a graded basis: tensor (ordered) and symmetric flavors.

A word is a tuple of basis names.  Tensor words are kept as written;
symmetric words are canonicalized to non-decreasing basis order with the
Koszul sign of the sorting permutation, and any word repeating an odd basis
element is zero.  A ``WordSum`` is a sparse scalar combination of canonical
words; a length-2 symmetric word (a, b) stands for the symmetrized tensor
a (x) b + (-1)^(|a||b|) b (x) a, and (a, a) for a (x) a — the polarization
convention used when converting pairing tensors to words.
"""

from __future__ import annotations

import itertools

from .errors import InvalidInput, ParityError
from .graded import merge_sign

TENSOR = "tensor"
SYMMETRIC = "symmetric"

FLAVORS = (TENSOR, SYMMETRIC)


def check_flavor(flavor):
    if flavor not in FLAVORS:
        raise InvalidInput(f"flavor must be one of {FLAVORS}, got {flavor!r}")


def word_degree(space, word):
    return sum(space.degree(n) for n in word)


def symmetric_normalize(space, word):
    """Canonical (sorted) form of a symmetric word with its Koszul sign.

    Returns (canonical_tuple, sign); sign 0 means the word vanishes
    (repeated odd factor).  Insertion sort, counting odd-odd crossings.
    """
    names = list(word)
    parities = [space.parity(n) for n in names]
    order = [space.index[n] for n in names]
    sign = 1
    for i in range(1, len(names)):
        j = i
        while j > 0 and order[j - 1] > order[j]:
            if parities[j - 1] and parities[j]:
                sign = -sign
            order[j - 1], order[j] = order[j], order[j - 1]
            names[j - 1], names[j] = names[j], names[j - 1]
            parities[j - 1], parities[j] = parities[j], parities[j - 1]
            j -= 1
    for i in range(1, len(names)):
        if names[i] == names[i - 1] and space.parity(names[i]):
            return tuple(names), 0
    return tuple(names), sign


def canonicalize(space, word, flavor):
    check_flavor(flavor)
    if flavor == TENSOR:
        for n in word:
            space.degree(n)
        return tuple(word), 1
    return symmetric_normalize(space, word)


class WordSum:
    """Sparse linear combination of canonical words of one flavor."""

    __slots__ = ("space", "flavor", "terms")

    def __init__(self, space, flavor, terms=None):
        check_flavor(flavor)
        self.space = space
        self.flavor = flavor
        self.terms = {}
        if terms:
            for word, coeff in terms.items():
                self.add_word(word, coeff)

    def copy(self):
        out = WordSum(self.space, self.flavor)
        out.terms = dict(self.terms)
        return out

    def add_word(self, word, coeff):
        if not coeff:
            return
        canon, sign = canonicalize(self.space, word, self.flavor)
        if sign == 0:
            return
        if sign == -1:
            coeff = -coeff
        cur = self.terms.get(canon)
        cur = coeff if cur is None else cur + coeff
        if cur:
            self.terms[canon] = cur
        else:
            self.terms.pop(canon, None)

    def add(self, other):
        if other.space is not self.space or other.flavor != self.flavor:
            raise InvalidInput("cannot add word sums over different spaces/flavors")
        for w, c in other.terms.items():
            cur = self.terms.get(w)
            cur = c if cur is None else cur + c
            if cur:
                self.terms[w] = cur
            else:
                self.terms.pop(w, None)
        return self

    def scale(self, scalar):
        if not scalar:
            self.terms = {}
            return self
        self.terms = {w: c * scalar for w, c in self.terms.items()}
        return self

    def scaled(self, scalar):
        return self.copy().scale(scalar)

    def is_zero(self):
        return not self.terms

    def items(self):
        """Terms in the canonical deterministic order."""
        key = self.sort_key
        return sorted(self.terms.items(), key=lambda wc: key(wc[0]))

    def sort_key(self, word):
        return (len(word), tuple(self.space.index[n] for n in word))

    def word_lengths(self):
        return sorted({len(w) for w in self.terms})

    def __eq__(self, other):
        if not isinstance(other, WordSum):
            return NotImplemented
        return (
            self.space is other.space
            and self.flavor == other.flavor
            and self.terms == other.terms
        )

    def __repr__(self):
        if not self.terms:
            return "0"
        sep = "|" if self.flavor == TENSOR else "^"
        return " + ".join(f"{c}*[{sep.join(w)}]" for w, c in self.items())


def basis_words(space, length, flavor):
    """All canonical basis words of one length, in deterministic order."""
    check_flavor(flavor)
    if flavor == TENSOR:
        yield from itertools.product(space.names, repeat=length)
        return
    for combo in itertools.combinations_with_replacement(space.names, length):
        drop = False
        for a, b in zip(combo, combo[1:]):
            if a == b and space.parity(a):
                drop = True
                break
        if not drop:
            yield combo


def comultiply(space, word, flavor):
    """Coproduct of a basis word: list of (left, right, sign) splittings.

    Tensor flavor deconcatenates (n+1 terms including the empty sides);
    symmetric flavor unshuffles over all position subsets with Koszul signs
    (2^n terms including the empty sides).
    """
    check_flavor(flavor)
    word = tuple(word)
    out = []
    if flavor == TENSOR:
        for i in range(len(word) + 1):
            out.append((word[:i], word[i:], 1))
        return out
    degrees = [space.degree(n) for n in word]
    positions = range(len(word))
    for r in range(len(word) + 1):
        for left in itertools.combinations(positions, r):
            right = tuple(p for p in positions if p not in left)
            sign = merge_sign(left, right, degrees)
            out.append(
                (tuple(word[p] for p in left), tuple(word[p] for p in right), sign)
            )
    return out


def tensor_to_wordsum(space, tensor):
    """Convert a graded-symmetric 2-tensor {(a, b): c} to a length-2 WordSum.

    Uses the polarization convention: the word (a, b) with a < b stands for
    a (x) b + (-1)^(|a||b|) b (x) a, so its coefficient is read off the
    canonically-ordered tensor entry.  The same convention makes a diagonal
    word (a, a) stand for 2 a (x) a, so diagonal entries are halved (over a
    field of characteristic 2 an even diagonal is therefore rejected by the
    scalar layer).  Rejects tensors that are not graded-symmetric (those
    have no symmetric-word representative).
    """
    out = WordSum(space, SYMMETRIC)
    for (a, b), c in tensor.items():
        if not c:
            continue
        swap = -1 if space.parity(a) and space.parity(b) else 1
        mirror = tensor.get((b, a))
        if a == b:
            if swap == -1:
                raise ParityError(
                    f"odd diagonal entry ({a},{a}) is antisymmetric; "
                    "not representable as a symmetric word"
                )
            out.add_word((a, a), c / 2)
            continue
        if mirror is None or mirror != swap * c:
            raise InvalidInput(
                f"tensor is not graded-symmetric at ({a},{b})/({b},{a})"
            )
        if space.index[a] < space.index[b]:
            out.add_word((a, b), c)
    return out


def wordsum_to_tensor(bivector):
    """Inverse of `tensor_to_wordsum` on length-2 word sums."""
    space = bivector.space
    out = {}
    for word, c in bivector.terms.items():
        if len(word) != 2:
            raise InvalidInput("expected a sum of length-2 words")
        a, b = word
        swap = -1 if space.parity(a) and space.parity(b) else 1
        if a == b:
            out[(a, a)] = out.get((a, a), space.field.zero()) + c + c
        else:
            out[(a, b)] = out.get((a, b), space.field.zero()) + c
            out[(b, a)] = out.get((b, a), space.field.zero()) + swap * c
    return {k: v for k, v in out.items() if v}
