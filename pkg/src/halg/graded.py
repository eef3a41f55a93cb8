"""Graded vector spaces with ordered bases, sparse elements and Koszul signs.

The sign convention used throughout: reordering homogeneous factors picks up
(-1)^(|a||b|) per transposition of adjacent factors a, b.  Degrees are
integers; only parity enters signs.

The pairing ("symplectic") layer fixes the package-wide convention for odd
bilinear forms: an odd pairing is symmetric on its mixed-parity support,

    omega(a, b) = (-1)^((|a|+1)(|b|+1)) * omega(b, a),

which is the suspended-degree antisymmetry.  Under it the dual-pair tensor
sum_k e_k (x) e^k is graded-symmetric and independent of the chosen basis,
which is what the second-order machinery downstream relies on.
"""

from __future__ import annotations

from .errors import DegenerateForm, InvalidInput, ParityError
from .linalg import invert_matrix
from .scalars import RATIONALS


def koszul_sign(perm, degrees):
    """Sign acquired when (x_0, ..., x_{n-1}) becomes (x_perm[0], x_perm[1], ...).

    ``perm`` lists original positions in their new order; ``degrees`` are the
    degrees of the original factors.  Only parities matter.  Identity gives +1;
    swapping two odd factors gives -1.
    """
    perm = list(perm)
    if sorted(perm) != list(range(len(degrees))):
        raise InvalidInput(f"not a permutation of 0..{len(degrees) - 1}: {perm}")
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j] and degrees[perm[i]] % 2 and degrees[perm[j]] % 2:
                sign = -sign
    return sign


def merge_sign(left_positions, right_positions, degrees):
    """Koszul sign of unshuffling positions into (left block, right block).

    Both blocks keep their internal order; this is the sign of the permutation
    placing the left block before the right block.
    """
    sign = 1
    for r in right_positions:
        for l in left_positions:
            if l > r and degrees[l] % 2 and degrees[r] % 2:
                sign = -sign
    return sign


class GradedSpace:
    """Finite-dimensional graded space with a named, ordered basis."""

    def __init__(self, basis, field=RATIONALS):
        seen = set()
        self.names = []
        self.degrees = {}
        for entry in basis:
            try:
                name, degree = entry
            except (TypeError, ValueError):
                raise InvalidInput(f"basis entries must be (name, degree) pairs, got {entry!r}")
            if not isinstance(name, str) or not name:
                raise InvalidInput(f"basis names must be non-empty strings, got {name!r}")
            if not isinstance(degree, int) or isinstance(degree, bool):
                raise InvalidInput(f"degree of {name!r} must be an integer, got {degree!r}")
            if name in seen:
                raise InvalidInput(f"duplicate basis name {name!r}")
            seen.add(name)
            self.names.append(name)
            self.degrees[name] = degree
        self.field = field
        self.index = {n: i for i, n in enumerate(self.names)}

    @property
    def dim(self):
        return len(self.names)

    def degree(self, name):
        try:
            return self.degrees[name]
        except KeyError:
            raise InvalidInput(f"unknown basis name {name!r}")

    def parity(self, name):
        return self.degree(name) % 2

    def zero(self):
        return Element(self, {})

    def basis_element(self, name, coeff=1):
        self.degree(name)
        return Element(self, {name: self.field.coerce(coeff)})

    def element(self, coeffs):
        return Element(self, {n: self.field.coerce(c) for n, c in coeffs.items()})

    def __contains__(self, name):
        return name in self.degrees

    def __repr__(self):
        parts = ", ".join(f"{n}:{self.degrees[n]}" for n in self.names)
        return f"GradedSpace({parts})"


class Element:
    """Sparse vector over a GradedSpace; zero coefficients are never stored."""

    __slots__ = ("space", "coeffs")

    def __init__(self, space, coeffs):
        self.space = space
        self.coeffs = {}
        for name, c in coeffs.items():
            if name not in space.degrees:
                raise InvalidInput(f"unknown basis name {name!r}")
            if c:
                self.coeffs[name] = c

    def is_zero(self):
        return not self.coeffs

    def is_homogeneous(self):
        degs = {self.space.degrees[n] for n in self.coeffs}
        return len(degs) <= 1

    def degree(self):
        """Degree of a homogeneous element; None for zero; raises on mixed."""
        degs = {self.space.degrees[n] for n in self.coeffs}
        if not degs:
            return None
        if len(degs) > 1:
            raise ParityError(f"element has mixed degrees {sorted(degs)}")
        return degs.pop()

    def items(self):
        """(name, coeff) pairs in basis order — the canonical iteration."""
        return [(n, self.coeffs[n]) for n in self.space.names if n in self.coeffs]

    def __add__(self, other):
        if not isinstance(other, Element) or other.space is not self.space:
            return NotImplemented
        out = dict(self.coeffs)
        for n, c in other.coeffs.items():
            s = out.get(n)
            s = c if s is None else s + c
            if s:
                out[n] = s
            else:
                out.pop(n, None)
        return Element(self.space, out)

    def __sub__(self, other):
        if not isinstance(other, Element) or other.space is not self.space:
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return Element(self.space, {n: -c for n, c in self.coeffs.items()})

    def scale(self, scalar):
        scalar = self.space.field.coerce(scalar)
        return Element(self.space, {n: c * scalar for n, c in self.coeffs.items()})

    def __rmul__(self, scalar):
        return self.scale(scalar)

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.space is other.space and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((id(self.space), tuple(sorted(self.coeffs.items(), key=lambda nc: nc[0]))))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*{n}" for n, c in self.items())


class SymplecticData:
    """A validated odd (by default) pairing with its inverse data.

    Fields:
      space           -- the underlying GradedSpace
      entries         -- {(a, b): scalar} both orientations stored
      pairing_parity  -- total degree (mod 2) of non-zero pairs; default odd
      degenerate      -- True when built with allow_degenerate on a singular form
      support         -- basis names with a non-identically-zero pairing row
      dual            -- {name: Element} partial dual basis over the support,
                         omega(e_k, dual[e_k]) == 1 and 0 against other support
                         vectors
    """

    def __init__(self, space, entries, pairing_parity, degenerate, support, dual):
        self.space = space
        self.entries = entries
        self.pairing_parity = pairing_parity
        self.degenerate = degenerate
        self.support = support
        self.dual = dual

    def pair_basis(self, a, b):
        return self.entries.get((a, b), self.space.field.zero())

    def pair(self, x, y):
        """omega(x, y) for Elements."""
        total = self.space.field.zero()
        for a, ca in x.coeffs.items():
            for b, cb in y.coeffs.items():
                v = self.entries.get((a, b))
                if v:
                    total = total + ca * cb * v
        return total

    def dual_of(self, name):
        if name not in self.dual:
            raise DegenerateForm(f"{name!r} is outside the pairing support", basis=name)
        return self.dual[name]


def build_symplectic(space, entries, pairing_parity=1, allow_degenerate=False):
    """Validate a pairing table and compute dual-basis data.

    ``entries`` maps basis-name pairs to scalars; either or both orientations
    may be given.  Checks: degree support (|a|+|b| == pairing_parity mod 2,
    else PARITY_ERROR), the adopted symmetry rule (INVALID_INPUT on conflict),
    and invertibility.  A singular form raises DEGENERATE_FORM unless
    ``allow_degenerate`` is set, in which case basis vectors with identically
    zero rows are excluded and the remaining block must be invertible.
    """
    field = space.field
    table = {}
    for key, raw in entries.items():
        try:
            a, b = key
        except (TypeError, ValueError):
            raise InvalidInput(f"pairing keys must be (name, name), got {key!r}")
        for n in (a, b):
            if n not in space.degrees:
                raise InvalidInput(f"unknown basis name {n!r} in pairing")
        val = field.coerce(raw)
        if not val:
            continue
        if (space.degree(a) + space.degree(b)) % 2 != pairing_parity % 2:
            raise ParityError(
                f"pairing ({a},{b}) violates degree parity", a=a, b=b,
                total=space.degree(a) + space.degree(b),
            )
        sign = -1 if ((space.degree(a) + 1) % 2) and ((space.degree(b) + 1) % 2) else 1
        for k, v in ((key, val), ((b, a), sign * val)):
            if k in table and table[k] != v:
                raise InvalidInput(
                    f"pairing entries conflict with the symmetry convention at {k}",
                )
            table[k] = v

    support = [n for n in space.names if any(table.get((n, m)) for m in space.names)]
    missing = [n for n in space.names if n not in support]
    if missing and not allow_degenerate:
        raise DegenerateForm(
            "pairing is singular (identically zero rows); pass allow_degenerate "
            "to opt into the degenerate mode", rows=tuple(missing),
        )
    block = {
        (a, b): table[(a, b)]
        for a in support for b in support if (a, b) in table
    }
    inverse = invert_matrix(block, support, field) if support else {}
    if inverse is None:
        raise DegenerateForm(
            "pairing block is singular on its support; no partial inverse exists",
            support=tuple(support),
        )
    dual = {}
    for k in support:
        # omega(e_k, e^k) = 1: e^k coefficients are the k-th column of W^{-1}
        dual[k] = Element(space, {j: v for (j, kk), v in inverse.items() if kk == k})
    return SymplecticData(
        space=space,
        entries=table,
        pairing_parity=pairing_parity % 2,
        degenerate=bool(missing),
        support=support,
        dual=dual,
    )


def contract_dual_pair(sym):
    """The canonical double-insertion tensor sum_k e_k (x) e^k.

    Returned as ``{(name_i, name_j): scalar}``; over the support only when the
    form is degenerate.  Basis independent: any basis change with recomputed
    duals yields the same tensor (covered by the invariant tests).
    """
    out = {}
    for k in sym.support:
        for j, c in sym.dual[k].coeffs.items():
            key = (k, j)
            s = out.get(key)
            s = c if s is None else s + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return out
