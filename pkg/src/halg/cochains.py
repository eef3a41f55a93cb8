"""Cyclic functionals on tensor words and the induced bialgebra layer.

A cyclic cochain is a sparse functional on words over the open-sector space,
invariant under cyclic rotation up to the Koszul sign of moving the last
input to the front.  The three operations — the differential induced by the
open structure maps, the pairing-transported bracket, and the one-boundary
splitting cobracket — assemble into an odd operator on symmetric words of
cochains whose square measures the involutive-bialgebra relations.

Grading: a cochain supported on input tuples of total degree D sits in
degree -D, so that all three operations have degree +1 and parity D mod 2
drives every sign below.
"""

from __future__ import annotations

import itertools

from .coalgebra import Coderivation, MultilinearFamily, OperationPiece, lift_first_order
from .errors import DegenerateForm, InvalidInput, ParityError, UncertifiedBase
from .graded import Element, GradedSpace
from .reports import RelationReport
from .words import SYMMETRIC, WordSum, basis_words, tensor_to_wordsum


def _rotate_once(space, word):
    """One cyclic step (a_1..a_n) -> (a_n, a_1, ..) with its Koszul sign."""
    last = word[-1]
    rest = word[:-1]
    sign = 1
    if space.parity(last) and sum(space.parity(n) for n in rest) % 2:
        sign = -1
    return (last,) + rest, sign


class CyclicCochain:
    """Sparse rotation-invariant functional; may mix arities of one parity.

    ``entries`` maps input tuples to scalars; the table is closed under
    rotation at construction and any inconsistency (conflicting values in an
    orbit, or a non-zero value on an orbit whose full rotation cycle carries
    sign -1) raises InvalidInput.  All supported tuples must share the same
    total input degree.
    """

    __slots__ = ("space", "values")

    def __init__(self, space, entries=None):
        self.space = space
        self.values = {}
        if entries:
            field = space.field
            for word, raw in entries.items():
                word = tuple(word)
                if not word:
                    raise InvalidInput("cochains are defined on words of length >= 1")
                for n in word:
                    space.degree(n)
                c = field.coerce(raw)
                if c:
                    self._insert_orbit(word, c)
            degrees = {
                sum(space.degree(n) for n in w) for w in self.values
            }
            if len(degrees) > 1:
                raise ParityError(
                    f"cochain mixes input total degrees {sorted(degrees)}"
                )

    def _insert_orbit(self, word, coeff):
        w, s = word, 1
        for _ in range(len(word)):
            expected = coeff if s == 1 else -coeff
            current = self.values.get(w)
            if current is None:
                self.values[w] = expected
            elif current != expected:
                raise InvalidInput(
                    f"values conflict with cyclic invariance on orbit of {word}"
                )
            w, step = _rotate_once(self.space, w)
            s *= step
        if s == -1:
            raise InvalidInput(
                f"the rotation cycle of {word} has sign -1; only the zero "
                "value is cyclic on this orbit"
            )

    def value(self, word):
        return self.values.get(tuple(word), self.space.field.zero())

    def is_zero(self):
        return not self.values

    def arities(self):
        return sorted({len(w) for w in self.values})

    def input_degree(self):
        """Total input degree on the support; None when zero."""
        for w in self.values:
            return sum(self.space.degree(n) for n in w)
        return None

    def parity(self):
        d = self.input_degree()
        return 0 if d is None else d % 2

    def items(self):
        key = lambda w: (len(w), tuple(self.space.index[n] for n in w))
        return sorted(self.values.items(), key=lambda wc: key(wc[0]))

    def copy(self):
        out = CyclicCochain(self.space)
        out.values = dict(self.values)
        return out

    def add(self, other):
        if other.space is not self.space:
            raise InvalidInput("cannot add cochains over different spaces")
        for w, c in other.values.items():
            cur = self.values.get(w)
            cur = c if cur is None else cur + c
            if cur:
                self.values[w] = cur
            else:
                self.values.pop(w, None)
        if self.values:
            degrees = {sum(self.space.degree(n) for n in w) for w in self.values}
            if len(degrees) > 1:
                raise ParityError("sum mixes input total degrees")
        return self

    def scale(self, scalar):
        if not scalar:
            self.values = {}
            return self
        self.values = {w: c * scalar for w, c in self.values.items()}
        return self

    def scaled(self, scalar):
        return self.copy().scale(scalar)

    def restrict(self, max_arity):
        out = CyclicCochain(self.space)
        out.values = {w: c for w, c in self.values.items() if len(w) <= max_arity}
        return out

    def __eq__(self, other):
        if not isinstance(other, CyclicCochain):
            return NotImplemented
        return self.space is other.space and self.values == other.values

    def __repr__(self):
        if not self.values:
            return "0"
        return " + ".join(f"{c}*<{'|'.join(w)}>" for w, c in self.items())


def cyclic_basis(space, max_arity):
    """Orbit-indicator basis of cyclic cochains, arities 1..max_arity.

    Returns [(representative_tuple, CyclicCochain)] in deterministic order;
    orbits whose rotation cycle carries sign -1 admit only zero and are
    skipped.
    """
    out = []
    for arity in range(1, max_arity + 1):
        seen = set()
        for word in itertools.product(space.names, repeat=arity):
            if word in seen:
                continue
            members = {}
            w, s = word, 1
            degenerate = False
            for _ in range(arity):
                if w in members:
                    if members[w] != s:
                        degenerate = True
                        break
                else:
                    members[w] = s
                w, step = _rotate_once(space, w)
                s *= step
            if not degenerate and s == -1:
                degenerate = True
            seen.update(members)
            if degenerate:
                continue
            out.append((word, CyclicCochain(space, members)))
    return out


def dualize_cochain(f, sym):
    """Contract the first slot of f with the pairing's inverse bivector.

    m_f(a_1..a_k) = sum_j (-1)^{|e^j| (|a_1|+..+|a_k|)} f(e_j, a_1..a_k) e^j,
    the Koszul weight being the cost of carrying the dual leg past the
    remaining inputs.  With the matching weight in the reverse transport,
    f(a_0, ..) = +-<a_0, m_f(..)> reproduces f, and rotation invariance of
    f corresponds to the pairing-cyclicity preserved by commutators.  The
    family has one component per supported arity of ``f`` and tensor flavor;
    inhomogeneous output degrees raise ParityError.
    """
    if sym.degenerate:
        raise DegenerateForm("dualization needs a non-degenerate pairing")
    space = f.space
    tables = {}
    for u, fu in f.values.items():
        first, rest = u[0], u[1:]
        dual = sym.dual.get(first)
        if dual is None:
            continue
        rest_parity = sum(space.parity(n) for n in rest) % 2
        # |e^first| is opposite to |e_first| across an odd pairing
        if rest_parity and not space.parity(first):
            fu = -fu
        table = tables.setdefault(len(rest), {})
        coeffs = table.setdefault(rest, {})
        for name, cj in dual.coeffs.items():
            c = coeffs.get(name)
            c = cj * fu if c is None else c + cj * fu
            if c:
                coeffs[name] = c
            else:
                coeffs.pop(name, None)
    components = {}
    degree = None
    for arity, table in tables.items():
        cleaned = {}
        for word, coeffs in table.items():
            if not coeffs:
                continue
            value = Element(space, coeffs)
            d = value.degree() - sum(space.degree(n) for n in word)
            if degree is None:
                degree = d
            elif degree != d:
                raise ParityError("dual family mixes intrinsic degrees")
            cleaned[word] = value
        if cleaned:
            components[(arity, 0)] = cleaned
    if degree is None:
        degree = 1
    return MultilinearFamily(space, "tensor", degree, components)


def _insert_tables(outer, inner, into=None, flip=False):
    """Accumulate the cogenerator of outer o D(inner) into raw tables.

    One application of ``inner`` is spliced into each input slot of each
    supported entry of ``outer``, with the sign of the odd/even operator
    crossing the input prefix.  ``into`` maps word -> {name: coeff}; pass
    ``flip`` to subtract instead of add.  Both families are support-driven,
    so sparse data stays cheap.
    """
    tables = {} if into is None else into
    inner_odd = inner.degree % 2
    space = outer.space
    for (_oa, _og), otable in outer.components.items():
        for u, val_out in otable.items():
            prefix_parity = 0
            for p in range(len(u)):
                mid = u[p]
                for (_ia, _ig), itable in inner.components.items():
                    for v, val_in in itable.items():
                        c = val_in.coeffs.get(mid)
                        if not c:
                            continue
                        w = u[:p] + v + u[p + 1 :]
                        sign = -1 if inner_odd and prefix_parity else 1
                        if flip:
                            sign = -sign
                        dest = tables.setdefault(w, {})
                        for name, cf in val_out.coeffs.items():
                            cur = dest.get(name, 0) + sign * c * cf
                            if cur:
                                dest[name] = cur
                            else:
                                dest.pop(name, None)
                prefix_parity = (prefix_parity + space.parity(mid)) % 2
    return tables


def _family_commutator_tables(a, b):
    """Raw tables of the graded commutator a o D(b) -+ b o D(a)."""
    tables = _insert_tables(a, b)
    flip = not (a.degree % 2 and b.degree % 2)
    return _insert_tables(b, a, into=tables, flip=flip)


def _undualize_tables(space, tables, sym):
    """Close the output leg of raw multilinear tables through the pairing.

    The cochain f(a_0, a_1..a_k) = <a_0, table value at (a_1..a_k)> comes
    back cyclic whenever the tables arose from a commutator of cyclic data;
    the constructor verifies that on every orbit.
    """
    partners = {}
    for (first, second), w in sym.entries.items():
        partners.setdefault(second, []).append((first, w))
    values = {}
    for word, coeffs in tables.items():
        word_parity = sum(space.parity(n) for n in word) % 2
        for name, c in coeffs.items():
            for partner, w in partners.get(name, ()):
                key = (partner,) + word
                cw = c * w
                if word_parity and not space.parity(partner):
                    cw = -cw
                cur = values.get(key, 0) + cw
                if cur:
                    values[key] = cur
                else:
                    values.pop(key, None)
    return CyclicCochain(space, values)


def _open_and_pairing(obj):
    if hasattr(obj, "open_algebra"):
        return obj.open_algebra, obj.symplectic
    if hasattr(obj, "base"):
        return obj.base, obj.symplectic
    raise InvalidInput(
        "expected a bialgebra layer or a cyclic structure carrying a pairing"
    )


def cochain_differential(ibl, f):
    """The cyclic differential: commutator with the structure maps.

    f is opened up through the pairing, the lifted structure maps are
    commuted with the result, and the pairing closes the free leg again.
    Squares to zero whenever the open structure does.
    """
    alg, sym = _open_and_pairing(ibl)
    if f.is_zero():
        return CyclicCochain(alg.space)
    m_f = dualize_cochain(f, sym)
    tables = _family_commutator_tables(alg.operations, m_f)
    return _undualize_tables(alg.space, tables, sym)


def cochain_bracket(f, g, sym):
    """Pairing-transported bracket of two cyclic cochains.

    Both arguments are dualized into multilinear families, commuted in the
    insertion algebra, and closed up again; the leading-argument suspension
    sign makes the result graded-symmetric in the shifted grading (the
    unshifted bracket is graded-antisymmetric).
    """
    if sym.degenerate:
        raise DegenerateForm("the bracket needs a non-degenerate pairing")
    if f.is_zero() or g.is_zero():
        return CyclicCochain(f.space)
    m_f = dualize_cochain(f, sym)
    m_g = dualize_cochain(g, sym)
    tables = _family_commutator_tables(m_f, m_g)
    out = _undualize_tables(f.space, tables, sym)
    if m_f.degree % 2:
        out.scale(-1)
    return out


def _rotations_with_signs(space, word):
    """All cyclic starting points of ``word`` with their Koszul signs."""
    out = [(word, 1)]
    w, s = word, 1
    for _ in range(len(word) - 1):
        w, step = _rotate_once(space, w)
        s *= step
        out.append((w, s))
    return out


def cobracket_delta(f, sym):
    """One-boundary splitting of a cyclic cochain.

    Returns the polarized pair table {(a_tuple, b_tuple): scalar} of

      (delta f)(a_1..a_n)(b_1..b_m) =
        (-1)^f sum_{i,j} sum_k (-1)^eps f(e_k, a_i.., a_{i-1}, e^k, b_j.., b_{j-1})

    with n, m >= 1, so cochains of arity < 4 split to zero.  The Koszul sign
    collects the two group rotations and the dual leg crossing the rotated
    first group; the global prefactor is the cochain parity.
    """
    if sym.degenerate:
        raise DegenerateForm("the splitting needs a non-degenerate pairing")
    space = f.space
    field = space.field
    out = {}
    pref = -1 if f.parity() else 1
    for total in f.arities():
        if total < 4:
            continue
        for n in range(1, total - 2):
            m = total - 2 - n
            for a in itertools.product(space.names, repeat=n):
                a_rots = _rotations_with_signs(space, a)
                a_par = sum(space.parity(x) for x in a) % 2
                for b in itertools.product(space.names, repeat=m):
                    b_rots = _rotations_with_signs(space, b)
                    acc = field.zero()
                    for ra, sa in a_rots:
                        for rb, sb in b_rots:
                            for k in sym.support:
                                for name, ck in sym.dual[k].coeffs.items():
                                    v = f.values.get((k,) + ra + (name,) + rb)
                                    if not v:
                                        continue
                                    sgn = pref * sa * sb
                                    if space.parity(name) and a_par:
                                        sgn = -sgn
                                    acc = acc + sgn * ck * v
                    if acc:
                        out[(a, b)] = acc
    return out


class IBLStructure:
    """The bialgebra layer over a cyclic open structure.

    Holds the open algebra and its pairing, and materializes truncated
    cochain complexes on demand (cached per arity bound): a graded space
    with one basis vector per rotation orbit, the orbit cochains themselves,
    and the operation tables over that space.
    """

    def __init__(self, cyclic_open):
        self.open_algebra = cyclic_open.base
        self.symplectic = cyclic_open.symplectic
        self._materialized = {}

    def max_open_arity(self):
        arities = self.open_algebra.operations.arities()
        return max(arities) if arities else 1

    def materialize(self, max_arity):
        """(cochain_space, {name: CyclicCochain}, [names]) up to max_arity."""
        cached = self._materialized.get(max_arity)
        if cached is not None:
            return cached
        basis = cyclic_basis(self.open_algebra.space, max_arity)
        space = self.open_algebra.space
        names = []
        cochains = {}
        entries = []
        for rep, cochain in basis:
            name = "|".join(rep)
            names.append(name)
            cochains[name] = cochain
            entries.append((name, -sum(space.degree(n) for n in rep)))
        cspace = GradedSpace(entries, field=space.field)
        self._materialized[max_arity] = (cspace, cochains, names)
        return self._materialized[max_arity]


def _decompose(cochain, cspace, reps):
    coeffs = {}
    for name, rep in reps.items():
        v = cochain.values.get(rep)
        if v:
            coeffs[name] = v
    return Element(cspace, coeffs)


def assemble_operator(ibl, cochain_arity):
    """The odd operator (differential + bracket + hbar-splitting) on words
    of cochains, with tables over the materialized basis."""
    cspace, cochains, names = ibl.materialize(cochain_arity)
    reps = {name: tuple(name.split("|")) for name in names}
    sym = ibl.symplectic
    space = ibl.open_algebra.space
    sums = {space.degree(a) + space.degree(b) for a, b in sym.entries}
    if sums and sums != {1}:
        raise InvalidInput(
            "materialization needs a pairing whose basis pairs all have "
            f"total degree 1, got degrees {sorted(sums)}"
        )
    dh_table = {}
    for name in names:
        image = cochain_differential(ibl, cochains[name]).restrict(cochain_arity)
        value = _decompose(image, cspace, reps)
        if not value.is_zero():
            dh_table[(name,)] = value

    bracket_table = {}
    for w in basis_words(cspace, 2, SYMMETRIC):
        na, nb = w
        image = cochain_bracket(cochains[na], cochains[nb], sym).restrict(cochain_arity)
        value = _decompose(image, cspace, reps)
        if not value.is_zero():
            bracket_table[w] = value

    delta_table = {}
    for name in names:
        pairs = cobracket_delta(cochains[name], sym)
        if not pairs:
            continue
        # the coefficient on each orbit pair reads straight off the two
        # representatives: indicator cochains are 1 on their own rep
        tensor = {}
        for (a, b), c in pairs.items():
            na2, nb2 = "|".join(a), "|".join(b)
            if na2 in cspace.index and nb2 in cspace.index:
                tensor[(na2, nb2)] = c
        ws = tensor_to_wordsum(cspace, tensor)
        if not ws.is_zero():
            delta_table[(name,)] = ws

    components = {}
    if dh_table:
        components[(1, 0)] = dh_table
    if bracket_table:
        components[(2, 0)] = bracket_table
    first = lift_first_order(MultilinearFamily(cspace, SYMMETRIC, 1, components))
    pieces = list(first.pieces)
    if delta_table:
        pieces.append(OperationPiece(1, 1, delta_table, hbar=1))
    return Coderivation(cspace, SYMMETRIC, 1, pieces), cspace, names


def certify_ibl(ibl, max_arity, max_hbar, cochain_arity=4):
    """Square of the bialgebra operator per (word length, hbar) bucket.

    Input words draw on cochains of arity <= cochain_arity; internally the
    basis is enlarged far enough that no intermediate of the two-fold
    application is ever truncated, so residuals are exact.
    """
    if ibl.open_algebra.certification is None:
        raise UncertifiedBase("certify the open structure first")
    raise_by = ibl.max_open_arity() - 1
    headroom = max(
        cochain_arity + 2 * raise_by,
        2 * cochain_arity - 2 + raise_by,
        3 * cochain_arity - 4,
    )
    op, cspace, names = assemble_operator(ibl, headroom)
    small = [n for n in names if n.count("|") + 1 <= cochain_arity]
    report = RelationReport(
        kind="ibl",
        flavor=SYMMETRIC,
        truncation={
            "max_arity": max_arity,
            "max_hbar": max_hbar,
            "cochain_arity": cochain_arity,
        },
    )
    small_space = GradedSpace(
        [(n, cspace.degree(n)) for n in small], field=cspace.field
    )
    for length in range(0, max_arity + 1):
        for h in range(0, max_hbar + 1):
            report.buckets.setdefault((length, h), [])
        for word in basis_words(small_space, length, SYMMETRIC):
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
