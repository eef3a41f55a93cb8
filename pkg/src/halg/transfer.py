"""Contraction data, projectors, propagators, and decomposition models.

The grafting expansion is organized by (arity, loop-order) buckets: every
admissible vertex — anything except the bare differential — strictly
decreases the weight left for its subtrees, so each bucket only ever reads
strictly earlier ones and the recursion closes at any finite truncation
without fixed-point iteration.  ``fixed_point_residual`` re-substitutes the
finished expansion into its defining equation and reports the per-bucket
difference, which is identically zero by construction but cheap to audit.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .coalgebra import MultilinearFamily
from .errors import (
    DegenerateForm,
    HomotopyNotCompatible,
    HomotopyNotSquareZero,
    InvalidInput,
    ParityError,
    UncertifiedBase,
)
from .graded import Element, contract_dual_pair, koszul_sign
from .structures import (
    AInfinityAlgebra,
    LInfinityAlgebra,
    LoopHomotopyAlgebra,
    certify_loop,
)
from .words import (
    SYMMETRIC,
    TENSOR,
    WordSum,
    basis_words,
    canonicalize,
    tensor_to_wordsum,
)


def _as_element(space, value):
    if isinstance(value, Element):
        if value.space is not space:
            raise InvalidInput("linear-map value lives over a different space")
        return value
    return space.element(value)


def _linear_map(space, table):
    """Normalize {name: Element-or-coefficient-dict} into {name: Element}."""
    out = {}
    for name, value in (table or {}).items():
        space.degree(name)
        elem = _as_element(space, value)
        if not elem.is_zero():
            out[name] = elem
    return out


def _apply_linear(space, table, elem):
    total = space.zero()
    for name, c in elem.coeffs.items():
        image = table.get(name)
        if image is not None:
            total = total + image.scale(c)
    return total


class PreHodge:
    """A degree -1 square-zero map compatible with the pairing.

    Built through `build_pre_hodge`, which is where the validation lives.
    Neither idempotency of the induced projector nor its commutation with
    the differential is required; both are surfaced by `diagnostics`.
    """

    def __init__(self, space, symplectic, d, h, compat_sign=1):
        self.space = space
        self.symplectic = symplectic
        self.d = d
        self.h = h
        self.compat_sign = compat_sign

    def apply_h(self, elem):
        return _apply_linear(self.space, self.h, elem)

    def apply_d(self, elem):
        return _apply_linear(self.space, self.d, elem)

    def diagnostics(self):
        """Idempotency and d-commutation of P, with advisory flags."""
        space = self.space
        p = make_projector(self)
        idempotent = True
        commutes = True
        for name in space.names:
            once = p.get(name, space.zero())
            if _apply_linear(space, p, once) != once:
                idempotent = False
            pd = _apply_linear(space, p, self.d.get(name, space.zero()))
            dp = self.apply_d(once)
            if pd != dp:
                commutes = False
        flags = []
        if not idempotent:
            flags.append("NON_IDEMPOTENT_P")
        if not commutes:
            flags.append("P_D_NONCOMMUTING")
        return {
            "idempotent_p": idempotent,
            "p_commutes_with_d": commutes,
            "flags": flags,
        }


def build_pre_hodge(space, symplectic, d, h_matrix, compat_sign=1):
    """Validate a contraction candidate against the pairing.

    ``d`` and ``h_matrix`` are {basis_name: Element-or-coefficient-dict};
    ``h`` must lower degree by exactly one, square to zero, and satisfy

        omega(h a, b) + compat_sign * (-1)^{|a|} omega(a, h b) = 0

    on every basis pair.  ``compat_sign`` flips the adjointness reading for
    callers whose contraction was built under the opposite convention.
    """
    if symplectic.space is not space:
        raise InvalidInput("pairing lives over a different space")
    if compat_sign not in (1, -1):
        raise InvalidInput("compat_sign must be +1 or -1")
    d = _linear_map(space, d)
    h = _linear_map(space, h_matrix)
    for name, value in h.items():
        degree = value.degree()
        if degree != space.degree(name) - 1:
            raise ParityError(
                f"h({name}) has degree {degree}, expected {space.degree(name) - 1}"
            )
    for name, value in h.items():
        again = _apply_linear(space, h, value)
        if not again.is_zero():
            raise HomotopyNotSquareZero(
                f"h squares to {again} on {name}", basis=name
            )
    for a in space.names:
        ha = h.get(a, space.zero())
        for b in space.names:
            hb = h.get(b, space.zero())
            lhs = symplectic.pair(ha, space.basis_element(b))
            rhs = symplectic.pair(space.basis_element(a), hb)
            if space.parity(a):
                rhs = -rhs
            total = lhs + compat_sign * rhs
            if total:
                raise HomotopyNotCompatible(
                    f"pairing compatibility fails on ({a}, {b}): "
                    f"residual {total}",
                    pair=(a, b),
                )
    return PreHodge(space, symplectic, d, h, compat_sign)


def make_projector(ph):
    """P = 1 + dh + hd as a {basis_name: Element} table."""
    space = ph.space
    out = {}
    for name in space.names:
        base = space.basis_element(name)
        total = (
            base
            + ph.apply_d(ph.apply_h(base))
            + ph.apply_h(ph.apply_d(base))
        )
        if not total.is_zero():
            out[name] = total
    return out


def propagators(ph):
    """The pair (g, g_inverse) induced by the contraction.

    g(a, b) = -omega(d a, b) as a bilinear form table; g_inverse applies h
    to the first leg of the pairing's dual-pair tensor and lands in the
    symmetric square (pairing compatibility of h is exactly what makes the
    result graded-symmetric).
    """
    space = ph.space
    sym = ph.symplectic
    g = {}
    for a in space.names:
        da = ph.d.get(a)
        if da is None:
            continue
        for b in space.names:
            value = sym.pair(da, space.basis_element(b))
            if value:
                g[(a, b)] = -value
    if sym.degenerate:
        raise DegenerateForm(
            "the pairing has no dual-pair tensor; g_inverse is unavailable"
        )
    tensor = {}
    for (k, j), c in contract_dual_pair(sym).items():
        hk = ph.h.get(k)
        if hk is None:
            continue
        for i, ci in hk.coeffs.items():
            key = (i, j)
            cur = tensor.get(key)
            cur = ci * c if cur is None else cur + ci * c
            if cur:
                tensor[key] = cur
            else:
                tensor.pop(key, None)
    return g, tensor_to_wordsum(space, tensor)


def _set_partitions(positions, blocks):
    """Unordered set partitions of ``positions`` into exactly ``blocks`` parts.

    Anchoring the first element to the first open block kills ordering
    duplicates; every block comes out as a sorted tuple.
    """
    positions = list(positions)
    if blocks <= 0:
        if not positions:
            yield []
        return
    if len(positions) < blocks:
        return
    first, rest = positions[0], positions[1:]
    for size in range(0, len(rest) + 1):
        for members in itertools.combinations(rest, size):
            remaining = [p for p in rest if p not in members]
            for tail in _set_partitions(remaining, blocks - 1):
                yield [(first,) + members] + tail


def _compositions(total, parts):
    """Ordered splittings of ``total`` into ``parts`` positive integers."""
    if parts == 1:
        yield (total,)
        return
    for head in range(1, total - parts + 2):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def _weak_compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for head in range(total + 1):
        for tail in _weak_compositions(total - head, parts - 1):
            yield (head,) + tail


def _vertex_components(operations):
    """Structure maps admissible as expansion vertices: everything except
    the bare differential."""
    return {
        key: table
        for key, table in operations.components.items()
        if key != (1, 0)
    }


def _bucket_value(space, table, word):
    canon, sign = canonicalize(space, word, SYMMETRIC)
    if sign == 0:
        return None
    value = table.get(canon)
    if value is None:
        return None
    return value if sign == 1 else value.scale(-1)


def _expansion_tables(alg, ph, max_arity, max_hbar):
    """Raw and contraction-rooted tables of the grafting recursion."""
    space = alg.space
    star = _vertex_components(alg.operations)
    raw = {}
    rooted = {}
    for arity in range(1, max_arity + 1):
        for order in range(0, max_hbar + 1):
            raw_table = {}
            for word in basis_words(space, arity, SYMMETRIC):
                degrees = [space.degree(n) for n in word]
                total = space.zero()
                for (k, genus), _table in star.items():
                    if genus > order or k > arity:
                        continue
                    for partition in _set_partitions(range(arity), k):
                        sizes = [len(block) for block in partition]
                        perm = [p for block in partition for p in block]
                        sign = koszul_sign(perm, degrees)
                        grafted = [i for i, s in enumerate(sizes) if s >= 2]
                        for orders in _weak_compositions(
                            order - genus, len(grafted)
                        ):
                            factors = []
                            dead = False
                            for b, block in enumerate(partition):
                                if len(block) == 1:
                                    factors.append(
                                        space.basis_element(word[block[0]])
                                    )
                                    continue
                                q = orders[grafted.index(b)]
                                sub = tuple(word[p] for p in block)
                                value = _bucket_value(
                                    space, rooted.get((len(block), q), {}), sub
                                )
                                if value is None or value.is_zero():
                                    dead = True
                                    break
                                factors.append(value)
                            if dead:
                                continue
                            for combo in itertools.product(
                                *(f.coeffs.items() for f in factors)
                            ):
                                names = tuple(n for n, _ in combo)
                                out = alg.operations.value(k, genus, names)
                                if out is None or out.is_zero():
                                    continue
                                coeff = sign
                                for _, c in combo:
                                    coeff = coeff * c
                                total = total + out.scale(coeff)
                if not total.is_zero():
                    raw_table[word] = total
            if raw_table:
                raw[(arity, order)] = raw_table
                if arity >= 2:
                    rooted_table = {}
                    for word, value in raw_table.items():
                        image = ph.apply_h(value)
                        if not image.is_zero():
                            rooted_table[word] = image
                    if rooted_table:
                        rooted[(arity, order)] = rooted_table
    return raw, rooted


def _generating_graphs(operations, max_arity, max_hbar):
    """Structural tree multisets per bucket, independent of any values.

    A shape is ("leaf",) or (vertex_arity, genus, sorted child shapes);
    counts enumerate labeled input slots, so a bucket's multiset says how
    many distinct graftings the recursion formally expands there.
    """
    star = set(_vertex_components(operations))
    graphs = {}
    for arity in range(1, max_arity + 1):
        for order in range(0, max_hbar + 1):
            shapes = {}
            for k, genus in star:
                if genus > order or k > arity:
                    continue
                for partition in _set_partitions(range(arity), k):
                    sizes = [len(block) for block in partition]
                    grafted = [i for i, s in enumerate(sizes) if s >= 2]
                    for orders in _weak_compositions(
                        order - genus, len(grafted)
                    ):
                        options = []
                        dead = False
                        for b, size in enumerate(sizes):
                            if size == 1:
                                options.append([(("leaf",), 1)])
                                continue
                            q = orders[grafted.index(b)]
                            below = graphs.get((size, q))
                            if not below:
                                dead = True
                                break
                            options.append(
                                sorted(below.items(), key=lambda kv: repr(kv[0]))
                            )
                        if dead:
                            continue
                        for chosen in itertools.product(*options):
                            children = tuple(
                                sorted((s for s, _ in chosen), key=repr)
                            )
                            shape = (k, genus, children)
                            count = 1
                            for _, c in chosen:
                                count *= c
                            shapes[shape] = shapes.get(shape, 0) + count
            if shapes:
                graphs[(arity, order)] = shapes
    return graphs


class TreeExpansion:
    """Bucketed values of the grafting recursion, with generating graphs.

    ``components`` holds the contraction-rooted values (one Element per
    canonical word), ``raw`` the same trees without the final contraction —
    the form the decomposition model caps with the projector instead.
    ``graphs`` maps buckets to {shape: count} for the uncapped assembly.
    The arity-1 slice of the rooted expansion is identically zero by
    construction: single inputs are never grafted.
    """

    def __init__(self, space, components, raw, graphs, truncation):
        self.space = space
        self.truncation = dict(truncation)
        self.graphs = graphs
        self._family = MultilinearFamily(space, SYMMETRIC, 0, components)
        self._raw = MultilinearFamily(space, SYMMETRIC, 1, raw)

    def value(self, arity, hbar, word):
        return self._family.value(arity, hbar, word)

    def raw_value(self, arity, hbar, word):
        return self._raw.value(arity, hbar, word)

    def buckets(self):
        return sorted(self._family.components)

    def bucket_count(self):
        return len(self._family.components)

    def is_zero(self):
        return not self._family.components


def expand_trees(alg, ph, max_arity, max_hbar):
    """Grafting recursion rooted in the contraction.

    Vertices run over every structure map except the bare differential;
    subtrees occupy input groups of size >= 2 while single inputs stay
    bare.  Values are exact at the requested truncation — deeper buckets
    never feed back into shallower ones.
    """
    if getattr(alg, "certification", None) is None:
        raise UncertifiedBase("certify the structure before expanding")
    if alg.operations.flavor != SYMMETRIC:
        raise InvalidInput(
            "the grafting expansion is symmetric-flavor; planar input goes "
            "through classical_minimal_model"
        )
    if ph.space is not alg.space:
        raise InvalidInput("contraction lives over a different space")
    if max_arity < 1 or max_hbar < 0:
        raise InvalidInput("truncation must allow at least arity 1")
    raw, rooted = _expansion_tables(alg, ph, max_arity, max_hbar)
    graphs = _generating_graphs(alg.operations, max_arity, max_hbar)
    return TreeExpansion(
        alg.space,
        rooted,
        raw,
        graphs,
        {"max_arity": max_arity, "max_hbar": max_hbar},
    )


def fixed_point_residual(trees, alg, ph):
    """Difference between the expansion and one re-substitution of itself.

    Re-runs the defining assembly with the *finished* tables standing in
    for every subtree and subtracts the stored values.  All residuals are
    zero; the audit exists so nobody has to take that on faith.
    """
    _raw, rooted = _expansion_tables(
        alg, ph, trees.truncation["max_arity"], trees.truncation["max_hbar"]
    )
    space = trees.space
    residuals = {}
    for key in sorted(set(rooted) | set(trees._family.components)):
        stored_table = trees._family.components.get(key, {})
        again_table = rooted.get(key, {})
        for word in set(stored_table) | set(again_table):
            stored = stored_table.get(word, space.zero())
            diff = stored - again_table.get(word, space.zero())
            if not diff.is_zero():
                residuals.setdefault(key, {})[word] = diff
    return residuals


class TransferData:
    """Everything the decomposition produces, kept together for audit."""

    def __init__(self, projector, g, g_inverse, trees, transferred,
                 omega_bar_inverse):
        self.P = projector
        self.g = g
        self.g_inverse = g_inverse
        self.trees = trees
        self.transferred = transferred
        self.omega_bar_inverse = omega_bar_inverse


def _projected_tables(space, raw, projector):
    out = {}
    for key, table in raw.items():
        capped = {}
        for word, value in table.items():
            image = _apply_linear(space, projector, value)
            if not image.is_zero():
                capped[word] = image
        if capped:
            out[key] = capped
    return out


def _word_power(ws, c):
    power = WordSum(ws.space, ws.flavor, {(): 1})
    for _ in range(c):
        step = WordSum(ws.space, ws.flavor)
        for w1, c1 in power.terms.items():
            for w2, c2 in ws.terms.items():
                step.add_word(w1 + w2, c1 * c2)
        power = step
    return power


def _merge_differential(space, table, d):
    merged = dict(table)
    for name, value in d.items():
        word = (name,)
        cur = merged.get(word)
        cur = value if cur is None else cur + value
        if cur.is_zero():
            merged.pop(word, None)
        else:
            merged[word] = cur
    return merged


def decomposition_model(alg, ph, max_arity, max_hbar):
    """Transferred structure: differential plus projected grafting trees
    with loop contractions.

    The vertex sums are the raw expansion capped by P on the output leg;
    loop insertions contract pairs of extra input slots with g_inverse,
    each trading one unit of loop order, and the projected dual-pair
    bivector supplies the second-order part.
    """
    if not isinstance(alg, LoopHomotopyAlgebra):
        raise InvalidInput("decomposition models take a loop structure")
    space = alg.space
    headroom = max_arity + 2 * max_hbar
    trees = expand_trees(alg, ph, headroom, max_hbar)
    projector = make_projector(ph)
    g, g_inverse = propagators(ph)
    capped = _projected_tables(space, trees._raw.components, projector)
    powers = {c: _word_power(g_inverse, c) for c in range(max_hbar + 1)}
    field = space.field

    components = {}
    for arity in range(1, max_arity + 1):
        for order in range(0, max_hbar + 1):
            table = {}
            for word in basis_words(space, arity, SYMMETRIC):
                total = space.zero()
                for c in range(0, order + 1):
                    weight = field.coerce(Fraction(1, math.factorial(c)))
                    bucket = capped.get((arity + 2 * c, order - c))
                    if not bucket:
                        continue
                    for legs, lc in powers[c].terms.items():
                        value = _bucket_value(space, bucket, word + legs)
                        if value is not None:
                            total = total + value.scale(weight * lc)
                if not total.is_zero():
                    table[word] = total
            if table:
                components[(arity, order)] = table

    # the bare differential survives transfer untouched
    merged = _merge_differential(space, components.get((1, 0), {}), ph.d)
    if merged:
        components[(1, 0)] = merged
    else:
        components.pop((1, 0), None)

    bar_tensor = {}
    for (k, j), c in contract_dual_pair(ph.symplectic).items():
        pk = projector.get(k)
        pj = projector.get(j)
        if pk is None or pj is None:
            continue
        for i1, c1 in pk.coeffs.items():
            for i2, c2 in pj.coeffs.items():
                key = (i1, i2)
                cur = bar_tensor.get(key)
                add = c1 * c2 * c
                cur = add if cur is None else cur + add
                if cur:
                    bar_tensor[key] = cur
                else:
                    bar_tensor.pop(key, None)
    omega_bar_inverse = tensor_to_wordsum(space, bar_tensor)

    transferred = LoopHomotopyAlgebra(
        space,
        MultilinearFamily(space, SYMMETRIC, 1, components),
        second_order=omega_bar_inverse,
    )
    return TransferData(projector, g, g_inverse, trees, transferred,
                        omega_bar_inverse)


def verify_decomposition(td, max_arity, max_hbar):
    """Certify the transferred structure at the given truncation."""
    return certify_loop(td.transferred, max_arity, max_hbar)


def _planar_tables(alg, ph, max_arity):
    """Contiguous-block analogue of the grafting recursion.

    Subtree outputs are even in the shifted convention, so the planar
    assembly is sign-free.
    """
    space = alg.space
    vertices = _vertex_components(alg.operations)
    raw = {}
    rooted = {}
    for arity in range(2, max_arity + 1):
        raw_table = {}
        for word in itertools.product(space.names, repeat=arity):
            total = space.zero()
            for (k, _genus), _table in vertices.items():
                if k < 2 or k > arity:
                    continue
                for sizes in _compositions(arity, k):
                    factors = []
                    start = 0
                    dead = False
                    for s in sizes:
                        block = word[start : start + s]
                        start += s
                        if s == 1:
                            factors.append(space.basis_element(block[0]))
                            continue
                        value = rooted.get(s, {}).get(block)
                        if value is None:
                            dead = True
                            break
                        factors.append(value)
                    if dead:
                        continue
                    for combo in itertools.product(
                        *(f.coeffs.items() for f in factors)
                    ):
                        names = tuple(n for n, _ in combo)
                        out = alg.operations.value(k, 0, names)
                        if out is None or out.is_zero():
                            continue
                        coeff = space.field.one()
                        for _, c in combo:
                            coeff = coeff * c
                        total = total + out.scale(coeff)
            if not total.is_zero():
                raw_table[word] = total
        if raw_table:
            raw[arity] = raw_table
            rooted_table = {}
            for word, value in raw_table.items():
                image = ph.apply_h(value)
                if not image.is_zero():
                    rooted_table[word] = image
            if rooted_table:
                rooted[arity] = rooted_table
    return raw, rooted


def classical_minimal_model(alg, ph, max_arity):
    """The loop-order-zero slice of the transfer, one flavor at a time.

    Symmetric input reuses the grafting recursion at order zero; planar
    input runs the contiguous-block analogue.  Either way the result is
    the differential plus projector-capped trees.
    """
    if getattr(alg, "certification", None) is None:
        raise UncertifiedBase("certify the structure before transferring")
    if any(g != 0 for g in alg.operations.genera()):
        raise InvalidInput("classical transfer takes genus-zero structures")
    if ph.space is not alg.space:
        raise InvalidInput("contraction lives over a different space")
    if max_arity < 1:
        raise InvalidInput("truncation must allow at least arity 1")
    space = alg.space
    projector = make_projector(ph)

    if alg.operations.flavor == TENSOR:
        raw, _rooted = _planar_tables(alg, ph, max_arity)
        out = {}
        for arity, table in raw.items():
            capped = {}
            for word, value in table.items():
                image = _apply_linear(space, projector, value)
                if not image.is_zero():
                    capped[word] = image
            if capped:
                out[arity] = capped
        merged = _merge_differential(space, out.get(1, {}), ph.d)
        if merged:
            out[1] = merged
        else:
            out.pop(1, None)
        return AInfinityAlgebra.from_components(space, out)

    raw, _rooted = _expansion_tables(alg, ph, max_arity, 0)
    capped = _projected_tables(space, raw, projector)
    merged = _merge_differential(space, capped.get((1, 0), {}), ph.d)
    if merged:
        capped[(1, 0)] = merged
    else:
        capped.pop((1, 0), None)
    return LInfinityAlgebra(
        space, MultilinearFamily(space, SYMMETRIC, 1, capped)
    )
