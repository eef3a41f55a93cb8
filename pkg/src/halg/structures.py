"""Named homotopy structures and their relation certifiers.

All structure maps use the shifted-degree convention: every operation
(differential included) has intrinsic degree +1, and the defining relations
are square-zero conditions on the lifted operator, checked per
(arity, hbar-order) bucket.  Certification results are cached on the
structure (a write-once record of the truncation that passed).
"""

from __future__ import annotations

import itertools

from .coalgebra import (
    MultilinearFamily,
    check_square_zero,
    lift_first_order,
    lift_second_order,
)
from .errors import InvalidInput
from .graded import contract_dual_pair
from .reports import RelationReport
from .words import SYMMETRIC, TENSOR, tensor_to_wordsum


def _validate_family(space, family, flavor, classical):
    if not isinstance(family, MultilinearFamily):
        raise InvalidInput("structure maps must be a MultilinearFamily")
    if family.space is not space:
        raise InvalidInput("structure maps live over a different space")
    if family.flavor != flavor:
        raise InvalidInput(f"structure maps must have flavor {flavor!r}")
    if family.degree != 1:
        raise InvalidInput("structure maps must have intrinsic degree 1")
    if classical and any(g != 0 for g in family.genera()):
        raise InvalidInput("classical structures admit genus-0 components only")


class AInfinityAlgebra:
    """Tensor-flavor structure: operations m_k with [M, M] = 0."""

    flavor = TENSOR
    kind = "a-infinity"

    def __init__(self, space, operations):
        _validate_family(space, operations, TENSOR, classical=True)
        self.space = space
        self.operations = operations
        self.certification = None

    @classmethod
    def from_components(cls, space, components):
        """Build from {arity: {input_tuple: Element}} tables (genus 0)."""
        fam = MultilinearFamily(
            space, cls.flavor, 1, {(k, 0): t for k, t in components.items()}
        )
        return cls(space, fam)

    def operator(self):
        return lift_first_order(self.operations)

    def differential(self):
        """The arity-1 component as {basis_name: Element}."""
        table = self.operations.components.get((1, 0), {})
        return {word[0]: value for word, value in table.items()}


class LInfinityAlgebra(AInfinityAlgebra):
    """Symmetric-flavor structure: operations l_k with [L, L] = 0."""

    flavor = SYMMETRIC
    kind = "l-infinity"

    def __init__(self, space, operations):
        _validate_family(space, operations, SYMMETRIC, classical=True)
        self.space = space
        self.operations = operations
        self.certification = None


class LoopHomotopyAlgebra:
    """Symmetric structure with genus labels and a second-order part.

    The full operator is D(l_q) plus the hbar-weighted multiplication by the
    pairing's dual-pair bivector.  ``second_order`` overrides that bivector
    (transferred structures carry a projected one that no longer matches any
    pairing); at least one of ``symplectic`` / ``second_order`` must be given
    before the operator can be assembled.
    """

    flavor = SYMMETRIC
    kind = "loop"

    def __init__(self, space, operations, symplectic=None, second_order=None):
        _validate_family(space, operations, SYMMETRIC, classical=False)
        if symplectic is not None and symplectic.space is not space:
            raise InvalidInput("pairing lives over a different space")
        if second_order is not None:
            if second_order.flavor != SYMMETRIC or second_order.space is not space:
                raise InvalidInput("second-order bivector must be a symmetric "
                                   "word sum over the same space")
        self.space = space
        self.operations = operations
        self.symplectic = symplectic
        self.second_order = second_order
        self.certification = None

    @classmethod
    def from_components(cls, space, components, symplectic=None, second_order=None):
        """Build from {(arity, genus): {input_tuple: Element}} tables."""
        fam = MultilinearFamily(space, SYMMETRIC, 1, components)
        return cls(space, fam, symplectic=symplectic, second_order=second_order)

    def inverse_bivector(self):
        """The bivector behind the second-order part of the operator."""
        if self.second_order is not None:
            return self.second_order
        if self.symplectic is None:
            raise InvalidInput(
                "loop structure needs a pairing or an explicit bivector")
        return tensor_to_wordsum(self.space, contract_dual_pair(self.symplectic))

    def operator(self):
        first = lift_first_order(self.operations)
        bivector = self.inverse_bivector()
        if bivector.is_zero():
            # fully degenerate second-order part (e.g. a transfer whose
            # projector vanishes): the operator is first-order only
            return first
        return first.plus(lift_second_order(bivector, hbar=1))

    def differential(self):
        table = self.operations.components.get((1, 0), {})
        return {word[0]: value for word, value in table.items()}

    def classical_family(self):
        """The genus-0 slice as a classical MultilinearFamily."""
        slice_ = {
            key: table
            for key, table in self.operations.components.items()
            if key[1] == 0
        }
        return MultilinearFamily(self.space, SYMMETRIC, 1, slice_)


class CyclicStructure:
    """A structure together with the pairing its vertices respect."""

    def __init__(self, base, symplectic=None):
        if symplectic is None:
            symplectic = getattr(base, "symplectic", None)
        if symplectic is None:
            raise InvalidInput("cyclic structure needs a pairing")
        if symplectic.space is not base.space:
            raise InvalidInput("pairing lives over a different space")
        self.base = base
        self.symplectic = symplectic


def _certify(alg, report):
    if report.passed:
        alg.certification = dict(report.truncation)
    return report


def certify_a_infinity(alg, max_arity):
    """Square-zero check of the tensor lift; caches the result on success."""
    return _certify(alg, check_square_zero(
        alg.operator(), max_arity, max_hbar=0, kind=alg.kind))


def certify_l_infinity(alg, max_arity):
    return _certify(alg, check_square_zero(
        alg.operator(), max_arity, max_hbar=0, kind=alg.kind))


def certify_loop(alg, max_arity, max_hbar):
    """Square-zero check of the full operator, bucketed by (arity, hbar).

    The hbar order of a residual counts genus labels plus second-order
    factors, so the classical relations sit at order 0, the pairing
    compatibility of the differential at order 1, and involutivity-type
    cancellations at order 2.
    """
    return _certify(alg, check_square_zero(
        alg.operator(), max_arity, max_hbar=max_hbar, kind=alg.kind))


def cyclicity_check(cyc, max_arity):
    """Rotation invariance of omega(a_0, m(a_1, ..., a_n)) per vertex.

    For every basis tuple the value must equal its one-step cyclic rotation
    weighted by the Koszul sign of moving the last input to the front.
    Buckets are keyed (arity, genus); only violations are recorded.
    """
    base = cyc.base
    family = base.operations
    sym = cyc.symplectic
    space = base.space
    report = RelationReport(
        kind="cyclicity",
        flavor=family.flavor,
        truncation={"max_arity": max_arity},
    )
    genera = family.genera() or [0]
    for arity in range(1, max_arity + 1):
        for g in genera:
            report.buckets.setdefault((arity, g), [])
            if (arity, g) not in family.components:
                continue
            entries = report.buckets[(arity, g)]
            for tup in itertools.product(space.names, repeat=arity + 1):
                value = family.value(arity, g, tup[1:])
                lhs = space.field.zero()
                if value is not None:
                    for name, c in value.coeffs.items():
                        lhs = lhs + c * sym.pair_basis(tup[0], name)
                rot = (tup[-1],) + tup[:-1]
                rvalue = family.value(arity, g, rot[1:])
                rhs = space.field.zero()
                if rvalue is not None:
                    for name, c in rvalue.coeffs.items():
                        rhs = rhs + c * sym.pair_basis(rot[0], name)
                if space.parity(tup[-1]) and sum(
                    space.parity(n) for n in tup[:-1]
                ) % 2:
                    rhs = -rhs
                residual = lhs - rhs
                if residual:
                    entries.append((tup, rot, str(residual)))
    return report
