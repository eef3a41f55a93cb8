"""Tests for contraction data, tree expansions, and decomposition models."""

from fractions import Fraction

import pytest

from halg.coalgebra import MultilinearFamily
from halg.errors import (
    DegenerateForm,
    HomotopyNotCompatible,
    HomotopyNotSquareZero,
    InvalidInput,
    ParityError,
    UncertifiedBase,
)
from halg.graded import GradedSpace, build_symplectic, koszul_sign
from halg.structures import (
    AInfinityAlgebra,
    LInfinityAlgebra,
    LoopHomotopyAlgebra,
    certify_a_infinity,
    certify_l_infinity,
    certify_loop,
)
from halg.transfer import (
    build_pre_hodge,
    classical_minimal_model,
    decomposition_model,
    expand_trees,
    fixed_point_residual,
    make_projector,
    propagators,
    verify_decomposition,
)
from halg.words import SYMMETRIC, basis_words
from oracles import grafted_tree, grafted_tree_raw, transferred_component


# The four-dimensional loop workhorse: a closed pair (u, w) and a
# contractible pair (p, q), with d p = q contracted by h q = -p.
S4 = GradedSpace([("u", 0), ("w", 1), ("p", 0), ("q", 1)])
SYM4 = build_symplectic(S4, {("u", "w"): 1, ("p", "q"): 1})
D4 = {"p": {"q": 1}}
H4 = {"q": {"p": -1}}

BASE_OPS = {
    (1, 0): {("p",): {"q": 1}},
    (2, 0): {("u", "u"): {"q": 1}, ("u", "p"): {"w": 1}},
}
# the cubic vertex is the cyclic completion of u,p,p -> w; its loop
# contractions cancel only with the u,u,p -> q partner present
CUBIC_OPS = {
    (1, 0): {("p",): {"q": 1}},
    (2, 0): {("u", "u"): {"q": 1}, ("u", "p"): {"w": 1}},
    (3, 0): {("u", "p", "p"): {"w": 1}, ("u", "u", "p"): {"q": 1}},
}

# oracle-side copies of the same data, plain dicts only
NAMES4 = ["u", "w", "p", "q"]
DEG4 = {"u": 0, "w": 1, "p": 0, "q": 1}
ORACLE_H4 = {"q": {"p": Fraction(-1)}}
ORACLE_D4 = {"p": {"q": Fraction(1)}}
GINV4_TENSOR = {("p", "p"): Fraction(-1)}

S2 = GradedSpace([("x", 0), ("y", 1)])
SYM2 = build_symplectic(S2, {("x", "y"): 1})


def _loop(space, sym, components, max_arity=5, max_hbar=2):
    alg = LoopHomotopyAlgebra.from_components(
        space,
        {key: {w: space.element(v) for w, v in t.items()}
         for key, t in components.items()},
        symplectic=sym,
    )
    report = certify_loop(alg, max_arity, max_hbar)
    assert report.passed, report.first_failure
    return alg


def _oracle_ops(components):
    return {
        key: {w: {n: Fraction(c) for n, c in v.items()} for w, v in t.items()}
        for key, t in components.items()
    }


def _ph4():
    return build_pre_hodge(S4, SYM4, D4, H4)


# ---------------------------------------------------------------------------
# contraction data


def test_zero_homotopy_is_valid():
    ph = build_pre_hodge(S4, SYM4, D4, {})
    diag = ph.diagnostics()
    assert diag["flags"] == []
    assert diag["idempotent_p"] and diag["p_commutes_with_d"]


def test_homotopy_must_lower_degree_by_one():
    with pytest.raises(ParityError):
        build_pre_hodge(S2, SYM2, {}, {"y": {"y": 1}})


def test_homotopy_must_square_to_zero():
    space = GradedSpace([("x", 0), ("y", 1), ("z", 2), ("v", -1)])
    sym = build_symplectic(space, {("x", "y"): 1, ("v", "z"): 1})
    with pytest.raises(HomotopyNotSquareZero) as err:
        build_pre_hodge(space, sym, {}, {"z": {"y": 1}, "y": {"x": 1}})
    assert err.value.code == "H_NOT_SQUARE_ZERO"
    assert err.value.details["basis"] == "z"


def test_homotopy_must_respect_the_pairing():
    space = GradedSpace([("x", 0), ("y", 1), ("z", 2), ("v", -1)])
    sym = build_symplectic(space, {("x", "y"): 1, ("v", "z"): 1})
    # h z = y alone is anti-self-adjoint against nothing: the (x, z) slot
    # sees omega(x, h z) = 1 with no balancing term
    with pytest.raises(HomotopyNotCompatible) as err:
        build_pre_hodge(space, sym, {}, {"z": {"y": 1}})
    assert err.value.code == "H_NOT_COMPATIBLE"
    assert err.value.details["pair"] == ("x", "z")


def test_compat_sign_flips_the_adjointness_convention():
    build_pre_hodge(S2, SYM2, {"x": {"y": 1}}, {"y": {"x": 1}})
    with pytest.raises(HomotopyNotCompatible):
        build_pre_hodge(S2, SYM2, {"x": {"y": 1}}, {"y": {"x": 1}},
                        compat_sign=-1)
    with pytest.raises(InvalidInput):
        build_pre_hodge(S2, SYM2, {}, {}, compat_sign=0)


def test_doubled_projector_is_flagged_not_rejected():
    """h y = +x passes every hard check; P = 2 is merely reported."""
    ph = build_pre_hodge(S2, SYM2, {"x": {"y": 1}}, {"y": {"x": 1}})
    p = make_projector(ph)
    assert p["x"] == S2.element({"x": 2})
    assert p["y"] == S2.element({"y": 2})
    diag = ph.diagnostics()
    assert diag["flags"] == ["NON_IDEMPOTENT_P"]
    assert diag["p_commutes_with_d"]


def test_projector_of_contractible_pair_vanishes():
    ph = build_pre_hodge(S2, SYM2, {"x": {"y": 1}}, {"y": {"x": -1}})
    assert make_projector(ph) == {}


def test_projector_restricts_to_the_closed_pair():
    p = make_projector(_ph4())
    assert p == {"u": S4.element({"u": 1}), "w": S4.element({"w": 1})}


def test_projector_with_zero_homotopy_is_the_identity():
    ph = build_pre_hodge(S4, SYM4, D4, {})
    p = make_projector(ph)
    assert p == {n: S4.element({n: 1}) for n in S4.names}


# ---------------------------------------------------------------------------
# propagators


def test_propagator_pairs_the_differential_against_the_form():
    g, ginv = propagators(_ph4())
    assert g == {("p", "p"): -1}
    assert ginv.terms == {("p", "p"): Fraction(-1, 2)}


def test_propagator_vanishes_without_differential():
    ph = build_pre_hodge(S2, SYM2, {}, {"y": {"x": -1}})
    g, ginv = propagators(ph)
    assert g == {}
    assert ginv.terms == {("x", "x"): Fraction(-1, 2)}


def test_inverse_propagator_vanishes_without_homotopy():
    ph = build_pre_hodge(S4, SYM4, D4, {})
    g, ginv = propagators(ph)
    assert g == {("p", "p"): -1}
    assert ginv.is_zero()


def test_degenerate_pairing_has_no_inverse_propagator():
    space = GradedSpace([("x", 0), ("y", 1), ("t", 0)])
    sym = build_symplectic(space, {("x", "y"): 1}, allow_degenerate=True)
    ph = build_pre_hodge(space, sym, {"x": {"y": 1}}, {"y": {"x": -1}})
    with pytest.raises(DegenerateForm):
        propagators(ph)


# ---------------------------------------------------------------------------
# tree expansion


def test_expansion_requires_a_certified_base():
    alg = LoopHomotopyAlgebra.from_components(
        S4, {(1, 0): {("p",): S4.element({"q": 1})}}, symplectic=SYM4)
    with pytest.raises(UncertifiedBase):
        expand_trees(alg, _ph4(), 3, 1)


def test_expansion_rejects_planar_input():
    alg = AInfinityAlgebra.from_components(
        S2, {1: {("x",): S2.element({"y": 1})}})
    assert certify_a_infinity(alg, 3).passed
    ph = build_pre_hodge(S2, SYM2, {"x": {"y": 1}}, {"y": {"x": -1}})
    with pytest.raises(InvalidInput):
        expand_trees(alg, ph, 3, 0)


def test_leading_tree_is_the_contracted_product():
    alg = _loop(S4, SYM4, BASE_OPS)
    trees = expand_trees(alg, _ph4(), 3, 1)
    assert trees.raw_value(2, 0, ("u", "u")) == S4.element({"q": 1})
    assert trees.value(2, 0, ("u", "u")) == S4.element({"p": -1})
    assert trees.value(2, 0, ("u", "p")) is None  # h w = 0


def test_single_inputs_are_never_grafted():
    alg = _loop(S4, SYM4, BASE_OPS)
    trees = expand_trees(alg, _ph4(), 3, 1)
    for name in S4.names:
        for order in (0, 1):
            assert trees.value(1, order, (name,)) is None


def test_two_vertex_chain_carries_multiplicity_three():
    """The cubic slot sums one grafting per choice of bare input."""
    alg = _loop(S4, SYM4, BASE_OPS)
    trees = expand_trees(alg, _ph4(), 3, 0)
    assert trees.raw_value(3, 0, ("u", "u", "u")) == S4.element({"w": -3})
    chain = (2, 0, (("leaf",), (2, 0, (("leaf",), ("leaf",)))))
    assert trees.graphs[(3, 0)] == {chain: 3}
    assert trees.graphs[(2, 0)] == {(2, 0, (("leaf",), ("leaf",))): 1}


def test_generating_graphs_list_direct_and_chained_shapes():
    alg = _loop(S4, SYM4, CUBIC_OPS)
    trees = expand_trees(alg, _ph4(), 3, 0)
    shapes = trees.graphs[(3, 0)]
    direct = (3, 0, (("leaf",), ("leaf",), ("leaf",)))
    chained = (2, 0, (("leaf",), (2, 0, (("leaf",), ("leaf",)))))
    assert shapes == {direct: 1, chained: 3}


def test_tree_values_match_brute_enumeration():
    alg = _loop(S4, SYM4, BASE_OPS)
    trees = expand_trees(alg, _ph4(), 4, 2)
    ops = _oracle_ops(BASE_OPS)
    memo = {}
    for arity in range(2, 5):
        for order in range(3):
            for word in basis_words(S4, arity, SYMMETRIC):
                mine = trees.value(arity, order, word)
                mine = {} if mine is None else dict(mine.coeffs)
                assert mine == grafted_tree(
                    NAMES4, DEG4, ops, ORACLE_H4, order, word, memo)


def test_tree_values_match_brute_enumeration_with_cubic_vertices():
    alg = _loop(S4, SYM4, CUBIC_OPS)
    trees = expand_trees(alg, _ph4(), 4, 2)
    ops = _oracle_ops(CUBIC_OPS)
    memo = {}
    for arity in range(2, 5):
        for order in range(3):
            for word in basis_words(S4, arity, SYMMETRIC):
                mine = trees.value(arity, order, word)
                mine = {} if mine is None else dict(mine.coeffs)
                assert mine == grafted_tree(
                    NAMES4, DEG4, ops, ORACLE_H4, order, word, memo)


def test_odd_crossings_pick_up_reordering_signs():
    """Two odd inputs swapping blocks must flip exactly one of the terms.

    The tables are not a valid structure — the recursion never needs that —
    so certification is stamped rather than earned.
    """
    space = GradedSpace([("x", 0), ("y", 1), ("z", 2), ("v", -1)])
    sym = build_symplectic(space, {("x", "y"): 1, ("v", "z"): 1})
    alg = LInfinityAlgebra(space, MultilinearFamily(space, SYMMETRIC, 1, {
        (2, 0): {("x", "y"): space.element({"z": 2}),
                 ("x", "v"): space.element({"x": 1}),
                 ("y", "v"): space.element({"y": 1})},
    }))
    alg.certification = {"max_arity": 4, "max_hbar": 0}
    ph = build_pre_hodge(space, sym,
                         {"y": {"z": 1}, "v": {"x": -1}},
                         {"z": {"y": -1}, "x": {"v": 1}})
    trees = expand_trees(alg, ph, 4, 0)
    # by hand: the (x,y)-graft gives l2(-2y, v) = -2y and the (x,v)-graft
    # gives -l2(v, y) = +y after v crosses y; the (y,v)-graft dies on h
    assert trees.raw_value(3, 0, ("x", "y", "v")) == space.element({"y": -1})
    ops = {(2, 0): {("x", "y"): {"z": Fraction(2)},
                    ("x", "v"): {"x": Fraction(1)},
                    ("y", "v"): {"y": Fraction(1)}}}
    h = {"z": {"y": Fraction(-1)}, "x": {"v": Fraction(1)}}
    names = ["x", "y", "z", "v"]
    degrees = {"x": 0, "y": 1, "z": 2, "v": -1}
    memo = {}
    for arity in range(2, 5):
        for word in basis_words(space, arity, SYMMETRIC):
            mine = trees.value(arity, 0, word)
            mine = {} if mine is None else dict(mine.coeffs)
            assert mine == grafted_tree(names, degrees, ops, h, 0, word, memo)


def test_reordering_signs_agree_with_reference():
    """koszul_sign against an explicit bubble sort, all permutations."""
    import itertools
    patterns = [(0, 1, 1, 0), (1, 1, 1, 0), (0, 1, 2, -1), (1, 1, 1, 1)]
    for degrees in patterns:
        for perm in itertools.permutations(range(len(degrees))):
            arr = [(p, degrees[p]) for p in perm]
            sign = 1
            for i in range(len(arr)):
                for j in range(len(arr) - 1 - i):
                    if arr[j][0] > arr[j + 1][0]:
                        if arr[j][1] % 2 and arr[j + 1][1] % 2:
                            sign = -sign
                        arr[j], arr[j + 1] = arr[j + 1], arr[j]
            assert koszul_sign(list(perm), list(degrees)) == sign


def test_expansion_is_a_fixed_point():
    for components in (BASE_OPS, CUBIC_OPS):
        alg = _loop(S4, SYM4, components)
        ph = _ph4()
        trees = expand_trees(alg, ph, 4, 2)
        assert fixed_point_residual(trees, alg, ph) == {}


def test_differential_only_structure_has_empty_expansion():
    alg = _loop(S4, SYM4, {(1, 0): {("p",): {"q": 1}}})
    trees = expand_trees(alg, _ph4(), 4, 2)
    assert trees.is_zero()
    assert trees.bucket_count() == 0
    assert trees.buckets() == []


# ---------------------------------------------------------------------------
# decomposition models


def test_contractible_pair_decomposes_to_the_differential():
    alg = _loop(S2, SYM2, {(1, 0): {("x",): {"y": 1}}})
    ph = build_pre_hodge(S2, SYM2, {"x": {"y": 1}}, {"y": {"x": -1}})
    td = decomposition_model(alg, ph, 3, 1)
    assert sorted(td.transferred.operations.components) == [(1, 0)]
    assert td.transferred.operations.components[(1, 0)] == {
        ("x",): S2.element({"y": 1})}
    assert td.omega_bar_inverse.is_zero()
    assert verify_decomposition(td, 3, 1).passed


def test_zero_homotopy_transfers_identically():
    alg = _loop(S4, SYM4, CUBIC_OPS)
    ph = build_pre_hodge(S4, SYM4, D4, {})
    td = decomposition_model(alg, ph, 3, 1)
    assert td.transferred.operations.components == alg.operations.components
    assert td.omega_bar_inverse == alg.inverse_bivector()
    assert verify_decomposition(td, 3, 1).passed


def test_decomposition_matches_hand_values():
    alg = _loop(S4, SYM4, BASE_OPS)
    td = decomposition_model(alg, _ph4(), 3, 1)
    f = td.transferred.operations
    assert sorted(f.components) == [(1, 0), (2, 0), (3, 0)]
    assert f.components[(1, 0)] == {("p",): S4.element({"q": 1})}
    assert f.components[(2, 0)] == {("u", "p"): S4.element({"w": 1})}
    assert f.components[(3, 0)] == {("u", "u", "u"): S4.element({"w": -3})}
    assert td.omega_bar_inverse.terms == {("u", "w"): 1}
    assert verify_decomposition(td, 3, 1).passed


def test_loop_corrections_enter_at_first_order():
    """The cubic vertex eats one propagator loop and shifts the
    differential at order one."""
    alg = _loop(S4, SYM4, CUBIC_OPS)
    td = decomposition_model(alg, _ph4(), 3, 2)
    f = td.transferred.operations
    assert f.components[(1, 1)] == {("u",): S4.element({"w": Fraction(-1, 2)})}
    assert f.components[(3, 1)] == {("u", "u", "u"): S4.element({"w": 3})}
    assert f.value(3, 0, ("u", "p", "p")) == S4.element({"w": 1})
    assert verify_decomposition(td, 3, 2).passed


def test_transferred_components_match_brute_enumeration():
    alg = _loop(S4, SYM4, CUBIC_OPS)
    td = decomposition_model(alg, _ph4(), 3, 2)
    ops = _oracle_ops(CUBIC_OPS)
    memo = {}
    for arity in range(1, 4):
        for order in range(3):
            for word in basis_words(S4, arity, SYMMETRIC):
                mine = td.transferred.operations.value(arity, order, word)
                mine = {} if mine is None else dict(mine.coeffs)
                assert mine == transferred_component(
                    NAMES4, DEG4, ops, ORACLE_H4, ORACLE_D4, GINV4_TENSOR,
                    order, word, memo)


def test_spurious_component_fails_certification():
    alg = _loop(S4, SYM4, CUBIC_OPS)
    td = decomposition_model(alg, _ph4(), 3, 2)
    comps = {k: dict(t) for k, t in td.transferred.operations.components.items()}
    comps[(2, 0)][("u", "u")] = S4.element({"q": 1})
    corrupted = LoopHomotopyAlgebra(
        S4, MultilinearFamily(S4, SYMMETRIC, 1, comps),
        second_order=td.omega_bar_inverse)
    report = certify_loop(corrupted, 3, 2)
    assert not report.passed
    assert report.first_failure == (1, 1)
    assert report.failing_buckets() == [(1, 1), (2, 1), (3, 1)]


def test_decomposition_rejects_planar_input():
    alg = AInfinityAlgebra.from_components(
        S2, {1: {("x",): S2.element({"y": 1})}})
    certify_a_infinity(alg, 3)
    ph = build_pre_hodge(S2, SYM2, {"x": {"y": 1}}, {"y": {"x": -1}})
    with pytest.raises(InvalidInput):
        decomposition_model(alg, ph, 3, 1)


# ---------------------------------------------------------------------------
# classical slice


def test_classical_model_requires_certification():
    alg = LoopHomotopyAlgebra.from_components(
        S4, {(1, 0): {("p",): S4.element({"q": 1})}}, symplectic=SYM4)
    with pytest.raises(UncertifiedBase):
        classical_minimal_model(alg, _ph4(), 3)


def test_classical_model_rejects_loop_orders():
    alg = _loop(S4, SYM4, {
        (1, 0): {("p",): {"q": 1}},
        (2, 0): {("u", "u"): {"q": 1}, ("u", "p"): {"w": 1}},
        (1, 1): {("u",): {"w": 1}},
    }, max_arity=4)
    with pytest.raises(InvalidInput):
        classical_minimal_model(alg, _ph4(), 3)
    with pytest.raises(InvalidInput):
        classical_minimal_model(_loop(S4, SYM4, BASE_OPS), _ph4(), 0)


def test_classical_slice_agrees_with_the_decomposition():
    for components in (BASE_OPS, CUBIC_OPS):
        alg = _loop(S4, SYM4, components)
        ph = _ph4()
        td = decomposition_model(alg, ph, 3, 1)
        classical = classical_minimal_model(alg, ph, 3)
        slice0 = {key: table
                  for key, table in td.transferred.operations.components.items()
                  if key[1] == 0}
        assert slice0 == classical.operations.components
        assert certify_l_infinity(classical, 4).passed


def test_classical_contractible_input_collapses():
    alg = _loop(S2, SYM2, {(1, 0): {("x",): {"y": 1}}})
    ph = build_pre_hodge(S2, SYM2, {"x": {"y": 1}}, {"y": {"x": -1}})
    classical = classical_minimal_model(alg, ph, 4)
    assert classical.operations.components == {
        (1, 0): {("x",): S2.element({"y": 1})}}


def test_planar_triple_product_survives_on_cohomology():
    """Six-dimensional planar complex where the product of two classes is
    exact; the transferred arity-3 map remembers the bounding chain."""
    space = GradedSpace(
        [("u", 0), ("v", 0), ("p", 0), ("q", 1), ("r", 1), ("s", 1)])
    sym = build_symplectic(
        space, {("u", "s"): 1, ("v", "r"): 1, ("p", "q"): 1})
    alg = AInfinityAlgebra.from_components(space, {
        1: {("p",): space.element({"q": 1})},
        2: {("u", "v"): space.element({"q": 1}),
            ("p", "u"): space.element({"r": 1})},
    })
    assert certify_a_infinity(alg, 4).passed
    ph = build_pre_hodge(space, sym, {"p": {"q": 1}}, {"q": {"p": -1}})
    minimal = classical_minimal_model(alg, ph, 3)
    # single chain: h(m2(u, v)) = -p feeds m2(-p, u) = -r, and P r = r
    assert minimal.operations.value(3, 0, ("u", "v", "u")) == \
        space.element({"r": -1})
    assert minimal.operations.value(2, 0, ("u", "v")) is None
    assert certify_a_infinity(minimal, 4).passed


def test_planar_product_descends_to_cohomology():
    space = GradedSpace([("e", -1), ("f", 2), ("x", 0), ("y", 1)])
    sym = build_symplectic(space, {("e", "f"): 1, ("x", "y"): 1})
    alg = AInfinityAlgebra.from_components(space, {
        1: {("x",): space.element({"y": 1})},
        2: {("e", "e"): space.element({"e": 1}),
            ("e", "x"): space.element({"x": 1}),
            ("x", "e"): space.element({"x": -1}),
            ("e", "y"): space.element({"y": 1}),
            ("y", "e"): space.element({"y": 1})},
    })
    assert certify_a_infinity(alg, 4).passed
    ph = build_pre_hodge(space, sym, {"x": {"y": 1}}, {"y": {"x": -1}})
    minimal = classical_minimal_model(alg, ph, 3)
    assert minimal.operations.components == {
        (1, 0): {("x",): space.element({"y": 1})},
        (2, 0): {("e", "e"): space.element({"e": 1})},
    }
    assert certify_a_infinity(minimal, 4).passed
