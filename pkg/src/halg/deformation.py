"""Maurer-Cartan machinery: residuals, order-by-order solving, the linear
gauge flow, and cohomology of the two deformation complexes.

Deformations are tracked by a formal nilpotent order e >= 1 together with the
loop order.  Residuals are computed by conjugation: the structure operator is
applied to the exponential of the deformation and the result is multiplied
back by the inverse exponential, so every convention (signs, weights, the
loop term) is inherited from the certified operator instead of being derived
a second time here.
"""

import itertools

from .coalgebra import Coderivation, MultilinearFamily, graded_commutator
from .cochains import CyclicCochain, cochain_differential, cyclic_basis
from .errors import (
    InvalidInput,
    MorphismNotCertified,
    ParityError,
    SeedNotCocycle,
    UncertifiedBase,
)
from .graded import Element
from .structures import LoopHomotopyAlgebra
from .words import SYMMETRIC, TENSOR, WordSum, basis_words

HOCHSCHILD = "hochschild"
CHEVALLEY_EILENBERG = "chevalley-eilenberg"


def _as_element(space, value):
    if isinstance(value, Element):
        if value.space is not space:
            raise InvalidInput("element lives over a different space")
        return value
    return space.element(value)


class FormalElement:
    """A finite family of corrections indexed by (deformation, loop) order.

    ``coefficients`` holds the field content: Elements at orders e >= 1.
    ``tails`` holds multi-leg corrections as word sums of length >= 2 —
    these appear when solving past the first loop order, where the
    second-order part of the operator asks for two-leg counterterms.
    """

    def __init__(self, space, coefficients=None, tails=None):
        self.space = space
        self.coefficients = {}
        self.tails = {}
        for key, value in (coefficients or {}).items():
            e, g = self._check_key(key)
            if e < 1:
                raise InvalidInput(
                    f"deformations start at order 1, got coefficient at {key}")
            elem = _as_element(space, value)
            if not elem.is_zero():
                self.coefficients[(e, g)] = elem
        for key, ws in (tails or {}).items():
            e, g = self._check_key(key)
            if e + g < 1:
                raise InvalidInput(f"tail at {key} has no formal order")
            if not isinstance(ws, WordSum) or ws.space is not space:
                raise InvalidInput(f"tail at {key} must be a WordSum over the space")
            if any(len(w) < 2 for w in ws.terms):
                raise InvalidInput(f"tail at {key} contains single-leg words")
            if not ws.is_zero():
                self.tails[(e, g)] = ws.copy()

    @staticmethod
    def _check_key(key):
        try:
            e, g = key
        except (TypeError, ValueError):
            raise InvalidInput(f"orders must be (deformation, loop) pairs, got {key!r}")
        if not isinstance(e, int) or not isinstance(g, int) or g < 0 or e < 0:
            raise InvalidInput(f"orders must be non-negative integers, got {key!r}")
        return e, g

    def coefficient(self, e, g=0):
        return self.coefficients.get((e, g), self.space.zero())

    def tail(self, e, g):
        return self.tails.get((e, g))

    def orders(self):
        return sorted(set(self.coefficients) | set(self.tails))

    def is_zero(self):
        return not self.coefficients and not self.tails

    def copy(self):
        out = FormalElement(self.space)
        out.coefficients = dict(self.coefficients)
        out.tails = {k: ws.copy() for k, ws in self.tails.items()}
        return out

    def as_wordsums(self, flavor):
        """The full content as {(e, g): WordSum}; tails require SYMMETRIC."""
        out = {}
        for (e, g), elem in self.coefficients.items():
            ws = WordSum(self.space, flavor)
            for name, c in elem.coeffs.items():
                ws.add_word((name,), c)
            if not ws.is_zero():
                out[(e, g)] = ws
        for (e, g), tail in self.tails.items():
            if flavor != SYMMETRIC:
                raise InvalidInput("multi-leg corrections exist on the symmetric side only")
            target = out.get((e, g))
            if target is None:
                out[(e, g)] = tail.copy()
            else:
                target.add(tail)
        return out

    def __eq__(self, other):
        if not isinstance(other, FormalElement):
            return NotImplemented
        return (self.space is other.space
                and self.coefficients == other.coefficients
                and self.tails == other.tails)

    def __repr__(self):
        bits = [f"{key}: {elem!r}" for key, elem in sorted(self.coefficients.items())]
        bits += [f"{key}: {ws!r}" for key, ws in sorted(self.tails.items())]
        inner = ", ".join(bits) if bits else "0"
        return f"FormalElement({inner})"


# ---------------------------------------------------------------------------
# bucketed word-sum arithmetic

def _ws_product(a, b):
    out = WordSum(a.space, a.flavor)
    for wa, ca in a.terms.items():
        for wb, cb in b.terms.items():
            out.add_word(wa + wb, ca * cb)
    return out


def _convolve(A, B, max_order, max_hbar):
    """Bucket-wise product of {(e, g): WordSum} maps, truncated."""
    out = {}
    for (ea, ga), wa in A.items():
        for (eb, gb), wb in B.items():
            e, g = ea + eb, ga + gb
            if e > max_order or g > max_hbar:
                continue
            prod = _ws_product(wa, wb)
            if prod.is_zero():
                continue
            target = out.get((e, g))
            if target is None:
                out[(e, g)] = prod
            else:
                target.add(prod)
    return {k: ws for k, ws in out.items() if not ws.is_zero()}


def _unit_state(space, flavor):
    return {(0, 0): WordSum(space, flavor, {(): 1})}


def _exponential(space, flavor, parts, max_order, max_hbar, inverse=False):
    """Group-like element of a bucketed word sum, or its convolution inverse.

    Symmetric flavor: the sum of divided powers, whose inverse is the same
    series at the negated argument.  Tensor flavor: the geometric series
    (1 - psi)^(-1), whose inverse is the finite 1 - psi.
    """
    field = space.field
    for (e, g) in parts:
        if e + g < 1:
            raise InvalidInput("formal exponent needs strictly positive order")
    out = {k: ws.copy() for k, ws in _unit_state(space, flavor).items()}
    if inverse and flavor == TENSOR:
        for key, ws in parts.items():
            if key[0] <= max_order and key[1] <= max_hbar:
                out[key] = ws.scaled(-field.one())
        return {key: ws for key, ws in out.items() if not ws.is_zero()}
    if inverse:
        parts = {k: ws.scaled(-field.one()) for k, ws in parts.items()}
    power = _unit_state(space, flavor)
    k = 0
    while True:
        k += 1
        if k > max_order + max_hbar:
            break
        power = _convolve(power, parts, max_order, max_hbar)
        if not power:
            break
        weight = field.one()
        if flavor == SYMMETRIC:
            weight = weight / field.coerce(_factorial(k))
        for key, ws in power.items():
            scaled = ws.scaled(weight)
            target = out.get(key)
            if target is None:
                out[key] = scaled
            else:
                target.add(scaled)
    return {key: ws for key, ws in out.items() if not ws.is_zero()}


def _factorial(k):
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def _apply_operator(op, state, max_order, max_hbar):
    """Apply a lifted operator to a bucketed state, accumulating loop order."""
    out = {}
    for (e, g), ws in state.items():
        image = op.apply_state({g: ws}, max_hbar=max_hbar)
        for h, image_ws in image.items():
            if e > max_order or h > max_hbar:
                continue
            target = out.get((e, h))
            if target is None:
                out[(e, h)] = image_ws.copy()
            else:
                target.add(image_ws)
    return {k: ws for k, ws in out.items() if not ws.is_zero()}


def _check_mc_parity(phi):
    for key, elem in phi.coefficients.items():
        for name in elem.coeffs:
            if phi.space.parity(name):
                raise ParityError(
                    f"coefficient at {key} has an odd component {name!r}; "
                    "deformation directions must be even")
    for key, ws in phi.tails.items():
        for word in ws.terms:
            if sum(phi.space.parity(n) for n in word) % 2:
                raise ParityError(f"tail at {key} contains an odd word")


def mc_residual(structure, phi, max_order, max_hbar=0):
    """Per-bucket failure of the generalized Maurer-Cartan equation.

    Expands the structure operator against the exponential of ``phi`` and
    conjugates the tail away, leaving for each (deformation, loop) order the
    word sum that must vanish for the equation to hold.  For classical
    structures every residual is a single-leg word sum (an element); the
    loop term of a full structure additionally contributes its bivector at
    loop order one.
    """
    space, flavor = structure.space, structure.flavor
    if phi.space is not space:
        raise InvalidInput("deformation lives over a different space")
    _check_mc_parity(phi)
    parts = phi.as_wordsums(flavor)
    op = structure.operator()
    exp = _exponential(space, flavor, parts, max_order, max_hbar)
    inv = _exponential(space, flavor, parts, max_order, max_hbar, inverse=True)
    image = _apply_operator(op, exp, max_order, max_hbar)
    if flavor == TENSOR:
        residual = _convolve(_convolve(inv, image, max_order, max_hbar),
                             inv, max_order, max_hbar)
    else:
        residual = _convolve(image, inv, max_order, max_hbar)
    return residual


# ---------------------------------------------------------------------------
# exact linear solving with an auditable failure certificate

def _row_echelon(rows):
    """In-place forward elimination; returns pivot column indices."""
    pivots = []
    r = 0
    cols = len(rows[0]) if rows else 0
    for c in range(cols):
        pivot = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                factor = rows[i][c]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def _solve_linear(columns, target_rows, row_order):
    """Solve sum_j x_j * column_j = target over the listed rows.

    ``columns`` is [(label, {row: coeff})]; returns ({label: coeff}, None) on
    success and (None, certificate) when inconsistent.  The certificate is a
    functional on rows annihilating every column but not the target — the
    row-reduction witness of non-exactness.
    """
    n_rows = len(row_order)
    n_cols = len(columns)
    index = {row: i for i, row in enumerate(row_order)}
    # rows of the working matrix: [columns | target | identity tracking]
    rows = []
    for row in row_order:
        i = index[row]
        line = [col.get(row, 0) for _, col in columns]
        line.append(target_rows.get(row, 0))
        line.extend(1 if j == i else 0 for j in range(n_rows))
        rows.append([_fr(x) for x in line])
    pivots = _row_echelon(rows)
    for r, c in enumerate(pivots):
        if c == n_cols:
            # pivot in the target column: the tracked combination is the witness
            witness = rows[r]
            functional = {}
            for j, row in enumerate(row_order):
                coeff = witness[n_cols + 1 + j]
                if coeff:
                    functional[row] = coeff
            return None, {"functional": functional, "value": witness[n_cols]}
    solution = {}
    for r, c in enumerate(pivots):
        if c < n_cols:
            value = rows[r][n_cols]
            if value:
                solution[columns[c][0]] = value
    return solution, None


def _fr(x):
    return x if x else 0


class MCSolution:
    """Outcome of order-by-order solving: the element found so far, and on
    failure the bucket, the obstructing residual, and its witness."""

    def __init__(self, solved, element, residuals, bucket=None,
                 obstruction=None, certificate=None):
        self.solved = solved
        self.element = element
        self.residuals = residuals
        self.bucket = bucket
        self.obstruction = obstruction
        self.certificate = certificate

    @property
    def status(self):
        return "SOLVED" if self.solved else "OBSTRUCTED"

    def __repr__(self):
        if self.solved:
            return f"MCSolution(SOLVED, {self.element!r})"
        return f"MCSolution(OBSTRUCTED at {self.bucket}, {self.obstruction!r})"


def _differential_operator(structure):
    table = structure.differential()
    fam = MultilinearFamily(structure.space, structure.flavor, 1,
                            {(1, 0): {(n,): v for n, v in table.items()}})
    return Coderivation.lift_family(fam)


def _correction_words(space, e, g):
    """Canonical even words a correction at bucket (e, g) may use.

    Field directions (single legs) exist at deformation order >= 1; loop
    counterterms grow two legs per loop order.
    """
    words = []
    if e >= 1:
        for name in space.names:
            if not space.parity(name):
                words.append((name,))
    if g >= 1:
        for length in range(2, 2 * g + 1):
            for word in basis_words(space, length, SYMMETRIC):
                if sum(space.parity(n) for n in word) % 2 == 0:
                    words.append(word)
    return words


def mc_solve(structure, seed, max_order, max_hbar=0):
    """Extend a first-order deformation bucket by bucket.

    At each bucket the equation for the next correction is linear with the
    differential on the left and the already-known residual on the right;
    it is solvable precisely when that residual is exact.  The first
    non-exact bucket stops the run and is reported with its witness.
    """
    space, flavor = structure.space, structure.flavor
    seed = _as_element(space, seed)
    for name in seed.coeffs:
        if space.parity(name):
            raise ParityError(f"seed has an odd component {name!r}")
    d_op = _differential_operator(structure)
    d_seed = WordSum(space, flavor)
    for name, c in seed.coeffs.items():
        for h, ws in d_op.apply_word((name,)).items():
            d_seed.add(ws.scaled(c))
    if not d_seed.is_zero():
        raise SeedNotCocycle("seed is not closed", residual=dict(d_seed.terms))

    phi = FormalElement(space, {(1, 0): seed} if not seed.is_zero() else {})
    residuals = mc_residual(structure, phi, max_order, max_hbar)
    for e in range(0, max_order + 1):
        for g in range(0, max_hbar + 1):
            target = residuals.get((e, g))
            if target is None or target.is_zero():
                continue
            columns = []
            for word in _correction_words(space, e, g):
                image = WordSum(space, flavor)
                for h, ws in d_op.apply_word(word).items():
                    image.add(ws)
                if not image.is_zero():
                    columns.append((word, dict(image.terms)))
            goal = {w: -c for w, c in target.terms.items()}
            row_set = set(goal)
            for _, col in columns:
                row_set.update(col)
            row_order = sorted(row_set, key=target.sort_key)
            solution, certificate = _solve_linear(columns, goal, row_order)
            if solution is None:
                return MCSolution(False, phi, residuals, bucket=(e, g),
                                  obstruction=target.copy(),
                                  certificate=certificate)
            single = {}
            tail = WordSum(space, flavor)
            for word, coeff in solution.items():
                if len(word) == 1:
                    single[word[0]] = coeff
                else:
                    tail.add_word(word, coeff)
            if single:
                current = phi.coefficients.get((e, g), space.zero())
                phi.coefficients[(e, g)] = current + space.element(single)
            if not tail.is_zero():
                stored = phi.tails.get((e, g))
                if stored is None:
                    phi.tails[(e, g)] = tail
                else:
                    stored.add(tail)
            residuals = mc_residual(structure, phi, max_order, max_hbar)
    return MCSolution(True, phi, residuals)


def gauge_action_linear(structure, lam, phi):
    """Transport of a deformation along a gauge direction, to first order.

    The gauge parameter enters at deformation order one; the flow is the
    operator applied to the parameter wedged into the exponential of the
    deformation, conjugated back.  At zero deformation this reduces to the
    differential of the parameter.
    """
    space, flavor = structure.space, structure.flavor
    lam = _as_element(space, lam)
    for name in lam.coeffs:
        if not space.parity(name):
            raise ParityError(f"gauge parameter has an even component {name!r}")
    if phi.space is not space:
        raise InvalidInput("deformation lives over a different space")
    _check_mc_parity(phi)
    max_order = max([e for e, _ in phi.orders()] or [0]) + 1
    max_hbar = max([g for _, g in phi.orders()] or [0]) + (
        1 if isinstance(structure, LoopHomotopyAlgebra) else 0)
    lam_ws = WordSum(space, flavor)
    for name, c in lam.coeffs.items():
        lam_ws.add_word((name,), c)
    lam_state = {(1, 0): lam_ws}
    parts = phi.as_wordsums(flavor)
    op = structure.operator()
    exp = _exponential(space, flavor, parts, max_order, max_hbar)
    inv = _exponential(space, flavor, parts, max_order, max_hbar, inverse=True)
    if flavor == TENSOR:
        state = _convolve(_convolve(exp, lam_state, max_order, max_hbar),
                          exp, max_order, max_hbar)
        image = _apply_operator(op, state, max_order, max_hbar)
        delta = _convolve(_convolve(inv, image, max_order, max_hbar),
                          inv, max_order, max_hbar)
    else:
        state = _convolve(lam_state, exp, max_order, max_hbar)
        image = _apply_operator(op, state, max_order, max_hbar)
        delta = _convolve(image, inv, max_order, max_hbar)
    out = phi.copy()
    for (e, g), ws in delta.items():
        single = {}
        tail = WordSum(space, flavor)
        for word, coeff in ws.terms.items():
            if len(word) == 1:
                name = word[0]
                single[name] = single.get(name, 0) + coeff
            else:
                tail.add_word(word, coeff)
        if single:
            current = out.coefficients.get((e, g), space.zero())
            updated = current + space.element(single)
            if updated.is_zero():
                out.coefficients.pop((e, g), None)
            else:
                out.coefficients[(e, g)] = updated
        if not tail.is_zero():
            stored = out.tails.get((e, g))
            if stored is None:
                out.tails[(e, g)] = tail
            else:
                stored.add(tail)
    return out


# ---------------------------------------------------------------------------
# deformation complexes

class CohomologyReport:
    """Per-degree ranks of a truncated deformation complex.

    ``basis`` and ``matrices`` expose the raw complex: for each degree the
    ordered basis labels and the matrix of the differential into the next
    degree (rows indexed by that degree's basis).  Dimensions are exact
    row-reduction ranks.
    """

    def __init__(self, kind, max_arity, basis, labels, matrices,
                 kernel_dims, image_dims, cohomology_dims, representatives):
        self.kind = kind
        self.max_arity = max_arity
        self.basis = basis
        self.labels = labels
        self.matrices = matrices
        self.kernel_dims = kernel_dims
        self.image_dims = image_dims
        self.cohomology_dims = cohomology_dims
        self.representatives = representatives

    def degrees(self):
        return sorted(self.labels)

    def total_cohomology(self):
        return sum(self.cohomology_dims.values())

    def lines(self):
        out = []
        for degree in self.degrees():
            out.append(
                f"degree {degree} dim={len(self.labels[degree])} "
                f"ker={self.kernel_dims[degree]} im={self.image_dims[degree]} "
                f"coh={self.cohomology_dims[degree]}")
        return out


def _matrix_rank(rows):
    if not rows or not rows[0]:
        return 0
    work = [list(r) for r in rows]
    return len(_row_echelon(work))


def _complex_report(kind, max_arity, labels, objects, columns):
    """Assemble ranks and representatives from per-degree column maps.

    ``labels``: {degree: [label]}; ``objects``: {label: basis object};
    ``columns``: {label: {target_label: coeff}} — the differential of each
    basis vector expanded over the basis of the next degree.
    """
    degrees = sorted(labels)
    matrices = {}
    for degree in degrees:
        source = labels[degree]
        targets = labels.get(degree + 1, [])
        index = {lab: i for i, lab in enumerate(targets)}
        rows = [[0] * len(source) for _ in targets]
        for j, lab in enumerate(source):
            for target_lab, coeff in columns[lab].items():
                rows[index[target_lab]][j] = coeff
        matrices[degree] = rows
    kernel_dims, image_dims, cohomology_dims, representatives = {}, {}, {}, {}
    for degree in degrees:
        out_rank = _matrix_rank(matrices[degree])
        kernel_dims[degree] = len(labels[degree]) - out_rank
        below = matrices.get(degree - 1)
        image_dims[degree] = _matrix_rank(below) if below is not None else 0
        cohomology_dims[degree] = kernel_dims[degree] - image_dims[degree]
        representatives[degree] = _representatives(
            labels[degree], matrices[degree], matrices.get(degree - 1),
            labels.get(degree - 1, []), objects)
    return CohomologyReport(kind, max_arity, objects, labels, matrices,
                            kernel_dims, image_dims, cohomology_dims,
                            representatives)


def _kernel_vectors(matrix, n_cols):
    if not matrix:
        return [[1 if j == i else 0 for j in range(n_cols)] for i in range(n_cols)]
    work = [list(r) for r in matrix]
    pivots = _row_echelon(work)
    pivot_set = set(pivots)
    out = []
    for free in range(n_cols):
        if free in pivot_set:
            continue
        vec = [0] * n_cols
        vec[free] = 1
        for r, c in enumerate(pivots):
            vec[c] = -work[r][free]
        out.append(vec)
    return out


def _representatives(source_labels, matrix, below, below_labels, objects):
    """Kernel vectors extending the image to a basis, realized as objects."""
    n = len(source_labels)
    if n == 0:
        return []
    kernel = _kernel_vectors(matrix, n)
    image = []
    if below and below_labels:
        for j in range(len(below_labels)):
            image.append([row[j] for row in below])
    reps = []
    stack = [list(v) for v in image]
    rank = _matrix_rank(stack) if stack else 0
    for vec in kernel:
        trial = stack + [list(vec)]
        new_rank = _matrix_rank(trial)
        if new_rank > rank:
            stack, rank = trial, new_rank
            pairs = [(coeff, objects[label])
                     for coeff, label in zip(vec, source_labels) if coeff]
            reps.append(_combine_objects(pairs))
    return reps


def _combine_objects(pairs):
    first = pairs[0][1]
    if isinstance(first, CyclicCochain):
        combo = None
        for coeff, obj in pairs:
            piece = obj.scaled(coeff)
            combo = piece if combo is None else combo.add(piece)
        return combo
    # symmetric cogenerators: merge the sparse component tables directly
    space, degree = first.space, first.degree
    merged = {}
    for coeff, fam in pairs:
        for key, table in fam.components.items():
            slot = merged.setdefault(key, {})
            for word, elem in table.items():
                addition = elem.scale(coeff)
                slot[word] = slot[word] + addition if word in slot else addition
    return MultilinearFamily(space, SYMMETRIC, degree, merged)


def _certified(obj):
    if getattr(obj, "certification", None):
        return True
    base = getattr(obj, "base", None) or getattr(obj, "open_algebra", None)
    return bool(getattr(base, "certification", None))


def _cyclic_complex(structure, max_arity):
    space = (getattr(structure, "base", None)
             or getattr(structure, "open_algebra", None)).space
    basis = cyclic_basis(space, max_arity)
    labels, objects, columns, degree_of = {}, {}, {}, {}
    for rep, cochain in basis:
        # grade functionals by minus their input degree, so the commutator
        # with the degree-1 structure maps raises the grading by one
        degree = -cochain.input_degree()
        degree_of[rep] = degree
        labels.setdefault(degree, []).append(rep)
        objects[rep] = cochain
    rep_index = {rep: cochain for rep, cochain in basis}
    for rep, cochain in basis:
        image = cochain_differential(structure, cochain).restrict(max_arity)
        expansion = {}
        for target_rep in rep_index:
            coeff = image.value(target_rep)
            if coeff:
                if degree_of[target_rep] != degree_of[rep] + 1:
                    raise InvalidInput(
                        "cochain differential did not raise the grading by one")
                expansion[target_rep] = coeff
        columns[rep] = expansion
    return labels, objects, columns


def _symmetric_complex(structure, max_arity):
    space = structure.space
    if isinstance(structure, LoopHomotopyAlgebra):
        family = structure.classical_family()
    else:
        family = structure.operations
    base_op = Coderivation.lift_family(family)
    labels, objects, columns = {}, {}, {}
    degree_of = {}
    for arity in range(1, max_arity + 1):
        for word in basis_words(space, arity, SYMMETRIC):
            in_degree = sum(space.degree(n) for n in word)
            for name in space.names:
                label = (word, name)
                degree = space.degree(name) - in_degree
                degree_of[label] = degree
                labels.setdefault(degree, []).append(label)
                fam = MultilinearFamily(
                    space, SYMMETRIC, degree,
                    {(arity, 0): {word: space.element({name: 1})}})
                objects[label] = fam
    for label in degree_of:
        word, name = label
        x_op = Coderivation.lift_family(objects[label])
        bracket = graded_commutator(base_op, x_op, max_arity, max_hbar=0)
        expansion = {}
        for piece in bracket.pieces:
            if piece.max_output_length() > 1:
                raise InvalidInput("commutator with a first-order lift "
                                   "produced a second-order part")
            for in_word, ws in piece.table.items():
                for out_word, coeff in ws.terms.items():
                    target = (in_word, out_word[0])
                    if target in degree_of:
                        expansion[target] = expansion.get(target, 0) + coeff
        columns[label] = {k: v for k, v in expansion.items() if v}
    return labels, objects, columns


def deformation_cohomology(structure, complex_kind, max_arity):
    """Cohomology of a truncated deformation complex, by row reduction.

    ``HOCHSCHILD`` takes the commutator complex of cyclic cochains over a
    planar structure carrying a pairing; ``CHEVALLEY_EILENBERG`` takes the
    commutator complex of symmetric coderivation cogenerators.  Both are
    arity-filtered, so truncation at ``max_arity`` is itself a complex.
    """
    if max_arity < 1:
        raise InvalidInput("the complex needs at least arity 1")
    if not _certified(structure):
        raise UncertifiedBase("certify the base structure before "
                              "taking its deformation complex")
    if complex_kind == HOCHSCHILD:
        if not (hasattr(structure, "base") or hasattr(structure, "open_algebra")):
            raise InvalidInput("the cyclic complex needs a structure "
                               "carrying a pairing")
        labels, objects, columns = _cyclic_complex(structure, max_arity)
    elif complex_kind == CHEVALLEY_EILENBERG:
        if getattr(structure, "flavor", None) != SYMMETRIC:
            raise InvalidInput("the symmetric complex needs a symmetric structure")
        labels, objects, columns = _symmetric_complex(structure, max_arity)
    else:
        raise InvalidInput(f"unknown complex kind {complex_kind!r}")
    return _complex_report(complex_kind, max_arity, labels, objects, columns)


# ---------------------------------------------------------------------------
# transport along open-closed morphisms

def pushforward_mc(morphism, phi, max_order, max_hbar=0):
    """Transport a deformation through a certified morphism.

    Evaluates the morphism family against the exponential of the
    deformation, bucket by bucket, producing the induced deformation on the
    target.  Verifying that the result solves the target equation is the
    caller's half of the contract.
    """
    if not getattr(morphism, "certification", None):
        raise MorphismNotCertified("transport requires a certified morphism")
    source = morphism.source_space
    target = morphism.target_space
    if phi.space is not source:
        raise InvalidInput("deformation lives over a different space")
    _check_mc_parity(phi)
    parts = phi.as_wordsums(SYMMETRIC)
    exp = _exponential(source, SYMMETRIC, parts, max_order, max_hbar)
    out = {}
    for (e, g), ws in exp.items():
        if e < 1 and g < 1:
            continue
        for word, coeff in ws.terms.items():
            if not word:
                continue
            for genus in range(0, max_hbar - g + 1):
                value = morphism.value(len(word), genus, word)
                if value is None or value.is_zero():
                    continue
                key = (e, g + genus)
                current = out.get(key, target.zero())
                out[key] = current + value.scale(coeff)
    coefficients = {k: v for k, v in out.items() if not v.is_zero() and k[0] >= 1}
    return FormalElement(target, coefficients)
