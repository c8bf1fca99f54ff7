"""Shared constructors for the small algebras, bimodules and maps used
across the suite.  Everything here is deterministic."""

from fractions import Fraction

from tensorgp.exactlin import GF, QQ, FieldSpec, Matrix
from tensorgp.algebra import Algebra, LeftModule, ModuleMap, free_module
from tensorgp.bimodule import Bimodule, zero_bimodule

F2 = GF(2)
F3 = GF(3)


def ground_algebra(field: FieldSpec) -> Algebra:
    """The field itself as a one-dimensional algebra."""
    return Algebra(field, 1, (((1,),),), (1,))


def dual_numbers(field: FieldSpec) -> Algebra:
    """k[x]/(x^2) with basis (1, x)."""
    consts = [
        [[1, 0], [0, 1]],  # 1*1 = 1, 1*x = x
        [[0, 1], [0, 0]],  # x*1 = x, x*x = 0
    ]
    return Algebra(field, 2, consts, (1, 0))


def cubic_nilpotent(field: FieldSpec) -> Algebra:
    """k[x]/(x^3) with basis (1, x, x^2)."""
    consts = [
        [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[0, 1, 0], [0, 0, 1], [0, 0, 0]],
        [[0, 0, 1], [0, 0, 0], [0, 0, 0]],
    ]
    return Algebra(field, 3, consts, (1, 0, 0))


def product_fields(field: FieldSpec, s: int) -> Algebra:
    """k x k x ... x k with orthogonal idempotent basis."""
    consts = [[[1 if i == j == k else 0 for k in range(s)] for j in range(s)]
              for i in range(s)]
    return Algebra(field, s, consts, tuple(1 for _ in range(s)))


def simple_over_product(a: Algebra, which: int) -> LeftModule:
    """The one-dimensional simple over k^s on which e_which acts as 1."""
    action = [Matrix.from_rows(a.field, [[1 if i == which else 0]]) for i in range(a.dim)]
    return LeftModule(a, 1, tuple(action))


def x_multiplication(field: FieldSpec) -> ModuleMap:
    """Multiplication by x on the free rank-1 module over k[x]/(x^2)."""
    r = dual_numbers(field)
    fr = free_module(r, 1)
    return ModuleMap(fr, fr, Matrix.from_rows(field, [[0, 0], [1, 0]]))


def corner_bimodule(field: FieldSpec) -> Bimodule:
    """The one-dimensional (e1, e2)-corner bimodule over k x k.

    e1 acts as 1 on the left, e2 as 1 on the right; the tensor ring it
    generates is the algebra of upper triangular 2x2 matrices.
    """
    r = product_fields(field, 2)
    one = Matrix.from_rows(field, [[1]])
    zero = Matrix.zeros(field, 1, 1)
    return Bimodule(r, 1, (one, zero), (zero, one))


def path_bimodule(field: FieldSpec, vertices: int) -> Bimodule:
    """Arrow bimodule of the linear quiver 1 -> 2 -> ... -> s over k^s.

    Arrows act on the left through their target idempotent and on the
    right through their source, so the bimodule is (s-1)-nilpotent with
    all intermediate powers nonzero.
    """
    r = product_fields(field, vertices)
    n = vertices - 1  # arrow a_t goes t -> t+1
    left = []
    right = []
    for v in range(vertices):
        left.append(Matrix.from_rows(field, [[1 if (t == s and t + 1 == v) else 0
                                              for s in range(n)] for t in range(n)])
                    if n else Matrix.zeros(field, 0, 0))
        right.append(Matrix.from_rows(field, [[1 if (t == s and t == v) else 0
                                               for s in range(n)] for t in range(n)])
                     if n else Matrix.zeros(field, 0, 0))
    return Bimodule(r, n, tuple(left), tuple(right))


def augmentation_bimodule(field: FieldSpec) -> Bimodule:
    """One-dimensional bimodule over k[x]/(x^2) with x acting as zero on
    both sides.  Not nilpotent: every tensor power is one-dimensional."""
    r = dual_numbers(field)
    one = Matrix.from_rows(field, [[1]])
    zero = Matrix.zeros(field, 1, 1)
    return Bimodule(r, 1, (one, zero), (one, zero))


def random_scalar(field, rng):
    if field.is_prime:
        return rng.randrange(field.p)
    return Fraction(rng.randint(-2, 2))


def random_hom(x, y, rng):
    """Random element of Hom(x, y) as a ModuleMap (zero if Hom is zero)."""
    from tensorgp.algebra import hom_space, ModuleMap

    basis = hom_space(x, y)
    if not basis:
        return ModuleMap.zero(x, y)
    acc = ModuleMap.zero(x, y)
    for b in basis:
        c = random_scalar(x.algebra.field, rng)
        if c:
            acc = acc + ModuleMap.unchecked(x, y, b.mat.scale(c))
    return ModuleMap(x, y, acc.mat)


def random_module(algebra, rng, max_rank=2):
    """Random module: the cokernel of a random map between free modules."""
    from tensorgp.algebra import free_module, quotient_by_columns

    n1 = rng.randrange(max_rank + 1)
    n2 = rng.randrange(1, max_rank + 1)
    f = random_hom(free_module(algebra, n1), free_module(algebra, n2), rng)
    quot, _proj, _sect = quotient_by_columns(f.target, f.mat.image_basis())
    return quot


def full_tensor_pair(a, b):
    """The pair bimodule a (x)_k b: left regular on the first factor,
    right regular on the second."""
    from tensorgp.exactlin import kron
    from tensorgp.special_rings import PairBimodule

    f = a.field
    ia = Matrix.identity(f, a.dim)
    ib = Matrix.identity(f, b.dim)
    left = tuple(kron(a.left_mult[i], ib) for i in range(a.dim))
    right = tuple(kron(ia, b.right_mult[j]) for j in range(b.dim))
    return PairBimodule(a, b, a.dim * b.dim, left, right)


def corner_pair(a, b, pattern, field):
    """Semisimple corner pair bimodule over products of fields.

    ``pattern`` maps (i, j) to a multiplicity: e_i acts as 1 on the left
    and e_j as 1 on the right of that many basis vectors.
    """
    from tensorgp.special_rings import PairBimodule

    atoms = [(i, j) for (i, j), mult in sorted(pattern.items()) for _ in range(mult)]
    dim = len(atoms)
    left = []
    for i in range(a.dim):
        left.append(Matrix.from_rows(field, [[1 if (s == t and atoms[s][0] == i) else 0
                                              for t in range(dim)] for s in range(dim)])
                    if dim else Matrix.zeros(field, 0, 0))
    right = []
    for j in range(b.dim):
        right.append(Matrix.from_rows(field, [[1 if (s == t and atoms[s][1] == j) else 0
                                               for t in range(dim)] for s in range(dim)])
                     if dim else Matrix.zeros(field, 0, 0))
    return PairBimodule(a, b, dim, tuple(left), tuple(right))


def random_morita_data(rng, field):
    """Random context data with vanishing pairings: one-sided instances
    over small algebras plus two-sided semisimple corner instances."""
    from tensorgp.special_rings import MoritaData, PairBimodule

    kind = rng.randrange(3)
    if kind == 0:
        # u = 0, v arbitrary over a small pair of algebras
        a = rng.choice([ground_algebra(field), dual_numbers(field), product_fields(field, 2)])
        b = rng.choice([ground_algebra(field), product_fields(field, 2)])
        v = rng.choice([PairBimodule.zero(a, b), full_tensor_pair(a, b)])
        return MoritaData(a, b, v, PairBimodule.zero(b, a))
    if kind == 1:
        # v = 0, u arbitrary
        a = rng.choice([ground_algebra(field), product_fields(field, 2)])
        b = rng.choice([ground_algebra(field), dual_numbers(field)])
        u = rng.choice([PairBimodule.zero(b, a), full_tensor_pair(b, a)])
        return MoritaData(a, b, PairBimodule.zero(a, b), u)
    # two-sided semisimple corners with disjoint supports on both sides
    a = product_fields(field, 2)
    b = product_fields(field, 2)
    v = corner_pair(a, b, {(0, 0): rng.randrange(2)}, field)
    u = corner_pair(b, a, {(1, 1): rng.randrange(2)}, field)
    return MoritaData(a, b, v, u)


def random_free_map(algebra, rank_src, rank_tgt, rng):
    return random_hom(free_module(algebra, rank_src), free_module(algebra, rank_tgt), rng)


def random_morita_window(d, rng, max_rank=2, period=1):
    """Random periodic quadruple window with equal rank columns."""
    from tensorgp.special_rings import MoritaWindow, block_power_module

    ranks = [rng.randrange(max_rank + 1) for _ in range(period)]
    ranks = ranks + [ranks[0]]
    tau, sigma, beta, gamma = [], [], [], []
    for t in range(period):
        n, n1 = ranks[t], ranks[t + 1]
        tau.append(random_free_map(d.a, n, n1, rng))
        sigma.append(random_free_map(d.b, n, n1, rng))
        beta.append(random_hom(free_module(d.a, n), block_power_module(d.v, n1), rng))
        gamma.append(random_hom(free_module(d.b, n), block_power_module(d.u, n1), rng))
    return MoritaWindow(0, tuple(ranks), tuple(ranks), tuple(tau), tuple(sigma),
                        tuple(beta), tuple(gamma), period=period)


def random_triangular_data(rng, field):
    from tensorgp.special_rings import TriangularData, PairBimodule

    a = rng.choice([ground_algebra(field), dual_numbers(field), product_fields(field, 2)])
    b = rng.choice([ground_algebra(field), product_fields(field, 2)])
    v = rng.choice([PairBimodule.zero(a, b), full_tensor_pair(a, b)])
    return TriangularData(a, b, v)


def random_triangular_window(d, rng, max_rank=2, period=1):
    from tensorgp.special_rings import TriangularWindow, block_power_module

    ranks_p = [rng.randrange(max_rank + 1) for _ in range(period)]
    ranks_p = ranks_p + [ranks_p[0]]
    ranks_q = [rng.randrange(max_rank + 1) for _ in range(period)]
    ranks_q = ranks_q + [ranks_q[0]]
    tau, sigma, beta = [], [], []
    for t in range(period):
        tau.append(random_free_map(d.a, ranks_p[t], ranks_p[t + 1], rng))
        sigma.append(random_free_map(d.b, ranks_q[t], ranks_q[t + 1], rng))
        beta.append(random_hom(free_module(d.a, ranks_p[t]),
                               block_power_module(d.v, ranks_q[t + 1]), rng))
    return TriangularWindow(0, tuple(ranks_p), tuple(ranks_q), tuple(tau), tuple(sigma),
                            tuple(beta), period=period)
