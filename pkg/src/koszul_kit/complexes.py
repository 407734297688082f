"""Finite complexes of U-modules, cdg-modules over (A!, d, c), chain maps,
cones, homotopies, and windowed homology.

Both kinds of complex expose the same skeleton (window, per-degree
dimensions, differentials); the module structure differs.  A U-complex
carries degree-zero generator actions on each component, a cdg-module
carries degree-one actions of the dual generators, an anti-derivation
and the curvature law d^2 = c.(-).
"""

from __future__ import annotations

from dataclasses import dataclass

from .deformations import CdgAlgebra, DeformationData, FilteredAlgebraTruncation
from .errors import CurvedInputError, InconsistentDataError, InputError
from .linalg import RHS, Matrix, solve_sparse, sparse_rank
from .scalars import Field


# -- modules ---------------------------------------------------------------


class UModule:
    """Finite-dimensional left U-module: one action matrix per generator."""

    def __init__(self, data: DeformationData, dim: int, actions, weights=None):
        self.data = data
        self.field = data.field
        self.dim = dim
        self.actions = list(actions)
        if len(self.actions) != data.base.dim:
            raise InputError("one action matrix per generator required")
        for x in self.actions:
            if x.rows != dim or x.cols != dim:
                raise InputError("action matrices must be dim x dim")
        self.weights = list(weights) if weights is not None else None

    def validate(self):
        """First violated relation of P, or None."""
        f = self.field
        d = self.data.base.dim
        rel = self.data.base.relations
        for i in range(rel.rows):
            acc = Matrix.zero(f, self.dim, self.dim)
            for a in range(d):
                for b in range(d):
                    c = rel.data[i][a * d + b]
                    if not f.is_zero(c):
                        acc = acc.add(self.actions[a].mul(self.actions[b]).scale(c))
            for g in range(d):
                c = self.data.alpha.data[g][i]
                if not f.is_zero(c):
                    acc = acc.add(self.actions[g].scale(c))
            b0 = self.data.beta.data[0][i]
            if not f.is_zero(b0):
                acc = acc.add(Matrix.identity(f, self.dim).scale(b0))
            if not acc.is_zero():
                return f"relation {i} of P does not annihilate the module"
        if self.weights is not None:
            wts = self.data.base.weights or [1] * d
            for g in range(d):
                m = self.actions[g]
                for r in range(self.dim):
                    for c in range(self.dim):
                        if not f.is_zero(m.data[r][c]):
                            if self.weights[r] != self.weights[c] + wts[g]:
                                return f"action of generator {g} is not weight-homogeneous"
        return None

    def act_word(self, word) -> Matrix:
        """Action of a monomial word (applied right to left)."""
        m = Matrix.identity(self.field, self.dim)
        for g in reversed(word):
            m = self.actions[g].mul(m)
        return m

    def act_u(self, u: FilteredAlgebraTruncation, coords) -> Matrix:
        """Action of a U-truncation element given by basis coordinates."""
        f = self.field
        acc = Matrix.zero(f, self.dim, self.dim)
        for i, c in enumerate(coords):
            if not f.is_zero(c):
                acc = acc.add(self.act_word(u.basis_words[i]).scale(c))
        return acc

    @staticmethod
    def trivial(data: DeformationData) -> "UModule":
        f = data.field
        if any(not f.is_zero(x) for x in data.beta.data[0]):
            raise InputError("trivial module requires beta = 0")
        z = Matrix.zero(f, 1, 1)
        return UModule(data, 1, [z] * data.base.dim,
                       weights=[0] if data.base.weights is not None else None)

    def direct_sum(self, other: "UModule") -> "UModule":
        f = self.field
        n1, n2 = self.dim, other.dim
        acts = []
        for a, b in zip(self.actions, other.actions):
            m = Matrix.zero(f, n1 + n2, n1 + n2).copy_data()
            for i in range(n1):
                for j in range(n1):
                    m[i][j] = a.data[i][j]
            for i in range(n2):
                for j in range(n2):
                    m[n1 + i][n1 + j] = b.data[i][j]
            acts.append(Matrix(f, m, n1 + n2, n1 + n2))
        w = None
        if self.weights is not None and other.weights is not None:
            w = self.weights + other.weights
        return UModule(self.data, n1 + n2, acts, weights=w)


# -- complexes -------------------------------------------------------------


class BaseComplex:
    """Shared skeleton: window, dimensions, differentials."""

    def __init__(self, field: Field, window, dims: dict, diffs: dict, weights=None):
        self.field = field
        self.window = (int(window[0]), int(window[1]))
        self.dims = {p: int(n) for p, n in dims.items() if n}
        self.diffs = {p: d for p, d in diffs.items() if d.rows and d.cols}
        self.weights = weights  # {p: [weight per basis vector]} or None

    def dim(self, p: int) -> int:
        return self.dims.get(p, 0)

    def diff(self, p: int) -> Matrix:
        d = self.diffs.get(p)
        if d is None:
            return Matrix.zero(self.field, self.dim(p + 1), self.dim(p))
        return d

    def degrees(self):
        lo, hi = self.window
        return range(lo, hi + 1)

    def check_d_squared(self):
        for p in self.degrees():
            if self.dim(p) and self.dim(p + 2):
                if not self.diff(p + 1).mul(self.diff(p)).is_zero():
                    return f"d^2 != 0 at degree {p}"
        return None

    def weight_of(self, p: int, i: int):
        if self.weights is None:
            return None
        return self.weights.get(p, [None] * self.dim(p))[i]

    def is_zero_complex(self) -> bool:
        return not self.dims

    side = "plain"

    def num_generators(self) -> int:
        return 0

    def action(self, p: int, g: int) -> Matrix:
        return Matrix.zero(self.field, 0, 0)

    def shift(self) -> "BaseComplex":
        lo, hi = self.window
        return BaseComplex(self.field, (lo - 1, hi - 1),
                           {p - 1: n for p, n in self.dims.items()},
                           {p - 1: self.diff(p).neg() for p in list(self.diffs)},
                           None if self.weights is None
                           else {p - 1: w for p, w in self.weights.items()})


class UComplex(BaseComplex):
    """Complex of finite-dimensional U-modules with U-linear differentials."""

    side = "U"

    def __init__(self, data: DeformationData, window, modules: dict, diffs: dict):
        self.data = data
        self.modules = {p: m for p, m in modules.items() if m.dim}
        weights = None
        if any(m.weights is not None for m in self.modules.values()):
            weights = {p: m.weights for p, m in self.modules.items()}
        super().__init__(data.field, window,
                         {p: m.dim for p, m in self.modules.items()}, diffs, weights)

    def module(self, p: int):
        return self.modules.get(p)

    def action(self, p: int, g: int) -> Matrix:
        m = self.modules.get(p)
        if m is None:
            return Matrix.zero(self.field, 0, 0)
        return m.actions[g]

    def num_generators(self) -> int:
        return self.data.base.dim

    def validate(self):
        for p, m in self.modules.items():
            msg = m.validate()
            if msg:
                return f"degree {p}: {msg}"
        msg = self.check_d_squared()
        if msg:
            return msg
        for p in self.degrees():
            if self.dim(p) and self.dim(p + 1):
                d = self.diff(p)
                for g in range(self.num_generators()):
                    lhs = d.mul(self.action(p, g))
                    rhs = self.action(p + 1, g).mul(d)
                    if not lhs.eq(rhs):
                        return f"differential not U-linear at degree {p}, generator {g}"
        return None

    def shift(self) -> "UComplex":
        """[1]: degree p component becomes old p+1; differential negated."""
        lo, hi = self.window
        mods = {p - 1: m for p, m in self.modules.items()}
        diffs = {p - 1: self.diff(p).neg() for p in list(self.diffs)}
        return UComplex(self.data, (lo - 1, hi - 1), mods, diffs)


class CdgModule(BaseComplex):
    """Graded A!-module with degree-1 anti-derivation and curvature law."""

    side = "A!"

    def __init__(self, cdga: CdgAlgebra, window, dims: dict, actions: dict,
                 diffs: dict, weights=None):
        self.cdga = cdga
        super().__init__(cdga.field, window, dims, diffs, weights)
        self.actions = actions  # {p: [Matrix N^p -> N^{p+1} per dual generator]}

    def action(self, p: int, g: int) -> Matrix:
        acts = self.actions.get(p)
        if acts is None:
            return Matrix.zero(self.field, self.dim(p + 1), self.dim(p))
        return acts[g]

    def num_generators(self) -> int:
        return self.cdga.dual.pres.dim

    def act_element(self, p: int, degree: int, coords) -> Matrix:
        """Action of an A!_degree element (standard-basis coords) on N^p."""
        f = self.field
        out = Matrix.zero(f, self.dim(p + degree), self.dim(p))
        dual = self.cdga.dual
        for i, c in enumerate(coords):
            if f.is_zero(c):
                continue
            word = dual.basis_words[degree][i]
            m = Matrix.identity(f, self.dim(p))
            deg = p
            for g in reversed(word):
                m = self.action(deg, g).mul(m)
                deg += 1
            out = out.add(m.scale(c))
        return out

    def validate(self):
        f = self.field
        dual = self.cdga.dual
        d = dual.pres.dim
        rel = dual.pres.relations
        # relations of R-perp annihilate (composition in increasing degree)
        for p in self.degrees():
            if not self.dim(p) or not self.dim(p + 2):
                continue
            for i in range(rel.rows):
                acc = Matrix.zero(f, self.dim(p + 2), self.dim(p))
                for a in range(d):
                    for b in range(d):
                        c = rel.data[i][a * d + b]
                        if not f.is_zero(c):
                            acc = acc.add(self.action(p + 1, a).mul(self.action(p, b)).scale(c))
                if not acc.is_zero():
                    return f"R-perp relation {i} acts nonzero at degree {p}"
        # module anti-derivation: d(x*n) = d_{A!}(x*) n - x* d(n)
        for p in self.degrees():
            if not self.dim(p):
                continue
            for g in range(d):
                lhs = self.diff(p + 1).mul(self.action(p, g))
                d1col = self.cdga.d(1).column(g)
                rhs = self.act_element(p, 2, d1col).sub(self.action(p + 1, g).mul(self.diff(p)))
                if not lhs.eq(rhs):
                    return f"anti-derivation law fails at degree {p}, generator {g}"
        # curvature: d^2 = c . (-)
        for p in self.degrees():
            if not self.dim(p):
                continue
            lhs = self.diff(p + 1).mul(self.diff(p))
            rhs = self.act_element(p, 2, self.cdga.curvature)
            if not lhs.eq(rhs):
                return f"curvature law fails at degree {p}"
        if self.weights is not None:
            wts = self.cdga.dual.pres.weights or [1] * d
            for p in self.degrees():
                for g in range(d):
                    m = self.action(p, g)
                    for r in range(m.rows):
                        for c in range(m.cols):
                            if not f.is_zero(m.data[r][c]):
                                if (self.weight_of(p + 1, r)
                                        != self.weight_of(p, c) + wts[g]):
                                    return f"action not weight-homogeneous at degree {p}"
        return None

    def shift(self) -> "CdgModule":
        """[1] with the sign twist on the action (odd generators flip)."""
        lo, hi = self.window
        dims = {p - 1: n for p, n in self.dims.items()}
        diffs = {p - 1: self.diff(p).neg() for p in list(self.diffs)}
        acts = {p - 1: [a.neg() for a in self.actions[p]] for p in self.actions}
        weights = None
        if self.weights is not None:
            weights = {p - 1: w for p, w in self.weights.items()}
        return CdgModule(self.cdga, (lo - 1, hi - 1), dims, acts, diffs, weights)

    def socle_complex(self):
        """Hom_{A!}(k, -): per-degree socle bases and induced differential.

        Returns (window, {p: basis Matrix (columns)}, {p: Matrix}).
        """
        f = self.field
        from .linalg import kernel_basis
        bases = {}
        for p in self.degrees():
            n = self.dim(p)
            if not n:
                continue
            stacked = None
            for g in range(self.num_generators()):
                a = self.action(p, g)
                stacked = a if stacked is None else stacked.vstack(a)
            if stacked is None or stacked.rows == 0:
                bases[p] = Matrix.identity(f, n)
            else:
                bases[p] = kernel_basis(stacked)
        diffs = {}
        for p, b in bases.items():
            if bases.get(p + 1) is None or b.cols == 0:
                continue
            img = self.diff(p).mul(b)
            from .linalg import solve_matrix
            expr = solve_matrix(bases[p + 1], img)
            if expr is None:
                raise InconsistentDataError("socle is not preserved by d")
            diffs[p] = expr
        return self.window, bases, diffs


# -- chain maps, cones, homotopies ----------------------------------------


class ChainMap:
    """Degree-0 morphism: commutes with differentials and module actions."""

    def __init__(self, source, target, maps: dict):
        if source.field != target.field:
            raise InconsistentDataError("field mismatch")
        self.source = source
        self.target = target
        self.maps = {p: m for p, m in maps.items()}
        self.field = source.field

    def map_at(self, p: int) -> Matrix:
        m = self.maps.get(p)
        if m is None:
            return Matrix.zero(self.field, self.target.dim(p), self.source.dim(p))
        return m

    def validate(self, check_actions=True):
        lo = min(self.source.window[0], self.target.window[0])
        hi = max(self.source.window[1], self.target.window[1])
        for p in range(lo, hi + 1):
            lhs = self.target.diff(p).mul(self.map_at(p))
            rhs = self.map_at(p + 1).mul(self.source.diff(p))
            if not lhs.eq(rhs):
                return f"does not commute with d at degree {p}"
        if check_actions:
            shift = 1 if self.source.side == "A!" else 0
            for p in range(lo, hi + 1):
                for g in range(self.source.num_generators()):
                    lhs = self.map_at(p + shift).mul(self.source.action(p, g))
                    rhs = self.target.action(p, g).mul(self.map_at(p))
                    if not lhs.eq(rhs):
                        return f"does not commute with action at degree {p}"
        return None

    @staticmethod
    def identity(x) -> "ChainMap":
        return ChainMap(x, x, {p: Matrix.identity(x.field, x.dim(p)) for p in x.dims})

    @staticmethod
    def zero(source, target) -> "ChainMap":
        return ChainMap(source, target, {})

    def sub(self, other: "ChainMap") -> "ChainMap":
        maps = {}
        for p in set(self.maps) | set(other.maps):
            maps[p] = self.map_at(p).sub(other.map_at(p))
        return ChainMap(self.source, self.target, maps)

    def compose(self, first: "ChainMap") -> "ChainMap":
        """self after first."""
        maps = {}
        for p in set(self.maps) | set(first.maps):
            maps[p] = self.map_at(p).mul(first.map_at(p))
        return ChainMap(first.source, self.target, maps)


@dataclass
class Homotopy:
    """Certificate s with f^n - g^n = (-1)^n d s^n + (-1)^{n+1} s^{n+1} d."""
    maps: dict  # {p: Matrix source^p -> target^{p-1}}


def _block(f: Field, blocks, heights, widths):
    """Assemble a block matrix; None blocks are zero."""
    data = []
    for i, row in enumerate(blocks):
        h = heights[i]
        rows_data = [[] for _ in range(h)]
        for j, b in enumerate(row):
            w = widths[j]
            if b is None or b.rows == 0 or b.cols == 0:
                for r in range(h):
                    rows_data[r].extend([f.zero()] * w)
            else:
                for r in range(h):
                    rows_data[r].extend(b.data[r])
        data.extend(rows_data)
    return Matrix(f, data, sum(heights), sum(widths))


def cone(fmap: ChainMap):
    """C(f)^p = source^{p+1} ⊕ target^p, d(m, n) = (-d m, f m + d n).

    Module structure is carried through when source and target are both
    U-complexes or both cdg-modules; otherwise the cone is a plain complex.
    """
    src, tgt = fmap.source, fmap.target
    f = fmap.field
    lo = min(src.window[0] - 1, tgt.window[0])
    hi = max(src.window[1] - 1, tgt.window[1])
    ssh = src.shift()

    dims = {}
    for p in range(lo, hi + 1):
        n = ssh.dim(p) + tgt.dim(p)
        if n:
            dims[p] = n
    diffs = {}
    for p in range(lo, hi + 1):
        if not dims.get(p) or not dims.get(p + 1):
            continue
        diffs[p] = _block(
            f,
            [[ssh.diff(p), None],                 # shift already negates d
             [fmap.map_at(p + 1), tgt.diff(p)]],
            heights=[ssh.dim(p + 1), tgt.dim(p + 1)],
            widths=[ssh.dim(p), tgt.dim(p)])

    if src.side != tgt.side or src.side == "plain" or src.side == "F":
        return BaseComplex(f, (lo, hi), dims, diffs)

    if src.side == "U":
        mods = {}
        for p in range(lo, hi + 1):
            m1 = ssh.modules.get(p)
            m2 = tgt.modules.get(p)
            if m1 and m2:
                mods[p] = m1.direct_sum(m2)
            elif m1 or m2:
                mods[p] = m1 or m2
        return UComplex(src.data, (lo, hi), mods, diffs)

    actions = {}
    for p in range(lo, hi + 1):
        if not dims.get(p):
            continue
        acts = []
        for g in range(src.num_generators()):
            acts.append(_block(
                f,
                [[ssh.action(p, g), None],
                 [None, tgt.action(p, g)]],
                heights=[ssh.dim(p + 1), tgt.dim(p + 1)],
                widths=[ssh.dim(p), tgt.dim(p)]))
        actions[p] = acts
    weights = None
    if ssh.weights is not None and tgt.weights is not None:
        weights = {}
        for p in range(lo, hi + 1):
            if dims.get(p):
                weights[p] = list((ssh.weights.get(p) or [])) + list((tgt.weights.get(p) or []))
    return CdgModule(src.cdga, (lo, hi), dims, actions, diffs, weights)


# -- homology ---------------------------------------------------------------


def homology_dims(x: BaseComplex, window=None, per_weight=False):
    """Exact homology dimensions per degree (optionally per weight).

    Returns ({p: dim} or {(p, w): dim}, edge_degrees).  Degrees touching
    the window boundary are reported but flagged edge-unreliable.
    """
    f = x.field
    lo, hi = window if window is not None else x.window
    edges = set()
    if isinstance(x, CdgModule) and not x.cdga.curvature_is_zero:
        raise CurvedInputError("homology needs curvature c = 0")
    out = {}
    for p in range(lo, hi + 1):
        n = x.dim(p)
        if p == lo or p == hi:
            edges.add(p)
        if per_weight and x.weights is not None:
            for w in sorted({wi for wi in (x.weights.get(p) or [])}):
                out[(p, w)] = _homology_at_weight(x, p, w)
        elif per_weight:
            if n:
                out[(p, None)] = n - _rank_or0(f, x, p) - _rank_or0(f, x, p - 1)
        else:
            out[p] = n - _rank_or0(f, x, p) - _rank_or0(f, x, p - 1)
    return out, edges


def _rank_or0(f: Field, x: BaseComplex, p: int) -> int:
    if not x.dim(p) or not x.dim(p + 1):
        return 0
    return _rank(f, x.diff(p))


def _rank(f: Field, m: Matrix) -> int:
    rows = []
    for i in range(m.rows):
        row = {j: v for j, v in enumerate(m.data[i]) if not f.is_zero(v)}
        if row:
            rows.append(row)
    return sparse_rank(f, rows)


def _homology_at_weight(x: BaseComplex, p: int, w) -> int:
    f = x.field

    def block(mat, rows_w, cols_w):
        rsel = [i for i, wi in enumerate(rows_w or []) if wi == w]
        csel = [i for i, wi in enumerate(cols_w or []) if wi == w]
        return Matrix(f, [[mat.data[i][j] for j in csel] for i in rsel],
                      len(rsel), len(csel))

    n = len([i for i in (x.weights.get(p) or []) if i == w])
    dout = block(x.diff(p), x.weights.get(p + 1), x.weights.get(p))
    din = block(x.diff(p - 1), x.weights.get(p), x.weights.get(p - 1))
    rk_out = _rank(f, dout) if dout.rows and dout.cols else 0
    rk_in = _rank(f, din) if din.rows and din.cols else 0
    return n - rk_out - rk_in


# -- homotopy search --------------------------------------------------------


def nullhomotopy(fmap: ChainMap, gmap: ChainMap):
    """Exact linear search for s with f - g = (-1)^n d s + (-1)^{n+1} s d,
    constrained to be module-linear.  Returns Homotopy or None."""
    if fmap.source is not gmap.source or fmap.target is not gmap.target:
        if (fmap.source.dims != gmap.source.dims
                or fmap.target.dims != gmap.target.dims):
            raise InconsistentDataError("nullhomotopy needs parallel maps")
    src, tgt = fmap.source, fmap.target
    f = fmap.field
    lo = min(src.window[0], tgt.window[0])
    hi = max(src.window[1], tgt.window[1]) + 1
    varmap = {}
    for p in range(lo, hi + 1):
        ns, nt = src.dim(p), tgt.dim(p - 1)
        for i in range(nt):
            for j in range(ns):
                varmap[(p, i, j)] = len(varmap)

    def var(p, i, j):
        return varmap.get((p, i, j))

    eqs = []
    one = f.one()
    # homotopy identity per degree
    for p in range(lo - 1, hi + 1):
        ns, nt = src.dim(p), tgt.dim(p)
        if not ns or not nt:
            # still need consistency when f - g is nonzero there; dims 0 => fine
            pass
        delta = fmap.map_at(p).sub(gmap.map_at(p))
        sgn_d = one if p % 2 == 0 else f.neg(one)
        sgn_s = f.neg(sgn_d)
        dprev = tgt.diff(p - 1)   # tgt^{p-1} -> tgt^p
        dnext = src.diff(p)       # src^p -> src^{p+1}
        for i in range(tgt.dim(p)):
            for j in range(ns):
                eq = {}
                # (-1)^p (d s^p)_{ij} = sum_k d[i,k] s^p[k,j]
                for k in range(tgt.dim(p - 1)):
                    c = dprev.data[i][k]
                    if not f.is_zero(c):
                        v = var(p, k, j)
                        if v is not None:
                            eq[v] = f.add(eq.get(v, f.zero()), f.mul(sgn_d, c))
                # (-1)^{p+1} (s^{p+1} d)_{ij} = sum_k s^{p+1}[i,k] d[k,j]
                for k in range(src.dim(p + 1)):
                    c = dnext.data[k][j]
                    if not f.is_zero(c):
                        v = var(p + 1, i, k)
                        if v is not None:
                            eq[v] = f.add(eq.get(v, f.zero()), f.mul(sgn_s, c))
                rhs = delta.data[i][j] if (delta.rows > i and delta.cols > j) else f.zero()
                if eq or not f.is_zero(rhs):
                    eq[RHS] = rhs
                    eqs.append(eq)
    # module linearity of s
    act_shift = 1 if src.side == "A!" else 0
    for p in range(lo - 1, hi + 1):
        for g in range(src.num_generators()):
            a_s = src.action(p, g)            # src^p -> src^{p+shift}
            a_t = tgt.action(p - 1, g)        # tgt^{p-1} -> tgt^{p-1+shift}
            rows_t = tgt.dim(p - 1 + act_shift)
            for i in range(rows_t):
                for j in range(src.dim(p)):
                    eq = {}
                    # (s^{p+shift} a_src)_{ij}
                    for k in range(src.dim(p + act_shift)):
                        c = a_s.data[k][j] if (a_s.rows > k and a_s.cols > j) else f.zero()
                        if not f.is_zero(c):
                            v = var(p + act_shift, i, k)
                            if v is not None:
                                eq[v] = f.add(eq.get(v, f.zero()), c)
                    # -(a_tgt s^p)_{ij}
                    for k in range(tgt.dim(p - 1)):
                        c = a_t.data[i][k] if (a_t.rows > i and a_t.cols > k) else f.zero()
                        if not f.is_zero(c):
                            v = var(p, k, j)
                            if v is not None:
                                eq[v] = f.sub(eq.get(v, f.zero()), c)
                    if eq:
                        eqs.append(eq)
    sol = solve_sparse(f, eqs, len(varmap))
    if sol is None:
        return None
    maps = {}
    for p in range(lo, hi + 1):
        ns, nt = src.dim(p), tgt.dim(p - 1)
        if not ns or not nt:
            continue
        m = Matrix.zero(f, nt, ns).copy_data()
        for i in range(nt):
            for j in range(ns):
                m[i][j] = sol[varmap[(p, i, j)]]
        maps[p] = Matrix(f, m, nt, ns)
    return Homotopy(maps)


def homotopy_identity_holds(fmap: ChainMap, gmap: ChainMap, h: Homotopy) -> bool:
    f = fmap.field
    src, tgt = fmap.source, fmap.target
    lo = min(src.window[0], tgt.window[0])
    hi = max(src.window[1], tgt.window[1])
    one = f.one()
    for p in range(lo, hi + 1):
        delta = fmap.map_at(p).sub(gmap.map_at(p))
        sgn_d = one if p % 2 == 0 else f.neg(one)
        sp = h.maps.get(p)
        sp1 = h.maps.get(p + 1)
        acc = Matrix.zero(f, tgt.dim(p), src.dim(p))
        if sp is not None:
            acc = acc.add(tgt.diff(p - 1).mul(sp).scale(sgn_d))
        if sp1 is not None:
            acc = acc.add(sp1.mul(src.diff(p)).scale(f.neg(sgn_d)))
        if not acc.eq(delta):
            return False
    return True
