"""Complexes of free left U-modules: windowed expansion, the fiber
k ⊗_U (-), null-system membership, and U-linear homotopy search.

A free complex is a matrix over U: component p is U^{ranks[p]} and the
differential entry (i, j) is an element of the truncated U, acting on the
generator e_j of component p and read off in the generators of p+1.
Expansion replaces U by its filtration piece at a level growing along the
window, which embeds the expanded object as a subcomplex of the true one.
"""

from __future__ import annotations

from .complexes import BaseComplex
from .deformations import FilteredAlgebraTruncation
from .errors import InputError
from .linalg import RHS, Matrix, solve_sparse


class FreeUComplex:
    """Bounded complex of free U-modules with differential entries in U."""

    def __init__(self, u: FilteredAlgebraTruncation, window, ranks: dict,
                 entries: dict):
        self.u = u
        self.field = u.field
        self.window = (int(window[0]), int(window[1]))
        self.ranks = {p: int(r) for p, r in ranks.items() if r}
        # entries[p][i][j]: coordinate vector over the U basis, for the map
        # component U^{ranks[p]} -> U^{ranks[p+1]}
        self.entries = entries
        for p, mat in entries.items():
            if len(mat) != self.ranks.get(p + 1, 0):
                raise InputError(f"entry matrix at degree {p} has wrong height")
            for row in mat:
                if len(row) != self.ranks.get(p, 0):
                    raise InputError(f"entry matrix at degree {p} has wrong width")

    def rank(self, p: int) -> int:
        return self.ranks.get(p, 0)

    def entry(self, p: int, i: int, j: int):
        mat = self.entries.get(p)
        if mat is None:
            return None
        return mat[i][j]

    def entry_degree_bound(self) -> int:
        """Max filtration degree of any differential entry."""
        top = 0
        f = self.field
        for mat in self.entries.values():
            for row in mat:
                for vec in row:
                    for bi, c in enumerate(vec):
                        if not f.is_zero(c):
                            top = max(top, len(self.u.basis_words[bi]))
        return top

    def check_d_squared(self):
        """d entries compose to zero exactly in the truncated U.

        For maps of free left modules phi(e_j) = sum c_{kj} e_k, the
        composite entry is (psi phi)_{ij} = sum_k c^phi_{kj} . c^psi_{ik}:
        the first map's entry multiplies on the left.
        """
        f = self.field
        u = self.u
        for p in sorted(self.entries):
            if p + 1 not in self.entries:
                continue
            a = self.entries[p]
            b = self.entries[p + 1]
            for i in range(self.rank(p + 2)):
                for j in range(self.rank(p)):
                    acc = [f.zero()] * u.total_dim
                    for k in range(self.rank(p + 1)):
                        prod = u.multiply(a[k][j], b[i][k])
                        acc = [f.add(x, y) for x, y in zip(acc, prod)]
                    if any(not f.is_zero(x) for x in acc):
                        return f"d^2 != 0 at degree {p} (entry {i},{j})"
        return None

    # -- expansion ---------------------------------------------------------

    def expand(self, base_level: int) -> BaseComplex:
        """Subcomplex with component p expanded at level base_level + (p - lo) * e.

        e is the max entry degree, so every differential lands inside the
        next component and the result is an honest subcomplex.  For scalar
        entries (e = 0) the expansion is level-constant and represents the
        true homology exactly; otherwise window edges are unreliable.
        """
        f = self.field
        u = self.u
        e = self.entry_degree_bound()
        lo, hi = self.window
        levels = {p: base_level + (p - lo) * e for p in range(lo, hi + 1)}
        if levels and max(levels.values()) > u.bound:
            raise InputError(
                f"expansion level {max(levels.values())} beyond U bound {u.bound}; "
                "lower the window or rebuild U deeper")
        dims, labels = {}, {}
        for p in range(lo, hi + 1):
            r = self.rank(p)
            if not r:
                continue
            uidx = [i for i in range(u.total_dim)
                    if len(u.basis_words[i]) <= levels[p]]
            labels[p] = [(ui, j) for j in range(r) for ui in uidx]
            dims[p] = len(labels[p])
        diffs = {}
        for p in sorted(dims):
            if p + 1 not in dims:
                continue
            tpos = {lab: i for i, lab in enumerate(labels[p + 1])}
            out = [[f.zero()] * dims[p] for _ in range(dims[p + 1])]
            ent = self.entries.get(p)
            if ent is None:
                diffs[p] = Matrix(f, out, dims[p + 1], dims[p])
                continue
            for col, (ui, j) in enumerate(labels[p]):
                for i in range(self.rank(p + 1)):
                    vec = ent[i][j]
                    # u_basis[ui] * entry, reduced in U
                    prod = u.multiply(_unit_coord(f, u.total_dim, ui), vec)
                    for ti, c in enumerate(prod):
                        if f.is_zero(c):
                            continue
                        row = tpos.get((ti, i))
                        if row is None:
                            raise InputError("expansion level overflow")
                        out[row][col] = f.add(out[row][col], c)
            diffs[p] = Matrix(f, out, dims[p + 1], dims[p])
        return BaseComplex(f, self.window, dims, diffs)

    def fiber_complex(self) -> BaseComplex:
        """k ⊗_U P: scalar parts of the differential entries (needs beta = 0)."""
        f = self.field
        u = self.u
        one_idx = u._basis_pos[0]
        if any(not f.is_zero(x) for x in u.data.beta.data[0]):
            raise InputError("k tensor needs an augmented U (beta = 0)")
        dims = {p: r for p, r in self.ranks.items()}
        diffs = {}
        for p, ent in self.entries.items():
            rows = self.rank(p + 1)
            cols = self.rank(p)
            if not rows or not cols:
                continue
            out = [[f.zero()] * cols for _ in range(rows)]
            for i in range(rows):
                for j in range(cols):
                    out[i][j] = ent[i][j][one_idx]
            diffs[p] = Matrix(f, out, rows, cols)
        return BaseComplex(f, self.window, dims, diffs)

    # -- algebraic ops -------------------------------------------------------

    def shift(self) -> "FreeUComplex":
        f = self.field
        lo, hi = self.window
        ranks = {p - 1: r for p, r in self.ranks.items()}
        entries = {}
        for p, ent in self.entries.items():
            entries[p - 1] = [[_scale_vec(f, vec, f.neg(f.one())) for vec in row]
                              for row in ent]
        return FreeUComplex(self.u, (lo - 1, hi - 1), ranks, entries)


def _unit_coord(f, n, i):
    v = [f.zero()] * n
    v[i] = f.one()
    return v


def _scale_vec(f, vec, c):
    return [f.mul(c, x) for x in vec]


def free_identity_map(p_ranks, u):
    f = u.field
    one = u.unit_vector()
    zero = [f.zero()] * u.total_dim
    return {p: [[one if i == j else zero for j in range(r)] for i in range(r)]
            for p, r in p_ranks.items()}


def free_cone_of_map(src: FreeUComplex, tgt: FreeUComplex, fmat: dict) -> FreeUComplex:
    """Cone of a U-matrix chain map between free complexes."""
    u = src.u
    f = src.field
    zero = [f.zero()] * u.total_dim
    lo = min(src.window[0] - 1, tgt.window[0])
    hi = max(src.window[1] - 1, tgt.window[1])
    ranks = {}
    for p in range(lo, hi + 1):
        r = src.rank(p + 1) + tgt.rank(p)
        if r:
            ranks[p] = r
    entries = {}
    for p in range(lo, hi + 1):
        rows = ranks.get(p + 1, 0)
        cols = ranks.get(p, 0)
        if not rows or not cols:
            continue
        s1, t1 = src.rank(p + 1), tgt.rank(p)
        s2, t2 = src.rank(p + 2), tgt.rank(p + 1)
        ent = [[zero for _ in range(cols)] for _ in range(rows)]
        sent = src.entries.get(p + 1)
        tent = tgt.entries.get(p)
        fent = fmat.get(p + 1)
        for i in range(s2):
            for j in range(s1):
                v = sent[i][j] if sent else zero
                ent[i][j] = _scale_vec(f, v, f.neg(f.one()))
        for i in range(t2):
            for j in range(s1):
                v = fent[i][j] if fent else zero
                ent[s2 + i][j] = v
        for i in range(t2):
            for j in range(t1):
                v = tent[i][j] if tent else zero
                ent[s2 + i][s1 + j] = v
        entries[p] = ent
    return FreeUComplex(u, (lo, hi), ranks, entries)


def free_nullhomotopy(p: FreeUComplex, fmat: dict, gmat: dict, degree_cap=None):
    """U-linear homotopy between chain endomorphisms of a free complex.

    Unknowns are the U-coordinates of s on generators; the identity
    f - g = (-1)^n d s + (-1)^{n+1} s d is solved exactly on generators.
    Returns {p: matrix of U-coordinate vectors} or None.
    """
    f = p.field
    u = p.u
    nb = u.total_dim
    cap = degree_cap if degree_cap is not None else u.bound
    keep = [i for i in range(nb) if len(u.basis_words[i]) <= cap]
    lo, hi = p.window
    varmap = {}
    for q in range(lo, hi + 2):
        for i in range(p.rank(q - 1)):
            for j in range(p.rank(q)):
                for bi in keep:
                    varmap[(q, i, j, bi)] = len(varmap)
    eqs = []
    one = f.one()
    for q in range(lo, hi + 1):
        sgn_d = one if q % 2 == 0 else f.neg(one)
        sgn_s = f.neg(sgn_d)
        dq = p.entries.get(q)
        dprev = p.entries.get(q - 1)
        fm = fmat.get(q)
        gm = gmat.get(q)
        for i in range(p.rank(q)):
            for j in range(p.rank(q)):
                # one scalar equation per U basis element
                rhs = [f.zero()] * nb
                if fm is not None:
                    rhs = [f.add(x, y) for x, y in zip(rhs, fm[i][j])]
                if gm is not None:
                    rhs = [f.sub(x, y) for x, y in zip(rhs, gm[i][j])]
                coeff = {}

                def add_term(var_key_base, fixed_vec, unknown_left, sgn):
                    # composite entry: first map's entry multiplies on the left
                    for bi in keep:
                        if unknown_left:
                            prod = u.multiply(_unit_coord(f, nb, bi), fixed_vec)
                        else:
                            prod = u.multiply(fixed_vec, _unit_coord(f, nb, bi))
                        v = varmap.get(var_key_base + (bi,))
                        if v is None:
                            continue
                        for t, c in enumerate(prod):
                            if not f.is_zero(c):
                                coeff.setdefault(t, {})[v] = f.add(
                                    coeff.get(t, {}).get(v, f.zero()),
                                    f.mul(sgn, c))

                # (d o s)_{ij} = sum_k s[q][k][j] . d[q-1][i][k]  (s first)
                if dprev is not None:
                    for k in range(p.rank(q - 1)):
                        add_term((q, k, j), dprev[i][k], True, sgn_d)
                # (s o d)_{ij} = sum_k d[q][k][j] . s[q+1][i][k]  (d first)
                if dq is not None:
                    for k in range(p.rank(q + 1)):
                        add_term((q + 1, i, k), dq[k][j], False, sgn_s)
                for t in range(nb):
                    eq = dict(coeff.get(t, {}))
                    r = rhs[t]
                    if eq or not f.is_zero(r):
                        eq[RHS] = r
                        eqs.append(eq)
    sol = solve_sparse(f, eqs, len(varmap))
    if sol is None:
        return None
    out = {}
    for q in range(lo, hi + 2):
        if not p.rank(q) or not p.rank(q - 1):
            continue
        mat = [[[f.zero()] * nb for _ in range(p.rank(q))]
               for _ in range(p.rank(q - 1))]
        for i in range(p.rank(q - 1)):
            for j in range(p.rank(q)):
                for bi in keep:
                    mat[i][j][bi] = sol[varmap[(q, i, j, bi)]]
        out[q] = mat
    return out


def null_test_free(p: FreeUComplex, base_level: int, interior):
    """The free-side null-system criterion: P and k ⊗_U P both acyclic.

    ``interior`` is the degree range on which acyclicity is asserted;
    window edges are excluded by the caller via guard bands.
    """
    from .complexes import homology_dims
    msg = p.check_d_squared()
    if msg:
        raise InputError(msg)
    expanded = p.expand(base_level)
    h_p, _ = homology_dims(expanded, p.window)
    fiber = p.fiber_complex()
    h_f, _ = homology_dims(fiber, p.window)
    lo, hi = interior
    acyclic = all(h_p.get(q, 0) == 0 for q in range(lo, hi + 1))
    fiber_acyclic = all(h_f.get(q, 0) == 0 for q in range(lo, hi + 1))
    return {
        "acyclic": acyclic,
        "fiber_acyclic": fiber_acyclic,
        "in_null_system": acyclic and fiber_acyclic,
        "homology": h_p,
        "fiber_homology": h_f,
    }
