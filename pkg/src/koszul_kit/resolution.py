"""Minimal graded free resolutions over a truncated graded algebra.

This is the independent route to Ext_A(k, k): build the resolution of k
degree by degree with exact kernels and minimal generator selection, and
read the Betti numbers off the generator degrees.  Nothing here touches
the quadratic dual, so the Koszulness and Ext-duality checks compare two
genuinely different computations.
"""

from __future__ import annotations

from .errors import InputError
from .linalg import Matrix, kernel_basis, rank, row_space
from .presentations import GradedAlgebraTruncation


class GradedFreeModule:
    """Free module ⊕ A(-j_i); only the generator degrees matter."""

    def __init__(self, shifts):
        self.shifts = list(shifts)

    def dim_at(self, alg: GradedAlgebraTruncation, degree: int) -> int:
        return sum(alg.dim_at(degree - j) if 0 <= degree - j <= alg.bound else 0
                   for j in self.shifts)

    def basis_labels(self, alg, degree):
        labs = []
        for gi, j in enumerate(self.shifts):
            d = degree - j
            if 0 <= d <= alg.bound:
                labs.extend((gi, d, b) for b in range(alg.dim_at(d)))
        return labs


def minimal_resolution_betti(alg: GradedAlgebraTruncation, steps: int,
                             degree_cap: int):
    """Betti numbers {(homological step, internal degree): rank} of the
    minimal graded free resolution of k, computed within the cap.

    Works entirely with expanded matrices: at each step the kernel of the
    previous expanded map is computed per degree, minimal generators are
    split off modulo A_+ times lower-degree kernel elements, and the next
    free module is assembled from their degrees.
    """
    if degree_cap > alg.bound:
        raise InputError("degree cap beyond the algebra truncation bound")
    f = alg.field
    betti = {(0, 0): 1}
    # the augmentation F_0 = A -> k: kernel is A_+ (degrees 1..cap)
    current = GradedFreeModule([0])
    # kernel bases per degree: {degree: Matrix columns in expanded coords}
    kernels = {}
    for deg in range(1, degree_cap + 1):
        n = current.dim_at(alg, deg)
        if n:
            kernels[deg] = Matrix.identity(f, n)  # all of A_deg
    step = 1
    while step <= steps:
        gens = {}   # degree -> list of expanded kernel vectors chosen as generators
        next_shifts = []
        gen_vectors = []  # (shift degree, expanded vector per that degree)
        for deg in sorted(kernels):
            kb = kernels[deg]
            if kb.cols == 0:
                continue
            # span of A_+ . (kernel elements of lower degree), expanded at deg
            span_rows = []
            for ldeg in sorted(kernels):
                if ldeg >= deg:
                    break
                mdeg = deg - ldeg
                if mdeg < 1 or mdeg > alg.bound:
                    continue
                lk = kernels[ldeg]
                for ci in range(lk.cols):
                    vec = lk.column(ci)
                    for mb in range(alg.dim_at(mdeg)):
                        em = [f.one() if s == mb else f.zero()
                              for s in range(alg.dim_at(mdeg))]
                        prod = _act_on_expanded(alg, current, mdeg, em, ldeg, vec)
                        span_rows.append(prod)
            # minimal generators at this degree: kernel columns independent
            # modulo the span
            if span_rows:
                sp = row_space(Matrix(f, span_rows, len(span_rows), kb.rows))
            else:
                sp = Matrix(f, [], 0, kb.rows)
            chosen = []
            stacked = sp.copy_data()
            cur_rank = sp.rows
            for ci in range(kb.cols):
                cand = stacked + [kb.column(ci)]
                m = Matrix(f, cand, len(cand), kb.rows)
                r = rank(m)
                if r > cur_rank:
                    cur_rank = r
                    stacked = cand
                    chosen.append(ci)
            if chosen:
                betti[(step, deg)] = len(chosen)
                for ci in chosen:
                    next_shifts.append(deg)
                    gen_vectors.append((deg, kb.column(ci)))
        if not next_shifts:
            break
        # build the expanded maps F_{step} -> F_{step-1} per degree, then kernels
        nxt = GradedFreeModule(next_shifts)
        new_kernels = {}
        for deg in range(1, degree_cap + 1):
            src_labs = nxt.basis_labels(alg, deg)
            if not src_labs:
                continue
            cols = []
            for (si, d, b) in src_labs:
                shift, gvec = next_shifts[si], gen_vectors[si][1]
                # generator gvec sits in expanded degree `shift`; multiply by
                # the basis element b of A_d
                eb = [f.one() if s == b else f.zero() for s in range(alg.dim_at(d))]
                cols.append(_act_on_expanded(alg, current, d, eb, shift, gvec))
            expanded = Matrix.from_columns(f, cols, rows=current.dim_at(alg, deg))
            kb = kernel_basis(expanded)
            if kb.cols:
                new_kernels[deg] = kb
        current = nxt
        kernels = new_kernels
        step += 1
    return betti


def _act_on_expanded(alg, free: GradedFreeModule, mdeg: int, mcoords,
                     vdeg: int, vec):
    """Multiply an expanded degree-vdeg element of the free module by an
    algebra element of degree mdeg; result expanded at degree vdeg+mdeg."""
    f = alg.field
    src_labs = free.basis_labels(alg, vdeg)
    tgt_labs = free.basis_labels(alg, vdeg + mdeg)
    tpos = {lab: i for i, lab in enumerate(tgt_labs)}
    out = [f.zero()] * len(tgt_labs)
    for idx, (gi, d, b) in enumerate(src_labs):
        c = vec[idx]
        if f.is_zero(c):
            continue
        eb = [f.one() if s == b else f.zero() for s in range(alg.dim_at(d))]
        prod = alg.multiply(mdeg, mcoords, d, eb)
        for tb, pc in enumerate(prod):
            if not f.is_zero(pc):
                row = tpos[(gi, d + mdeg, tb)]
                out[row] = f.add(out[row], f.mul(c, pc))
    return out


def ext_self_betti(alg: GradedAlgebraTruncation, steps: int, degree_cap: int):
    """dim Ext^i_A(k,k) per internal degree = Betti numbers of the minimal
    resolution (dualizing a minimal resolution kills the differential)."""
    return minimal_resolution_betti(alg, steps, degree_cap)
