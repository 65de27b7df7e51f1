"""Z2-graded linear algebra on C^(M|N) and its tensor powers.

Operators on a product of graded legs are stored *concretized*: the matrix
of the operator on the total space, with all grading signs baked into the
entries.  Under the default ``koszul`` composition convention a pure tensor
``E_{r1 c1} (x) ... (x) E_{rk ck}`` contributes its coefficient times

    (-1)^(sum_b (p(r_b)+p(c_b)) * sum_{a<b} p(c_a))

to the concrete entry, which makes plain sparse matrix multiplication agree
with the product of the graded tensor algebra (End V)^(x k).  The ``plain``
convention skips these signs and is kept only so the Yang-Baxter checker
can arbitrate between the two readings; the arbiter freezes ``koszul``.

Supertranspose and supertrace act on one leg through the abstract (sign
free) coefficients, so a single sign routine serves every operation.
"""

from __future__ import annotations

from functools import lru_cache

from .scalars import RAT_ONE, RAT_ZERO, Rat, render

KOSZUL = "koszul"
PLAIN = "plain"
DEFAULT_CONVENTION = KOSZUL

# Supertranspose sign on one leg: st(E_ab) = sign * E_ba.  The "target"
# variant (-1)^(p(b)(p(a)+p(b))) is the one under which P^(st2) equals the
# rank-one operator Q and the crossing relations hold; "source" is the
# mirror reading and is retained for the convention arbiter.
ST_TARGET = "target"
ST_SOURCE = "source"
DEFAULT_ST_VARIANT = ST_TARGET


class LegMismatch(ValueError):
    pass


class SingularOperator(ArithmeticError):
    pass


class GradedDim:
    """Dimensions (M|N): parity 0 for the first M indices, 1 for the rest."""

    __slots__ = ("m", "n", "parities")

    def __init__(self, m, n):
        if m < 0 or n < 0 or m + n < 1:
            raise ValueError("need M, N >= 0 and M + N >= 1")
        self.m = m
        self.n = n
        self.parities = (0,) * m + (1,) * n

    @property
    def size(self):
        return self.m + self.n

    def parity(self, i):
        """Parity of the 1-based index i."""
        return self.parities[i - 1]

    def q_i(self, i):
        return Rat.q_power(1 - 2 * self.parity(i))

    def __eq__(self, other):
        return isinstance(other, GradedDim) and (self.m, self.n) == (other.m, other.n)

    def __hash__(self):
        return hash((self.m, self.n))

    def __repr__(self):
        return f"GradedDim({self.m}|{self.n})"


@lru_cache(maxsize=None)
def _leg_tables(legs):
    """Per flat index: decoded per-leg indices and their parities."""
    dims = tuple(len(p) for p in legs)
    total = 1
    for d in dims:
        total *= d
    decode = []
    pars = []
    for flat in range(total):
        x = flat
        idx = []
        pp = []
        for b, d in enumerate(dims):
            x, r = divmod(x, d)
            idx.append(r)
            pp.append(legs[b][r])
        decode.append(tuple(idx))
        pars.append(tuple(pp))
    return dims, total, tuple(decode), tuple(pars)


def _encode(idx, dims):
    flat = 0
    for i, d in zip(reversed(idx), reversed(dims)):
        flat = flat * d + i
    return flat


def _ksign(pr, pc):
    """Concretization sign of a pure tensor with row/col parities pr, pc."""
    s = 0
    pre = 0
    for a, b in zip(pr, pc):
        s += (a + b) * pre
        pre += b
    return -1 if s & 1 else 1


class GradedOp:
    """Sparse operator on an ordered list of graded legs."""

    __slots__ = ("legs", "entries", "conv")

    def __init__(self, legs, entries=None, conv=DEFAULT_CONVENTION, _pruned=False):
        self.legs = tuple(tuple(p) for p in legs)
        if entries is None:
            entries = {}
        if not _pruned:
            entries = {k: v for k, v in entries.items() if not v.is_zero}
        self.entries = entries
        self.conv = conv

    # -- constructors

    @staticmethod
    def zero(legs, conv=DEFAULT_CONVENTION):
        return GradedOp(legs, {}, conv, _pruned=True)

    @staticmethod
    def identity(legs, conv=DEFAULT_CONVENTION):
        _, total, _, _ = _leg_tables(tuple(tuple(p) for p in legs))
        return GradedOp(
            legs, {(i, i): RAT_ONE for i in range(total)}, conv, _pruned=True
        )

    @staticmethod
    def from_terms(legs, terms, conv=DEFAULT_CONVENTION):
        """Build from abstract terms (row indices, col indices, coeff)."""
        legs = tuple(tuple(p) for p in legs)
        dims, _, _, _ = _leg_tables(legs)
        entries = {}
        for rows, cols, coeff in terms:
            if coeff.is_zero:
                continue
            r = _encode(rows, dims)
            c = _encode(cols, dims)
            if conv == KOSZUL:
                pr = tuple(legs[b][i] for b, i in enumerate(rows))
                pc = tuple(legs[b][i] for b, i in enumerate(cols))
                if _ksign(pr, pc) < 0:
                    coeff = -coeff
            cur = entries.get((r, c))
            coeff = coeff if cur is None else cur + coeff
            if coeff.is_zero:
                entries.pop((r, c), None)
            else:
                entries[(r, c)] = coeff
        return GradedOp(legs, entries, conv, _pruned=True)

    # -- views

    @property
    def total_dim(self):
        return _leg_tables(self.legs)[1]

    def abstract_items(self):
        """Yield (row indices, col indices, sign-free coefficient)."""
        dims, _, decode, pars = _leg_tables(self.legs)
        for (r, c), v in self.entries.items():
            if self.conv == KOSZUL and _ksign(pars[r], pars[c]) < 0:
                v = -v
            yield decode[r], decode[c], v

    def entry(self, rows, cols):
        """Abstract (sign-free) coefficient at a multi-index pair."""
        dims, _, _, pars = _leg_tables(self.legs)
        r = _encode(tuple(rows), dims)
        c = _encode(tuple(cols), dims)
        v = self.entries.get((r, c), RAT_ZERO)
        if self.conv == KOSZUL and not v.is_zero and _ksign(pars[r], pars[c]) < 0:
            v = -v
        return v

    @property
    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        return (
            isinstance(other, GradedOp)
            and self.legs == other.legs
            and self.conv == other.conv
            and self.entries == other.entries
        )

    def first_witness(self):
        """Minimal nonzero entry, as printable multi-index data."""
        if not self.entries:
            return None
        dims, _, decode, _ = _leg_tables(self.legs)
        r, c = min(self.entries)
        return {
            "row": list(decode[r]),
            "col": list(decode[c]),
            "value": render(self.entries[(r, c)]),
        }

    def __repr__(self):
        return f"GradedOp(legs={len(self.legs)}, nnz={len(self.entries)})"

    # -- linear structure

    def _check(self, other):
        if self.legs != other.legs or self.conv != other.conv:
            raise LegMismatch("operators live on different leg lists")

    def __add__(self, other):
        self._check(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            s = out.get(k)
            s = v if s is None else s + v
            if s.is_zero:
                out.pop(k, None)
            else:
                out[k] = s
        return GradedOp(self.legs, out, self.conv, _pruned=True)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return GradedOp(
            self.legs, {k: -v for k, v in self.entries.items()}, self.conv, _pruned=True
        )

    def scale(self, a):
        if isinstance(a, int):
            a = Rat.from_int(a)
        if a.is_zero:
            return GradedOp.zero(self.legs, self.conv)
        return GradedOp(
            self.legs, {k: v * a for k, v in self.entries.items()}, self.conv, _pruned=True
        )

    def map_values(self, fn):
        return GradedOp(self.legs, {k: fn(v) for k, v in self.entries.items()}, self.conv)

    # -- composition (plain sparse product of concretized matrices)

    def __matmul__(self, other):
        self._check(other)
        rows = {}
        for (r, c), v in other.entries.items():
            rows.setdefault(r, []).append((c, v))
        out = {}
        for (r, c), v in self.entries.items():
            hits = rows.get(c)
            if not hits:
                continue
            for c2, v2 in hits:
                k = (r, c2)
                s = out.get(k)
                p = v * v2
                s = p if s is None else s + p
                if s.is_zero:
                    out.pop(k, None)
                else:
                    out[k] = s
        return GradedOp(self.legs, out, self.conv, _pruned=True)

    def apply(self, vec):
        """Apply to {flat col index: coeff}; returns the image vector."""
        out = {}
        for (r, c), v in self.entries.items():
            a = vec.get(c)
            if a is None:
                continue
            s = out.get(r, RAT_ZERO) + v * a
            if s.is_zero:
                out.pop(r, None)
            else:
                out[r] = s
        return out

    # -- graded operations

    def supertranspose(self, leg, variant=DEFAULT_ST_VARIANT):
        if not 0 <= leg < len(self.legs):
            raise LegMismatch(f"no leg {leg}")
        dims, _, decode, pars = _leg_tables(self.legs)
        par = self.legs[leg]
        out = {}
        for rows, cols, v in self.abstract_items():
            a, b = rows[leg], cols[leg]
            pa, pb = par[a], par[b]
            if variant == ST_TARGET:
                sgn = (pa * pb + pb) & 1
            else:
                sgn = (pa * pb + pa) & 1
            if sgn:
                v = -v
            rows2 = rows[:leg] + (b,) + rows[leg + 1 :]
            cols2 = cols[:leg] + (a,) + cols[leg + 1 :]
            r = _encode(rows2, dims)
            c = _encode(cols2, dims)
            if self.conv == KOSZUL:
                pr = tuple(self.legs[k][i] for k, i in enumerate(rows2))
                pc = tuple(self.legs[k][i] for k, i in enumerate(cols2))
                if _ksign(pr, pc) < 0:
                    v = -v
            s = out.get((r, c))
            s = v if s is None else s + v
            if s.is_zero:
                out.pop((r, c), None)
            else:
                out[(r, c)] = s
        return GradedOp(self.legs, out, self.conv, _pruned=True)

    def supertrace(self, legs_to_trace, signed=True):
        """Partial supertrace; plain partial trace when signed=False."""
        traced = sorted(set(legs_to_trace))
        for b in traced:
            if not 0 <= b < len(self.legs):
                raise LegMismatch(f"no leg {b}")
        keep = [b for b in range(len(self.legs)) if b not in traced]
        new_legs = tuple(self.legs[b] for b in keep)
        dims2, _, _, _ = _leg_tables(new_legs) if new_legs else ((), 1, ((),), ((),))
        out = {}
        for rows, cols, v in self.abstract_items():
            if any(rows[b] != cols[b] for b in traced):
                continue
            if signed:
                s = sum(self.legs[b][rows[b]] for b in traced) & 1
                if s:
                    v = -v
            rows2 = tuple(rows[b] for b in keep)
            cols2 = tuple(cols[b] for b in keep)
            if new_legs:
                r = _encode(rows2, dims2)
                c = _encode(cols2, dims2)
                if self.conv == KOSZUL:
                    pr = tuple(new_legs[k][i] for k, i in enumerate(rows2))
                    pc = tuple(new_legs[k][i] for k, i in enumerate(cols2))
                    if _ksign(pr, pc) < 0:
                        v = -v
            else:
                r = c = 0
            s2 = out.get((r, c))
            s2 = v if s2 is None else s2 + v
            if s2.is_zero:
                out.pop((r, c), None)
            else:
                out[(r, c)] = s2
        if not new_legs:
            return out.get((0, 0), RAT_ZERO)
        return GradedOp(new_legs, out, self.conv, _pruned=True)

    def embed(self, positions, target_legs):
        """Place this operator at the given leg positions of a larger space."""
        positions = tuple(positions)
        if len(positions) != len(self.legs):
            raise LegMismatch("positions must match the operator's legs")
        target_legs = tuple(tuple(p) for p in target_legs)
        for p, leg in zip(positions, self.legs):
            if p >= len(target_legs) or target_legs[p] != leg:
                raise LegMismatch(f"position {p} does not carry a matching leg")
        dims, _, _, _ = _leg_tables(target_legs)
        idle = [b for b in range(len(target_legs)) if b not in positions]
        # enumerate identity assignments on the idle legs
        idle_dims = [len(target_legs[b]) for b in idle]
        assigns = [()]
        for d in idle_dims:
            assigns = [a + (i,) for a in assigns for i in range(d)]
        out = {}
        k = len(target_legs)
        for rows, cols, v in self.abstract_items():
            base_r = [0] * k
            base_c = [0] * k
            for p, i, j in zip(positions, rows, cols):
                base_r[p], base_c[p] = i, j
            for a in assigns:
                for b, t in zip(idle, a):
                    base_r[b] = t
                    base_c[b] = t
                r = _encode(base_r, dims)
                c = _encode(base_c, dims)
                v2 = v
                if self.conv == KOSZUL:
                    pr = tuple(target_legs[b][base_r[b]] for b in range(k))
                    pc = tuple(target_legs[b][base_c[b]] for b in range(k))
                    if _ksign(pr, pc) < 0:
                        v2 = -v2
                s = out.get((r, c))
                s = v2 if s is None else s + v2
                if s.is_zero:
                    out.pop((r, c), None)
                else:
                    out[(r, c)] = s
        return GradedOp(target_legs, out, self.conv, _pruned=True)

    # -- block structure on one leg

    def entry_block(self, leg, i, j):
        """Abstract (i, j) block on a leg, as an operator on the other legs."""
        keep = [b for b in range(len(self.legs)) if b != leg]
        new_legs = tuple(self.legs[b] for b in keep)
        terms = []
        for rows, cols, v in self.abstract_items():
            if rows[leg] != i - 1 or cols[leg] != j - 1:
                continue
            terms.append((tuple(rows[b] for b in keep), tuple(cols[b] for b in keep), v))
        return GradedOp.from_terms(new_legs, terms, self.conv)

    @staticmethod
    def from_blocks(leg_par, blocks, conv=DEFAULT_CONVENTION, position=0):
        """Assemble sum_ij E_ij (x) block_ij with the matrix leg inserted."""
        leg_par = tuple(leg_par)
        some = next(iter(blocks.values()))
        inner = some.legs
        new_legs = inner[:position] + (leg_par,) + inner[position:]
        terms = []
        for (i, j), blk in blocks.items():
            for rows, cols, v in blk.abstract_items():
                terms.append(
                    (
                        rows[:position] + (i - 1,) + rows[position:],
                        cols[:position] + (j - 1,) + cols[position:],
                        v,
                    )
                )
        return GradedOp.from_terms(new_legs, terms, conv)

    # -- inversion (exact Gaussian elimination on the concrete matrix)

    def inverse(self):
        n = self.total_dim
        a = [[RAT_ZERO] * n for _ in range(n)]
        for (r, c), v in self.entries.items():
            a[r][c] = v
        inv = [[RAT_ONE if i == j else RAT_ZERO for j in range(n)] for i in range(n)]
        for col in range(n):
            piv = None
            for r in range(col, n):
                if not a[r][col].is_zero:
                    piv = r
                    break
            if piv is None:
                raise SingularOperator("operator is not invertible")
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                inv[col], inv[piv] = inv[piv], inv[col]
            d = a[col][col].inv()
            arow, irow = a[col], inv[col]
            for j in range(n):
                if not arow[j].is_zero:
                    arow[j] = arow[j] * d
                if not irow[j].is_zero:
                    irow[j] = irow[j] * d
            for r in range(n):
                if r == col:
                    continue
                f = a[r][col]
                if f.is_zero:
                    continue
                ar, ir = a[r], inv[r]
                for j in range(n):
                    if not arow[j].is_zero:
                        ar[j] = ar[j] - f * arow[j]
                    if not irow[j].is_zero:
                        ir[j] = ir[j] - f * irow[j]
        out = {}
        for r in range(n):
            for c in range(n):
                if not inv[r][c].is_zero:
                    out[(r, c)] = inv[r][c]
        return GradedOp(self.legs, out, self.conv, _pruned=True)


# ---------------------------------------------------------------------------
# standard operators


def matrix_unit(dim, i, j, conv=DEFAULT_CONVENTION):
    """Single-leg unit matrix E_ij (1-based indices)."""
    n = dim.size
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexError(f"matrix unit ({i},{j}) out of range for size {n}")
    return GradedOp.from_terms((dim.parities,), [((i - 1,), (j - 1,), RAT_ONE)], conv)


def embed_factor(op, position, total):
    """Place a 1- or 2-leg operator inside a `total`-fold aux product."""
    if isinstance(position, int):
        positions = (position - 1,)
    else:
        positions = tuple(p - 1 for p in position)
    if len(positions) != len(op.legs):
        raise LegMismatch("position count must match operator legs")
    if any(not 0 <= p < total for p in positions):
        raise LegMismatch(f"positions {positions} overflow {total} factors")
    target = tuple(op.legs[0] for _ in range(total))
    return op.embed(positions, target)


def perm_P(dim, conv=DEFAULT_CONVENTION):
    """Graded permutation P = sum (-1)^p(j) E_ij (x) E_ji."""
    terms = []
    n = dim.size
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            c = RAT_ONE if dim.parity(j) == 0 else -RAT_ONE
            terms.append(((i - 1, j - 1), (j - 1, i - 1), c))
    return GradedOp.from_terms((dim.parities, dim.parities), terms, conv)


def build_Q(dim, conv=DEFAULT_CONVENTION):
    """Q = sum e_ij (x) e_ij (-1)^(p(i)p(j)+p(i)+p(j)); rank one."""
    terms = []
    n = dim.size
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            pi, pj = dim.parity(i), dim.parity(j)
            c = -RAT_ONE if (pi * pj + pi + pj) & 1 else RAT_ONE
            terms.append(((i - 1, i - 1), (j - 1, j - 1), c))
    return GradedOp.from_terms((dim.parities, dim.parities), terms, conv)


def d_entries(dim):
    """Diagonal q-powers q^2,...,q^2M, q^2M,...,q^(2M-2N+2) (1-based list)."""
    out = []
    for i in range(1, dim.m + 1):
        out.append(Rat.q_power(2 * i))
    for j in range(1, dim.n + 1):
        out.append(Rat.q_power(2 * dim.m - 2 * j + 2))
    return out


def build_D(dim, conv=DEFAULT_CONVENTION, inverse=False):
    ent = d_entries(dim)
    terms = []
    for i in range(dim.size):
        c = ent[i].inv() if inverse else ent[i]
        terms.append(((i,), (i,), c))
    return GradedOp.from_terms((dim.parities,), terms, conv)


def parity_projector(dim, parity, conv=DEFAULT_CONVENTION):
    """Diagonal projector onto the even (0) or odd (1) basis indices."""
    terms = [
        ((i,), (i,), RAT_ONE)
        for i in range(dim.size)
        if dim.parities[i] == parity
    ]
    return GradedOp.from_terms((dim.parities,), terms, conv)


def supertranspose(op, leg, variant=DEFAULT_ST_VARIANT):
    return op.supertranspose(leg, variant)


def supertrace(op, legs):
    return op.supertrace(legs)


class OpMatrix:
    """Square matrix of operators indexed by a graded index set.

    The matrix multiplication is the graded one (entries of parity
    p(i)+p(j)); inversion goes through the concrete operator on the
    matrix leg tensored with the entry legs, which realizes the inverse
    of the graded matrix algebra exactly.
    """

    __slots__ = ("parities", "blocks", "rep_legs", "conv")

    def __init__(self, parities, blocks, rep_legs, conv=DEFAULT_CONVENTION):
        self.parities = tuple(parities)
        self.blocks = {k: v for k, v in blocks.items() if not v.is_zero}
        self.rep_legs = tuple(tuple(p) for p in rep_legs)
        self.conv = conv

    @property
    def size(self):
        return len(self.parities)

    @staticmethod
    def from_graded(op):
        n = len(op.legs[0])
        blocks = {}
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                b = op.entry_block(0, i, j)
                if not b.is_zero:
                    blocks[(i, j)] = b
        return OpMatrix(op.legs[0], blocks, op.legs[1:], op.conv)

    def to_graded(self):
        if not self.blocks:
            return GradedOp.zero((self.parities,) + self.rep_legs, self.conv)
        return GradedOp.from_blocks(self.parities, self.blocks, self.conv)

    def entry(self, i, j):
        b = self.blocks.get((i, j))
        if b is None:
            return GradedOp.zero(self.rep_legs, self.conv)
        return b

    def identity_like(self):
        ident = GradedOp.identity(self.rep_legs, self.conv)
        return OpMatrix(
            self.parities,
            {(i, i): ident for i in range(1, self.size + 1)},
            self.rep_legs,
            self.conv,
        )

    def __add__(self, other):
        out = dict(self.blocks)
        for k, v in other.blocks.items():
            out[k] = out[k] + v if k in out else v
        return OpMatrix(self.parities, out, self.rep_legs, self.conv)

    def __sub__(self, other):
        return self + other.scale(Rat.from_int(-1))

    def scale(self, c):
        return OpMatrix(
            self.parities,
            {k: v.scale(c) for k, v in self.blocks.items()},
            self.rep_legs,
            self.conv,
        )

    @property
    def is_zero(self):
        return not self.blocks

    def mul(self, other):
        """Graded matrix product over the ambient parities."""
        p = self.parities
        out = {}
        for (i, k), a in self.blocks.items():
            for j in range(1, self.size + 1):
                b = other.blocks.get((k, j))
                if b is None:
                    continue
                term = a @ b
                if ((p[i - 1] + p[k - 1]) * (p[k - 1] + p[j - 1])) & 1:
                    term = -term
                key = (i, j)
                out[key] = out[key] + term if key in out else term
        return OpMatrix(self.parities, out, self.rep_legs, self.conv)

    def inverse(self):
        return OpMatrix.from_graded(self.to_graded().inverse())

    def sub(self, indices, new_parities=None):
        """Submatrix on 1-based ambient indices, reindexed to 1..k."""
        indices = tuple(indices)
        if new_parities is None:
            new_parities = tuple(self.parities[i - 1] for i in indices)
        pos = {amb: t + 1 for t, amb in enumerate(indices)}
        blocks = {}
        for (i, j), v in self.blocks.items():
            if i in pos and j in pos:
                blocks[(pos[i], pos[j])] = v
        return OpMatrix(new_parities, blocks, self.rep_legs, self.conv)

    def mask(self, rows, cols):
        """Zero out every block outside rows x cols (ambient indices)."""
        rows, cols = set(rows), set(cols)
        return OpMatrix(
            self.parities,
            {k: v for k, v in self.blocks.items() if k[0] in rows and k[1] in cols},
            self.rep_legs,
            self.conv,
        )

    def pi(self):
        """Index reversal with flipped parity typing: entry (i,j) becomes
        the old (k+1-i, k+1-j) and every index parity is flipped."""
        k = self.size
        new_par = tuple(1 - self.parities[k - i] for i in range(1, k + 1))
        blocks = {
            (k + 1 - i, k + 1 - j): v for (i, j), v in self.blocks.items()
        }
        return OpMatrix(new_par, blocks, self.rep_legs, self.conv)

    def equals(self, other):
        return (
            self.parities == other.parities
            and (self.to_graded() - other.to_graded()).is_zero
        )
