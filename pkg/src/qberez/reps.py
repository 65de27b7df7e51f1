"""Concrete representations: evaluation modules L(z) = Rbar(z/a) and their
tensor products, with relation verification at construction.

The auxiliary space is always leg 0 of a GradedOp; representation legs
follow.  Which R-matrix leg becomes auxiliary is decided at construction:
the candidate assignments are tried in a fixed order and the first one
reproducing the order-0 triangular shape of the defining relations *and*
satisfying the exchange relations is kept (the choice is recorded in the
representation descriptor).  Both sign families are realized by the same
rational matrix; the central charge acts trivially here.
"""

from __future__ import annotations

import hashlib
import random
from fractions import Fraction

from .rmatrix import build_R_at, rbar_at
from .scalars import RAT_ONE, RAT_ZERO, Rat, rat_to_series
from .tensor import DEFAULT_CONVENTION, GradedDim, GradedOp, SingularOperator


class RepConstructionError(ValueError):
    pass


def _swap_two_legs(op, signed):
    """Reorder a two-leg operator; signed swap is the graded braiding."""
    terms = []
    for (r1, r2), (c1, c2), v in op.abstract_items():
        if signed:
            p = op.legs[0]
            pq = op.legs[1]
            s = (p[r1] + p[c1]) * (pq[r2] + pq[c2])
            if s & 1:
                v = -v
        terms.append(((r2, r1), (c2, c1), v))
    return GradedOp.from_terms((op.legs[1], op.legs[0]), terms, op.conv)


class EvalRep:
    """Evaluation module: L(z) is the normalized R-matrix at ratio z/a."""

    def __init__(self, dim, a, conv=DEFAULT_CONVENTION, verify="auto"):
        if isinstance(a, (int, Fraction)):
            a = Rat.lift(a)
        if a.is_zero:
            raise RepConstructionError("evaluation parameter must be nonzero")
        self.dim = dim
        self.a = a
        self.conv = conv
        z = Rat.sym("z")
        raw = rbar_at(dim, z, a, conv=conv)  # legs (R-leg1, R-leg2)
        candidates = [
            ("aux=first_leg", raw),
            ("aux=second_leg:graded_swap", _swap_two_legs(raw, signed=True)),
            ("aux=second_leg:plain_swap", _swap_two_legs(raw, signed=False)),
        ]
        chosen = None
        for tag, cand in candidates:
            if not _triangular_order0(cand, dim):
                continue
            if _rll_holds(cand, dim, conv, mode="points"):
                chosen = (tag, cand)
                break
        if chosen is None:
            raise RepConstructionError(
                "no leg assignment reproduces the order-0 triangular shape "
                "together with the exchange relations"
            )
        self.assignment, self.L_sym = chosen
        self._inv_cache = {}
        self._op_cache = {}
        self._block_cache = {}
        if verify == "symbolic" or (verify == "auto" and dim.size <= 3):
            if not _rll_holds(self.L_sym, dim, conv, mode="symbolic"):
                raise RepConstructionError("exchange relations fail symbolically")

    # -- rep protocol

    @property
    def rep_legs(self):
        return self.L_sym.legs[1:]

    @property
    def n(self):
        return self.dim.size

    def descriptor(self):
        from .scalars import render

        return {"type": "eval", "m": self.dim.m, "n": self.dim.n, "a": render(self.a)}

    def zarg(self, k):
        """The spectral argument z q^k."""
        return Rat.sym("z") * Rat.q_power(k)

    def l_op(self, arg):
        if arg == Rat.sym("z"):
            return self.L_sym
        if arg not in self._op_cache:
            self._op_cache[arg] = self.L_sym.map_values(lambda v: v.subs({"z": arg}))
        return self._op_cache[arg]

    def linv_op(self, arg):
        if arg not in self._inv_cache:
            self._inv_cache[arg] = self.l_op(arg).inverse()
        return self._inv_cache[arg]

    def l_entry(self, i, j, arg):
        key = (arg, i, j)
        if key not in self._block_cache:
            self._block_cache[key] = self.l_op(arg).entry_block(0, i, j)
        return self._block_cache[key]

    def rep_identity(self):
        return GradedOp.identity(self.rep_legs, self.conv)

    def order0(self, plus=True):
        """Order-0 generator matrix: the '+' family expands at z = oo, the
        '-' family at z = 0 (matching the u^(-+r) generator series)."""
        if plus:
            return self.L_sym.map_values(lambda v: rat_to_series(v, "z", 0, at_infinity=True)[0])
        return self.l_op(RAT_ZERO)


class TensorRep:
    """Ordered product of evaluation modules on a shared auxiliary leg."""

    def __init__(self, components, verify_points=2):
        if not components:
            raise RepConstructionError("need at least one factor")
        dims = {(c.dim.m, c.dim.n) for c in components}
        if len(dims) != 1:
            raise RepConstructionError("components must share (M|N)")
        params = [c.a for c in components]
        for i in range(len(params)):
            for j in range(i + 1, len(params)):
                if params[i] == params[j]:
                    raise RepConstructionError("evaluation parameters must be distinct")
        self.components = list(components)
        self.dim = components[0].dim
        self.conv = components[0].conv
        aux = self.dim.parities
        rep_legs = tuple(leg for c in components for leg in c.rep_legs)
        target = (aux,) + rep_legs
        prod = None
        pos = 1
        for c in components:
            emb = c.L_sym.embed((0,) + tuple(range(pos, pos + len(c.rep_legs))), target)
            prod = emb if prod is None else prod @ emb
            pos += len(c.rep_legs)
        self.L_sym = prod
        self._inv_cache = {}
        self._op_cache = {}
        self._block_cache = {}
        if not _rll_holds_for(self, mode="points", points=verify_points):
            raise RepConstructionError("tensor product fails the exchange relations")

    rep_legs = property(lambda self: self.L_sym.legs[1:])
    n = property(lambda self: self.dim.size)

    def descriptor(self):
        return {"type": "tensor", "factors": [c.descriptor() for c in self.components]}

    zarg = EvalRep.zarg
    l_op = EvalRep.l_op
    linv_op = EvalRep.linv_op
    l_entry = EvalRep.l_entry
    rep_identity = EvalRep.rep_identity
    order0 = EvalRep.order0


def build_eval_rep(dim, a, conv=DEFAULT_CONVENTION):
    return EvalRep(dim, a, conv)


def build_tensor_rep(reps):
    return TensorRep(list(reps))


# ---------------------------------------------------------------------------
# construction-time verification


def _triangular_order0(lmat, dim):
    """Order-0 shape of the defining relations: the '+' end (z -> oo) is
    upper-triangular, the '-' end (z -> 0) lower-triangular, and both have
    invertible diagonal blocks."""
    n = dim.size
    at0 = lmat.map_values(lambda v: v.subs({"z": RAT_ZERO}))
    try:
        atinf = lmat.map_values(lambda v: rat_to_series(v, "z", 0, at_infinity=True)[0])
    except Exception:
        return False
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            b0 = at0.entry_block(0, i, j)
            binf = atinf.entry_block(0, i, j)
            if i < j and not b0.is_zero:  # '-' order 0 must be lower
                return False
            if i > j and not binf.is_zero:  # '+' order 0 must be upper
                return False
            if i == j:
                try:
                    b0.inverse()
                    binf.inverse()
                except SingularOperator:
                    return False
    return True


def _rll_holds(lmat, dim, conv, mode):
    class _Tmp:
        pass

    t = _Tmp()
    t.L_sym = lmat
    t.dim = dim
    t.conv = conv
    t.rep_legs = lmat.legs[1:]
    t.l_op = lambda arg: lmat.map_values(lambda v: v.subs({"z": arg}))
    return _rll_holds_for(t, mode)


def _rll_holds_for(rep, mode, points=3):
    dim = rep.dim
    aux = dim.parities
    target = (aux, aux) + tuple(rep.rep_legs)
    rest = tuple(range(2, len(target)))
    if mode == "symbolic":
        zv, wv = Rat.sym("z"), Rat.sym("w")
        pairs = [(zv, wv)]
    else:
        rnd = random.Random(20240917)
        pairs = []
        while len(pairs) < points:
            z0 = Fraction(rnd.randint(1, 40), rnd.randint(1, 9))
            w0 = Fraction(rnd.randint(1, 40), rnd.randint(1, 9))
            if z0 != w0:
                pairs.append((Rat.from_fraction(z0), Rat.from_fraction(w0)))
    for zv, wv in pairs:
        r12 = build_R_at(dim, zv, wv, conv=rep.conv).embed((0, 1), target)
        l1 = rep.l_op(zv).embed((0,) + rest, target)
        l2 = rep.l_op(wv).embed((1,) + rest, target)
        if not (r12 @ l1 @ l2 - l2 @ l1 @ r12).is_zero:
            return False
    return True


# ---------------------------------------------------------------------------
# deterministic evaluation points


def point_stream(seed, label):
    """Deterministic small rationals derived from a seed and a check name."""
    material = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    rnd = random.Random(int.from_bytes(material[:8], "big"))
    seen = set()
    while True:
        v = Fraction(rnd.randint(1, 97), rnd.randint(1, 97))
        if rnd.random() < 0.5:
            v = -v
        if v and v not in seen:
            seen.add(v)
            yield Rat.from_fraction(v)


def draw_points(seed, label, count):
    it = point_stream(seed, label)
    return [next(it) for _ in range(count)]
