"""Integer chains on the (unnormalised) bar complex, boundary maps, 2-cocycles
and the Kronecker pairing.

A chain of degree k is a finite integer combination of cells ``(g_1, ..., g_k)``
with every ``g_i`` kept in its group's normal form. Cells containing the
identity are kept; simplification only merges identical normalised cells.

Cycle verification comes in three flavours, recorded on ``Chain.verified``:

``"direct"``
    ``boundary2`` computed with the group's normal form is zero.
``"relators"``
    for groups without a normal form: the boundary computed in the free group
    on the generators vanishes once every relator (up to cyclic permutation
    and inversion) is replaced by the identity.
:class:`PushforwardRecord`
    the chain is the image of a directly verified cycle under a homomorphism
    whose relator images are certified trivial.
"""

from dataclasses import dataclass

from .errors import CannotVerifyError, HomomorphismError
from .group_model import IDENTITY, GroupMorphism, IntHom, Word, evaluate_hom, free_reduce


@dataclass(frozen=True)
class PushforwardRecord:
    """Provenance of a pushed-forward cycle: everything needed to redo the check."""

    source_group: str
    splitting: tuple  # target words, as strings
    source_cycle: "Chain"
    relator_witnesses: tuple = ()
    target_group: object = None

    def to_json(self):
        fmt = self.target_group.format
        return {
            "pushforward": {
                "source_group": self.source_group,
                "source_group_data": self.source_cycle.group.to_json(),
                "source_cycle": self.source_cycle.to_json(),
                "splitting": list(self.splitting),
                "relator_witnesses": [
                    [{"conjugator": fmt(cj) if cj else "", "relator": i, "power": p} for cj, i, p in per]
                    for per in self.relator_witnesses
                ],
            }
        }


class Chain:
    """Finite integer combination of bar cells of a fixed degree."""

    __slots__ = ("group", "degree", "_terms", "verified")

    def __init__(self, group, degree, terms=(), verified=None):
        self.group = group
        self.degree = degree
        acc = {}
        items = terms.items() if isinstance(terms, dict) else ((cell, x) for x, cell in terms)
        for cell, x in items:
            cell = tuple(group.normalize(g) for g in cell)
            if len(cell) != degree:
                raise ValueError(f"cell {cell} does not have degree {degree}")
            acc[cell] = acc.get(cell, 0) + int(x)
        self._terms = {c: x for c, x in acc.items() if x}
        self.verified = verified

    @classmethod
    def parse(cls, group, terms, verified=None):
        """Build from ``[(coeff, ["a", "b"]), ...]`` with words as strings."""
        cells = [(x, tuple(group.parse(s) if isinstance(s, str) else s for s in cell)) for x, cell in terms]
        degree = len(cells[0][1]) if cells else 2
        return cls(group, degree, cells, verified)

    @property
    def terms(self):
        return dict(self._terms)

    def __iter__(self):
        for cell, x in self._terms.items():
            yield x, cell

    def __len__(self):
        return len(self._terms)

    def is_zero(self):
        return not self._terms

    def coeff(self, cell):
        cell = tuple(self.group.normalize(g) for g in cell)
        return self._terms.get(cell, 0)

    def _combine(self, other, sign):
        if self.group != other.group or self.degree != other.degree:
            raise ValueError("chains live in different groups or degrees")
        out = dict(self._terms)
        for cell, x in other._terms.items():
            out[cell] = out.get(cell, 0) + sign * x
        return Chain(self.group, self.degree, out)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return Chain(self.group, self.degree, {c: -x for c, x in self._terms.items()})

    def __rmul__(self, k):
        return Chain(self.group, self.degree, {c: k * x for c, x in self._terms.items()})

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        return self.group == other.group and self.degree == other.degree and self._terms == other._terms

    def __hash__(self):
        return hash((self.degree, frozenset(self._terms.items())))

    def __repr__(self):
        if not self._terms:
            return "0"
        fmt = self.group.format
        parts = []
        for x, cell in sorted(self, key=lambda t: _cell_key(t[1])):
            parts.append(f"{x:+d}[{'|'.join(fmt(g) for g in cell)}]")
        return " ".join(parts)

    def support(self):
        """Words at which a representation must be evaluated to pair with this 2-chain:
        every ``a``, ``b`` and ``ab`` over the cells, deduplicated and sorted."""
        G = self.group
        words = set()
        for _, cell in self:
            words.update(cell)
            if len(cell) == 2:
                words.add(G.multiply(cell[0], cell[1]))
        return sorted(words, key=_word_key)

    def to_json(self):
        fmt = self.group.format
        terms = [
            {"coeff": x, "cell": [fmt(g) for g in cell]}
            for x, cell in sorted(self, key=lambda t: _cell_key(t[1]))
        ]
        out = {"terms": terms}
        if isinstance(self.verified, PushforwardRecord):
            out["verified"] = self.verified.to_json()
        elif self.verified:
            out["verified"] = self.verified
        return out


def _word_key(w):
    return (len(w), w.letters)


def _cell_key(cell):
    return tuple(_word_key(w) for w in cell)


def zero_chain(group, degree):
    return Chain(group, degree)


# -- boundaries ---------------------------------------------------------


def _require_normal_form(c):
    if not c.group.has_normal_form:
        raise CannotVerifyError(
            f"group {c.group.name or '?'} has no normal form; boundaries cannot be checked directly"
        )


def _boundary2_raw(group, c, mul):
    terms = []
    for x, (a, b) in c:
        terms += [(x, (a,)), (-x, (mul(a, b),)), (x, (b,))]
    return Chain(group, 1, terms)


def boundary2(c):
    """``d[a|b] = [a] - [ab] + [b]``, extended linearly."""
    if c.degree != 2:
        raise ValueError("boundary2 expects a 2-chain")
    if not c.group.has_normal_form:
        if c.verified:
            return zero_chain(c.group, 1)
        _require_normal_form(c)
    return _boundary2_raw(c.group, c, c.group.multiply)


def boundary3(d):
    """``d[a|b|c] = [a|b] - [a|bc] + [ab|c] - [b|c]``, extended linearly."""
    if d.degree != 3:
        raise ValueError("boundary3 expects a 3-chain")
    _require_normal_form(d)
    mul = d.group.multiply
    terms = []
    for x, (a, b, c) in d:
        terms += [(x, (a, b)), (-x, (a, mul(b, c))), (x, (mul(a, b), c)), (-x, (b, c))]
    return Chain(d.group, 2, terms)


def is_cycle(c):
    return boundary2(c).is_zero()


def verify_direct(c):
    """Return ``c`` flagged ``"direct"`` if its boundary vanishes, else raise."""
    _require_normal_form(c)
    if not is_cycle(c):
        raise CannotVerifyError(f"chain is not a cycle: boundary = {boundary2(c)!r}")
    return Chain(c.group, 2, c.terms, verified="direct")


def _cyclic_relator_words(group):
    out = {IDENTITY}
    for r in group.relators:
        for w in (r, _inverse_word(r)):
            seq = w.signed_letters()
            for i in range(len(seq)):
                out.add(free_reduce(Word(tuple(seq[i:] + seq[:i]))))
    return out


def _inverse_word(w):
    return Word(tuple((g, -e) for g, e in reversed(w.letters)))


def verify_by_relator_lift(c):
    """Verify a 2-cycle on a group without normal form through its free-group lift.

    The boundary is computed with free reduction only. Every 1-cell whose word
    is a cyclic permutation of a relator or of its inverse is trivial in the
    group, so it is replaced by the identity; the resulting 1-chain must vanish.
    """
    G = c.group
    free_mul = lambda a, b: free_reduce(Word(a.letters + b.letters))  # noqa: E731
    bd = _boundary2_raw(G, c, free_mul)
    trivial = _cyclic_relator_words(G)
    collapsed = Chain(G, 1, [(x, (IDENTITY,) if w in trivial else (w,)) for x, (w,) in bd])
    if not collapsed.is_zero():
        raise CannotVerifyError(f"free-group boundary does not collapse to zero: {collapsed!r}")
    return Chain(G, 2, c.terms, verified="relators")


# -- cocycles ------------------------------------------------------------


class Cocycle:
    """Integer-valued function on pairs of group elements; subclasses provide ``group``."""

    def __call__(self, g, h):
        raise NotImplementedError

    def __add__(self, other):
        return SumCocycle(((1, self), (1, other)))

    def __sub__(self, other):
        return SumCocycle(((1, self), (-1, other)))

    def __neg__(self):
        return SumCocycle(((-1, self),))

    def __rmul__(self, k):
        return SumCocycle(((int(k), self),))

    def _words(self, g, h):
        G = self.group
        if isinstance(g, str):
            g = G.parse(g)
        if isinstance(h, str):
            h = G.parse(h)
        return g, h


@dataclass(frozen=True, eq=False)
class CupCocycle(Cocycle):
    """``sign * alpha(g) * beta(h)``."""

    alpha: IntHom
    beta: IntHom
    sign: int = 1

    @property
    def group(self):
        return self.alpha.group

    def __call__(self, g, h):
        g, h = self._words(g, h)
        return self.sign * evaluate_hom(self.alpha, g) * evaluate_hom(self.beta, h)


@dataclass(frozen=True, eq=False)
class CoboundaryCocycle(Cocycle):
    """``gamma(g) - gamma(gh) + gamma(h)`` with ``gamma`` a finite table, zero elsewhere."""

    group: object
    gamma: dict

    def potential(self, g):
        return self.gamma.get(self.group.normalize(g), 0)

    def __call__(self, g, h):
        g, h = self._words(g, h)
        if not self.group.has_normal_form:
            raise CannotVerifyError("coboundary evaluation needs a normal form")
        return self.potential(g) - self.potential(self.group.multiply(g, h)) + self.potential(h)


@dataclass(frozen=True, eq=False)
class TableCocycle(Cocycle):
    """Finite table on normalised pairs, zero elsewhere."""

    group: object
    table: dict

    def __call__(self, g, h):
        g, h = self._words(g, h)
        G = self.group
        return self.table.get((G.normalize(g), G.normalize(h)), 0)


@dataclass(frozen=True, eq=False)
class SumCocycle(Cocycle):
    parts: tuple  # ((coeff, Cocycle), ...)

    @property
    def group(self):
        return self.parts[0][1].group

    def __call__(self, g, h):
        return sum(k * s(g, h) for k, s in self.parts)


def cup_cocycle(alpha, beta, sign=1):
    """Cocycle representative ``sign * alpha(g) beta(h)`` of the cup product."""
    if alpha.group != beta.group:
        raise ValueError("cup product of homomorphisms on different groups")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return CupCocycle(alpha, beta, sign)


def coboundary_cocycle(group, gamma):
    """Coboundary of the potential ``gamma`` (mapping words or strings to integers)."""
    if not group.has_normal_form:
        raise CannotVerifyError("coboundaries need a normal form to evaluate gamma(gh)")
    table = {}
    for k, v in gamma.items():
        w = group.normalize(group.parse(k) if isinstance(k, str) else k)
        table[w] = table.get(w, 0) + int(v)
    return CoboundaryCocycle(group, {w: v for w, v in table.items() if v})


def table_cocycle(group, table):
    out = {}
    for (g, h), v in table.items():
        key = (group.normalize(g), group.normalize(h))
        out[key] = out.get(key, 0) + int(v)
    return TableCocycle(group, out)


def verify_cocycle(sigma, triples):
    """Check ``s(g,h) - s(g,hk) + s(gh,k) - s(h,k) == 0`` on every supplied triple."""
    G = sigma.group
    for g, h, k in triples:
        if sigma(g, h) - sigma(g, G.multiply(h, k)) + sigma(G.multiply(g, h), k) - sigma(h, k) != 0:
            return False
    return True


def kronecker_pair(sigma, c):
    """``sum_j x_j * sigma(a_j, b_j)``."""
    if c.degree != 2:
        raise ValueError("Kronecker pairing needs a 2-chain")
    return sum(x * sigma(a, b) for x, (a, b) in c)


# -- pushforward ---------------------------------------------------------


def _witness_product(target, witness):
    letters = []
    for conj, idx, power in witness:
        r = target.relators[idx]
        core = r.letters if power > 0 else _inverse_word(r).letters
        letters += list(conj.letters) + list(core) + list(_inverse_word(conj).letters)
    return free_reduce(Word(tuple(letters)))


def check_morphism(s, relator_witnesses=None):
    """Certify that every source relator maps to the identity.

    With a target normal form the image is normalised and compared with the
    identity. Without one, ``relator_witnesses[i]`` must express the image of
    source relator ``i`` as a product of conjugates of target relators, each
    given as ``(conjugator, relator index, +1 or -1)``; the comparison is by
    free reduction, which is decidable.
    """
    src, tgt = s.source, s.target
    if len(s.images) != src.ngens:
        raise HomomorphismError(f"expected {src.ngens} generator images, got {len(s.images)}")
    for i, r in enumerate(src.relators):
        img = s(r)
        if tgt.has_normal_form:
            if img != IDENTITY:
                raise HomomorphismError(
                    f"relator {src.format(r)} maps to {tgt.format(img)}", relator=r, value=img
                )
            continue
        if img == IDENTITY:
            continue
        witness = relator_witnesses[i] if relator_witnesses and i < len(relator_witnesses) else None
        if witness is None or _witness_product(tgt, witness) != free_reduce(img):
            raise HomomorphismError(
                f"image {tgt.format(img)} of relator {src.format(r)} is not certified trivial",
                relator=r,
                value=img,
            )
    return s


def push_forward_chain(s, c, relator_witnesses=None, source_name=None):
    """Image of ``c`` under the morphism ``s``; cycles stay cycles (chain maps commute with boundaries).

    The result is flagged with a :class:`PushforwardRecord` when ``c`` is a
    verified cycle.
    """
    if not isinstance(s, GroupMorphism):
        raise TypeError("push_forward_chain expects a GroupMorphism")
    check_morphism(s, relator_witnesses)
    source_is_cycle = bool(c.verified) or (c.group.has_normal_form and c.degree == 2 and is_cycle(c))
    record = None
    if source_is_cycle and c.degree == 2:
        src_verified = c if c.verified else Chain(c.group, 2, c.terms, verified="direct")
        record = PushforwardRecord(
            source_group=source_name or c.group.name,
            splitting=tuple(s.target.format(w) for w in s.images),
            source_cycle=src_verified,
            relator_witnesses=tuple(tuple(per) for per in (relator_witnesses or ())),
            target_group=s.target,
        )
    terms = [(x, tuple(s(g) for g in cell)) for x, cell in c]
    return Chain(s.target, c.degree, terms, verified=record)
