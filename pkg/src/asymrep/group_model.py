"""Finitely generated groups given by generators, relators and a normal-form strategy.

Words are stored as tuples of ``(generator index, nonzero exponent)`` pairs.
Equality of group elements means equality of normal forms, so only groups with
a real normal form (free, free abelian, or a user-supplied confluent rewriting
system) can decide equality. Groups declared with ``normal_form="none"`` still
reduce words freely, which is always sound, but cannot decide triviality.
"""

from dataclasses import dataclass, field
import re

from .errors import CannotVerifyError, GroupDataError, HomomorphismError, RewritingError

NORMAL_FORMS = ("free", "abelian", "rewriting", "none")

_ALIASES = {
    "free-reduction": "free",
    "abelian-exponent-vector": "abelian",
    "user-rewriting": "rewriting",
}

DEFAULT_MAX_REWRITES = 10_000

_TOKEN = re.compile(r"^([A-Za-z][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


@dataclass(frozen=True)
class Word:
    """A group word; ``letters`` is a tuple of ``(generator index, exponent)``."""

    letters: tuple = ()

    def __len__(self):
        return sum(abs(e) for _, e in self.letters)

    def __bool__(self):
        return bool(self.letters)

    def signed_letters(self):
        """Expand to single letters ``(index, +1 or -1)``."""
        out = []
        for g, e in self.letters:
            s = 1 if e > 0 else -1
            out.extend([(g, s)] * abs(e))
        return out

    def exponent_sums(self, ngens):
        sums = [0] * ngens
        for g, e in self.letters:
            sums[g] += e
        return sums


IDENTITY = Word(())


def _compress(signed):
    """Join runs of equal generators and drop zero exponents (free reduction)."""
    stack = []
    for g, e in signed:
        if e == 0:
            continue
        if stack and stack[-1][0] == g:
            total = stack[-1][1] + e
            if total:
                stack[-1] = (g, total)
            else:
                stack.pop()
        else:
            stack.append((g, e))
    return tuple(stack)


def free_reduce(word):
    return Word(_compress(word.letters))


def _find(seq, pattern):
    m = len(pattern)
    for i in range(len(seq) - m + 1):
        if seq[i:i + m] == pattern:
            return i
    return -1


@dataclass(frozen=True)
class GroupData:
    """A finitely generated group.

    ``rules`` (only for ``normal_form="rewriting"``) is a tuple of
    ``(lhs, rhs)`` word pairs applied left to right until no rule matches.
    Confluence is the caller's responsibility; only termination is guarded,
    by ``max_rewrites``.
    """

    generators: tuple
    relators: tuple = ()
    normal_form: str = "free"
    rules: tuple = ()
    name: str = ""
    max_rewrites: int = DEFAULT_MAX_REWRITES
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        nf = _ALIASES.get(self.normal_form, self.normal_form)
        if nf not in NORMAL_FORMS:
            raise GroupDataError(f"unknown normal form {self.normal_form!r}")
        object.__setattr__(self, "normal_form", nf)
        gens = tuple(self.generators)
        if len(set(gens)) != len(gens):
            raise GroupDataError(f"generator names must be distinct: {gens}")
        for name in gens:
            if not _TOKEN.match(name) or name.swapcase() in gens and name.swapcase() != name:
                raise GroupDataError(f"invalid generator name {name!r}")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "_index", {name: i for i, name in enumerate(gens)})
        object.__setattr__(self, "relators", tuple(self._coerce(r) for r in self.relators))
        rules = tuple((self._coerce(lhs), self._coerce(rhs)) for lhs, rhs in self.rules)
        if nf == "rewriting" and not rules:
            raise GroupDataError("rewriting normal form requires a rule list")
        object.__setattr__(self, "rules", rules)

    def _coerce(self, w):
        if isinstance(w, Word):
            self._check(w)
            return w
        if isinstance(w, str):
            return self.parse(w)
        return self.word_from_letters(w)

    def _check(self, w):
        for g, e in w.letters:
            if not (0 <= g < self.ngens) or e == 0:
                raise GroupDataError(f"invalid letter ({g}, {e}) for {self.ngens} generators")

    @property
    def ngens(self):
        return len(self.generators)

    @property
    def has_normal_form(self):
        """True when equality of normal forms decides equality in the group."""
        return self.normal_form != "none"

    # -- words -----------------------------------------------------------

    def word_from_letters(self, letters):
        w = Word(tuple((int(g), int(e)) for g, e in letters))
        self._check(w)
        return w

    def gen(self, i):
        if isinstance(i, str):
            i = self._index[i]
        return Word(((i, 1),))

    def parse(self, text):
        """Parse ``"a b A^2 b^-1"``; an upper-/lower-case swap of a name means its inverse.

        The empty string and ``"e"`` (when not a generator) denote the identity.
        """
        letters = []
        for tok in text.split():
            if tok == "e" and "e" not in self._index:
                continue
            m = _TOKEN.match(tok)
            if not m:
                raise GroupDataError(f"cannot parse token {tok!r} in {text!r}")
            name, exp = m.group(1), int(m.group(2) or 1)
            if name in self._index:
                letters.append((self._index[name], exp))
            elif name.swapcase() in self._index:
                letters.append((self._index[name.swapcase()], -exp))
            else:
                raise GroupDataError(f"unknown generator {name!r} in {text!r}")
        return Word(tuple((g, e) for g, e in letters if e))

    def to_json(self):
        out = {
            "name": self.name,
            "generators": list(self.generators),
            "relators": [self.format(r) for r in self.relators],
            "normal_form": self.normal_form,
        }
        if self.rules:
            out["rules"] = [[self.format(a), self.format(b)] for a, b in self.rules]
        return out

    def format(self, w):
        if not w.letters:
            return "e"
        parts = []
        for g, e in w.letters:
            name = self.generators[g] if e > 0 else self.generators[g].swapcase()
            parts.append(name if abs(e) == 1 else f"{name}^{abs(e)}")
        return " ".join(parts)

    # -- group operations -----------------------------------------------

    def normalize(self, w):
        """Canonical form of ``w`` under this group's normal-form strategy (idempotent)."""
        if isinstance(w, str):
            w = self.parse(w)
        if self.normal_form == "abelian":
            sums = w.exponent_sums(self.ngens)
            return Word(tuple((g, e) for g, e in enumerate(sums) if e))
        if self.normal_form == "rewriting":
            return self._rewrite(w)
        return free_reduce(w)

    def _rewrite(self, w):
        seq = Word(_compress(w.letters)).signed_letters()
        rules = [(lhs.signed_letters(), rhs.signed_letters()) for lhs, rhs in self.rules]
        steps = 0
        while True:
            for lhs, rhs in rules:
                i = _find(seq, lhs)
                if i >= 0:
                    seq = seq[:i] + rhs + seq[i + len(lhs):]
                    seq = Word(_compress(seq)).signed_letters()
                    steps += 1
                    if steps > self.max_rewrites:
                        raise RewritingError(
                            f"rewriting exceeded {self.max_rewrites} steps; rules suspected non-confluent"
                        )
                    break
            else:
                return Word(_compress(seq))

    def multiply(self, *words):
        letters = []
        for w in words:
            if isinstance(w, str):
                w = self.parse(w)
            letters.extend(w.letters)
        return self.normalize(Word(tuple(letters)))

    def invert(self, w):
        if isinstance(w, str):
            w = self.parse(w)
        return self.normalize(Word(tuple((g, -e) for g, e in reversed(w.letters))))

    def power(self, w, k):
        if k < 0:
            w, k = self.invert(w), -k
        return self.multiply(*([w] * k))

    def equal(self, w1, w2):
        if not self.has_normal_form:
            if self.normalize(w1) == self.normalize(w2):
                return True
            raise CannotVerifyError(f"group {self.name or '?'} has no normal form; equality undecidable here")
        return self.normalize(w1) == self.normalize(w2)


@dataclass(frozen=True)
class IntHom:
    """Homomorphism to the integers, given by one image per generator."""

    group: GroupData
    images: tuple

    def __call__(self, w):
        return evaluate_hom(self, w)

    def __neg__(self):
        return IntHom(self.group, tuple(-x for x in self.images))

    def __add__(self, other):
        return IntHom(self.group, tuple(x + y for x, y in zip(self.images, other.images)))


def evaluate_hom(phi, w):
    """Sum of image times exponent over the letters of ``w``."""
    if isinstance(w, str):
        w = phi.group.parse(w)
    return sum(phi.images[g] * e for g, e in w.letters)


def relator_failures(group, images):
    """List of ``(relator, value)`` for every relator not sent to zero."""
    phi = IntHom(group, tuple(int(x) for x in images))
    return [(r, evaluate_hom(phi, r)) for r in group.relators if evaluate_hom(phi, r) != 0]


def check_hom(group, images):
    """Build an :class:`IntHom`, raising :class:`HomomorphismError` naming the first failing relator."""
    images = tuple(int(x) for x in images)
    if len(images) != group.ngens:
        raise HomomorphismError(f"expected {group.ngens} images, got {len(images)}")
    bad = relator_failures(group, images)
    if bad:
        r, v = bad[0]
        raise HomomorphismError(f"relator {group.format(r)} maps to {v}, not 0", relator=r, value=v)
    return IntHom(group, images)


@dataclass(frozen=True)
class GroupMorphism:
    """Homomorphism between two :class:`GroupData`, given by generator images."""

    source: GroupData
    target: GroupData
    images: tuple

    def __call__(self, w):
        if isinstance(w, str):
            w = self.source.parse(w)
        letters = []
        for g, e in w.letters:
            img = self.images[g] if e > 0 else self.target.invert(self.images[g])
            for _ in range(abs(e)):
                letters.extend(img.letters)
        return self.target.normalize(Word(tuple(letters)))

    def pullback(self, phi):
        """Precompose an :class:`IntHom` on the target with this morphism."""
        return IntHom(self.source, tuple(evaluate_hom(phi, img) for img in self.images))
