"""The quantum path algebra: height configurations and skein straightening.

A configuration is a symmetric product of cyclic words whose letters carry
pairwise-distinct integer heights, together with a multiset of heightless
idempotent factors.  Only the relative order of heights is data, so every
configuration is stored with heights renumbered to 1..N, each component
linearized to start at its minimal height, and components sorted by that
minimal height.

The rewriting core brings a configuration to its PBW normal form: blocks
sorted by the necklace basis order, heights contiguous block by block, each
block's heights following the canonical rotation of its necklace.  One
rewrite exchanges an adjacent height pair (h, h+1) carried by letters u
(lower) and u'; writing X for the original and X' for the exchanged
configuration, X = X' - h*{u,u'}*X'' where X'' merges the two punctured
components (different components) or splits the punctured component into
its two arcs as a symmetric product (same component), empty pieces turning
into idempotent factors.  Each swap lowers the inversion count against the
normal-form height order and each correction has two fewer letters, so the
recursion terminates; confluence is a tested invariant, not an assumption.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import CompositionError, MismatchError
from .linear import LinearCombination, add_into, fraction_coerce
from .necklace import (
    Necklace,
    bracket_sign,
    idempotent_class,
    minimal_rotation_offset,
    necklace_key,
)
from .quiver import Letter, Quiver
from .rings import HBarPolynomial


@dataclass(frozen=True)
class HeightConfiguration:
    """Normalized configuration: components of (letter, height) pairs plus
    idempotent factors.  Heights are exactly 1..N; each component starts at
    its minimal height; components are sorted by starting height."""

    components: tuple[tuple[tuple[Letter, int], ...], ...]
    idempotents: tuple[int, ...]

    @property
    def letter_count(self) -> int:
        return sum(len(c) for c in self.components)

    @property
    def is_unit(self) -> bool:
        return not self.components and not self.idempotents


def _normalize_raw(components, idempotents):
    comps = [tuple(comp) for comp in components]
    heights = sorted(h for comp in comps for (_, h) in comp)
    rank = {h: k + 1 for k, h in enumerate(heights)}
    normed = []
    for comp in comps:
        comp = tuple((letter, rank[h]) for (letter, h) in comp)
        start = min(range(len(comp)), key=lambda k: comp[k][1])
        normed.append(comp[start:] + comp[:start])
    normed.sort(key=lambda c: c[0][1])
    return tuple(normed), tuple(sorted(idempotents))


def make_component(pairs) -> tuple:
    """Linearize a cyclic (letter, height) word to start at its minimal height."""
    pairs = tuple(pairs)
    if not pairs:
        raise CompositionError("a height component needs at least one letter")
    start = min(range(len(pairs)), key=lambda k: pairs[k][1])
    return pairs[start:] + pairs[:start]


def make_configuration(quiver: Quiver, components, idempotents=()) -> HeightConfiguration:
    """Validate and normalize a raw configuration.

    Components must be cyclically composable and all heights distinct; the
    idempotent factors must name vertices of the quiver.
    """
    comps = [tuple(comp) for comp in components]
    seen = set()
    for comp in comps:
        if not comp:
            raise CompositionError("empty component")
        n = len(comp)
        for k, (letter, h) in enumerate(comp):
            if not isinstance(h, int) or h < 1:
                raise CompositionError(f"height {h!r} is not a positive integer")
            if h in seen:
                raise CompositionError(f"duplicate height {h}")
            seen.add(h)
            nxt = comp[(k + 1) % n][0]
            if letter.source(quiver) != nxt.target(quiver):
                raise CompositionError(
                    f"component word is not cyclically composable at height {h}"
                )
    for v in idempotents:
        if not (0 <= v < len(quiver.vertices)):
            raise CompositionError(f"unknown vertex index {v} in idempotent factor")
    comps_n, idems_n = _normalize_raw(comps, idempotents)
    return HeightConfiguration(comps_n, idems_n)


def canonical_configuration(quiver: Quiver, necklaces, extra_idempotents=()) -> HeightConfiguration:
    """The PBW normal-form configuration of a multiset of necklaces."""
    words = sorted(
        (n for n in necklaces if not n.is_idempotent), key=necklace_key
    )
    idems = sorted(
        [n.vertex for n in necklaces if n.is_idempotent] + list(extra_idempotents)
    )
    comps = []
    t = 1
    for neck in words:
        comps.append(tuple((letter, t + k) for k, letter in enumerate(neck.letters)))
        t += len(neck.letters)
    return HeightConfiguration(tuple(comps), tuple(idems))


def _canonical_targets(quiver: Quiver, comps):
    """Map each (component, position) to its normal-form height."""
    blocks = []
    for ci, comp in enumerate(comps):
        word = tuple(letter for (letter, _) in comp)
        off = minimal_rotation_offset(word)
        neck = Necklace(None, word[off:] + word[:off])
        blocks.append((necklace_key(neck), comp[0][1], ci, off, neck))
    blocks.sort(key=lambda b: (b[0], b[1]))
    target = {}
    necklaces = []
    t = 1
    for _, _, ci, off, neck in blocks:
        n = len(comps[ci])
        necklaces.append(neck)
        for k in range(n):
            target[(ci, (off + k) % n)] = t
            t += 1
    return target, necklaces


def is_canonical(quiver: Quiver, cfg: HeightConfiguration) -> bool:
    comps = cfg.components
    if not comps:
        return True
    target, _ = _canonical_targets(quiver, comps)
    for ci, comp in enumerate(comps):
        for pi, (_, h) in enumerate(comp):
            if target[(ci, pi)] != h:
                return False
    return True


def _arc_length(a: int, b: int, n: int) -> int:
    """Number of positions strictly between a and b, walking forward mod n."""
    return (b - a - 1) % n


_PICKERS = {
    "first": lambda invs, rng: invs[0],
    "last": lambda invs, rng: invs[-1],
    "middle": lambda invs, rng: invs[len(invs) // 2],
    "random": lambda invs, rng: rng.choice(invs),
}

_H = HBarPolynomial.h()
_ONE = HBarPolynomial.one()

# Results of default-strategy straightening, keyed by (quiver, comps, idems).
_STRAIGHTEN_CACHE: dict = {}


def clear_straighten_cache() -> None:
    _STRAIGHTEN_CACHE.clear()


def _inversion_count(seq) -> int:
    n = len(seq)
    return sum(
        1 for i in range(n) for j in range(i + 1, n) if seq[i] > seq[j]
    )


def _straighten_raw(quiver, comps, idems, pick, rng, on_step, memo, parent_measure):
    comps, idems = _normalize_raw(comps, idems)
    use_global = pick is _PICKERS["first"] and on_step is None
    key = (comps, idems)
    if use_global:
        cached = _STRAIGHTEN_CACHE.get((quiver, key))
        if cached is not None:
            return cached
    if memo is not None:
        cached = memo.get(key)
        if cached is not None:
            return cached

    # The target normal-form height of every position is fixed once here;
    # the swap chain below strictly lowers the inversion count against it,
    # so the chain terminates no matter how rotation or block-order ties
    # were broken (ties only exist between identical words, for which all
    # choices produce the same normal form).
    target, necklaces = _canonical_targets(quiver, comps)
    n_letters = sum(len(comp) for comp in comps)
    state = [list(comp) for comp in comps]
    out: dict = {}

    def height_sequence():
        pos_of = {}
        for ci, comp in enumerate(state):
            for pi, (_, h) in enumerate(comp):
                pos_of[h] = (ci, pi)
        return pos_of, [target[pos_of[h]] for h in range(1, n_letters + 1)]

    pos_of, seq = height_sequence()
    measure = (n_letters, _inversion_count(seq)) if on_step is not None else None
    if on_step is not None and parent_measure is not None:
        on_step(parent_measure, measure)

    while True:
        inverted = [h for h in range(1, n_letters) if seq[h - 1] > seq[h]]
        if not inverted:
            break
        h = pick(inverted, rng)
        ci, pi = pos_of[h]
        cj, pj = pos_of[h + 1]
        u = state[ci][pi][0]
        v = state[cj][pj][0]

        sign = bracket_sign(u, v)
        if sign:
            # Correction: drop the two contracted letters from the pre-swap
            # configuration, keeping every other letter's height.
            if ci != cj:
                len_i, len_j = len(state[ci]), len(state[cj])
                rem_i = [state[ci][(pi + 1 + k) % len_i] for k in range(len_i - 1)]
                rem_j = [state[cj][(pj + 1 + k) % len_j] for k in range(len_j - 1)]
                merged = tuple(rem_i + rem_j)
                new_comps = [tuple(c) for k, c in enumerate(state) if k not in (ci, cj)]
                new_idems = list(idems)
                if merged:
                    new_comps.append(merged)
                else:
                    new_idems.append(u.target(quiver))
            else:
                n = len(state[ci])
                arc_b = [state[ci][(pi + 1 + k) % n] for k in range(_arc_length(pi, pj, n))]
                arc_a = [state[ci][(pj + 1 + k) % n] for k in range(_arc_length(pj, pi, n))]
                new_comps = [tuple(c) for k, c in enumerate(state) if k != ci]
                new_idems = list(idems)
                if arc_a:
                    new_comps.append(tuple(arc_a))
                else:
                    new_idems.append(u.target(quiver))
                if arc_b:
                    new_comps.append(tuple(arc_b))
                else:
                    new_idems.append(v.target(quiver))
            factor = _H if sign > 0 else -_H
            for cfg, c in _straighten_raw(
                quiver,
                tuple(new_comps),
                tuple(new_idems),
                pick,
                rng,
                on_step,
                memo,
                measure,
            ):
                add_into(out, cfg, -(c * factor))

        state[ci][pi] = (u, h + 1)
        state[cj][pj] = (v, h)
        pos_of, seq = height_sequence()
        if on_step is not None:
            new_measure = (n_letters, _inversion_count(seq))
            on_step(measure, new_measure)
            measure = new_measure

    add_into(
        out,
        canonical_configuration(quiver, necklaces, extra_idempotents=idems),
        _ONE,
    )
    result = tuple(out.items())

    if use_global:
        _STRAIGHTEN_CACHE[(quiver, key)] = result
    if memo is not None:
        memo[key] = result
    return result


class QPAElement(LinearCombination):
    """Element of the quantum path algebra in PBW normal form."""

    __slots__ = ("quiver",)

    def __init__(self, quiver: Quiver, terms=None):
        object.__setattr__(self, "quiver", quiver)
        super().__init__(terms)

    def _context(self):
        return (self.quiver,)

    def _with_terms(self, terms):
        return QPAElement(self.quiver, terms)

    @classmethod
    def unit(cls, quiver: Quiver) -> "QPAElement":
        return cls(quiver, {HeightConfiguration((), ()): 1})

    def __mul__(self, other):
        if isinstance(other, QPAElement):
            return qpa_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, QPAElement):
            return qpa_mul(other, self)
        return self.scale(other)

    def div_h(self) -> "QPAElement":
        return QPAElement(self.quiver, {k: v.div_h() for k, v in self.items()})

    def is_divisible_by_h(self) -> bool:
        return all(v.is_divisible_by_h() for v in self.terms.values())


def straighten(
    quiver: Quiver,
    cfg: HeightConfiguration,
    strategy: str = "first",
    rng=None,
    on_step=None,
) -> QPAElement:
    """Expand a configuration over the PBW normal-form basis.

    ``strategy`` picks which inverted adjacent height pair is rewritten next
    ("first", "last", "middle", or "random" with an ``rng``); all strategies
    produce the same element.  ``on_step`` receives the (letter count,
    inversion count) measure of parent and child at every rewrite edge.
    """
    pick = _PICKERS[strategy]
    if strategy == "random" and rng is None:
        raise ValueError("strategy 'random' needs an rng")
    memo = None if on_step is not None else {}
    result = _straighten_raw(
        quiver, cfg.components, cfg.idempotents, pick, rng, on_step, memo, None
    )
    return QPAElement(quiver, result)


def _straighten_parts(quiver, comps, idems):
    return _straighten_raw(
        quiver, comps, idems, _PICKERS["first"], None, None, {}, None
    )


def qpa_mul(x: QPAElement, y: QPAElement) -> QPAElement:
    """Stack y above x: shift y's heights past x's, then straighten."""
    if x.quiver != y.quiver:
        raise MismatchError("qpa_mul operands live over different quivers")
    quiver = x.quiver
    out: dict = {}
    for cfg_x, cx in x.items():
        shift = cfg_x.letter_count
        for cfg_y, cy in y.items():
            comps = cfg_x.components + tuple(
                tuple((letter, h + shift) for (letter, h) in comp)
                for comp in cfg_y.components
            )
            idems = cfg_x.idempotents + cfg_y.idempotents
            coeff = cx * cy
            for cfg, c in _straighten_parts(quiver, comps, idems):
                add_into(out, cfg, coeff * c)
    return QPAElement(quiver, out)


def qpa_comm(x: QPAElement, y: QPAElement) -> QPAElement:
    return qpa_mul(x, y) - qpa_mul(y, x)


# ---------------------------------------------------------------------------
# The PBW isomorphism with Sym(HH0)[h]


def make_sym_monomial(necklaces) -> tuple:
    return tuple(sorted(necklaces, key=necklace_key))


class SymElement(LinearCombination):
    """Element of the symmetric algebra on HH0 over Q[h]."""

    __slots__ = ("quiver",)

    def __init__(self, quiver: Quiver, terms=None):
        object.__setattr__(self, "quiver", quiver)
        super().__init__(terms)

    def _context(self):
        return (self.quiver,)

    def _with_terms(self, terms):
        return SymElement(self.quiver, terms)

    @classmethod
    def of(cls, quiver: Quiver, necklaces, coeff=1) -> "SymElement":
        return cls(quiver, {make_sym_monomial(necklaces): coeff})

    def __mul__(self, other):
        if isinstance(other, SymElement):
            return sym_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def constant_part(self) -> "SymElement":
        """Reduce coefficients mod h."""
        return SymElement(
            self.quiver,
            {k: HBarPolynomial.constant(v.constant_term()) for k, v in self.items()},
        )


def sym_mul(x: SymElement, y: SymElement) -> SymElement:
    if x.quiver != y.quiver:
        raise MismatchError("sym_mul operands live over different quivers")
    out: dict = {}
    for m1, c1 in x.items():
        for m2, c2 in y.items():
            add_into(out, make_sym_monomial(m1 + m2), c1 * c2)
    return SymElement(x.quiver, out)


def lift(m: SymElement) -> QPAElement:
    """The PBW section: each sorted monomial goes to its canonical configuration."""
    out = {}
    for monomial, coeff in m.items():
        add_into(out, canonical_configuration(m.quiver, monomial), coeff)
    return QPAElement(m.quiver, out)


def lift_necklace(quiver: Quiver, n: Necklace) -> QPAElement:
    return lift(SymElement.of(quiver, (n,)))


def project(x: QPAElement) -> SymElement:
    """Forget heights; inverse of lift on normal forms."""
    out: dict = {}
    for cfg, coeff in x.items():
        necklaces = [
            Necklace(None, tuple(letter for (letter, _) in comp))
            for comp in cfg.components
        ]
        necklaces += [idempotent_class(v) for v in cfg.idempotents]
        add_into(out, make_sym_monomial(necklaces), coeff)
    return SymElement(x.quiver, out)


def moment_lift(quiver: Quiver) -> QPAElement:
    """The standard quantum moment element sum_a (a,1)(a',2) - (a',1)(a,2)."""
    out: dict = {}
    for ai in range(len(quiver.arrows)):
        plain, starred = Letter(ai, False), Letter(ai, True)
        for word, sign in ((((plain, 1), (starred, 2)), 1), (((starred, 1), (plain, 2)), -1)):
            for cfg, c in _straighten_parts(quiver, (word,), ()):
                add_into(out, cfg, c * sign)
    return QPAElement(quiver, out)


# ---------------------------------------------------------------------------
# Generators of the quantum reduction ideal


@dataclass(frozen=True)
class ReductionParameters:
    """Vertex-wise parameters: the order-h weight r and the deformation lambda."""

    r: tuple[Fraction, ...]
    lam: tuple[Fraction, ...]


def make_params(quiver: Quiver, r=None, lam=None) -> ReductionParameters:
    nv = len(quiver.vertices)

    def vec(mapping):
        out = [Fraction(0)] * nv
        if mapping:
            for name, value in mapping.items():
                if not quiver.has_vertex(name):
                    raise ValueError(f"unknown vertex {name!r}")
                out[quiver.vertex_index(name)] = fraction_coerce(value)
        return tuple(out)

    return ReductionParameters(vec(r), vec(lam))


def marked_word(quiver: Quiver, p: Necklace, vertex: int, mark: int):
    """Rotate p so the marked visit to ``vertex`` sits at the end of the word."""
    if p.is_idempotent:
        if p.vertex != vertex:
            raise CompositionError("idempotent generator must be marked at its own vertex")
        return ()
    letters = p.letters
    if not (0 <= mark < len(letters)):
        raise CompositionError(f"mark {mark} out of range for a {len(letters)}-letter cycle")
    if letters[mark].source(quiver) != vertex:
        raise CompositionError(
            f"cycle does not pass through vertex index {vertex} at mark {mark}"
        )
    return letters[mark + 1 :] + letters[: mark + 1]


def ideal_generator(
    quiver: Quiver,
    p: Necklace,
    vertex: int,
    mark: int = 0,
    params: ReductionParameters | None = None,
) -> QPAElement:
    """Generator of the quantum reduction ideal attached to (p, marked visit).

    The moment component at the marked vertex is spliced into p at the mark,
    heights running in word order around the spliced cycle, minus lambda_i
    times p, plus h r_i times p; everything is returned in normal form.
    """
    if params is None:
        params = ReductionParameters(
            (Fraction(0),) * len(quiver.vertices),
            (Fraction(0),) * len(quiver.vertices),
        )
    word = marked_word(quiver, p, vertex, mark)
    v = len(word)
    base = tuple((letter, k + 1) for k, letter in enumerate(word))
    out: dict = {}
    for ai, arrow in enumerate(quiver.arrows):
        plain, starred = Letter(ai, False), Letter(ai, True)
        if arrow.target == vertex:
            comp = base + ((plain, v + 1), (starred, v + 2))
            for cfg, c in _straighten_parts(quiver, (comp,), ()):
                add_into(out, cfg, c)
        if arrow.source == vertex:
            comp = base + ((starred, v + 1), (plain, v + 2))
            for cfg, c in _straighten_parts(quiver, (comp,), ()):
                add_into(out, cfg, -c)
    tail = HBarPolynomial((-params.lam[vertex], params.r[vertex]))
    if tail:
        if v:
            for cfg, c in _straighten_parts(quiver, (base,), ()):
                add_into(out, cfg, c * tail)
        else:
            add_into(out, HeightConfiguration((), (vertex,)), tail)
    return QPAElement(quiver, out)
