"""Index-p normal subgroup lattices and the descending index-3 chain.

A SubgroupRecord ties a finite-index subgroup to the presentation it lives
in: the coset table, the Schreier presentation (raw and Tietze-simplified),
abelian invariants, and the rewriting maps up and down the chain.

Index-p normal subgroups are exactly the kernels of epimorphisms onto
Z/p; those are read off the mod-p nullspace of the relator exponent
matrix, and each kernel's coset table is written down directly from its
image vector (coset = image value), so no enumeration is needed.

On top of that sit the chain driver (descend by one witnessed or
lexicographically-least [3,3]-kernel per level), certified quotient-order
checks with a simplify-and-retry fallback, the order-3 normal-generation
certificate, the search for order-3 generator quadruples compatible with
a crystallographic epimorphism, and a bounded conjugacy-witness search.
Every bounded search reports inconclusive rather than claiming
non-existence.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from itertools import combinations

from .words import Word, Presentation, free_reduce, invert, concat, conjugate, commutator
from .coset import (CosetTable, EnumerationLimits, LimitExceeded, todd_coxeter,
                    quotient_order, _col, _standardize)
from .intmat import (AbelianInvariants, abelian_invariants, exponent_matrix,
                     mod_p_nullspace, is_prime)
from .rewrite import (SubgroupPresentation, TietzeBudget, reidemeister_schreier,
                      tietze_simplify, simplify_presentation)
from .eisenstein import evaluate, surjectivity_check

log = logging.getLogger(__name__)


@dataclass
class SubgroupRecord:
    """A finite-index subgroup of a presented group, with its machinery.

    `parent_pres` is the presentation the coset table lives over; `parent`
    is the record presenting that group (None when it is the base
    presentation itself).  `raw` and `simplified` are the Schreier
    presentation before and after Tietze moves; words over the compact
    alphabet of `simplified.presentation` are this record's own words.
    Simplification is lazy (first access to `simplified` or `pres`), so
    sibling records that are only inspected for their invariants cost one
    Smith form each; every simplification performed is checked on the
    spot for invariance of the abelian invariants.
    """

    label: str
    parent_pres: Presentation
    table: CosetTable
    raw: SubgroupPresentation
    invariants: AbelianInvariants
    parent: "SubgroupRecord | None" = None
    image_vector: tuple | None = None
    budget: TietzeBudget | None = None
    _simplified: SubgroupPresentation | None = None

    @property
    def simplified(self) -> SubgroupPresentation:
        if self._simplified is None:
            sp = tietze_simplify(self.raw, self.budget)
            inv2 = abelian_invariants(sp.presentation)
            if inv2 != self.invariants:
                raise AssertionError(
                    f"{self.label}: Tietze moves changed abelian invariants "
                    f"{self.invariants} -> {inv2}")
            self._simplified = sp
        return self._simplified

    @property
    def pres(self) -> Presentation:
        return self.simplified.presentation

    @property
    def index_in_parent(self) -> int:
        return self.table.index

    @property
    def index_in_base(self) -> int:
        """Index in the base presentation at the top of the record chain."""
        n = self.table.index
        rec = self.parent
        while rec is not None:
            n *= rec.table.index
            rec = rec.parent
        return n

    def ancestors(self) -> list["SubgroupRecord"]:
        """Records from the top of the chain down to (and including) self."""
        out = []
        rec = self
        while rec is not None:
            out.append(rec)
            rec = rec.parent
        out.reverse()
        return out

    def rewrite_from_parent(self, w: Word) -> Word:
        """Word over parent's alphabet -> this record's compact alphabet."""
        return self.simplified.rewrite(w)

    def expand_to_parent(self, w: Word) -> Word:
        """Word over this record's compact alphabet -> parent's alphabet."""
        return self.simplified.expand_ambient(w)

    def expand_to_base(self, w: Word) -> Word:
        """Expand all the way up to the base presentation's alphabet."""
        for rec in reversed(self.ancestors()):
            w = rec.expand_to_parent(w)
        return w

    def generator_words_in(self, ancestor: "SubgroupRecord | None") -> list[Word]:
        """This record's generators as words over an ancestor's alphabet
        (ancestor=None meaning the base presentation)."""
        chain = self.ancestors()
        if ancestor is not None:
            pos = next(i for i, r in enumerate(chain) if r is ancestor)
            chain = chain[pos + 1:]
        gens = self.simplified.generator_words       # over parent alphabet
        for rec in reversed(chain[:-1]):
            gens = [rec.expand_to_parent(g) for g in gens]
        return gens


def subgroup_record(label: str, parent_pres: Presentation, table: CosetTable,
                    parent: SubgroupRecord | None = None,
                    image_vector=None,
                    budget: TietzeBudget | None = None) -> SubgroupRecord:
    """Build a record: Schreier rewriting and invariants (from the raw,
    pre-simplification relation matrix); Tietze simplification is deferred
    until the record's presentation is actually needed."""
    raw = reidemeister_schreier(parent_pres, table)
    inv = abelian_invariants(raw.presentation)
    return SubgroupRecord(label, parent_pres, table, raw, inv,
                          parent=parent,
                          image_vector=tuple(image_vector) if image_vector else None,
                          budget=budget)


def presentation_record(label: str, pres: Presentation,
                        budget: TietzeBudget | None = None) -> SubgroupRecord:
    """Wrap a plain presentation as a chain root: the index-1 record of
    itself (its Schreier presentation is the group itself)."""
    rows = [[0] * (2 * pres.rank)]
    table = CosetTable(pres, [], rows)
    return subgroup_record(label, pres, table, budget=budget)


def kernel_table(pres: Presentation, vector, p: int) -> CosetTable:
    """Coset table of the kernel of the epimorphism pres ->> Z/p sending
    generator j to vector[j]; cosets are the p image values."""
    ncols = 2 * pres.rank
    rows = [[0] * ncols for _ in range(p)]
    for c in range(p):
        for g in range(1, pres.rank + 1):
            v = vector[g - 1] % p
            rows[c][_col(g)] = (c + v) % p
            rows[c][_col(-g)] = (c - v) % p
    return CosetTable(pres, [], _standardize(rows, ncols))


def _image_vectors(pres: Presentation, p: int) -> list[tuple]:
    """All mod-p epimorphism image vectors up to scalar, sorted."""
    basis = mod_p_nullspace(exponent_matrix(pres), p)
    seen = set()
    for code in range(1, p ** len(basis)):
        coeffs = [(code // p ** i) % p for i in range(len(basis))]
        v = tuple(sum(c * b[j] for c, b in zip(coeffs, basis)) % p
                  for j in range(pres.rank))
        if not any(v):
            continue
        lead = next(x for x in v if x)
        inv = pow(lead, p - 2, p)
        seen.add(tuple((x * inv) % p for x in v))
    vectors = sorted(seen)
    expected = (p ** len(basis) - 1) // (p - 1)
    if len(vectors) != expected:
        raise AssertionError(
            f"found {len(vectors)} index-{p} kernels, corank predicts {expected}")
    return vectors


def prime_index_normal_subgroups(rec: SubgroupRecord, p: int = 3,
                                 budget: TietzeBudget | None = None) -> list[SubgroupRecord]:
    """All index-p normal subgroups of the record's group, as records.

    One per kernel of an epimorphism onto Z/p (image vectors up to
    scalar); sorted by abelian invariants, then by image vector.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    pres = rec.pres
    out = []
    for v in _image_vectors(pres, p):
        tbl = kernel_table(pres, v, p)
        label = f"{rec.label}/ker{''.join(str(x) for x in v)}"
        out.append(subgroup_record(label, pres, tbl, parent=rec,
                                   image_vector=v, budget=budget))
    out.sort(key=lambda r: (r.invariants.brackets(), r.image_vector))
    return out


def invariant_multiset(records) -> list[str]:
    """Sorted abelian-invariant strings, e.g. ['[0,0]', '[3,3]', ...]."""
    return sorted(str(r.invariants) for r in records)


@dataclass
class ChainStep:
    level: int                       # 1 = first descent below the root record
    record: SubgroupRecord
    kernels: list                    # all index-p kernels of the parent
    witnessed: bool                  # chosen because it contains the witnesses
    seconds: float


@dataclass
class ChainResult:
    steps: list
    complete: bool
    stop_reason: str | None = None

    def records(self):
        return [s.record for s in self.steps]


def descend_chain(root: SubgroupRecord, depth: int, witnesses=(),
                  p: int = 3, budget: TietzeBudget | None = None,
                  target_brackets=(3, 3),
                  time_limit: float | None = None,
                  max_pres_length: int = 100_000) -> ChainResult:
    """Descend `depth` levels of index-p normal subgroups below `root`.

    At each level the chosen kernel is the one containing every witness
    word (words over the current record's alphabet, rewritten downward as
    the chain descends); with no witnesses, or if no kernel contains them
    all, the [3,3]-kernel with lexicographically least image vector is
    taken and the witnesses are dropped with a diagnostic.  Stops early
    with a reason if no kernel matches the target invariants, when the
    wall-clock budget runs out, or when the current level's presentation
    exceeds max_pres_length letters (Schreier rewriting roughly triples
    the total length per level, so one more descent from an oversized
    presentation risks exhausting memory); the chain so far is still
    returned in every early-stop case.
    """
    steps = []
    rec = root
    witnesses = [free_reduce(w) for w in witnesses]
    deadline = None if time_limit is None else time.monotonic() + time_limit
    for level in range(1, depth + 1):
        t0 = time.perf_counter()
        if deadline is not None and time.monotonic() > deadline:
            return ChainResult(steps, False,
                               f"level {level}: time budget exhausted")
        # Check the raw length first: it is free, while .simplified would
        # run Tietze passes over the oversized presentation before we could
        # reject it.
        plen = rec.raw.total_length()
        if plen <= max_pres_length:
            plen = rec.simplified.total_length()
        if plen > max_pres_length:
            return ChainResult(steps, False,
                               f"level {level}: presentation too large "
                               f"({plen} letters > {max_pres_length})")
        kernels = prime_index_normal_subgroups(rec, p, budget)
        chosen = None
        witnessed = False
        if witnesses:
            for k in kernels:
                if all(k.table.contains(w) for w in witnesses):
                    chosen = k
                    witnessed = True
                    break
            if chosen is None:
                log.warning("level %d: no kernel contains all witnesses; "
                            "falling back to least image vector", level)
                witnesses = []
        if chosen is None:
            chosen = next((k for k in kernels
                           if k.invariants.brackets() == list(target_brackets)), None)
        if chosen is None:
            return ChainResult(steps, False,
                               f"level {level}: no kernel with invariants "
                               f"{list(target_brackets)}")
        # Witness rewriting below forces simplification of the chosen
        # record; bail out first if its raw presentation is already too big.
        clen = chosen.raw.total_length()
        if clen > max_pres_length:
            return ChainResult(steps, False,
                               f"level {level}: presentation too large "
                               f"({clen} letters > {max_pres_length})")
        if witnesses:
            witnesses = [chosen.rewrite_from_parent(w) for w in witnesses]
        steps.append(ChainStep(level, chosen, kernels, witnessed,
                               time.perf_counter() - t0))
        rec = chosen
    return ChainResult(steps, True)


def commutator_subgroup_check(rec: SubgroupRecord,
                              max_cosets: int = 500_000) -> bool:
    """Is the abelianization of the record's group (Z/3)^2?

    Certified by enumeration, not Smith form: the quotient by all pairwise
    generator commutators must have order exactly 9 with every generator
    image of order dividing 3.  That pins the unique index-9 normal
    subgroup with (Z/3)^2-quotient as the commutator subgroup.  A blown
    enumeration limit (e.g. infinite abelianization) counts as False,
    with a diagnostic.

    Relator-driven enumeration is tried first; when it blows the coset
    limit (long relators over many generators define cosets much faster
    than they collapse), the slower deduction-driven strategy is retried
    before giving up, since it typically closes tiny quotients of large
    presentations within far fewer cosets.
    """
    pres = rec.pres
    comms = [commutator((i,), (j,))
             for i in range(1, pres.rank + 1) for j in range(i + 1, pres.rank + 1)]
    q = Presentation(pres.names, list(pres.relators) + comms)
    tbl = None
    for strategy in ("hlt", "felsch"):
        try:
            tbl = todd_coxeter(q, (), EnumerationLimits(max_cosets=max_cosets,
                                                        strategy=strategy))
            break
        except LimitExceeded:
            continue
    if tbl is None:
        log.warning("%s: abelianization did not close within %d cosets",
                    rec.label, max_cosets)
        return False
    if tbl.index != 9:
        return False
    return all(tbl.trace((g, g, g), 1) == 1 for g in range(1, pres.rank + 1))


def normal_closure_quotient(rec: SubgroupRecord, extra) -> Presentation:
    """Presentation of the quotient by the normal closure of `extra`
    (words over the record's alphabet)."""
    return Presentation(rec.pres.names,
                        list(rec.pres.relators) + [free_reduce(w) for w in extra])


def bounded_quotient_order(pres: Presentation, max_cosets: int = 10**6,
                           simplify_retry: bool = True,
                           budget: TietzeBudget | None = None) -> int | None:
    """Order of the presented group, or None when it cannot be established.

    When plain enumeration blows the limit, the presentation is Tietze
    simplified and retried once: simplification can expose trivial
    generators (length-1 relators) that make the enumeration close.  As a
    last resort the simplified presentation is retried with the
    deduction-driven strategy, which closes small quotients of long
    presentations within far fewer coset definitions.
    """
    try:
        return quotient_order(pres, max_cosets)
    except LimitExceeded:
        pass
    if simplify_retry:
        bp = simplify_presentation(pres, budget)
        for strategy in ("hlt", "felsch"):
            try:
                return todd_coxeter(bp.presentation, (),
                                    EnumerationLimits(max_cosets=max_cosets,
                                                      strategy=strategy)).index
            except LimitExceeded:
                continue
    return None


def prime_quotient_certificate(pres: Presentation, p: int,
                               max_cosets: int = 10**6,
                               budget: TietzeBudget | None = None) -> bool | None:
    """Certify |G| = p for the presented group G, without enumerating G.

    Decomposition route for groups whose direct enumeration is out of
    reach: |G| = p (prime) iff G is cyclic of order p, so

      1. Abel(G) must be exactly [p] (otherwise |G| != p: False);
      2. the kernel K of the unique map onto Z/p has index p; short words
         with residue 0 (and their conjugates) generate a subgroup of K,
         and when enumerating G over that subgroup closes at index p the
         subgroup *is* K, with a Schreier presentation read off the table;
      3. Abel(K) != [] disproves |G| = p (False); Abel(K) = [] reduces the
         question to K = 1, settled when K's own enumeration closes, or
         when K is shown cyclic (a cyclic group with trivial
         abelianization is trivial).

    Returns True (certified |G| = p), False (certified |G| != p), or None
    when every bounded step stays open.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if abelian_invariants(pres).brackets() != [p]:
        return False                 # a group of prime order p is Z/p
    v = _image_vectors(pres, p)[0]   # the unique kernel's image vector

    def residue(w):
        return sum(v[abs(x) - 1] * (1 if x > 0 else -1) for x in w) % p

    rank = pres.rank
    seeds = []
    for i in range(1, rank + 1):
        if residue((i,)) == 0:
            seeds.append((i,))
        else:
            seeds.append((i,) * p)   # g^p always has residue 0
        for j in range(i, rank + 1):
            for w in ((i, j), (i, -j)):
                w = free_reduce(w)
                if w and residue(w) == 0:
                    seeds.append(w)
    conjugators = [()]
    for i in range(1, rank + 1):
        conjugators += [(i,), (-i,), (i, i)]
    sub = sorted({free_reduce(conjugate(s, c))
                  for s in seeds for c in conjugators} - {()})

    table = None
    for strategy in ("hlt", "felsch"):
        try:
            table = todd_coxeter(pres, sub,
                                 EnumerationLimits(max_cosets=max_cosets,
                                                   strategy=strategy))
            break
        except LimitExceeded:
            continue
    if table is None:
        return None                  # kernel subgroup not pinned down
    if table.index != p:
        # a group of order p has no subgroup of any other index > 1
        return False
    kernel = subgroup_record("kernel", pres, table, budget=budget)
    if kernel.invariants.brackets():
        return False                 # K has a nontrivial quotient, K != 1
    kpres = kernel.simplified.presentation
    small = EnumerationLimits(max_cosets=min(max_cosets, 200_000))
    try:                             # |K| directly
        n = todd_coxeter(kpres, (), small).index
        return n == 1
    except LimitExceeded:
        pass
    for g in range(1, kpres.rank + 1):
        try:                         # K cyclic + Abel(K) = [] => K = 1
            if todd_coxeter(kpres, [(g,)], small).index == 1:
                return True
        except LimitExceeded:
            continue
    return None


def order3_generation_certificate(rec_next: SubgroupRecord, rec: SubgroupRecord,
                                  gens3, max_cosets: int = 10**6,
                                  budget: TietzeBudget | None = None) -> bool | None:
    """Certify rec_next = normal closure in rec of the given order-3 words.

    gens3 are words over rec's alphabet whose order-3 property is the
    caller's responsibility (here: conjugates of declared order-3
    generators).  True when every word lies in rec_next and the quotient
    of rec by their normal closure has order exactly [rec : rec_next]:
    the closure then sits inside the normal subgroup rec_next with equal
    index, hence equals it.  None = inconclusive (enumeration bounded).

    When the quotient's direct enumeration stays open and the target
    index is prime, the decomposition certificate
    (prime_quotient_certificate) is tried before giving up.
    """
    if not all(rec_next.table.contains(free_reduce(g)) for g in gens3):
        return False
    q = normal_closure_quotient(rec, gens3)
    n = bounded_quotient_order(q, max_cosets, budget=budget)
    if n is not None:
        return n == rec_next.index_in_parent
    idx = rec_next.index_in_parent
    if is_prime(idx):
        return prime_quotient_certificate(q, idx, max_cosets, budget)
    return None


@dataclass
class Order3Quadruple:
    """Order-3 elements a, b, c, d of the root record (compact-alphabet
    words), conjugates of declared order-3 generators by construction."""
    a: Word
    b: Word
    c: Word
    d: Word
    image_abc: object                # shared epimorphism image of a, b, c
    image_d: object                  # independent image of d
    normally_generates: bool         # <<a,b,c,d>> equals the root group

    def words(self):
        return (self.a, self.b, self.c, self.d)


def _reduced_words(rank, max_len):
    """Freely reduced words over rank generators, by length then lex."""
    letters = [g for g in range(1, rank + 1)] + [-g for g in range(1, rank + 1)]
    frontier = [()]
    for _ in range(max_len + 1):
        yield from frontier
        frontier = [v + (x,) for v in frontier for x in letters
                    if not v or x != -v[-1]]


def order3_quadruples(root: SubgroupRecord, epi_images, child: SubgroupRecord,
                      base_letters=(1, 2), max_seed_len: int = 5,
                      max_kernel_len: int = 6, max_kernel_words: int = 60,
                      max_variants: int = 5,
                      generation_max_cosets: int = 200_000):
    """Yield candidate order-3 quadruples (a, b, c, d) over root's alphabet.

    Seeds are conjugates of the parent presentation's order-3 generators
    (base_letters) by short parent words, filtered to lie in root and to
    carry a proper rotation under the given epimorphism.  For a seed `a`
    lying in `child`, same-image companions b, c are produced by
    conjugating with short kernel elements of the epimorphism (this keeps
    the image fixed exactly, and membership in the normal subgroup
    `child` is automatic); d is a seed outside `child` whose image,
    together with a's, certifiably generates the whole crystallographic
    group.  Distinctness is by the action on root's coset table.
    `normally_generates` certifies that the normal closure of the four
    words is all of root, i.e. root is generated by order-3 elements.
    All enumeration orders are deterministic.
    """
    def perm_key(word_amb):
        return tuple(root.table.trace(word_amb, c)
                     for c in range(1, root.table.index + 1))

    seeds = []                       # (amb_word, root_word, image, in_child)
    for v in _reduced_words(root.parent_pres.rank, max_seed_len):
        for x in base_letters:
            cand = conjugate((x,), v)
            if root.table.trace(cand, 1) != 1:
                continue
            w1 = root.rewrite_from_parent(cand)
            img = evaluate(w1, epi_images)
            if img.k == 0:
                continue
            seeds.append((cand, w1, img, child.table.contains(w1)))

    kernel_words = []
    for t in _reduced_words(root.pres.rank, max_kernel_len):
        if t and evaluate(t, epi_images).is_identity():
            kernel_words.append(t)
            if len(kernel_words) >= max_kernel_words:
                break

    for a_amb, a, img_a, in_child in seeds:
        if not in_child:
            continue
        variants = {perm_key(a_amb): a}
        for s_amb, s, img_s, s_in in seeds:
            if s_in and img_s == img_a and len(variants) < max_variants:
                variants.setdefault(perm_key(s_amb), s)
        for t in kernel_words:
            if len(variants) >= max_variants:
                break
            b_amb = conjugate(a_amb, root.expand_to_parent(t))
            key = perm_key(b_amb)
            if key not in variants:
                variants[key] = root.rewrite_from_parent(b_amb)
        members = list(variants.values())
        if len(members) < 3:
            continue
        partners = [(img_s, s) for _, s, img_s, s_in in seeds
                    if not s_in and surjectivity_check([img_a, img_s])]
        for b, c in combinations(members[1:], 2):
            for img_d, d in partners:
                q = Presentation(root.pres.names,
                                 list(root.pres.relators) + [a, b, c, d])
                n = bounded_quotient_order(q, generation_max_cosets,
                                           simplify_retry=False)
                yield Order3Quadruple(a, b, c, d, img_a, img_d, n == 1)


@dataclass
class ConjugacyOutcome:
    pair: tuple                       # (label_a, label_b)
    status: str                       # "witness" | "impossible" | "inconclusive"
    witness: Word | None = None
    witness_text: str | None = None
    ambient_label: str | None = None  # where the witness word lives


def conjugacy_witness_search(subs, ambient: SubgroupRecord,
                             max_length: int = 6,
                             max_cosets: int = 50_000) -> list[ConjugacyOutcome]:
    """Bounded search for conjugating elements between pairs of subgroups.

    subs are records below `ambient` in the chain.  For each unordered
    pair with equal abelian invariants, words g of the ambient group are
    tried by increasing length until g^-1 A g lands inside B (checked on
    A's generators against B's coset table over the ambient presentation;
    equal finite indices then force equality).  Pairs with different
    invariants are impossible (conjugation preserves abelianization);
    exhausting the length budget is inconclusive, never a refutation.
    """
    ambient_pres = ambient.pres
    limits = EnumerationLimits(max_cosets=max_cosets)
    gens = []
    tables = []
    for s in subs:
        g_amb = s.generator_words_in(ambient)
        gens.append(g_amb)
        tables.append(todd_coxeter(ambient_pres, g_amb, limits))
    letters = [g for g in range(1, ambient_pres.rank + 1)] + \
              [-g for g in range(1, ambient_pres.rank + 1)]
    out = []
    for i, j in combinations(range(len(subs)), 2):
        if subs[i].invariants != subs[j].invariants:
            out.append(ConjugacyOutcome((subs[i].label, subs[j].label), "impossible"))
            continue
        if tables[i].index != tables[j].index:
            out.append(ConjugacyOutcome((subs[i].label, subs[j].label), "impossible"))
            continue
        found = None
        frontier = [()]
        for _ in range(max_length + 1):
            for g in frontier:
                if all(tables[j].contains(conjugate(a, g)) for a in gens[i]):
                    found = g
                    break
            if found is not None:
                break
            frontier = [v + (x,) for v in frontier for x in letters
                        if not v or x != -v[-1]]
        if found is None:
            out.append(ConjugacyOutcome((subs[i].label, subs[j].label),
                                        "inconclusive", ambient_label=ambient.label))
        else:
            out.append(ConjugacyOutcome((subs[i].label, subs[j].label), "witness",
                                        found, ambient_pres.spell(found),
                                        ambient.label))
    return out
