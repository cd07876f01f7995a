"""Reidemeister-Schreier rewriting and Tietze simplification.

From a closed coset table this produces a prefix-closed Schreier
transversal, Schreier generators (with tree edges removed), and a
presentation of the subgroup in a fresh alphabet, together with the two
maps needed downstream: subgroup letters -> ambient words, and ambient
subgroup elements -> subgroup words.

Tietze simplification applies only isomorphism-preserving moves
(generator elimination by single-occurrence substitution, trivial and
duplicate relator deletion, long-substring replacement between relators)
under an explicit budget; machine-generated presentations blow up fast
without one.  Eliminations are recorded so that the ambient rewriting map
survives simplification.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .words import (Word, EMPTY, Presentation, free_reduce, invert, concat,
                    cyclic_reduce, canonical_cyclic)
from .coset import CosetTable, _col


def schreier_transversal(table: CosetTable) -> list[Word]:
    """Prefix-closed coset representatives, BFS in standardized letter
    order (positive letters in declared order first, then negatives)."""
    rank = table.pres.rank
    letters = [g + 1 for g in range(rank)] + [-(g + 1) for g in range(rank)]
    reps: list[Word | None] = [None] * table.index
    reps[0] = EMPTY
    queue = [0]
    qi = 0
    while qi < len(queue):
        c = queue[qi]
        qi += 1
        for x in letters:
            d = table.rows[c][_col(x)]
            if reps[d] is None:
                reps[d] = reps[c] + (x,)
                queue.append(d)
    return reps


@dataclass
class TietzeBudget:
    max_passes: int = 30
    max_relator_length: int = 50_000
    time_limit: float = 120.0
    # hard cap on the running total relator length: eliminations whose
    # projected growth would push past it are skipped (machine-generated
    # presentations otherwise blow up exponentially).  None = 4x the
    # initial total length, floored at 20000.
    max_total_length: int | None = None

    def __post_init__(self):
        if self.max_passes < 1 or self.max_relator_length < 1 or self.time_limit <= 0:
            raise ValueError("budget fields must be positive")

    def total_cap(self, initial_length: int) -> int:
        if self.max_total_length is not None:
            return self.max_total_length
        return max(4 * initial_length, 20_000)


class _LetterSpace:
    """Shared machinery for presentations whose letters live in a fixed
    'original' space that Tietze eliminations shrink."""

    def _expand(self, letter: int) -> Word:
        """Expansion of an original letter as a word over alive letters."""
        memo = self._expand_memo
        stack = [letter]
        while stack:
            x = stack[-1]
            if x in memo or x in self.alive:
                stack.pop()
                continue
            deps = [abs(y) for y in self.elim[x]
                    if abs(y) not in self.alive and abs(y) not in memo]
            if deps:
                stack.extend(deps)
                continue
            parts = []
            for y in self.elim[x]:
                a = abs(y)
                part = (a,) if a in self.alive else memo[a]
                parts.append(part if y > 0 else invert(part))
            memo[x] = concat(*parts)
            stack.pop()
        return (letter,) if letter in self.alive else memo[letter]

    def to_alive(self, w: Word) -> Word:
        """Map a word over original letters onto the alive alphabet."""
        return concat(*(self._expand(abs(x)) if x > 0 else invert(self._expand(abs(x)))
                        for x in w)) if w else EMPTY

    def _letter_index(self):
        return {s: i + 1 for i, s in enumerate(sorted(self.alive))}

    @property
    def presentation(self) -> Presentation:
        """Current presentation in a compact alphabet g1..gk."""
        if self._compact is None:
            idx = self._letter_index()
            names = [f"g{i + 1}" for i in range(len(idx))]
            pres = Presentation(names)
            for r in self.relators:
                pres.relators.append(tuple(idx[x] if x > 0 else -idx[-x] for x in r))
            self._compact = pres
        return self._compact

    def total_length(self) -> int:
        return sum(len(r) for r in self.relators)

    def to_current(self, w: Word) -> Word:
        """Map a word over original letters into the compact alphabet."""
        idx = self._letter_index()
        aw = self.to_alive(w)
        return tuple(idx[x] if x > 0 else -idx[-x] for x in aw)


class BarePresentation(_LetterSpace):
    """Adapter making a plain Presentation Tietze-simplifiable.

    Original letters are the presentation's own generators, so to_current
    maps words over the input alphabet into the simplified one.
    """

    def __init__(self, pres: Presentation):
        self.source = pres
        self.nletters = pres.rank
        self.alive = set(range(1, pres.rank + 1))
        self.elim = {}
        self._expand_memo = {}
        self.relators = list(pres.relators)
        self.budget_exhausted = False
        self._compact = None

    def copy(self) -> "BarePresentation":
        new = object.__new__(BarePresentation)
        new.source = self.source
        new.nletters = self.nletters
        new.alive = set(self.alive)
        new.elim = dict(self.elim)
        new._expand_memo = {}
        new.relators = list(self.relators)
        new.budget_exhausted = self.budget_exhausted
        new._compact = None
        return new


class SubgroupPresentation(_LetterSpace):
    """A finite-index subgroup's presentation plus its rewriting maps.

    Letters are numbered in a fixed 'original' Schreier space; Tietze
    eliminations shrink the alive set and record expansion words, so
    ambient words can always be rewritten into the current alphabet.
    """

    def __init__(self, ambient: Presentation, table: CosetTable):
        self.ambient = ambient
        self.table = table
        self.budget_exhausted = False
        self._build()

    def _build(self):
        table = self.table
        rank = self.ambient.rank
        n = table.index
        # BFS tree edges contribute trivial Schreier generators
        letters = [g + 1 for g in range(rank)] + [-(g + 1) for g in range(rank)]
        seen = [False] * n
        seen[0] = True
        tree = set()
        queue = [0]
        qi = 0
        while qi < len(queue):
            c = queue[qi]
            qi += 1
            for x in letters:
                d = table.rows[c][_col(x)]
                if not seen[d]:
                    seen[d] = True
                    # edge d = c . x; as a (coset, generator) pair:
                    tree.add((c, x) if x > 0 else (d, -x))
                    queue.append(d)
        self._sgen = {}                  # (coset0, gen) -> orig letter id
        k = 0
        for c in range(n):
            for g in range(1, rank + 1):
                if (c, g) not in tree:
                    k += 1
                    self._sgen[(c, g)] = k
        self.nletters = k
        self.alive = set(range(1, k + 1))
        self.elim: dict[int, Word] = {}
        self._expand_memo: dict[int, Word] = {}
        reps = schreier_transversal(table)
        self._gen_word = {}
        for (c, g), s in self._sgen.items():
            d = table.rows[c][_col(g)]
            self._gen_word[s] = concat(reps[c], (g,), invert(reps[d]))
        self.relators = []
        for r in self.ambient.relators:
            for c in range(n):
                w, _ = cyclic_reduce(self._rewrite_from(c, r))
                if w:
                    self.relators.append(w)
        self.raw_relator_count = len(self.ambient.relators) * n
        self._compact = None

    def _rewrite_from(self, c: int, w: Word) -> Word:
        """Rewrite of rep(c) * w * rep(c.w)^-1 in Schreier letters."""
        out = []
        rows = self.table.rows
        for x in w:
            if x > 0:
                s = self._sgen.get((c, x))
                if s is not None:
                    out.append(s)
                c = rows[c][_col(x)]
            else:
                c = rows[c][_col(x)]
                s = self._sgen.get((c, -x))
                if s is not None:
                    out.append(-s)
        return free_reduce(out)

    # -- maps ------------------------------------------------------------

    @property
    def generator_words(self) -> list[Word]:
        """Ambient word for each generator of the compact presentation."""
        return [self.ambient_word_of_letter(s) for s in sorted(self.alive)]

    def ambient_word_of_letter(self, s: int) -> Word:
        return self._gen_word[s]

    def expand_ambient(self, compact_word: Word) -> Word:
        """Map a word in the compact alphabet back to an ambient word."""
        order = sorted(self.alive)
        parts = []
        for x in compact_word:
            w = self._gen_word[order[abs(x) - 1]]
            parts.append(w if x > 0 else invert(w))
        return concat(*parts)

    def rewrite(self, ambient_word: Word) -> Word:
        """Rewrite an ambient word lying in the subgroup into the compact
        alphabet.  Raises ValueError if the word is not in the subgroup."""
        if self.table.trace(ambient_word, 1) != 1:
            raise ValueError("word is not in the subgroup")
        w = self.to_alive(self._rewrite_from(0, ambient_word))
        idx = self._letter_index()
        return tuple(idx[x] if x > 0 else -idx[-x] for x in w)

    def copy(self) -> "SubgroupPresentation":
        new = object.__new__(SubgroupPresentation)
        new.ambient = self.ambient
        new.table = self.table
        new.budget_exhausted = self.budget_exhausted
        new._sgen = self._sgen
        new.nletters = self.nletters
        new.alive = set(self.alive)
        new.elim = dict(self.elim)
        new._expand_memo = {}
        new._gen_word = self._gen_word
        new.relators = list(self.relators)
        new.raw_relator_count = self.raw_relator_count
        new._compact = None
        return new

    def save(self, pres_path, map_path=None):
        """Write the compact presentation in .pres format; the sidecar map
        file lists each generator's ambient word."""
        pres = self.presentation
        with open(pres_path, "w", encoding="utf-8") as f:
            f.write(pres.to_text())
        if map_path:
            with open(map_path, "w", encoding="utf-8") as f:
                for name, w in zip(pres.names, self.generator_words):
                    f.write(f"{name} = {self.ambient.spell(w)}\n")


def reidemeister_schreier(pres: Presentation, table: CosetTable) -> SubgroupPresentation:
    """Schreier generators and rewritten relators of the subgroup that the
    closed coset table describes."""
    if table.pres is not pres and table.pres != pres:
        raise ValueError("table does not belong to this presentation")
    return SubgroupPresentation(pres, table)


# -- Tietze simplification ----------------------------------------------


def _occurrences(relators):
    per_rel = []
    total = {}
    for r in relators:
        cnt = {}
        for x in r:
            a = abs(x)
            cnt[a] = cnt.get(a, 0) + 1
        per_rel.append(cnt)
        for a, c in cnt.items():
            total[a] = total.get(a, 0) + c
    return per_rel, total


def _substitute(relators, letter, repl):
    """Replace letter by repl (and its inverse accordingly) everywhere."""
    inv_repl = invert(repl)
    out = []
    for r in relators:
        if any(abs(x) == letter for x in r):
            parts = []
            for x in r:
                if x == letter:
                    parts.extend(repl)
                elif x == -letter:
                    parts.extend(inv_repl)
                else:
                    parts.append(x)
            r, _ = cyclic_reduce(free_reduce(parts))
        if r:
            out.append(r)
    return out


def _dedup(relators):
    seen = set()
    out = []
    for r in relators:
        key = canonical_cyclic(r)
        if key and key not in seen:
            seen.add(key)
            out.append(r)
    return out


def _eliminate_pass(sp: SubgroupPresentation, budget, deadline, total_cap) -> bool:
    """Eliminate generators occurring exactly once in some relator, greedy
    by total-length growth, skipping eliminations whose projected growth
    would push the total relator length past the cap.  Returns True if
    anything changed."""
    changed = False
    while time.monotonic() < deadline:
        per_rel, total = _occurrences(sp.relators)
        cur_total = sp.total_length()
        best = None
        for i, r in enumerate(sp.relators):
            L = len(r)
            for a, c in per_rel[i].items():
                if c != 1:
                    continue
                if L - 1 > budget.max_relator_length:
                    continue
                o = total[a] - 1
                delta = o * (L - 2) - L
                if cur_total + delta > total_cap:
                    continue
                key = (delta, L, a, i)
                if best is None or key < best:
                    best = key
        if best is None:
            return changed
        _, _, letter, i = best
        r = sp.relators[i]
        pos = next(k for k, x in enumerate(r) if abs(x) == letter)
        # r = A x B = 1  =>  x = A^-1 B^-1 ; for x^-1 use the inverse
        A, B = r[:pos], r[pos + 1:]
        repl = concat(invert(A), invert(B))
        if r[pos] < 0:
            repl = invert(repl)
        rest = sp.relators[:i] + sp.relators[i + 1:]
        sp.relators = _dedup(_substitute(rest, letter, repl))
        sp.elim[letter] = repl
        sp.alive.discard(letter)
        sp._expand_memo = {}
        changed = True
    sp.budget_exhausted = True
    return changed


def _substring_pass(sp: SubgroupPresentation, deadline) -> bool:
    """Replace a cyclic subword longer than half of another relator by the
    shorter complement.  One sweep; returns True if anything changed."""
    changed = False
    relators = sp.relators
    # index: window length -> {window tuple: (owner index, complement word)}
    index: dict[int, dict] = {}
    for si, s in enumerate(relators):
        h = len(s) // 2 + 1
        if h > len(s):
            continue
        for base in (s, invert(s)):
            dbl = base + base
            for k in range(len(base)):
                win = dbl[k:k + h]
                # base = win . v cyclically  =>  win = v^-1 in the group
                v = dbl[k + h:k + len(base)]
                index.setdefault(h, {})[win] = (si, invert(v))
    for ri, r in enumerate(relators):
        if time.monotonic() > deadline:
            break
        dbl = r + r
        done = False
        for h, wins in index.items():
            if h > len(r) or done:
                continue
            for k in range(len(r)):
                hit = wins.get(dbl[k:k + h])
                if hit is None or hit[0] == ri:
                    continue
                si, repl = hit
                if len(repl) >= h:
                    continue
                rot = dbl[k:k + len(r)]
                new = concat(repl, rot[h:])
                new, _ = cyclic_reduce(new)
                if len(new) < len(r):
                    relators[ri] = new
                    changed = True
                    done = True
                    break
            if done:
                break
    if changed:
        sp.relators = _dedup(relators)
    return changed


def tietze_simplify(sp: SubgroupPresentation, budget: TietzeBudget | None = None,
                    inplace: bool = False) -> SubgroupPresentation:
    """Shrink a subgroup presentation with Tietze moves under a budget.

    The result presents an isomorphic group; abelian invariants are
    preserved (the standard oracle, asserted in the test suite).  When the
    budget runs out the best-so-far presentation is returned with
    budget_exhausted set.
    """
    if budget is None:
        budget = TietzeBudget()
    if not inplace:
        sp = sp.copy()
    sp.budget_exhausted = False
    deadline = time.monotonic() + budget.time_limit
    sp.relators = _dedup([cyclic_reduce(r)[0] for r in sp.relators])
    total_cap = budget.total_cap(sp.total_length())
    for _ in range(budget.max_passes):
        changed = _eliminate_pass(sp, budget, deadline, total_cap)
        if time.monotonic() > deadline:
            sp.budget_exhausted = True
            break
        changed |= _substring_pass(sp, deadline)
        if not changed:
            break
        if time.monotonic() > deadline:
            sp.budget_exhausted = True
            break
    else:
        sp.budget_exhausted = True
    sp._compact = None
    return sp


def simplify_presentation(pres: Presentation,
                          budget: TietzeBudget | None = None) -> BarePresentation:
    """Tietze-simplify a plain presentation.  The result's .presentation is
    the simplified form and .to_current maps old-alphabet words into it."""
    return tietze_simplify(BarePresentation(pres), budget, inplace=True)
