"""Todd-Coxeter coset enumeration.

Both classical strategies are provided: HLT (relator-first, with row
filling) and Felsch (definition-first, deduction stack with lookahead
fallback).  Coincidences are handled by a union-find over cosets with an
immediate processing queue.  Closed tables are compacted and standardized
by breadth-first renumbering, so the result is deterministic and unique
for a given (presentation, subgroup generators).

Internally cosets are 0-based; the public trace/contains API is 1-based
with coset 1 = the subgroup, matching the usual convention.
"""

from __future__ import annotations

from dataclasses import dataclass

from .words import Word, Presentation, free_reduce, invert


class LimitExceeded(RuntimeError):
    """Enumeration did not close within the coset limit."""

    def __init__(self, max_cosets):
        super().__init__(f"coset enumeration exceeded {max_cosets} cosets")
        self.max_cosets = max_cosets


@dataclass
class EnumerationLimits:
    max_cosets: int = 10**6
    strategy: str = "hlt"          # "hlt" or "felsch"
    lookahead: bool = True
    deduction_cap: int = 50_000

    def __post_init__(self):
        if self.max_cosets < 1:
            raise ValueError("max_cosets must be >= 1")
        if self.strategy not in ("hlt", "felsch"):
            raise ValueError(f"unknown strategy {self.strategy!r}")


def _col(letter: int) -> int:
    # column layout: 2*(gen-1) for the generator, +1 for its inverse
    return 2 * (abs(letter) - 1) + (0 if letter > 0 else 1)


def _col_word(w: Word) -> tuple[int, ...]:
    return tuple(_col(x) for x in w)


def _inv_col(c: int) -> int:
    return c ^ 1


class CosetTable:
    """A closed, compacted, standardized coset table."""

    def __init__(self, pres: Presentation, subgroup_gens, rows):
        self.pres = pres
        self.subgroup_gens = [free_reduce(g) for g in subgroup_gens]
        self.rows = rows            # list of lists, length 2*rank, 0-based

    @property
    def index(self) -> int:
        return len(self.rows)

    def trace(self, w: Word, start: int = 1) -> int:
        """Coset reached by reading w from `start` (1-based)."""
        c = start - 1
        for x in w:
            c = self.rows[c][_col(x)]
        return c + 1

    def contains(self, w: Word) -> bool:
        return self.trace(w, 1) == 1

    def permutation(self, gen: int) -> tuple[int, ...]:
        """0-based permutation image of generator `gen` (1-based gen index)."""
        col = _col(gen)
        return tuple(row[col] for row in self.rows)

    def permutation_representation(self) -> list[tuple[int, ...]]:
        return [self.permutation(g + 1) for g in range(self.pres.rank)]

    def check(self):
        """Assert the table invariants (consistency, closure, relator laws)."""
        n = self.index
        for c, row in enumerate(self.rows):
            for col, d in enumerate(row):
                assert 0 <= d < n, "entry out of range"
                assert self.rows[d][_inv_col(col)] == c, "inverse inconsistency"
        for g in range(self.pres.rank):
            assert sorted(self.permutation(g + 1)) == list(range(n)), \
                "generator column is not a permutation"
        for r in self.pres.relators:
            for c in range(1, n + 1):
                assert self.trace(r, c) == c, "relator does not trace trivially"
        for s in self.subgroup_gens:
            assert self.trace(s, 1) == 1, "subgroup generator moves coset 1"

    # -- serialization ---------------------------------------------------

    def save(self, path):
        with open(path, "w", encoding="utf-8") as f:
            f.write("fptower-coset-table 1\n")
            f.write(f"pres {self.pres.content_hash()}\n")
            f.write(f"index {self.index}\n")
            for row in self.rows:
                f.write(" ".join(str(d + 1) for d in row) + "\n")

    @classmethod
    def load(cls, path, pres: Presentation, subgroup_gens=()):
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
        if not lines or not lines[0].startswith("fptower-coset-table"):
            raise ValueError(f"{path}: not a coset table file")
        if lines[1].split()[1] != pres.content_hash():
            raise ValueError(f"{path}: presentation hash mismatch")
        n = int(lines[2].split()[1])
        rows = [[int(v) - 1 for v in line.split()] for line in lines[3:3 + n]]
        return cls(pres, subgroup_gens, rows)


class _Enumerator:
    def __init__(self, pres: Presentation, subgroup_gens, limits: EnumerationLimits):
        self.pres = pres
        self.limits = limits
        self.ncols = 2 * pres.rank
        # relators sorted by length ascending, order fixed for determinism
        rels = sorted(pres.relators, key=lambda r: (len(r), r))
        self.relators = [_col_word(r) for r in rels]
        self.subgens = [_col_word(free_reduce(g)) for g in subgroup_gens]
        self.table = [self._new_row()]
        self.p = [0]                # union-find parents
        self.alive = 1
        self.defined = 1
        self.coinc_queue = []
        self.deductions = []
        # deductions are only consumed by the Felsch strategy; skip the
        # bookkeeping under HLT, where the list would grow unboundedly
        self.record_deductions = limits.strategy == "felsch"

    def _new_row(self):
        return [None] * self.ncols

    def rep(self, c):
        r = c
        while self.p[r] != r:
            r = self.p[r]
        while self.p[c] != r:
            self.p[c], c = r, self.p[c]
        return r

    def define(self, c, col):
        if self.defined >= self.limits.max_cosets:
            raise LimitExceeded(self.limits.max_cosets)
        d = len(self.table)
        self.table.append(self._new_row())
        self.p.append(d)
        self.defined += 1
        self.alive += 1
        self.table[c][col] = d
        self.table[d][_inv_col(col)] = c
        if self.record_deductions:
            self.deductions.append((c, col))
        return d

    def merge(self, a, b):
        a, b = self.rep(a), self.rep(b)
        if a != b:
            lo, hi = (a, b) if a < b else (b, a)
            self.p[hi] = lo
            self.alive -= 1
            self.coinc_queue.append(hi)

    def coincidence(self, a, b):
        self.merge(a, b)
        q = self.coinc_queue
        i = 0
        while i < len(q):
            gamma = q[i]
            i += 1
            row = self.table[gamma]
            for col in range(self.ncols):
                delta = row[col]
                if delta is None:
                    continue
                self.table[delta][_inv_col(col)] = None
                mu, nu = self.rep(gamma), self.rep(delta)
                t = self.table[mu][col]
                if t is not None:
                    self.merge(nu, t)
                else:
                    t = self.table[nu][_inv_col(col)]
                    if t is not None:
                        self.merge(mu, t)
                    else:
                        self.table[mu][col] = nu
                        self.table[nu][_inv_col(col)] = mu
                        if self.record_deductions:
                            self.deductions.append((mu, col))
        q.clear()

    def scan(self, alpha, w, fill):
        """Scan relator/subgroup word w from coset alpha.

        With fill=True, gaps are closed by defining new cosets (HLT); with
        fill=False the scan only records a deduction or coincidence when
        the gap shrinks to one (Felsch / lookahead).
        """
        f, i = alpha, 0
        b, j = alpha, len(w) - 1
        while True:
            while i <= j:
                t = self.table[f][w[i]]
                if t is None:
                    break
                f = t
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i:
                t = self.table[b][_inv_col(w[j])]
                if t is None:
                    break
                b = t
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if j == i:
                self.table[f][w[i]] = b
                self.table[b][_inv_col(w[i])] = f
                if self.record_deductions:
                    self.deductions.append((f, w[i]))
                return
            if not fill:
                return
            self.define(f, w[i])

    def is_alive(self, c):
        return self.p[c] == c

    # -- strategies ------------------------------------------------------

    def run_hlt(self):
        for s in self.subgens:
            self.scan(0, s, fill=True)
        c = 0
        lookaheads = 0
        while c < len(self.table):
            if self.is_alive(c):
                try:
                    self._hlt_row(c)
                except LimitExceeded:
                    # Lookahead: sweep all relators over all live cosets
                    # without defining, processing only coincidences.  When
                    # that collapses a meaningful part of the table, compact
                    # it and rescan from the top; otherwise give up.  This
                    # rescues presentations whose cosets are defined much
                    # faster than relator scans can identify them.
                    if not self.limits.lookahead or lookaheads >= 12:
                        raise
                    lookaheads += 1
                    before = self.alive
                    self._lookahead()
                    if self.alive > 0.8 * before:
                        raise
                    self._compact_live()
                    c = 0
                    continue
            c += 1

    def _hlt_row(self, c):
        for r in self.relators:
            self.scan(c, r, fill=True)
            if not self.is_alive(c):
                return
        for col in range(self.ncols):
            if self.table[c][col] is None:
                self.define(c, col)

    def _compact_live(self):
        """Renumber live cosets 0..alive-1 in place, dropping dead rows.

        Resets the definition budget to the live count, so the enumeration
        limit bounds live table size rather than lifetime definitions.
        Coset 0 is preserved (union-find always keeps the lower number).
        """
        live = [c for c in range(len(self.table)) if self.is_alive(c)]
        remap = {c: i for i, c in enumerate(live)}
        self.table = [[None if d is None else remap[self.rep(d)]
                       for d in self.table[c]] for c in live]
        self.p = list(range(len(live)))
        self.alive = self.defined = len(live)
        self.deductions.clear()
        self.coinc_queue.clear()

    def run_felsch(self):
        # relator rotations grouped by leading column, for deduction scans
        by_col = [[] for _ in range(self.ncols)]
        for r in self.relators:
            seen = set()
            for w in (r, tuple(_inv_col(x) for x in reversed(r))):
                for k in range(len(w)):
                    rot = w[k:] + w[:k]
                    if rot not in seen:
                        seen.add(rot)
                        by_col[rot[0]].append(rot)
        for s in self.subgens:
            self.scan(0, s, fill=True)
            self._process_deductions(by_col)
        c = 0
        while c < len(self.table):
            if self.is_alive(c):
                col = 0
                while col < self.ncols:
                    if not self.is_alive(c):
                        break
                    if self.table[c][col] is None:
                        self.define(c, col)
                        self._process_deductions(by_col)
                    col += 1
            c += 1

    def _process_deductions(self, by_col):
        while self.deductions:
            if len(self.deductions) > self.limits.deduction_cap and self.limits.lookahead:
                self.deductions.clear()
                self._lookahead()
                continue
            c, col = self.deductions.pop()
            if not self.is_alive(c):
                continue
            d = self.table[c][col]
            if d is None:
                continue
            for rot in by_col[col]:
                self.scan(c, rot, fill=False)
                if not self.is_alive(c):
                    break

    def _lookahead(self):
        for c in range(len(self.table)):
            if self.is_alive(c):
                for r in self.relators:
                    self.scan(c, r, fill=False)
                    if not self.is_alive(c):
                        break

    # -- finishing -------------------------------------------------------

    def closed(self):
        for c in range(len(self.table)):
            if self.is_alive(c) and any(e is None for e in self.table[c]):
                return False
        return True

    def compacted_rows(self):
        live = [c for c in range(len(self.table)) if self.is_alive(c)]
        remap = {c: i for i, c in enumerate(live)}
        return [[remap[self.rep(self.table[c][col])] for col in range(self.ncols)]
                for c in live]


def _standardize(rows, ncols):
    """BFS renumbering from coset 0, scanning positive letter columns in
    declared generator order first, then the negative columns."""
    n = len(rows)
    order = list(range(0, ncols, 2)) + list(range(1, ncols, 2))
    new = [None] * n
    new[0] = 0
    queue = [0]
    count = 1
    qi = 0
    while qi < len(queue):
        c = queue[qi]
        qi += 1
        for col in order:
            d = rows[c][col]
            if new[d] is None:
                new[d] = count
                count += 1
                queue.append(d)
    out = [[0] * ncols for _ in range(n)]
    for c in range(n):
        for col in range(ncols):
            out[new[c]][col] = new[rows[c][col]]
    return out


def todd_coxeter(pres: Presentation, subgroup_gens=(),
                 limits: EnumerationLimits | None = None) -> CosetTable:
    """Enumerate the cosets of <subgroup_gens> in the presented group.

    Returns a closed, compacted, standardized CosetTable whose row count
    is the subgroup index.  Raises LimitExceeded when the table does not
    close within limits.max_cosets (in particular, always, for an
    infinite-index subgroup).
    """
    if limits is None:
        limits = EnumerationLimits()
    e = _Enumerator(pres, subgroup_gens, limits)
    if limits.strategy == "felsch":
        e.run_felsch()
    else:
        e.run_hlt()
    if not e.closed():
        raise LimitExceeded(limits.max_cosets)
    rows = _standardize(e.compacted_rows(), e.ncols)
    return CosetTable(pres, subgroup_gens, rows)


def quotient_order(pres: Presentation, max_cosets: int = 10**6) -> int:
    """Order of the presented group, via enumeration over the trivial
    subgroup.  Raises LimitExceeded if it cannot be established."""
    limits = EnumerationLimits(max_cosets=max_cosets)
    return todd_coxeter(pres, (), limits).index
