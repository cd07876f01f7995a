"""Finite-quotient fingerprints: exact hom/epi counts to small groups.

A fingerprint is the vector of (homomorphism count, epimorphism count)
from a presented group to a battery of finite permutation groups.  It is
an isomorphism invariant; agreement over the battery is evidence of
isomorphism, never a proof, and is always labeled as such.

The default battery is a curated, discriminating set of small groups
(cyclic and elementary abelian probes, the nonabelian groups through
order 24 that separate the triangle-type quotients, plus A5, S5 and
PSL(2,7)); it is configurable wherever a fingerprint is taken.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product


def _pmul(a, b):
    return tuple(b[x] for x in a)


def _pinv(a):
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def _identity(n):
    return tuple(range(n))


def mulclose(gens):
    """Closure of a set of permutations under multiplication (BFS)."""
    if not gens:
        return set()
    n = len(gens[0])
    elems = {_identity(n)}
    frontier = [_identity(n)]
    while frontier:
        nxt = []
        for e in frontier:
            for g in gens:
                h = _pmul(e, g)
                if h not in elems:
                    elems.add(h)
                    nxt.append(h)
        frontier = nxt
    return elems


def perm_order(p):
    q, n = p, 1
    ident = _identity(len(p))
    while q != ident:
        q = _pmul(q, p)
        n += 1
    return n


def _cycles(*cycs, n):
    p = list(range(n))
    for cyc in cycs:
        for i, x in enumerate(cyc):
            p[x] = cyc[(i + 1) % len(cyc)]
    return tuple(p)


@dataclass(frozen=True)
class ProbeGroup:
    name: str
    order: int
    generators: tuple

    def elements(self):
        elems = mulclose(list(self.generators))
        if len(elems) != self.order:
            raise ValueError(f"probe {self.name}: got order {len(elems)}, "
                             f"expected {self.order}")
        return elems


def _cyclic(n):
    return ProbeGroup(f"C{n}", n, (_cycles(tuple(range(n)), n=n),))


def _psl27_generators():
    # action on the projective line over F7; point 7 is infinity
    a = list(range(8))
    for z in range(7):
        a[z] = (z + 1) % 7
    b = list(range(8))
    b[7] = 0
    b[0] = 7
    for z in range(1, 7):
        b[z] = (-pow(z, 5, 7)) % 7       # -1/z mod 7
    return (tuple(a), tuple(b))


def default_battery() -> list[ProbeGroup]:
    V4 = ProbeGroup("C2xC2", 4, (_cycles((0, 1), n=4), _cycles((2, 3), n=4)))
    C3C3 = ProbeGroup("C3xC3", 9, (_cycles((0, 1, 2), n=6), _cycles((3, 4, 5), n=6)))
    S3 = ProbeGroup("S3", 6, (_cycles((0, 1), n=3), _cycles((0, 1, 2), n=3)))
    D4 = ProbeGroup("D4", 8, (_cycles((0, 1, 2, 3), n=4), _cycles((1, 3), n=4)))
    Q8 = ProbeGroup("Q8", 8, (_cycles((0, 1, 2, 3), (4, 5, 6, 7), n=8),
                              _cycles((0, 4, 2, 6), (1, 7, 3, 5), n=8)))
    A4 = ProbeGroup("A4", 12, (_cycles((0, 1, 2), n=4), _cycles((0, 1), (2, 3), n=4)))
    D6 = ProbeGroup("D6", 12, (_cycles((0, 1, 2, 3, 4, 5), n=6), _cycles((1, 5), (2, 4), n=6)))
    S4 = ProbeGroup("S4", 24, (_cycles((0, 1), n=4), _cycles((0, 1, 2, 3), n=4)))
    # (C3xC3):C2 with the involution inverting both factors
    C3wr = ProbeGroup("(C3xC3):C2", 18, (_cycles((0, 1, 2), n=6), _cycles((3, 4, 5), n=6),
                                         _cycles((1, 2), (4, 5), n=6)))
    # C7:C3, Frobenius group of order 21
    F21 = ProbeGroup("C7:C3", 21, (_cycles((0, 1, 2, 3, 4, 5, 6), n=7),
                                   _cycles((1, 2, 4), (3, 6, 5), n=7)))
    # SL(2,3) acting on the 8 nonzero vectors of F3^2
    vecs = [(x, y) for x in range(3) for y in range(3) if (x, y) != (0, 0)]
    idx = {v: i for i, v in enumerate(vecs)}

    def matperm(m):
        return tuple(idx[((m[0][0] * x + m[0][1] * y) % 3,
                          (m[1][0] * x + m[1][1] * y) % 3)] for x, y in vecs)

    SL23 = ProbeGroup("SL(2,3)", 24, (matperm([[1, 1], [0, 1]]),
                                      matperm([[0, -1], [1, 0]])))
    A5 = ProbeGroup("A5", 60, (_cycles((0, 1, 2), n=5), _cycles((0, 1, 2, 3, 4), n=5)))
    S5 = ProbeGroup("S5", 120, (_cycles((0, 1), n=5), _cycles((0, 1, 2, 3, 4), n=5)))
    PSL27 = ProbeGroup("PSL(2,7)", 168, _psl27_generators())
    return [
        _cyclic(2), _cyclic(3), _cyclic(4), V4, _cyclic(5), _cyclic(6), S3,
        _cyclic(7), _cyclic(8), D4, Q8, _cyclic(9), C3C3, A4, D6, C3wr,
        F21, SL23, S4, A5, S5, PSL27,
    ]


def count_homomorphisms(pres, probe: ProbeGroup) -> tuple[int, int]:
    """Exact (hom count, epi count) from the presented group to the probe.

    Backtracking over generator images; a relator is checked as soon as
    all its generators are assigned.  Generators constrained by a pure
    power relator g^n only range over elements with x^n = identity.
    """
    elems = sorted(probe.elements())
    n = len(elems[0]) if elems else 0
    ident = _identity(n)
    rank = pres.rank
    # power constraints from relators that use a single generator
    exps = [0] * (rank + 1)
    for r in pres.relators:
        gens_used = {abs(x) for x in r}
        if len(gens_used) == 1:
            g = gens_used.pop()
            e = abs(sum(1 if x > 0 else -1 for x in r))
            if e == 0:
                e = len(r)  # e.g. a commutator-like power word; harmless bound
            from math import gcd
            exps[g] = gcd(exps[g], e)
    candidates = []
    pows = {}
    for g in range(1, rank + 1):
        if exps[g]:
            cand = [e for e in elems if _ppow(e, exps[g], ident) == ident]
        else:
            cand = elems
        candidates.append(cand)
    # schedule each relator at the point its last generator gets assigned
    schedule = [[] for _ in range(rank + 1)]
    for r in pres.relators:
        last = max((abs(x) for x in r), default=0)
        schedule[last].append(r)
    inv_cache = {}

    def ev(word, images):
        acc = ident
        for x in word:
            p = images[abs(x) - 1]
            if x < 0:
                p = inv_cache.setdefault(p, _pinv(p))
            acc = _pmul(acc, p)
        return acc

    homs = 0
    epis = 0
    closure_cache = {}
    images = [None] * rank

    def assign(g):
        nonlocal homs, epis
        if g > rank:
            homs += 1
            key = frozenset(images)
            size = closure_cache.get(key)
            if size is None:
                size = len(mulclose(images))
                closure_cache[key] = size
            if size == probe.order:
                epis += 1
            return
        for e in candidates[g - 1]:
            images[g - 1] = e
            if all(ev(r, images) == ident for r in schedule[g]):
                assign(g + 1)
        images[g - 1] = None

    for r in schedule[0]:
        if ev(r, images) != ident:      # relator over no generators: empty
            return (0, 0)
    assign(1)
    return homs, epis


def _ppow(p, n, ident):
    acc = ident
    for _ in range(n):
        acc = _pmul(acc, p)
    return acc


@dataclass
class FingerprintReport:
    """Hom/epi counts per probe, keyed by probe name."""
    counts: dict

    def agrees_with(self, other: "FingerprintReport") -> bool:
        return self.counts == other.counts

    def rows(self):
        return [(name, h, e) for name, (h, e) in self.counts.items()]


def fingerprint(pres, probes=None) -> FingerprintReport:
    if probes is None:
        probes = default_battery()
    counts = {}
    for probe in probes:
        h, e = count_homomorphisms(pres, probe)
        if e > h:
            raise AssertionError("epi count exceeds hom count")
        counts[probe.name] = (h, e)
    return FingerprintReport(counts)
