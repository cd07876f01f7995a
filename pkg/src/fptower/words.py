"""Words over a signed generator alphabet, and group presentations.

A letter is a nonzero int: +(i+1) for generator i, -(i+1) for its inverse.
Words are tuples of letters, always kept freely reduced.  Names live only
in the Presentation's symbol table; all hot loops work on ints.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field

Word = tuple[int, ...]

EMPTY: Word = ()


class WordError(ValueError):
    pass


class ParseError(WordError):
    def __init__(self, message, pos=None):
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)
        self.pos = pos


def free_reduce(letters) -> Word:
    """Freely reduce a raw signed sequence (cancel adjacent g, g^-1 pairs)."""
    out = []
    for x in letters:
        if x == 0:
            raise WordError("letter 0 is not a generator reference")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


def concat(*ws: Word) -> Word:
    raw = []
    for w in ws:
        raw.extend(w)
    return free_reduce(raw)


def conjugate(x: Word, g: Word) -> Word:
    """g^-1 * x * g, freely reduced."""
    return concat(invert(g), x, g)


def commutator(x: Word, y: Word) -> Word:
    """x^-1 * y^-1 * x * y, freely reduced."""
    return concat(invert(x), invert(y), x, y)


def power(w: Word, n: int) -> Word:
    if n < 0:
        w, n = invert(w), -n
    return concat(*([w] * n))


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Cyclically reduce a freely reduced word.

    Returns (core, conjugator) with w = conjugator^-1 * core * conjugator.
    """
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return w[i:j], w[j:]


def cyclic_rotations(w: Word):
    for i in range(len(w)):
        yield w[i:] + w[:i]


def canonical_cyclic(w: Word) -> Word:
    """Least rotation of w or of w^-1; canonical form for relator dedup."""
    cands = list(cyclic_rotations(w)) + list(cyclic_rotations(invert(w)))
    return min(cands) if cands else w


@dataclass(frozen=True)
class GeneratorSymbol:
    id: int
    name: str


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")


class Presentation:
    """A finite group presentation: generator symbols plus relator words.

    Relators are freely and cyclically reduced at construction; the
    discarded conjugator does not change the normal closure.
    """

    def __init__(self, names, relators=(), reduce_relators=True):
        names = list(names)
        if len(set(names)) != len(names):
            raise WordError(f"duplicate generator names in {names}")
        self.generators = [GeneratorSymbol(i, n) for i, n in enumerate(names)]
        self.names = names
        rels = []
        for r in relators:
            w = free_reduce(r)
            if reduce_relators:
                w, _ = cyclic_reduce(w)
            self._check_word(w)
            if w:
                rels.append(w)
        self.relators: list[Word] = rels

    @property
    def rank(self) -> int:
        return len(self.names)

    def _check_word(self, w: Word):
        for x in w:
            if not 1 <= abs(x) <= len(self.names):
                raise WordError(f"letter {x} references an undeclared generator")

    def word(self, text: str) -> Word:
        """Parse a word expression over this presentation's alphabet."""
        return _WordParser(text, self.names).parse_word()

    def spell(self, w: Word) -> str:
        """Render a word in the grammar accepted by word()/parse."""
        if not w:
            return "1"
        parts = []
        i = 0
        while i < len(w):
            j = i
            while j < len(w) and w[j] == w[i]:
                j += 1
            name = self.names[abs(w[i]) - 1]
            exp = (j - i) if w[i] > 0 else -(j - i)
            parts.append(name if exp == 1 else f"{name}^{exp}")
            i = j
        return "*".join(parts)

    def __repr__(self):
        rels = ", ".join(self.spell(r) for r in self.relators)
        return f"<{', '.join(self.names)} | {rels}>"

    def __eq__(self, other):
        return (isinstance(other, Presentation)
                and self.names == other.names
                and self.relators == other.relators)

    def __hash__(self):
        return hash((tuple(self.names), tuple(self.relators)))

    def content_hash(self) -> str:
        text = "|".join([" ".join(self.names)]
                        + [",".join(map(str, r)) for r in self.relators])
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def to_text(self) -> str:
        lines = ["gens: " + " ".join(self.names)]
        lines += ["rel: " + self.spell(r) for r in self.relators]
        return "\n".join(lines) + "\n"


class _WordParser:
    """Recursive-descent parser for word expressions.

    Grammar:  expr  := term ('*' term)*
              term  := atom ('^' exponent)*
              atom  := NAME | '(' expr ',' expr ')' | '(' expr ')' | '1'
              exponent := signed integer (power) | atom (conjugation)
    """

    def __init__(self, text, names):
        self.text = text
        self.pos = 0
        self.index = {n: i + 1 for i, n in enumerate(names)}

    def error(self, msg):
        raise ParseError(msg, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def parse_word(self) -> Word:
        w = self.parse_expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return w

    def parse_expr(self) -> Word:
        w = list(self.parse_term())
        while self.peek() == "*":
            self.pos += 1
            w.extend(self.parse_term())
        return free_reduce(w)

    def parse_term(self) -> Word:
        w = self.parse_atom()
        while self.peek() == "^":
            self.pos += 1
            c = self.peek()
            if c == "-" or c.isdigit():
                w = power(w, self.parse_int())
            else:
                w = conjugate(w, self.parse_atom())
        return w

    def parse_atom(self) -> Word:
        c = self.peek()
        if c == "(":
            self.pos += 1
            a = self.parse_expr()
            if self.peek() == ",":
                self.pos += 1
                b = self.parse_expr()
                self.expect(")")
                return commutator(a, b)
            self.expect(")")
            return a
        if c == "1":
            self.pos += 1
            return EMPTY
        m = _NAME_RE.match(self.text, self.pos)
        if not m:
            self.error("expected a generator name")
        name = m.group(0)
        if name not in self.index:
            self.error(f"undeclared generator {name!r}")
        self.pos = m.end()
        return (self.index[name],)

    def parse_int(self) -> int:
        self.skip_ws()
        m = re.match(r"-?\d+", self.text[self.pos:])
        if not m:
            self.error("expected an integer exponent")
        self.pos += len(m.group(0))
        return int(m.group(0))


def parse_presentation(text: str) -> Presentation:
    """Parse either angle-bracket form '<u,w | u^3, ...>' or .pres file text.

    The .pres format: a 'gens: u w' line, then 'rel: <expr>' lines;
    '#' starts a comment.
    """
    stripped = text.strip()
    if stripped.startswith("<") or stripped.startswith("⟨"):
        return _parse_angle(stripped)
    return _parse_pres_file(text)


def _parse_angle(text: str) -> Presentation:
    open_br = text[0]
    close_br = "⟩" if open_br == "⟨" else ">"
    if not text.endswith(close_br):
        raise ParseError(f"missing closing {close_br!r}")
    body = text[1:-1]
    if "|" in body:
        gen_part, rel_part = body.split("|", 1)
    else:
        gen_part, rel_part = body, ""
    names = [g.strip() for g in gen_part.split(",") if g.strip()]
    if not names:
        raise ParseError("no generators declared")
    for n in names:
        if not _NAME_RE.fullmatch(n):
            raise ParseError(f"bad generator name {n!r}")
    pres = Presentation(names)
    for chunk in _split_relators(rel_part):
        pres.relators.append(cyclic_reduce(pres.word(chunk))[0])
    pres.relators = [r for r in pres.relators if r]
    return pres


def _split_relators(text: str):
    # split on commas at paren depth 0 only ('(x,y)' commutators stay whole)
    depth, start = 0, 0
    for i, c in enumerate(text):
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        elif c == "," and depth == 0:
            chunk = text[start:i].strip()
            if chunk:
                yield chunk
            start = i + 1
    chunk = text[start:].strip()
    if chunk:
        yield chunk


def _parse_pres_file(text: str) -> Presentation:
    names = None
    rel_texts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("gens:"):
            if names is not None:
                raise ParseError(f"line {lineno}: duplicate gens: line")
            names = line[len("gens:"):].split()
        elif line.startswith("rel:"):
            rel_texts.append((lineno, line[len("rel:"):].strip()))
        else:
            raise ParseError(f"line {lineno}: expected 'gens:' or 'rel:'")
    if names is None:
        raise ParseError("missing 'gens:' line")
    pres = Presentation(names)
    for lineno, rt in rel_texts:
        try:
            pres.relators.append(cyclic_reduce(pres.word(rt))[0])
        except ParseError as e:
            raise ParseError(f"line {lineno}: {e}") from e
    pres.relators = [r for r in pres.relators if r]
    return pres


def load_presentation(path) -> Presentation:
    with open(path, encoding="utf-8") as f:
        return parse_presentation(f.read())
