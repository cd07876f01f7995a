"""Exact crystallographic model of the Euclidean (3,3,3) triangle group.

Elements are affine isometries z -> w^k z + t of the Eisenstein plane,
with w a primitive cube root of unity and t in Z[w]; all arithmetic is on
integer pairs (a, b) representing a + b*w, so relator checks never round.

The canonical model sends the two standard generators to rotations about
0 and about the lattice point 1 - w (both of order 3); together they
generate the full group.
"""

from __future__ import annotations

from dataclasses import dataclass

from .intmat import lattice_index, exponent_matrix, mod_p_rank, smith_normal_form


@dataclass(frozen=True)
class EisensteinInt:
    """a + b*w with w^2 = -1 - w."""
    a: int
    b: int

    def __add__(self, other):
        return EisensteinInt(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        return EisensteinInt(self.a - other.a, self.b - other.b)

    def __neg__(self):
        return EisensteinInt(-self.a, -self.b)

    def __mul__(self, other):
        if isinstance(other, int):
            return EisensteinInt(self.a * other, self.b * other)
        a, b, c, d = self.a, self.b, other.a, other.b
        # (a + bw)(c + dw) = ac + (ad + bc)w + bd w^2,  w^2 = -1 - w
        return EisensteinInt(a * c - b * d, a * d + b * c - b * d)

    def mul_omega_pow(self, k: int) -> "EisensteinInt":
        k %= 3
        a, b = self.a, self.b
        if k == 0:
            return self
        if k == 1:                       # w(a + bw) = -b + (a - b)w
            return EisensteinInt(-b, a - b)
        return EisensteinInt(b - a, -a)  # w^2(a + bw) = (b - a) - a w

    def norm(self) -> int:
        return self.a * self.a - self.a * self.b + self.b * self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __repr__(self):
        return f"({self.a}{self.b:+d}w)"


E_ZERO = EisensteinInt(0, 0)
E_ONE = EisensteinInt(1, 0)


@dataclass(frozen=True)
class AffineIsometry:
    """z -> w^k z + t; composition applies the right factor first."""
    t: EisensteinInt
    k: int

    def __post_init__(self):
        object.__setattr__(self, "k", self.k % 3)

    def __mul__(self, other: "AffineIsometry") -> "AffineIsometry":
        return AffineIsometry(self.t + other.t.mul_omega_pow(self.k),
                              self.k + other.k)

    def inverse(self) -> "AffineIsometry":
        return AffineIsometry(-self.t.mul_omega_pow(-self.k), -self.k)

    def is_identity(self) -> bool:
        return self.k == 0 and self.t.is_zero()

    def order(self):
        """1, 3, or None for infinite (a nonzero translation)."""
        if self.is_identity():
            return 1
        return 3 if self.k else None


IDENTITY = AffineIsometry(E_ZERO, 0)

# canonical generator images for T = <x, y | x^3, y^3, (xy)^3>
CANONICAL_X = AffineIsometry(E_ZERO, 1)
CANONICAL_Y = AffineIsometry(EisensteinInt(1, -1), 1)


def evaluate(word, images) -> AffineIsometry:
    """Evaluate a signed-letter word at generator images, left to right."""
    acc = IDENTITY
    for x in word:
        g = images[abs(x) - 1]
        acc = acc * (g if x > 0 else g.inverse())
    return acc


def _div_lattice_gen(t: EisensteinInt):
    """Exact quotient t / (1 - w), or None when t is not in (1-w)Z[w].

    (1-w)(1-w^2) = 3, so t/(1-w) = t*(1-w^2)/3.
    """
    u = t * EisensteinInt(2, 1)          # 1 - w^2 = 2 + w
    if u.a % 3 or u.b % 3:
        return None
    return EisensteinInt(u.a // 3, u.b // 3)


def in_triangle_group(g: AffineIsometry) -> bool:
    """Membership in the canonical copy T = <(0,1), (1-w,1)>.

    T's translation lattice is (1-w)Z[w]; an isometry lies in T exactly
    when its translation part is in that lattice.
    """
    return _div_lattice_gen(g.t) is not None


def surjectivity_check(images) -> bool:
    """Do the images generate the whole canonical triangle group T?

    True iff some image is a proper rotation, every image lies in T, and
    the kernel of the rotation-exponent map -- generated by the Schreier
    elements of the images over a rotation transversal, closed under
    multiplication by w automatically -- equals T's full translation
    lattice (determinant +-1 in lattice coordinates, via Smith form).
    """
    pivot = next((g for g in images if g.k), None)
    if pivot is None:
        return False
    inv_k = 1 if pivot.k == 1 else 2     # inverse of k mod 3
    transversal = [IDENTITY, pivot, pivot * pivot]
    vectors = []
    for g in images:
        if not in_triangle_group(g):
            return False
        for rep in transversal:
            lead = rep * g
            j = (lead.k * inv_k) % 3
            s = lead * transversal[j].inverse()
            assert s.k == 0
            if not s.t.is_zero():
                q = _div_lattice_gen(s.t)
                vectors.append((q.a, q.b))
    return lattice_index(vectors, 2) == 1


def _integer_nullspace(rows, ncols):
    """Basis of the integer nullspace of the matrix given by rows."""
    from .intmat import IntMatrix
    if not rows:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    M = IntMatrix.from_rows(rows)
    snf = smith_normal_form(M, transforms=True)
    V = snf.V.to_dense()
    return [[V[i][j] for i in range(ncols)] for j in range(snf.rank, ncols)]


def _translation_coefficients(word, rotations):
    """Coefficient of each generator's translation in the word's image.

    With generator g mapped to (t_g, k_g), the image translation of a word
    is an exact Z[w]-linear form in the t_g; this returns its coefficients.
    """
    coeffs = [E_ZERO for _ in rotations]
    prefix = 0
    for x in word:
        g = abs(x) - 1
        if x > 0:
            coeffs[g] = coeffs[g] + E_ONE.mul_omega_pow(prefix)
            prefix = (prefix + rotations[g]) % 3
        else:
            prefix = (prefix - rotations[g]) % 3
            coeffs[g] = coeffs[g] - E_ONE.mul_omega_pow(prefix)
    return coeffs


def find_epi_to_triangle(pres, max_combo: int = 3, order3_only: bool = True,
                         allow_translations_fallback: bool = True):
    """Search for a certified epimorphism onto the triangle group.

    Returns a list of AffineIsometry images (one per generator) with every
    relator composing exactly to the identity and surjectivity certified,
    or None (inconclusive; NOT a proof of non-existence).

    The search fixes a rotation-exponent vector from the mod-3 nullspace
    of the relator exponent matrix, solves the exact Z[w]-linear relator
    constraints for the rotation centers, and enumerates small integer
    combinations of the solution lattice by increasing size, checking
    surjectivity on each candidate.  With order3_only, generators with
    rotation exponent 0 are pinned to the identity so every image has
    order 1 or 3; the fallback pass lifts that restriction.
    """
    if order3_only:
        for images in _epi_candidates(pres, max_combo, order3_only=True):
            return images
    if allow_translations_fallback or not order3_only:
        for images in _epi_candidates(pres, max_combo, order3_only=False):
            return images
    return None


def all_epis_to_triangle(pres, max_combo: int = 3, limit: int = 16):
    """First few certified epimorphisms, deterministically ordered."""
    out = []
    for images in _epi_candidates(pres, max_combo, order3_only=True):
        out.append(images)
        if len(out) >= limit:
            return out
    for images in _epi_candidates(pres, max_combo, order3_only=False):
        if images not in out:
            out.append(images)
        if len(out) >= limit:
            break
    return out


def _epi_candidates(pres, max_combo, order3_only):
    E = exponent_matrix(pres)
    r = pres.rank
    if r - mod_p_rank(E, 3) < 2:
        return                     # mod-3 abelianization too small to cover T
    rot_vectors = []
    for code in range(3 ** r):
        v = [(code // 3 ** i) % 3 for i in range(r)]
        if all(x == 0 for x in v):
            continue
        if all(sum(row.get(j, 0) * v[j] for j in row) % 3 == 0 for row in E.rows):
            rot_vectors.append(v)
    for rot in rot_vectors:
        # relator translation parts are Z[w]-linear in the centers: solve
        rows = []
        for rel in pres.relators:
            coeffs = _translation_coefficients(rel, rot)
            real = []
            imag = []
            for c in coeffs:
                real += [c.a, -c.b]        # (a+bw)(x+yw): real part ax - by
                imag += [c.b, c.a - c.b]   # and w-part bx + (a-b)y
            rows.append(real)
            rows.append(imag)
        if order3_only:
            for g in range(r):
                if rot[g] == 0:
                    pin = [0] * (2 * r)
                    pin[2 * g] = 1
                    rows.append(pin)
                    pin2 = [0] * (2 * r)
                    pin2[2 * g + 1] = 1
                    rows.append(pin2)
        basis = _integer_nullspace(rows, 2 * r)
        if not basis:
            continue
        for coeffs in _small_combos(len(basis), max_combo):
            t = [sum(c * b[i] for c, b in zip(coeffs, basis))
                 for i in range(2 * r)]
            images = [AffineIsometry(EisensteinInt(t[2 * g], t[2 * g + 1]), rot[g])
                      for g in range(r)]
            if any(not evaluate(rel, images).is_identity() for rel in pres.relators):
                continue           # guards against any arithmetic slip
            if surjectivity_check(images):
                yield images


def _small_combos(dim, bound):
    """All nonzero integer vectors in [-bound, bound]^dim, by max-norm."""
    for radius in range(1, bound + 1):
        for code in range((2 * radius + 1) ** dim):
            v = []
            c = code
            for _ in range(dim):
                v.append(c % (2 * radius + 1) - radius)
                c //= 2 * radius + 1
            if max((abs(x) for x in v), default=0) == radius:
                yield v
