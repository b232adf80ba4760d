"""Finite groups, functions on them, and abelian character tables.

Elements are integer indices 0..order-1 with the identity pinned at index 0.
Groups are built from a small set of constructors (cyclic, direct products,
dihedral, symmetric, explicit Cayley tables) and validated on construction.
"""
from __future__ import annotations

import itertools

import numpy as np

__all__ = [
    "FiniteGroup",
    "GroupFunction",
    "CharacterTable",
    "cyclic",
    "direct_product",
    "dihedral",
    "symmetric",
    "from_table",
    "build_group",
    "character_table",
    "fourier_coefficients",
    "fourier_inverse",
]


class GroupError(ValueError):
    """Malformed group data or an unsupported construction."""


class FiniteGroup:
    """A finite group given by its Cayley table on indices 0..order-1.

    The identity is always index 0.  The table is validated exhaustively
    (closure, associativity via a sampled/exhaustive check, two-sided
    identity, inverses) when the group is constructed.
    """

    def __init__(self, mul, name="group", structure=None, validate=True):
        mul = np.asarray(mul, dtype=np.int64)
        if mul.ndim != 2 or mul.shape[0] != mul.shape[1]:
            raise GroupError("Cayley table must be square")
        self.order = mul.shape[0]
        self.mul = mul
        self.name = name
        self.identity = 0
        # constructor metadata, e.g. ("cyclic", 4) -- used for canonical
        # character enumeration on products
        self.structure = structure
        self.inv = np.empty(self.order, dtype=np.int64)
        if validate:
            self._validate()

    def _validate(self):
        n = self.order
        if n < 1:
            raise GroupError("group order must be >= 1")
        if self.mul.min() < 0 or self.mul.max() >= n:
            raise GroupError("Cayley table entries out of range")
        if not (np.all(self.mul[0] == np.arange(n)) and np.all(self.mul[:, 0] == np.arange(n))):
            raise GroupError("index 0 is not a two-sided identity")
        # inverses: each row must hit the identity exactly once
        for g in range(n):
            hits = np.flatnonzero(self.mul[g] == 0)
            if hits.size != 1:
                raise GroupError(f"element {g} has no unique inverse")
            self.inv[g] = hits[0]
        if np.any(self.mul[self.inv, np.arange(n)] != 0):
            raise GroupError("left and right inverses disagree")
        # associativity: exhaustive up to order 24, sampled above
        if n <= 24:
            triples = itertools.product(range(n), repeat=3)
        else:
            rng = np.random.default_rng(0)
            triples = rng.integers(0, n, size=(2000, 3))
        for g, h, k in triples:
            if self.mul[self.mul[g, h], k] != self.mul[g, self.mul[h, k]]:
                raise GroupError(f"associativity fails at ({g},{h},{k})")

    def op(self, g, h):
        return int(self.mul[g, h])

    def inverse(self, g):
        return int(self.inv[g])

    @property
    def is_abelian(self):
        return bool(np.array_equal(self.mul, self.mul.T))

    def elements(self):
        return range(self.order)

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and np.array_equal(self.mul, other.mul)

    def __hash__(self):
        return hash((self.order, self.mul.tobytes()))

    def __repr__(self):
        return f"FiniteGroup({self.name!r}, order={self.order})"


class GroupFunction:
    """A complex-valued function on a finite group, stored as a vector."""

    def __init__(self, group, values):
        values = np.asarray(values, dtype=complex)
        if values.shape != (group.order,):
            raise GroupError("value vector length must equal the group order")
        self.group = group
        self.values = values

    @classmethod
    def delta(cls, group, at=0):
        v = np.zeros(group.order, dtype=complex)
        v[at] = 1.0
        return cls(group, v)

    @classmethod
    def constant(cls, group, value=1.0):
        return cls(group, np.full(group.order, value, dtype=complex))

    @classmethod
    def random_complex(cls, group, rng):
        v = rng.standard_normal(group.order) + 1j * rng.standard_normal(group.order)
        return cls(group, v)

    @classmethod
    def random_positive_definite(cls, group, rng):
        """Seeded normalized positive definite function.

        Built as a diagonal coefficient of the left regular representation,
        phi(g) = <L_g v, v> for a random unit vector v, then normalized so
        that phi(identity) = 1.
        """
        n = group.order
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= np.linalg.norm(v)
        vals = np.empty(n, dtype=complex)
        for g in range(n):
            # (L_g v)(x) = v(g^{-1} x)
            shifted = v[group.mul[group.inv[g]]]
            vals[g] = np.vdot(v, shifted)
        return cls(group, vals / vals[0].real)

    def sup_norm(self):
        return float(np.max(np.abs(self.values)))

    def l1_norm(self):
        return float(np.sum(np.abs(self.values)))

    def __repr__(self):
        return f"GroupFunction({self.group.name}, {self.values!r})"


class CharacterTable:
    """All characters of a finite abelian group, one per row."""

    def __init__(self, group, chars):
        self.group = group
        self.chars = np.asarray(chars, dtype=complex)

    def __len__(self):
        return self.chars.shape[0]


# ---------------------------------------------------------------------------
# constructors

def cyclic(n):
    if n < 1:
        raise GroupError("cyclic group needs n >= 1")
    idx = np.arange(n)
    mul = (idx[:, None] + idx[None, :]) % n
    return FiniteGroup(mul, name=f"Z{n}", structure=("cyclic", n))


def direct_product(*factors):
    """Direct product with lexicographic element ordering."""
    if not factors:
        raise GroupError("direct product needs at least one factor")
    if len(factors) == 1:
        return factors[0]
    sizes = [g.order for g in factors]
    n = int(np.prod(sizes))
    strides = np.cumprod([1] + sizes[::-1][:-1])[::-1]

    def unpack(i):
        out = []
        for s, size in zip(strides, sizes):
            out.append((i // s) % size)
        return out

    mul = np.empty((n, n), dtype=np.int64)
    coords = [unpack(i) for i in range(n)]
    for a in range(n):
        for b in range(n):
            prod = [g.mul[ca, cb] for g, ca, cb in zip(factors, coords[a], coords[b])]
            mul[a, b] = int(np.dot(prod, strides))
    name = "x".join(g.name for g in factors)
    return FiniteGroup(mul, name=name, structure=("product", tuple(factors)))


def dihedral(n):
    """Dihedral group of order 2n: rotations r^k first, then reflections s r^k."""
    if n < 3:
        raise GroupError("dihedral group needs n >= 3")
    order = 2 * n

    def compose(a, b):
        fa, ka = divmod(a, n)
        fb, kb = divmod(b, n)
        # (s^fa r^ka)(s^fb r^kb) = s^(fa+fb) r^(kb + (-1)^fb ka)
        f = (fa + fb) % 2
        k = (kb + (ka if fb == 0 else -ka)) % n
        return f * n + k

    mul = np.array([[compose(a, b) for b in range(order)] for a in range(order)])
    return FiniteGroup(mul, name=f"D{n}", structure=("dihedral", n))


def symmetric(n):
    """Symmetric group on n letters, permutations in lexicographic order."""
    if not 1 <= n <= 5:
        raise GroupError("symmetric group supported for 1 <= n <= 5")
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    order = len(perms)
    mul = np.empty((order, order), dtype=np.int64)
    for a, pa in enumerate(perms):
        for b, pb in enumerate(perms):
            mul[a, b] = index[tuple(pa[x] for x in pb)]
    return FiniteGroup(mul, name=f"S{n}", structure=("symmetric", n))


def from_table(mul, name="custom"):
    """Explicit Cayley table, validated in full."""
    return FiniteGroup(mul, name=name, structure=None)


def build_group(spec):
    """Build a group from a tagged scenario object.

    Accepted forms: {"type":"cyclic","n":k}, {"type":"product","factors":[...]},
    {"type":"dihedral","n":k}, {"type":"symmetric","n":k},
    {"type":"table","mul":[[...]]}.
    """
    if not isinstance(spec, dict) or "type" not in spec:
        raise GroupError(f"malformed group spec: {spec!r}")
    kind = spec["type"]
    if kind == "cyclic":
        return cyclic(int(spec["n"]))
    if kind == "product":
        return direct_product(*(build_group(s) for s in spec["factors"]))
    if kind == "dihedral":
        return dihedral(int(spec["n"]))
    if kind == "symmetric":
        return symmetric(int(spec["n"]))
    if kind == "table":
        return from_table(spec["mul"], name=spec.get("name", "custom"))
    raise GroupError(f"unknown group type: {kind!r}")


# ---------------------------------------------------------------------------
# characters

def character_table(group):
    """Character table of an abelian group.

    Cyclic groups use chi_j(k) = exp(2 pi i jk / n); direct products get
    products of factor characters in lexicographic order.  Groups built from
    raw Cayley tables fall back to a simultaneous-diagonalization method with
    a deterministic row ordering.
    """
    if not group.is_abelian:
        raise GroupError(f"{group.name} is nonabelian; no character table")
    chars = _characters(group)
    return CharacterTable(group, chars)


def _characters(group):
    structure = group.structure
    n = group.order
    if structure is not None and structure[0] == "cyclic":
        j = np.arange(n)
        return np.exp(2j * np.pi * np.outer(j, j) / n)
    if structure is not None and structure[0] == "product":
        factor_chars = [_characters(g) for g in structure[1]]
        chars = factor_chars[0]
        for fc in factor_chars[1:]:
            chars = np.einsum("ax,by->abxy", chars, fc).reshape(
                chars.shape[0] * fc.shape[0], chars.shape[1] * fc.shape[1]
            )
        return chars
    return _characters_generic(group)


def _characters_generic(group):
    """Characters of an arbitrary abelian Cayley table.

    The left translations commute, so a generic fixed linear combination is a
    normal matrix whose eigenvectors are the character vectors.
    """
    n = group.order
    rng = np.random.default_rng(12345)
    for _ in range(10):
        coeffs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        T = np.zeros((n, n), dtype=complex)
        for g in range(n):
            L = np.zeros((n, n))
            L[group.mul[g], np.arange(n)] = 1.0
            T += coeffs[g] * L
        _, vecs = np.linalg.eig(T)
        chars = []
        for k in range(n):
            v = vecs[:, k]
            if abs(v[0]) < 1e-8:
                break
            chi = v / v[0]
            # multiplicativity check; generic eigenvalues give exact characters
            L1 = chi[group.mul]
            if np.max(np.abs(L1 - np.outer(chi, chi))) > 1e-8:
                break
            chars.append(chi)
        if len(chars) == n:
            chars = np.array(chars)
            keys = [tuple(np.round(c.view(float), 8)) for c in chars]
            order = sorted(range(n), key=lambda i: keys[i])
            return chars[order]
    raise GroupError("failed to compute characters; is the table really a group?")


def fourier_coefficients(f, table=None):
    """Abelian Fourier transform: fhat(chi) = (1/|G|) sum f(g) conj(chi(g))."""
    table = table or character_table(f.group)
    return table.chars.conj() @ f.values / f.group.order


def fourier_inverse(group, coeffs, table=None):
    """Reconstruct f = sum_chi fhat(chi) chi."""
    table = table or character_table(group)
    return GroupFunction(group, coeffs @ table.chars)
