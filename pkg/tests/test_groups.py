import numpy as np
import pytest

from vnelab.groups import (FiniteGroup, GroupError, GroupFunction, build_group,
                           character_table, cyclic, dihedral, direct_product,
                           fourier_coefficients, fourier_inverse, from_table,
                           symmetric)


def test_cyclic_basic():
    g = cyclic(6)
    assert g.order == 6
    assert g.op(2, 5) == 1
    assert g.inverse(2) == 4
    assert g.is_abelian


def test_identity_is_zero():
    for g in (cyclic(5), dihedral(4), symmetric(3)):
        n = g.order
        assert all(g.op(0, x) == x and g.op(x, 0) == x for x in range(n))


def test_direct_product_lex_order():
    g = direct_product(cyclic(2), cyclic(3))
    assert g.order == 6
    # (a1, b1)(a2, b2) with index a*3 + b
    assert g.op(1 * 3 + 2, 1 * 3 + 2) == 0 * 3 + 1
    assert g.is_abelian


def test_dihedral_nonabelian():
    g = dihedral(3)
    assert g.order == 6
    assert not g.is_abelian
    # reflections are involutions
    for k in range(3, 6):
        assert g.op(k, k) == 0


def test_symmetric_group():
    s4 = symmetric(4)
    assert s4.order == 24
    assert not s4.is_abelian
    with pytest.raises(GroupError):
        symmetric(6)


def test_bad_tables_rejected():
    with pytest.raises(GroupError):
        FiniteGroup([[0, 1], [0, 1]])  # 1 has no inverse
    with pytest.raises(GroupError):
        FiniteGroup([[1, 0], [0, 1]])  # 0 is not the identity
    with pytest.raises(GroupError):
        FiniteGroup([[0, 1, 2], [1, 2, 0]])  # not square


def test_build_group_specs():
    assert build_group({"type": "cyclic", "n": 7}).order == 7
    g = build_group({"type": "product",
                     "factors": [{"type": "cyclic", "n": 2},
                                 {"type": "cyclic", "n": 2}]})
    assert g.order == 4 and g.is_abelian
    t = build_group({"type": "table", "mul": [[0, 1], [1, 0]]})
    assert t.order == 2
    with pytest.raises(GroupError):
        build_group({"type": "nope"})


@pytest.mark.parametrize("group", [
    cyclic(5),
    cyclic(8),
    direct_product(cyclic(2), cyclic(2)),
    direct_product(cyclic(2), cyclic(4)),
    direct_product(cyclic(2), cyclic(2), cyclic(2)),
])
def test_characters_multiplicative_and_orthogonal(group):
    table = character_table(group)
    n = group.order
    chars = table.chars
    assert chars.shape == (n, n)
    assert np.allclose(chars[:, 0], 1.0)
    for chi in chars:
        assert np.max(np.abs(chi[group.mul] - np.outer(chi, chi))) < 1e-10
    # row orthogonality
    gram = chars @ chars.conj().T / n
    assert np.max(np.abs(gram - np.eye(n))) < 1e-10


def test_generic_characters_from_raw_table():
    base = cyclic(6)
    raw = from_table(base.mul.tolist())
    t1 = character_table(base).chars
    t2 = character_table(raw).chars
    # same set of characters, possibly reordered
    matched = [min(float(np.max(np.abs(r2 - r1))) for r1 in t1) for r2 in t2]
    assert max(matched) < 1e-8


def test_nonabelian_characters_rejected():
    with pytest.raises(GroupError):
        character_table(symmetric(3))


def test_fourier_round_trip():
    g = direct_product(cyclic(2), cyclic(4))
    rng = np.random.default_rng(3)
    f = GroupFunction.random_complex(g, rng)
    coeffs = fourier_coefficients(f)
    back = fourier_inverse(g, coeffs)
    assert np.max(np.abs(back.values - f.values)) < 1e-12


def test_random_positive_definite_is_normalized():
    g = cyclic(7)
    rng = np.random.default_rng(11)
    phi = GroupFunction.random_positive_definite(g, rng)
    assert abs(phi.values[0] - 1.0) < 1e-12
    idx = g.mul[g.inv].T
    G = phi.values[idx]
    assert np.linalg.eigvalsh((G + G.conj().T) / 2)[0] > -1e-10


def test_group_function_norms():
    g = cyclic(4)
    f = GroupFunction(g, [1.0, -2.0, 3.0j, 0.0])
    assert f.sup_norm() == 3.0
    assert f.l1_norm() == 6.0
    with pytest.raises(GroupError):
        GroupFunction(g, [1.0, 2.0])
