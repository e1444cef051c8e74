import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expandertopo.constructors import (
    ConstructionError,
    LpsParams,
    RandomRegularParams,
    SamplingExhausted,
    circulant_from_offsets,
    circulant_laplacian_spectrum,
    circulant_offsets,
    circulant_regular,
    is_prime,
    legendre,
    lps_generators,
    lps_graph,
    lps_quadruples,
    named_graph,
    random_regular,
    select_circulant_reading,
    sqrt_minus_one,
)
from expandertopo.graph import is_connected, laplacian
from expandertopo.spectral import ramanujan_check, reduced_condition_number


def test_primes_and_legendre():
    assert [k for k in range(30) if is_prime(k)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    squares = {x * x % 13 for x in range(1, 13)}
    assert legendre(29, 13) == (1 if 29 % 13 in squares else -1)
    assert legendre(5, 13) == (1 if 5 in squares else -1)


@pytest.mark.parametrize("p, q", [(7, 13), (29, 11), (13, 13), (29, 5), (4, 13)])
def test_lps_params_rejected(p, q):
    with pytest.raises(ConstructionError):
        LpsParams(p, q)


def test_quadruples_p5():
    expected = {(1, 2, 0, 0), (1, -2, 0, 0), (1, 0, 2, 0), (1, 0, -2, 0), (1, 0, 0, 2), (1, 0, 0, -2)}
    assert set(lps_quadruples(5)) == expected


@pytest.mark.parametrize("p", [5, 13, 17, 29, 37])
def test_quadruple_count_is_p_plus_one(p):
    # brute-force oracle over the full box |a_i| <= sqrt(p)
    r = math.isqrt(p)
    brute = [
        a
        for a in itertools.product(range(-r, r + 1), repeat=4)
        if sum(x * x for x in a) == p and a[0] > 0 and a[0] % 2 == 1 and all(x % 2 == 0 for x in a[1:])
    ]
    assert sorted(brute) == sorted(lps_quadruples(p))
    assert len(brute) == p + 1


@pytest.mark.parametrize("q", [5, 13, 17, 29])
def test_sqrt_minus_one(q):
    i = sqrt_minus_one(q)
    assert (i * i + 1) % q == 0


def test_generators_have_determinant_p(lps_29_13):
    gens = lps_generators(LpsParams(29, 13))
    assert len(gens) == 30
    det = (gens[:, 0, 0] * gens[:, 1, 1] - gens[:, 0, 1] * gens[:, 1, 0]) % 13
    assert np.all(det == 29 % 13)


def test_lps_29_13(lps_29_13):
    g = lps_29_13
    assert g.n == 1092
    assert g.regular_degree() == 30
    assert is_connected(g)
    assert reduced_condition_number(g) == pytest.approx(1.9538, abs=0.005)
    assert ramanujan_check(g)[0]


@pytest.mark.parametrize("p, q", [(5, 13), (5, 17), (13, 17), (17, 13)])
def test_lps_vertex_counts(p, q):
    squares = {x * x % q for x in range(1, q)}
    full = q * (q * q - 1)
    n = full // 2 if p % q in squares else full
    g = lps_graph(p, q)
    assert LpsParams(p, q).n_vertices == g.n == n
    assert g.regular_degree() == p + 1 and is_connected(g)
    if n <= 2500:
        assert ramanujan_check(g)[0]


def test_random_regular_cycle():
    for seed in range(10):
        g = random_regular(RandomRegularParams(6, 2, seed))
        assert g.m == 6 and g.regular_degree() == 2 and is_connected(g)


def test_random_regular_deterministic():
    a = random_regular(RandomRegularParams(300, 6, 7))
    b = random_regular(RandomRegularParams(300, 6, 7))
    c = random_regular(RandomRegularParams(300, 6, 8))
    assert a == b
    assert a != c


def test_random_regular_pinned_edges():
    # regression: fixes the PCG64 stream consumption order
    g = random_regular(RandomRegularParams(10, 4, 0))
    assert g.edge_list() == random_regular(RandomRegularParams(10, 4, 0)).edge_list()
    assert g.m == 20


@pytest.mark.parametrize("n, d", [(10, 3), (10, 10), (2, 2), (10, 0)])
def test_random_regular_bad_params(n, d):
    with pytest.raises(ConstructionError):
        RandomRegularParams(n, d)


def test_random_regular_exhaustion():
    # 18-regular on 20 vertices is the complement of a perfect matching: never a
    # union of 9 permutations without conflicts under a tiny budget
    with pytest.raises(SamplingExhausted) as info:
        random_regular(RandomRegularParams(20, 18, 0, max_attempts=500))
    assert info.value.attempts == 500


@settings(max_examples=40, deadline=None)
@given(st.integers(5, 60), st.sampled_from([2, 4, 6, 8]), st.integers(0, 2**32))
def test_random_regular_properties(n, d, seed):
    if d >= n:
        return
    try:
        g = random_regular(RandomRegularParams(n, d, seed, max_attempts=20_000))
    except SamplingExhausted:
        return
    assert g.regular_degree() == d
    assert is_connected(g)
    assert len(set(g.edge_list())) == g.m == n * d // 2


def test_circulant_literal_offsets():
    assert circulant_offsets(1092, 30, "literal") == list(range(36, 541, 36))


def test_circulant_shifted_offsets():
    assert circulant_offsets(1092, 30) == [1 + 36 * k for k in range(15)]


def test_literal_reading_disconnected_at_1092():
    # every literal offset is a multiple of 36 and gcd(36, 1092) = 12
    assert not is_connected(circulant_regular(1092, 30, "literal"))


@pytest.mark.parametrize("d, kappa", [(30, 30.5375), (60, 32.1103), (120, 27.1499)])
def test_circulant_kappa_table(d, kappa):
    g = circulant_regular(1092, d)
    assert g.regular_degree() == d
    assert reduced_condition_number(g) == pytest.approx(kappa, abs=0.01)


@pytest.mark.parametrize("d, kappa", [(30, 30.5375), (60, 32.1103), (120, 27.1499)])
def test_reading_selection_falls_back(d, kappa):
    assert select_circulant_reading(1092, d, kappa) == "shifted"


def test_reading_selection_no_match():
    with pytest.raises(ConstructionError):
        select_circulant_reading(1092, 30, 3.0)


def test_circulant_half_offset_rejected():
    with pytest.raises(ConstructionError, match="n/2"):
        circulant_regular(8, 2, "literal")


def test_circulant_collision_rejected():
    with pytest.raises(ConstructionError, match="coincide"):
        circulant_from_offsets(10, [3, 7])


@settings(max_examples=60, deadline=None)
@given(st.integers(5, 64), st.data())
def test_circulant_closed_form_spectrum(n, data):
    d = data.draw(st.sampled_from([d for d in range(2, n, 2)]))
    offs = circulant_offsets(n, d, data.draw(st.sampled_from(["shifted", "literal"])))
    try:
        g = circulant_from_offsets(n, offs)
    except ConstructionError:
        return
    assert g.regular_degree() == d
    ev = np.linalg.eigvalsh(laplacian(g))
    assert np.allclose(ev, circulant_laplacian_spectrum(n, offs), atol=1e-8)


def test_named_graphs():
    k5 = named_graph("complete", 5)
    assert k5.m == 10 and k5.regular_degree() == 4
    assert named_graph("cycle", 4).edge_list() == [(0, 1), (0, 3), (1, 2), (2, 3)]
    p = named_graph("petersen")
    assert (p.n, p.m, p.regular_degree()) == (10, 15, 3)


@pytest.mark.parametrize("kind, n", [("cycle", 2), ("complete", 0), ("blob", 3), ("path", None)])
def test_named_graph_errors(kind, n):
    with pytest.raises(ConstructionError):
        named_graph(kind, n)
