from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moranmix import (
    DISCONNECTED,
    DisconnectedError,
    DuplicateEdgeError,
    Graph,
    InvalidParamError,
    MalformedLineError,
    SelfLoopError,
    book_graph,
    complete_graph,
    cycle_graph,
    degree_profile,
    generate_connected_gnp,
    generate_gnp,
    gnp_edges,
    parse_edge_list,
    path_graph,
    random_regular_graph,
    serialize_edge_list,
    star_graph,
)


class TestParsing:
    def test_smallest_path(self):
        g = parse_edge_list("0 1\n1 2")
        assert g.n == 3
        assert g.degrees == (1, 2, 1)

    def test_example5(self, example5):
        assert example5.n == 5
        assert example5.degrees == (1, 4, 2, 3, 2)

    def test_comments_and_blanks(self):
        g = parse_edge_list("# a path\n\n0 1  # first edge\n1 2\n")
        assert g.degrees == (1, 2, 1)

    def test_header_overrides_count(self):
        g = parse_edge_list("n 3\n0 1\n1 2\n")
        assert g.n == 3

    def test_header_with_isolated_vertex_is_disconnected(self):
        with pytest.raises(DisconnectedError):
            parse_edge_list("n 4\n0 1\n1 2\n")

    def test_two_components_rejected(self):
        with pytest.raises(DisconnectedError):
            parse_edge_list("0 1\n2 3")

    def test_self_loop_names_line(self):
        with pytest.raises(SelfLoopError, match="line 2"):
            parse_edge_list("0 1\n1 1\n")

    def test_duplicate_edge_names_line(self):
        with pytest.raises(DuplicateEdgeError, match="line 3"):
            parse_edge_list("0 1\n1 2\n1 0\n")

    def test_malformed_line(self):
        with pytest.raises(MalformedLineError, match="line 2"):
            parse_edge_list("0 1\n1 two\n")
        with pytest.raises(MalformedLineError):
            parse_edge_list("0 1 2\n")
        with pytest.raises(MalformedLineError):
            parse_edge_list("")

    def test_sparse_ids_remapped_with_mapping(self):
        g = parse_edge_list("0 5\n5 9\n")
        assert g.n == 3
        assert g.relabeling == {0: 0, 5: 1, 9: 2}
        assert g.degrees == (1, 2, 1)

    def test_round_trip_corpus(self, corpus):
        for g in corpus:
            assert parse_edge_list(serialize_edge_list(g)) == g

    def test_bytes_input(self):
        assert parse_edge_list(b"0 1\n1 2").n == 3


class TestGraphInvariants:
    def test_adjacency_symmetric_and_sorted(self, corpus):
        for g in corpus:
            for u in range(g.n):
                assert list(g.adjacency[u]) == sorted(g.adjacency[u])
                for v in g.adjacency[u]:
                    assert u in g.adjacency[v]

    def test_handshake(self, corpus):
        for g in corpus:
            assert sum(g.degrees) == 2 * g.num_edges()

    def test_min_degree_positive(self, corpus):
        for g in corpus:
            assert min(g.degrees) >= 1

    def test_too_small(self):
        with pytest.raises(InvalidParamError):
            Graph(1, [])


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 9), seed=st.integers(0, 10**6))
def test_round_trip_and_handshake_random(n, seed):
    g = generate_connected_gnp(n, 0.6, seed)
    assert parse_edge_list(serialize_edge_list(g)) == g
    assert sum(g.degrees) == 2 * g.num_edges()


class TestGnp:
    def test_p_one_gives_complete(self):
        g = generate_gnp(5, 1.0, seed=11)
        assert g == complete_graph(5)
        prof = degree_profile(g)
        assert prof.alpha == 1 and g.num_edges() == 10

    def test_determinism(self):
        a = generate_gnp(30, 0.5, seed=7)
        b = generate_gnp(30, 0.5, seed=7)
        assert a == b

    def test_invalid_params(self):
        with pytest.raises(InvalidParamError):
            generate_gnp(1, 0.5, 0)
        with pytest.raises(InvalidParamError):
            generate_gnp(5, 0.0, 0)
        with pytest.raises(InvalidParamError):
            generate_gnp(5, 1.5, 0)

    def test_disconnected_marker(self):
        # p tiny: the first sample with no edges is disconnected, not an error
        g = generate_gnp(4, 1e-9, seed=0)
        assert g is DISCONNECTED
        assert not g

    def test_connected_wrapper_resamples(self):
        g = generate_connected_gnp(6, 0.3, seed=1, max_retries=200)
        assert isinstance(g, Graph)

    def test_gnp_edges_matches_generate(self):
        edges = gnp_edges(12, 0.4, seed=5)
        g = generate_gnp(12, 0.4, seed=5)
        if isinstance(g, Graph):
            assert g.edges() == sorted(edges)


class TestDegreeProfile:
    def test_complete(self):
        prof = degree_profile(complete_graph(5))
        assert (prof.d_min, prof.d_max) == (4, 4)
        assert prof.alpha == 1
        assert prof.distinct_degrees == (4,)
        assert prof.is_regular and prof.is_bidegreed

    def test_star_seven_vertices(self):
        prof = degree_profile(star_graph(6))
        assert (prof.d_min, prof.d_max) == (1, 6)
        assert prof.alpha == Fraction(6)
        assert prof.distinct_degrees == (1, 6)
        assert prof.is_bidegreed and not prof.is_regular

    def test_example5_not_bidegreed(self, example5):
        prof = degree_profile(example5)
        assert (prof.d_min, prof.d_max) == (1, 4)
        assert prof.alpha == Fraction(4)
        assert prof.distinct_degrees == (1, 2, 3, 4)
        assert not prof.is_bidegreed
        with pytest.raises(InvalidParamError):
            prof.bidegree

    def test_bidegreed_implies_almost_regular_with_ratio(self, corpus):
        for g in corpus:
            prof = degree_profile(g)
            if prof.is_bidegreed:
                d1, d2 = prof.bidegree
                assert prof.alpha == Fraction(d2, d1)
                assert prof.is_almost_regular(Fraction(d2, d1))


class TestFamilies:
    def test_shapes(self):
        assert cycle_graph(5).degrees == (2,) * 5
        assert path_graph(4).degrees == (1, 2, 2, 1)
        assert star_graph(4).degrees == (4, 1, 1, 1, 1)
        assert complete_graph(4).degrees == (3,) * 4

    def test_book(self):
        g = book_graph(3)
        assert g.n == 8
        assert sorted(set(g.degrees)) == [2, 4]
        assert g.degrees[0] == g.degrees[1] == 4

    def test_random_regular(self):
        g = random_regular_graph(10, 3, seed=4)
        assert g.degrees == (3,) * 10
        assert random_regular_graph(10, 3, seed=4) == g
        with pytest.raises(InvalidParamError):
            random_regular_graph(5, 3, seed=0)  # odd n*d


def test_csr_view(example5):
    indptr, indices, deg, inv_deg = example5.csr()
    assert indptr[-1] == 2 * example5.num_edges()
    np.testing.assert_allclose(deg, example5.degrees)
    np.testing.assert_allclose(inv_deg * deg, 1.0)
