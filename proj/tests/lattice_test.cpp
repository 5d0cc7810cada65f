#include <doctest.h>

#include <cmath>
#include <set>

#include "prlc/lattice.hpp"
#include "prlc/rng.hpp"
#include "prlc/test_form.hpp"

using namespace prlc;

namespace {

// brute-force shared-plaquette adjacency, independent of the BFS in Lattice
std::vector<std::set<int>> brute_adjacency(const Lattice& lat) {
    std::vector<std::set<int>> adj(lat.n_edges());
    for (int p = 0; p < lat.n_plaquettes(); ++p) {
        const auto& pl = lat.plaquette(p);
        for (int s = 0; s < 4; ++s)
            for (int t = 0; t < 4; ++t)
                if (s != t) adj[pl.edge[s]].insert(pl.edge[t]);
    }
    return adj;
}

int brute_bfs(const Lattice& lat, int a, int b) {
    const auto adj = brute_adjacency(lat);
    std::vector<int> dist(lat.n_edges(), -1);
    std::vector<int> queue = {a};
    dist[a] = 0;
    for (size_t i = 0; i < queue.size(); ++i) {
        for (int nb : adj[queue[i]]) {
            if (dist[nb] < 0) {
                dist[nb] = dist[queue[i]] + 1;
                queue.push_back(nb);
            }
        }
    }
    return dist[b];
}

int edge_at_coord(const Lattice& lat, int cx, int cy, int dir) {
    const int c[2] = {cx, cy};
    const int v = lat.vertex_index(c);
    REQUIRE(v >= 0);
    const int e = lat.edge_at(v, dir);
    REQUIRE(e >= 0);
    return e;
}

}  // namespace

TEST_CASE("build_lattice counts") {
    auto t2 = build_lattice(2, 1, BoundaryMode::torus);
    CHECK(t2->n_vertices() == 4);
    CHECK(t2->n_edges() == 8);
    CHECK(t2->n_plaquettes() == 4);

    auto f2 = build_lattice(2, 1, BoundaryMode::free);
    CHECK(f2->n_vertices() == 9);
    CHECK(f2->n_edges() == 12);
    CHECK(f2->n_plaquettes() == 4);

    auto t3 = build_lattice(3, 1, BoundaryMode::torus);
    CHECK(t3->n_vertices() == 8);
    CHECK(t3->n_edges() == 24);
    CHECK(t3->n_plaquettes() == 24);

    auto t = build_lattice(2, 3, BoundaryMode::torus);
    CHECK(t->n_edges() == 2 * 6 * 6);
    CHECK(t->n_plaquettes() == 36);
    auto f = build_lattice(3, 2, BoundaryMode::free);
    CHECK(f->n_vertices() == 125);
    CHECK(f->n_edges() == 3 * 4 * 25);
    CHECK(f->n_plaquettes() == 3 * 16 * 5);
}

TEST_CASE("build_lattice rejects bad parameters") {
    CHECK_THROWS_AS(build_lattice(1, 3, BoundaryMode::torus), std::invalid_argument);
    CHECK_THROWS_AS(build_lattice(2, 0, BoundaryMode::free), std::invalid_argument);
}

TEST_CASE("plaquette canonical order and signs") {
    auto lat = build_lattice(2, 2, BoundaryMode::free);
    int corner = -1;
    for (int p = 0; p < lat->n_plaquettes(); ++p) {
        int c[2];
        lat->vertex_coord(lat->plaquette(p).corner, c);
        if (c[0] == 0 && c[1] == 0) {
            corner = p;
            break;
        }
    }
    REQUIRE(corner >= 0);
    const auto edges = lat->plaquette_edges(corner);
    CHECK(edges[0].second == +1);
    CHECK(edges[1].second == +1);
    CHECK(edges[2].second == -1);
    CHECK(edges[3].second == -1);
    // e1 = (0,0)->(1,0), e2 = (1,0)->(1,1), e3 = (0,1)->(1,1), e4 = (0,0)->(0,1)
    CHECK(edges[0].first == edge_at_coord(*lat, 0, 0, 0));
    CHECK(edges[1].first == edge_at_coord(*lat, 1, 0, 1));
    CHECK(edges[2].first == edge_at_coord(*lat, 0, 1, 0));
    CHECK(edges[3].first == edge_at_coord(*lat, 0, 0, 1));

    // d=3: plaquette spanned by axes (0,2) has e1 along axis 0, e4 along axis 2
    auto lat3 = build_lattice(3, 1, BoundaryMode::free);
    bool found = false;
    for (int p = 0; p < lat3->n_plaquettes() && !found; ++p) {
        const auto& pl = lat3->plaquette(p);
        if (pl.dir_i == 0 && pl.dir_j == 2) {
            CHECK(lat3->edge(pl.edge[0]).dir == 0);
            CHECK(lat3->edge(pl.edge[3]).dir == 2);
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("plaquette_sum") {
    auto lat = build_lattice(2, 2, BoundaryMode::free);
    EdgeField f(lat, 1);
    const auto edges = lat->plaquette_edges(0);
    f.at(edges[0].first) = 1.0;
    f.at(edges[1].first) = 2.0;
    f.at(edges[2].first) = 3.0;
    f.at(edges[3].first) = 4.0;
    CHECK(plaquette_sum(f, 0) == doctest::Approx(-4.0));  // 1 + 2 - 3 - 4

    EdgeField zero(lat, 1);
    for (int p = 0; p < lat->n_plaquettes(); ++p) CHECK(plaquette_sum(zero, p) == 0.0);

    // discrete gradient field telescopes to zero around every plaquette
    EdgeField grad(lat, 1);
    std::vector<double> h(lat->n_vertices());
    Rng rng(5);
    for (auto& x : h) x = rng.normal();
    for (int e = 0; e < lat->n_edges(); ++e)
        grad.at(e) = h[lat->edge(e).head] - h[lat->edge(e).tail];
    for (int p = 0; p < lat->n_plaquettes(); ++p)
        CHECK(std::abs(plaquette_sum(grad, p)) < 1e-12);
}

TEST_CASE("plaquette_sum is linear; axis swap flips the sign") {
    auto lat = build_lattice(2, 2, BoundaryMode::torus);
    Rng rng(9);
    EdgeField a(lat, 1), b(lat, 1);
    for (int e = 0; e < lat->n_edges(); ++e) {
        a.at(e) = rng.normal();
        b.at(e) = rng.normal();
    }
    for (int p = 0; p < lat->n_plaquettes(); ++p) {
        EdgeField sum(lat, 1);
        for (int e = 0; e < lat->n_edges(); ++e) sum.at(e) = 2.0 * a.at(e) - 3.0 * b.at(e);
        CHECK(plaquette_sum(sum, p) ==
              doctest::Approx(2.0 * plaquette_sum(a, p) - 3.0 * plaquette_sum(b, p)));
        // traversing the square with the two span directions exchanged turns
        // (e1,e2,e3,e4) into (e4,e3,e2,e1) and negates the signed sum
        const auto& pl = lat->plaquette(p);
        const double swapped =
            a.at(pl.edge[3]) + a.at(pl.edge[2]) - a.at(pl.edge[1]) - a.at(pl.edge[0]);
        CHECK(swapped == doctest::Approx(-plaquette_sum(a, p)));
    }
}

TEST_CASE("boundary classification on the free box") {
    auto lat = build_lattice(2, 1, BoundaryMode::free);
    CHECK(lat->boundary_edges().size() == 8);
    CHECK(lat->interior_edges().size() == 4);
    auto torus = build_lattice(2, 2, BoundaryMode::torus);
    CHECK(torus->boundary_edges().empty());
}

TEST_CASE("edge_graph_distance") {
    auto lat = build_lattice(2, 3, BoundaryMode::free);
    const int e = edge_at_coord(*lat, 0, 0, 0);
    CHECK(lat->edge_graph_distance(e, e) == 0);
    const auto& pl = lat->plaquette(lat->plaquettes_of_edge(e)[0]);
    for (int s = 1; s < 4; ++s) CHECK(lat->edge_graph_distance(pl.edge[0], pl.edge[s]) == 1);

    // parallel horizontal edges two rows apart
    const int e2 = edge_at_coord(*lat, 0, 2, 0);
    CHECK(brute_bfs(*lat, e, e2) == 2);  // oracle
    CHECK(lat->edge_graph_distance(e, e2) == 2);

    // agrees with the independent BFS on random pairs, and is a metric
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const int a = static_cast<int>(rng.next_u64() % lat->n_edges());
        const int b = static_cast<int>(rng.next_u64() % lat->n_edges());
        const int c = static_cast<int>(rng.next_u64() % lat->n_edges());
        const int dab = lat->edge_graph_distance(a, b);
        CHECK(dab == brute_bfs(*lat, a, b));
        CHECK(dab == lat->edge_graph_distance(b, a));
        CHECK(dab <= lat->edge_graph_distance(a, c) + lat->edge_graph_distance(c, b));
        CHECK((dab == 0) == (a == b));
    }
    CHECK_THROWS_AS(lat->edge_graph_distance(0, 10000), std::invalid_argument);
}

TEST_CASE("neighbor_classification") {
    auto lat = build_lattice(2, 2, BoundaryMode::free);
    const auto& pl = lat->plaquette(2);
    using NC = Lattice::NeighborClass;
    CHECK(lat->neighbor_classification(pl.edge[0], pl.edge[1]) == NC::positive);
    CHECK(lat->neighbor_classification(pl.edge[2], pl.edge[3]) == NC::positive);
    CHECK(lat->neighbor_classification(pl.edge[0], pl.edge[2]) == NC::negative);
    CHECK(lat->neighbor_classification(pl.edge[0], pl.edge[3]) == NC::negative);
    CHECK(lat->neighbor_classification(pl.edge[1], pl.edge[2]) == NC::negative);
    CHECK(lat->neighbor_classification(pl.edge[1], pl.edge[3]) == NC::negative);
    CHECK(lat->neighbor_classification(pl.edge[0], pl.edge[0]) == NC::same);

    // sign oracle: classification equals the sign of the cross-term
    // coefficient of x(e)x(e') in x(p)^2, extracted by polarization
    for (int s = 0; s < 4; ++s)
        for (int t = s + 1; t < 4; ++t) {
            EdgeField f(lat, 1);
            f.at(pl.edge[s]) = 1.0;
            f.at(pl.edge[t]) = 1.0;
            const double both = plaquette_sum(f, 2) * plaquette_sum(f, 2);
            f.at(pl.edge[t]) = 0.0;
            const double only_s = plaquette_sum(f, 2) * plaquette_sum(f, 2);
            f.at(pl.edge[s]) = 0.0;
            f.at(pl.edge[t]) = 1.0;
            const double only_t = plaquette_sum(f, 2) * plaquette_sum(f, 2);
            const double cross = both - only_s - only_t;  // = 2 s_s s_t
            const auto cls = lat->neighbor_classification(pl.edge[s], pl.edge[t]);
            CHECK(cls == (cross > 0 ? NC::positive : NC::negative));
        }

    CHECK(lat->neighbor_classification(edge_at_coord(*lat, -2, -2, 0),
                                       edge_at_coord(*lat, 1, 1, 0)) == NC::none);
}

TEST_CASE("plaquette classification multiset and edge membership counts") {
    auto lat = build_lattice(3, 2, BoundaryMode::free);
    using NC = Lattice::NeighborClass;
    for (int p = 0; p < lat->n_plaquettes(); p += 7) {
        const auto& pl = lat->plaquette(p);
        int pos = 0, neg = 0;
        for (int s = 0; s < 4; ++s)
            for (int t = s + 1; t < 4; ++t) {
                const auto c = lat->neighbor_classification(pl.edge[s], pl.edge[t]);
                if (c == NC::positive) pos++;
                if (c == NC::negative) neg++;
            }
        CHECK(pos == 2);
        CHECK(neg == 4);
    }
    // an interior edge lies in exactly 2(d-1) plaquettes
    auto torus = build_lattice(3, 1, BoundaryMode::torus);
    for (int e = 0; e < torus->n_edges(); ++e)
        CHECK(torus->plaquettes_of_edge(e).size() == 4);
}

TEST_CASE("voronoi_weights") {
    auto lat = build_lattice(2, 2, BoundaryMode::free);

    SUBCASE("rejects bad eps") {
        const TestForm f = TestForm::gaussian(2, 1.0, {1.0, 0.0});
        CHECK_THROWS_AS(voronoi_weights(f, 0.0, *lat), std::invalid_argument);
    }

    SUBCASE("constant component integrates to the cell volume eps^d") {
        const double eps = 1e-3;
        const TestForm f = TestForm::gaussian(2, 1e6, {1.0, 0.0});
        const auto u = voronoi_weights(f, eps, *lat);
        for (int e = 0; e < lat->n_edges(); ++e) {
            if (lat->edge(e).dir == 0)
                CHECK(u[e] == doctest::Approx(eps * eps).epsilon(1e-9));
            else
                CHECK(u[e] == 0.0);
        }
    }

    SUBCASE("affine components integrate exactly to the midpoint value") {
        // curl_gaussian components are x-times-gaussian; with a huge width they
        // are affine over the cells to machine precision
        const double eps = 0.25;
        const TestForm f = TestForm::curl_gaussian(1e5, 1e10);
        const auto u = voronoi_weights(f, eps, *lat);
        for (int e = 0; e < lat->n_edges(); ++e) {
            int c[2];
            lat->vertex_coord(lat->edge(e).tail, c);
            const double x[2] = {eps * c[0], eps * c[1]};
            const double center_val = f.value(lat->edge(e).dir, x);
            CHECK(u[e] == doctest::Approx(eps * eps * center_val).epsilon(1e-9));
        }
    }

    SUBCASE("gaussian component matches a refined quadrature oracle") {
        const double eps = 0.25;
        const TestForm f = TestForm::gaussian(2, 0.7, {1.3, -0.4}, {0.1, -0.2});
        const auto u = voronoi_weights(f, eps, *lat);
        // oracle: composite midpoint with 40x40 subcells per cell
        for (int e = 0; e < lat->n_edges(); e += 3) {
            int c[2];
            lat->vertex_coord(lat->edge(e).tail, c);
            const int n = 40;
            double acc = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double x[2] = {eps * (c[0] - 0.5 + (i + 0.5) / n),
                                         eps * (c[1] - 0.5 + (j + 0.5) / n)};
                    acc += f.value(lat->edge(e).dir, x);
                }
            acc *= eps * eps / (n * n);
            CHECK(u[e] == doctest::Approx(acc).epsilon(1e-6));
        }
    }
}

TEST_CASE("EdgeField validation") {
    auto lat = build_lattice(2, 1, BoundaryMode::torus);
    auto other = build_lattice(2, 2, BoundaryMode::torus);
    EdgeField f(lat, 1);
    CHECK_THROWS_AS(f.check_on(*other), std::invalid_argument);
    CHECK_THROWS_AS(EdgeField(lat, 2), std::invalid_argument);
    f.at(3) = std::nan("");
    CHECK_THROWS_AS(f.check_finite(), std::invalid_argument);
}
