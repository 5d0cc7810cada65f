#pragma once

#include <array>
#include <memory>
#include <vector>

#include "prlc/errors.hpp"

namespace prlc {

enum class BoundaryMode { torus, free };

// Hypercubic lattice in d >= 2 dimensions.
//
// Torus mode: vertices {0,...,2L-1}^d with wrap-around; isomorphic to the
// centered box {-L,...,L}^d with opposite faces identified.
// Free mode: vertices {-M,...,M}^d, no identification; edges lying in a face
// of the box are tagged as boundary edges.
//
// Edges are positively oriented (tail at a, head at a + e_dir) and enumerated
// lexicographically by tail vertex, then by direction index, with dense ids.
// A plaquette at corner a spanned by directions i < j stores its four edges in
// the canonical order
//   e1 = (a, a+e_i)        sign +
//   e2 = (a+e_i, a+e_i+e_j) sign +
//   e3 = (a+e_j, a+e_j+e_i) sign -
//   e4 = (a, a+e_j)        sign -
// so the corner is the smallest vertex of the plaquette and the signed edge
// sum is x(e1) + x(e2) - x(e3) - x(e4).
class Lattice {
  public:
    struct Edge {
        int tail;  // vertex index
        int head;
        int dir;   // axis, 0-based
    };

    struct Plaquette {
        std::array<int, 4> edge;  // ids in canonical order
        int corner;               // vertex index of the smallest vertex
        int dir_i, dir_j;         // spanning directions, dir_i < dir_j
    };

    enum class NeighborClass { same, positive, negative, none };

    static std::shared_ptr<const Lattice> build(int d, int half_width, BoundaryMode mode);

    int dim() const { return d_; }
    int half_width() const { return half_width_; }
    BoundaryMode mode() const { return mode_; }
    int side() const { return side_; }  // vertices per axis

    int n_vertices() const { return static_cast<int>(n_vertices_); }
    int n_edges() const { return static_cast<int>(edges_.size()); }
    int n_plaquettes() const { return static_cast<int>(plaquettes_.size()); }

    // Centered integer coordinates of a vertex: {-L,...,L-1}^d (torus) or
    // {-M,...,M}^d (free). Test forms are evaluated at these coordinates.
    void vertex_coord(int v, int* out) const;
    int vertex_index(const int* coord) const;

    const Edge& edge(int e) const { return edges_[check_edge(e)]; }
    // Edge id for (tail vertex, direction); -1 when absent (free-mode face).
    int edge_at(int tail, int dir) const { return edge_at_[static_cast<size_t>(tail) * d_ + dir]; }

    bool is_boundary_edge(int e) const { return boundary_flag_[check_edge(e)]; }
    const std::vector<int>& boundary_edges() const { return boundary_edges_; }
    const std::vector<int>& interior_edges() const { return interior_edges_; }

    const Plaquette& plaquette(int p) const { return plaquettes_[check_plaquette(p)]; }
    // Ordered (edge id, sign) list of the 4 plaquette edges.
    std::array<std::pair<int, int>, 4> plaquette_edges(int p) const;
    static int canonical_sign(int slot) { return slot < 2 ? +1 : -1; }

    // Plaquette ids containing an edge.
    const std::vector<int>& plaquettes_of_edge(int e) const { return edge_plaq_[check_edge(e)]; }

    // Breadth-first distance in the shared-plaquette adjacency graph.
    int edge_graph_distance(int e, int e2) const;
    // All distances from e (one BFS); -1 marks unreachable.
    std::vector<int> edge_distances_from(int e) const;

    NeighborClass neighbor_classification(int e, int e2) const;

    // Edges incident to a vertex, as (edge id, tail? +1 : -1).
    const std::vector<std::pair<int, int>>& vertex_edges(int v) const { return vertex_edges_[v]; }

    // Structural fingerprint used to validate that fields and configurations
    // belong to this lattice.
    bool same_shape(const Lattice& o) const {
        return d_ == o.d_ && half_width_ == o.half_width_ && mode_ == o.mode_;
    }

  private:
    Lattice() = default;

    int check_edge(int e) const {
        if (e < 0 || e >= n_edges()) throw std::invalid_argument("edge id out of range");
        return e;
    }
    int check_plaquette(int p) const {
        if (p < 0 || p >= n_plaquettes()) throw std::invalid_argument("plaquette id out of range");
        return p;
    }

    int d_ = 0;
    int half_width_ = 0;
    BoundaryMode mode_ = BoundaryMode::torus;
    int side_ = 0;
    long n_vertices_ = 0;
    std::vector<Edge> edges_;
    std::vector<int> edge_at_;
    std::vector<Plaquette> plaquettes_;
    std::vector<std::vector<int>> edge_plaq_;
    std::vector<bool> boundary_flag_;
    std::vector<int> boundary_edges_;
    std::vector<int> interior_edges_;
    std::vector<std::vector<std::pair<int, int>>> vertex_edges_;
};

std::shared_ptr<const Lattice> build_lattice(int d, int half_width, BoundaryMode mode);

// Real-valued (ncomp = 1) or 3-component (ncomp = 3) assignment to edges.
struct EdgeField {
    std::shared_ptr<const Lattice> lat;
    int ncomp = 1;
    std::vector<double> v;  // edge-major, v[e*ncomp + c]

    EdgeField() = default;
    EdgeField(std::shared_ptr<const Lattice> l, int ncomponents)
        : lat(std::move(l)), ncomp(ncomponents), v(static_cast<size_t>(lat->n_edges()) * ncomp, 0.0) {
        if (ncomp != 1 && ncomp != 3) throw std::invalid_argument("EdgeField: ncomp must be 1 or 3");
    }

    double& at(int e, int c = 0) { return v[static_cast<size_t>(e) * ncomp + c]; }
    double at(int e, int c = 0) const { return v[static_cast<size_t>(e) * ncomp + c]; }
    double* ptr(int e) { return &v[static_cast<size_t>(e) * ncomp]; }
    const double* ptr(int e) const { return &v[static_cast<size_t>(e) * ncomp]; }

    void check_on(const Lattice& l) const {
        if (!lat || !lat->same_shape(l) || v.size() != static_cast<size_t>(l.n_edges()) * ncomp)
            throw std::invalid_argument("EdgeField does not live on this lattice");
    }
    void check_finite() const;
};

// Signed sum of a scalar field over the 4 plaquette edges.
double plaquette_sum(const EdgeField& f, int p);
// Componentwise version for 1- or 3-component fields.
std::array<double, 3> plaquette_sum_vec(const EdgeField& f, int p);

class TestForm;  // test_form.hpp

// Per-edge weights u(e) = integral of the matching component of f over the
// Voronoi cell eps*D + eps*a of the edge tail a (D = unit cube centered at 0).
// 3-point Gauss-Legendre per axis, exact for polynomial degree <= 5.
std::vector<double> voronoi_weights(const TestForm& f, double eps, const Lattice& lat);

}  // namespace prlc
