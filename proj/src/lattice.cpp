#include "prlc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "prlc/test_form.hpp"

namespace prlc {

std::shared_ptr<const Lattice> Lattice::build(int d, int half_width, BoundaryMode mode) {
    if (d < 2) throw std::invalid_argument("build_lattice: need d >= 2");
    if (half_width < 1) throw std::invalid_argument("build_lattice: need half_width >= 1");

    auto lat = std::shared_ptr<Lattice>(new Lattice());
    lat->d_ = d;
    lat->half_width_ = half_width;
    lat->mode_ = mode;
    lat->side_ = (mode == BoundaryMode::torus) ? 2 * half_width : 2 * half_width + 1;

    long nv = 1;
    for (int k = 0; k < d; ++k) nv *= lat->side_;
    lat->n_vertices_ = nv;

    const int side = lat->side_;
    const bool torus = (mode == BoundaryMode::torus);

    auto decode = [&](int v, int* c) {
        for (int k = d - 1; k >= 0; --k) {
            c[k] = v % side;
            v /= side;
        }
    };
    auto encode = [&](const int* c) {
        int v = 0;
        for (int k = 0; k < d; ++k) v = v * side + c[k];
        return v;
    };

    std::vector<int> c(d), h(d);

    // edges, lexicographic by tail then direction
    lat->edge_at_.assign(nv * d, -1);
    for (int v = 0; v < nv; ++v) {
        decode(v, c.data());
        for (int dir = 0; dir < d; ++dir) {
            if (!torus && c[dir] == side - 1) continue;
            h = c;
            h[dir] = (h[dir] + 1) % side;
            const int id = static_cast<int>(lat->edges_.size());
            lat->edges_.push_back(Edge{v, encode(h.data()), dir});
            lat->edge_at_[static_cast<size_t>(v) * d + dir] = id;
        }
    }

    // boundary tags (free mode: the edge lies inside a face of the box)
    const int ne = static_cast<int>(lat->edges_.size());
    lat->boundary_flag_.assign(ne, false);
    for (int e = 0; e < ne; ++e) {
        if (torus) break;
        decode(lat->edges_[e].tail, c.data());
        const int dir = lat->edges_[e].dir;
        for (int k = 0; k < d; ++k) {
            if (k == dir) continue;
            if (c[k] == 0 || c[k] == side - 1) {
                lat->boundary_flag_[e] = true;
                break;
            }
        }
    }
    for (int e = 0; e < ne; ++e)
        (lat->boundary_flag_[e] ? lat->boundary_edges_ : lat->interior_edges_).push_back(e);

    // plaquettes at corner a spanned by i < j
    for (int v = 0; v < nv; ++v) {
        decode(v, c.data());
        for (int i = 0; i < d; ++i) {
            if (!torus && c[i] == side - 1) continue;
            for (int j = i + 1; j < d; ++j) {
                if (!torus && c[j] == side - 1) continue;
                Plaquette p;
                p.corner = v;
                p.dir_i = i;
                p.dir_j = j;
                h = c;
                h[i] = (h[i] + 1) % side;
                const int vi = encode(h.data());
                h = c;
                h[j] = (h[j] + 1) % side;
                const int vj = encode(h.data());
                p.edge[0] = lat->edge_at(v, i);
                p.edge[1] = lat->edge_at(vi, j);
                p.edge[2] = lat->edge_at(vj, i);
                p.edge[3] = lat->edge_at(v, j);
                lat->plaquettes_.push_back(p);
            }
        }
    }

    lat->edge_plaq_.assign(ne, {});
    for (int p = 0; p < static_cast<int>(lat->plaquettes_.size()); ++p)
        for (int s = 0; s < 4; ++s) lat->edge_plaq_[lat->plaquettes_[p].edge[s]].push_back(p);

    lat->vertex_edges_.assign(nv, {});
    for (int e = 0; e < ne; ++e) {
        lat->vertex_edges_[lat->edges_[e].tail].push_back({e, +1});
        lat->vertex_edges_[lat->edges_[e].head].push_back({e, -1});
    }

    return lat;
}

std::shared_ptr<const Lattice> build_lattice(int d, int half_width, BoundaryMode mode) {
    return Lattice::build(d, half_width, mode);
}

void Lattice::vertex_coord(int v, int* out) const {
    if (v < 0 || v >= n_vertices()) throw std::invalid_argument("vertex id out of range");
    const int off = (mode_ == BoundaryMode::torus) ? half_width_ : half_width_;
    for (int k = d_ - 1; k >= 0; --k) {
        out[k] = v % side_ - off;
        v /= side_;
    }
}

int Lattice::vertex_index(const int* coord) const {
    const int off = half_width_;
    int v = 0;
    for (int k = 0; k < d_; ++k) {
        int ck = coord[k] + off;
        if (mode_ == BoundaryMode::torus) {
            ck %= side_;
            if (ck < 0) ck += side_;
        } else if (ck < 0 || ck >= side_) {
            return -1;
        }
        v = v * side_ + ck;
    }
    return v;
}

std::array<std::pair<int, int>, 4> Lattice::plaquette_edges(int p) const {
    const Plaquette& pl = plaquette(p);
    std::array<std::pair<int, int>, 4> out;
    for (int s = 0; s < 4; ++s) out[s] = {pl.edge[s], canonical_sign(s)};
    return out;
}

std::vector<int> Lattice::edge_distances_from(int e) const {
    check_edge(e);
    std::vector<int> dist(n_edges(), -1);
    std::deque<int> queue;
    dist[e] = 0;
    queue.push_back(e);
    while (!queue.empty()) {
        const int cur = queue.front();
        queue.pop_front();
        for (int p : edge_plaq_[cur]) {
            for (int other : plaquettes_[p].edge) {
                if (dist[other] < 0) {
                    dist[other] = dist[cur] + 1;
                    queue.push_back(other);
                }
            }
        }
    }
    return dist;
}

int Lattice::edge_graph_distance(int e, int e2) const {
    check_edge(e);
    check_edge(e2);
    if (e == e2) return 0;
    std::vector<int> dist(n_edges(), -1);
    std::deque<int> queue;
    dist[e] = 0;
    queue.push_back(e);
    while (!queue.empty()) {
        const int cur = queue.front();
        queue.pop_front();
        for (int p : edge_plaq_[cur]) {
            for (int other : plaquettes_[p].edge) {
                if (dist[other] < 0) {
                    dist[other] = dist[cur] + 1;
                    if (other == e2) return dist[other];
                    queue.push_back(other);
                }
            }
        }
    }
    throw NumericalError("edge_graph_distance: edges not connected");
}

Lattice::NeighborClass Lattice::neighbor_classification(int e, int e2) const {
    check_edge(e);
    check_edge(e2);
    if (e == e2) return NeighborClass::same;
    for (int p : edge_plaq_[e]) {
        int se = 0, se2 = 0;
        for (int s = 0; s < 4; ++s) {
            if (plaquettes_[p].edge[s] == e) se = canonical_sign(s);
            if (plaquettes_[p].edge[s] == e2) se2 = canonical_sign(s);
        }
        if (se != 0 && se2 != 0)
            return se * se2 > 0 ? NeighborClass::positive : NeighborClass::negative;
    }
    return NeighborClass::none;
}

void EdgeField::check_finite() const {
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument("EdgeField has non-finite entries");
}

double plaquette_sum(const EdgeField& f, int p) {
    if (f.ncomp != 1) throw std::invalid_argument("plaquette_sum: scalar field required");
    return plaquette_sum_vec(f, p)[0];
}

std::array<double, 3> plaquette_sum_vec(const EdgeField& f, int p) {
    if (!f.lat) throw std::invalid_argument("plaquette_sum: field without lattice");
    const Lattice& lat = *f.lat;
    f.check_on(lat);
    const Lattice::Plaquette& pl = lat.plaquette(p);
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (int s = 0; s < 4; ++s) {
        const double sign = Lattice::canonical_sign(s);
        for (int c = 0; c < f.ncomp; ++c) out[c] += sign * f.at(pl.edge[s], c);
    }
    return out;
}

std::vector<double> voronoi_weights(const TestForm& f, double eps, const Lattice& lat) {
    if (eps <= 0) throw std::invalid_argument("voronoi_weights: eps must be positive");
    if (f.dim() != lat.dim()) throw std::invalid_argument("voronoi_weights: dimension mismatch");

    const int d = lat.dim();
    // 3-point Gauss-Legendre on [-1/2, 1/2]
    static const double gl_x[3] = {-0.3872983346207417, 0.0, 0.3872983346207417};
    static const double gl_w[3] = {5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0};

    std::vector<double> u(lat.n_edges(), 0.0);
    std::vector<int> coord(d), idx(d);
    std::vector<double> x(d);
    const double cell_vol = std::pow(eps, d);

    for (int e = 0; e < lat.n_edges(); ++e) {
        const Lattice::Edge& ed = lat.edge(e);
        lat.vertex_coord(ed.tail, coord.data());
        std::fill(idx.begin(), idx.end(), 0);
        double acc = 0.0;
        while (true) {
            double w = 1.0;
            for (int k = 0; k < d; ++k) {
                x[k] = eps * (coord[k] + gl_x[idx[k]]);
                w *= gl_w[idx[k]];
            }
            acc += w * f.value(ed.dir, x.data());
            int k = d - 1;
            while (k >= 0 && ++idx[k] == 3) idx[k--] = 0;
            if (k < 0) break;
        }
        u[e] = acc * cell_vol;
    }
    return u;
}

}  // namespace prlc
