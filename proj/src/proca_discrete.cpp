#include "prlc/proca_discrete.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <cmath>
#include <string>

namespace prlc {

PrecisionMatrix::PrecisionMatrix(std::shared_ptr<const Lattice> lat, double eps)
    : lat_(std::move(lat)), eps_(eps) {
    if (eps <= 0) throw std::invalid_argument("assemble_precision: eps must be positive");
    const int ne = lat_->n_edges();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(ne) * (1 + 6 * 2 * (lat_->dim() - 1)));
    for (int e = 0; e < ne; ++e)
        trip.emplace_back(e, e, static_cast<double>(lat_->plaquettes_of_edge(e).size()) + eps * eps);
    for (int p = 0; p < lat_->n_plaquettes(); ++p) {
        const auto& pl = lat_->plaquette(p);
        for (int s = 0; s < 4; ++s)
            for (int t = 0; t < 4; ++t) {
                if (s == t) continue;
                const double sign = Lattice::canonical_sign(s) * Lattice::canonical_sign(t);
                trip.emplace_back(pl.edge[s], pl.edge[t], sign);
            }
    }
    a_.resize(ne, ne);
    a_.setFromTriplets(trip.begin(), trip.end());  // duplicate entries are summed
    a_.makeCompressed();
}

PrecisionMatrix assemble_precision(std::shared_ptr<const Lattice> lat, double eps) {
    return PrecisionMatrix(std::move(lat), eps);
}

void PrecisionMatrix::ensure_factored() const {
    if (llt_ || llt_failed_) return;
    auto llt = std::make_shared<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>();
    llt->compute(a_);
    if (llt->info() == Eigen::Success)
        llt_ = std::move(llt);
    else
        llt_failed_ = true;
}

Eigen::VectorXd PrecisionMatrix::solve_raw(const Eigen::VectorXd& rhs) const {
    ensure_factored();
    if (llt_) {
        Eigen::VectorXd x = llt_->solve(rhs);
        if (llt_->info() == Eigen::Success) return x;
    }
    // iterative fallback
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-13);
    cg.setMaxIterations(20L * a_.rows());
    cg.compute(a_);
    Eigen::VectorXd x = cg.solve(rhs);
    const double rel = (a_ * x - rhs).norm() / std::max(1e-300, rhs.norm());
    if (rel > 1e-12)
        throw NumericalError("precision solve did not converge: relative residual " +
                             std::to_string(rel) + ", cg iterations " + std::to_string(cg.iterations()));
    return x;
}

double PrecisionMatrix::covariance_entry(int e, int e2, Scaling s) const {
    if (e < 0 || e >= lat_->n_edges() || e2 < 0 || e2 >= lat_->n_edges())
        throw std::invalid_argument("covariance_entry: edge id out of range");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(lat_->n_edges());
    rhs[e2] = 1.0;
    return solve_raw(rhs)[e] * covariance_scale(s);
}

Eigen::VectorXd PrecisionMatrix::covariance_column(int e, Scaling s) const {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(lat_->n_edges());
    rhs[e] = 1.0;
    return solve_raw(rhs) * covariance_scale(s);
}

std::vector<EdgeField> PrecisionMatrix::sample_exact(int n, uint64_t seed) const {
    ensure_factored();
    if (!llt_)
        throw NumericalError("sample_exact: sparse Cholesky factorization failed (matrix not PD?)");
    const int ne = lat_->n_edges();
    std::vector<EdgeField> out;
    out.reserve(n);
    Rng rng(seed, 0x5a6d706cULL);
    Eigen::VectorXd xi(ne);
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < ne; ++i) xi[i] = rng.normal();
        // A = P' L L' P  =>  x = P' L'^{-1} xi has covariance A^{-1}
        Eigen::VectorXd y = llt_->matrixU().solve(xi);
        Eigen::VectorXd x = llt_->permutationPinv() * y;
        EdgeField f(lat_, 1);
        for (int i = 0; i < ne; ++i) f.v[i] = x[i];
        out.push_back(std::move(f));
    }
    return out;
}

double PrecisionMatrix::pairing_variance(const std::vector<double>& u) const {
    if (static_cast<int>(u.size()) != lat_->n_edges())
        throw std::invalid_argument("pairing_variance: weight vector size mismatch");
    Eigen::VectorXd uv = Eigen::Map<const Eigen::VectorXd>(u.data(), u.size());
    return uv.dot(solve_raw(uv)) * covariance_scale(Scaling::rescaled);
}

BoundaryValues::BoundaryValues(std::shared_ptr<const Lattice> l, std::vector<double> vals)
    : lat(std::move(l)), value(std::move(vals)) {
    check();
}

void BoundaryValues::check() const {
    if (!lat) throw std::invalid_argument("BoundaryValues: no lattice");
    // a torus has an empty boundary set; conditioning on it is the
    // unconditional law
    if (lat->mode() != BoundaryMode::free && !value.empty())
        throw std::invalid_argument("BoundaryValues: free-boundary lattice required");
    if (value.size() != lat->boundary_edges().size())
        throw std::invalid_argument("BoundaryValues: need one value per boundary edge");
    for (double x : value)
        if (!std::isfinite(x)) throw std::invalid_argument("BoundaryValues: non-finite entry");
}

ConditionalMoments::ConditionalMoments(const PrecisionMatrix& prec, const BoundaryValues& bdry)
    : lat_(prec.lattice_ptr()), eps_(prec.eps()), d_(prec.lattice().dim()), mean_(lat_, 1) {
    bdry.check();
    if (!bdry.lat->same_shape(*lat_))
        throw std::invalid_argument("conditional_moments: boundary data on a different lattice");

    const int ne = lat_->n_edges();
    interior_ = lat_->interior_edges();
    pos_.assign(ne, -1);
    for (int i = 0; i < static_cast<int>(interior_.size()); ++i) pos_[interior_[i]] = i;

    const auto& bedges = lat_->boundary_edges();
    std::vector<double> bval(ne, 0.0);
    for (size_t i = 0; i < bedges.size(); ++i) bval[bedges[i]] = bdry.value[i];

    // interior block A_II and cross product A_IB * b from the raw precision
    const Eigen::SparseMatrix<double>& a = prec.raw();
    std::vector<Eigen::Triplet<double>> trip;
    const int ni = static_cast<int>(interior_.size());
    Eigen::VectorXd cross = Eigen::VectorXd::Zero(ni);
    for (int col = 0; col < a.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, col); it; ++it) {
            const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
            if (pos_[r] >= 0 && pos_[c] >= 0)
                trip.emplace_back(pos_[r], pos_[c], it.value());
            else if (pos_[r] >= 0 && pos_[c] < 0)
                cross[pos_[r]] += it.value() * bval[c];
        }
    }
    a_ii_.resize(ni, ni);
    a_ii_.setFromTriplets(trip.begin(), trip.end());
    a_ii_.makeCompressed();

    llt_ = std::make_shared<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>();
    llt_->compute(a_ii_);
    if (llt_->info() != Eigen::Success)
        throw NumericalError("conditional_moments: interior factorization failed");

    const Eigen::VectorXd mu = llt_->solve(-cross);
    for (int e = 0; e < ne; ++e) mean_.v[e] = (pos_[e] >= 0) ? mu[pos_[e]] : bval[e];
}

double ConditionalMoments::covariance(int e, int e2, Scaling s) const {
    if (e < 0 || e >= static_cast<int>(pos_.size()) || e2 < 0 || e2 >= static_cast<int>(pos_.size()))
        throw std::invalid_argument("ConditionalMoments::covariance: edge id out of range");
    if (pos_[e] < 0 || pos_[e2] < 0) return 0.0;  // boundary edges are fixed
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(a_ii_.rows());
    rhs[pos_[e2]] = 1.0;
    const Eigen::VectorXd col = llt_->solve(rhs);
    const double scale = (s == Scaling::raw) ? 1.0 : std::pow(eps_, -(d_ - 2));
    return col[pos_[e]] * scale;
}

double ConditionalMoments::pairing_variance(const std::vector<double>& u) const {
    if (static_cast<int>(u.size()) != lat_->n_edges())
        throw std::invalid_argument("pairing_variance: weight vector size mismatch");
    Eigen::VectorXd ui = Eigen::VectorXd::Zero(a_ii_.rows());
    for (size_t e = 0; e < u.size(); ++e)
        if (pos_[e] >= 0) ui[pos_[e]] = u[e];
    return ui.dot(llt_->solve(ui)) * std::pow(eps_, -(d_ - 2));
}

ConditionalMoments conditional_moments(const PrecisionMatrix& prec, const BoundaryValues& bdry) {
    return ConditionalMoments(prec, bdry);
}

CorrBoundReport corr_bound_check(const PrecisionMatrix& prec, int size_cutoff, uint64_t seed) {
    const Lattice& lat = prec.lattice();
    if (prec.eps() > 1.0)
        throw std::invalid_argument("corr_bound_check: bound requires eps <= 1");
    const int ne = lat.n_edges();
    const int d = lat.dim();
    const double eps = prec.eps();
    const double base = 1.0 - eps * eps / (16.0 * d);
    const double amp = 1.0 / (eps * eps);

    std::vector<int> sources;
    if (ne <= size_cutoff) {
        sources.resize(ne);
        for (int e = 0; e < ne; ++e) sources[e] = e;
    } else {
        Rng rng(seed);
        for (int k = 0; k < 50; ++k) sources.push_back(static_cast<int>(rng.next_u64() % ne));
    }

    CorrBoundReport rep;
    for (int e : sources) {
        const Eigen::VectorXd col = prec.covariance_column(e, Scaling::raw);
        const std::vector<int> dist = lat.edge_distances_from(e);
        for (int e2 = 0; e2 < ne; ++e2) {
            const double bound = amp * std::pow(base, dist[e2]);
            const double ratio = std::abs(col[e2]) / bound;
            rep.pairs_checked++;
            if (ratio > rep.max_ratio) {
                rep.max_ratio = ratio;
                rep.worst_e = e;
                rep.worst_e2 = e2;
            }
        }
    }
    rep.pass = rep.max_ratio <= 1.0;
    return rep;
}

}  // namespace prlc
