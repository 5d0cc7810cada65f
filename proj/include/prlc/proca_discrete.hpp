#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>
#include <vector>

#include "prlc/lattice.hpp"
#include "prlc/rng.hpp"

namespace prlc {

// The discrete field X has density proportional to
//   exp( -1/2 sum_p x(p)^2 - eps^2/2 sum_e x(e)^2 ),
// so its raw precision is the Hessian of that quadratic form:
//   diag: (#plaquettes containing e) + eps^2   (= 2(d-1) + eps^2 interior)
//   off-diag: sum over shared plaquettes of the product of canonical signs
//             (+1 for positive neighbors, -1 for negative neighbors).
// The rescaled convention multiplies the raw precision by eps^{d-2}; its
// inverse then carries the eps^{-(d-2)} rescaling of Y = eps^{-(d-2)/2} X.
enum class Scaling { raw, rescaled };

class PrecisionMatrix {
  public:
    PrecisionMatrix(std::shared_ptr<const Lattice> lat, double eps);

    const Lattice& lattice() const { return *lat_; }
    const std::shared_ptr<const Lattice>& lattice_ptr() const { return lat_; }
    double eps() const { return eps_; }

    // multiply raw entries by this to get the requested scaling
    double precision_scale(Scaling s) const {
        return s == Scaling::raw ? 1.0 : std::pow(eps_, lat_->dim() - 2);
    }
    double covariance_scale(Scaling s) const { return 1.0 / precision_scale(s); }

    const Eigen::SparseMatrix<double>& raw() const { return a_; }
    Eigen::SparseMatrix<double> matrix(Scaling s) const { return precision_scale(s) * a_; }

    // solve (raw precision) x = rhs; Cholesky with CG fallback
    Eigen::VectorXd solve_raw(const Eigen::VectorXd& rhs) const;

    double covariance_entry(int e, int e2, Scaling s) const;
    Eigen::VectorXd covariance_column(int e, Scaling s) const;

    // exact zero-mean samples of X (raw scaling), covariance = raw precision inverse
    std::vector<EdgeField> sample_exact(int n, uint64_t seed) const;

    // u^T R u with R in the rescaled convention (variance of Y(f) for
    // u = voronoi_weights(f, eps, lat))
    double pairing_variance(const std::vector<double>& u) const;

  private:
    void ensure_factored() const;

    std::shared_ptr<const Lattice> lat_;
    double eps_;
    Eigen::SparseMatrix<double> a_;  // raw precision
    mutable std::shared_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> llt_;
    mutable bool llt_failed_ = false;
};

PrecisionMatrix assemble_precision(std::shared_ptr<const Lattice> lat, double eps);

// Values on the boundary edges of a free-boundary lattice, indexed in
// lat->boundary_edges() order.
struct BoundaryValues {
    std::shared_ptr<const Lattice> lat;
    std::vector<double> value;

    BoundaryValues() = default;
    BoundaryValues(std::shared_ptr<const Lattice> l, std::vector<double> vals);
    void check() const;
};

// Conditional law of the interior given the boundary: mean -A_II^{-1} A_IB b
// (equal to q(e)^* S^{-1} b in covariance form) and precision A_II.
class ConditionalMoments {
  public:
    ConditionalMoments(const PrecisionMatrix& prec, const BoundaryValues& bdry);

    const EdgeField& mean() const { return mean_; }  // full field; boundary = data
    const std::vector<int>& interior() const { return interior_; }
    const Eigen::SparseMatrix<double>& precision_raw() const { return a_ii_; }

    double covariance(int e, int e2, Scaling s) const;  // interior edge ids
    // variance of Y'(f) for weights u over all edges (boundary part is fixed)
    double pairing_variance(const std::vector<double>& u) const;

  private:
    std::shared_ptr<const Lattice> lat_;
    double eps_;
    int d_;
    std::vector<int> interior_;
    std::vector<int> pos_;  // edge id -> interior position, -1 for boundary
    EdgeField mean_;
    Eigen::SparseMatrix<double> a_ii_;
    std::shared_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> llt_;
};

ConditionalMoments conditional_moments(const PrecisionMatrix& prec, const BoundaryValues& bdry);

// Checks |Cov(X(e), X(e'))| <= eps^{-2} (1 - eps^2/(16 d))^{dist(e,e')} over all
// pairs (or a seeded sample of source edges above size_cutoff edges).
struct CorrBoundReport {
    bool pass = true;
    double max_ratio = 0.0;
    int worst_e = -1, worst_e2 = -1;
    long pairs_checked = 0;
};

CorrBoundReport corr_bound_check(const PrecisionMatrix& prec, int size_cutoff = 4000,
                                 uint64_t seed = 7);

}  // namespace prlc
