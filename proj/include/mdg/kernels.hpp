#pragma once

#include "mdg/data.hpp"
#include "mdg/error.hpp"
#include "mdg/types.hpp"

#include <cmath>
#include <limits>

namespace mdg {

/// Bandwidths of the input kernel k_x, the embedding kernel k_x' and the
/// Gaussian-like kernel kappa on embeddings. All three kernels are bounded
/// by 1, which is what the bound module assumes by default.
struct KernelConfig {
    double sigma_x = 1.0;
    double sigma_xp = 1.0;
    double sigma_kappa = 1.0;

    void validate() const;
};

template <typename DerivedA, typename DerivedB>
double gauss(const Eigen::MatrixBase<DerivedA> &x, const Eigen::MatrixBase<DerivedB> &y,
             double sigma) {
    require_dims(x.size() == y.size(), "gauss: dimension mismatch");
    return std::exp(-(x - y).squaredNorm() / (2.0 * sigma * sigma));
}

/// Gaussian cross-Gram exp(-|a_i - b_j|^2 / 2 sigma^2) between point rows.
Matrix gauss_gram(const Eigen::Ref<const PointMatrix> &A, const Eigen::Ref<const PointMatrix> &B,
                  double sigma);

/// Squared distance between the empirical mean embeddings of two samples
/// under k_x'. Floating-point negatives down to -1e-12 are clamped to 0.
double mmd_sq(const Eigen::Ref<const PointMatrix> &A, const Eigen::Ref<const PointMatrix> &B,
              double sigma_xp);
double mmd_sq(const TaskDataset &A, const TaskDataset &B, double sigma_xp);

double kappa_from_mmd(double mmd2, double sigma_kappa);

double kappa_emp(const TaskDataset &A, const TaskDataset &B, const KernelConfig &config);

/// Product kernel on (empirical marginal, point) pairs.
template <typename DerivedA, typename DerivedB>
double kbar(const TaskDataset &A, const Eigen::MatrixBase<DerivedA> &x_a, const TaskDataset &B,
            const Eigen::MatrixBase<DerivedB> &x_b, const KernelConfig &config) {
    require_dims(x_a.size() == A.dim() && x_b.size() == B.dim(), "kbar: point dimension mismatch");
    return kappa_emp(A, B, config) * gauss(x_a, x_b, config.sigma_x);
}

/// Task-by-task kappa matrix; each unordered pair is evaluated once.
Matrix kappa_matrix(const DomainCollection &collection, const KernelConfig &config);
/// Kappa between every task of `rows` and every task of `cols`.
Matrix kappa_cross(const DomainCollection &rows, const DomainCollection &cols,
                   const KernelConfig &config);

struct GramOptions {
    Eigen::Index max_points = 20000;
};

/// Exact Gram of the product kernel over all points of the collection, in
/// task-major order.
Matrix gram_extended(const DomainCollection &collection, const KernelConfig &config,
                     const GramOptions &opts = {});

/// Exact product-kernel values between test points of `test` (rows) and all
/// training points of `train` (columns).
Matrix gram_extended_cross(const DomainCollection &train, const TaskDataset &test,
                           const KernelConfig &config);

/// Median pairwise Euclidean distance over a deterministic subsample of at
/// most `max_points` rows.
double median_pairwise_distance(const Eigen::Ref<const PointMatrix> &points,
                                std::uint64_t seed, Eigen::Index max_points = 500);

/// All points of the collection stacked in task-major order.
PointMatrix stack_points(const DomainCollection &collection);
IndexVector stack_labels(const DomainCollection &collection);
/// Task position of every stacked point.
IndexVector stack_task_index(const DomainCollection &collection);

} // namespace mdg
