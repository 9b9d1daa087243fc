#include "mdg/kernels.hpp"
#include "mdg/parallel.hpp"
#include "mdg/random.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace mdg {

void KernelConfig::validate() const {
    auto ok = [](double s) { return std::isfinite(s) && s > 0.0; };
    require(ok(sigma_x) && ok(sigma_xp) && ok(sigma_kappa),
            "kernel bandwidths must be positive and finite");
}

Matrix gauss_gram(const Eigen::Ref<const PointMatrix> &A, const Eigen::Ref<const PointMatrix> &B,
                  double sigma) {
    require_dims(A.cols() == B.cols(), "gauss_gram: dimension mismatch");
    const Vector na = A.rowwise().squaredNorm();
    const Vector nb = B.rowwise().squaredNorm();
    Matrix d2 = -2.0 * (A * B.transpose());
    d2.colwise() += na;
    d2.rowwise() += nb.transpose();
    return (-d2.cwiseMax(0.0) / (2.0 * sigma * sigma)).array().exp().matrix();
}

namespace {

double mean_gram(const Eigen::Ref<const PointMatrix> &A, const Eigen::Ref<const PointMatrix> &B,
                 double sigma) {
    return gauss_gram(A, B, sigma).mean();
}

bool precedes(const Eigen::Ref<const PointMatrix> &a, const Eigen::Ref<const PointMatrix> &b) {
    if (a.rows() != b.rows()) return a.rows() < b.rows();
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index k = 0; k < a.cols(); ++k)
            if (a(i, k) != b(i, k)) return a(i, k) < b(i, k);
    return false;
}

} // namespace

double mmd_sq(const Eigen::Ref<const PointMatrix> &A, const Eigen::Ref<const PointMatrix> &B,
              double sigma_xp) {
    require_dims(A.cols() == B.cols(), "mmd_sq: dimension mismatch");
    require(A.rows() >= 1 && B.rows() >= 1, "mmd_sq: empty sample");
    // canonical argument order makes the result exactly symmetric
    if (precedes(B, A)) return mmd_sq(B, A, sigma_xp);
    const double v = mean_gram(A, A, sigma_xp) + mean_gram(B, B, sigma_xp) -
                     2.0 * mean_gram(A, B, sigma_xp);
    if (v < 0.0 && v >= -1e-12) return 0.0;
    return v;
}

double mmd_sq(const TaskDataset &A, const TaskDataset &B, double sigma_xp) {
    return mmd_sq(A.X, B.X, sigma_xp);
}

double kappa_from_mmd(double mmd2, double sigma_kappa) {
    return std::exp(-mmd2 / (2.0 * sigma_kappa * sigma_kappa));
}

double kappa_emp(const TaskDataset &A, const TaskDataset &B, const KernelConfig &config) {
    config.validate();
    return kappa_from_mmd(mmd_sq(A, B, config.sigma_xp), config.sigma_kappa);
}

namespace {

// Combines per-task self terms with cross terms, so each block mean is
// computed once.
Matrix kappa_block(const DomainCollection &rows, const DomainCollection &cols,
                   const KernelConfig &config, bool symmetric) {
    config.validate();
    require_dims(rows.dim == cols.dim, "kappa: dimension mismatch");
    auto self_terms = [&](const DomainCollection &c) {
        Vector s(static_cast<Eigen::Index>(c.size()));
        parallel_for(c.size(), [&](std::size_t i) {
            s(static_cast<Eigen::Index>(i)) = mean_gram(c.tasks[i].X, c.tasks[i].X, config.sigma_xp);
        });
        return s;
    };
    const Vector sr = self_terms(rows);
    const Vector sc = symmetric ? sr : self_terms(cols);
    const auto nr = static_cast<Eigen::Index>(rows.size());
    const auto nc = static_cast<Eigen::Index>(cols.size());
    Matrix K(nr, nc);
    parallel_for(rows.size(), [&](std::size_t iu) {
        const auto i = static_cast<Eigen::Index>(iu);
        for (Eigen::Index j = symmetric ? i : 0; j < nc; ++j) {
            double m2;
            if (symmetric && i == j) {
                m2 = 0.0;
            } else {
                m2 = sr(i) + sc(j) -
                     2.0 * mean_gram(rows.tasks[iu].X, cols.tasks[static_cast<std::size_t>(j)].X,
                                     config.sigma_xp);
                if (m2 < 0.0 && m2 >= -1e-12) m2 = 0.0;
            }
            K(i, j) = kappa_from_mmd(m2, config.sigma_kappa);
        }
    });
    if (symmetric) K.triangularView<Eigen::StrictlyLower>() = K.transpose();
    return K;
}

} // namespace

Matrix kappa_matrix(const DomainCollection &collection, const KernelConfig &config) {
    return kappa_block(collection, collection, config, true);
}

Matrix kappa_cross(const DomainCollection &rows, const DomainCollection &cols,
                   const KernelConfig &config) {
    return kappa_block(rows, cols, config, false);
}

PointMatrix stack_points(const DomainCollection &collection) {
    PointMatrix X(collection.total_points(), collection.dim);
    Eigen::Index r = 0;
    for (const auto &t : collection.tasks) {
        X.middleRows(r, t.size()) = t.X;
        r += t.size();
    }
    return X;
}

IndexVector stack_labels(const DomainCollection &collection) {
    IndexVector y(collection.total_points());
    Eigen::Index r = 0;
    for (const auto &t : collection.tasks) {
        y.segment(r, t.size()) = t.y;
        r += t.size();
    }
    return y;
}

IndexVector stack_task_index(const DomainCollection &collection) {
    IndexVector idx(collection.total_points());
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < collection.size(); ++i) {
        const auto n = collection.tasks[i].size();
        idx.segment(r, n).setConstant(static_cast<int>(i));
        r += n;
    }
    return idx;
}

Matrix gram_extended(const DomainCollection &collection, const KernelConfig &config,
                     const GramOptions &opts) {
    require(collection.size() >= 1, "gram_extended: empty collection");
    const Eigen::Index M = collection.total_points();
    if (M > opts.max_points)
        throw UsageError("gram_extended: " + std::to_string(M) + " points exceed the cap of " +
                         std::to_string(opts.max_points));
    const Matrix kappa = kappa_matrix(collection, config);
    const PointMatrix X = stack_points(collection);
    const IndexVector task = stack_task_index(collection);
    Matrix G = gauss_gram(X, X, config.sigma_x);
    for (Eigen::Index a = 0; a < M; ++a) {
        G(a, a) = 1.0;
        for (Eigen::Index b = a + 1; b < M; ++b) {
            const double v = G(a, b) * kappa(task(a), task(b));
            G(a, b) = v;
            G(b, a) = v;
        }
    }
    return G;
}

Matrix gram_extended_cross(const DomainCollection &train, const TaskDataset &test,
                           const KernelConfig &config) {
    DomainCollection single;
    single.num_classes = train.num_classes;
    single.dim = test.dim();
    single.tasks = {test};
    const Matrix kappa = kappa_cross(single, train, config); // 1 x N
    const PointMatrix X = stack_points(train);
    const IndexVector task = stack_task_index(train);
    Matrix G = gauss_gram(test.X, X, config.sigma_x);
    for (Eigen::Index b = 0; b < G.cols(); ++b) G.col(b) *= kappa(0, task(b));
    return G;
}

double median_pairwise_distance(const Eigen::Ref<const PointMatrix> &points, std::uint64_t seed,
                                Eigen::Index max_points) {
    require(points.rows() >= 2, "median_pairwise_distance: need at least two points");
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(points.rows()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    if (points.rows() > max_points) {
        Rng rng(seed);
        for (Eigen::Index k = 0; k < max_points; ++k) {
            const auto pick = k + static_cast<Eigen::Index>(
                                      rng.below(static_cast<std::uint64_t>(points.rows() - k)));
            std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(pick)]);
        }
        idx.resize(static_cast<std::size_t>(max_points));
    }
    std::vector<double> d;
    d.reserve(idx.size() * (idx.size() - 1) / 2);
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b)
            d.push_back((points.row(idx[a]) - points.row(idx[b])).norm());
    const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    double med = *mid;
    if (d.size() % 2 == 0) {
        const double lower = *std::max_element(d.begin(), mid);
        med = 0.5 * (med + lower);
    }
    return med;
}

} // namespace mdg
