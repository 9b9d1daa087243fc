#pragma once

#include "mdg/losses.hpp"
#include "mdg/types.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace mdg {

struct SolverOptions {
    int max_iters = 2000;
    double tol = 1e-7;
    std::uint64_t seed = 0;
    /// Iterations without relative improvement >= tol before a
    /// non-smooth run is declared converged.
    int stall_window = 25;
};

struct TrainTrace {
    std::vector<double> objective;     ///< objective after each accepted line-search step
    std::vector<double> accepted_from; ///< objective before that step
    int iterations = 0;
    bool converged = false;
    double final_grad_norm = 0.0;
};

/// Per-sample weights 1 / (N n_i) reproducing the per-task mean followed by
/// the mean over tasks. `task` holds the task position of each sample.
Vector task_weights(const IndexVector &task);

/// Features with one row per sample, samples of a task contiguous.
struct TaskFeatures {
    Matrix Z;           ///< M x D
    IndexVector labels; ///< M
    IndexVector task;   ///< M, task position in [0, N)
    int num_classes = 0;
};

/// Linear multiclass scorer f(z) = W z; row m of W scores class m.
struct LinearModel {
    Matrix W;
    double lambda = 0.0;
    LossKind loss = LossKind::multinomial_logistic;

    Eigen::Index dim() const { return W.cols(); }
    int num_classes() const { return static_cast<int>(W.rows()); }
};

/// Regularized empirical risk with the per-task weighting plus lambda |W|_F^2.
double objective(const LinearModel &model, const Matrix &Z, const IndexVector &labels,
                 const IndexVector &task);
/// Gradient of objective() in W (a subgradient for the hinge losses).
Matrix objective_gradient(const LinearModel &model, const Matrix &Z, const IndexVector &labels,
                          const IndexVector &task);

/// Deterministic full-batch (sub)gradient descent with backtracking.
LinearModel train_linear(const TaskFeatures &data, LossKind loss, double lambda,
                         const SolverOptions &opts = {}, TrainTrace *trace = nullptr);

/// argmax of the scores, lowest index on ties.
int argmax_class(const Eigen::Ref<const Vector> &scores);
int predict(const LinearModel &model, const Eigen::Ref<const Vector> &z);
/// One prediction per row of Z.
IndexVector predict_rows(const LinearModel &model, const Matrix &Z);

/// Features of the form a_{task(s)} (x) b_s, kept factored: A holds one row
/// per task, B one row per sample.
struct KroneckerFeatures {
    Matrix A;           ///< N x D_a
    Matrix B;           ///< M x D_b
    IndexVector labels; ///< M
    IndexVector task;   ///< M, contiguous per task
    int num_classes = 0;
};

/// Linear model over Kronecker features whose weights lie in the span of the
/// training task factors: W_m = sum_k A_k (x) C_{m,k}, with C stored as
/// (c*N) x D_b, block m holding the N rows of class m.
struct FactoredLinearModel {
    Matrix A;
    Matrix C;
    double lambda = 0.0;
    LossKind loss = LossKind::multinomial_logistic;
    int num_classes = 0;

    Eigen::Index dim() const { return A.cols() * C.cols(); }
    Eigen::Index task_count() const { return A.rows(); }
    /// Scores (c x n) of the points `B_rows` that share task factor `a`.
    Matrix scores(const Eigen::Ref<const Vector> &a, const Matrix &B_rows) const;
    /// Explicit c x (D_a * D_b) weights in Kronecker index order.
    LinearModel dense() const;
};

/// Same objective as train_linear on the explicit Kronecker features,
/// optimized without materializing them.
FactoredLinearModel train_kronecker(const KroneckerFeatures &data, LossKind loss, double lambda,
                                    const SolverOptions &opts = {}, TrainTrace *trace = nullptr);

/// Objective of a factored model on its training features.
double objective(const FactoredLinearModel &model, const KroneckerFeatures &data);

/// Representer-form model: scores of training point s are (alpha K)_s.
struct KernelModel {
    Matrix alpha; ///< c x M
    double lambda = 0.0;
    LossKind loss = LossKind::multinomial_logistic;

    int num_classes() const { return static_cast<int>(alpha.rows()); }
    /// Scores (c x n) from a cross-Gram with one row per query point and one
    /// column per training point.
    Matrix scores(const Matrix &cross_gram) const { return alpha * cross_gram.transpose(); }
};

struct KernelTrainOptions {
    SolverOptions solver;
    Eigen::Index max_points = 20000;
    double psd_tolerance = 1e-8;
};

double objective(const KernelModel &model, const Matrix &gram, const IndexVector &labels,
                 const IndexVector &task);

/// Descent over alpha on the loss of (alpha K) plus lambda sum_m alpha_m' K alpha_m.
KernelModel train_kernel(const Matrix &gram, const IndexVector &task, const IndexVector &labels,
                         int num_classes, LossKind loss, double lambda,
                         const KernelTrainOptions &opts = {}, TrainTrace *trace = nullptr);

} // namespace mdg
