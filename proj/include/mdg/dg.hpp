#pragma once

#include "mdg/data.hpp"
#include "mdg/kernels.hpp"
#include "mdg/rff.hpp"
#include "mdg/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mdg {

/// Feature counts of the three random Fourier maps: the embedding map of
/// k_x', the kappa map on embeddings, and the point map of k_x.
struct RffDims {
    Eigen::Index embed = 1024;
    Eigen::Index kappa = 1024;
    Eigen::Index point = 1024;
};

/// Decision function on (empirical marginal, point) pairs, approximated with
/// random features. Weights are kept factored over the training tasks.
struct DgModel {
    RffMap map_xp;
    RffMap map_kappa;
    RffMap map_x;
    FactoredLinearModel linear;
    KernelConfig config;
    std::uint64_t seed = 0;

    int num_classes() const { return linear.num_classes; }
};

/// Seeds of the three maps derived from a fit seed.
struct MapSeeds {
    std::uint64_t embed, kappa, point;
    static MapSeeds from(std::uint64_t seed);
};

/// The random maps of a DG fit and the factored features of a collection.
struct DgFeatures {
    RffMap map_xp, map_kappa, map_x;
    KroneckerFeatures data;
};

DgFeatures build_dg_features(const DomainCollection &train, const KernelConfig &config,
                             const RffDims &dims, std::uint64_t seed,
                             RffVariant variant = RffVariant::cos_sin);

/// Restricts factored features to a subset of task positions.
KroneckerFeatures select_task_features(const KroneckerFeatures &all,
                                       const std::vector<std::size_t> &positions);

DgModel fit_dg(const DomainCollection &train, const KernelConfig &config, const RffDims &dims,
               LossKind loss, double lambda, std::uint64_t seed, const SolverOptions &opts = {},
               TrainTrace *trace = nullptr);

/// Embedding and point features of a task under a fitted model; labels are
/// never read.
Vector task_factor(const DgModel &model, const PointMatrix &X);
Matrix scores_task(const DgModel &model, const PointMatrix &X);
IndexVector predict_task(const DgModel &model, const PointMatrix &X);
IndexVector predict_task(const DgModel &model, const TaskDataset &task);

/// One classifier on the point features alone, same task weighting.
struct PoolingModel {
    RffMap map_x;
    LinearModel linear;
};

PoolingModel fit_pooling(const DomainCollection &train, double sigma_x, Eigen::Index D,
                         LossKind loss, double lambda, std::uint64_t seed,
                         const SolverOptions &opts = {});
IndexVector predict_task(const PoolingModel &model, const TaskDataset &task);

/// Exact-kernel model in representer form over the training points.
struct KernelDgModel {
    DomainCollection train;
    KernelConfig config;
    KernelModel model;
};

KernelDgModel fit_kernel_dg(const DomainCollection &train, const KernelConfig &config,
                            LossKind loss, double lambda, const KernelTrainOptions &opts = {});
IndexVector predict_task(const KernelDgModel &model, const TaskDataset &task);

struct EvalReport {
    std::vector<std::pair<int, double>> per_task_error; ///< (task id, error fraction)
    double mean_error = 0.0;
    double std_error = 0.0; ///< population standard deviation across tasks
    std::vector<std::pair<std::string, double>> config;
};

using TaskPredictor = std::function<IndexVector(const TaskDataset &)>;

EvalReport evaluate(const TaskPredictor &predictor, const DomainCollection &test);
EvalReport evaluate(const DgModel &model, const DomainCollection &test);
EvalReport evaluate(const PoolingModel &model, const DomainCollection &test);

/// Hyperparameter grid. Bandwidth entries multiply the median heuristic:
/// median pairwise point distance for sigma_x and sigma_xp, median pairwise
/// embedding distance across tasks for sigma_kappa.
struct Grid {
    std::vector<double> sigma_x{0.1, 0.3, 1.0, 3.0, 10.0};
    std::vector<double> sigma_xp{0.1, 0.3, 1.0, 3.0, 10.0};
    std::vector<double> sigma_kappa{0.1, 0.3, 1.0, 3.0, 10.0};
    std::vector<double> lambda{1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};

    std::size_t cells() const {
        return sigma_x.size() * sigma_xp.size() * sigma_kappa.size() * lambda.size();
    }
};

struct CvCell {
    KernelConfig config; ///< resolved bandwidths
    double lambda = 0.0;
    double multiplier_x = 1.0, multiplier_xp = 1.0, multiplier_kappa = 1.0;
    double cv_error = 0.0;
};

struct CvResult {
    CvCell best;
    std::vector<CvCell> table; ///< grid iteration order: sigma_x, sigma_xp, sigma_kappa, lambda
    std::vector<std::vector<std::size_t>> folds; ///< task positions held out per fold
};

/// Task-level folds: a deterministic shuffle of positions dealt round-robin.
std::vector<std::vector<std::size_t>> task_folds(std::size_t num_tasks, int folds,
                                                 std::uint64_t seed);

double median_embedding_distance(const DomainCollection &collection, const RffMap &map_xp);

CvResult cross_validate(const DomainCollection &train, const Grid &grid, int folds,
                        LossKind loss, const RffDims &dims, std::uint64_t seed,
                        const SolverOptions &opts = {});

/// Pooling grid search over sigma_x multipliers and lambda only; the other
/// grid axes are ignored.
CvResult cross_validate_pooling(const DomainCollection &train, const Grid &grid, int folds,
                                LossKind loss, Eigen::Index D, std::uint64_t seed,
                                const SolverOptions &opts = {});

enum class DatasetKind { synthetic, mnist_mod, generic };

std::string_view to_string(DatasetKind kind);
DatasetKind parse_dataset(std::string_view name);

struct BenchmarkSpec {
    DatasetKind dataset = DatasetKind::synthetic;
    std::filesystem::path collection_dir; ///< generic
    std::filesystem::path idx_images;     ///< mnist_mod
    std::filesystem::path idx_labels;     ///< mnist_mod
    int num_tasks = 100;
    int n_per_task = 100;
    int n_train = 80;
    int reps = 10;
    int folds = 5;
    RffDims dims;
    Grid grid;
    LossKind loss = LossKind::multinomial_logistic;
    SolverOptions solver;
    std::uint64_t seed = 0;
};

struct BenchmarkRow {
    std::string dataset;
    std::string method; ///< "pooling" or "proposed"
    int rep = 0;
    double mean_error_pct = 0.0;
    double std_error_pct = 0.0;
    KernelConfig config;
    double lambda = 0.0;
};

struct BenchmarkSummary {
    std::string method;
    double mean_pct = 0.0; ///< mean over repetitions of the per-rep mean error
    double std_pct = 0.0;  ///< population std over repetitions
};

struct BenchmarkResult {
    std::vector<BenchmarkRow> rows; ///< rep-major, pooling before proposed
    std::vector<BenchmarkSummary> summary;
};

/// Per repetition: regenerate or resplit with a child seed, cross-validate
/// both methods on the training tasks, refit, evaluate on the test tasks.
BenchmarkResult benchmark(const BenchmarkSpec &spec);

/// CSV with header dataset,method,rep,mean_error_pct,std_error_pct,
/// sigma_x,sigma_xp,sigma_kappa,lambda.
std::string benchmark_csv(const BenchmarkResult &result);

void save_model(const std::filesystem::path &path, const DgModel &model);
DgModel load_model(const std::filesystem::path &path);

} // namespace mdg
