#include "mdg/dg.hpp"
#include "mdg/error.hpp"
#include "mdg/parallel.hpp"
#include "mdg/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

namespace mdg {

MapSeeds MapSeeds::from(std::uint64_t seed) {
    return {Rng::derive_seed(seed, 1), Rng::derive_seed(seed, 2), Rng::derive_seed(seed, 3)};
}

namespace {

Matrix task_embeddings(const DomainCollection &collection, const RffMap &map_xp) {
    Matrix mu(static_cast<Eigen::Index>(collection.size()), map_xp.dim);
    parallel_for(collection.size(), [&](std::size_t i) {
        mu.row(static_cast<Eigen::Index>(i)) = embed_task(map_xp, collection.tasks[i]).transpose();
    });
    return mu;
}

Matrix stacked_point_features(const DomainCollection &collection, const RffMap &map_x) {
    return features(map_x, stack_points(collection));
}

void check_train(const DomainCollection &train, std::size_t min_tasks) {
    if (train.size() < min_tasks)
        throw UsageError("need at least " + std::to_string(min_tasks) + " training tasks");
    train.validate();
    require(train.num_classes >= 2, "need at least two classes");
}

} // namespace

DgFeatures build_dg_features(const DomainCollection &train, const KernelConfig &config,
                             const RffDims &dims, std::uint64_t seed, RffVariant variant) {
    config.validate();
    const auto seeds = MapSeeds::from(seed);
    DgFeatures f;
    f.map_xp = sample_rff(train.dim, dims.embed, config.sigma_xp, seeds.embed, variant);
    f.map_kappa = sample_rff(dims.embed, dims.kappa, config.sigma_kappa, seeds.kappa, variant);
    f.map_x = sample_rff(train.dim, dims.point, config.sigma_x, seeds.point, variant);
    const Matrix mu = task_embeddings(train, f.map_xp);
    f.data.A = features(f.map_kappa, PointMatrix(mu));
    f.data.B = stacked_point_features(train, f.map_x);
    f.data.labels = stack_labels(train);
    f.data.task = stack_task_index(train);
    f.data.num_classes = train.num_classes;
    return f;
}

KroneckerFeatures select_task_features(const KroneckerFeatures &all,
                                       const std::vector<std::size_t> &positions) {
    std::vector<Eigen::Index> offsets(static_cast<std::size_t>(all.A.rows()) + 1, 0);
    for (Eigen::Index s = 0; s < all.task.size(); ++s) offsets[static_cast<std::size_t>(all.task(s)) + 1]++;
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    Eigen::Index m = 0;
    for (auto p : positions) m += offsets[p + 1] - offsets[p];
    KroneckerFeatures out;
    out.num_classes = all.num_classes;
    out.A.resize(static_cast<Eigen::Index>(positions.size()), all.A.cols());
    out.B.resize(m, all.B.cols());
    out.labels.resize(m);
    out.task.resize(m);
    Eigen::Index r = 0;
    for (std::size_t k = 0; k < positions.size(); ++k) {
        const auto p = positions[k];
        const auto n = offsets[p + 1] - offsets[p];
        out.A.row(static_cast<Eigen::Index>(k)) = all.A.row(static_cast<Eigen::Index>(p));
        out.B.middleRows(r, n) = all.B.middleRows(offsets[p], n);
        out.labels.segment(r, n) = all.labels.segment(offsets[p], n);
        out.task.segment(r, n).setConstant(static_cast<int>(k));
        r += n;
    }
    return out;
}

DgModel fit_dg(const DomainCollection &train, const KernelConfig &config, const RffDims &dims,
               LossKind loss, double lambda, std::uint64_t seed, const SolverOptions &opts,
               TrainTrace *trace) {
    check_train(train, 2);
    auto f = build_dg_features(train, config, dims, seed);
    DgModel model;
    model.linear = train_kronecker(f.data, loss, lambda, opts, trace);
    model.map_xp = std::move(f.map_xp);
    model.map_kappa = std::move(f.map_kappa);
    model.map_x = std::move(f.map_x);
    model.config = config;
    model.seed = seed;
    return model;
}

Vector task_factor(const DgModel &model, const PointMatrix &X) {
    return point_features(model.map_kappa, embed_task(model.map_xp, X));
}

Matrix scores_task(const DgModel &model, const PointMatrix &X) {
    require_dims(X.cols() == model.map_x.input_dim(), "predict_task: feature dimension mismatch");
    if (X.rows() == 0) throw UsageError("predict_task: empty task");
    return model.linear.scores(task_factor(model, X), features(model.map_x, X));
}

namespace {

IndexVector argmax_columns(const Matrix &S) {
    IndexVector out(S.cols());
    for (Eigen::Index s = 0; s < S.cols(); ++s) out(s) = argmax_class(S.col(s));
    return out;
}

} // namespace

IndexVector predict_task(const DgModel &model, const PointMatrix &X) {
    return argmax_columns(scores_task(model, X));
}

IndexVector predict_task(const DgModel &model, const TaskDataset &task) {
    return predict_task(model, task.X);
}

PoolingModel fit_pooling(const DomainCollection &train, double sigma_x, Eigen::Index D,
                         LossKind loss, double lambda, std::uint64_t seed,
                         const SolverOptions &opts) {
    check_train(train, 1);
    PoolingModel model;
    model.map_x = sample_rff(train.dim, D, sigma_x, MapSeeds::from(seed).point);
    TaskFeatures data;
    data.Z = stacked_point_features(train, model.map_x);
    data.labels = stack_labels(train);
    data.task = stack_task_index(train);
    data.num_classes = train.num_classes;
    model.linear = train_linear(data, loss, lambda, opts);
    return model;
}

IndexVector predict_task(const PoolingModel &model, const TaskDataset &task) {
    if (task.size() == 0) throw UsageError("predict_task: empty task");
    return predict_rows(model.linear, features(model.map_x, task.X));
}

KernelDgModel fit_kernel_dg(const DomainCollection &train, const KernelConfig &config,
                            LossKind loss, double lambda, const KernelTrainOptions &opts) {
    check_train(train, 1);
    KernelDgModel out;
    out.train = train;
    out.config = config;
    const Matrix K = gram_extended(train, config, GramOptions{opts.max_points});
    out.model = train_kernel(K, stack_task_index(train), stack_labels(train), train.num_classes,
                             loss, lambda, opts);
    return out;
}

IndexVector predict_task(const KernelDgModel &model, const TaskDataset &task) {
    if (task.size() == 0) throw UsageError("predict_task: empty task");
    return argmax_columns(model.model.scores(gram_extended_cross(model.train, task, model.config)));
}

// ---------------------------------------------------------------- evaluation

EvalReport evaluate(const TaskPredictor &predictor, const DomainCollection &test) {
    require(test.size() >= 1, "evaluate: empty test collection");
    EvalReport report;
    report.per_task_error.resize(test.size());
    parallel_for(test.size(), [&](std::size_t i) {
        const auto &t = test.tasks[i];
        const IndexVector pred = predictor(t);
        require_dims(pred.size() == t.size(), "evaluate: prediction count mismatch");
        const auto wrong = (pred.array() != t.y.array()).count();
        report.per_task_error[i] = {t.task_id, static_cast<double>(wrong) / static_cast<double>(t.size())};
    });
    double sum = 0.0;
    for (const auto &[id, e] : report.per_task_error) sum += e;
    report.mean_error = sum / static_cast<double>(test.size());
    double var = 0.0;
    for (const auto &[id, e] : report.per_task_error) var += (e - report.mean_error) * (e - report.mean_error);
    report.std_error = std::sqrt(var / static_cast<double>(test.size()));
    return report;
}

EvalReport evaluate(const DgModel &model, const DomainCollection &test) {
    auto r = evaluate([&](const TaskDataset &t) { return predict_task(model, t); }, test);
    r.config = {{"sigma_x", model.config.sigma_x},
                {"sigma_xp", model.config.sigma_xp},
                {"sigma_kappa", model.config.sigma_kappa},
                {"lambda", model.linear.lambda}};
    return r;
}

EvalReport evaluate(const PoolingModel &model, const DomainCollection &test) {
    auto r = evaluate([&](const TaskDataset &t) { return predict_task(model, t); }, test);
    r.config = {{"sigma_x", model.map_x.sigma}, {"lambda", model.linear.lambda}};
    return r;
}

// ---------------------------------------------------------------- cross-validation

std::vector<std::vector<std::size_t>> task_folds(std::size_t num_tasks, int folds,
                                                 std::uint64_t seed) {
    require(folds >= 2, "cross_validate: need at least two folds");
    require(static_cast<std::size_t>(folds) <= num_tasks,
            "cross_validate: more folds than training tasks");
    std::vector<std::size_t> order(num_tasks);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = num_tasks - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(folds));
    for (std::size_t k = 0; k < num_tasks; ++k) out[k % out.size()].push_back(order[k]);
    for (auto &f : out) std::sort(f.begin(), f.end());
    return out;
}

double median_embedding_distance(const DomainCollection &collection, const RffMap &map_xp) {
    require(collection.size() >= 2, "median_embedding_distance: need at least two tasks");
    const Matrix mu = task_embeddings(collection, map_xp);
    PointMatrix rows = mu;
    return median_pairwise_distance(rows, 0, rows.rows());
}

namespace {

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t> &held_out) {
    std::vector<std::size_t> out;
    out.reserve(n - held_out.size());
    for (std::size_t i = 0, k = 0; i < n; ++i) {
        if (k < held_out.size() && held_out[k] == i) {
            ++k;
            continue;
        }
        out.push_back(i);
    }
    return out;
}

double point_median(const DomainCollection &train, std::uint64_t seed) {
    return median_pairwise_distance(stack_points(train), Rng::derive_seed(seed, 0x3ed1a9ULL));
}

template <typename Cell>
std::size_t argmin_error(const std::vector<Cell> &table) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < table.size(); ++k)
        if (table[k].cv_error < table[best].cv_error) best = k;
    return best;
}

void check_grid(const Grid &grid, bool pooling) {
    const bool empty = grid.sigma_x.empty() || grid.lambda.empty() ||
                       (!pooling && (grid.sigma_xp.empty() || grid.sigma_kappa.empty()));
    if (empty) throw UsageError("cross_validate: empty grid");
}

} // namespace

CvResult cross_validate(const DomainCollection &train, const Grid &grid, int folds, LossKind loss,
                        const RffDims &dims, std::uint64_t seed, const SolverOptions &opts) {
    check_grid(grid, false);
    check_train(train, 2);
    CvResult result;
    result.folds = task_folds(train.size(), folds, Rng::derive_seed(seed, 0xf01dULL));
    const std::uint64_t fit_seed = Rng::derive_seed(seed, 0xf17ULL);
    const double med_x = point_median(train, seed);

    struct Bandwidths {
        double mx, mxp, mk;
    };
    std::vector<Bandwidths> bands;
    for (double mx : grid.sigma_x)
        for (double mxp : grid.sigma_xp)
            for (double mk : grid.sigma_kappa) bands.push_back({mx, mxp, mk});

    result.table.resize(bands.size() * grid.lambda.size());
    parallel_for(bands.size(), [&](std::size_t b) {
        const auto [mx, mxp, mk] = bands[b];
        KernelConfig cfg;
        cfg.sigma_x = mx * med_x;
        cfg.sigma_xp = mxp * med_x;
        const RffMap map_xp = sample_rff(train.dim, dims.embed, cfg.sigma_xp, MapSeeds::from(fit_seed).embed);
        cfg.sigma_kappa = mk * std::max(median_embedding_distance(train, map_xp), 1e-12);
        const auto all = build_dg_features(train, cfg, dims, fit_seed);
        std::vector<double> err(grid.lambda.size(), 0.0);
        for (const auto &held_out : result.folds) {
            const auto fit_part = select_task_features(all.data, complement(train.size(), held_out));
            for (std::size_t l = 0; l < grid.lambda.size(); ++l) {
                const auto model = train_kronecker(fit_part, loss, grid.lambda[l], opts);
                double fold_err = 0.0;
                for (auto p : held_out) {
                    const auto &t = train.tasks[p];
                    const auto offset = std::find(all.data.task.begin(), all.data.task.end(),
                                                  static_cast<int>(p)) - all.data.task.begin();
                    const Matrix S = model.scores(all.data.A.row(static_cast<Eigen::Index>(p)).transpose(),
                                                  all.data.B.middleRows(offset, t.size()));
                    Eigen::Index wrong = 0;
                    for (Eigen::Index s = 0; s < S.cols(); ++s) wrong += argmax_class(S.col(s)) != t.y(s);
                    fold_err += static_cast<double>(wrong) / static_cast<double>(t.size());
                }
                err[l] += fold_err / static_cast<double>(held_out.size());
            }
        }
        for (std::size_t l = 0; l < grid.lambda.size(); ++l) {
            CvCell cell;
            cell.config = cfg;
            cell.lambda = grid.lambda[l];
            cell.multiplier_x = mx;
            cell.multiplier_xp = mxp;
            cell.multiplier_kappa = mk;
            cell.cv_error = err[l] / static_cast<double>(result.folds.size());
            result.table[b * grid.lambda.size() + l] = cell;
        }
    });
    result.best = result.table[argmin_error(result.table)];
    return result;
}

CvResult cross_validate_pooling(const DomainCollection &train, const Grid &grid, int folds,
                                LossKind loss, Eigen::Index D, std::uint64_t seed,
                                const SolverOptions &opts) {
    check_grid(grid, true);
    check_train(train, 2);
    CvResult result;
    result.folds = task_folds(train.size(), folds, Rng::derive_seed(seed, 0xf01dULL));
    const std::uint64_t fit_seed = Rng::derive_seed(seed, 0xf17ULL);
    const double med_x = point_median(train, seed);
    const IndexVector labels = stack_labels(train);
    const IndexVector task = stack_task_index(train);
    result.table.resize(grid.sigma_x.size() * grid.lambda.size());
    parallel_for(grid.sigma_x.size(), [&](std::size_t b) {
        KernelConfig cfg;
        cfg.sigma_x = grid.sigma_x[b] * med_x;
        const RffMap map_x = sample_rff(train.dim, D, cfg.sigma_x, MapSeeds::from(fit_seed).point);
        const Matrix Z = stacked_point_features(train, map_x);
        std::vector<Eigen::Index> offsets(train.size() + 1, 0);
        for (std::size_t i = 0; i < train.size(); ++i) offsets[i + 1] = offsets[i] + train.tasks[i].size();
        std::vector<double> err(grid.lambda.size(), 0.0);
        for (const auto &held_out : result.folds) {
            const auto keep = complement(train.size(), held_out);
            TaskFeatures part;
            part.num_classes = train.num_classes;
            Eigen::Index m = 0;
            for (auto p : keep) m += train.tasks[p].size();
            part.Z.resize(m, Z.cols());
            part.labels.resize(m);
            part.task.resize(m);
            Eigen::Index r = 0;
            for (std::size_t k = 0; k < keep.size(); ++k) {
                const auto n = train.tasks[keep[k]].size();
                part.Z.middleRows(r, n) = Z.middleRows(offsets[keep[k]], n);
                part.labels.segment(r, n) = labels.segment(offsets[keep[k]], n);
                part.task.segment(r, n).setConstant(static_cast<int>(k));
                r += n;
            }
            for (std::size_t l = 0; l < grid.lambda.size(); ++l) {
                const auto model = train_linear(part, loss, grid.lambda[l], opts);
                double fold_err = 0.0;
                for (auto p : held_out) {
                    const auto &t = train.tasks[p];
                    const IndexVector pred = predict_rows(model, Z.middleRows(offsets[p], t.size()));
                    fold_err += static_cast<double>((pred.array() != t.y.array()).count()) /
                                static_cast<double>(t.size());
                }
                err[l] += fold_err / static_cast<double>(held_out.size());
            }
        }
        for (std::size_t l = 0; l < grid.lambda.size(); ++l) {
            CvCell cell;
            cell.config = cfg;
            cell.config.sigma_xp = cell.config.sigma_kappa = 1.0;
            cell.lambda = grid.lambda[l];
            cell.multiplier_x = grid.sigma_x[b];
            cell.cv_error = err[l] / static_cast<double>(result.folds.size());
            result.table[b * grid.lambda.size() + l] = cell;
        }
    });
    result.best = result.table[argmin_error(result.table)];
    return result;
}

// ---------------------------------------------------------------- benchmark

std::string_view to_string(DatasetKind kind) {
    switch (kind) {
    case DatasetKind::synthetic: return "synthetic";
    case DatasetKind::mnist_mod: return "mnist_mod";
    case DatasetKind::generic: return "generic";
    }
    return "unknown";
}

DatasetKind parse_dataset(std::string_view name) {
    if (name == "synthetic") return DatasetKind::synthetic;
    if (name == "mnist_mod" || name == "mnist-mod") return DatasetKind::mnist_mod;
    if (name == "generic") return DatasetKind::generic;
    throw UsageError("unknown dataset '" + std::string(name) + "'");
}

namespace {

double population_std(const std::vector<double> &v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size()));
}

} // namespace

BenchmarkResult benchmark(const BenchmarkSpec &spec) {
    require(spec.reps >= 1, "benchmark: reps must be >= 1");
    std::optional<DomainCollection> generic;
    std::optional<IdxImages> images;
    IndexVector labels;
    switch (spec.dataset) {
    case DatasetKind::generic: generic = load_collection(spec.collection_dir); break;
    case DatasetKind::mnist_mod:
        images = load_idx_images(spec.idx_images);
        labels = load_idx_labels(spec.idx_labels);
        break;
    case DatasetKind::synthetic: break;
    }
    const std::string name(to_string(spec.dataset));
    BenchmarkResult result;
    result.rows.resize(2 * static_cast<std::size_t>(spec.reps));
    const Rng root(spec.seed);
    parallel_for(static_cast<std::size_t>(spec.reps), [&](std::size_t rep) {
        const Rng rng = root.child(rep);
        const std::uint64_t data_seed = rng.child(0).seed();
        const std::uint64_t split_seed = rng.child(1).seed();
        const std::uint64_t cv_seed = rng.child(2).seed();
        const std::uint64_t fit_seed = rng.child(3).seed();
        DomainCollection all;
        switch (spec.dataset) {
        case DatasetKind::synthetic: all = generate_synthetic(spec.num_tasks, spec.n_per_task, data_seed); break;
        case DatasetKind::mnist_mod:
            all = make_mnist_mod(*images, labels, spec.num_tasks, spec.n_per_task, data_seed);
            break;
        case DatasetKind::generic: all = *generic; break;
        }
        const auto [train, test] = split_tasks(all, spec.n_train, split_seed);

        const auto pool_cv = cross_validate_pooling(train, spec.grid, spec.folds, spec.loss,
                                                    spec.dims.point, cv_seed, spec.solver);
        const auto pooling = fit_pooling(train, pool_cv.best.config.sigma_x, spec.dims.point,
                                         spec.loss, pool_cv.best.lambda, fit_seed, spec.solver);
        const auto pool_eval = evaluate(pooling, test);

        const auto dg_cv = cross_validate(train, spec.grid, spec.folds, spec.loss, spec.dims, cv_seed, spec.solver);
        const auto dg = fit_dg(train, dg_cv.best.config, spec.dims, spec.loss, dg_cv.best.lambda,
                               fit_seed, spec.solver);
        const auto dg_eval = evaluate(dg, test);

        const int r = static_cast<int>(rep);
        result.rows[2 * rep] = {name, "pooling", r, 100.0 * pool_eval.mean_error,
                                100.0 * pool_eval.std_error, pool_cv.best.config, pool_cv.best.lambda};
        result.rows[2 * rep + 1] = {name, "proposed", r, 100.0 * dg_eval.mean_error,
                                    100.0 * dg_eval.std_error, dg_cv.best.config, dg_cv.best.lambda};
    });
    for (const char *method : {"pooling", "proposed"}) {
        std::vector<double> v;
        for (const auto &row : result.rows)
            if (row.method == method) v.push_back(row.mean_error_pct);
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        result.summary.push_back({method, mean, population_std(v, mean)});
    }
    return result;
}

std::string benchmark_csv(const BenchmarkResult &result) {
    std::ostringstream out;
    out << "dataset,method,rep,mean_error_pct,std_error_pct,sigma_x,sigma_xp,sigma_kappa,lambda\n";
    char buf[256];
    for (const auto &r : result.rows) {
        std::snprintf(buf, sizeof buf, "%s,%s,%d,%.6f,%.6f,%.10g,%.10g,%.10g,%.10g\n", r.dataset.c_str(),
                      r.method.c_str(), r.rep, r.mean_error_pct, r.std_error_pct, r.config.sigma_x,
                      r.config.sigma_xp, r.config.sigma_kappa, r.lambda);
        out << buf;
    }
    return out.str();
}

// ---------------------------------------------------------------- model file

namespace {

constexpr std::array<char, 8> kModelMagic{'M', 'D', 'G', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kModelVersion = 1;

void put_u64(std::ostream &out, std::uint64_t v) {
    std::array<char, 8> b;
    for (int k = 0; k < 8; ++k) b[static_cast<std::size_t>(k)] = static_cast<char>((v >> (8 * k)) & 0xff);
    out.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream &in) {
    std::array<unsigned char, 8> b{};
    if (!in.read(reinterpret_cast<char *>(b.data()), 8)) throw IoError("model file: truncated");
    std::uint64_t v = 0;
    for (int k = 7; k >= 0; --k) v = (v << 8) | b[static_cast<std::size_t>(k)];
    return v;
}

void put_matrix(std::ostream &out, const Matrix &M) {
    put_u64(out, static_cast<std::uint64_t>(M.rows()));
    put_u64(out, static_cast<std::uint64_t>(M.cols()));
    for (Eigen::Index r = 0; r < M.rows(); ++r)
        for (Eigen::Index c = 0; c < M.cols(); ++c) put_u64(out, std::bit_cast<std::uint64_t>(M(r, c)));
}

Matrix get_matrix(std::istream &in) {
    const auto rows = static_cast<Eigen::Index>(get_u64(in));
    const auto cols = static_cast<Eigen::Index>(get_u64(in));
    if (rows < 0 || cols < 0 || static_cast<double>(rows) * static_cast<double>(cols) > 1e10)
        throw FormatError("model file: implausible matrix shape");
    Matrix M(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = std::bit_cast<double>(get_u64(in));
    return M;
}

} // namespace

void save_model(const std::filesystem::path &path, const DgModel &model) {
    nlohmann::ordered_json meta;
    meta["kind"] = "dg";
    meta["loss"] = to_string(model.linear.loss);
    meta["lambda"] = model.linear.lambda;
    meta["num_classes"] = model.linear.num_classes;
    meta["d"] = model.map_x.input_dim();
    meta["sigma_x"] = model.config.sigma_x;
    meta["sigma_xp"] = model.config.sigma_xp;
    meta["sigma_kappa"] = model.config.sigma_kappa;
    meta["dims"] = {{"embed", model.map_xp.dim}, {"kappa", model.map_kappa.dim}, {"point", model.map_x.dim}};
    meta["variant"] = model.map_x.variant == RffVariant::cos_sin ? "cos_sin" : "cosine_phase";
    meta["seed"] = model.seed;
    meta["map_seeds"] = {model.map_xp.seed, model.map_kappa.seed, model.map_x.seed};
    const std::string text = meta.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(kModelMagic.data(), kModelMagic.size());
    put_u64(out, kModelVersion);
    put_u64(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    put_matrix(out, model.linear.A);
    put_matrix(out, model.linear.C);
    if (!out) throw IoError("write failed for " + path.string());
}

DgModel load_model(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size())) throw IoError("model file: truncated");
    if (magic != kModelMagic) throw FormatError("model file: bad magic");
    if (get_u64(in) != kModelVersion) throw FormatError("model file: unsupported version");
    const auto len = get_u64(in);
    if (len > (1u << 24)) throw FormatError("model file: implausible header length");
    std::string text(len, '\0');
    if (!in.read(text.data(), static_cast<std::streamsize>(len))) throw IoError("model file: truncated");
    DgModel model;
    try {
        const auto meta = nlohmann::json::parse(text);
        model.config.sigma_x = meta.at("sigma_x").get<double>();
        model.config.sigma_xp = meta.at("sigma_xp").get<double>();
        model.config.sigma_kappa = meta.at("sigma_kappa").get<double>();
        model.seed = meta.at("seed").get<std::uint64_t>();
        const auto d = meta.at("d").get<Eigen::Index>();
        const auto &dims = meta.at("dims");
        const auto variant = meta.at("variant").get<std::string>() == "cos_sin" ? RffVariant::cos_sin
                                                                               : RffVariant::cosine_phase;
        const auto &seeds = meta.at("map_seeds");
        model.map_xp = sample_rff(d, dims.at("embed").get<Eigen::Index>(), model.config.sigma_xp,
                                  seeds.at(0).get<std::uint64_t>(), variant);
        model.map_kappa = sample_rff(model.map_xp.dim, dims.at("kappa").get<Eigen::Index>(),
                                     model.config.sigma_kappa, seeds.at(1).get<std::uint64_t>(), variant);
        model.map_x = sample_rff(d, dims.at("point").get<Eigen::Index>(), model.config.sigma_x,
                                 seeds.at(2).get<std::uint64_t>(), variant);
        model.linear.loss = parse_loss(meta.at("loss").get<std::string>());
        model.linear.lambda = meta.at("lambda").get<double>();
        model.linear.num_classes = meta.at("num_classes").get<int>();
    } catch (const nlohmann::json::exception &e) {
        throw FormatError(std::string("model file: ") + e.what());
    }
    model.linear.A = get_matrix(in);
    model.linear.C = get_matrix(in);
    if (model.linear.A.cols() != model.map_kappa.dim || model.linear.C.cols() != model.map_x.dim ||
        model.linear.C.rows() != model.linear.num_classes * model.linear.A.rows())
        throw FormatError("model file: weight shapes do not match the feature maps");
    return model;
}

} // namespace mdg
