#include "mdg/solver.hpp"
#include "mdg/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mdg {

Vector task_weights(const IndexVector &task) {
    if (task.size() == 0) return Vector();
    const int N = task.maxCoeff() + 1;
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(N);
    for (Eigen::Index s = 0; s < task.size(); ++s) counts(task(s)) += 1.0;
    int present = 0;
    for (int i = 0; i < N; ++i) present += counts(i) > 0 ? 1 : 0;
    Vector w(task.size());
    for (Eigen::Index s = 0; s < task.size(); ++s) w(s) = 1.0 / (present * counts(task(s)));
    return w;
}

int argmax_class(const Eigen::Ref<const Vector> &scores) {
    Eigen::Index best = 0;
    for (Eigen::Index m = 1; m < scores.size(); ++m)
        if (scores(m) > scores(best)) best = m;
    return static_cast<int>(best);
}

namespace {

struct Samples {
    const IndexVector &labels;
    Vector weights;
    int num_classes;
};

// Weighted empirical loss of a c x M score matrix; fills the weighted
// per-sample subgradients into G.
double empirical_loss(LossKind loss, const Matrix &S, const Samples &samples, Matrix &G) {
    G.resize(S.rows(), S.cols());
    double total = 0.0;
    for (Eigen::Index s = 0; s < S.cols(); ++s) {
        const double w = samples.weights(s);
        total += w * loss_value_grad(loss, S.col(s), samples.labels(s), G.col(s));
        G.col(s) *= w;
    }
    return total;
}

// A problem exposes the parameter shape, a linear lift P -> H under which
// <X, Y> = sum(lift(X) .* Y), scores (c x M) computed from the lifted
// parameters, and the pull-back of score gradients to parameter space.
struct DenseProblem {
    const Matrix &Z;
    Eigen::Index rows, cols;
    Matrix lift(const Matrix &P) const { return P; }
    Matrix scores(const Matrix &H) const { return H * Z.transpose(); }
    Matrix backprop(const Matrix &G) const { return G * Z; }
};

struct GramProblem {
    const Matrix &K;
    Eigen::Index rows, cols;
    Matrix lift(const Matrix &alpha) const { return alpha * K; }
    Matrix scores(const Matrix &H) const { return H; }
    Matrix backprop(const Matrix &G) const { return G; }
};

struct KroneckerProblem {
    const KroneckerFeatures &data;
    Matrix task_gram; // A A'
    std::vector<Eigen::Index> offsets; // task start rows, size N+1
    int c;
    Eigen::Index N;
    Eigen::Index rows, cols;

    // blockdiag(task_gram) P
    Matrix lift(const Matrix &P) const {
        Matrix H(P.rows(), P.cols());
        for (int m = 0; m < c; ++m) H.middleRows(m * N, N).noalias() = task_gram * P.middleRows(m * N, N);
        return H;
    }
    Matrix scores(const Matrix &H) const {
        Matrix S(c, data.B.rows());
        Matrix Hi(c, H.cols());
        for (Eigen::Index i = 0; i < N; ++i) {
            for (int m = 0; m < c; ++m) Hi.row(m) = H.row(m * N + i);
            const auto n = offsets[i + 1] - offsets[i];
            S.middleCols(offsets[i], n).noalias() = Hi * data.B.middleRows(offsets[i], n).transpose();
        }
        return S;
    }
    Matrix backprop(const Matrix &G) const {
        Matrix U(rows, cols);
        Matrix Ui(c, cols);
        for (Eigen::Index i = 0; i < N; ++i) {
            const auto n = offsets[i + 1] - offsets[i];
            Ui.noalias() = G.middleCols(offsets[i], n) * data.B.middleRows(offsets[i], n);
            for (int m = 0; m < c; ++m) U.row(m * N + i) = Ui.row(m);
        }
        return U;
    }
};

double dot(const Matrix &X, const Matrix &Y) { return X.cwiseProduct(Y).sum(); }

// Parameters together with their lift.
struct Point {
    Matrix P, H;
};

struct Evaluation {
    double value = 0.0;
    Point direction; // gradient of the lifted model, in parameter coordinates
    double grad_sq = 0.0;
};

template <typename Problem>
class Descent {
public:
    Descent(const Problem &problem, LossKind loss, double lambda, const Samples &samples)
        : problem_(problem), loss_(loss), lambda_(lambda), samples_(samples) {}

    double value(const Point &x) const {
        Matrix G;
        return empirical_loss(loss_, problem_.scores(x.H), samples_, G) + lambda_ * dot(x.H, x.P);
    }
    double value(const Matrix &P) const { return value(Point{P, problem_.lift(P)}); }

    Evaluation evaluate(const Point &x) const {
        Evaluation e;
        Matrix G;
        e.value = empirical_loss(loss_, problem_.scores(x.H), samples_, G) + lambda_ * dot(x.H, x.P);
        e.direction.P = problem_.backprop(G) + 2.0 * lambda_ * x.P;
        e.direction.H = problem_.lift(e.direction.P);
        e.grad_sq = dot(e.direction.H, e.direction.P);
        return e;
    }

    Matrix run(const SolverOptions &opts, TrainTrace *trace) const {
        require(opts.max_iters >= 0, "solver: max_iters must be >= 0");
        require(opts.tol >= 0.0, "solver: tol must be >= 0");
        const bool smooth = is_smooth(loss_);
        Point x{Matrix::Zero(problem_.rows, problem_.cols), Matrix::Zero(problem_.rows, problem_.cols)};
        auto cur = evaluate(x);
        check_finite(cur.value);
        Point best = x;
        double best_value = cur.value;
        Point average;
        int averaged = 0;
        double eta = 1.0;
        double base_eta = 0.0;
        Point prev_x, prev_dir;
        int stalled = 0;
        double reference = best_value;
        TrainTrace local;
        int it = 0;
        auto step = [](const Point &from, double t, const Point &d) {
            return Point{from.P - t * d.P, from.H - t * d.H};
        };
        for (; it < opts.max_iters; ++it) {
            if (cur.grad_sq == 0.0) {
                local.converged = true;
                break;
            }
            if (it > 0) {
                const Matrix sH = x.H - prev_x.H;
                const double sy = dot(sH, cur.direction.P - prev_dir.P);
                const double ss = dot(sH, x.P - prev_x.P);
                eta = (sy > 0.0 && ss > 0.0) ? ss / sy : 2.0 * eta;
                eta = std::clamp(eta, 1e-12, 1e12);
            }
            // Armijo backtracking
            bool accepted = false;
            Point trial;
            for (int k = 0; k < 100 && eta > 1e-20; ++k) {
                trial = step(x, eta, cur.direction);
                const double trial_value = value(trial);
                if (std::isfinite(trial_value) &&
                    trial_value <= cur.value - 1e-4 * eta * cur.grad_sq) {
                    accepted = true;
                    break;
                }
                eta *= 0.5;
            }
            if (!accepted) {
                if (smooth) {
                    // no representable decrease left
                    local.converged = true;
                    break;
                }
                // flat or kinked region: diminishing subgradient step
                if (base_eta == 0.0) base_eta = 1.0 / std::sqrt(std::max(cur.grad_sq, 1e-300));
                eta = base_eta / std::sqrt(static_cast<double>(it + 1));
                trial = step(x, eta, cur.direction);
                if (averaged == 0) {
                    average.P = Matrix::Zero(x.P.rows(), x.P.cols());
                    average.H = Matrix::Zero(x.H.rows(), x.H.cols());
                }
            } else if (!smooth && base_eta == 0.0) {
                base_eta = eta;
            }
            prev_x = std::move(x);
            prev_dir = std::move(cur.direction);
            x = std::move(trial);
            const double previous = cur.value;
            cur = evaluate(x);
            check_finite(cur.value);
            if (accepted) {
                local.accepted_from.push_back(previous);
                local.objective.push_back(cur.value);
            }
            if (averaged > 0 || !accepted) {
                ++averaged;
                const double w = 1.0 / static_cast<double>(averaged);
                average.P += w * (x.P - average.P);
                average.H += w * (x.H - average.H);
            }
            if (cur.value < best_value) {
                best_value = cur.value;
                best = x;
            }
            const double rel = (previous - cur.value) / std::max(std::abs(previous), 1e-300);
            if (smooth) {
                if (accepted && rel < opts.tol && std::sqrt(cur.grad_sq) <= 10.0 * opts.tol) {
                    local.converged = true;
                    ++it;
                    break;
                }
            } else {
                if ((reference - best_value) >= opts.tol * std::abs(reference)) {
                    reference = best_value;
                    stalled = 0;
                } else if (++stalled >= opts.stall_window) {
                    local.converged = true;
                    ++it;
                    break;
                }
            }
        }
        if (averaged > 0) {
            const double avg_value = value(average);
            if (avg_value < best_value) {
                best_value = avg_value;
                best = average;
            }
        }
        local.iterations = it;
        local.final_grad_norm = std::sqrt(evaluate(best).grad_sq);
        if (trace) *trace = std::move(local);
        return best.P;
    }

private:
    static void check_finite(double v) {
        if (!std::isfinite(v)) throw DivergenceError("solver: objective is not finite");
    }

    const Problem &problem_;
    LossKind loss_;
    double lambda_;
    const Samples &samples_;
};

void check_labels(const IndexVector &labels, const IndexVector &task, Eigen::Index samples,
                  int num_classes) {
    require(samples >= 1, "solver: need at least one sample");
    require(num_classes >= 2, "solver: need at least two classes");
    require_dims(labels.size() == samples && task.size() == samples,
                 "solver: labels/task size mismatch");
    if (labels.minCoeff() < 0 || labels.maxCoeff() >= num_classes)
        throw UsageError("solver: label out of range");
    if (task.minCoeff() < 0) throw UsageError("solver: negative task index");
}

void check_finite_input(const Matrix &M, const char *what) {
    if (!M.allFinite()) throw NumericError(std::string("solver: non-finite entries in ") + what);
}

void check_lambda(double lambda) {
    require(std::isfinite(lambda) && lambda > 0.0, "solver: lambda must be positive");
}

} // namespace

// ---------------------------------------------------------------- dense

double objective(const LinearModel &model, const Matrix &Z, const IndexVector &labels,
                 const IndexVector &task) {
    require_dims(Z.cols() == model.dim(), "objective: feature dimension mismatch");
    check_labels(labels, task, Z.rows(), model.num_classes());
    const Samples samples{labels, task_weights(task), model.num_classes()};
    Matrix G;
    return empirical_loss(model.loss, model.W * Z.transpose(), samples, G) +
           model.lambda * model.W.squaredNorm();
}

Matrix objective_gradient(const LinearModel &model, const Matrix &Z, const IndexVector &labels,
                          const IndexVector &task) {
    require_dims(Z.cols() == model.dim(), "objective: feature dimension mismatch");
    check_labels(labels, task, Z.rows(), model.num_classes());
    const Samples samples{labels, task_weights(task), model.num_classes()};
    Matrix G;
    empirical_loss(model.loss, model.W * Z.transpose(), samples, G);
    return G * Z + 2.0 * model.lambda * model.W;
}

LinearModel train_linear(const TaskFeatures &data, LossKind loss, double lambda,
                         const SolverOptions &opts, TrainTrace *trace) {
    check_lambda(lambda);
    check_labels(data.labels, data.task, data.Z.rows(), data.num_classes);
    check_finite_input(data.Z, "features");
    const Samples samples{data.labels, task_weights(data.task), data.num_classes};
    const DenseProblem problem{data.Z, data.num_classes, data.Z.cols()};
    LinearModel model;
    model.W = Descent<DenseProblem>(problem, loss, lambda, samples).run(opts, trace);
    model.lambda = lambda;
    model.loss = loss;
    return model;
}

int predict(const LinearModel &model, const Eigen::Ref<const Vector> &z) {
    require_dims(z.size() == model.dim(), "predict: feature dimension mismatch");
    return argmax_class(model.W * z);
}

IndexVector predict_rows(const LinearModel &model, const Matrix &Z) {
    require_dims(Z.cols() == model.dim(), "predict: feature dimension mismatch");
    const Matrix S = model.W * Z.transpose();
    IndexVector out(S.cols());
    for (Eigen::Index s = 0; s < S.cols(); ++s) out(s) = argmax_class(S.col(s));
    return out;
}

// ---------------------------------------------------------------- kronecker

namespace {

KroneckerProblem make_kronecker_problem(const KroneckerFeatures &data) {
    KroneckerProblem p{data, data.A * data.A.transpose(), {}, data.num_classes, data.A.rows(), 0, 0};
    p.rows = static_cast<Eigen::Index>(data.num_classes) * p.N;
    p.cols = data.B.cols();
    p.offsets.assign(static_cast<std::size_t>(p.N) + 1, 0);
    for (Eigen::Index s = 0; s < data.task.size(); ++s) {
        const int t = data.task(s);
        if (t >= p.N) throw UsageError("kronecker: task index beyond task factor rows");
        if (s > 0 && t < data.task(s - 1)) throw UsageError("kronecker: samples must be grouped by task");
        p.offsets[static_cast<std::size_t>(t) + 1] += 1;
    }
    for (std::size_t i = 1; i < p.offsets.size(); ++i) p.offsets[i] += p.offsets[i - 1];
    return p;
}

} // namespace

Matrix FactoredLinearModel::scores(const Eigen::Ref<const Vector> &a, const Matrix &B_rows) const {
    require_dims(a.size() == A.cols(), "scores: task factor dimension mismatch");
    require_dims(B_rows.cols() == C.cols(), "scores: point factor dimension mismatch");
    const Vector r = A * a;
    const Eigen::Index N = A.rows();
    Matrix H(num_classes, C.cols());
    for (int m = 0; m < num_classes; ++m) H.row(m) = r.transpose() * C.middleRows(m * N, N);
    return H * B_rows.transpose();
}

LinearModel FactoredLinearModel::dense() const {
    LinearModel out;
    out.lambda = lambda;
    out.loss = loss;
    const Eigen::Index N = A.rows(), Da = A.cols(), Db = C.cols();
    out.W.resize(num_classes, Da * Db);
    for (int m = 0; m < num_classes; ++m) {
        const Matrix V = A.transpose() * C.middleRows(m * N, N); // Da x Db
        for (Eigen::Index p = 0; p < Da; ++p) out.W.row(m).segment(p * Db, Db) = V.row(p);
    }
    return out;
}

FactoredLinearModel train_kronecker(const KroneckerFeatures &data, LossKind loss, double lambda,
                                    const SolverOptions &opts, TrainTrace *trace) {
    check_lambda(lambda);
    check_labels(data.labels, data.task, data.B.rows(), data.num_classes);
    check_finite_input(data.A, "task factors");
    check_finite_input(data.B, "point factors");
    const auto problem = make_kronecker_problem(data);
    const Samples samples{data.labels, task_weights(data.task), data.num_classes};
    FactoredLinearModel model;
    model.A = data.A;
    model.C = Descent<KroneckerProblem>(problem, loss, lambda, samples).run(opts, trace);
    model.lambda = lambda;
    model.loss = loss;
    model.num_classes = data.num_classes;
    return model;
}

double objective(const FactoredLinearModel &model, const KroneckerFeatures &data) {
    check_labels(data.labels, data.task, data.B.rows(), data.num_classes);
    const auto problem = make_kronecker_problem(data);
    const Samples samples{data.labels, task_weights(data.task), data.num_classes};
    return Descent<KroneckerProblem>(problem, model.loss, model.lambda, samples).value(model.C);
}

// ---------------------------------------------------------------- kernel

double objective(const KernelModel &model, const Matrix &gram, const IndexVector &labels,
                 const IndexVector &task) {
    require_dims(gram.rows() == gram.cols() && gram.cols() == model.alpha.cols(),
                 "objective: gram shape mismatch");
    check_labels(labels, task, gram.rows(), model.num_classes());
    const GramProblem problem{gram, model.alpha.rows(), model.alpha.cols()};
    const Samples samples{labels, task_weights(task), model.num_classes()};
    return Descent<GramProblem>(problem, model.loss, model.lambda, samples).value(model.alpha);
}

KernelModel train_kernel(const Matrix &gram, const IndexVector &task, const IndexVector &labels,
                         int num_classes, LossKind loss, double lambda,
                         const KernelTrainOptions &opts, TrainTrace *trace) {
    check_lambda(lambda);
    require_dims(gram.rows() == gram.cols(), "train_kernel: gram must be square");
    if (gram.rows() > opts.max_points)
        throw UsageError("train_kernel: gram size exceeds the cap of " + std::to_string(opts.max_points));
    check_labels(labels, task, gram.rows(), num_classes);
    check_finite_input(gram, "gram");
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -opts.psd_tolerance)
        throw NumericError("train_kernel: gram is not positive semidefinite");
    const GramProblem problem{gram, num_classes, gram.cols()};
    const Samples samples{labels, task_weights(task), num_classes};
    KernelModel model;
    model.alpha = Descent<GramProblem>(problem, loss, lambda, samples).run(opts.solver, trace);
    model.lambda = lambda;
    model.loss = loss;
    return model;
}

} // namespace mdg
