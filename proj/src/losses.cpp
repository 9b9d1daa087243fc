#include "mdg/losses.hpp"
#include "mdg/error.hpp"

#include <cmath>

namespace mdg {

std::string_view to_string(LossKind kind) {
    switch (kind) {
    case LossKind::crammer_singer: return "crammer_singer";
    case LossKind::multinomial_logistic: return "multinomial_logistic";
    case LossKind::weston_watkins: return "weston_watkins";
    case LossKind::lee: return "lee";
    }
    return "unknown";
}

LossKind parse_loss(std::string_view name) {
    if (name == "crammer_singer" || name == "cs") return LossKind::crammer_singer;
    if (name == "multinomial_logistic" || name == "mlr") return LossKind::multinomial_logistic;
    if (name == "weston_watkins" || name == "ww") return LossKind::weston_watkins;
    if (name == "lee") return LossKind::lee;
    throw UsageError("unknown loss '" + std::string(name) + "'");
}

bool is_smooth(LossKind kind) { return kind == LossKind::multinomial_logistic; }

namespace {

void check_label(const Eigen::Ref<const Vector> &a, int y) {
    if (a.size() < 2) throw UsageError("loss: need at least two classes");
    if (y < 0 || y >= a.size()) throw UsageError("loss: label out of range");
}

} // namespace

double loss_value_grad(LossKind kind, const Eigen::Ref<const Vector> &a, int y,
                       Eigen::Ref<Vector> grad) {
    check_label(a, y);
    require_dims(grad.size() == a.size(), "loss: gradient size mismatch");
    const Eigen::Index c = a.size();
    grad.setZero();
    switch (kind) {
    case LossKind::multinomial_logistic: {
        const double top = a.maxCoeff();
        grad = (a.array() - top).exp().matrix();
        const double sum = grad.sum();
        grad /= sum;
        grad(y) -= 1.0;
        return std::max(0.0, top + std::log(sum) - a(y));
    }
    case LossKind::crammer_singer: {
        Eigen::Index best = -1;
        for (Eigen::Index j = 0; j < c; ++j)
            if (j != y && (best < 0 || a(j) > a(best))) best = j;
        const double v = 1.0 - a(y) + a(best);
        if (v <= 0.0) return 0.0;
        grad(best) = 1.0;
        grad(y) = -1.0;
        return v;
    }
    case LossKind::weston_watkins: {
        double total = 0.0;
        for (Eigen::Index j = 0; j < c; ++j) {
            if (j == y) continue;
            const double v = 1.0 - a(y) + a(j);
            if (v > 0.0) {
                total += v;
                grad(j) += 1.0;
                grad(y) -= 1.0;
            }
        }
        return total;
    }
    case LossKind::lee: {
        double total = 0.0;
        for (Eigen::Index j = 0; j < c; ++j) {
            if (j == y) continue;
            const double v = 1.0 + a(j);
            if (v > 0.0) {
                total += v;
                grad(j) = 1.0;
            }
        }
        return total;
    }
    }
    return 0.0;
}

double loss_value(LossKind kind, const Eigen::Ref<const Vector> &a, int y) {
    Vector g(a.size());
    return loss_value_grad(kind, a, y, g);
}

Vector loss_grad(LossKind kind, const Eigen::Ref<const Vector> &a, int y) {
    Vector g(a.size());
    loss_value_grad(kind, a, y, g);
    return g;
}

double lipschitz(LossKind kind, int c) {
    if (c < 2) throw UsageError("lipschitz: need at least two classes");
    switch (kind) {
    case LossKind::crammer_singer:
    case LossKind::multinomial_logistic: return 1.0;
    case LossKind::weston_watkins:
    case LossKind::lee: return static_cast<double>(c);
    }
    return 0.0;
}

double lipschitz_sharp(LossKind kind, int c) {
    if (c < 2) throw UsageError("lipschitz: need at least two classes");
    switch (kind) {
    case LossKind::crammer_singer:
    case LossKind::multinomial_logistic: return 2.0;
    case LossKind::weston_watkins: return 2.0 * (c - 1);
    case LossKind::lee: return static_cast<double>(c - 1);
    }
    return 0.0;
}

double zero_score_loss(LossKind kind, int c) {
    if (c < 2) throw UsageError("zero_score_loss: need at least two classes");
    switch (kind) {
    case LossKind::crammer_singer: return 1.0;
    case LossKind::multinomial_logistic: return std::log(static_cast<double>(c));
    case LossKind::weston_watkins:
    case LossKind::lee: return static_cast<double>(c - 1);
    }
    return 0.0;
}

} // namespace mdg
