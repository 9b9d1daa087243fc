#pragma once

#include "mdg/types.hpp"

#include <string>
#include <string_view>

namespace mdg {

/// Multiclass surrogate losses on a score vector.
///
///   crammer_singer        max_{j != y} (1 - a_y + a_j)_+
///   multinomial_logistic  log sum_j exp(a_j - a_y)
///   weston_watkins        sum_{j != y} (1 - a_y + a_j)_+
///   lee                   sum_{j != y} (1 + a_j)_+
enum class LossKind { crammer_singer, multinomial_logistic, weston_watkins, lee };

std::string_view to_string(LossKind kind);
/// Accepts the names above plus the short tags cs, mlr, ww.
LossKind parse_loss(std::string_view name);

bool is_smooth(LossKind kind);

double loss_value(LossKind kind, const Eigen::Ref<const Vector> &a, int y);

/// A subgradient in the scores. Exact gradient softmax(a) - e_y for the
/// logistic loss; hinge terms contribute only when strictly active, and the
/// Crammer-Singer maximiser is the lowest violating index.
Vector loss_grad(LossKind kind, const Eigen::Ref<const Vector> &a, int y);

/// Value and subgradient together; `grad` must have size c.
double loss_value_grad(LossKind kind, const Eigen::Ref<const Vector> &a, int y,
                       Eigen::Ref<Vector> grad);

/// Infinity-norm Lipschitz constant used by the generalization bound:
/// 1 for crammer_singer and multinomial_logistic, c for the summed hinges.
double lipschitz(LossKind kind, int c);

/// Smallest constant L with |l(a,y) - l(b,y)| <= L |a - b|_inf for all a, b:
/// 2, 2, 2(c-1) and c-1. For crammer_singer, multinomial_logistic and
/// weston_watkins these exceed lipschitz().
double lipschitz_sharp(LossKind kind, int c);

/// sup_y l(0, y): 1, ln c, c-1, c-1.
double zero_score_loss(LossKind kind, int c);

} // namespace mdg
