#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mdg {

/// Constants of the estimation-error bound. Gaussian kernels give unit B_k, B_kp, B_kappa.
struct BoundParams {
    double L_ell = 1.0;
    double L_kappa = 1.0;
    double alpha = 1.0;
    double R = 1.0;
    double B_k = 1.0;
    double B_kp = 1.0;
    double B_kappa = 1.0;
    double B_Y = 1.0;
    double p = 2.0;
    long long c = 10;
    long long N = 100;
    long long n = 100;
    double delta = 0.05;

    /// Throws UsageError on any range violation.
    void validate() const;
    double B_ell() const { return B_Y + L_ell * B_k * B_kappa * R; }
};

/// Sets a field by name ("L_ell", "c", "delta", ...). Integer fields reject
/// non-integral values.
void set_param(BoundParams &params, std::string_view name, double value);
double get_param(const BoundParams &params, std::string_view name);
const std::vector<std::string> &param_names();

/// Exponent of c in the Rademacher term; exactly 0 for p <= 2.
double c_exponent(double p);

/// Embedding-error term, evaluated at confidence delta/2.
double term_one(const BoundParams &params);

/// Deviation part 2 B_ell sqrt(log(8/delta)/(2N)).
double term_two_deviation(const BoundParams &params);

/// Rademacher plus deviation term in the final combined form; the log factor
/// is (1 + log(sqrt2 N c)^{3/2}).
double term_two(const BoundParams &params);

/// Same before combination: the point-level part keeps N n inside its log.
double term_two_precombination(const BoundParams &params);

enum class BoundVariant { stated, precombination };

double bound_rhs(const BoundParams &params, BoundVariant variant = BoundVariant::stated);

struct CScalingRow {
    long long c;
    double term_two;
    double rhs;
};

/// Requires a non-empty, non-decreasing list.
std::vector<CScalingRow> c_scaling_profile(const BoundParams &params,
                                           const std::vector<long long> &c_list);

struct SweepRow {
    double value;
    double term_one, term_two, rhs;
};

/// Single-parameter sweep; other fields held at params.
std::vector<SweepRow> sweep(const BoundParams &params, std::string_view name,
                            const std::vector<double> &values,
                            BoundVariant variant = BoundVariant::stated);

/// Right side of the Hilbert-space Hoeffding inequality, B = bound on sqrt(k'(x,x)).
double hoeffding_rhs(double B, long long n, double delta);

struct ConcentrationRow {
    long long n;
    double quantile; ///< empirical (1 - delta)-quantile of the two-sample distance
    double mean;
    double hoeffding_rhs;
};

struct ConcentrationOptions {
    int d = 5;
    std::vector<long long> n_list{100, 400, 1600};
    int trials = 500;
    double sigma_xp = 1.0;
    double delta = 0.05;
    double B = 1.0;
    std::uint64_t seed = 0;
};

/// Two independent size-n uniform samples on [0,1]^d per trial; distance of
/// their empirical embeddings under a Gaussian k_x'. Trials run in parallel
/// with per-trial streams.
std::vector<ConcentrationRow> embedding_concentration_mc(const ConcentrationOptions &opts);

/// Linear-interpolated empirical quantile; sorts a copy.
double empirical_quantile(std::vector<double> values, double q);

std::string sweep_csv(std::string_view name, const std::vector<SweepRow> &rows);
std::string c_scaling_csv(const std::vector<CScalingRow> &rows);
std::string concentration_csv(const std::vector<ConcentrationRow> &rows);

} // namespace mdg
