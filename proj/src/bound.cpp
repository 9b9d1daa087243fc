#include "mdg/bound.hpp"
#include "mdg/error.hpp"
#include "mdg/kernels.hpp"
#include "mdg/parallel.hpp"
#include "mdg/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace mdg {

void BoundParams::validate() const {
    require(L_ell > 0 && L_kappa > 0 && R > 0, "bound: L_ell, L_kappa and R must be positive");
    require(alpha > 0 && alpha <= 1, "bound: alpha must lie in (0, 1]");
    require(B_k > 0 && B_kp > 0 && B_kappa > 0 && B_Y > 0, "bound: kernel and label bounds must be positive");
    require(p >= 1, "bound: p must be >= 1");
    require(c >= 2, "bound: c must be >= 2");
    require(N >= 1 && n >= 1, "bound: N and n must be >= 1");
    require(delta > 0 && delta < 1, "bound: delta must lie in (0, 1)");
    require(std::isfinite(L_ell + L_kappa + R + B_k + B_kp + B_kappa + B_Y + p),
            "bound: parameters must be finite");
}

namespace {

struct Field {
    const char *name;
    double BoundParams::*real;
    long long BoundParams::*integer;
};

const std::vector<Field> &fields() {
    static const std::vector<Field> f{
        {"L_ell", &BoundParams::L_ell, nullptr},   {"L_kappa", &BoundParams::L_kappa, nullptr},
        {"alpha", &BoundParams::alpha, nullptr},   {"R", &BoundParams::R, nullptr},
        {"B_k", &BoundParams::B_k, nullptr},       {"B_kp", &BoundParams::B_kp, nullptr},
        {"B_kappa", &BoundParams::B_kappa, nullptr}, {"B_Y", &BoundParams::B_Y, nullptr},
        {"p", &BoundParams::p, nullptr},           {"c", nullptr, &BoundParams::c},
        {"N", nullptr, &BoundParams::N},           {"n", nullptr, &BoundParams::n},
        {"delta", &BoundParams::delta, nullptr},
    };
    return f;
}

const Field &field(std::string_view name) {
    for (const auto &f : fields())
        if (name == f.name) return f;
    throw UsageError("bound: unknown parameter '" + std::string(name) + "'");
}

double log_factor(double m, long long c) {
    return 1.0 + std::pow(std::log(std::numbers::sqrt2 * m * static_cast<double>(c)), 1.5);
}

double rademacher_scale(const BoundParams &q) {
    return q.L_ell * q.R * q.B_kappa * q.B_k * std::pow(static_cast<double>(q.c), c_exponent(q.p));
}

} // namespace

const std::vector<std::string> &param_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto &f : fields()) v.emplace_back(f.name);
        return v;
    }();
    return names;
}

void set_param(BoundParams &params, std::string_view name, double value) {
    const auto &f = field(name);
    if (f.real) {
        params.*f.real = value;
        return;
    }
    if (!std::isfinite(value) || value != std::floor(value) || std::abs(value) > 9e15)
        throw UsageError("bound: parameter '" + std::string(name) + "' must be an integer");
    params.*f.integer = static_cast<long long>(value);
}

double get_param(const BoundParams &params, std::string_view name) {
    const auto &f = field(name);
    return f.real ? params.*f.real : static_cast<double>(params.*f.integer);
}

double c_exponent(double p) { return 0.5 - 1.0 / std::max(2.0, p); }

double term_one(const BoundParams &q) {
    q.validate();
    const double n = static_cast<double>(q.n);
    const double lg = std::log(2.0 * static_cast<double>(q.N) / q.delta);
    const double inner = std::sqrt(2.0 * lg / n) + std::sqrt(1.0 / n) + 4.0 * lg / (3.0 * n);
    return q.L_ell * q.L_kappa * q.R * q.B_k * std::pow(q.B_kp, q.alpha) * std::pow(inner, q.alpha);
}

double term_two_deviation(const BoundParams &q) {
    q.validate();
    return 2.0 * q.B_ell() * std::sqrt(std::log(8.0 / q.delta) / (2.0 * static_cast<double>(q.N)));
}

double term_two(const BoundParams &q) {
    const double N = static_cast<double>(q.N);
    return 54.0 * rademacher_scale(q) * log_factor(N, q.c) / std::sqrt(N) + term_two_deviation(q);
}

double term_two_precombination(const BoundParams &q) {
    const double N = static_cast<double>(q.N);
    const double Nn = N * static_cast<double>(q.n);
    const double rad = log_factor(Nn, q.c) / std::sqrt(Nn) + log_factor(N, q.c) / std::sqrt(N);
    return 27.0 * rademacher_scale(q) * rad + term_two_deviation(q);
}

double bound_rhs(const BoundParams &q, BoundVariant variant) {
    const double two = variant == BoundVariant::stated ? term_two(q) : term_two_precombination(q);
    return term_one(q) + two;
}

std::vector<CScalingRow> c_scaling_profile(const BoundParams &params,
                                           const std::vector<long long> &c_list) {
    require(!c_list.empty(), "c_scaling_profile: empty c list");
    require(std::is_sorted(c_list.begin(), c_list.end()), "c_scaling_profile: c list must be non-decreasing");
    std::vector<CScalingRow> rows;
    for (auto c : c_list) {
        BoundParams q = params;
        q.c = c;
        rows.push_back({c, term_two(q), bound_rhs(q)});
    }
    return rows;
}

std::vector<SweepRow> sweep(const BoundParams &params, std::string_view name,
                            const std::vector<double> &values, BoundVariant variant) {
    require(!values.empty(), "bound sweep: empty value list");
    std::vector<SweepRow> rows;
    for (double v : values) {
        BoundParams q = params;
        set_param(q, name, v);
        q.validate();
        const double two = variant == BoundVariant::stated ? term_two(q) : term_two_precombination(q);
        const double one = term_one(q);
        rows.push_back({v, one, two, one + two});
    }
    return rows;
}

double hoeffding_rhs(double B, long long n, double delta) {
    require(B > 0 && n >= 1 && delta > 0 && delta < 1, "hoeffding_rhs: invalid arguments");
    const double m = static_cast<double>(n);
    const double lg = std::log(1.0 / delta);
    return B * std::sqrt(2.0 * lg / m) + B * std::sqrt(1.0 / m) + 4.0 * B * lg / (3.0 * m);
}

double empirical_quantile(std::vector<double> values, double q) {
    require(!values.empty(), "empirical_quantile: empty sample");
    require(q >= 0 && q <= 1, "empirical_quantile: q must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<ConcentrationRow> embedding_concentration_mc(const ConcentrationOptions &opts) {
    require(opts.trials >= 100, "embedding_concentration_mc: need at least 100 trials");
    require(opts.d >= 1, "embedding_concentration_mc: d must be >= 1");
    require(opts.sigma_xp > 0, "embedding_concentration_mc: sigma_xp must be positive");
    require(opts.delta > 0 && opts.delta < 1, "embedding_concentration_mc: delta must lie in (0, 1)");
    require(!opts.n_list.empty(), "embedding_concentration_mc: empty n list");
    const Rng root(opts.seed);
    std::vector<ConcentrationRow> rows;
    for (std::size_t k = 0; k < opts.n_list.size(); ++k) {
        const long long n = opts.n_list[k];
        require(n >= 1, "embedding_concentration_mc: n must be >= 1");
        const Rng level = root.child(k);
        std::vector<double> dist(static_cast<std::size_t>(opts.trials));
        parallel_for(dist.size(), [&](std::size_t t) {
            Rng rng = level.child(t);
            PointMatrix a(n, opts.d), b(n, opts.d);
            for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.uniform();
            for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = rng.uniform();
            dist[t] = std::sqrt(mmd_sq(a, b, opts.sigma_xp));
        });
        double mean = 0.0;
        for (double v : dist) mean += v;
        mean /= static_cast<double>(dist.size());
        rows.push_back({n, empirical_quantile(dist, 1.0 - opts.delta), mean, hoeffding_rhs(opts.B, n, opts.delta)});
    }
    return rows;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

std::string sweep_csv(std::string_view name, const std::vector<SweepRow> &rows) {
    std::ostringstream out;
    out << name << ",term_one,term_two,bound_rhs\n";
    for (const auto &r : rows)
        out << fmt(r.value) << ',' << fmt(r.term_one) << ',' << fmt(r.term_two) << ',' << fmt(r.rhs) << '\n';
    return out.str();
}

std::string c_scaling_csv(const std::vector<CScalingRow> &rows) {
    std::ostringstream out;
    out << "c,term_two,bound_rhs\n";
    for (const auto &r : rows) out << r.c << ',' << fmt(r.term_two) << ',' << fmt(r.rhs) << '\n';
    return out.str();
}

std::string concentration_csv(const std::vector<ConcentrationRow> &rows) {
    std::ostringstream out;
    out << "n,quantile,mean,hoeffding_rhs\n";
    for (const auto &r : rows)
        out << r.n << ',' << fmt(r.quantile) << ',' << fmt(r.mean) << ',' << fmt(r.hoeffding_rhs) << '\n';
    return out.str();
}

} // namespace mdg
