#include <doctest.h>

#include "mdg/error.hpp"
#include "mdg/kernels.hpp"
#include "mdg/random.hpp"
#include "mdg/rff.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace mdg;

namespace {

PointMatrix uniform_points(std::uint64_t seed, Eigen::Index n, Eigen::Index d) {
    Rng rng(seed);
    PointMatrix P(n, d);
    for (Eigen::Index i = 0; i < P.size(); ++i) P.data()[i] = rng.uniform();
    return P;
}

TaskDataset as_task(const PointMatrix &X, int id = 0) {
    TaskDataset t;
    t.task_id = id;
    t.X = X;
    t.y = IndexVector::Zero(X.rows());
    return t;
}

} // namespace

TEST_SUITE("rff") {

TEST_CASE("sampling is deterministic and shaped") {
    for (auto v : {RffVariant::cos_sin, RffVariant::cosine_phase}) {
        const auto a = sample_rff(3, 64, 0.5, 9, v);
        const auto b = sample_rff(3, 64, 0.5, 9, v);
        CHECK(a.omega == b.omega);
        CHECK(a.phase == b.phase);
        CHECK(a.dim == 64);
        CHECK(a.input_dim() == 3);
        CHECK(a.omega.rows() == (v == RffVariant::cos_sin ? 32 : 64));
        CHECK(sample_rff(3, 64, 0.5, 10, v).omega != a.omega);
    }
    CHECK_THROWS_AS(sample_rff(3, 63, 1.0, 1, RffVariant::cos_sin), UsageError);
    CHECK_THROWS_AS(sample_rff(3, 0, 1.0, 1), UsageError);
    CHECK_THROWS_AS(sample_rff(3, 8, -1.0, 1), UsageError);
}

TEST_CASE("frequency moments and phase range") {
    const auto m = sample_rff(10, 10000, 2.0, 3, RffVariant::cosine_phase);
    const double mean = m.omega.mean();
    CHECK(std::abs(mean) <= 4.0 / std::sqrt(1e5) / 2.0);
    const double var = (m.omega.array() - mean).square().mean();
    CHECK(var == doctest::Approx(0.25).epsilon(0.02));
    CHECK(m.phase.minCoeff() >= 0.0);
    CHECK(m.phase.maxCoeff() < 2.0 * std::numbers::pi);
    CHECK(m.phase.size() == 10000);
}

TEST_CASE("feature ranges and norms") {
    const auto X = uniform_points(1, 50, 4);
    for (auto v : {RffVariant::cos_sin, RffVariant::cosine_phase}) {
        const auto m = sample_rff(4, 256, 0.8, 2, v);
        const Matrix Z = features(m, X);
        CHECK(Z.rows() == 50);
        CHECK(Z.cols() == 256);
        CHECK(Z.cwiseAbs().maxCoeff() <= std::sqrt(2.0 / 256) + 1e-15);
        for (Eigen::Index i = 0; i < 50; ++i) {
            CHECK(Z.row(i).squaredNorm() <= 2.0);
            if (v == RffVariant::cos_sin) CHECK(Z.row(i).squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
        }
        CHECK(point_features(m, X.row(3).transpose()).isApprox(Z.row(3).transpose(), 1e-15));
    }
    const auto m = sample_rff(4, 8, 1.0, 1);
    CHECK_THROWS_AS(features(m, uniform_points(1, 2, 3)), DimensionError);
}

TEST_CASE("kernel approximation at D = 4096") {
    const auto X = uniform_points(17, 200, 10);
    const auto m = sample_rff(10, 4096, 1.0, 5);
    const Matrix Z = features(m, X);
    const Matrix approx = Z * Z.transpose();
    const Matrix exact = gauss_gram(X, X, 1.0);
    CHECK((approx - exact).cwiseAbs().maxCoeff() <= 0.05);
}

TEST_CASE("averaging independent maps is unbiased") {
    const auto X = uniform_points(3, 2, 3);
    const double want = gauss(X.row(0), X.row(1), 0.6);
    std::vector<double> v;
    for (std::uint64_t s = 0; s < 60; ++s) {
        const auto m = sample_rff(3, 64, 0.6, 1000 + s, RffVariant::cosine_phase);
        const Matrix Z = features(m, X);
        v.push_back(Z.row(0).dot(Z.row(1)));
    }
    double mean = 0, sq = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    for (double x : v) sq += (x - mean) * (x - mean);
    const double sd = std::sqrt(sq / static_cast<double>(v.size() - 1));
    CHECK(std::abs(mean - want) <= 3.0 * sd / std::sqrt(static_cast<double>(v.size())));
}

TEST_CASE("task embeddings") {
    const auto m = sample_rff(2, 4096, 0.5, 4);
    const auto X = uniform_points(5, 1, 2);
    CHECK(embed_task(m, X).isApprox(point_features(m, X.row(0).transpose()), 1e-15));

    const auto A = uniform_points(6, 15, 2);
    PointMatrix AA(30, 2);
    AA << A, A;
    CHECK(embed_task(m, AA).isApprox(embed_task(m, A), 1e-13));

    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto P = uniform_points(20 + s, 12, 2);
        PointMatrix Q = uniform_points(40 + s, 9, 2);
        Q.array() += 0.3 * static_cast<double>(s);
        const double approx = (embed_task(m, P) - embed_task(m, Q)).squaredNorm();
        CHECK(std::abs(approx - mmd_sq(P, Q, 0.5)) <= 0.05);
    }
    CHECK_THROWS_AS(embed_task(m, PointMatrix(0, 2)), UsageError);
}

TEST_CASE("extended features are the Kronecker product") {
    const auto mk = sample_rff(16, 24, 0.9, 1);
    const auto mx = sample_rff(2, 10, 0.4, 2);
    Rng rng(3);
    EmbeddedPoint a, b;
    a.mu_hat = Vector::NullaryExpr(16, [&] { return rng.normal(); });
    b.mu_hat = Vector::NullaryExpr(16, [&] { return rng.normal(); });
    a.x = Vector::NullaryExpr(2, [&] { return rng.uniform(); });
    b.x = Vector::NullaryExpr(2, [&] { return rng.uniform(); });
    const Vector ea = extended_features(mk, mx, a), eb = extended_features(mk, mx, b);
    CHECK(ea.size() == 240);
    const Vector za = point_features(mk, a.mu_hat), xa = point_features(mx, a.x);
    CHECK(ea(3 * 10 + 7) == za(3) * xa(7));
    const double factored = za.dot(point_features(mk, b.mu_hat)) * xa.dot(point_features(mx, b.x));
    CHECK(std::abs(ea.dot(eb) - factored) <= 1e-12);
    CHECK(ea.squaredNorm() <= 4.0);
    EmbeddedPoint bad = a;
    bad.x = Vector::Zero(3);
    CHECK_THROWS_AS(extended_features(mk, mx, bad), DimensionError);
}

TEST_CASE("two-level features approximate kbar") {
    KernelConfig cfg;
    cfg.sigma_x = 0.5;
    cfg.sigma_xp = 0.5;
    cfg.sigma_kappa = 0.5;
    std::vector<TaskDataset> tasks;
    for (int i = 0; i < 5; ++i) {
        PointMatrix X = uniform_points(60 + i, 20, 2);
        X.col(0).array() += 0.25 * i;
        tasks.push_back(as_task(X, i));
    }
    auto gram_error = [&](Eigen::Index D) {
        const auto mxp = sample_rff(2, D, cfg.sigma_xp, 11);
        const auto mk = sample_rff(D, D, cfg.sigma_kappa, 12);
        const auto mx = sample_rff(2, D, cfg.sigma_x, 13);
        // (a_i (x) b_s) . (a_j (x) b_t) = (a_i . a_j)(b_s . b_t), checked on its own above
        std::vector<Vector> a;
        std::vector<Matrix> B;
        for (const auto &t : tasks) {
            a.push_back(point_features(mk, embed_task(mxp, t)));
            B.push_back(features(mx, t.X));
        }
        std::vector<double> err;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                const Matrix approx = a[i].dot(a[j]) * B[i] * B[j].transpose();
                for (int s = 0; s < 20; s += 3)
                    for (int t = 0; t < 20; t += 3)
                        err.push_back(std::abs(approx(s, t) - kbar(tasks[i], tasks[i].X.row(s), tasks[j],
                                                                   tasks[j].X.row(t), cfg)));
            }
        return err;
    };
    const auto e2048 = gram_error(2048);
    CHECK(*std::max_element(e2048.begin(), e2048.end()) <= 0.1);
    auto median = [](std::vector<double> v) {
        std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
        return v[v.size() / 2];
    };
    CHECK(median(gram_error(4096)) < median(gram_error(256)));
}

TEST_CASE("snapshot round trip") {
    for (auto v : {RffVariant::cos_sin, RffVariant::cosine_phase}) {
        const auto m = sample_rff(5, 40, 0.3, 77, v);
        std::stringstream buf;
        write_rff(buf, m);
        const auto back = read_rff(buf);
        CHECK(back.omega == m.omega);
        CHECK(back.phase == m.phase);
        CHECK(back.sigma == m.sigma);
        CHECK(back.dim == m.dim);
        CHECK(back.seed == m.seed);
        CHECK(back.variant == m.variant);
    }
    const auto path = std::filesystem::temp_directory_path() / "mdg_unit_map.bin";
    const auto m = sample_rff(2, 16, 1.1, 5);
    save_rff(path, m);
    CHECK(load_rff(path).omega == m.omega);
    std::ofstream(path, std::ios::binary) << "NOTAMAP!xxxxxxxxxxxxxxxxxxxx";
    CHECK_THROWS_AS(load_rff(path), FormatError);
    std::stringstream truncated("MDGRFF");
    CHECK_THROWS(read_rff(truncated));
}

}
