#include <doctest.h>

#include "mdg/data.hpp"
#include "mdg/random.hpp"
#include "mdg/error.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>

using namespace mdg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const char *name) {
    const auto p = fs::temp_directory_path() / "mdg_unit" / name;
    fs::remove_all(p);
    fs::create_directories(p.parent_path());
    return p;
}

void write_bytes(const fs::path &p, const std::vector<unsigned char> &b) {
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char *>(b.data()), static_cast<std::streamsize>(b.size()));
}

bool same(const DomainCollection &a, const DomainCollection &b) {
    if (a.size() != b.size() || a.num_classes != b.num_classes || a.dim != b.dim) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto &s = a.tasks[i], &t = b.tasks[i];
        if (s.task_id != t.task_id || s.X != t.X || s.y != t.y || s.angle_deg != t.angle_deg) return false;
    }
    return true;
}

} // namespace

TEST_SUITE("data") {

TEST_CASE("labels by first coordinate bin") {
    CHECK(synthetic_label(0.05) == 0);
    CHECK(synthetic_label(0.0) == 0);
    CHECK(synthetic_label(0.1) == 1);
    CHECK(synthetic_label(0.95) == 9);
    CHECK(synthetic_label(1.0) == 9);
}

TEST_CASE("clockwise rotation") {
    const Eigen::Vector2d p(0.05, 0.30);
    const Eigen::Vector2d mid(0.5, 0.5);
    CHECK((rotate_clockwise(p, 0.0, mid) - p).norm() <= 1e-15);
    const auto q = rotate_clockwise(p, 180.0, mid);
    CHECK(q.x() == doctest::Approx(0.95).epsilon(1e-12));
    CHECK(q.y() == doctest::Approx(0.70).epsilon(1e-12));
    // a quarter turn clockwise maps +y onto +x
    const auto r = rotate_clockwise(Eigen::Vector2d(0, 1), 90.0, Eigen::Vector2d::Zero());
    CHECK(r.x() == doctest::Approx(1.0));
    CHECK(std::abs(r.y()) < 1e-15);
}

TEST_CASE("synthetic collection shape and determinism") {
    const auto a = generate_synthetic(6, 50, 11);
    const auto b = generate_synthetic(6, 50, 11);
    CHECK(same(a, b));
    CHECK_FALSE(same(a, generate_synthetic(6, 50, 12)));
    CHECK(a.size() == 6);
    CHECK(a.num_classes == 10);
    CHECK(a.dim == 2);
    a.validate();
    for (const auto &t : a.tasks) {
        CHECK(t.size() == 50);
        REQUIRE(t.angle_deg.has_value());
        CHECK(*t.angle_deg >= 0.0);
        CHECK(*t.angle_deg < 180.0);
    }
    CHECK_THROWS_AS(generate_synthetic(0, 5, 1), UsageError);
    CHECK_THROWS_AS(generate_synthetic(5, 0, 1), UsageError);
}

TEST_CASE("task count does not change earlier tasks") {
    const auto small = generate_synthetic(3, 20, 5);
    const auto big = generate_synthetic(8, 20, 5);
    for (std::size_t i = 0; i < small.size(); ++i) CHECK(small.tasks[i].X == big.tasks[i].X);
}

TEST_CASE("rotating back recovers the labels and distances are kept") {
    for (const Eigen::Vector2d center : {Eigen::Vector2d(0, 0), Eigen::Vector2d(0.5, 0.5)}) {
        SyntheticOptions opts;
        opts.center = center;
        const auto c = generate_synthetic(4, 40, 3, opts);
        for (const auto &t : c.tasks) {
            for (Eigen::Index i = 0; i < t.size(); ++i) {
                const Eigen::Vector2d back = rotate_clockwise(t.X.row(i).transpose(), -*t.angle_deg, center);
                CHECK(synthetic_label(back.x()) == t.y(i));
                CHECK(back.x() >= -1e-12);
                CHECK(back.x() <= 1 + 1e-12);
            }
            // pairwise distances vs. the unrotated sample
            for (Eigen::Index i = 0; i + 1 < t.size(); ++i) {
                const Eigen::Vector2d u = rotate_clockwise(t.X.row(i).transpose(), -*t.angle_deg, center);
                const Eigen::Vector2d v = rotate_clockwise(t.X.row(i + 1).transpose(), -*t.angle_deg, center);
                CHECK(std::abs((u - v).norm() - (t.X.row(i) - t.X.row(i + 1)).norm()) < 1e-12);
            }
        }
    }
}

TEST_CASE("idx reading") {
    const auto dir = scratch("idx");
    fs::create_directories(dir);
    std::vector<unsigned char> img{0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 28, 0, 0, 0, 28};
    img.resize(16 + 784, 0);
    write_bytes(dir / "one.idx3", img);
    const auto images = load_idx_images(dir / "one.idx3");
    CHECK(images.images.rows() == 1);
    CHECK(images.images.cols() == 784);
    CHECK(images.images.isZero(0.0));
    CHECK(images.rows == 28);

    write_bytes(dir / "lab.idx1", {0, 0, 8, 1, 0, 0, 0, 2, 7, 3});
    const auto labels = load_idx_labels(dir / "lab.idx1");
    REQUIRE(labels.size() == 2);
    CHECK(labels(0) == 7);
    CHECK(labels(1) == 3);

    std::vector<unsigned char> bad = img;
    bad[2] = 0;
    bad[3] = 0;
    write_bytes(dir / "bad.idx3", bad);
    CHECK_THROWS_AS(load_idx_images(dir / "bad.idx3"), FormatError);
    write_bytes(dir / "short.idx3", std::vector<unsigned char>(img.begin(), img.begin() + 100));
    CHECK_THROWS_AS(load_idx_images(dir / "short.idx3"), IoError);
    CHECK_THROWS_AS(load_idx_labels(dir / "one.idx3"), FormatError);
    CHECK_THROWS_AS(load_idx_images(dir / "missing"), IoError);
}

TEST_CASE("idx pixel scaling and round trip") {
    const auto dir = scratch("idx_rt");
    fs::create_directories(dir);
    IdxImages im;
    im.rows = 2;
    im.cols = 3;
    im.images.resize(2, 6);
    im.images << 0, 1, 51 / 255.0, 1, 0, 0.5 + 0.5 / 255, 128 / 255.0, 0, 0, 0, 0, 1;
    write_idx_images(dir / "i", im);
    const auto back = load_idx_images(dir / "i");
    CHECK(back.rows == 2);
    CHECK(back.cols == 3);
    CHECK(back.images(0, 2) == doctest::Approx(0.2));
    CHECK(back.images(1, 0) == doctest::Approx(128 / 255.0));
    IndexVector lab(2);
    lab << 4, 9;
    write_idx_labels(dir / "l", lab);
    CHECK(load_idx_labels(dir / "l") == lab);
}

TEST_CASE("image rotation") {
    Rng rng(4);
    RowVector img(28 * 28);
    for (Eigen::Index i = 0; i < img.size(); ++i) img(i) = rng.uniform();
    CHECK(rotate_image(img, 28, 28, 0.0) == img);
    const RowVector half = rotate_image(img, 28, 28, 180.0);
    double worst = 0.0;
    for (int r = 0; r < 28; ++r)
        for (int c = 0; c < 28; ++c)
            worst = std::max(worst, std::abs(half(r * 28 + c) - img((27 - r) * 28 + (27 - c))));
    CHECK(worst <= 1e-6);
    // quarter turn clockwise: the top-left corner lands top-right
    RowVector dot = RowVector::Zero(9);
    dot(0) = 1.0;
    const RowVector q = rotate_image(dot, 3, 3, 90.0);
    CHECK(q(2) == doctest::Approx(1.0));
    CHECK(q.sum() == doctest::Approx(1.0));
}

TEST_CASE("mnist_mod tasks") {
    IdxImages src;
    src.rows = src.cols = 4;
    src.images.resize(30, 16);
    Rng rng(9);
    for (Eigen::Index i = 0; i < src.images.size(); ++i) src.images.data()[i] = rng.uniform();
    IndexVector labels(30);
    for (int i = 0; i < 30; ++i) labels(i) = i % 10;
    const auto c = make_mnist_mod(src, labels, 5, 12, 3);
    CHECK(c.size() == 5);
    CHECK(c.dim == 16);
    for (const auto &t : c.tasks) {
        CHECK(t.size() == 12);
        CHECK(t.y == c.tasks[0].y);
    }
    const auto again = make_mnist_mod(src, labels, 5, 12, 3);
    CHECK(same(c, again));
    CHECK_THROWS(make_mnist_mod(src, labels, 5, 31, 3));
    IdxImages empty;
    CHECK_THROWS(make_mnist_mod(empty, IndexVector(), 5, 1, 3));
}

TEST_CASE("mnist_mod labels follow the pool") {
    // the center pixel of a 3x3 image is fixed by any rotation about the
    // center, so it tags which source image a row came from
    IdxImages src;
    src.rows = src.cols = 3;
    src.images = PointMatrix::Zero(20, 9);
    IndexVector labels(20);
    for (int i = 0; i < 20; ++i) {
        src.images(i, 4) = (i + 1) / 32.0;
        src.images(i, 0) = 0.5;
        labels(i) = (7 * i) % 10;
    }
    const auto c = make_mnist_mod(src, labels, 4, 8, 1);
    std::set<int> pool;
    for (const auto &t : c.tasks)
        for (Eigen::Index k = 0; k < 8; ++k) {
            const double tag = t.X(k, 4) * 32.0 - 1.0;
            const int source = static_cast<int>(std::lround(tag));
            CHECK(std::abs(tag - source) < 1e-12);
            CHECK(t.y(k) == labels(source));
            CHECK(t.X(k, 4) == c.tasks[0].X(k, 4));
            pool.insert(source);
        }
    CHECK(pool.size() == 8);
}

TEST_CASE("task splits") {
    const auto c = generate_synthetic(100, 3, 2);
    const auto [train, test] = split_tasks(c, 80, 5);
    CHECK(train.size() == 80);
    CHECK(test.size() == 20);
    std::set<int> ids;
    for (const auto &t : train.tasks) ids.insert(t.task_id);
    for (const auto &t : test.tasks) CHECK(ids.insert(t.task_id).second);
    CHECK(ids.size() == 100);
    const auto [train2, test2] = split_tasks(c, 80, 5);
    CHECK(same(train, train2));
    CHECK(same(test, test2));
    CHECK_THROWS_AS(split_tasks(c, 0, 5), UsageError);
    CHECK_THROWS_AS(split_tasks(c, 100, 5), UsageError);
}

TEST_CASE("collection directory round trip") {
    const auto dir = scratch("coll");
    const auto c = generate_synthetic(4, 7, 21);
    save_collection(c, dir);
    CHECK(fs::exists(dir / "manifest.json"));
    const auto back = load_collection(dir);
    CHECK(same(c, back));
    CHECK_THROWS_AS(load_collection(dir / "nope"), IoError);
    std::ofstream(dir / "manifest.json") << "{\"format\": \"other\"}";
    CHECK_THROWS_AS(load_collection(dir), FormatError);
}

TEST_CASE("validate rejects broken collections") {
    auto c = generate_synthetic(2, 5, 1);
    c.tasks[1].task_id = c.tasks[0].task_id;
    CHECK_THROWS_AS(c.validate(), FormatError);
    c = generate_synthetic(2, 5, 1);
    c.tasks[0].y(0) = 10;
    CHECK_THROWS_AS(c.validate(), FormatError);
}

}
