#include "mdg/rff.hpp"
#include "mdg/error.hpp"
#include "mdg/random.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

namespace mdg {

RffMap sample_rff(Eigen::Index d_in, Eigen::Index D, double sigma, std::uint64_t seed,
                  RffVariant variant) {
    require(d_in >= 1, "sample_rff: input dimension must be >= 1");
    require(D >= 1, "sample_rff: feature count must be >= 1");
    require(std::isfinite(sigma) && sigma > 0.0, "sample_rff: sigma must be positive");
    require(variant != RffVariant::cos_sin || D % 2 == 0,
            "sample_rff: cos_sin variant needs an even feature count");
    RffMap map;
    map.sigma = sigma;
    map.dim = D;
    map.variant = variant;
    map.seed = seed;
    const Eigen::Index freqs = variant == RffVariant::cos_sin ? D / 2 : D;
    Rng rng(seed);
    map.omega.resize(freqs, d_in);
    // row-major fill order, so the stream layout does not depend on storage
    for (Eigen::Index r = 0; r < freqs; ++r)
        for (Eigen::Index k = 0; k < d_in; ++k) map.omega(r, k) = rng.normal() / sigma;
    if (variant == RffVariant::cosine_phase) {
        map.phase.resize(D);
        for (Eigen::Index r = 0; r < D; ++r) map.phase(r) = 2.0 * std::numbers::pi * rng.uniform();
    }
    return map;
}

Matrix features(const RffMap &map, const Eigen::Ref<const PointMatrix> &X) {
    require_dims(X.cols() == map.input_dim(), "features: input dimension mismatch");
    const double scale = std::sqrt(2.0 / static_cast<double>(map.dim));
    const Matrix proj = X * map.omega.transpose();
    if (map.variant == RffVariant::cosine_phase) {
        Matrix z = proj.rowwise() + map.phase.transpose();
        return scale * z.array().cos().matrix();
    }
    const Eigen::Index half = map.omega.rows();
    Matrix z(X.rows(), map.dim);
    z.leftCols(half) = scale * proj.array().cos().matrix();
    z.rightCols(half) = scale * proj.array().sin().matrix();
    return z;
}

Vector embed_task(const RffMap &map_xp, const Eigen::Ref<const PointMatrix> &X) {
    if (X.rows() == 0) throw UsageError("embed_task: empty task");
    return features(map_xp, X).colwise().mean().transpose();
}

Vector embed_task(const RffMap &map_xp, const TaskDataset &task) {
    return embed_task(map_xp, task.X);
}

Vector extended_features(const RffMap &map_kappa, const RffMap &map_x, const EmbeddedPoint &ep) {
    require_dims(ep.mu_hat.size() == map_kappa.input_dim(),
                 "extended_features: embedding dimension mismatch");
    require_dims(ep.x.size() == map_x.input_dim(), "extended_features: point dimension mismatch");
    const Vector a = point_features(map_kappa, ep.mu_hat);
    const Vector b = point_features(map_x, ep.x);
    Vector out(a.size() * b.size());
    for (Eigen::Index p = 0; p < a.size(); ++p) out.segment(p * b.size(), b.size()) = a(p) * b;
    return out;
}

// ---------------------------------------------------------------- snapshot

namespace {

constexpr std::array<char, 8> kRffMagic{'M', 'D', 'G', 'R', 'F', 'F', '\0', '\0'};
constexpr std::uint32_t kRffVersion = 1;

template <typename T>
void put_le(std::ostream &out, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<char, sizeof(T)> b;
    std::memcpy(b.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
    out.write(b.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream &in) {
    std::array<char, sizeof(T)> b;
    if (!in.read(b.data(), sizeof(T))) throw IoError("rff snapshot: truncated");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
    T v;
    std::memcpy(&v, b.data(), sizeof(T));
    return v;
}

} // namespace

void write_rff(std::ostream &out, const RffMap &map) {
    out.write(kRffMagic.data(), kRffMagic.size());
    put_le<std::uint32_t>(out, kRffVersion);
    put_le<std::uint32_t>(out, map.variant == RffVariant::cos_sin ? 0u : 1u);
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(map.input_dim()));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(map.dim));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(map.omega.rows()));
    put_le<std::uint64_t>(out, map.seed);
    put_le<double>(out, map.sigma);
    for (Eigen::Index r = 0; r < map.omega.rows(); ++r)
        for (Eigen::Index k = 0; k < map.omega.cols(); ++k) put_le<double>(out, map.omega(r, k));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(map.phase.size()));
    for (Eigen::Index r = 0; r < map.phase.size(); ++r) put_le<double>(out, map.phase(r));
}

RffMap read_rff(std::istream &in) {
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size())) throw IoError("rff snapshot: truncated");
    if (magic != kRffMagic) throw FormatError("rff snapshot: bad magic");
    if (get_le<std::uint32_t>(in) != kRffVersion) throw FormatError("rff snapshot: unsupported version");
    const auto variant = get_le<std::uint32_t>(in);
    if (variant > 1) throw FormatError("rff snapshot: unknown variant");
    RffMap map;
    map.variant = variant == 0 ? RffVariant::cos_sin : RffVariant::cosine_phase;
    const auto d_in = static_cast<Eigen::Index>(get_le<std::uint64_t>(in));
    map.dim = static_cast<Eigen::Index>(get_le<std::uint64_t>(in));
    const auto freqs = static_cast<Eigen::Index>(get_le<std::uint64_t>(in));
    map.seed = get_le<std::uint64_t>(in);
    map.sigma = get_le<double>(in);
    const Eigen::Index expected = map.variant == RffVariant::cos_sin ? map.dim / 2 : map.dim;
    if (freqs != expected || d_in < 1) throw FormatError("rff snapshot: inconsistent dimensions");
    map.omega.resize(freqs, d_in);
    for (Eigen::Index r = 0; r < freqs; ++r)
        for (Eigen::Index k = 0; k < d_in; ++k) map.omega(r, k) = get_le<double>(in);
    const auto nphase = static_cast<Eigen::Index>(get_le<std::uint64_t>(in));
    if (nphase != (map.variant == RffVariant::cosine_phase ? map.dim : 0))
        throw FormatError("rff snapshot: inconsistent phase count");
    map.phase.resize(nphase);
    for (Eigen::Index r = 0; r < nphase; ++r) map.phase(r) = get_le<double>(in);
    return map;
}

void save_rff(const std::filesystem::path &path, const RffMap &map) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_rff(out, map);
}

RffMap load_rff(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_rff(in);
}

} // namespace mdg
