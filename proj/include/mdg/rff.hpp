#pragma once

#include "mdg/data.hpp"
#include "mdg/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>

namespace mdg {

/// How the D output features are built from the sampled frequencies.
enum class RffVariant {
    /// z(x) = sqrt(2/D) [cos(Wx), sin(Wx)] with D/2 frequencies; |z(x)|^2 == 1.
    cos_sin,
    /// z(x) = sqrt(2/D) cos(Wx + b) with D frequencies and random phases.
    cosine_phase,
};

/// Random Fourier feature map approximating exp(-|x-y|^2 / 2 sigma^2).
struct RffMap {
    Matrix omega;   ///< frequencies, one per row, entries ~ N(0, 1/sigma^2)
    Vector phase;   ///< phases in [0, 2 pi); empty for cos_sin
    double sigma = 1.0;
    Eigen::Index dim = 0; ///< output feature count D
    RffVariant variant = RffVariant::cos_sin;
    std::uint64_t seed = 0;

    Eigen::Index input_dim() const { return omega.cols(); }
};

RffMap sample_rff(Eigen::Index d_in, Eigen::Index D, double sigma, std::uint64_t seed,
                  RffVariant variant = RffVariant::cos_sin);

/// Features of every row of X (n x d_in) as an n x D matrix.
Matrix features(const RffMap &map, const Eigen::Ref<const PointMatrix> &X);

/// Features of a single point.
template <typename Derived>
Vector point_features(const RffMap &map, const Eigen::MatrixBase<Derived> &x) {
    PointMatrix row = x.transpose();
    return features(map, row).row(0).transpose();
}

/// Mean feature vector of the sample: the empirical embedding of the task.
Vector embed_task(const RffMap &map_xp, const Eigen::Ref<const PointMatrix> &X);
Vector embed_task(const RffMap &map_xp, const TaskDataset &task);

/// An extended data point (empirical marginal, x) with the marginal
/// represented by its approximate embedding.
struct EmbeddedPoint {
    Vector mu_hat;
    Vector x;
};

/// Kronecker product z_kappa(mu_hat) (x) z_x(x); kappa features outer,
/// x features inner.
Vector extended_features(const RffMap &map_kappa, const RffMap &map_x, const EmbeddedPoint &ep);

/// Versioned little-endian snapshot of a map.
void write_rff(std::ostream &out, const RffMap &map);
RffMap read_rff(std::istream &in);
void save_rff(const std::filesystem::path &path, const RffMap &map);
RffMap load_rff(const std::filesystem::path &path);

} // namespace mdg
