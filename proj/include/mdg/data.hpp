#pragma once

#include "mdg/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

namespace mdg {

/// One domain: an n x d sample with labels in {0, ..., c-1}.
struct TaskDataset {
    int task_id = 0;
    PointMatrix X;
    IndexVector y;
    std::optional<double> angle_deg; ///< rotation used to generate the task, if any

    Eigen::Index size() const { return X.rows(); }
    Eigen::Index dim() const { return X.cols(); }
};

/// A set of tasks sharing the feature dimension and the class universe.
struct DomainCollection {
    std::vector<TaskDataset> tasks;
    int num_classes = 0;
    Eigen::Index dim = 0;

    std::size_t size() const { return tasks.size(); }
    Eigen::Index total_points() const;

    /// Throws FormatError if any invariant is violated.
    void validate() const;
};

/// Clockwise rotation of `p` by `angle_deg` about `center`.
Eigen::Vector2d rotate_clockwise(const Eigen::Vector2d &p, double angle_deg,
                                 const Eigen::Vector2d &center);

/// Class of a synthetic point: bin of the first coordinate, ten bins of width 0.1.
int synthetic_label(double x1);

struct SyntheticOptions {
    Eigen::Vector2d center{0.0, 0.0};
};

/// Tasks of uniform points on the unit square, labelled by the first
/// coordinate and then rotated clockwise by a per-task angle in [0, 180).
DomainCollection generate_synthetic(int num_tasks, int n_per_task, std::uint64_t seed,
                                    const SyntheticOptions &opts = {});

struct IdxImages {
    PointMatrix images; ///< m x (rows*cols), values in [0, 1]
    int rows = 0;
    int cols = 0;
};

/// IDX image file (magic 0x00000803), pixels scaled by 1/255.
IdxImages load_idx_images(const std::filesystem::path &path);
/// IDX label file (magic 0x00000801).
IndexVector load_idx_labels(const std::filesystem::path &path);

void write_idx_images(const std::filesystem::path &path, const IdxImages &images);
void write_idx_labels(const std::filesystem::path &path, const IndexVector &labels);

/// Rotates a row-major image about its center by `angle_deg` (clockwise),
/// bilinear interpolation, zero outside the source.
RowVector rotate_image(const Eigen::Ref<const RowVector> &image, int rows, int cols,
                       double angle_deg);

/// Draws a fixed pool of `images_per_task` images, then produces `num_tasks`
/// copies of the pool, each rotated by its own angle in [0, 180).
DomainCollection make_mnist_mod(const IdxImages &images, const IndexVector &labels,
                                int num_tasks, int images_per_task, std::uint64_t seed,
                                int num_classes = 10);

/// Task-level partition into (train, test) of sizes (n_train, N - n_train).
std::pair<DomainCollection, DomainCollection> split_tasks(const DomainCollection &collection,
                                                          int n_train, std::uint64_t seed);

/// Subset of the collection by task position.
DomainCollection select_tasks(const DomainCollection &collection,
                              const std::vector<std::size_t> &positions);

/// Directory format: one CSV per task (d feature columns, then label) plus
/// manifest.json with {c, d, tasks: [{id, file, n, angle?}]}.
void save_collection(const DomainCollection &collection, const std::filesystem::path &dir);
DomainCollection load_collection(const std::filesystem::path &dir);

} // namespace mdg
