#include "mdg/data.hpp"
#include "mdg/error.hpp"
#include "mdg/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

namespace mdg {

namespace fs = std::filesystem;

Eigen::Index DomainCollection::total_points() const {
    Eigen::Index m = 0;
    for (const auto &t : tasks) m += t.size();
    return m;
}

void DomainCollection::validate() const {
    if (num_classes < 1) throw FormatError("collection: class count must be >= 1");
    std::set<int> ids;
    for (const auto &t : tasks) {
        if (t.X.cols() != dim)
            throw FormatError("task " + std::to_string(t.task_id) + ": feature dimension mismatch");
        if (t.X.rows() < 1 || t.y.size() != t.X.rows())
            throw FormatError("task " + std::to_string(t.task_id) + ": empty or label count mismatch");
        if (t.y.minCoeff() < 0 || t.y.maxCoeff() >= num_classes)
            throw FormatError("task " + std::to_string(t.task_id) + ": label out of range");
        if (!ids.insert(t.task_id).second)
            throw FormatError("duplicate task id " + std::to_string(t.task_id));
    }
}

Eigen::Vector2d rotate_clockwise(const Eigen::Vector2d &p, double angle_deg,
                                 const Eigen::Vector2d &center) {
    const double t = angle_deg * std::numbers::pi / 180.0;
    const double c = std::cos(t), s = std::sin(t);
    const Eigen::Vector2d q = p - center;
    return center + Eigen::Vector2d(c * q.x() + s * q.y(), -s * q.x() + c * q.y());
}

int synthetic_label(double x1) {
    return std::clamp(static_cast<int>(std::floor(10.0 * x1)), 0, 9);
}

DomainCollection generate_synthetic(int num_tasks, int n_per_task, std::uint64_t seed,
                                    const SyntheticOptions &opts) {
    require(num_tasks >= 1, "generate_synthetic: num_tasks must be >= 1");
    require(n_per_task >= 1, "generate_synthetic: n_per_task must be >= 1");
    DomainCollection out;
    out.num_classes = 10;
    out.dim = 2;
    out.tasks.resize(static_cast<std::size_t>(num_tasks));
    const Rng root(seed);
    for (int t = 0; t < num_tasks; ++t) {
        Rng rng = root.child(static_cast<std::uint64_t>(t));
        const double angle = rng.uniform(0.0, 180.0);
        TaskDataset task;
        task.task_id = t;
        task.angle_deg = angle;
        task.X.resize(n_per_task, 2);
        task.y.resize(n_per_task);
        for (int j = 0; j < n_per_task; ++j) {
            const Eigen::Vector2d p(rng.uniform(), rng.uniform());
            task.y(j) = synthetic_label(p.x());
            task.X.row(j) = rotate_clockwise(p, angle, opts.center).transpose();
        }
        out.tasks[static_cast<std::size_t>(t)] = std::move(task);
    }
    return out;
}

// ---------------------------------------------------------------- IDX

namespace {

std::uint32_t read_be32(std::istream &in) {
    std::array<unsigned char, 4> b{};
    if (!in.read(reinterpret_cast<char *>(b.data()), 4)) throw IoError("idx: truncated header");
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
           std::uint32_t{b[3]};
}

void write_be32(std::ostream &out, std::uint32_t v) {
    const std::array<char, 4> b{static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                                static_cast<char>(v >> 8), static_cast<char>(v)};
    out.write(b.data(), 4);
}

std::ifstream open_binary(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

} // namespace

IdxImages load_idx_images(const fs::path &path) {
    auto in = open_binary(path);
    const auto magic = read_be32(in);
    if (magic != kIdxImagesMagic) throw FormatError(path.string() + ": bad idx image magic");
    const auto count = read_be32(in);
    const auto rows = read_be32(in);
    const auto cols = read_be32(in);
    const std::size_t pixels = std::size_t{rows} * cols;
    IdxImages out;
    out.rows = static_cast<int>(rows);
    out.cols = static_cast<int>(cols);
    out.images.resize(count, static_cast<Eigen::Index>(pixels));
    std::vector<unsigned char> buf(pixels);
    for (std::uint32_t i = 0; i < count; ++i) {
        if (!in.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(pixels)))
            throw IoError(path.string() + ": truncated image data");
        for (std::size_t k = 0; k < pixels; ++k)
            out.images(i, static_cast<Eigen::Index>(k)) = buf[k] / 255.0;
    }
    return out;
}

IndexVector load_idx_labels(const fs::path &path) {
    auto in = open_binary(path);
    const auto magic = read_be32(in);
    if (magic != kIdxLabelsMagic) throw FormatError(path.string() + ": bad idx label magic");
    const auto count = read_be32(in);
    std::vector<unsigned char> buf(count);
    if (!in.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(count)))
        throw IoError(path.string() + ": truncated label data");
    IndexVector labels(count);
    for (std::uint32_t i = 0; i < count; ++i) labels(i) = buf[i];
    return labels;
}

void write_idx_images(const fs::path &path, const IdxImages &images) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_be32(out, kIdxImagesMagic);
    write_be32(out, static_cast<std::uint32_t>(images.images.rows()));
    write_be32(out, static_cast<std::uint32_t>(images.rows));
    write_be32(out, static_cast<std::uint32_t>(images.cols));
    for (Eigen::Index i = 0; i < images.images.rows(); ++i)
        for (Eigen::Index k = 0; k < images.images.cols(); ++k) {
            const double v = std::clamp(images.images(i, k), 0.0, 1.0);
            out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
        }
}

void write_idx_labels(const fs::path &path, const IndexVector &labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_be32(out, kIdxLabelsMagic);
    write_be32(out, static_cast<std::uint32_t>(labels.size()));
    for (Eigen::Index i = 0; i < labels.size(); ++i)
        out.put(static_cast<char>(static_cast<unsigned char>(labels(i))));
}

// ---------------------------------------------------------------- MNIST-MOD

RowVector rotate_image(const Eigen::Ref<const RowVector> &image, int rows, int cols,
                       double angle_deg) {
    require_dims(image.size() == Eigen::Index{rows} * cols, "rotate_image: size mismatch");
    const double t = angle_deg * std::numbers::pi / 180.0;
    const double c = std::cos(t), s = std::sin(t);
    const double cx = 0.5 * (cols - 1), cy = 0.5 * (rows - 1);
    auto pixel = [&](int r, int q) -> double {
        if (r < 0 || r >= rows || q < 0 || q >= cols) return 0.0;
        return image(Eigen::Index{r} * cols + q);
    };
    RowVector out(image.size());
    // Row index grows downwards, so visual clockwise is the standard matrix
    // in (col, row) coordinates; sample the source through its inverse.
    for (int r = 0; r < rows; ++r) {
        for (int q = 0; q < cols; ++q) {
            const double dx = q - cx, dy = r - cy;
            const double sx = cx + c * dx + s * dy;
            const double sy = cy - s * dx + c * dy;
            const double fx0 = std::floor(sx), fy0 = std::floor(sy);
            const int x0 = static_cast<int>(fx0), y0 = static_cast<int>(fy0);
            const double fx = sx - fx0, fy = sy - fy0;
            out(Eigen::Index{r} * cols + q) =
                (1.0 - fy) * ((1.0 - fx) * pixel(y0, x0) + fx * pixel(y0, x0 + 1)) +
                fy * ((1.0 - fx) * pixel(y0 + 1, x0) + fx * pixel(y0 + 1, x0 + 1));
        }
    }
    return out;
}

DomainCollection make_mnist_mod(const IdxImages &images, const IndexVector &labels,
                                int num_tasks, int images_per_task, std::uint64_t seed,
                                int num_classes) {
    const Eigen::Index available = images.images.rows();
    if (available == 0) throw FormatError("make_mnist_mod: empty image set");
    require_dims(labels.size() == available, "make_mnist_mod: label count mismatch");
    require(num_tasks >= 1, "make_mnist_mod: num_tasks must be >= 1");
    require(images_per_task >= 1 && images_per_task <= available,
            "make_mnist_mod: images_per_task must be in [1, number of images]");

    const Rng root(seed);
    // pool: partial Fisher-Yates on a dedicated stream
    Rng pool_rng = root.child(0xF00DULL);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(available));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    for (int k = 0; k < images_per_task; ++k) {
        const auto pick = k + static_cast<Eigen::Index>(
                                  pool_rng.below(static_cast<std::uint64_t>(available - k)));
        std::swap(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(pick)]);
    }
    PointMatrix pool(images_per_task, images.images.cols());
    IndexVector pool_labels(images_per_task);
    for (int k = 0; k < images_per_task; ++k) {
        pool.row(k) = images.images.row(order[static_cast<std::size_t>(k)]);
        pool_labels(k) = labels(order[static_cast<std::size_t>(k)]);
    }

    DomainCollection out;
    out.num_classes = num_classes;
    out.dim = images.images.cols();
    out.tasks.resize(static_cast<std::size_t>(num_tasks));
    for (int t = 0; t < num_tasks; ++t) {
        Rng rng = root.child(static_cast<std::uint64_t>(t));
        const double angle = rng.uniform(0.0, 180.0);
        TaskDataset task;
        task.task_id = t;
        task.angle_deg = angle;
        task.X.resize(images_per_task, out.dim);
        for (int k = 0; k < images_per_task; ++k)
            task.X.row(k) = rotate_image(pool.row(k), images.rows, images.cols, angle);
        task.y = pool_labels;
        out.tasks[static_cast<std::size_t>(t)] = std::move(task);
    }
    return out;
}

// ---------------------------------------------------------------- splitting

DomainCollection select_tasks(const DomainCollection &collection,
                              const std::vector<std::size_t> &positions) {
    DomainCollection out;
    out.num_classes = collection.num_classes;
    out.dim = collection.dim;
    out.tasks.reserve(positions.size());
    for (auto p : positions) out.tasks.push_back(collection.tasks.at(p));
    return out;
}

std::pair<DomainCollection, DomainCollection> split_tasks(const DomainCollection &collection,
                                                          int n_train, std::uint64_t seed) {
    const auto total = static_cast<int>(collection.size());
    require(n_train >= 1, "split_tasks: n_train must be >= 1");
    require(n_train < total, "split_tasks: n_train must be smaller than the number of tasks");
    std::vector<std::size_t> order(collection.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = order.size() - 1; i > 0; --i)
        std::swap(order[i], order[rng.below(i + 1)]);
    std::vector<std::size_t> train(order.begin(), order.begin() + n_train);
    std::vector<std::size_t> test(order.begin() + n_train, order.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {select_tasks(collection, train), select_tasks(collection, test)};
}

// ---------------------------------------------------------------- directory format

void save_collection(const DomainCollection &collection, const fs::path &dir) {
    collection.validate();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    nlohmann::ordered_json manifest;
    manifest["format"] = "mdg-collection";
    manifest["version"] = 1;
    manifest["c"] = collection.num_classes;
    manifest["d"] = collection.dim;
    manifest["tasks"] = nlohmann::ordered_json::array();
    char buf[40];
    for (const auto &t : collection.tasks) {
        const std::string file = "task_" + std::to_string(t.task_id) + ".csv";
        std::ofstream out(dir / file);
        if (!out) throw IoError("cannot write " + (dir / file).string());
        for (Eigen::Index k = 0; k < t.dim(); ++k) out << 'x' << k << ',';
        out << "label\n";
        for (Eigen::Index j = 0; j < t.size(); ++j) {
            for (Eigen::Index k = 0; k < t.dim(); ++k) {
                std::snprintf(buf, sizeof buf, "%.17g", t.X(j, k));
                out << buf << ',';
            }
            out << t.y(j) << '\n';
        }
        if (!out) throw IoError("write failed for " + (dir / file).string());
        nlohmann::ordered_json entry;
        entry["id"] = t.task_id;
        entry["file"] = file;
        entry["n"] = t.size();
        if (t.angle_deg) entry["angle"] = *t.angle_deg;
        manifest["tasks"].push_back(entry);
    }
    std::ofstream mout(dir / "manifest.json");
    if (!mout) throw IoError("cannot write manifest in " + dir.string());
    mout << manifest.dump(2) << '\n';
}

namespace {

TaskDataset read_task_csv(const fs::path &path, int id, Eigen::Index d) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + ": missing header");
    std::vector<double> values;
    std::vector<int> labels;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        Eigen::Index col = 0;
        while (std::getline(ss, cell, ',')) {
            try {
                if (col < d) values.push_back(std::stod(cell));
                else if (col == d) labels.push_back(std::stoi(cell));
            } catch (const std::exception &) {
                throw FormatError(path.string() + ": bad numeric field '" + cell + "'");
            }
            ++col;
        }
        if (col != d + 1) throw FormatError(path.string() + ": wrong column count");
    }
    TaskDataset t;
    t.task_id = id;
    const auto n = static_cast<Eigen::Index>(labels.size());
    t.X = Eigen::Map<PointMatrix>(values.data(), n, d);
    t.y = Eigen::Map<IndexVector>(labels.data(), n);
    return t;
}

} // namespace

DomainCollection load_collection(const fs::path &dir) {
    const auto mpath = dir / "manifest.json";
    std::ifstream in(mpath);
    if (!in) throw IoError("cannot open " + mpath.string());
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception &e) {
        throw FormatError(mpath.string() + ": " + e.what());
    }
    DomainCollection out;
    try {
        out.num_classes = manifest.at("c").get<int>();
        out.dim = manifest.at("d").get<Eigen::Index>();
        for (const auto &entry : manifest.at("tasks")) {
            auto t = read_task_csv(dir / entry.at("file").get<std::string>(),
                                   entry.at("id").get<int>(), out.dim);
            if (entry.contains("angle")) t.angle_deg = entry["angle"].get<double>();
            out.tasks.push_back(std::move(t));
        }
    } catch (const nlohmann::json::exception &e) {
        throw FormatError(mpath.string() + ": " + e.what());
    }
    out.validate();
    return out;
}

} // namespace mdg
