#include "cli.hpp"

#include "mdg/bound.hpp"
#include "mdg/data.hpp"
#include "mdg/dg.hpp"
#include "mdg/error.hpp"
#include "mdg/parallel.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace mdg::cli {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char *kVersion = "1.0.0";

// ---------------------------------------------------------------- shared option groups

struct Common {
    std::string config;
    std::string manifest;
    unsigned threads = 0;
    std::uint64_t seed = 0;
};

struct Solver {
    std::string loss = "mlr";
    int max_iters = 2000;
    double tol = 1e-7;

    SolverOptions options(std::uint64_t seed) const {
        SolverOptions o;
        o.max_iters = max_iters;
        o.tol = tol;
        o.seed = seed;
        return o;
    }
};

struct Dims {
    Eigen::Index embed = 1024, kappa = 1024, point = 1024;
    RffDims get() const { return {embed, kappa, point}; }
};

struct GridOpts {
    std::vector<double> sigma_x, sigma_xp, sigma_kappa, lambda;
    Grid get() const {
        Grid g;
        if (!sigma_x.empty()) g.sigma_x = sigma_x;
        if (!sigma_xp.empty()) g.sigma_xp = sigma_xp;
        if (!sigma_kappa.empty()) g.sigma_kappa = sigma_kappa;
        if (!lambda.empty()) g.lambda = lambda;
        return g;
    }
};

void add_common(CLI::App *app, Common &c) {
    app->add_option("--config", c.config, "JSON file with option values; flags override it");
    app->add_option("--manifest", c.manifest, "where to write the run manifest");
    app->add_option("--threads", c.threads, "worker threads, 0 = all cores");
    app->add_option("--seed", c.seed, "random seed");
}

void add_solver(CLI::App *app, Solver &s) {
    app->add_option("--loss", s.loss, "mlr | cs | ww | lee");
    app->add_option("--max-iters", s.max_iters)->check(CLI::NonNegativeNumber);
    app->add_option("--tol", s.tol)->check(CLI::NonNegativeNumber);
}

void add_dims(CLI::App *app, Dims &d) {
    app->add_option("--embed-dim", d.embed, "features of the embedding map")->check(CLI::PositiveNumber);
    app->add_option("--kappa-dim", d.kappa, "features of the kappa map")->check(CLI::PositiveNumber);
    app->add_option("--point-dim", d.point, "features of the point map")->check(CLI::PositiveNumber);
}

void add_grid(CLI::App *app, GridOpts &g) {
    app->add_option("--grid-sigma-x", g.sigma_x, "median-heuristic multipliers")->delimiter(',');
    app->add_option("--grid-sigma-xp", g.sigma_xp)->delimiter(',');
    app->add_option("--grid-sigma-kappa", g.sigma_kappa)->delimiter(',');
    app->add_option("--grid-lambda", g.lambda)->delimiter(',');
}

// ---------------------------------------------------------------- config and manifest

std::string option_key(const CLI::Option *opt) {
    const auto &names = opt->get_lnames();
    return names.empty() ? std::string() : names.front();
}

std::string json_to_arg(const json &v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_array()) {
        std::string s;
        for (const auto &e : v) {
            if (!s.empty()) s += ',';
            s += json_to_arg(e);
        }
        return s;
    }
    if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
    if (v.is_number_float()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    throw UsageError("config: unsupported value " + v.dump());
}

// Applies a JSON config (or a run manifest) as option defaults.
void apply_config(CLI::App *sub, const fs::path &path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::exception &e) {
        throw FormatError("config " + path.string() + ": " + e.what());
    }
    if (cfg.contains("options")) cfg = cfg["options"];
    if (!cfg.is_object()) throw FormatError("config " + path.string() + ": expected an object");
    for (const auto &[key, value] : cfg.items()) {
        if (key == "config" || key == "manifest") continue;
        CLI::Option *opt = nullptr;
        for (auto *o : sub->get_options())
            if (option_key(o) == key) opt = o;
        if (!opt) throw UsageError("config: unknown option '" + key + "' for " + sub->get_name());
        opt->default_val(json_to_arg(value));
        opt->required(false); // the config supplied it
    }
}

json resolved_options(const CLI::App *sub) {
    json opts = json::object();
    for (const auto *o : sub->get_options()) {
        const auto key = option_key(o);
        if (key.empty() || key == "help" || key == "config" || key == "manifest") continue;
        std::string v;
        if (o->count() > 0) {
            for (const auto &r : o->results()) {
                if (!v.empty()) v += ',';
                v += r;
            }
        } else {
            v = o->get_default_str();
            if (v.size() >= 2 && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
        }
        opts[key] = v;
    }
    return opts;
}

void write_text(const fs::path &path, const std::string &text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

void write_manifest(const CLI::App *sub, const Common &common, const fs::path &fallback,
                    const json &extra = json::object()) {
    json m;
    m["tool"] = "mdg";
    m["version"] = kVersion;
    m["command"] = sub->get_name();
    m["options"] = resolved_options(sub);
    if (!extra.empty()) m["results"] = extra;
    const fs::path path = common.manifest.empty() ? fallback : fs::path(common.manifest);
    write_text(path, m.dump(2) + "\n");
}

fs::path beside(const fs::path &file, const char *suffix) {
    return fs::path(file.string() + suffix);
}

std::string fmt(double v, const char *f = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// ---------------------------------------------------------------- gen-data

struct GenData {
    Common common;
    std::string dataset = "synthetic";
    int tasks = 100;
    int n = 100;
    std::string out = "data/collection";
    std::vector<double> center{0.0, 0.0};
    std::string idx_images = "data/mnist/images.idx3-ubyte";
    std::string idx_labels = "data/mnist/labels.idx1-ubyte";
};

void gen_data(const CLI::App *sub, const GenData &o, std::ostream &out) {
    DomainCollection c;
    switch (parse_dataset(o.dataset)) {
    case DatasetKind::synthetic: {
        require(o.center.size() == 2, "gen-data: --center takes two values");
        SyntheticOptions so;
        so.center = {o.center[0], o.center[1]};
        c = generate_synthetic(o.tasks, o.n, o.common.seed, so);
        break;
    }
    case DatasetKind::mnist_mod:
        c = make_mnist_mod(load_idx_images(o.idx_images), load_idx_labels(o.idx_labels), o.tasks, o.n,
                           o.common.seed);
        break;
    case DatasetKind::generic: throw UsageError("gen-data: dataset must be synthetic or mnist_mod");
    }
    save_collection(c, o.out);
    write_manifest(sub, o.common, fs::path(o.out) / "run.json");
    out << "dataset " << o.dataset << ": tasks " << c.size() << ", per-task n " << o.n << ", classes "
        << c.num_classes << ", d " << c.dim << " -> " << o.out << "\n";
}

// ---------------------------------------------------------------- train / eval

struct Train {
    Common common;
    Solver solver;
    Dims dims;
    std::string data;
    std::string model = "model.mdg";
    double sigma_x = 0, sigma_xp = 0, sigma_kappa = 0;
    double lambda = 1e-3;
};

KernelConfig resolve_bandwidths(const DomainCollection &train, double sx, double sxp, double sk,
                                const RffDims &dims, std::uint64_t seed) {
    KernelConfig cfg;
    const bool need_median = sx <= 0 || sxp <= 0;
    const double med = need_median ? median_pairwise_distance(stack_points(train), seed) : 0.0;
    cfg.sigma_x = sx > 0 ? sx : med;
    cfg.sigma_xp = sxp > 0 ? sxp : med;
    if (sk > 0) {
        cfg.sigma_kappa = sk;
    } else {
        const auto map = sample_rff(train.dim, dims.embed, cfg.sigma_xp, MapSeeds::from(seed).embed);
        cfg.sigma_kappa = median_embedding_distance(train, map);
    }
    return cfg;
}

void train_cmd(const CLI::App *sub, const Train &o, std::ostream &out) {
    const auto train = load_collection(o.data);
    const auto dims = o.dims.get();
    const auto cfg = resolve_bandwidths(train, o.sigma_x, o.sigma_xp, o.sigma_kappa, dims, o.common.seed);
    TrainTrace trace;
    const auto model = fit_dg(train, cfg, dims, parse_loss(o.solver.loss), o.lambda, o.common.seed,
                              o.solver.options(o.common.seed), &trace);
    save_model(o.model, model);
    const double obj = trace.objective.empty() ? std::nan("") : trace.objective.back();
    write_manifest(sub, o.common, beside(o.model, ".run.json"),
                   {{"sigma_x", cfg.sigma_x},
                    {"sigma_xp", cfg.sigma_xp},
                    {"sigma_kappa", cfg.sigma_kappa},
                    {"iterations", trace.iterations},
                    {"converged", trace.converged}});
    out << "trained on " << train.size() << " tasks: sigma_x " << fmt(cfg.sigma_x) << ", sigma_xp "
        << fmt(cfg.sigma_xp) << ", sigma_kappa " << fmt(cfg.sigma_kappa) << ", lambda " << fmt(o.lambda)
        << ", iterations " << trace.iterations << (trace.converged ? " (converged)" : "")
        << ", objective " << fmt(obj) << " -> " << o.model << "\n";
}

struct Eval {
    Common common;
    std::string model = "model.mdg";
    std::string data;
    std::string out = "eval.csv";
};

void eval_cmd(const CLI::App *sub, const Eval &o, std::ostream &out) {
    const auto model = load_model(o.model);
    const auto test = load_collection(o.data);
    require_dims(test.dim == model.map_x.input_dim(), "eval: collection dimension does not match model");
    const auto report = evaluate(model, test);
    std::ostringstream csv;
    csv << "task_id,error\n";
    for (const auto &[id, e] : report.per_task_error) csv << id << ',' << fmt(e, "%.6f") << '\n';
    write_text(o.out, csv.str());
    write_manifest(sub, o.common, beside(o.out, ".run.json"),
                   {{"mean_error", report.mean_error}, {"std_error", report.std_error}});
    out << "tasks " << test.size() << ": mean error " << fmt(100 * report.mean_error, "%.2f") << "% (std "
        << fmt(100 * report.std_error, "%.2f") << ") -> " << o.out << "\n";
}

// ---------------------------------------------------------------- cv

struct Cv {
    Common common;
    Solver solver;
    Dims dims;
    GridOpts grid;
    std::string data;
    std::string method = "proposed";
    int folds = 5;
    std::string out = "cv.csv";
};

void cv_cmd(const CLI::App *sub, const Cv &o, std::ostream &out) {
    const auto train = load_collection(o.data);
    const auto loss = parse_loss(o.solver.loss);
    const auto opts = o.solver.options(o.common.seed);
    CvResult r;
    if (o.method == "proposed")
        r = cross_validate(train, o.grid.get(), o.folds, loss, o.dims.get(), o.common.seed, opts);
    else if (o.method == "pooling")
        r = cross_validate_pooling(train, o.grid.get(), o.folds, loss, o.dims.point, o.common.seed, opts);
    else
        throw UsageError("cv: --method must be proposed or pooling");
    std::ostringstream csv;
    csv << "mult_sigma_x,mult_sigma_xp,mult_sigma_kappa,sigma_x,sigma_xp,sigma_kappa,lambda,cv_error\n";
    for (const auto &c : r.table)
        csv << fmt(c.multiplier_x, "%.10g") << ',' << fmt(c.multiplier_xp, "%.10g") << ','
            << fmt(c.multiplier_kappa, "%.10g") << ',' << fmt(c.config.sigma_x, "%.10g") << ','
            << fmt(c.config.sigma_xp, "%.10g") << ',' << fmt(c.config.sigma_kappa, "%.10g") << ','
            << fmt(c.lambda, "%.10g") << ',' << fmt(c.cv_error, "%.6f") << '\n';
    write_text(o.out, csv.str());
    const auto &b = r.best;
    write_manifest(sub, o.common, beside(o.out, ".run.json"),
                   {{"sigma_x", b.config.sigma_x},
                    {"sigma_xp", b.config.sigma_xp},
                    {"sigma_kappa", b.config.sigma_kappa},
                    {"lambda", b.lambda},
                    {"cv_error", b.cv_error}});
    out << o.method << " best of " << r.table.size() << " cells: sigma_x " << fmt(b.config.sigma_x);
    if (o.method == "proposed")
        out << ", sigma_xp " << fmt(b.config.sigma_xp) << ", sigma_kappa " << fmt(b.config.sigma_kappa);
    out << ", lambda " << fmt(b.lambda) << ", cv error " << fmt(100 * b.cv_error, "%.2f") << "% -> " << o.out
        << "\n";
}

// ---------------------------------------------------------------- bench

struct Bench {
    Common common;
    Solver solver;
    Dims dims;
    GridOpts grid;
    std::string dataset = "synthetic";
    std::string data;
    std::string idx_images = "data/mnist/images.idx3-ubyte";
    std::string idx_labels = "data/mnist/labels.idx1-ubyte";
    int tasks = 100, n = 100, n_train = 80, reps = 10, folds = 5;
    std::string out = "bench.csv";
};

void bench_cmd(const CLI::App *sub, const Bench &o, std::ostream &out) {
    BenchmarkSpec spec;
    spec.dataset = parse_dataset(o.dataset);
    if (spec.dataset == DatasetKind::generic) {
        require(!o.data.empty(), "bench: generic dataset needs --data");
        spec.collection_dir = o.data;
        if (!fs::is_directory(spec.collection_dir)) throw IoError("no such collection: " + o.data);
    }
    spec.idx_images = o.idx_images;
    spec.idx_labels = o.idx_labels;
    spec.num_tasks = o.tasks;
    spec.n_per_task = o.n;
    spec.n_train = o.n_train;
    spec.reps = o.reps;
    spec.folds = o.folds;
    spec.dims = o.dims.get();
    spec.grid = o.grid.get();
    spec.loss = parse_loss(o.solver.loss);
    spec.solver = o.solver.options(o.common.seed);
    spec.seed = o.common.seed;
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = benchmark(spec);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text(o.out, benchmark_csv(result));
    json summary = json::object();
    for (const auto &s : result.summary) summary[s.method] = {{"mean_pct", s.mean_pct}, {"std_pct", s.std_pct}};
    write_manifest(sub, o.common, beside(o.out, ".run.json"), summary);
    out << "benchmark " << o.dataset << ", " << o.reps << " reps, " << fmt(secs, "%.1f") << " s\n";
    for (const auto &s : result.summary)
        out << "  " << s.method << ": " << fmt(s.mean_pct, "%.2f") << " +- " << fmt(s.std_pct, "%.2f")
            << " % error\n";
    out << "  -> " << o.out << "\n";
}

// ---------------------------------------------------------------- bound

struct Bound {
    Common common;
    BoundParams params;
    std::vector<long long> n_values{100};
    std::string sweep_name;
    std::vector<double> values;
    std::string variant = "stated";
    bool mc = false;
    int d = 5;
    int trials = 500;
    double sigma_xp = 1.0;
    std::string out = "bound.csv";
};

void bound_cmd(const CLI::App *sub, Bound o, std::ostream &out) {
    std::string csv;
    json results = json::object();
    if (o.mc) {
        require(sub->get_option("--sweep")->count() == 0, "bound: --mc and --sweep are exclusive");
        ConcentrationOptions c;
        c.d = o.d;
        c.n_list = o.n_values;
        c.trials = o.trials;
        c.sigma_xp = o.sigma_xp;
        c.delta = o.params.delta;
        c.B = o.params.B_kp;
        c.seed = o.common.seed;
        const auto rows = embedding_concentration_mc(c);
        csv = concentration_csv(rows);
        out << "embedding concentration, d " << o.d << ", " << o.trials << " trials, delta "
            << fmt(o.params.delta) << "\n";
        for (const auto &r : rows)
            out << "  n " << r.n << ": quantile " << fmt(r.quantile) << ", hoeffding rhs " << fmt(r.hoeffding_rhs)
                << "\n";
    } else {
        require(o.n_values.size() == 1, "bound: --n takes a list only with --mc");
        o.params.n = o.n_values.front();
        const auto variant = o.variant == "stated"           ? BoundVariant::stated
                             : o.variant == "precombination" ? BoundVariant::precombination
                                                             : throw UsageError("bound: unknown --variant");
        o.params.validate();
        std::vector<SweepRow> rows;
        std::string name = o.sweep_name;
        if (name.empty()) {
            name = "N";
            rows = sweep(o.params, name, {static_cast<double>(o.params.N)}, variant);
        } else {
            require(!o.values.empty(), "bound: --sweep needs --values");
            rows = sweep(o.params, name, o.values, variant);
        }
        csv = sweep_csv(name, rows);
        out << "bound (" << o.variant << "), sweep over " << name << "\n";
        for (const auto &r : rows)
            out << "  " << name << " = " << fmt(r.value) << ": term_one " << fmt(r.term_one) << ", term_two "
                << fmt(r.term_two) << ", rhs " << fmt(r.rhs) << "\n";
    }
    write_text(o.out, csv);
    write_manifest(sub, o.common, beside(o.out, ".run.json"));
    out << "  -> " << o.out << "\n";
}

// ---------------------------------------------------------------- dispatch

int exit_code_for(const std::exception &e) {
    if (dynamic_cast<const NumericError *>(&e)) return 3;
    if (dynamic_cast<const FormatError *>(&e) || dynamic_cast<const IoError *>(&e)) return 2;
    if (dynamic_cast<const std::invalid_argument *>(&e)) return 1;
    if (dynamic_cast<const fs::filesystem_error *>(&e)) return 2;
    return 3;
}

std::string find_config(const std::vector<std::string> &args) {
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return {};
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"multiclass domain generalization with kernel mean embeddings", "mdg"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    GenData gd;
    auto *gen = app.add_subcommand("gen-data", "generate a task collection");
    add_common(gen, gd.common);
    gen->add_option("--dataset", gd.dataset, "synthetic | mnist_mod");
    gen->add_option("--tasks", gd.tasks)->check(CLI::PositiveNumber);
    gen->add_option("--n", gd.n, "points per task")->check(CLI::PositiveNumber);
    gen->add_option("--out", gd.out, "output directory");
    gen->add_option("--center", gd.center, "synthetic rotation center x,y")->delimiter(',')->expected(2);
    gen->add_option("--idx-images", gd.idx_images);
    gen->add_option("--idx-labels", gd.idx_labels);

    Train tr;
    auto *train = app.add_subcommand("train", "fit the embedding model on a collection");
    add_common(train, tr.common);
    add_solver(train, tr.solver);
    add_dims(train, tr.dims);
    train->add_option("--data", tr.data, "collection directory")->required();
    train->add_option("--model", tr.model, "output model file");
    train->add_option("--sigma-x", tr.sigma_x, "0 = median heuristic");
    train->add_option("--sigma-xp", tr.sigma_xp, "0 = median heuristic");
    train->add_option("--sigma-kappa", tr.sigma_kappa, "0 = median embedding distance");
    train->add_option("--lambda", tr.lambda)->check(CLI::PositiveNumber);

    Eval ev;
    auto *eval = app.add_subcommand("eval", "per-task error of a saved model");
    add_common(eval, ev.common);
    eval->add_option("--model", ev.model);
    eval->add_option("--data", ev.data, "collection directory")->required();
    eval->add_option("--out", ev.out);

    Cv cvo;
    auto *cv = app.add_subcommand("cv", "task-level grid search");
    add_common(cv, cvo.common);
    add_solver(cv, cvo.solver);
    add_dims(cv, cvo.dims);
    add_grid(cv, cvo.grid);
    cv->add_option("--data", cvo.data, "collection directory")->required();
    cv->add_option("--method", cvo.method, "proposed | pooling");
    cv->add_option("--folds", cvo.folds);
    cv->add_option("--out", cvo.out);

    Bench bo;
    auto *bench = app.add_subcommand("bench", "repeated split, cross-validate, test");
    add_common(bench, bo.common);
    add_solver(bench, bo.solver);
    add_dims(bench, bo.dims);
    add_grid(bench, bo.grid);
    bench->add_option("--dataset", bo.dataset, "synthetic | mnist_mod | generic");
    bench->add_option("--data", bo.data, "collection directory for generic");
    bench->add_option("--idx-images", bo.idx_images);
    bench->add_option("--idx-labels", bo.idx_labels);
    bench->add_option("--tasks", bo.tasks)->check(CLI::PositiveNumber);
    bench->add_option("--n", bo.n)->check(CLI::PositiveNumber);
    bench->add_option("--n-train", bo.n_train)->check(CLI::PositiveNumber);
    bench->add_option("--reps", bo.reps)->check(CLI::PositiveNumber);
    bench->add_option("--folds", bo.folds);
    bench->add_option("--out", bo.out);

    Bound bd;
    auto *bound = app.add_subcommand("bound", "evaluate the estimation-error bound");
    add_common(bound, bd.common);
    auto &p = bd.params;
    bound->add_option("--L_ell", p.L_ell);
    bound->add_option("--L_kappa", p.L_kappa);
    bound->add_option("--alpha", p.alpha);
    bound->add_option("--R", p.R);
    bound->add_option("--B_k", p.B_k);
    bound->add_option("--B_kp", p.B_kp);
    bound->add_option("--B_kappa", p.B_kappa);
    bound->add_option("--B_Y", p.B_Y);
    bound->add_option("--p", p.p);
    bound->add_option("--c", p.c);
    bound->add_option("--N", p.N);
    bound->add_option("--n", bd.n_values, "points per task; a list with --mc")->delimiter(',');
    bound->add_option("--delta", p.delta);
    bound->add_option("--sweep", bd.sweep_name, "parameter to sweep");
    bound->add_option("--values", bd.values, "sweep values")->delimiter(',');
    bound->add_option("--variant", bd.variant, "stated | precombination");
    bound->add_flag("--mc", bd.mc, "Monte Carlo embedding concentration");
    bound->add_option("--d", bd.d, "dimension for --mc");
    bound->add_option("--trials", bd.trials, "trials for --mc");
    bound->add_option("--sigma-xp", bd.sigma_xp, "bandwidth for --mc");
    bound->add_option("--out", bd.out);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        if (!args.empty()) {
            const auto config = find_config(args);
            if (!config.empty()) {
                CLI::App *sub = nullptr;
                for (auto *s : app.get_subcommands([](const CLI::App *) { return true; }))
                    if (s->get_name() == args.front()) sub = s;
                if (!sub) throw UsageError("--config must follow a subcommand");
                apply_config(sub, config);
            }
        }
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    } catch (const std::exception &e) {
        err << "mdg: " << e.what() << "\n";
        return exit_code_for(e);
    }

    try {
        auto *sub = app.get_subcommands().front();
        const Common *common = sub == gen     ? &gd.common
                               : sub == train ? &tr.common
                               : sub == eval  ? &ev.common
                               : sub == cv    ? &cvo.common
                               : sub == bench ? &bo.common
                                              : &bd.common;
        set_thread_count(common->threads);
        if (sub == gen) gen_data(sub, gd, out);
        else if (sub == train) train_cmd(sub, tr, out);
        else if (sub == eval) eval_cmd(sub, ev, out);
        else if (sub == cv) cv_cmd(sub, cvo, out);
        else if (sub == bench) bench_cmd(sub, bo, out);
        else bound_cmd(sub, bd, out);
    } catch (const std::exception &e) {
        err << "mdg: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 0;
}

} // namespace mdg::cli
