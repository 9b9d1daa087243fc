#include <doctest.h>

#include "cli.hpp"
#include "mdg/parallel.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = mdg::cli::run(args, out, err);
    mdg::set_thread_count(1);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

// fresh scratch directory per test case
struct Scratch {
    fs::path dir;
    explicit Scratch(const std::string &name) {
        dir = fs::temp_directory_path() / ("mdg_cli_" + name);
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    std::string operator/(const std::string &leaf) const { return (dir / leaf).string(); }
};

std::size_t lines(const std::string &s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

} // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit 1") {
    CHECK(invoke({}).code == 1);
    CHECK(invoke({"frobnicate"}).code == 1);
    CHECK(invoke({"gen-data", "--tasks", "0"}).code == 1);
    CHECK(invoke({"bound", "--delta", "1.5"}).code == 1);
    CHECK(invoke({"bound", "--c", "1"}).code == 1);
    CHECK(invoke({"bound", "--n", "100,400"}).code == 1);
    CHECK(invoke({"train"}).code == 1);
    CHECK(invoke({"gen-data", "--help"}).code == 0);
}

TEST_CASE("gen-data is reproducible") {
    Scratch s("gen");
    const Run a = invoke({"gen-data", "--tasks", "4", "--n", "10", "--seed", "3", "--out", s / "a"});
    REQUIRE(a.code == 0);
    const Run b = invoke({"gen-data", "--tasks", "4", "--n", "10", "--seed", "3", "--out", s / "b"});
    REQUIRE(b.code == 0);
    int files = 0;
    for (const auto &e : fs::directory_iterator(s / "a")) {
        const auto name = e.path().filename();
        if (name == "run.json") continue;
        ++files;
        CHECK(slurp(e.path()) == slurp(fs::path(s / "b") / name));
    }
    CHECK(files >= 1);
    const std::string manifest = slurp(fs::path(s / "a") / "run.json");
    CHECK(manifest.find("\"command\": \"gen-data\"") != std::string::npos);
    CHECK(manifest.find("\"tasks\": \"4\"") != std::string::npos);
}

TEST_CASE("data problems exit 2") {
    Scratch s("missing");
    CHECK(invoke({"train", "--data", s / "nope"}).code == 2);
    CHECK(invoke({"eval", "--data", s / "nope", "--model", s / "nope.mdg"}).code == 2);
    CHECK(invoke({"bench", "--dataset", "generic", "--data", s / "nope"}).code == 2);
    CHECK(invoke({"gen-data", "--dataset", "mnist_mod", "--idx-images", s / "x", "--idx-labels", s / "y",
               "--out", s / "m"})
              .code == 2);
    std::ofstream(s / "junk.mdg") << "not a model";
    REQUIRE(invoke({"gen-data", "--tasks", "2", "--n", "5", "--out", s / "c"}).code == 0);
    CHECK(invoke({"eval", "--data", s / "c", "--model", s / "junk.mdg"}).code == 2);
}

TEST_CASE("bound sweep table") {
    Scratch s("bound");
    const Run r = invoke({"bound", "--sweep", "c", "--values", "2,10,100", "--p", "2", "--out", s / "b.csv"});
    REQUIRE(r.code == 0);
    const auto csv = slurp(s / "b.csv");
    CHECK(csv.rfind("c,term_one,term_two,bound_rhs\n", 0) == 0);
    CHECK(lines(csv) == 4);
    CHECK(fs::exists(s / "b.csv.run.json"));
    CHECK(invoke({"bound", "--sweep", "gamma", "--values", "1", "--out", s / "g.csv"}).code == 1);
    CHECK(invoke({"bound", "--variant", "other", "--out", s / "g.csv"}).code == 1);
}

TEST_CASE("bound Monte Carlo table") {
    Scratch s("mc");
    const Run r = invoke({"bound", "--mc", "--n", "50,200", "--trials", "100", "--d", "2", "--seed", "4", "--out",
                       s / "mc.csv"});
    REQUIRE(r.code == 0);
    const auto csv = slurp(s / "mc.csv");
    CHECK(csv.rfind("n,quantile,mean,hoeffding_rhs\n", 0) == 0);
    CHECK(lines(csv) == 3);
    CHECK(invoke({"bound", "--mc", "--trials", "10", "--out", s / "mc2.csv"}).code == 1);
}

TEST_CASE("train, eval and config override") {
    Scratch s("train");
    REQUIRE(invoke({"gen-data", "--tasks", "6", "--n", "20", "--seed", "2", "--out", s / "tr"}).code == 0);
    REQUIRE(invoke({"gen-data", "--tasks", "3", "--n", "20", "--seed", "9", "--out", s / "te"}).code == 0);
    const std::vector<std::string> dims{"--embed-dim", "64", "--kappa-dim", "16", "--point-dim", "64"};
    std::vector<std::string> args{"train", "--data", s / "tr", "--model", s / "m.mdg", "--lambda", "0.01"};
    args.insert(args.end(), dims.begin(), dims.end());
    const Run t = invoke(args);
    REQUIRE(t.code == 0);
    const Run e = invoke({"eval", "--model", s / "m.mdg", "--data", s / "te", "--out", s / "e.csv"});
    REQUIRE(e.code == 0);
    const auto csv = slurp(s / "e.csv");
    CHECK(csv.rfind("task_id,error\n", 0) == 0);
    CHECK(lines(csv) == 4);

    // the run manifest reproduces the run through --config
    const Run again = invoke({"train", "--config", s / "m.mdg.run.json", "--model", s / "m2.mdg", "--manifest",
                           s / "m2.json"});
    REQUIRE(again.code == 0);
    CHECK(slurp(s / "m.mdg") == slurp(s / "m2.mdg"));

    // flags win over the config file
    std::ofstream(s / "cfg.json") << "{\"lambda\": 0.5, \"data\": \"" << s / "tr"
                                  << "\", \"embed-dim\": 32, \"kappa-dim\": 8, \"point-dim\": 32}";
    REQUIRE(invoke({"train", "--config", s / "cfg.json", "--lambda", "0.02", "--model", s / "m3.mdg"}).code == 0);
    const auto manifest = slurp(s / "m3.mdg.run.json");
    CHECK(manifest.find("\"lambda\": \"0.02\"") != std::string::npos);
    CHECK(manifest.find("\"embed-dim\": \"32\"") != std::string::npos);

    std::ofstream(s / "bad.json") << "{\"no-such-option\": 1}";
    CHECK(invoke({"train", "--config", s / "bad.json", "--data", s / "tr"}).code == 1);
}

TEST_CASE("bench reruns are byte identical") {
    Scratch s("bench");
    const std::vector<std::string> base{
        "bench",         "--reps",          "1",   "--tasks",          "6",   "--n",
        "20",            "--n-train",       "4",   "--folds",          "2",   "--seed",
        "7",             "--embed-dim",     "32",  "--kappa-dim",      "8",   "--point-dim",
        "32",            "--grid-sigma-x",  "1",   "--grid-sigma-xp",  "1",   "--grid-sigma-kappa",
        "0.3,1",         "--grid-lambda",   "0.01"};
    auto a = base;
    a.insert(a.end(), {"--out", s / "a.csv"});
    auto b = base;
    b.insert(b.end(), {"--out", s / "b.csv", "--threads", "3"});
    REQUIRE(invoke(a).code == 0);
    REQUIRE(invoke(b).code == 0);
    const auto csv = slurp(s / "a.csv");
    CHECK(csv == slurp(s / "b.csv"));
    CHECK(csv.rfind("dataset,method,rep,mean_error_pct,std_error_pct,sigma_x,sigma_xp,sigma_kappa,lambda\n", 0) ==
          0);
    CHECK(lines(csv) == 3);
}

}
