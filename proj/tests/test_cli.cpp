#include "shared_lab.hpp"

#include "cli.hpp"
#include "io.hpp"
#include "suite.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace hartree;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "hartree_lab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = cli::main(int(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::current_path() / "cli_scratch" / name;
    fs::remove_all(p);
    return p;
}

// Seeds the constants cache so `ode` runs without building a lab.
void seed_cache(const fs::path& dir) {
    Constants c;
    c.N = 7;
    c.c0 = testing::kC0;
    c.C1 = testing::kC1;
    c.C2 = testing::kC2;
    c.C3 = testing::kC3;
    c.kappa = testing::kKappa;
    c.nu = 6.30133;
    c.M = 1.09;
    c.grid_r_min = 1e-4;
    c.grid_r_max = 1e3;
    c.grid_points = 2048;
    nlohmann::json j = io::to_json(c);
    j["mode_norm"] = 1.0;
    io::Writer(dir).json("constants_N7_2048.json", j);
}

} // namespace

TEST_CASE("numbers print at 17 significant digits") {
    CHECK(io::num(0.1) == "0.10000000000000001");
    CHECK(io::num(1.0) == "1");
    CHECK(io::num(-2.5e-300) == "-2.5e-300");
    CHECK(io::num(1.0 / 3.0) == "0.33333333333333331");
    CHECK(io::num(std::nan("")) == "nan");
    CHECK(io::num(-INFINITY) == "-inf");
    const nlohmann::json j = {{"x", 0.1}, {"n", 3}, {"bad", NAN}, {"s", "a"}, {"arr", {1.0 / 3.0}}};
    const std::string d = io::dump(j, -1);
    CHECK(d.find("\"x\":0.10000000000000001") != std::string::npos);
    CHECK(d.find("\"n\":3") != std::string::npos);
    CHECK(d.find("\"bad\":null") != std::string::npos);
    CHECK(d.find("0.33333333333333331") != std::string::npos);
    CHECK(nlohmann::json::parse(d).at("x").get<double>() == 0.1);
}

TEST_CASE("csv writer") {
    std::ostringstream os;
    io::CsvWriter w(os, {"a", "b"});
    w.row({1.0, 0.1});
    CHECK(os.str() == "a,b\n1,0.10000000000000001\n");
    CHECK_THROWS_AS(w.row({1.0}), std::invalid_argument);
}

TEST_CASE("constants json round trip") {
    Constants c;
    c.c0 = testing::kC0;
    c.kappa = testing::kKappa;
    c.grid_points = 2048;
    const Constants back = io::constants_from_json(nlohmann::json::parse(io::dump(io::to_json(c))));
    CHECK(back.c0 == c.c0);
    CHECK(back.kappa == c.kappa);
    CHECK(back.grid_points == 2048);
}

TEST_CASE("usage errors exit with 1") {
    const fs::path d = fresh_dir("usage");
    CHECK(run({}).code == cli::kUsage);
    CHECK(run({"--out", d.string(), "nope"}).code == cli::kUsage);
    CHECK(run({"--out", d.string(), "virial", "audit", "--bogus"}).code == cli::kUsage);
    const Run six = run({"--out", d.string(), "--N", "6", "virial", "audit"});
    CHECK(six.code == cli::kUsage);
    CHECK(six.err.find("N >= 7") != std::string::npos);
    CHECK(run({"--out", d.string(), "verify", "--suite", "nope"}).code == cli::kUsage);
    CHECK(run({"--out", d.string(), "virial", "audit", "--c", "0.5"}).code == cli::kUsage);
    CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("config file values are overridden by flags") {
    const fs::path d = fresh_dir("config");
    fs::create_directories(d);
    io::RunConfig cfg;
    cfg.points = 1024;
    cfg.seed = 9;
    cfg.out = (d / "a").string();
    const fs::path file = d / "run.cfg";
    std::ofstream(file) << cfg.to_kv();

    const Run r = run({"--config", file.string(), "--seed", "5", "virial", "audit"});
    CHECK(r.code == cli::kOk);
    const std::string written = slurp(d / "a" / "run.cfg");
    CHECK(written.find("points=1024\n") != std::string::npos);
    CHECK(written.find("seed=5\n") != std::string::npos);

    // the echo reads back to the same configuration
    const Run again = run({"--config", (d / "a" / "run.cfg").string(), "virial", "audit"});
    CHECK(again.code == cli::kOk);
    CHECK(slurp(d / "a" / "run.cfg") == written);

    std::ofstream(d / "bad.cfg") << "nonsense=1\n";
    CHECK(run({"--config", (d / "bad.cfg").string(), "virial", "audit"}).code == cli::kUsage);
}

TEST_CASE("virial audit reports json") {
    const fs::path d = fresh_dir("audit");
    const Run r = run({"--out", d.string(), "virial", "audit", "--c", "0.001", "--R", "20"});
    CHECK(r.code == cli::kOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("ok").get<bool>());
    CHECK(j.at("c").get<double>() == 0.001);
}

TEST_CASE("ode output is deterministic") {
    std::string csv[2];
    for (int k = 0; k < 2; ++k) {
        const fs::path d = fresh_dir("ode" + std::to_string(k));
        seed_cache(d);
        const Run r = run({"--out", d.string(), "ode", "--T", "-1000", "--t-end", "-10", "--outputs", "50"});
        REQUIRE(r.code == cli::kOk);
        csv[k] = slurp(d / "ode.csv");
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j.contains("monitor"));
    }
    CHECK(!csv[0].empty());
    CHECK(csv[0] == csv[1]);
    // the first data row carries t = T at full precision
    const auto first_row = csv[0].substr(csv[0].find('\n') + 1);
    CHECK(first_row.rfind("-1000,", 0) == 0);
}

TEST_CASE("ode argument validation") {
    const fs::path d = fresh_dir("ode_bad");
    seed_cache(d);
    CHECK(run({"--out", d.string(), "ode", "--T", "-10", "--t-end", "-20"}).code == cli::kUsage);
    CHECK(run({"--out", d.string(), "ode", "--closure", "cubic"}).code == cli::kUsage);
}

TEST_CASE("report schema and failure persistence") {
    suite::Criterion cr;
    cr.id = 3;
    cr.key = "demo";
    suite::Case pass;
    pass.name = "demo.pass";
    pass.paper_ref = "ref";
    pass.passed = true;
    pass.margin = 0.5;
    pass.tolerance = 1.0;
    suite::Case fail = pass;
    fail.name = "demo.fail";
    fail.passed = false;
    fail.margin = -0.1;
    fail.inputs = {{"seed", 1}};
    cr.cases = {pass, fail};
    std::vector<suite::Criterion> results{cr};
    CHECK(!results[0].passed());

    const fs::path d = fresh_dir("report");
    suite::persist_failures(results, d.string());
    CHECK(fs::exists(d / "failures" / "demo.fail.json"));
    CHECK(!fs::exists(d / "failures" / "demo.pass.json"));
    const auto saved = nlohmann::json::parse(slurp(d / "failures" / "demo.fail.json"));
    CHECK(saved.at("seed") == 1);

    const nlohmann::json rep = suite::report("demo", results);
    CHECK(rep.at("suite") == "demo");
    REQUIRE(rep.at("cases").size() == 2);
    for (const auto& c : rep.at("cases"))
        for (const char* key : {"name", "paper_ref", "status", "margin", "tolerance"}) CHECK(c.contains(key));
    CHECK(rep.at("cases")[1].at("status") == "fail");
    CHECK(rep.at("cases")[1].contains("inputs"));
    CHECK(suite::report("empty", {}).at("cases").is_array());
    CHECK(nlohmann::json::parse(io::dump(suite::report("empty", {}), -1)) ==
          nlohmann::json::parse(R"({"suite":"empty","cases":[]})"));
}

TEST_CASE("suite selection") {
    CHECK(suite::select("all").size() == 11);
    CHECK(suite::select("virial") == std::vector<int>{9});
    CHECK_THROWS_AS(suite::select("nope"), std::invalid_argument);
    CHECK(suite::criteria().front().id == 1);
}
