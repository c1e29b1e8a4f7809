#include "core/parallel.hpp"
#include "core/solver.hpp"
#include "harness/config.hpp"
#include "harness/experiments.hpp"
#include "harness/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <string>

using namespace benjamin;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({"physics": {"nu": 1.0, "mu": 1.0}})";

std::string config_error_key(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "";
}

fs::path scratch_dir(const std::string& name)
{
    const fs::path d = fs::temp_directory_path() / ("benjamin_test_" + name);
    fs::remove_all(d);
    return d;
}

} // namespace

TEST_CASE("config parsing and validation")
{
    const RunConfig c = parse_config(kMinimal);
    CHECK(c == RunConfig{});

    CHECK(config_error_key(R"({"physics": {"nu": 1.0}})") == "physics.mu");
    CHECK(config_error_key(R"({"physics": {"nu": 1.0, "mu": 0.0}})") == "physics.mu");
    CHECK(config_error_key(R"({})") == "physics");
    CHECK(config_error_key(R"({"physics": {"nu": 1, "mu": 1}, "grid": {"M": 7}})") == "grid.M");
    CHECK(config_error_key(R"({"physics": {"nu": 1, "mu": 1}, "imethod": {"s": 0.0}})") == "imethod.s");
    CHECK(config_error_key(R"({"physics": {"nu": 1, "mu": 1}, "grid": {"Lx": 1}})") == "grid.Lx");
    CHECK(config_error_key(R"({"physics": {"nu": 1, "mu": "one"}})") == "physics.mu");
    CHECK(config_error_key(R"({"physics": {"nu": 1, "mu": 1}, "scan": {"cutoffs": [8, 2]}})") == "scan.cutoffs[1]");
    CHECK(config_error_key(R"({"physics": {"nu": 1, "mu": 1}, "initial": {"type": "modes", "modes": []}})") ==
          "initial.modes");
    CHECK(config_error_key("{\n  \"physics\": {\"nu\": 1,,}\n}") == "line 2, column 23");
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("config round trip")
{
    // Amplitude and decay are not serialized for mode data, so start from their defaults.
    RunConfig c = default_config("simulate");
    c.seed = 77;
    c.initial.kind = InitialCondition::Kind::Modes;
    c.initial.modes = {{1, 0.5, 0.25}, {3, 1.5, -1.0}};
    c.scan_cutoffs = {4, 8, 16, 32};
    CHECK(parse_config(serialize_config(c)) == c);
    for (const char* e : {"simulate", "nscan", "identity", "bounds", "bilinear", "suite"}) {
        const RunConfig d = default_config(e);
        CHECK(d.experiment == e);
        CHECK_NOTHROW(validate(d));
        CHECK(parse_config(serialize_config(d)) == d);
    }
    CHECK_THROWS_AS(default_config("nope"), ConfigError);
}

TEST_CASE("sha256")
{
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("CSV and number formatting")
{
    CHECK(std::stod(format_double(0.1)) == 0.1);
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CsvTable t({"a", "b"});
    t.add({"1", "2"});
    CHECK(t.str() == "a,b\n1,2\n");
    CHECK_THROWS(t.add({"1"}));
}

TEST_CASE("trajectory round trip and manifest")
{
    RunConfig cfg = default_config("simulate");
    cfg.modes = 32;
    const Grid g = make_grid(cfg);
    const PhysParams p = make_phys(cfg);
    const Trajectory tr = solve(initial_field(cfg, g), 0.01, 1e-3, p, make_imethod(cfg), {5});
    const std::string hash = sha256_hex(serialize_config(cfg));
    const fs::path dir = scratch_dir("trajectory");
    const auto files = write_trajectory(dir.string(), tr, cfg, hash);
    CHECK(files.size() == tr.size() + 1);

    const Trajectory back = read_trajectory(dir.string());
    REQUIRE(back.size() == tr.size());
    CHECK(back.grid == tr.grid);
    CHECK(back.dt == tr.dt);
    CHECK(back.sample_dt == tr.sample_dt);
    REQUIRE(back.imethod.has_value());
    CHECK(back.imethod->cutoff() == cfg.cutoff);
    for (std::size_t j = 0; j < tr.size(); ++j) {
        CHECK(back.times[j] == tr.times[j]);
        CHECK(max_abs_diff(back.fields[j], tr.fields[j]) == 0.0);
    }

    const auto m = nlohmann::json::parse(read_file((dir / "manifest.json").string()));
    CHECK(m.at("config_hash") == hash);
    CHECK(m.at("samples").size() == tr.size());

    const auto run = nlohmann::json::parse(manifest_json({hash, "a", "b", {"x.csv"}}, cfg));
    CHECK(run.at("config_hash") == hash);
    CHECK(run.at("seed") == cfg.seed);
    CHECK(run.at("outputs").size() == 1);

    CHECK_THROWS_AS(read_trajectory((dir / "missing").string()), IoError);
    fs::remove_all(dir);
}

TEST_CASE("random initial data")
{
    const Grid g(2 * kPi, 64);
    const SpectralField a = random_field(g, 2.0, 1.5, 9);
    const SpectralField b = random_field(g, 2.0, 1.5, 9);
    CHECK(max_abs_diff(a, b) == 0.0);
    CHECK(a.is_real_symmetric());
    CHECK(a.at(0) == cplx{});
    for (int k = 1; k <= g.dealias_kmax(); ++k)
        CHECK(std::abs(a.at(k)) == doctest::Approx(2.0 * std::pow(1.0 + k, -1.5)));
    CHECK(std::abs(a.at(g.dealias_kmax() + 1)) == 0.0);
    CHECK(max_abs_diff(a, random_field(g, 2.0, 1.5, 10)) > 0.0);

    RunConfig cfg = default_config("simulate");
    cfg.modes = 64;
    cfg.initial.kind = InitialCondition::Kind::Modes;
    cfg.initial.modes = {{3, 0.5, kPi / 2}};
    const SpectralField m = initial_field(cfg, make_grid(cfg));
    CHECK(std::abs(m.at(3) - cplx(0, 0.5)) < 1e-15);
}

TEST_CASE("N-scan driver")
{
    RunConfig cfg = default_config("nscan");
    cfg.modes = 64;
    cfg.dt = 1e-4;
    cfg.stride = 20;
    cfg.scan_delta = 0.01;
    cfg.scan_cutoffs = {4, 6, 8, 12};

    cfg.initial.amplitude = 0.0;
    const NScanReport zero = run_nscan(cfg);
    REQUIRE(zero.rows.size() == 4);
    for (const auto& r : zero.rows) {
        CHECK_FALSE(r.failed);
        CHECK(r.increment == 0.0);
    }
    CHECK_FALSE(zero.strictly_decreasing);
    CHECK_FALSE(zero.pass);

    cfg.initial.amplitude = 1e8;
    const NScanReport blown = run_nscan(cfg);
    for (const auto& r : blown.rows) {
        CHECK(r.failed);
        CHECK_FALSE(r.message.empty());
    }
    CHECK_FALSE(blown.pass);
    CHECK(nscan_csv(blown).rfind("N,increment", 0) == 0);

    cfg.scan_cutoffs = {4, 8, 16};
    CHECK_THROWS(run_nscan(cfg));
    cfg.scan_cutoffs = {4, 8, 16, 32};
    CHECK_THROWS(run_nscan(cfg));
}

TEST_CASE("telescope scan")
{
    CHECK(telescope_scan(20000, 3, PhysParams(1, 1)) <= 1e-12);
    CHECK(telescope_scan(20000, 4, PhysParams(-2.5, 0.3)) <= 1e-12);
}

TEST_CASE("bound suite is reproducible across thread counts")
{
    RunConfig cfg = default_config("bounds");
    cfg.scan_samples = 2000;
    cfg.scan_cutoffs = {8, 16};
    set_thread_count(1);
    const BoundSuiteReport a = run_bound_suite(cfg, 2000);
    set_thread_count(3);
    const BoundSuiteReport b = run_bound_suite(cfg, 2000);
    set_thread_count(1);
    CHECK(bound_suite_csv(a) == bound_suite_csv(b));
    CHECK(a.reports.size() == 7 * cfg.scan_cutoffs.size());
    CHECK(a.guard_hard_errors == 0);
    for (const auto& s : a.stability)
        CHECK_MESSAGE(s.finite, s.lemma);
}
