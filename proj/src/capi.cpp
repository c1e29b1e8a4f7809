#include "benjamin/benjamin.h"

#include "core/parallel.hpp"
#include "harness/experiments.hpp"
#include "harness/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

using namespace benjamin;
namespace fs = std::filesystem;

struct bj_config {
    RunConfig cfg;
};

struct bj_report {
    bool passed = true;
    std::string summary;
    std::vector<std::string> outputs;
};

namespace {

thread_local std::string g_last_error;

template <class F>
bj_status guarded(F&& f)
{
    g_last_error.clear();
    try {
        f();
        return BJ_OK;
    } catch (const ConfigError& e) {
        g_last_error = e.what();
        return BJ_CONFIG_ERROR;
    } catch (const ResonanceError& e) {
        g_last_error = e.what();
        return BJ_RESONANCE_ERROR;
    } catch (const BlowUpError& e) {
        g_last_error = e.what();
        return BJ_BLOWUP;
    } catch (const IoError& e) {
        g_last_error = e.what();
        return BJ_IO_ERROR;
    } catch (const fs::filesystem_error& e) {
        g_last_error = e.what();
        return BJ_IO_ERROR;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return BJ_INVALID_ARGUMENT;
    } catch (const std::out_of_range& e) {
        g_last_error = e.what();
        return BJ_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return BJ_INTERNAL_ERROR;
    } catch (...) {
        g_last_error = "unknown error";
        return BJ_INTERNAL_ERROR;
    }
}

void need(bool ok, const char* what)
{
    if (!ok)
        throw std::invalid_argument(what);
}

char* dup_string(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...)
{
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// Writes config.json and run_manifest.json next to the run outputs.
class RunScope {
public:
    RunScope(const RunConfig& cfg, std::string dir)
        : cfg_(cfg), dir_(std::move(dir)), bytes_(serialize_config(cfg))
    {
        manifest_.config_hash = sha256_hex(bytes_);
        manifest_.started = utc_now();
        fs::create_directories(dir_);
    }

    const std::string& hash() const { return manifest_.config_hash; }
    std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }

    void write(bj_report& r, const std::string& name, const std::string& contents)
    {
        write_file_atomic(path(name), contents);
        add(r, name);
    }

    void add(bj_report& r, const std::string& name)
    {
        manifest_.outputs.push_back(name);
        r.outputs.push_back(path(name));
    }

    void finish(bj_report& r)
    {
        write(r, "config.json", bytes_);
        manifest_.finished = utc_now();
        manifest_.outputs.push_back("run_manifest.json");
        write_file_atomic(path("run_manifest.json"), manifest_json(manifest_, cfg_));
        r.outputs.push_back(path("run_manifest.json"));
    }

private:
    RunConfig cfg_;
    std::string dir_;
    std::string bytes_;
    RunManifest manifest_;
};

std::vector<double> or_default(const double* v, std::size_t n, std::vector<double> fallback)
{
    if (!v || n == 0)
        return fallback;
    return std::vector<double>(v, v + n);
}

} // namespace

extern "C" {

const char* bj_version(void) { return kArtifactVersion; }
const char* bj_last_error(void) { return g_last_error.c_str(); }
void bj_string_free(char* s) { std::free(s); }

bj_status bj_set_threads(int n)
{
    return guarded([&] {
        need(n >= 1, "thread count must be >= 1");
        set_thread_count(n);
    });
}

bj_status bj_config_default(const char* experiment, bj_config** out)
{
    return guarded([&] {
        need(experiment && out, "null argument");
        *out = new bj_config{default_config(experiment)};
    });
}

bj_status bj_config_load(const char* path, bj_config** out)
{
    return guarded([&] {
        need(path && out, "null argument");
        *out = new bj_config{load_config(path)};
    });
}

bj_status bj_config_parse(const char* json, bj_config** out)
{
    return guarded([&] {
        need(json && out, "null argument");
        *out = new bj_config{parse_config(json)};
    });
}

void bj_config_free(bj_config* cfg) { delete cfg; }

bj_status bj_config_set_seed(bj_config* cfg, uint64_t seed)
{
    return guarded([&] {
        need(cfg, "null config");
        cfg->cfg.seed = seed;
    });
}

bj_status bj_config_to_json(const bj_config* cfg, char** out)
{
    return guarded([&] {
        need(cfg && out, "null argument");
        *out = dup_string(serialize_config(cfg->cfg));
    });
}

void bj_report_free(bj_report* r) { delete r; }
int bj_report_passed(const bj_report* r) { return r && r->passed ? 1 : 0; }
const char* bj_report_summary(const bj_report* r) { return r ? r->summary.c_str() : ""; }
size_t bj_report_output_count(const bj_report* r) { return r ? r->outputs.size() : 0; }

const char* bj_report_output(const bj_report* r, size_t i)
{
    return r && i < r->outputs.size() ? r->outputs[i].c_str() : nullptr;
}

bj_status bj_simulate(const bj_config* c, const char* out_dir, bj_report** out)
{
    return guarded([&] {
        need(c && out_dir && out, "null argument");
        const RunConfig& cfg = c->cfg;
        auto rep = std::make_unique<bj_report>();
        RunScope scope(cfg, out_dir);
        const Grid g = make_grid(cfg);
        SolveOptions opt;
        opt.stride = cfg.stride;
        const Trajectory traj = solve(initial_field(cfg, g), cfg.T, cfg.dt, make_phys(cfg), make_imethod(cfg), opt);
        for (const auto& f : write_trajectory(out_dir, traj, cfg, scope.hash()))
            scope.add(*rep, f);
        const auto& c0 = traj.conserved.front();
        const auto& c1 = traj.conserved.back();
        rep->summary = fmt("samples %zu  T %.6g  mean drift %.3e  relative L2 drift %.3e\n", traj.size(),
                           traj.times.back(), std::abs(c1.mean - c0.mean),
                           c0.l2 > 0 ? std::abs(c1.l2 - c0.l2) / c0.l2 : 0.0);
        scope.finish(*rep);
        *out = rep.release();
    });
}

bj_status bj_energies(const char* trajectory_dir, int level, const char* out_dir, bj_report** out)
{
    return guarded([&] {
        need(trajectory_dir && out_dir && out, "null argument");
        need(level >= 2 && level <= 4, "level must be 2, 3 or 4");
        const Trajectory traj = read_trajectory(trajectory_dir);
        need(traj.imethod.has_value(), "trajectory has no I-method parameters");
        const EnergyReport r = check_energy_derivative(traj, level, traj.phys, *traj.imethod);
        auto rep = std::make_unique<bj_report>();
        fs::create_directories(out_dir);
        const std::string path = (fs::path(out_dir) / "energies.csv").string();
        write_file_atomic(path, energy_report_csv(r));
        rep->outputs.push_back(path);
        std::ostringstream s;
        for (int l = 2; l <= level; ++l)
            s << fmt("level %d  relative residual %.3e\n", l, r.rel_err(l));
        s << fmt("resonant sigma4 entries %llu  degenerate sigma3 entries %llu\n",
                 static_cast<unsigned long long>(r.stats.resonant_sigma4),
                 static_cast<unsigned long long>(r.stats.degenerate_sigma3));
        rep->summary = s.str();
        rep->passed = std::isfinite(r.rel_err(level));
        *out = rep.release();
    });
}

bj_status bj_verify(const char* lemma, uint64_t samples, uint64_t seed, double nu, double mu, double cutoff, double s,
                    char** json_out)
{
    return guarded([&] {
        need(lemma && json_out, "null argument");
        need(samples > 0, "samples must be positive");
        need(std::isfinite(nu) && std::isfinite(mu) && mu != 0.0, "mu must be finite and nonzero");
        need(std::isfinite(cutoff) && cutoff >= 1.0, "N must be >= 1");
        need(s >= -0.75 && s < 0.0, "s must lie in [-3/4, 0)");
        const Hierarchy h{PhysParams(nu, mu), IParams(cutoff, s), std::nullopt};
        *json_out = dup_string(bound_report_json(scan_bound(parse_lemma(lemma), samples, seed, h)));
    });
}

bj_status bj_nscan(const bj_config* c, const char* out_dir, bj_report** out)
{
    return guarded([&] {
        need(c && out_dir && out, "null argument");
        auto rep = std::make_unique<bj_report>();
        RunScope scope(c->cfg, out_dir);
        const NScanReport r = run_nscan(c->cfg);
        scope.write(*rep, "nscan.csv", nscan_csv(r));
        std::ostringstream s;
        for (const auto& row : r.rows)
            s << (row.failed ? fmt("N %-6g failed: %s\n", row.cutoff, row.message.c_str())
                             : fmt("N %-6g increment %.4e\n", row.cutoff, row.increment));
        s << fmt("slope %.3f  strictly decreasing %s  relative L2 drift %.3e\n", r.slope,
                 r.strictly_decreasing ? "yes" : "no", r.l2_drift);
        rep->summary = s.str();
        rep->passed = r.pass;
        scope.finish(*rep);
        *out = rep.release();
    });
}

bj_status bj_xnorm(const bj_config* c, const bj_scan_params* params, const char* out_dir, bj_report** out)
{
    return guarded([&] {
        need(c && out_dir && out, "null argument");
        const double s_exp = params ? params->s : 0.5;
        const double b_tilde = params ? params->b : 0.5;
        const auto highs = or_default(params ? params->cutoffs : nullptr, params ? params->n_cutoffs : 0,
                                      {2, 3, 5, 9, 17});
        const auto deltas = or_default(params ? params->deltas : nullptr, params ? params->n_deltas : 0, {0.02});
        std::vector<double> seps;
        for (double h : highs) {
            need(h > 1.0, "high packet frequency must exceed 1");
            seps.push_back(h - 1.0);
        }
        auto rep = std::make_unique<bj_report>();
        RunScope scope(c->cfg, out_dir);
        CsvTable t({"N", "delta", "ratio", "single_mode_ratio"});
        std::ostringstream s;
        std::vector<double> all;
        for (double d : deltas) {
            const PacketScanReport r = run_packet_scan(make_phys(c->cfg), seps, s_exp, b_tilde, d);
            for (const auto& row : r.rows) {
                t.add({format_double(1.0 + row.separation), format_double(d), format_double(row.packet_ratio),
                       format_double(row.single_mode_ratio)});
                s << fmt("xi2 %-6g delta %-6g ratio %.4f  single modes %.4f\n", 1.0 + row.separation, d,
                         row.packet_ratio, row.single_mode_ratio);
                all.push_back(row.packet_ratio);
            }
        }
        std::vector<double> sorted = all;
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted.empty() ? 0.0
                              : sorted.size() % 2 ? sorted[sorted.size() / 2]
                                                  : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
        const double max = sorted.empty() ? 0.0 : sorted.back();
        rep->passed = !all.empty() && std::isfinite(max) && max <= kMedianBand * median;
        s << fmt("median %.4f  max %.4f\n", median, max);
        rep->summary = s.str();
        scope.write(*rep, "xnorm.csv", t.str());
        scope.finish(*rep);
        *out = rep.release();
    });
}

bj_status bj_bilinear_scan(const bj_config* c, const bj_scan_params* params, const char* out_dir, bj_report** out)
{
    return guarded([&] {
        need(c && out_dir && out, "null argument");
        RunConfig cfg = c->cfg;
        double eps = 0.01;
        if (params) {
            if (!std::isnan(params->s))
                cfg.s = params->s;
            eps = params->b - 0.5;
        }
        need(eps > 0.0 && eps < 0.5, "b must lie in (1/2, 1)");
        validate(cfg);
        const auto cutoffs = or_default(params ? params->cutoffs : nullptr, params ? params->n_cutoffs : 0,
                                        cfg.scan_cutoffs);
        const auto deltas = or_default(params ? params->deltas : nullptr, params ? params->n_deltas : 0, {0.1, 0.05});
        auto rep = std::make_unique<bj_report>();
        RunScope scope(cfg, out_dir);
        const ScanReport r = run_bilinear_scan(cfg, cutoffs, deltas, eps);
        scope.write(*rep, "bilinear.csv", scan_csv(r));
        std::ostringstream s;
        for (const auto& row : r.rows)
            s << fmt("N %-6g delta %-6g ratio %.4f\n", row.cutoff, row.delta, row.ratio);
        s << fmt("median %.4f  max %.4f\n", r.median, r.max);
        rep->summary = s.str();
        rep->passed = r.pass;
        scope.finish(*rep);
        *out = rep.release();
    });
}

bj_status bj_suite(const bj_config* c, const char* out_dir, bj_report** out)
{
    return guarded([&] {
        need(c && out_dir && out, "null argument");
        auto rep = std::make_unique<bj_report>();
        RunScope scope(c->cfg, out_dir);
        std::ostringstream s;

        const IdentitySuiteReport id = run_identity_suite(c->cfg);
        scope.write(*rep, "identities.csv", identity_csv(id));
        for (const auto& l : id.levels) {
            s << fmt("%s identity level %d: residual %.3e (tol %.0e)", l.pass ? "PASS" : "FAIL", l.setup.level,
                     l.rel_errs.front(), l.setup.tolerance);
            for (double o : l.orders)
                s << fmt("  order %.2f", o);
            s << '\n';
        }
        s << fmt("%s telescoping defect %.3e over %zu tuples\n", id.telescope_pass ? "PASS" : "FAIL",
                 id.telescope_max_defect, id.telescope_samples);

        const BoundSuiteReport b = run_bound_suite(c->cfg);
        scope.write(*rep, "bounds.csv", bound_suite_csv(b));
        for (const auto& st : b.stability)
            s << fmt("%s bound %s: sup ratio in [%.4g, %.4g]\n", st.pass ? "PASS" : "FAIL", st.lemma.c_str(),
                     st.min_sup, st.max_sup);
        s << fmt("%s sigma4 guard: %zu samples, %llu resonant, %zu hard errors\n",
                 b.guard_hard_errors == 0 ? "PASS" : "FAIL", b.guard_samples,
                 static_cast<unsigned long long>(b.guard_resonant), b.guard_hard_errors);

        rep->summary = s.str();
        rep->passed = id.pass && b.pass;
        scope.finish(*rep);
        *out = rep.release();
    });
}

} // extern "C"
