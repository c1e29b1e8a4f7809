// Command-line front end. Talks to the solver only through the C interface.

#include "benjamin/benjamin.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Globals {
    std::string config;
    std::string out = "out";
    std::optional<uint64_t> seed;
    int threads = 1;
};

int status_exit(bj_status st)
{
    std::fprintf(stderr, "error: %s\n", bj_last_error());
    return st == BJ_CONFIG_ERROR || st == BJ_INVALID_ARGUMENT ? kExitUsage : kExitFail;
}

// Loads --config or the experiment defaults, then applies --seed.
bj_config* make_config(const Globals& g, const char* experiment, int& code)
{
    bj_config* cfg = nullptr;
    const bj_status st = g.config.empty() ? bj_config_default(experiment, &cfg) : bj_config_load(g.config.c_str(), &cfg);
    if (st != BJ_OK) {
        code = status_exit(st);
        return nullptr;
    }
    if (g.seed)
        bj_config_set_seed(cfg, *g.seed);
    return cfg;
}

int finish(bj_status st, bj_report* rep)
{
    if (st != BJ_OK)
        return status_exit(st);
    std::fputs(bj_report_summary(rep), stdout);
    for (size_t i = 0; i < bj_report_output_count(rep); ++i)
        std::printf("wrote %s\n", bj_report_output(rep, i));
    const int code = bj_report_passed(rep) ? kExitPass : kExitFail;
    bj_report_free(rep);
    return code;
}

template <class F>
int with_config(const Globals& g, const char* experiment, F&& run)
{
    int code = kExitPass;
    bj_config* cfg = make_config(g, experiment, code);
    if (!cfg)
        return code;
    bj_report* rep = nullptr;
    const bj_status st = run(cfg, &rep);
    bj_config_free(cfg);
    return finish(st, rep);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Benjamin equation solver and I-method diagnostics"};
    app.set_version_flag("--version", std::string(bj_version()));
    app.require_subcommand(1);

    Globals g;
    app.add_option("--config", g.config, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--seed", g.seed, "Override the configured seed");
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);

    int code = kExitPass;
    std::vector<std::pair<CLI::App*, std::function<void()>>> actions;

    auto* simulate = app.add_subcommand("simulate", "Integrate the configured data and persist the trajectory");
    simulate->fallthrough();
    actions.emplace_back(simulate, [&] {
        code = with_config(g, "simulate", [&](bj_config* c, bj_report** r) { return bj_simulate(c, g.out.c_str(), r); });
    });

    std::string trajectory;
    int level = 2;
    auto* energies = app.add_subcommand("energies", "Modified energies and derivative identities of a trajectory");
    energies->fallthrough();
    energies->add_option("--trajectory", trajectory, "Trajectory directory written by simulate")
        ->required()
        ->check(CLI::ExistingDirectory);
    energies->add_option("--level", level, "Highest energy level")->check(CLI::IsMember({2, 3, 4}));
    actions.emplace_back(energies, [&] {
        bj_report* rep = nullptr;
        const bj_status st = bj_energies(trajectory.c_str(), level, g.out.c_str(), &rep);
        code = finish(st, rep);
    });

    std::string lemma;
    uint64_t samples = 100000;
    double nu = 1.0, mu = 1.0, big_n = 8.0, s = -0.5;
    auto* verify = app.add_subcommand("verify", "Empirical constant of a pointwise multiplier bound (JSON)");
    verify->fallthrough();
    verify->add_option("--lemma", lemma, "m3-bound, alpha3-lower, alpha4-size, quartic-sum, m4-max, m4-alpha or m5-bound")->required();
    verify->add_option("--samples", samples, "Number of sampled tuples")->check(CLI::PositiveNumber);
    verify->add_option("--nu", nu, "Hilbert-transform coefficient");
    verify->add_option("--mu", mu, "Third-order coefficient (nonzero)");
    verify->add_option("--bigN", big_n, "I-method cutoff N");
    verify->add_option("--s", s, "Sobolev exponent s in [-3/4, 0)");
    actions.emplace_back(verify, [&] {
        char* json = nullptr;
        const bj_status st = bj_verify(lemma.c_str(), samples, g.seed.value_or(1), nu, mu, big_n, s, &json);
        if (st != BJ_OK) {
            code = status_exit(st);
            return;
        }
        std::fputs(json, stdout);
        bj_string_free(json);
    });

    auto* nscan = app.add_subcommand("nscan", "E4 increments as the cutoff doubles");
    nscan->fallthrough();
    actions.emplace_back(nscan, [&] {
        code = with_config(g, "nscan", [&](bj_config* c, bj_report** r) { return bj_nscan(c, g.out.c_str(), r); });
    });

    double xs = 0.5, xb = 0.5;
    std::vector<double> xdeltas, xhighs;
    auto* xnorm = app.add_subcommand("xnorm", "Bilinear I^s ratio over a frequency-separation scan");
    xnorm->fallthrough();
    xnorm->add_option("--s", xs, "Kernel exponent in [0, 1/2]");
    xnorm->add_option("--b", xb, "Time regularity b of the second factor");
    xnorm->add_option("--delta", xdeltas, "Window half-widths");
    xnorm->add_option("--bigN", xhighs, "Frequencies of the high packet (> 1)");
    actions.emplace_back(xnorm, [&] {
        code = with_config(g, "simulate", [&](bj_config* c, bj_report** r) {
            const bj_scan_params p{xs, xb, xdeltas.data(), xdeltas.size(), xhighs.data(), xhighs.size()};
            return bj_xnorm(c, &p, g.out.c_str(), r);
        });
    });

    double bs = std::nan(""), bb = 0.51;
    std::vector<double> bdeltas, bcutoffs;
    auto* bilinear = app.add_subcommand("bilinear-scan", "Bilinear estimate ratio over an (N, delta) grid");
    bilinear->fallthrough();
    bilinear->add_option("--s", bs, "I-method exponent s in [-3/4, 0); defaults to the configured value");
    bilinear->add_option("--b", bb, "b = 1/2 + eps");
    bilinear->add_option("--delta", bdeltas, "Window half-widths");
    bilinear->add_option("--bigN", bcutoffs, "I-method cutoffs");
    actions.emplace_back(bilinear, [&] {
        code = with_config(g, "bilinear", [&](bj_config* c, bj_report** r) {
            const bj_scan_params p{bs, bb, bdeltas.data(), bdeltas.size(), bcutoffs.data(), bcutoffs.size()};
            return bj_bilinear_scan(c, &p, g.out.c_str(), r);
        });
    });

    auto* suite = app.add_subcommand("suite", "Identity suite and bound suite");
    suite->fallthrough();
    actions.emplace_back(suite, [&] {
        code = with_config(g, "suite", [&](bj_config* c, bj_report** r) { return bj_suite(c, g.out.c_str(), r); });
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitPass : kExitUsage;
    }
    if (bj_set_threads(g.threads) != BJ_OK)
        return status_exit(BJ_INVALID_ARGUMENT);
    for (auto& [sub, action] : actions)
        if (sub->parsed())
            action();
    return code;
}
