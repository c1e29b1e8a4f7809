#include "harness/experiments.hpp"

#include "core/bourgain.hpp"
#include "core/parallel.hpp"
#include "harness/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace benjamin {

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    return den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
}

double median_of(std::vector<double> v)
{
    if (v.empty())
        return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

} // namespace

Grid make_grid(const RunConfig& cfg) { return Grid(cfg.box_length, cfg.modes); }
PhysParams make_phys(const RunConfig& cfg) { return PhysParams(cfg.nu, cfg.mu); }
IParams make_imethod(const RunConfig& cfg) { return IParams(cfg.cutoff, cfg.s); }

SpectralField random_field(const Grid& g, double amplitude, double decay, std::uint64_t seed)
{
    SpectralField u(g);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * kPi);
    for (int k = 1; k <= g.dealias_kmax(); ++k)
        u.set_mode(k, std::polar(amplitude * std::pow(1.0 + k, -decay), phase_dist(rng)));
    return u;
}

SpectralField initial_field(const RunConfig& cfg, const Grid& g)
{
    if (cfg.initial.kind == InitialCondition::Kind::Random)
        return random_field(g, cfg.initial.amplitude, cfg.initial.decay, cfg.seed);
    SpectralField u(g);
    for (const auto& m : cfg.initial.modes)
        u.set_mode(m.k, u.at(m.k) + std::polar(m.amplitude, m.phase));
    return u;
}

NScanReport run_nscan(const RunConfig& cfg)
{
    const Grid g = make_grid(cfg);
    const PhysParams p = make_phys(cfg);
    if (cfg.scan_cutoffs.size() < 4)
        throw std::invalid_argument("nscan: at least four cutoffs are required");
    for (double n : cfg.scan_cutoffs)
        if (n < 4.0 || n > cfg.modes / 4.0)
            throw std::invalid_argument("nscan: every cutoff must lie in [4, M/4]");

    NScanReport rep;
    for (double n : cfg.scan_cutoffs)
        rep.rows.push_back({n, 0.0, false, {}});

    Trajectory traj(g, p, cfg.dt);
    try {
        SolveOptions opt;
        opt.stride = cfg.stride;
        traj = solve(initial_field(cfg, g), cfg.scan_delta, cfg.dt, p, IParams(cfg.scan_cutoffs.front(), cfg.s), opt);
    } catch (const BlowUpError& e) {
        for (auto& r : rep.rows) {
            r.failed = true;
            r.message = e.what();
        }
        return rep;
    }
    const double l0 = traj.conserved.front().l2;
    rep.l2_drift = l0 > 0.0 ? std::abs(traj.conserved.back().l2 - l0) / l0 : 0.0;

    for (auto& row : rep.rows) {
        try {
            MultiplierTables tables(g, p, IParams(row.cutoff, cfg.s));
            const double e0 = E4(traj.fields.front(), tables);
            for (std::size_t j = 1; j < traj.size(); ++j)
                row.increment = std::max(row.increment, std::abs(E4(traj.fields[j], tables) - e0));
        } catch (const std::exception& e) {
            row.failed = true;
            row.message = e.what();
        }
    }

    std::vector<double> lx, ly;
    rep.strictly_decreasing = true;
    const NScanRow* prev = nullptr;
    for (const auto& row : rep.rows) {
        if (row.failed) {
            rep.strictly_decreasing = false;
            continue;
        }
        if (prev && !(row.increment < prev->increment))
            rep.strictly_decreasing = false;
        prev = &row;
        if (row.increment > 0.0) {
            lx.push_back(std::log(row.cutoff));
            ly.push_back(std::log(row.increment));
        }
    }
    rep.slope = lx.size() >= 2 ? fit_slope(lx, ly) : std::numeric_limits<double>::quiet_NaN();
    rep.pass = rep.strictly_decreasing && lx.size() == rep.rows.size() && rep.slope < 0.0;
    return rep;
}

std::string nscan_csv(const NScanReport& r)
{
    CsvTable t({"N", "increment", "failed", "message", "slope"});
    for (const auto& row : r.rows)
        t.add({format_double(row.cutoff), format_double(row.increment), row.failed ? "1" : "0",
               "\"" + row.message + "\"", format_double(r.slope)});
    return t.str();
}

std::vector<IdentityCase> default_identity_cases()
{
    return {{2, 64, 2.0 * kPi, 1e-4, 1e-4}, {3, 32, 2.0 * kPi, 5e-4, 1e-3}, {4, 16, kPi, 5e-4, 1e-2}};
}

double telescope_scan(std::size_t samples, std::uint64_t seed, const PhysParams& p)
{
    std::vector<double> defect(samples);
    parallel_for(samples, [&](std::size_t i) {
        std::mt19937_64 rng(derive_seed(seed, i));
        std::uniform_real_distribution<double> d(-1000.0, 1000.0);
        const double a = d(rng), b = d(rng), c = d(rng);
        const FreqTuple t{a, b, c, -(a + b + c)};
        double scale = 1.0 + 2.0 * std::abs(phase(a + b, p));
        for (double x : t.values())
            scale += std::abs(phase(x, p));
        defect[i] = check_telescope(t, p) / scale;
    });
    return defect.empty() ? 0.0 : *std::max_element(defect.begin(), defect.end());
}

IdentitySuiteReport run_identity_suite(const RunConfig& cfg, const std::vector<IdentityCase>& cases)
{
    const PhysParams p = make_phys(cfg);
    IdentitySuiteReport rep;
    rep.pass = true;
    for (const auto& c : cases) {
        IdentityLevel lvl{c, {}, {}, {}, false};
        const Grid g(c.box_length, c.modes);
        const IParams ip(4.0, cfg.s);
        const SpectralField u0 = random_field(g, 4.0, 2.0, cfg.seed);
        for (int h = 0; h < 3; ++h) {
            const double dt = c.dt / (1 << h);
            const Trajectory traj = solve(u0, 40.0 * c.dt, dt, p, ip);
            lvl.dts.push_back(dt);
            lvl.rel_errs.push_back(check_energy_derivative(traj, c.level, p, ip).rel_err(c.level));
        }
        lvl.pass = lvl.rel_errs.front() <= c.tolerance;
        for (std::size_t i = 1; i < lvl.rel_errs.size(); ++i) {
            lvl.orders.push_back(std::log2(lvl.rel_errs[i - 1] / lvl.rel_errs[i]));
            lvl.pass = lvl.pass && lvl.orders.back() >= kMinObservedOrder;
        }
        rep.pass = rep.pass && lvl.pass;
        rep.levels.push_back(std::move(lvl));
    }
    rep.telescope_samples = 100000;
    rep.telescope_max_defect = telescope_scan(rep.telescope_samples, cfg.seed, p);
    rep.telescope_pass = rep.telescope_max_defect <= 1e-12;
    rep.pass = rep.pass && rep.telescope_pass;
    return rep;
}

std::string identity_csv(const IdentitySuiteReport& r)
{
    CsvTable t({"check", "M", "L", "dt", "rel_err", "order", "tolerance", "pass"});
    for (const auto& l : r.levels)
        for (std::size_t i = 0; i < l.dts.size(); ++i)
            t.add({"level" + std::to_string(l.setup.level), std::to_string(l.setup.modes),
                   format_double(l.setup.box_length), format_double(l.dts[i]), format_double(l.rel_errs[i]),
                   i > 0 ? format_double(l.orders[i - 1]) : "", format_double(l.setup.tolerance),
                   l.pass ? "1" : "0"});
    t.add({"telescope", "", "", "", format_double(r.telescope_max_defect), "", "1e-12", r.telescope_pass ? "1" : "0"});
    return t.str();
}

BoundSuiteReport run_bound_suite(const RunConfig& cfg, std::size_t guard_samples)
{
    const PhysParams p = make_phys(cfg);
    BoundSuiteReport rep;
    rep.cutoffs = cfg.scan_cutoffs;
    rep.pass = true;
    const Lemma lemmas[] = {Lemma::M3Bound,    Lemma::Alpha3Lower,  Lemma::Alpha4Size, Lemma::QuarticSum,
                            Lemma::M4MaxBound, Lemma::M4AlphaBound, Lemma::M5Bound};
    for (Lemma l : lemmas) {
        LemmaStability st{lemma_id(l), std::numeric_limits<double>::infinity(), 0.0, true, false};
        bool lower_ok = true;
        for (double n : rep.cutoffs) {
            const Hierarchy h{p, IParams(n, cfg.s), std::nullopt};
            BoundReport r = scan_bound(l, cfg.scan_samples, cfg.seed, h);
            st.finite = st.finite && std::isfinite(r.max_ratio) && r.samples > 0;
            st.min_sup = std::min(st.min_sup, r.max_ratio);
            st.max_sup = std::max(st.max_sup, r.max_ratio);
            if (l == Lemma::Alpha4Size || l == Lemma::Alpha3Lower)
                lower_ok = lower_ok && r.min_ratio > 0.0;
            rep.reports.push_back(std::move(r));
        }
        st.pass = st.finite && lower_ok && st.min_sup > 0.0 && st.max_sup <= kStabilityBand * st.min_sup;
        rep.pass = rep.pass && st.pass;
        rep.stability.push_back(st);
    }
    rep.guard_samples = guard_samples;
    if (guard_samples > 0) {
        MultiplierStats stats;
        try {
            const Hierarchy h{p, IParams(rep.cutoffs.empty() ? cfg.cutoff : rep.cutoffs.front(), cfg.s), std::nullopt};
            scan_sigma4_guard(guard_samples, cfg.seed, h, stats);
        } catch (const ResonanceError&) {
            rep.guard_hard_errors = 1;
        }
        rep.guard_resonant = stats.resonant_sigma4;
    }
    rep.pass = rep.pass && rep.guard_hard_errors == 0;
    return rep;
}

std::string bound_suite_csv(const BoundSuiteReport& r)
{
    std::vector<double> cut;
    for (std::size_t i = 0; i < r.reports.size(); ++i)
        cut.push_back(r.cutoffs.empty() ? 0.0 : r.cutoffs[i % r.cutoffs.size()]);
    return bound_reports_csv(r.reports, cut);
}

ScanReport run_bilinear_scan(const RunConfig& cfg, const std::vector<double>& cutoffs,
                             const std::vector<double>& deltas, double eps)
{
    const Grid g = make_grid(cfg);
    const PhysParams p = make_phys(cfg);
    const SpectralField u = random_field(g, cfg.initial.amplitude, cfg.initial.decay, cfg.seed);
    const SpectralField v = random_field(g, cfg.initial.amplitude, cfg.initial.decay, derive_seed(cfg.seed, 1));
    ScanReport rep;
    std::vector<double> ratios;
    for (double n : cutoffs)
        for (double d : deltas) {
            const double r = bilinear_ratio(u, v, d, p, IParams(n, cfg.s), eps);
            rep.rows.push_back({n, d, r});
            ratios.push_back(r);
        }
    rep.median = median_of(ratios);
    rep.max = ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
    rep.pass = !ratios.empty() && std::all_of(ratios.begin(), ratios.end(), [](double x) { return std::isfinite(x); }) &&
               rep.max <= kMedianBand * rep.median;
    return rep;
}

SpectralField wave_packet(const Grid& g, double centre, double width)
{
    SpectralField u(g);
    for (int k = 1; k <= g.dealias_kmax(); ++k) {
        const double z = (g.frequency(k) - centre) / width;
        const double a = std::exp(-0.5 * z * z);
        if (a > 1e-14)
            u.set_mode(k, a);
    }
    return u;
}

PacketScanReport run_packet_scan(const PhysParams& p, const std::vector<double>& separations, double s_exp,
                                 double b_tilde, double delta)
{
    const Grid big(128.0, 1600);
    const Grid lattice(2.0 * kPi, 64);
    const double width = 0.5;
    PacketScanReport rep;
    std::vector<double> ratios;
    for (double d : separations) {
        const double packet =
            is_estimate_ratio(wave_packet(big, 1.0, width), wave_packet(big, 1.0 + d, width), s_exp, b_tilde, p, delta);
        const int k2 = 1 + static_cast<int>(std::lround(d));
        double single = std::numeric_limits<double>::quiet_NaN();
        if (k2 >= 1 && k2 <= lattice.dealias_kmax()) {
            SpectralField a(lattice), b(lattice);
            a.set_mode(1, 1.0);
            b.set_mode(k2, 1.0);
            single = is_estimate_ratio(a, b, s_exp, b_tilde, p, delta);
        }
        rep.rows.push_back({d, packet, single});
        ratios.push_back(packet);
    }
    rep.median = median_of(ratios);
    rep.max = ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
    rep.pass = !ratios.empty() && std::all_of(ratios.begin(), ratios.end(), [](double x) { return std::isfinite(x); }) &&
               rep.max <= kMedianBand * rep.median;
    return rep;
}

std::string scan_csv(const ScanReport& r)
{
    CsvTable t({"N", "delta", "ratio"});
    for (const auto& row : r.rows)
        t.add({format_double(row.cutoff), format_double(row.delta), format_double(row.ratio)});
    return t.str();
}

std::vector<SpectralField> random_ensemble(const Grid& g, std::size_t count, double decay_lo, double decay_hi,
                                           std::uint64_t seed)
{
    std::vector<SpectralField> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::mt19937_64 rng(derive_seed(seed, i));
        const double decay = std::uniform_real_distribution<double>(decay_lo, decay_hi)(rng);
        out.push_back(random_field(g, 1.0, decay, rng()));
    }
    return out;
}

std::vector<ComparisonRow> run_comparison_scan(const Grid& g, const PhysParams& p, double s,
                                               const std::vector<double>& cutoffs,
                                               const std::vector<SpectralField>& ensemble)
{
    std::vector<ComparisonRow> rows;
    for (double n : cutoffs) {
        MultiplierTables tables(g, p, IParams(n, s));
        ComparisonRow row{n, 0.0, std::numeric_limits<double>::infinity()};
        for (const auto& u : ensemble) {
            const auto [gap, bound] = compare_E2_E4(u, tables);
            const double r = bound > 0.0 ? gap / bound : 0.0;
            row.max_ratio = std::max(row.max_ratio, r);
            row.min_ratio = std::min(row.min_ratio, r);
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<SpectralField> scaled_ensemble(const Grid& g, std::size_t count, double cutoff, double decay_lo,
                                           double decay_hi, std::uint64_t seed)
{
    std::vector<SpectralField> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::mt19937_64 rng(derive_seed(seed, i));
        const double amp = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
        const double decay = std::uniform_real_distribution<double>(decay_lo, decay_hi)(rng);
        SpectralField u(g);
        for (int k = 1; k <= g.dealias_kmax(); ++k)
            u.set_mode(k, amp * std::pow(1.0 + g.frequency(k) / cutoff, -decay));
        out.push_back(std::move(u));
    }
    return out;
}

ComparisonReport run_comparison_suite(const PhysParams& p, double s, const std::vector<double>& cutoffs,
                                      std::size_t count, std::uint64_t seed)
{
    const Grid g(kPi, 256);
    ComparisonReport rep;
    for (std::size_t i = 0; i < cutoffs.size(); ++i) {
        const auto ens = scaled_ensemble(g, count, cutoffs[i], 0.0, 2.0, derive_seed(seed, i));
        const auto rows = run_comparison_scan(g, p, s, {cutoffs[i]}, ens);
        rep.rows.push_back(rows.front());
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    bool finite = !rep.rows.empty();
    for (const auto& r : rep.rows) {
        finite = finite && std::isfinite(r.max_ratio) && r.max_ratio > 0.0;
        lo = std::min(lo, r.max_ratio);
        hi = std::max(hi, r.max_ratio);
    }
    rep.sup_band = finite ? hi / lo : std::numeric_limits<double>::infinity();
    rep.pass = finite && rep.sup_band <= kComparisonBand;
    return rep;
}

NormEquivalenceReport run_norm_equivalence(double s, const std::vector<double>& cutoffs,
                                           const std::vector<SpectralField>& ensemble)
{
    NormEquivalenceReport rep;
    rep.cutoffs = cutoffs;
    double umin = std::numeric_limits<double>::infinity(), umax = 0.0;
    double lmin = std::numeric_limits<double>::infinity(), lmax = 0.0;
    bool finite = !cutoffs.empty();
    for (double n : cutoffs) {
        BoundReport r = check_norm_equivalence(ensemble, IParams(n, s));
        finite = finite && std::isfinite(r.max_ratio) && r.min_ratio > 0.0 && r.violations == 0;
        umin = std::min(umin, r.max_ratio);
        umax = std::max(umax, r.max_ratio);
        lmin = std::min(lmin, r.min_ratio);
        lmax = std::max(lmax, r.min_ratio);
        rep.reports.push_back(std::move(r));
    }
    rep.upper_band = finite ? umax / umin : std::numeric_limits<double>::infinity();
    rep.lower_band = finite ? lmax / lmin : std::numeric_limits<double>::infinity();
    rep.pass = finite && rep.upper_band <= kNormBand && rep.lower_band <= kNormBand;
    return rep;
}

} // namespace benjamin
