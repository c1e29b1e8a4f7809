#pragma once

// Experiment drivers. Each returns a plain report; writing files is left to
// the caller (see io.hpp) so the same drivers back the CLI, the C API and the
// acceptance checks.

#include "core/energies.hpp"
#include "core/multipliers.hpp"
#include "core/report.hpp"
#include "core/solver.hpp"
#include "harness/config.hpp"

#include <string>
#include <vector>

namespace benjamin {

Grid make_grid(const RunConfig& cfg);
PhysParams make_phys(const RunConfig& cfg);
IParams make_imethod(const RunConfig& cfg);

/// |u_hat(k)| = amplitude (1 + |k|)^{-decay} on 1 <= |k| <= dealias_kmax(), zero
/// mean, phases uniform from an engine seeded with `seed`.
SpectralField random_field(const Grid& g, double amplitude, double decay, std::uint64_t seed);
SpectralField initial_field(const RunConfig& cfg, const Grid& g);

// ---------------------------------------------------------------------------
// Almost-conservation scan

struct NScanRow {
    double cutoff;
    /// sup_{t <= delta} |E4(t) - E4(0)|
    double increment = 0.0;
    bool failed = false;
    std::string message;
};

struct NScanReport {
    std::vector<NScanRow> rows;
    double slope = 0.0;
    bool strictly_decreasing = false;
    double l2_drift = 0.0;
    bool pass = false;
};

/// Solves cfg's data on [0, scan.delta] once and evaluates E4 for every cutoff.
NScanReport run_nscan(const RunConfig& cfg);
std::string nscan_csv(const NScanReport& r);

// ---------------------------------------------------------------------------
// Energy identities

struct IdentityCase {
    int level;
    int modes;
    double box_length;
    double dt;
    double tolerance;
};

/// Documented grids: level 2 at M=64, level 3 at M=32 (both L = 2 pi) and
/// level 4 at M=16 with L = pi.
std::vector<IdentityCase> default_identity_cases();

struct IdentityLevel {
    IdentityCase setup;
    std::vector<double> dts;
    std::vector<double> rel_errs;
    std::vector<double> orders;
    bool pass = false;
};

struct IdentitySuiteReport {
    std::vector<IdentityLevel> levels;
    std::size_t telescope_samples = 0;
    double telescope_max_defect = 0.0;
    bool telescope_pass = false;
    bool pass = false;
};

inline constexpr double kMinObservedOrder = 3.7;

IdentitySuiteReport run_identity_suite(const RunConfig& cfg,
                                       const std::vector<IdentityCase>& cases = default_identity_cases());
std::string identity_csv(const IdentitySuiteReport& r);

/// Largest check_telescope defect over random real quadruples with entries up
/// to 1000, relative to 1 + the sum of |phi| over every value entering the identity.
double telescope_scan(std::size_t samples, std::uint64_t seed, const PhysParams& p);

// ---------------------------------------------------------------------------
// Pointwise bounds

struct LemmaStability {
    std::string lemma;
    double min_sup = 0.0;
    double max_sup = 0.0;
    bool finite = false;
    bool pass = false;
};

struct BoundSuiteReport {
    std::vector<double> cutoffs;
    /// One report per (lemma, cutoff), lemma-major.
    std::vector<BoundReport> reports;
    std::vector<LemmaStability> stability;
    std::size_t guard_samples = 0;
    std::uint64_t guard_resonant = 0;
    std::size_t guard_hard_errors = 0;
    bool pass = false;
};

inline constexpr double kStabilityBand = 2.0;

BoundSuiteReport run_bound_suite(const RunConfig& cfg, std::size_t guard_samples = 1000000);
std::string bound_suite_csv(const BoundSuiteReport& r);

// ---------------------------------------------------------------------------
// Space-time scans

struct ScanRow {
    double cutoff;
    double delta;
    double ratio;
};

struct ScanReport {
    std::vector<ScanRow> rows;
    double median = 0.0;
    double max = 0.0;
    bool pass = false;
};

inline constexpr double kMedianBand = 10.0;

/// bilinear_ratio for fixed seeded data over the (N, delta) grid.
ScanReport run_bilinear_scan(const RunConfig& cfg, const std::vector<double>& cutoffs,
                             const std::vector<double>& deltas, double eps = 0.01);

struct PacketScanRow {
    double separation;
    double packet_ratio;
    double single_mode_ratio;
};

struct PacketScanReport {
    std::vector<PacketScanRow> rows;
    double median = 0.0;
    double max = 0.0;
    bool pass = false;
};

/// Gaussian wave packet centred at frequency `centre` with spectral width `width`.
SpectralField wave_packet(const Grid& g, double centre, double width);

/// I^s ratio for packets at 1 and 1 + d on a box of length 128, alongside the
/// same ratio for single lattice modes at k = 1 and k = 1 + round(d).
PacketScanReport run_packet_scan(const PhysParams& p, const std::vector<double>& separations, double s_exp = 0.5,
                                 double b_tilde = 0.5, double delta = 0.02);

std::string scan_csv(const ScanReport& r);

// ---------------------------------------------------------------------------
// Ensembles

/// Random fields with decay exponents drawn uniformly from [decay_lo, decay_hi].
std::vector<SpectralField> random_ensemble(const Grid& g, std::size_t count, double decay_lo, double decay_hi,
                                           std::uint64_t seed);

struct ComparisonRow {
    double cutoff;
    double max_ratio;
    double min_ratio;
};

/// max and min of |E2 - E4| / (N^{-3/2}|Iu|^3 + N^{-3}|Iu|^4) over an ensemble.
std::vector<ComparisonRow> run_comparison_scan(const Grid& g, const PhysParams& p, double s,
                                               const std::vector<double>& cutoffs,
                                               const std::vector<SpectralField>& ensemble);

/// Cosine series with |u_hat(xi)| = A (1 + |xi|/N)^{-d}, A uniform in [1/2, 2]
/// and d uniform in [decay_lo, decay_hi]. Aligned phases keep the cubic and
/// quartic sums free of cancellation, so the ensemble probes the bound itself.
std::vector<SpectralField> scaled_ensemble(const Grid& g, std::size_t count, double cutoff, double decay_lo,
                                           double decay_hi, std::uint64_t seed);

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    /// max over N of the ensemble sup divided by the min over N.
    double sup_band = 0.0;
    bool pass = false;
};

inline constexpr double kComparisonBand = 4.0;

/// One scaled ensemble of `count` fields per cutoff on L = pi, M = 256.
ComparisonReport run_comparison_suite(const PhysParams& p, double s, const std::vector<double>& cutoffs,
                                      std::size_t count, std::uint64_t seed);

struct NormEquivalenceReport {
    std::vector<double> cutoffs;
    std::vector<BoundReport> reports;
    /// Spread across cutoffs of max_ratio and of min_ratio.
    double upper_band = 0.0;
    double lower_band = 0.0;
    bool pass = false;
};

inline constexpr double kNormBand = 2.0;

/// check_norm_equivalence for one random ensemble across several cutoffs.
NormEquivalenceReport run_norm_equivalence(double s, const std::vector<double>& cutoffs,
                                           const std::vector<SpectralField>& ensemble);

} // namespace benjamin
