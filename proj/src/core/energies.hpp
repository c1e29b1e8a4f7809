#pragma once

// Multilinear functionals on the frequency lattice and the modified energies
//   E2 = |Iu|^2,  E3 = E2 + Lambda_3(sigma3),  E4 = E3 + Lambda_4(sigma4).
//
// Lambda_k(m) = L^{1-k/2} sum m(xi_1..xi_k) u_hat(xi_1)...u_hat(xi_k), the sum
// running over zero-sum tuples of retained wavenumbers |k_j| <= dealias_kmax().
// With the Galerkin band in the multipliers this makes
//   dE2/dt = Lambda_3(M3),  dE3/dt = Lambda_4(M4),
//   dE4/dt = Lambda_4(M4bar) + Lambda_5(M5)
// exact for the truncated flow.

#include "core/imethod.hpp"
#include "core/multipliers.hpp"
#include "core/spectral.hpp"
#include "core/trajectory.hpp"

#include <mutex>
#include <utility>
#include <vector>

namespace benjamin {

/// Lambda_k of an arbitrary multiplier, k in {2, ..., 5}. Cost O(n^{k-1})
/// multiplier calls with n = 2 dealias_kmax() + 1.
cplx lambda_sum(const TupleFunction& mult, const SpectralField& u, int k);
/// Real part of lambda_sum.
double lambda_k(const TupleFunction& mult, const SpectralField& u, int k);

/// Multipliers tabulated on the retained lattice of one grid. Tables are built
/// on first use. Entries hold real coefficients: sigma3 and sigma4 directly,
/// M3, M4, M4bar and M5 as the factor of i.
/// Layout: row-major over (k_1, ..., k_{k-1}) shifted by dealias_kmax(); the last
/// wavenumber is implied by the zero sum.
class MultiplierTables {
public:
    MultiplierTables(const Grid& g, const PhysParams& p, const IParams& ip);

    const Grid& grid() const { return grid_; }
    const Hierarchy& hierarchy() const { return h_; }
    int kd() const { return kd_; }
    int width() const { return 2 * kd_ + 1; }

    const std::vector<double>& sigma3();
    const std::vector<double>& m3();
    const std::vector<double>& sigma4();
    const std::vector<double>& m4();
    const std::vector<double>& m4bar();
    const std::vector<double>& m5();

    MultiplierStats stats() const { return stats_; }

private:
    void build3();
    void build4();
    void build5();

    Grid grid_;
    Hierarchy h_;
    int kd_;
    std::vector<double> sigma3_, m3_, sigma4_, m4_, m4bar_, m5_;
    MultiplierStats stats_;
    std::mutex mutex_;
};

/// Lambda_k of a tabulated real coefficient c: the multiplier is c (imaginary
/// = false) or i c (imaginary = true).
cplx lambda_table(const std::vector<double>& table, bool imaginary, const SpectralField& u, int k, int kd);

double E2(const SpectralField& u, const IParams& ip);
double E3(const SpectralField& u, MultiplierTables& tables);
double E4(const SpectralField& u, MultiplierTables& tables);
double E3(const SpectralField& u, const PhysParams& p, const IParams& ip);
double E4(const SpectralField& u, const PhysParams& p, const IParams& ip);

/// Energies and derivative identities along a trajectory. Finite differences
/// use the 5-point central stencil and are NaN at the two samples on each end.
struct EnergyReport {
    int level = 2;
    std::vector<double> times;
    std::vector<double> E2, E3, E4;
    std::vector<double> lambda3_M3, lambda4_M4, lambda4_M4bar, lambda5_M5;
    std::vector<double> fd_dE2, fd_dE3, fd_dE4;
    /// max |fd - Lambda| / max |Lambda| over interior samples; NaN above level.
    double rel_err2 = 0.0, rel_err3 = 0.0, rel_err4 = 0.0;
    /// Largest |Im Lambda| / |Lambda| seen.
    double max_imag_residue = 0.0;
    MultiplierStats stats;

    double rel_err(int lvl) const { return lvl == 2 ? rel_err2 : lvl == 3 ? rel_err3 : rel_err4; }
};

/// Computes every quantity up to `level` (2, 3 or 4). Requires at least five
/// uniformly spaced samples.
EnergyReport check_energy_derivative(const Trajectory& traj, int level, const PhysParams& p, const IParams& ip);

/// (|E2 - E4|, N^{-3/2}|Iu|^3 + N^{-3}|Iu|^4).
std::pair<double, double> compare_E2_E4(const SpectralField& u, MultiplierTables& tables);
std::pair<double, double> compare_E2_E4(const SpectralField& u, const PhysParams& p, const IParams& ip);

} // namespace benjamin
