#pragma once

// Time integration of u_t + nu H(u_xx) + mu u_xxx + (u^2)_x = 0 on the
// Galerkin space |k| <= dealias_kmax().
//
// In Fourier variables u_hat_t = i phi u_hat - i xi (u^2)^, so the linear part
// is exact through the propagator and only -d_x(u^2) is integrated.

#include "core/imethod.hpp"
#include "core/spectral.hpp"
#include "core/trajectory.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace benjamin {

class BlowUpError : public std::runtime_error {
public:
    BlowUpError(double t, const std::string& what);
    double time() const { return t_; }

private:
    double t_;
};

enum class Nonlinearity { On, Off };

/// -d_x(u^2) with the 2/3-rule product.
SpectralField rhs_nonlinear(const SpectralField& u);

/// One integrating-factor RK4 step. Throws BlowUpError (time 0) on non-finite output.
SpectralField step_ifrk4(const SpectralField& u, double dt, const PhysParams& p,
                         Nonlinearity nl = Nonlinearity::On);

struct SolveOptions {
    /// Record every `stride`-th step; the final time is always reached exactly.
    int stride = 1;
    Nonlinearity nonlinearity = Nonlinearity::On;
    /// Abort when |u|_{L^2} exceeds this multiple of its initial value.
    double growth_limit = 1e6;
};

/// Integrates from t = 0 to T in equal steps of at most dt, their count rounded
/// up to a multiple of the stride so samples are uniform. The initial data is
/// projected onto the retained modes. Throws BlowUpError with the offending time.
Trajectory solve(const SpectralField& u0, double T, double dt, const PhysParams& p, const IParams& ip,
                 const SolveOptions& opt = {});

/// Smooth even cutoff: 1 on |t| <= 1, 0 on |t| >= 2.
double psi_cutoff(double t);

struct PicardOptions {
    /// Quadrature intervals on [0, delta], at least 3.
    int nodes = 256;
    /// Stop once a residual falls below tol * |I u0|.
    double tol = 1e-11;
};

struct PicardResult {
    SpectralField u_delta;
    /// sup_t |I(u^{j} - u^{j-1})|_{L^2} for j = 1, 2, ...
    std::vector<double> residuals;
    /// Every successive residual ratio stayed <= 1/2.
    bool contracted = false;
    bool converged = false;
    int iterations = 0;
};

/// Fixed-point iteration of u(t) = S(t)u0 - int_0^t S(t-s) d_x u(s)^2 ds on
/// [0, delta]. The cutoffs psi(t) and psi(s/delta) equal 1 there. Starting from
/// the zero iterate, the first iterate is the free evolution. The time integral
/// is evaluated in the interaction picture with composite Simpson weights.
PicardResult picard_solve(const SpectralField& u0, double delta, int iterations, const PhysParams& p,
                          const IParams& ip, const PicardOptions& opt = {});

struct LifetimeRow {
    double amplitude;
    double norm_Iu0;
    double delta_star;
};

struct LifetimeScan {
    std::vector<LifetimeRow> rows;
    /// Least-squares slope of log delta_star against log |I u0|.
    double slope = 0.0;
    /// delta_star never increases with amplitude.
    bool monotone = false;
};

struct LifetimeOptions {
    double delta_min = 1e-6;
    double delta_max = 1.0;
    int bisections = 30;
    int iterations = 60;
    PicardOptions picard{64, 1e-11};
};

/// For each amplitude lambda, the largest delta at which picard_solve(lambda u0)
/// contracts and converges, found by bisection in log delta.
LifetimeScan lifetime_scan(const SpectralField& u0, const std::vector<double>& amplitudes, const PhysParams& p,
                           const IParams& ip, const LifetimeOptions& opt = {});

} // namespace benjamin
