#pragma once

// Discrete space-time norms on a window [-2 delta, 2 delta).
//
// A SpaceTimeField stores, per spatial mode, the time transform of
// psi(t/delta) u_hat(xi, t) sampled at nt points. Each mode carries a carrier
// frequency omega(xi): the transform is taken of u_hat(xi, t) exp(-i omega t),
// so the stored lattice is tau = omega(xi) + lambda_l with
// lambda_l = 2 pi l / (4 delta), -nt/2 <= l < nt/2. With omega = phi, signals
// close to free evolutions need only a narrow lambda band.
//
// Scaling is sqrt(dt / nt) so that sum |values|^2 equals the Riemann sum of
// int sum_xi |psi u_hat|^2 dt, i.e. the space-time L^2 norm.

#include "core/imethod.hpp"
#include "core/multipliers.hpp"
#include "core/spectral.hpp"

#include <functional>
#include <vector>

namespace benjamin {

class SpaceTimeField {
public:
    SpaceTimeField(const Grid& g, double delta, int nt, std::vector<double> carriers);

    const Grid& grid() const { return grid_; }
    double delta() const { return delta_; }
    int nt() const { return nt_; }
    double time_step() const { return 4.0 * delta_ / nt_; }
    double time(int j) const { return -2.0 * delta_ + j * time_step(); }
    /// lambda for storage column c, c = l + nt/2.
    double lambda(int c) const;
    double carrier(std::size_t slot) const { return carriers_[slot]; }

    /// Row-major [slot][c] in FFT slot order.
    std::span<const cplx> values() const { return values_; }
    std::span<cplx> values() { return values_; }
    cplx value(std::size_t slot, int c) const { return values_[slot * static_cast<std::size_t>(nt_) + static_cast<std::size_t>(c)]; }

    double l2_norm() const;

private:
    Grid grid_;
    double delta_;
    int nt_;
    std::vector<double> carriers_;
    std::vector<cplx> values_;
};

/// phi(xi) per FFT slot.
std::vector<double> free_carriers(const Grid& g, const PhysParams& p);

/// Smallest power of two with lambda_max = pi nt / (4 delta) >= bandwidth + 40/delta.
int choose_time_samples(double delta, double bandwidth);

/// Samples psi(t/delta) u(t) at the window nodes and transforms each mode.
SpaceTimeField sample_windowed(const Grid& g, double delta, int nt, std::vector<double> carriers,
                               const std::function<SpectralField(double)>& u);

/// (sum <xi>^{2s} <tau - phi(xi)>^{2b} |f(xi, tau)|^2)^{1/2}.
double xsb_norm(const SpaceTimeField& f, double s, double b, const PhysParams& p);

/// max |phi(xi1) + phi(xi2) - phi(xi1 + xi2)| over retained interacting pairs
/// in the supports of u and v.
double interaction_bandwidth(const SpectralField& u, const SpectralField& v, const PhysParams& p);

struct BilinearParts {
    double numerator;
    double denominator;
    double ratio;
    int time_samples;
};

/// |psi(t/delta) d_x I(u v)|_{X_{0,b-1}} / ((delta^{1/2-eps} + N^{-3/2+eps}) |psi I u|_{X_{0,b}} |psi I v|_{X_{0,b}})
/// with u = S(t)u0, v = S(t)v0 and b = 1/2 + eps. Throws on a zero denominator.
BilinearParts bilinear_parts(const SpectralField& u0, const SpectralField& v0, double delta, const PhysParams& p,
                             const IParams& ip, double eps = 0.01);
double bilinear_ratio(const SpectralField& u0, const SpectralField& v0, double delta, const PhysParams& p,
                      const IParams& ip, double eps = 0.01);

/// |I^s(psi u, psi v)|_{L^2_{xt}} / (|psi u|_{X_{0,1/2+eps}} |psi v|_{X_{0,b_tilde+eps}})
/// for free evolutions u = S(t)u0, v = S(t)v0 and psi = psi(t/delta). The
/// numerator is summed directly over (xi, t). Requires s_exp in [0, 1/2] and
/// b_tilde >= 1/6 + 2 s_exp / 3.
double is_estimate_ratio(const SpectralField& u0, const SpectralField& v0, double s_exp, double b_tilde,
                         const PhysParams& p, double delta = 1.0, double eps = 0.01,
                         IsKernel kernel = IsKernel::Inputs);

} // namespace benjamin
