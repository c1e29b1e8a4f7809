#pragma once

// Periodic spectral representation of real fields and the Fourier symbols of
// the linear Benjamin operator.
//
// Normalization is unitary: a field u(x) on [0, L) with Fourier series
// u(x) = sum_k c_k exp(i k x 2pi/L) is stored as u_hat(k) = sqrt(L) c_k, so
// that sum_k |u_hat(k)|^2 = int |u|^2 dx.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace benjamin {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

class Grid {
public:
    Grid(double box_length, int modes);

    double box_length() const { return length_; }
    int modes() const { return modes_; }

    /// Largest stored wavenumber. The Nyquist index M/2 is never populated.
    int kmax() const { return modes_ / 2 - 1; }
    /// Largest wavenumber kept by the 2/3-rule product: the largest k with 3k < M.
    int dealias_kmax() const { return (modes_ - 1) / 3; }

    double wavenumber_step() const { return 2.0 * kPi / length_; }
    double frequency(int k) const { return k * wavenumber_step(); }

    /// FFT-order slot of wavenumber k, |k| <= M/2.
    std::size_t index(int k) const { return static_cast<std::size_t>(k >= 0 ? k : k + modes_); }
    /// Wavenumber stored at FFT-order slot i.
    int wavenumber(std::size_t i) const
    {
        const int j = static_cast<int>(i);
        return j <= modes_ / 2 ? j : j - modes_;
    }

    bool operator==(const Grid& o) const { return length_ == o.length_ && modes_ == o.modes_; }

private:
    double length_;
    int modes_;
};

/// Coefficients of the Benjamin equation u_t + nu H(u_xx) + mu u_xxx + (u^2)_x = 0.
class PhysParams {
public:
    PhysParams(double nu, double mu);

    double nu() const { return nu_; }
    double mu() const { return mu_; }
    /// a = 2 max(1, |2 nu / (3 mu)|), the threshold above which the quadratic
    /// resonance function is bounded below by a multiple of |xi1 xi2 xi3|.
    double a() const;

private:
    double nu_;
    double mu_;
};

class SpectralField {
public:
    explicit SpectralField(const Grid& grid);
    SpectralField(const Grid& grid, std::vector<cplx> coeffs);

    const Grid& grid() const { return grid_; }
    std::span<const cplx> coeffs() const { return coeffs_; }
    std::span<cplx> coeffs() { return coeffs_; }

    cplx at(int k) const { return coeffs_[grid_.index(k)]; }
    /// Sets the coefficient of k and the conjugate coefficient of -k.
    void set_mode(int k, cplx value);

    bool is_real_symmetric(double tol = 1e-12) const;
    /// Zeros every wavenumber with |k| > kcut.
    void truncate(int kcut);

    double l2_norm_squared() const;
    double l2_norm() const;

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);

private:
    Grid grid_;
    std::vector<cplx> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Maximum coefficient-wise distance.
double max_abs_diff(const SpectralField& a, const SpectralField& b);

/// phi(xi) = -nu xi|xi| + mu xi^3.
double phase(double xi, const PhysParams& p);
/// phi'(xi) = -2 nu |xi| + 3 mu xi^2.
double phase_derivative(double xi, const PhysParams& p);

/// Symbol -i sgn(xi) with sgn(0) = 0.
SpectralField hilbert(const SpectralField& u);
/// Symbol (i xi)^order.
SpectralField derivative(const SpectralField& u, int order);

/// Applies exp(i t phi(xi)), the free Benjamin group.
SpectralField linear_propagator(const SpectralField& u, double t, const PhysParams& p);

/// Point values u(x_j), x_j = j L / M.
std::vector<double> to_physical(const SpectralField& u);
SpectralField from_physical(const Grid& grid, std::span<const double> values);

/// Fourier coefficients of u v under the 2/3 rule: both factors and the
/// product are restricted to |k| <= dealias_kmax(). Equal to the truncated
/// convolution L^{-1/2} sum_{k1+k2=k} u_hat(k1) v_hat(k2).
SpectralField dealiased_product(const SpectralField& u, const SpectralField& v);
SpectralField dealiased_square(const SpectralField& u);

} // namespace benjamin
