#pragma once

// The smoothing operator I = I_{N,s}: a Fourier multiplier equal to 1 below N
// and to (N/|xi|)^{-s} above 2N, which maps H^s into L^2.

#include "core/report.hpp"
#include "core/spectral.hpp"

#include <vector>

namespace benjamin {

/// Interpolation used on the band N < |xi| < 2N.
enum class Transition {
    /// Cubic Hermite interpolation of log m against log|xi|, matching values
    /// and slopes of both closed-form branches. C^1 and monotone.
    LogHermite,
};

class IParams {
public:
    IParams(double cutoff, double s, Transition transition = Transition::LogHermite);

    double cutoff() const { return cutoff_; }
    double s() const { return s_; }
    Transition transition() const { return transition_; }

private:
    double cutoff_;
    double s_;
    Transition transition_;
};

/// m_{N,s}(xi), even, in (0, 1].
double m_multiplier(double xi, const IParams& ip);

SpectralField apply_I(const SpectralField& u, const IParams& ip);

/// (sum <xi>^{2s} |u_hat|^2)^{1/2}.
double sobolev_norm(const SpectralField& u, double s);

/// Empirical constants of C^{-1}|u|_{H^s} <= |Iu|_{L^2} <= C N^{-s} |u|_{H^s}.
/// max_ratio = max |Iu| / (N^{-s}|u|_{H^s}); min_ratio = min |Iu| / |u|_{H^s}.
/// Zero fields are skipped and counted as violations.
BoundReport check_norm_equivalence(const std::vector<SpectralField>& ensemble, const IParams& ip);

} // namespace benjamin
