#include "core/imethod.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace benjamin {

IParams::IParams(double cutoff, double s, Transition transition)
    : cutoff_(cutoff), s_(s), transition_(transition)
{
    if (!(cutoff >= 4.0) || !std::isfinite(cutoff))
        throw std::invalid_argument("imethod: cutoff N must be >= 4");
    if (!(s < 0.0) || s < -0.75)
        throw std::invalid_argument("imethod: s must lie in [-3/4, 0)");
}

double m_multiplier(double xi, const IParams& ip)
{
    const double a = std::abs(xi);
    const double n = ip.cutoff();
    if (a <= n)
        return 1.0;
    if (a >= 2.0 * n)
        return std::pow(a / n, ip.s());
    // With t = log(|xi|/N)/log 2 the Hermite cubic through (0, 0, slope 0)
    // and (1, s log 2, slope s) reduces to s log2 (2t^2 - t^3).
    const double h = std::log(2.0);
    const double t = std::log(a / n) / h;
    return std::exp(ip.s() * h * t * t * (2.0 - t));
}

SpectralField apply_I(const SpectralField& u, const IParams& ip)
{
    SpectralField out = u;
    const Grid& g = u.grid();
    auto c = out.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] *= m_multiplier(g.frequency(g.wavenumber(i)), ip);
    return out;
}

double sobolev_norm(const SpectralField& u, double s)
{
    const Grid& g = u.grid();
    double acc = 0.0;
    auto c = u.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double xi = g.frequency(g.wavenumber(i));
        acc += std::pow(1.0 + xi * xi, s) * std::norm(c[i]);
    }
    return std::sqrt(acc);
}

BoundReport check_norm_equivalence(const std::vector<SpectralField>& ensemble, const IParams& ip)
{
    if (ensemble.empty())
        throw std::invalid_argument("norm equivalence: empty ensemble");
    BoundReport r;
    r.lemma = "norm-equivalence";
    const double scale = std::pow(ip.cutoff(), -ip.s());
    for (const auto& u : ensemble) {
        const double hs = sobolev_norm(u, ip.s());
        const double iu = apply_I(u, ip).l2_norm();
        if (hs == 0.0 || iu == 0.0) {
            ++r.violations;
            continue;
        }
        r.min_ratio = r.samples == 0 ? iu / hs : std::min(r.min_ratio, iu / hs);
        r.max_ratio = std::max(r.max_ratio, iu / (scale * hs));
        ++r.samples;
    }
    return r;
}

} // namespace benjamin
