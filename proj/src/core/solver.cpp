#include "core/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace benjamin {

BlowUpError::BlowUpError(double t, const std::string& what) : std::runtime_error(what), t_(t) {}

namespace {

bool all_finite(const SpectralField& u)
{
    for (const auto& c : u.coeffs())
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            return false;
    return true;
}

SpectralField nonlinear_or_zero(const SpectralField& u, Nonlinearity nl)
{
    return nl == Nonlinearity::On ? rhs_nonlinear(u) : SpectralField(u.grid());
}

} // namespace

SpectralField rhs_nonlinear(const SpectralField& u)
{
    SpectralField out = derivative(dealiased_square(u), 1);
    out *= -1.0;
    out.coeffs()[0] = 0.0;
    return out;
}

SpectralField step_ifrk4(const SpectralField& u, double dt, const PhysParams& p, Nonlinearity nl)
{
    if (!(dt > 0.0))
        throw std::invalid_argument("ifrk4: dt must be positive");
    const double half = 0.5 * dt;
    const SpectralField k1 = nonlinear_or_zero(u, nl);
    const SpectralField uh = linear_propagator(u, half, p);
    const SpectralField k2 = nonlinear_or_zero(uh + linear_propagator(half * k1, half, p), nl);
    const SpectralField k3 = nonlinear_or_zero(uh + half * k2, nl);
    const SpectralField k4 = nonlinear_or_zero(linear_propagator(u, dt, p) + linear_propagator(dt * k3, half, p), nl);

    SpectralField incr = linear_propagator(k1, dt, p);
    incr += linear_propagator(2.0 * (k2 + k3), half, p);
    incr += k4;
    SpectralField out = linear_propagator(u, dt, p);
    if (nl == Nonlinearity::On)
        out += (dt / 6.0) * incr;
    if (!all_finite(out))
        throw BlowUpError(0.0, "ifrk4: non-finite coefficients");
    return out;
}

Trajectory solve(const SpectralField& u0, double T, double dt, const PhysParams& p, const IParams& ip,
                 const SolveOptions& opt)
{
    if (!(T > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("solve: T and dt must be positive");
    if (opt.stride < 1)
        throw std::invalid_argument("solve: stride must be >= 1");
    const long long chunks = static_cast<long long>(std::ceil(T / (dt * opt.stride) - 1e-9));
    const long long steps = std::max(1LL, chunks) * opt.stride;
    const double h = T / static_cast<double>(steps);

    SpectralField u = u0;
    u.truncate(u.grid().dealias_kmax());
    Trajectory traj(u.grid(), p, h);
    traj.imethod = ip;
    traj.sample_dt = h * opt.stride;
    traj.record(0.0, u);
    const double limit = opt.growth_limit * u.l2_norm();
    for (long long n = 1; n <= steps; ++n) {
        const double t = static_cast<double>(n) * h;
        try {
            u = step_ifrk4(u, h, p, opt.nonlinearity);
        } catch (const BlowUpError&) {
            std::ostringstream msg;
            msg << "solve: non-finite state at t = " << t;
            throw BlowUpError(t, msg.str());
        }
        if (limit > 0.0 && u.l2_norm() > limit) {
            std::ostringstream msg;
            msg << "solve: L2 norm grew beyond " << opt.growth_limit << "x at t = " << t;
            throw BlowUpError(t, msg.str());
        }
        if (n % opt.stride == 0)
            traj.record(t, u);
    }
    return traj;
}

double psi_cutoff(double t)
{
    const auto f = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
    const double a = std::abs(t);
    if (a <= 1.0)
        return 1.0;
    if (a >= 2.0)
        return 0.0;
    const double up = f(2.0 - a);
    return up / (up + f(a - 1.0));
}

PicardResult picard_solve(const SpectralField& u0, double delta, int iterations, const PhysParams& p,
                          const IParams& ip, const PicardOptions& opt)
{
    if (!(delta > 0.0))
        throw std::invalid_argument("picard: delta must be positive");
    if (iterations < 1 || opt.nodes < 3)
        throw std::invalid_argument("picard: need at least one iteration and three quadrature intervals");
    const Grid& g = u0.grid();
    const int n = opt.nodes;
    const double h = delta / n;
    const auto nodes = static_cast<std::size_t>(n + 1);

    SpectralField base = u0;
    base.truncate(g.dealias_kmax());
    const double scale = apply_I(base, ip).l2_norm();

    std::vector<SpectralField> u(nodes, SpectralField(g));
    std::vector<SpectralField> integrand(nodes, SpectralField(g));
    std::vector<SpectralField> acc(nodes, SpectralField(g));

    PicardResult res{SpectralField(g), {}, true, false, 0};
    for (int it = 1; it <= iterations; ++it) {
        for (std::size_t j = 0; j < nodes; ++j)
            integrand[j] = linear_propagator(rhs_nonlinear(u[j]), -static_cast<double>(j) * h, p);
        // cumulative integral of the interaction-picture integrand
        acc[0] = SpectralField(g);
        for (std::size_t j = 1; j < nodes; ++j) {
            if (j == 1) {
                acc[1] = (h / 24.0) * (9.0 * integrand[0] + 19.0 * integrand[1] - 5.0 * integrand[2] + integrand[3]);
            } else if (j % 2 == 0) {
                acc[j] = acc[j - 2] + (h / 3.0) * (integrand[j - 2] + 4.0 * integrand[j - 1] + integrand[j]);
            } else {
                acc[j] = acc[j - 3] + (3.0 * h / 8.0) * (integrand[j - 3] + 3.0 * integrand[j - 2] +
                                                          3.0 * integrand[j - 1] + integrand[j]);
            }
        }
        double residual = 0.0;
        bool finite = true;
        for (std::size_t j = 0; j < nodes; ++j) {
            SpectralField next = linear_propagator(base + acc[j], static_cast<double>(j) * h, p);
            residual = std::max(residual, apply_I(next - u[j], ip).l2_norm());
            finite = finite && all_finite(next);
            u[j] = std::move(next);
        }
        res.iterations = it;
        if (!finite || !std::isfinite(residual)) {
            res.contracted = false;
            res.residuals.push_back(std::numeric_limits<double>::infinity());
            break;
        }
        res.residuals.push_back(residual);
        if (it >= 2 && residual > 0.5 * res.residuals[res.residuals.size() - 2]) {
            res.contracted = false;
            break;
        }
        if (residual <= opt.tol * scale) {
            res.converged = true;
            break;
        }
    }
    res.u_delta = u.back();
    return res;
}

namespace {

bool contracts(const SpectralField& u0, double delta, const PhysParams& p, const IParams& ip,
               const LifetimeOptions& opt)
{
    const auto r = picard_solve(u0, delta, opt.iterations, p, ip, opt.picard);
    return r.contracted && r.converged;
}

} // namespace

LifetimeScan lifetime_scan(const SpectralField& u0, const std::vector<double>& amplitudes, const PhysParams& p,
                           const IParams& ip, const LifetimeOptions& opt)
{
    if (amplitudes.size() < 4)
        throw std::invalid_argument("lifetime scan: at least four amplitudes are required");
    LifetimeScan scan;
    for (double lam : amplitudes) {
        if (!(lam > 0.0))
            throw std::invalid_argument("lifetime scan: amplitudes must be positive");
        SpectralField v = lam * u0;
        v.truncate(v.grid().dealias_kmax());
        double lo = opt.delta_min;
        double hi = opt.delta_max;
        double star;
        if (contracts(v, hi, p, ip, opt)) {
            star = hi;
        } else if (!contracts(v, lo, p, ip, opt)) {
            star = lo;
        } else {
            for (int b = 0; b < opt.bisections; ++b) {
                const double mid = std::sqrt(lo * hi);
                (contracts(v, mid, p, ip, opt) ? lo : hi) = mid;
            }
            star = lo;
        }
        scan.rows.push_back({lam, apply_I(v, ip).l2_norm(), star});
    }

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(scan.rows.size());
    for (const auto& r : scan.rows) {
        const double x = std::log(r.norm_Iu0);
        const double y = std::log(r.delta_star);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double den = m * sxx - sx * sx;
    scan.slope = den != 0.0 ? (m * sxy - sx * sy) / den : 0.0;

    auto sorted = scan.rows;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.amplitude < b.amplitude; });
    scan.monotone = true;
    for (std::size_t i = 1; i < sorted.size(); ++i)
        scan.monotone = scan.monotone && sorted[i].delta_star <= sorted[i - 1].delta_star;
    return scan;
}

} // namespace benjamin
