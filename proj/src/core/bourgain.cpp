#include "core/bourgain.hpp"

#include "core/fft.hpp"
#include "core/parallel.hpp"
#include "core/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace benjamin {

namespace {

constexpr int kMaxTimeSamples = 1 << 20;

double japanese(double x) { return std::sqrt(1.0 + x * x); }

SpectralField retained(const SpectralField& u)
{
    SpectralField out = u;
    out.truncate(u.grid().dealias_kmax());
    return out;
}

} // namespace

SpaceTimeField::SpaceTimeField(const Grid& g, double delta, int nt, std::vector<double> carriers)
    : grid_(g), delta_(delta), nt_(nt), carriers_(std::move(carriers)),
      values_(static_cast<std::size_t>(g.modes()) * static_cast<std::size_t>(nt))
{
    if (!(delta > 0.0))
        throw std::invalid_argument("space-time field: delta must be positive");
    if (nt < 2 || nt % 2 != 0)
        throw std::invalid_argument("space-time field: sample count must be even and >= 2");
    if (carriers_.size() != static_cast<std::size_t>(g.modes()))
        throw std::invalid_argument("space-time field: one carrier per mode is required");
}

double SpaceTimeField::lambda(int c) const { return 2.0 * kPi * (c - nt_ / 2) / (4.0 * delta_); }

double SpaceTimeField::l2_norm() const
{
    double s = 0.0;
    for (const auto& v : values_)
        s += std::norm(v);
    return std::sqrt(s);
}

std::vector<double> free_carriers(const Grid& g, const PhysParams& p)
{
    std::vector<double> c(static_cast<std::size_t>(g.modes()));
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = phase(g.frequency(g.wavenumber(i)), p);
    return c;
}

int choose_time_samples(double delta, double bandwidth)
{
    const double need = std::abs(bandwidth) + 40.0 / delta;
    int nt = 16;
    while (kPi * nt / (4.0 * delta) < need) {
        if (nt >= kMaxTimeSamples)
            throw std::runtime_error("space-time field: required time resolution exceeds the sample limit");
        nt *= 2;
    }
    return nt;
}

SpaceTimeField sample_windowed(const Grid& g, double delta, int nt, std::vector<double> carriers,
                               const std::function<SpectralField(double)>& u)
{
    SpaceTimeField f(g, delta, nt, std::move(carriers));
    const auto modes = static_cast<std::size_t>(g.modes());
    const auto n = static_cast<std::size_t>(nt);
    std::vector<cplx> series(modes * n);
    parallel_for(n, [&](std::size_t j) {
        const double t = f.time(static_cast<int>(j));
        const double w = psi_cutoff(t / delta);
        if (w == 0.0)
            return;
        const SpectralField ut = u(t);
        if (!(ut.grid() == g))
            throw std::invalid_argument("space-time field: signal grid mismatch");
        for (std::size_t i = 0; i < modes; ++i)
            series[i * n + j] = w * ut.coeffs()[i] * std::polar(1.0, -f.carrier(i) * t);
    });
    const double scale = std::sqrt(f.time_step() / nt);
    auto out = f.values();
    parallel_for(modes, [&](std::size_t i) {
        std::span<cplx> row(series.data() + i * n, n);
        fft::forward(row);
        // t_j = -2 delta + j dt gives exp(-i lambda_l t_j) = (-1)^l exp(-2 pi i l j / nt)
        for (int c = 0; c < nt; ++c) {
            const int l = c - nt / 2;
            const std::size_t src = static_cast<std::size_t>(l >= 0 ? l : l + nt);
            out[i * n + static_cast<std::size_t>(c)] = (l % 2 == 0 ? scale : -scale) * row[src];
        }
    });
    return f;
}

double xsb_norm(const SpaceTimeField& f, double s, double b, const PhysParams& p)
{
    const Grid& g = f.grid();
    const auto n = static_cast<std::size_t>(f.nt());
    double acc = 0.0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(g.modes()); ++i) {
        const double xi = g.frequency(g.wavenumber(i));
        const double space = std::pow(japanese(xi), 2.0 * s);
        const double shift = f.carrier(i) - phase(xi, p);
        double row = 0.0;
        for (int c = 0; c < f.nt(); ++c) {
            const double v = std::norm(f.values()[i * n + static_cast<std::size_t>(c)]);
            if (v != 0.0)
                row += std::pow(japanese(shift + f.lambda(c)), 2.0 * b) * v;
        }
        acc += space * row;
    }
    return std::sqrt(acc);
}

double interaction_bandwidth(const SpectralField& u, const SpectralField& v, const PhysParams& p)
{
    const Grid& g = u.grid();
    const int kd = g.dealias_kmax();
    double best = 0.0;
    for (int k1 = -kd; k1 <= kd; ++k1) {
        if (u.at(k1) == cplx{})
            continue;
        for (int k2 = -kd; k2 <= kd; ++k2) {
            if (v.at(k2) == cplx{} || std::abs(k1 + k2) > kd)
                continue;
            const double r = phase(g.frequency(k1), p) + phase(g.frequency(k2), p) - phase(g.frequency(k1 + k2), p);
            best = std::max(best, std::abs(r));
        }
    }
    return best;
}

BilinearParts bilinear_parts(const SpectralField& u0, const SpectralField& v0, double delta, const PhysParams& p,
                             const IParams& ip, double eps)
{
    if (!(eps > 0.0) || eps >= 0.5)
        throw std::invalid_argument("bilinear ratio: eps must lie in (0, 1/2)");
    const Grid& g = u0.grid();
    const SpectralField u = retained(u0);
    const SpectralField v = retained(v0);
    if (u.l2_norm() == 0.0 || v.l2_norm() == 0.0)
        throw std::invalid_argument("bilinear ratio: zero denominator");
    const double b = 0.5 + eps;
    const auto carriers = free_carriers(g, p);

    const int nt_free = choose_time_samples(delta, 0.0);
    auto free_norm = [&](const SpectralField& w) {
        const SpectralField iw = apply_I(w, ip);
        return xsb_norm(sample_windowed(g, delta, nt_free, carriers,
                                        [&](double t) { return linear_propagator(iw, t, p); }),
                        0.0, b, p);
    };
    const double nu = free_norm(u);
    const double nv = free_norm(v);
    if (nu == 0.0 || nv == 0.0)
        throw std::invalid_argument("bilinear ratio: zero denominator");

    const int nt = choose_time_samples(delta, interaction_bandwidth(u, v, p));
    const auto product = sample_windowed(g, delta, nt, carriers, [&](double t) {
        return derivative(apply_I(dealiased_product(linear_propagator(u, t, p), linear_propagator(v, t, p)), ip), 1);
    });
    const double num = xsb_norm(product, 0.0, b - 1.0, p);
    const double den =
        (std::pow(delta, 0.5 - eps) + std::pow(ip.cutoff(), -1.5 + eps)) * nu * nv;
    return {num, den, num / den, nt};
}

double bilinear_ratio(const SpectralField& u0, const SpectralField& v0, double delta, const PhysParams& p,
                      const IParams& ip, double eps)
{
    return bilinear_parts(u0, v0, delta, p, ip, eps).ratio;
}

double is_estimate_ratio(const SpectralField& u0, const SpectralField& v0, double s_exp, double b_tilde,
                         const PhysParams& p, double delta, double eps, IsKernel kernel)
{
    if (s_exp < 0.0 || s_exp > 0.5)
        throw std::invalid_argument("I^s ratio: s_exp must lie in [0, 1/2]");
    if (b_tilde < 1.0 / 6.0 + 2.0 * s_exp / 3.0 - 1e-12)
        throw std::invalid_argument("I^s ratio: b_tilde must be >= 1/6 + 2 s_exp / 3");
    const Grid& g = u0.grid();
    const SpectralField u = retained(u0);
    const SpectralField v = retained(v0);
    const auto carriers = free_carriers(g, p);
    const int nt_free = choose_time_samples(delta, 0.0);
    auto free_norm = [&](const SpectralField& w, double b) {
        return xsb_norm(sample_windowed(g, delta, nt_free, carriers,
                                        [&](double t) { return linear_propagator(w, t, p); }),
                        0.0, b, p);
    };
    const double den = free_norm(u, 0.5 + eps) * free_norm(v, b_tilde + eps);
    if (den == 0.0)
        throw std::invalid_argument("I^s ratio: zero denominator");

    const int nt = choose_time_samples(delta, interaction_bandwidth(u, v, p));
    const double dt = 4.0 * delta / nt;
    std::vector<double> slices(static_cast<std::size_t>(nt));
    parallel_for(static_cast<std::size_t>(nt), [&](std::size_t j) {
        const double t = -2.0 * delta + static_cast<double>(j) * dt;
        const double w = psi_cutoff(t / delta);
        if (w == 0.0)
            return;
        const SpectralField out =
            Is_bilinear(linear_propagator(u, t, p), linear_propagator(v, t, p), s_exp, p, kernel);
        slices[j] = w * w * w * w * out.l2_norm_squared();
    });
    const double num = std::sqrt(dt * pairwise_sum(slices.data(), slices.size()));
    return num / den;
}

} // namespace benjamin
