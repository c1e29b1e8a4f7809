#include "core/energies.hpp"

#include "core/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace benjamin {
namespace {

std::vector<cplx> retained_coeffs(const SpectralField& u, int kd)
{
    std::vector<cplx> c(static_cast<std::size_t>(2 * kd + 1));
    for (int k = -kd; k <= kd; ++k)
        c[static_cast<std::size_t>(k + kd)] = u.at(k);
    return c;
}

void check_arity(int k)
{
    if (k < 2 || k > 5)
        throw std::invalid_argument("lambda: arity must be between 2 and 5");
}

// Visits every zero-sum tuple of retained wavenumbers whose first index is i1,
// calling f(idx, last) with idx holding the k-1 free indices.
template <class F>
void for_each_tuple(int k, int kd, int i1, F&& f)
{
    const int n = 2 * kd + 1;
    std::array<int, 5> idx{i1, 0, 0, 0, 0};
    auto last_of = [&](int free) {
        int s = 0;
        for (int j = 0; j < free; ++j)
            s += idx[static_cast<std::size_t>(j)];
        return k * kd - s;
    };
    auto rec = [&](auto&& self, int depth) -> void {
        if (depth == k - 1) {
            const int last = last_of(k - 1);
            if (last >= 0 && last < n)
                f(idx, last);
            return;
        }
        for (int i = 0; i < n; ++i) {
            idx[static_cast<std::size_t>(depth)] = i;
            self(self, depth + 1);
        }
    };
    rec(rec, 1);
}

std::size_t table_offset(const std::array<int, 5>& idx, int count, int n)
{
    std::size_t off = 0;
    for (int j = 0; j < count; ++j)
        off = off * static_cast<std::size_t>(n) + static_cast<std::size_t>(idx[static_cast<std::size_t>(j)]);
    return off;
}

double lattice_scale(const Grid& g, int k) { return std::pow(g.box_length(), 1.0 - 0.5 * k); }

} // namespace

cplx lambda_sum(const TupleFunction& mult, const SpectralField& u, int k)
{
    check_arity(k);
    const Grid& g = u.grid();
    const int kd = g.dealias_kmax();
    const int n = 2 * kd + 1;
    const auto c = retained_coeffs(u, kd);
    std::vector<cplx> partial(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i1) {
        if (c[i1] == cplx{})
            return;
        cplx acc{};
        std::array<double, 5> xi{};
        for_each_tuple(k, kd, static_cast<int>(i1), [&](const std::array<int, 5>& idx, int last) {
            cplx prod = c[static_cast<std::size_t>(last)];
            double sum = 0.0;
            for (int j = 0; j < k - 1; ++j) {
                prod *= c[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
                xi[static_cast<std::size_t>(j)] = g.frequency(idx[static_cast<std::size_t>(j)] - kd);
                sum += xi[static_cast<std::size_t>(j)];
            }
            if (prod == cplx{})
                return;
            xi[static_cast<std::size_t>(k - 1)] = -sum;
            acc += mult(std::span<const double>(xi.data(), static_cast<std::size_t>(k))) * prod;
        });
        partial[i1] = acc;
    });
    return lattice_scale(g, k) * pairwise_sum(partial.data(), partial.size());
}

double lambda_k(const TupleFunction& mult, const SpectralField& u, int k) { return lambda_sum(mult, u, k).real(); }

cplx lambda_table(const std::vector<double>& table, bool imaginary, const SpectralField& u, int k, int kd)
{
    check_arity(k);
    const int n = 2 * kd + 1;
    std::size_t expected = 1;
    for (int j = 0; j < k - 1; ++j)
        expected *= static_cast<std::size_t>(n);
    if (table.size() != expected || kd > u.grid().dealias_kmax())
        throw std::invalid_argument("lambda: table does not match grid or arity");
    const auto c = retained_coeffs(u, kd);
    std::vector<cplx> partial(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i1) {
        if (c[i1] == cplx{})
            return;
        cplx acc{};
        for_each_tuple(k, kd, static_cast<int>(i1), [&](const std::array<int, 5>& idx, int last) {
            const double w = table[table_offset(idx, k - 1, n)];
            if (w == 0.0)
                return;
            cplx prod = w * c[static_cast<std::size_t>(last)];
            for (int j = 0; j < k - 1; ++j)
                prod *= c[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
            acc += prod;
        });
        partial[i1] = acc;
    });
    const cplx total = lattice_scale(u.grid(), k) * pairwise_sum(partial.data(), partial.size());
    return imaginary ? cplx(0.0, 1.0) * total : total;
}

MultiplierTables::MultiplierTables(const Grid& g, const PhysParams& p, const IParams& ip)
    : grid_(g), h_{p, ip, g.frequency(g.dealias_kmax())}, kd_(g.dealias_kmax())
{
}

const std::vector<double>& MultiplierTables::sigma3()
{
    std::lock_guard lock(mutex_);
    build3();
    return sigma3_;
}

const std::vector<double>& MultiplierTables::m3()
{
    std::lock_guard lock(mutex_);
    build3();
    return m3_;
}

const std::vector<double>& MultiplierTables::sigma4()
{
    std::lock_guard lock(mutex_);
    build4();
    return sigma4_;
}

const std::vector<double>& MultiplierTables::m4()
{
    std::lock_guard lock(mutex_);
    build4();
    return m4_;
}

const std::vector<double>& MultiplierTables::m4bar()
{
    std::lock_guard lock(mutex_);
    build4();
    return m4bar_;
}

const std::vector<double>& MultiplierTables::m5()
{
    std::lock_guard lock(mutex_);
    build5();
    return m5_;
}

void MultiplierTables::build3()
{
    if (!sigma3_.empty())
        return;
    const int n = width();
    const auto nn = static_cast<std::size_t>(n);
    sigma3_.assign(nn * nn, 0.0);
    m3_.assign(nn * nn, 0.0);
    std::vector<MultiplierStats> local(nn);
    parallel_for(nn, [&](std::size_t i1) {
        const double x1 = grid_.frequency(static_cast<int>(i1) - kd_);
        for (int i2 = 0; i2 < n; ++i2) {
            const int i3 = 3 * kd_ - static_cast<int>(i1) - i2;
            if (i3 < 0 || i3 >= n)
                continue;
            const double x2 = grid_.frequency(i2 - kd_);
            const FreqTuple t{x1, x2, -(x1 + x2)};
            const std::size_t off = i1 * nn + static_cast<std::size_t>(i2);
            m3_[off] = M3(t, h_).imag();
            sigma3_[off] = benjamin::sigma3(t, h_, &local[i1]);
        }
    });
    for (const auto& s : local)
        stats_.degenerate_sigma3 += s.degenerate_sigma3;
}

void MultiplierTables::build4()
{
    if (!sigma4_.empty())
        return;
    build3();
    const int n = width();
    const auto nn = static_cast<std::size_t>(n);
    const double cutoff = h_.imethod.cutoff();
    sigma4_.assign(nn * nn * nn, 0.0);
    m4_.assign(nn * nn * nn, 0.0);
    m4bar_.assign(nn * nn * nn, 0.0);
    std::vector<MultiplierStats> local(nn);
    static constexpr std::array<std::array<int, 2>, 6> pairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
    parallel_for(nn, [&](std::size_t i1) {
        std::array<int, 4> k{};
        std::array<double, 4> xi{};
        k[0] = static_cast<int>(i1) - kd_;
        for (int i2 = 0; i2 < n; ++i2) {
            for (int i3 = 0; i3 < n; ++i3) {
                k[1] = i2 - kd_;
                k[2] = i3 - kd_;
                k[3] = -(k[0] + k[1] + k[2]);
                if (std::abs(k[3]) > kd_)
                    continue;
                double acc = 0.0;
                double scale = 0.0;
                for (const auto& [p, q] : pairs) {
                    const int merged = k[static_cast<std::size_t>(p)] + k[static_cast<std::size_t>(q)];
                    if (std::abs(merged) > kd_)
                        continue;
                    std::array<int, 2> rest{};
                    int r = 0;
                    for (int j = 0; j < 4; ++j)
                        if (j != p && j != q)
                            rest[static_cast<std::size_t>(r++)] = k[static_cast<std::size_t>(j)];
                    const double s3 =
                        sigma3_[static_cast<std::size_t>(rest[0] + kd_) * nn + static_cast<std::size_t>(rest[1] + kd_)];
                    const double term = s3 * grid_.frequency(merged);
                    acc += term;
                    scale = std::max(scale, std::abs(term));
                }
                const double c = kM4Coefficient / static_cast<double>(pairs.size());
                const double m4 = c * acc;
                const std::size_t off = (i1 * nn + static_cast<std::size_t>(i2)) * nn + static_cast<std::size_t>(i3);
                m4_[off] = m4;
                for (int j = 0; j < 4; ++j)
                    xi[static_cast<std::size_t>(j)] = grid_.frequency(k[static_cast<std::size_t>(j)]);
                if (!in_omega(xi, cutoff)) {
                    m4bar_[off] = m4;
                    continue;
                }
                double a = 0.0;
                for (double x : xi)
                    a += phase(x, h_.phys);
                if (std::abs(a) <= resonance_guard(xi)) {
                    if (std::abs(m4) > 1e-10 * std::abs(c) * scale)
                        throw ResonanceError("sigma4 table: alpha4 vanishes on Omega but M4 does not");
                    ++local[i1].resonant_sigma4;
                    continue;
                }
                sigma4_[off] = -m4 / a;
            }
        }
    });
    for (const auto& s : local)
        stats_.resonant_sigma4 += s.resonant_sigma4;
}

void MultiplierTables::build5()
{
    if (!m5_.empty())
        return;
    build4();
    const int n = width();
    const auto nn = static_cast<std::size_t>(n);
    m5_.assign(nn * nn * nn * nn, 0.0);
    static constexpr std::array<std::array<int, 2>, 10> pairs{
        {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}};
    parallel_for(nn, [&](std::size_t i1) {
        std::array<int, 5> k{};
        k[0] = static_cast<int>(i1) - kd_;
        for (int i2 = 0; i2 < n; ++i2)
            for (int i3 = 0; i3 < n; ++i3)
                for (int i4 = 0; i4 < n; ++i4) {
                    k[1] = i2 - kd_;
                    k[2] = i3 - kd_;
                    k[3] = i4 - kd_;
                    k[4] = -(k[0] + k[1] + k[2] + k[3]);
                    if (std::abs(k[4]) > kd_)
                        continue;
                    double acc = 0.0;
                    for (const auto& [p, q] : pairs) {
                        const int merged = k[static_cast<std::size_t>(p)] + k[static_cast<std::size_t>(q)];
                        if (std::abs(merged) > kd_)
                            continue;
                        std::array<int, 3> rest{};
                        int r = 0;
                        for (int j = 0; j < 5; ++j)
                            if (j != p && j != q)
                                rest[static_cast<std::size_t>(r++)] = k[static_cast<std::size_t>(j)];
                        const std::size_t off = (static_cast<std::size_t>(rest[0] + kd_) * nn +
                                                 static_cast<std::size_t>(rest[1] + kd_)) * nn +
                                                static_cast<std::size_t>(rest[2] + kd_);
                        acc += sigma4_[off] * grid_.frequency(merged);
                    }
                    const std::size_t off =
                        ((i1 * nn + static_cast<std::size_t>(i2)) * nn + static_cast<std::size_t>(i3)) * nn +
                        static_cast<std::size_t>(i4);
                    m5_[off] = kM5Coefficient / static_cast<double>(pairs.size()) * acc;
                }
    });
}

double E2(const SpectralField& u, const IParams& ip) { return apply_I(u, ip).l2_norm_squared(); }

double E3(const SpectralField& u, MultiplierTables& tables)
{
    return E2(u, tables.hierarchy().imethod) + lambda_table(tables.sigma3(), false, u, 3, tables.kd()).real();
}

double E4(const SpectralField& u, MultiplierTables& tables)
{
    return E3(u, tables) + lambda_table(tables.sigma4(), false, u, 4, tables.kd()).real();
}

double E3(const SpectralField& u, const PhysParams& p, const IParams& ip)
{
    MultiplierTables t(u.grid(), p, ip);
    return E3(u, t);
}

double E4(const SpectralField& u, const PhysParams& p, const IParams& ip)
{
    MultiplierTables t(u.grid(), p, ip);
    return E4(u, t);
}

namespace {

std::vector<double> central_difference(const std::vector<double>& e, double h)
{
    std::vector<double> d(e.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t j = 2; j + 2 < e.size(); ++j)
        d[j] = (e[j - 2] - 8.0 * e[j - 1] + 8.0 * e[j + 1] - e[j + 2]) / (12.0 * h);
    return d;
}

double relative_error(const std::vector<double>& fd, const std::vector<double>& exact)
{
    double diff = 0.0;
    double ref = 0.0;
    for (std::size_t j = 2; j + 2 < fd.size(); ++j) {
        diff = std::max(diff, std::abs(fd[j] - exact[j]));
        ref = std::max(ref, std::abs(exact[j]));
    }
    return diff / std::max(ref, std::numeric_limits<double>::min());
}

} // namespace

EnergyReport check_energy_derivative(const Trajectory& traj, int level, const PhysParams& p, const IParams& ip)
{
    if (level < 2 || level > 4)
        throw std::invalid_argument("energy check: level must be 2, 3 or 4");
    const std::size_t n = traj.size();
    if (n < 5)
        throw std::invalid_argument("energy check: at least five samples are required");
    const double h = traj.times[1] - traj.times[0];
    for (std::size_t j = 1; j < n; ++j)
        if (!(h > 0.0) || std::abs(traj.times[j] - traj.times[j - 1] - h) > 1e-9 * h)
            throw std::invalid_argument("energy check: sample times must be uniform and increasing");

    MultiplierTables tables(traj.grid, p, ip);
    const int kd = tables.kd();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EnergyReport r;
    r.level = level;
    r.times = traj.times;
    r.E2.assign(n, nan);
    r.E3.assign(n, nan);
    r.E4.assign(n, nan);
    r.lambda3_M3.assign(n, nan);
    r.lambda4_M4.assign(n, nan);
    r.lambda4_M4bar.assign(n, nan);
    r.lambda5_M5.assign(n, nan);

    double max_re = 0.0;
    double max_im = 0.0;
    auto take = [&](cplx v) {
        max_re = std::max(max_re, std::abs(v.real()));
        max_im = std::max(max_im, std::abs(v.imag()));
        return v.real();
    };
    for (std::size_t j = 0; j < n; ++j) {
        const SpectralField& u = traj.fields[j];
        r.E2[j] = E2(u, ip);
        r.lambda3_M3[j] = take(lambda_table(tables.m3(), true, u, 3, kd));
        if (level >= 3) {
            r.E3[j] = r.E2[j] + take(lambda_table(tables.sigma3(), false, u, 3, kd));
            r.lambda4_M4[j] = take(lambda_table(tables.m4(), true, u, 4, kd));
        }
        if (level >= 4) {
            r.E4[j] = r.E3[j] + take(lambda_table(tables.sigma4(), false, u, 4, kd));
            r.lambda4_M4bar[j] = take(lambda_table(tables.m4bar(), true, u, 4, kd));
            r.lambda5_M5[j] = take(lambda_table(tables.m5(), true, u, 5, kd));
        }
    }
    r.max_imag_residue = max_re > 0.0 ? max_im / max_re : max_im;

    r.fd_dE2 = central_difference(r.E2, h);
    r.rel_err2 = relative_error(r.fd_dE2, r.lambda3_M3);
    r.fd_dE3 = central_difference(r.E3, h);
    r.fd_dE4 = central_difference(r.E4, h);
    r.rel_err3 = r.rel_err4 = nan;
    if (level >= 3)
        r.rel_err3 = relative_error(r.fd_dE3, r.lambda4_M4);
    if (level >= 4) {
        std::vector<double> rhs(n);
        for (std::size_t j = 0; j < n; ++j)
            rhs[j] = r.lambda4_M4bar[j] + r.lambda5_M5[j];
        r.rel_err4 = relative_error(r.fd_dE4, rhs);
    }
    r.stats = tables.stats();
    return r;
}

std::pair<double, double> compare_E2_E4(const SpectralField& u, MultiplierTables& tables)
{
    const double e2 = E2(u, tables.hierarchy().imethod);
    const int kd = tables.kd();
    const double gap = std::abs(lambda_table(tables.sigma3(), false, u, 3, kd).real() +
                                lambda_table(tables.sigma4(), false, u, 4, kd).real());
    const double n = tables.hierarchy().imethod.cutoff();
    const double iu = std::sqrt(e2);
    return {gap, std::pow(n, -1.5) * iu * iu * iu + std::pow(n, -3.0) * iu * iu * iu * iu};
}

std::pair<double, double> compare_E2_E4(const SpectralField& u, const PhysParams& p, const IParams& ip)
{
    MultiplierTables t(u.grid(), p, ip);
    return compare_E2_E4(u, t);
}

} // namespace benjamin
