#include "core/energies.hpp"
#include "core/parallel.hpp"
#include "core/solver.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace benjamin;

namespace {

// u_hat_t = i phi u_hat - i xi P(u^2)^ on |k| <= kd, from the brute-force convolution.
std::vector<cplx> time_derivative(const SpectralField& u, const PhysParams& p)
{
    const Grid& g = u.grid();
    const int kd = g.dealias_kmax();
    const auto sq = oracle::truncated_convolution(u, u);
    std::vector<cplx> ut(static_cast<std::size_t>(2 * kd + 1));
    for (int k = -kd; k <= kd; ++k) {
        const double xi = g.frequency(k);
        ut[static_cast<std::size_t>(k + kd)] = cplx(0, 1) * phase(xi, p) * u.at(k) - cplx(0, xi) * sq[g.index(k)];
    }
    return ut;
}

double dE2_oracle(const SpectralField& u, const PhysParams& p, const IParams& ip)
{
    const Grid& g = u.grid();
    const int kd = g.dealias_kmax();
    const auto ut = time_derivative(u, p);
    double d = 0.0;
    for (int k = -kd; k <= kd; ++k) {
        const double m = m_multiplier(g.frequency(k), ip);
        d += 2 * m * m * (std::conj(u.at(k)) * ut[static_cast<std::size_t>(k + kd)]).real();
    }
    return d;
}

// d/dt of L^{1-k/2} sum c(k_1..k_{k-1}) prod u_hat by the product rule, with the
// coefficient read from a table in MultiplierTables layout.
double dlambda_oracle(const std::vector<double>& table, const SpectralField& u, const PhysParams& p, int k)
{
    const Grid& g = u.grid();
    const int kd = g.dealias_kmax();
    const int n = 2 * kd + 1;
    const auto ut = time_derivative(u, p);
    auto val = [&](int kk) { return u.at(kk); };
    auto der = [&](int kk) { return ut[static_cast<std::size_t>(kk + kd)]; };
    cplx acc{};
    std::vector<int> ks(static_cast<std::size_t>(k));
    const auto total = static_cast<std::size_t>(std::pow(n, k - 1));
    for (std::size_t off = 0; off < total; ++off) {
        std::size_t r = off;
        int sum = 0;
        for (int j = k - 2; j >= 0; --j) {
            ks[static_cast<std::size_t>(j)] = static_cast<int>(r % static_cast<std::size_t>(n)) - kd;
            r /= static_cast<std::size_t>(n);
            sum += ks[static_cast<std::size_t>(j)];
        }
        ks.back() = -sum;
        if (std::abs(ks.back()) > kd || table[off] == 0.0)
            continue;
        for (int d = 0; d < k; ++d) {
            cplx prod = table[off];
            for (int j = 0; j < k; ++j)
                prod *= j == d ? der(ks[static_cast<std::size_t>(j)]) : val(ks[static_cast<std::size_t>(j)]);
            acc += prod;
        }
    }
    return std::pow(g.box_length(), 1.0 - 0.5 * k) * acc.real();
}

cplx brute_lambda(const TupleFunction& f, const SpectralField& u, int k)
{
    const Grid& g = u.grid();
    const int kd = g.dealias_kmax();
    const int n = 2 * kd + 1;
    cplx acc{};
    std::vector<int> ks(static_cast<std::size_t>(k));
    std::vector<double> xi(static_cast<std::size_t>(k));
    const auto total = static_cast<std::size_t>(std::pow(n, k));
    for (std::size_t off = 0; off < total; ++off) {
        std::size_t r = off;
        int sum = 0;
        for (int j = 0; j < k; ++j) {
            ks[static_cast<std::size_t>(j)] = static_cast<int>(r % static_cast<std::size_t>(n)) - kd;
            r /= static_cast<std::size_t>(n);
            sum += ks[static_cast<std::size_t>(j)];
        }
        if (sum != 0)
            continue;
        cplx prod = 1.0;
        for (int j = 0; j < k; ++j) {
            prod *= u.at(ks[static_cast<std::size_t>(j)]);
            xi[static_cast<std::size_t>(j)] = g.frequency(ks[static_cast<std::size_t>(j)]);
        }
        acc += f(xi) * prod;
    }
    return std::pow(g.box_length(), 1.0 - 0.5 * k) * acc;
}

} // namespace

TEST_CASE("Lambda_2 of m(xi1) m(xi2) is |Iu|^2")
{
    const Grid g(2 * kPi, 96);
    const IParams ip(6, -0.5);
    const TupleFunction mm = [&](std::span<const double> x) {
        return cplx(m_multiplier(x[0], ip) * m_multiplier(x[1], ip));
    };
    for (unsigned seed = 0; seed < 1000; ++seed) {
        const SpectralField u = oracle::gaussian_field(g, g.dealias_kmax(), seed);
        const double e2 = E2(u, ip);
        CHECK(std::abs(lambda_k(mm, u, 2) - e2) <= 1e-13 * e2);
    }
}

TEST_CASE("Lambda_k agrees with unrestricted enumeration")
{
    const TupleFunction f = [](std::span<const double> x) {
        cplx v = 1.0;
        for (std::size_t j = 0; j < x.size(); ++j)
            v *= cplx(1.0 + 0.1 * static_cast<double>(j) * x[j], 0.3 * std::sin(x[j]));
        return v;
    };
    for (int k = 2; k <= 5; ++k) {
        const Grid g(1.7, k <= 3 ? 20 : 10);
        const SpectralField u = oracle::gaussian_field(g, g.kmax(), static_cast<unsigned>(k));
        const cplx a = lambda_sum(f, u, k);
        const cplx b = brute_lambda(f, u, k);
        CHECK_MESSAGE(std::abs(a - b) <= 1e-12 * (1 + std::abs(b)), "k = " << k);
    }

    const Grid g(2 * kPi, 8);
    const SpectralField u = oracle::gaussian_field(g, g.kmax(), 9);
    const TupleFunction one = [](std::span<const double>) { return cplx(1.0); };
    // Lambda_3(1) = int (P u)^3 for the band-limited part.
    SpectralField pu = u;
    pu.truncate(g.dealias_kmax());
    const auto sq = oracle::truncated_convolution(pu, pu);
    cplx cube{};
    for (int k = -g.dealias_kmax(); k <= g.dealias_kmax(); ++k)
        cube += sq[g.index(k)] * pu.at(-k);
    CHECK(std::abs(lambda_sum(one, u, 3) - cube) < 1e-13);
    CHECK_THROWS_AS(lambda_sum(one, u, 6), std::invalid_argument);
}

TEST_CASE("energies coincide for data below the cutoff")
{
    const Grid g(2 * kPi, 64);
    const PhysParams p(1, 1);
    const IParams ip(8, -0.5);
    MultiplierTables t(g, p, ip);
    const SpectralField u = oracle::gaussian_field(g, 8, 4);
    CHECK(E2(u, ip) == u.l2_norm_squared());
    CHECK(E3(u, t) == E2(u, ip));
    CHECK(E4(u, t) == E2(u, ip));
}

TEST_CASE("a single high mode pair has no cubic or quartic correction")
{
    const Grid g(2 * kPi, 64);
    const PhysParams p(1, 1);
    const IParams ip(8, -0.5);
    MultiplierTables t(g, p, ip);
    SpectralField u(g);
    u.set_mode(20, cplx(0.6, -0.8));
    const double m = m_multiplier(20, ip);
    CHECK(E2(u, ip) == doctest::Approx(2 * m * m).epsilon(1e-15));
    CHECK(E3(u, t) == doctest::Approx(2 * m * m).epsilon(1e-15));
    CHECK(E4(u, t) == doctest::Approx(2 * m * m).epsilon(1e-15));
}

TEST_CASE("E3 - E2 is Lambda_3 of sigma3 evaluated directly")
{
    const Grid g(2 * kPi, 48);
    const PhysParams p(1, 2);
    const IParams ip(5, -0.5);
    MultiplierTables t(g, p, ip);
    const Hierarchy h = t.hierarchy();
    const TupleFunction s3 = [&](std::span<const double> x) { return cplx(sigma3(FreqTuple(x), h)); };
    for (unsigned seed = 0; seed < 5; ++seed) {
        const SpectralField u = oracle::gaussian_field(g, g.dealias_kmax(), 100 + seed);
        const double direct = lambda_k(s3, u, 3);
        CHECK(std::abs(E3(u, t) - E2(u, ip) - direct) <= 1e-13 * (E2(u, ip) + std::abs(direct)));
    }
}

TEST_CASE("derivative identities hold exactly for the truncated flow")
{
    // dE2/dt = Lambda_3(M3), dE3/dt = Lambda_4(M4), dE4/dt = Lambda_4(M4bar) + Lambda_5(M5),
    // with the left sides from the product rule on brute-force time derivatives.
    struct Case {
        double L;
        int M;
        double nu, mu, N;
    };
    for (const Case c : {Case{kPi, 16, 1, 1, 4}, Case{kPi, 16, -0.7, 1.5, 5}, Case{2 * kPi, 20, 2, -1, 4}}) {
        const Grid g(c.L, c.M);
        const PhysParams p(c.nu, c.mu);
        const IParams ip(c.N, -0.5);
        MultiplierTables t(g, p, ip);
        const int kd = t.kd();
        for (unsigned seed = 0; seed < 3; ++seed) {
            const SpectralField u = oracle::gaussian_field(g, kd, 20 + seed);
            const double d2 = dE2_oracle(u, p, ip);
            const cplx l3 = lambda_table(t.m3(), true, u, 3, kd);
            CHECK(std::abs(l3.real() - d2) <= 1e-12 * (1 + std::abs(d2)));

            const double d3 = d2 + dlambda_oracle(t.sigma3(), u, p, 3);
            const cplx l4 = lambda_table(t.m4(), true, u, 4, kd);
            CHECK(std::abs(l4.real() - d3) <= 1e-11 * (1 + std::abs(d2)));

            const double d4 = d3 + dlambda_oracle(t.sigma4(), u, p, 4);
            const double rhs4 = lambda_table(t.m4bar(), true, u, 4, kd).real() + lambda_table(t.m5(), true, u, 5, kd).real();
            CHECK(std::abs(rhs4 - d4) <= 1e-10 * (1 + std::abs(d2)));
        }
        bool nonzero = false;
        for (double v : t.sigma4())
            nonzero = nonzero || v != 0.0;
        CHECK_MESSAGE(nonzero, "quartic correction is trivial on this grid");
    }
}

TEST_CASE("finite differences along a simulated trajectory")
{
    const Grid g(2 * kPi, 32);
    const PhysParams p(1, 1);
    const IParams ip(4, -0.5);
    const SpectralField u0 = oracle::gaussian_field(g, 6, 8, 0.5);
    SolveOptions opt;
    opt.stride = 10;
    const Trajectory tr = solve(u0, 0.02, 1e-4, p, ip, opt);
    const EnergyReport r = check_energy_derivative(tr, 4, p, ip);
    CHECK(r.rel_err2 <= 1e-3);
    CHECK(r.rel_err3 <= 1e-3);
    CHECK(r.rel_err4 <= 1e-3);
    CHECK(r.max_imag_residue <= 1e-12);
    CHECK(std::isnan(r.fd_dE2.front()));
    CHECK(std::isnan(r.fd_dE2.back()));

    const EnergyReport r2 = check_energy_derivative(tr, 2, p, ip);
    CHECK(std::isnan(r2.E3[3]));

    Trajectory short_tr(g, p, 1e-3);
    for (int j = 0; j < 4; ++j)
        short_tr.record(j * 1e-3, u0);
    CHECK_THROWS_AS(check_energy_derivative(short_tr, 2, p, ip), std::invalid_argument);
    CHECK_THROWS_AS(check_energy_derivative(tr, 5, p, ip), std::invalid_argument);
}

TEST_CASE("E2 is constant under the linear flow")
{
    const Grid g(2 * kPi, 64);
    const PhysParams p(1, 1);
    const IParams ip(8, -0.5);
    const SpectralField u0 = oracle::gaussian_field(g, g.dealias_kmax(), 12);
    SolveOptions opt;
    opt.nonlinearity = Nonlinearity::Off;
    const Trajectory tr = solve(u0, 0.05, 1e-3, p, ip, opt);
    const double e0 = E2(tr.fields.front(), ip);
    for (const auto& u : tr.fields)
        CHECK(std::abs(E2(u, ip) - e0) <= 1e-14 * e0);
}

TEST_CASE("compare_E2_E4")
{
    const Grid g(2 * kPi, 32);
    const PhysParams p(1, 1);
    const IParams ip(4, -0.5);
    const auto [d0, b0] = compare_E2_E4(SpectralField(g), p, ip);
    CHECK(d0 == 0.0);
    CHECK(b0 == 0.0);

    const SpectralField u = oracle::gaussian_field(g, g.dealias_kmax(), 31);
    const double iu = apply_I(u, ip).l2_norm();
    const auto [d, b] = compare_E2_E4(u, p, ip);
    CHECK(b == doctest::Approx(std::pow(4.0, -1.5) * iu * iu * iu + std::pow(4.0, -3.0) * std::pow(iu, 4)));
    CHECK(d == doctest::Approx(std::abs(E2(u, ip) - E4(u, p, ip))));
}

TEST_CASE("energies do not depend on the thread count")
{
    const Grid g(2 * kPi, 32);
    const PhysParams p(1, 1);
    const IParams ip(4, -0.5);
    const SpectralField u = oracle::gaussian_field(g, g.dealias_kmax(), 40);
    set_thread_count(1);
    const double a = E4(u, p, ip);
    set_thread_count(3);
    const double b = E4(u, p, ip);
    set_thread_count(1);
    CHECK(a == b);
}
