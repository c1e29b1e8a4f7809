#include "core/multipliers.hpp"
#include "core/parallel.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

using namespace benjamin;

namespace {

// Long-double reference hierarchy built from explicit permutation sums.
using ld = long double;

ld phi_ld(ld xi, const PhysParams& p) { return -ld(p.nu()) * xi * std::fabs(xi) + ld(p.mu()) * xi * xi * xi; }

ld m2xi(ld xi, const IParams& ip)
{
    const ld m = m_multiplier(static_cast<double>(xi), ip);
    return m * m * xi;
}

ld sigma3_ld(ld a, ld b, ld c, const Hierarchy& h)
{
    if (std::max({std::fabs(a), std::fabs(b), std::fabs(c)}) <= h.imethod.cutoff())
        return 0;
    const ld m3 = ld(2) / 3 * (m2xi(a, h.imethod) + m2xi(b, h.imethod) + m2xi(c, h.imethod));
    const ld al = phi_ld(a, h.phys) + phi_ld(b, h.phys) + phi_ld(c, h.phys);
    return -m3 / al;
}

ld m4_ld(const std::array<ld, 4>& x, const Hierarchy& h)
{
    std::array<int, 4> idx{0, 1, 2, 3};
    ld acc = 0;
    int count = 0;
    do {
        const ld merged = x[idx[2]] + x[idx[3]];
        acc += sigma3_ld(x[idx[0]], x[idx[1]], merged, h) * merged;
        ++count;
    } while (std::next_permutation(idx.begin(), idx.end()));
    return -3 * acc / count;
}

// Sum of the magnitudes entering m4_ld; the rounding scale of M4.
ld m4_scale(const std::array<ld, 4>& x, const Hierarchy& h)
{
    std::array<int, 4> idx{0, 1, 2, 3};
    ld acc = 0;
    int count = 0;
    do {
        const ld merged = x[idx[2]] + x[idx[3]];
        acc += std::fabs(sigma3_ld(x[idx[0]], x[idx[1]], merged, h) * merged);
        ++count;
    } while (std::next_permutation(idx.begin(), idx.end()));
    return 3 * acc / count;
}

ld sigma4_ld(const std::array<ld, 4>& x, const Hierarchy& h)
{
    for (ld v : x)
        if (std::fabs(v) < h.imethod.cutoff())
            return 0;
    ld al = 0;
    for (ld v : x)
        al += phi_ld(v, h.phys);
    return -m4_ld(x, h) / al;
}

ld m5_ld(const std::array<ld, 5>& x, const Hierarchy& h)
{
    std::array<int, 5> idx{0, 1, 2, 3, 4};
    ld acc = 0;
    int count = 0;
    do {
        const ld merged = x[idx[3]] + x[idx[4]];
        acc += sigma4_ld({x[idx[0]], x[idx[1]], x[idx[2]], merged}, h) * merged;
        ++count;
    } while (std::next_permutation(idx.begin(), idx.end()));
    return -4 * acc / count;
}

Hierarchy hier(double nu, double mu, double n, double s) { return {PhysParams(nu, mu), IParams(n, s), std::nullopt}; }

std::array<double, 4> random_quad(std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> mag(lo, hi);
    std::bernoulli_distribution sign;
    std::array<double, 4> x{};
    for (int j = 0; j < 3; ++j)
        x[static_cast<std::size_t>(j)] = (sign(rng) ? 1 : -1) * mag(rng);
    x[3] = -(x[0] + x[1] + x[2]);
    return x;
}

// Quadruple with every |xi_j| >= n.
std::array<double, 4> omega_quad(std::mt19937_64& rng, double n)
{
    for (;;) {
        auto x = random_quad(rng, n, 6 * n);
        if (std::abs(x[3]) >= n)
            return x;
    }
}

} // namespace

TEST_CASE("frequency tuples live on the hyperplane")
{
    CHECK_THROWS_AS(FreqTuple({1.0, 2.0, 3.0}), std::invalid_argument);
    CHECK_THROWS_AS(FreqTuple({1.0}), std::invalid_argument);
    CHECK_THROWS_AS(FreqTuple({1.0, 1.0, 1.0, 1.0, 1.0, -5.0}), std::invalid_argument);
    CHECK_NOTHROW(FreqTuple({1.0, 2.0, -3.0}));
}

TEST_CASE("resonance function")
{
    CHECK(alpha({3.5, -3.5}, PhysParams(1, 1)) == 0.0);
    CHECK(alpha({1, 1, -2}, PhysParams(0, 1)) == doctest::Approx(-6.0));
    CHECK(alpha({25, -22, -3}, PhysParams(0, 1)) == doctest::Approx(4950.0));
}

TEST_CASE("cubic factorisation on integer quadruples is exact")
{
    // sum xi^3 = 3 (xi1 + xi2)(xi1 + xi3)(xi1 + xi4) on the hyperplane.
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> d(-1000, 1000);
    const PhysParams kdv(0, 1);
    for (int i = 0; i < 100000; ++i) {
        const double a = d(rng), b = d(rng), c = d(rng);
        const double e = -(a + b + c);
        CHECK(alpha({a, b, c, e}, kdv) == 3.0 * (a + b) * (a + c) * (a + e));
    }
}

TEST_CASE("M3 and sigma3 at (25, -22, -3)")
{
    const Hierarchy h = hier(0, 1, 10, -0.5);
    const cplx m3 = M3({25, -22, -3}, h);
    // m^2(25) 25 = m^2(22) 22 = 10 and m(3) = 1, so sum m^2 xi = -3.
    CHECK(m3.real() == 0.0);
    CHECK(m3.imag() == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(sigma3({25, -22, -3}, h) == doctest::Approx(2.0 / 4950.0).epsilon(1e-14));
    CHECK(sigma3({-3, 25, -22}, h) == sigma3({25, -22, -3}, h));
    CHECK(sigma3({-22, -3, 25}, h) == sigma3({25, -22, -3}, h));
}

TEST_CASE("M3 vanishes below the cutoff and on cancelling pairs")
{
    const Hierarchy h = hier(1, 1, 16, -0.5);
    CHECK(std::abs(M3({3, 13, -16}, h)) == 0.0);
    CHECK(std::abs(M3({40, -40, 0}, h)) == 0.0);
    CHECK(sigma3({3, 13, -16}, h) == 0.0);
}

TEST_CASE("symmetrize")
{
    const TupleFunction first = [](std::span<const double> x) { return cplx(x[0]); };
    const std::array<double, 2> pair{2.5, -2.5};
    CHECK(std::abs(symmetrize(first, 2)(pair)) == 0.0);

    const TupleFunction sym = [](std::span<const double> x) { return cplx(x[0] * x[1] * x[2] * x[3]); };
    const std::array<double, 4> q{1.5, -2.0, 3.0, -2.5};
    CHECK(std::abs(symmetrize(sym, 4)(q) - sym(q)) < 1e-14);

    const TupleFunction table = [](std::span<const double> x) {
        return cplx(std::sin(x[0] + 2 * x[1] + 3 * x[2] + 5 * x[3]), std::cos(7 * x[0] - x[3]));
    };
    const auto once = symmetrize(table, 4);
    const auto twice = symmetrize(once, 4);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        const auto x = random_quad(rng, 0.1, 5);
        CHECK(std::abs(once(x) - twice(x)) < 1e-14);
    }
}

TEST_CASE("M4 agrees with the long-double permutation oracle")
{
    const Hierarchy h = hier(1, 1, 8, -0.5);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 2000; ++i) {
        const auto x = random_quad(rng, 0.5, 60);
        const cplx m4 = M4(FreqTuple(x), h);
        const ld ref = m4_ld({x[0], x[1], x[2], x[3]}, h);
        const double scale = double(m4_scale({x[0], x[1], x[2], x[3]}, h));
        CHECK(std::abs(m4.real()) <= 1e-13 * scale);
        CHECK(std::abs(m4.imag() - double(ref)) <= 1e-12 * scale);
    }
}

TEST_CASE("M4 properties")
{
    const Hierarchy h = hier(1, 1, 16, -0.5);
    CHECK(std::abs(M4({3, 5, -8, 0}, h)) == 0.0);
    CHECK(std::abs(M4({8, -1, -7, 0}, h)) == 0.0);

    std::mt19937_64 rng(6);
    for (int i = 0; i < 200; ++i) {
        auto x = random_quad(rng, 1, 80);
        const cplx ref = M4(FreqTuple(x), h);
        const double scale = double(m4_scale({x[0], x[1], x[2], x[3]}, h));
        std::sort(x.begin(), x.end());
        do {
            CHECK(std::abs(M4(FreqTuple(x), h) - ref) <= 1e-13 * scale);
        } while (std::next_permutation(x.begin(), x.end()));
    }

    // alpha4 vanishes on (xi, -xi, eta, -eta); so does M4 up to rounding.
    for (int i = 0; i < 200; ++i) {
        std::uniform_real_distribution<double> d(16, 200);
        const double a = d(rng), b = d(rng);
        const FreqTuple t{a, -a, b, -b};
        CHECK(std::abs(M4(t, h)) <= 1e-12 * (1 + 2 * a + 2 * b));
    }
}

TEST_CASE("split_M4")
{
    const Hierarchy h = hier(1, 1, 10, -0.5);
    const auto [hi_bar, hi_tilde] = split_M4({12, -15, 20, -17}, h);
    CHECK(hi_bar == cplx{});
    CHECK(hi_tilde == M4({12, -15, 20, -17}, h));
    const auto [lo_bar, lo_tilde] = split_M4({9, -15, 20, -14}, h);
    CHECK(lo_tilde == cplx{});
    CHECK(lo_bar == M4({9, -15, 20, -14}, h));

    std::mt19937_64 rng(7);
    for (int i = 0; i < 10000; ++i) {
        const FreqTuple t(random_quad(rng, 1, 50));
        const auto [bar, tilde] = split_M4(t, h);
        CHECK(bar + tilde == M4(t, h));
    }
}

TEST_CASE("sigma4")
{
    const Hierarchy h = hier(1, 1, 10, -0.5);
    CHECK(sigma4({5, -15, 20, -10}, h) == 0.0);

    MultiplierStats stats;
    CHECK(sigma4({12, -12, 31, -31}, h, &stats) == 0.0);
    CHECK(stats.resonant_sigma4 == 1);

    std::mt19937_64 rng(8);
    for (int i = 0; i < 2000; ++i) {
        const auto x = omega_quad(rng, 10);
        const double s4 = sigma4(FreqTuple(x), h);
        const ld ref = sigma4_ld({x[0], x[1], x[2], x[3]}, h);
        CHECK(std::abs(s4 - double(ref)) <= 1e-11 * std::fabs(double(ref)) + 1e-300);
    }
}

TEST_CASE("M5 agrees with the oracle, is symmetric and lives on Omega5")
{
    const Hierarchy h = hier(1, 1, 8, -0.5);
    CHECK(std::abs(M5({1, 2, 3, -4, -2}, h)) == 0.0);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> mag(8, 40);
    std::bernoulli_distribution sign;
    auto draw = [&] {
        std::array<double, 5> x{};
        for (int j = 0; j < 4; ++j)
            x[static_cast<std::size_t>(j)] = (sign(rng) ? 1 : -1) * mag(rng);
        x[4] = -(x[0] + x[1] + x[2] + x[3]);
        return x;
    };

    for (int i = 0; i < 20; ++i) {
        auto x = draw();
        const cplx ref = M5(FreqTuple(x), h);
        const ld oracle = m5_ld({x[0], x[1], x[2], x[3], x[4]}, h);
        CHECK(std::abs(ref.real()) <= 1e-13 * std::abs(ref));
        CHECK(std::abs(ref.imag() - double(oracle)) <= 1e-11 * std::fabs(double(oracle)) + 1e-300);
        std::sort(x.begin(), x.end());
        do {
            CHECK(std::abs(M5(FreqTuple(x), h) - ref) <= 1e-12 * std::abs(ref) + 1e-300);
        } while (std::next_permutation(x.begin(), x.end()));
    }

    std::mt19937_64 wide(10);
    std::uniform_int_distribution<int> d(-32, 32);
    int nonzero = 0;
    for (int i = 0; i < 10000; ++i) {
        std::array<double, 5> x{};
        for (int j = 0; j < 4; ++j)
            x[static_cast<std::size_t>(j)] = d(wide);
        x[4] = -(x[0] + x[1] + x[2] + x[3]);
        if (std::abs(M5(FreqTuple(x), h)) == 0.0)
            continue;
        ++nonzero;
        CHECK(omega5_min_product(x, 8).has_value());
    }
    CHECK(nonzero > 100);
}

TEST_CASE("telescoping identity")
{
    CHECK(check_telescope({1, 2, 3, -6}, PhysParams(1, 1)) <= 1e-12);
    CHECK(check_telescope({4.5, -4.5, 2, -2}, PhysParams(1, 1)) == 0.0);
    std::mt19937_64 rng(11);
    const PhysParams p(0.8, -1.1);
    for (int i = 0; i < 100000; ++i) {
        const auto x = random_quad(rng, 0.01, 1000);
        // Rounding scale: every phase value entering either side.
        double scale = 1.0 + 2.0 * std::abs(phase(x[0] + x[1], p));
        for (double v : x)
            scale += std::abs(phase(v, p));
        CHECK(check_telescope(FreqTuple(x), p) <= 1e-12 * scale);
    }
}

TEST_CASE("bilinear I^s operator")
{
    const Grid g(2 * kPi, 16);
    const PhysParams p(1, 1);
    const SpectralField u = oracle::gaussian_field(g, g.kmax(), 12);
    const SpectralField v = oracle::gaussian_field(g, g.kmax(), 13);
    CHECK(max_abs_diff(Is_bilinear(u, v, 0.0, p), dealiased_product(u, v)) < 1e-14);

    SpectralField a(g), b(g);
    a.set_mode(1, cplx(0.5, 0.25));
    b.set_mode(3, cplx(-1.0, 2.0));
    const SpectralField ab = Is_bilinear(a, b, 0.5, p);
    const double kernel = std::sqrt(std::abs(phase_derivative(1, p) - phase_derivative(3, p)));
    CHECK(std::abs(ab.at(4) - kernel * a.at(1) * b.at(3) / std::sqrt(g.box_length())) < 1e-14);

    // Brute-force kernel convolution.
    const SpectralField out = Is_bilinear(u, v, 0.3, p);
    const int kd = g.dealias_kmax();
    double err = 0.0;
    for (int k = -kd; k <= kd; ++k) {
        cplx s{};
        for (int k1 = -kd; k1 <= kd; ++k1) {
            const int k2 = k - k1;
            if (std::abs(k2) > kd)
                continue;
            const double w =
                std::pow(std::abs(phase_derivative(g.frequency(k1), p) - phase_derivative(g.frequency(k2), p)), 0.3);
            s += w * u.at(k1) * v.at(k2);
        }
        err = std::max(err, std::abs(out.at(k) - s / std::sqrt(g.box_length())));
    }
    CHECK(err <= 1e-12);
}

TEST_CASE("bound scans on fixed tuples")
{
    const Hierarchy h = hier(0, 1, 10, -0.5);
    auto fixed = [](FreqTuple t) { return TupleSampler([t](std::mt19937_64&) { return t; }); };
    CHECK(scan_bound(Lemma::M3Bound, fixed({25, -22, -3}), 1, 1, h).max_ratio ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    const BoundReport r = scan_bound(Lemma::Alpha4Size, fixed({1, 2, 3, -6}), 1, 1, h);
    CHECK(r.max_ratio == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(r.min_ratio == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("lemma identifiers round-trip")
{
    for (Lemma l : {Lemma::M3Bound, Lemma::Alpha3Lower, Lemma::Alpha4Size, Lemma::QuarticSum, Lemma::M4MaxBound,
                    Lemma::M4AlphaBound, Lemma::M5Bound})
        CHECK(parse_lemma(lemma_id(l)) == l);
    CHECK_THROWS_AS(parse_lemma("bogus"), std::invalid_argument);
}

TEST_CASE("alpha3 lower bound over random triples")
{
    const Hierarchy h = hier(1, 1, 16, -0.5);
    const BoundReport r = scan_bound(Lemma::Alpha3Lower, 100000, 21, h);
    CHECK(r.samples + r.violations == 100000);
    CHECK(r.min_ratio > 0.0);
    CHECK(std::isfinite(r.max_ratio));
}

TEST_CASE("bound scans are deterministic and independent of the thread count")
{
    const Hierarchy h = hier(1, 1, 32, -0.5);
    for (Lemma l : {Lemma::M4AlphaBound, Lemma::M5Bound}) {
        set_thread_count(1);
        const BoundReport a = scan_bound(l, 3000, 99, h);
        const BoundReport b = scan_bound(l, 3000, 99, h);
        set_thread_count(4);
        const BoundReport c = scan_bound(l, 3000, 99, h);
        set_thread_count(1);
        for (const BoundReport* r : {&b, &c}) {
            CHECK(r->max_ratio == a.max_ratio);
            CHECK(r->min_ratio == a.min_ratio);
            CHECK(r->samples == a.samples);
            CHECK(r->violations == a.violations);
        }
    }
}

TEST_CASE("resonance guard raises no hard errors on Omega")
{
    const Hierarchy h = hier(1, 1, 16, -0.5);
    MultiplierStats stats;
    CHECK_NOTHROW(scan_sigma4_guard(20000, 4, h, stats));
    CHECK(stats.resonant_sigma4 > 0);
}
