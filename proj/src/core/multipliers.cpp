#include "core/multipliers.hpp"

#include "core/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace benjamin {
namespace {

constexpr std::array<std::array<int, 2>, 6> kPairs4{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
constexpr std::array<std::array<int, 2>, 10> kPairs5{
    {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}};

double energy_density(double xi, const IParams& ip)
{
    const double m = m_multiplier(xi, ip);
    return m * m * xi;
}

double resonance_sum(std::span<const double> xi, const PhysParams& p)
{
    double s = 0.0;
    for (double x : xi)
        s += phase(x, p);
    return s;
}

bool within_band(double x, const Hierarchy& h)
{
    return !h.band || std::abs(x) <= *h.band * (1.0 + 1e-12);
}

double max_abs(std::span<const double> xi)
{
    double m = 0.0;
    for (double x : xi)
        m = std::max(m, std::abs(x));
    return m;
}

double m3_coefficient(const double* x, const Hierarchy& h)
{
    if (max_abs({x, 3}) <= h.imethod.cutoff())
        return 0.0;
    return kM3Coefficient *
           (energy_density(x[0], h.imethod) + energy_density(x[1], h.imethod) + energy_density(x[2], h.imethod));
}

double sigma3_raw(const double* x, const Hierarchy& h, MultiplierStats* stats)
{
    const double m3 = m3_coefficient(x, h);
    if (m3 == 0.0)
        return 0.0;
    const double a = resonance_sum({x, 3}, h.phys);
    if (std::abs(a) <= resonance_guard({x, 3})) {
        if (stats)
            ++stats->degenerate_sigma3;
        return 0.0;
    }
    return -m3 / a;
}

struct QuarticValue {
    double coefficient; // M4 = i * coefficient
    double scale;       // magnitude of the largest contribution, for rounding tests
};

QuarticValue m4_raw(const double* x, const Hierarchy& h, MultiplierStats* stats)
{
    double acc = 0.0;
    double scale = 0.0;
    for (const auto& [p, q] : kPairs4) {
        const double merged = x[p] + x[q];
        if (!within_band(merged, h))
            continue;
        std::array<double, 3> triple{};
        int j = 0;
        for (int r = 0; r < 4; ++r)
            if (r != p && r != q)
                triple[static_cast<std::size_t>(j++)] = x[r];
        triple[2] = merged;
        const double term = sigma3_raw(triple.data(), h, stats) * merged;
        acc += term;
        scale = std::max(scale, std::abs(term));
    }
    const double c = kM4Coefficient / static_cast<double>(kPairs4.size());
    return {c * acc, std::abs(c) * scale};
}

double sigma4_raw(const double* x, const Hierarchy& h, MultiplierStats* stats)
{
    if (!in_omega({x, 4}, h.imethod.cutoff()))
        return 0.0;
    const auto m4 = m4_raw(x, h, stats);
    const double a = resonance_sum({x, 4}, h.phys);
    if (std::abs(a) <= resonance_guard({x, 4})) {
        if (std::abs(m4.coefficient) > 1e-10 * m4.scale)
            throw ResonanceError("sigma4: alpha4 vanishes on Omega but M4 does not");
        if (stats)
            ++stats->resonant_sigma4;
        return 0.0;
    }
    return -m4.coefficient / a;
}

double m5_raw(const double* x, const Hierarchy& h, MultiplierStats* stats)
{
    double acc = 0.0;
    for (const auto& [p, q] : kPairs5) {
        const double merged = x[p] + x[q];
        if (!within_band(merged, h))
            continue;
        std::array<double, 4> quad{};
        int j = 0;
        for (int r = 0; r < 5; ++r)
            if (r != p && r != q)
                quad[static_cast<std::size_t>(j++)] = x[r];
        quad[3] = merged;
        acc += sigma4_raw(quad.data(), h, stats) * merged;
    }
    return kM5Coefficient / static_cast<double>(kPairs5.size()) * acc;
}

void require_arity(const FreqTuple& t, int k, const char* who)
{
    if (t.arity() != k)
        throw std::invalid_argument(std::string(who) + ": expected a tuple of arity " + std::to_string(k));
}

double log_uniform(std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
    return std::exp(d(rng));
}

double signed_log_uniform(std::mt19937_64& rng, double lo, double hi)
{
    const double v = log_uniform(rng, lo, hi);
    return (rng() & 1U) ? v : -v;
}

} // namespace

FreqTuple::FreqTuple(std::initializer_list<double> xi) : FreqTuple(std::span<const double>(xi.begin(), xi.size()))
{
}

FreqTuple::FreqTuple(std::span<const double> xi)
{
    if (xi.size() < 2 || xi.size() > 5)
        throw std::invalid_argument("frequency tuple: arity must be between 2 and 5");
    arity_ = static_cast<int>(xi.size());
    double sum = 0.0;
    double mag = 0.0;
    for (std::size_t j = 0; j < xi.size(); ++j) {
        xi_[j] = xi[j];
        sum += xi[j];
        mag += std::abs(xi[j]);
    }
    if (std::abs(sum) > 1e-10 * (1.0 + mag))
        throw std::invalid_argument("frequency tuple: entries do not sum to zero");
}

double resonance_guard(std::span<const double> xi)
{
    double s = 1.0;
    for (double x : xi)
        s += std::abs(x);
    return 1e-12 * s * s * s;
}

bool in_omega(std::span<const double> xi, double cutoff)
{
    return std::all_of(xi.begin(), xi.end(), [cutoff](double x) { return std::abs(x) >= cutoff; });
}

std::optional<double> omega5_min_product(std::span<const double> xi, double cutoff)
{
    if (xi.size() != 5)
        throw std::invalid_argument("omega5: expected five frequencies");
    std::optional<double> best;
    for (const auto& [p, q] : kPairs5) {
        if (std::abs(xi[static_cast<std::size_t>(p)] + xi[static_cast<std::size_t>(q)]) < cutoff)
            continue;
        double prod = 1.0;
        bool ok = true;
        for (int r = 0; r < 5; ++r) {
            if (r == p || r == q)
                continue;
            const double a = std::abs(xi[static_cast<std::size_t>(r)]);
            ok = ok && a >= cutoff;
            prod *= a;
        }
        if (ok && (!best || prod < *best))
            best = prod;
    }
    return best;
}

double alpha(const FreqTuple& t, const PhysParams& p) { return resonance_sum(t.values(), p); }

cplx M3(const FreqTuple& t, const Hierarchy& h)
{
    require_arity(t, 3, "M3");
    return {0.0, m3_coefficient(t.values().data(), h)};
}

double sigma3(const FreqTuple& t, const Hierarchy& h, MultiplierStats* stats)
{
    require_arity(t, 3, "sigma3");
    return sigma3_raw(t.values().data(), h, stats);
}

cplx M4(const FreqTuple& t, const Hierarchy& h, MultiplierStats* stats)
{
    require_arity(t, 4, "M4");
    return {0.0, m4_raw(t.values().data(), h, stats).coefficient};
}

std::pair<cplx, cplx> split_M4(const FreqTuple& t, const Hierarchy& h, MultiplierStats* stats)
{
    const cplx m4 = M4(t, h, stats);
    if (in_omega(t.values(), h.imethod.cutoff()))
        return {cplx{}, m4};
    return {m4, cplx{}};
}

double sigma4(const FreqTuple& t, const Hierarchy& h, MultiplierStats* stats)
{
    require_arity(t, 4, "sigma4");
    return sigma4_raw(t.values().data(), h, stats);
}

cplx M5(const FreqTuple& t, const Hierarchy& h, MultiplierStats* stats)
{
    require_arity(t, 5, "M5");
    return {0.0, m5_raw(t.values().data(), h, stats)};
}

double check_telescope(const FreqTuple& t, const PhysParams& p)
{
    require_arity(t, 4, "telescope");
    const std::array<double, 3> left{t[0], t[1], t[2] + t[3]};
    const std::array<double, 3> right{t[2], t[3], t[0] + t[1]};
    return std::abs(resonance_sum(left, p) + resonance_sum(right, p) - resonance_sum(t.values(), p));
}

TupleFunction symmetrize(TupleFunction f, int arity)
{
    if (arity < 1 || arity > 5)
        throw std::invalid_argument("symmetrize: arity must be between 1 and 5");
    return [f = std::move(f), arity](std::span<const double> xi) {
        std::array<int, 5> perm{};
        std::iota(perm.begin(), perm.begin() + arity, 0);
        std::array<double, 5> buf{};
        cplx acc{};
        std::size_t count = 0;
        do {
            for (int j = 0; j < arity; ++j)
                buf[static_cast<std::size_t>(j)] = xi[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])];
            acc += f(std::span<const double>(buf.data(), static_cast<std::size_t>(arity)));
            ++count;
        } while (std::next_permutation(perm.begin(), perm.begin() + arity));
        return acc / static_cast<double>(count);
    };
}

SpectralField Is_bilinear(const SpectralField& u, const SpectralField& v, double s_exp, const PhysParams& p,
                          IsKernel kernel)
{
    if (!(u.grid() == v.grid()))
        throw std::invalid_argument("Is_bilinear: grid mismatch");
    const Grid& g = u.grid();
    const int kd = g.dealias_kmax();
    const double norm = 1.0 / std::sqrt(g.box_length());
    SpectralField out(g);
    auto c = out.coeffs();
    for (int k1 = -kd; k1 <= kd; ++k1) {
        const cplx a = u.at(k1);
        if (a == cplx{})
            continue;
        for (int k2 = -kd; k2 <= kd; ++k2) {
            const int k = k1 + k2;
            if (std::abs(k) > kd)
                continue;
            const double first = kernel == IsKernel::Inputs ? g.frequency(k1) : g.frequency(k);
            const double w = std::pow(
                std::abs(phase_derivative(first, p) - phase_derivative(g.frequency(k2), p)), s_exp);
            c[g.index(k)] += norm * w * a * v.at(k2);
        }
    }
    return out;
}

std::string lemma_id(Lemma l)
{
    switch (l) {
    case Lemma::M3Bound: return "m3-bound";
    case Lemma::Alpha3Lower: return "alpha3-lower";
    case Lemma::Alpha4Size: return "alpha4-size";
    case Lemma::QuarticSum: return "quartic-sum";
    case Lemma::M4MaxBound: return "m4-max";
    case Lemma::M4AlphaBound: return "m4-alpha";
    case Lemma::M5Bound: return "m5-bound";
    }
    return "?";
}

Lemma parse_lemma(const std::string& id)
{
    for (Lemma l : {Lemma::M3Bound, Lemma::Alpha3Lower, Lemma::Alpha4Size, Lemma::QuarticSum, Lemma::M4MaxBound,
                    Lemma::M4AlphaBound, Lemma::M5Bound})
        if (lemma_id(l) == id)
            return l;
    throw std::invalid_argument("unknown lemma id '" + id + "'");
}

int lemma_arity(Lemma l)
{
    switch (l) {
    case Lemma::M3Bound:
    case Lemma::Alpha3Lower: return 3;
    case Lemma::M5Bound: return 5;
    default: return 4;
    }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index)
{
    // splitmix64 finalizer over the combined key
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

TupleSampler default_sampler(Lemma l, const Hierarchy& h)
{
    const double n = h.imethod.cutoff();
    const double a = h.phys.a();
    const double top = 16.0 * n;
    switch (l) {
    case Lemma::M3Bound:
    case Lemma::Alpha3Lower:
        return [top](std::mt19937_64& rng) {
            const double x = signed_log_uniform(rng, 0.5, top);
            const double y = signed_log_uniform(rng, 0.5, top);
            return FreqTuple{x, y, -(x + y)};
        };
    case Lemma::QuarticSum:
        return [a, top](std::mt19937_64& rng) {
            for (int attempt = 0;; ++attempt) {
                const double x = signed_log_uniform(rng, a, top);
                const double y = signed_log_uniform(rng, a, top);
                const double z = signed_log_uniform(rng, a, top);
                const double w = -(x + y + z);
                if (std::abs(w) >= a || attempt >= 64)
                    return FreqTuple{x, y, z, w};
            }
        };
    case Lemma::Alpha4Size:
    case Lemma::M4MaxBound:
    case Lemma::M4AlphaBound:
        return [top](std::mt19937_64& rng) {
            const double x = signed_log_uniform(rng, 0.5, top);
            const double y = signed_log_uniform(rng, 0.5, top);
            const double z = signed_log_uniform(rng, 0.5, top);
            return FreqTuple{x, y, z, -(x + y + z)};
        };
    case Lemma::M5Bound:
        return [n, top](std::mt19937_64& rng) {
            std::array<double, 5> x{};
            for (int attempt = 0;; ++attempt) {
                x[0] = signed_log_uniform(rng, n, top);
                x[1] = signed_log_uniform(rng, n, top);
                x[2] = signed_log_uniform(rng, n, top);
                if (std::abs(x[0] + x[1] + x[2]) >= n || attempt >= 64)
                    break;
            }
            const double pair = -(x[0] + x[1] + x[2]);
            x[3] = signed_log_uniform(rng, 0.5, top);
            x[4] = pair - x[3];
            std::shuffle(x.begin(), x.end(), rng);
            return FreqTuple(std::span<const double>(x));
        };
    }
    throw std::invalid_argument("default_sampler: unknown lemma");
}

namespace {

struct SampleOutcome {
    std::optional<double> ratio;
    bool excluded = false;
};

SampleOutcome evaluate_ratio(Lemma l, const FreqTuple& t, const Hierarchy& h)
{
    const auto xi = t.values();
    const double a = h.phys.a();
    auto all_at_least = [&](double lo) {
        return std::all_of(xi.begin(), xi.end(), [lo](double x) { return std::abs(x) >= lo; });
    };
    switch (l) {
    case Lemma::M3Bound: {
        double lo = std::abs(xi[0]);
        for (double x : xi)
            lo = std::min(lo, std::abs(x));
        if (lo == 0.0)
            return {std::nullopt, true};
        const double m = m_multiplier(lo, h.imethod);
        return {std::abs(M3(t, h)) / (m * m * lo), false};
    }
    case Lemma::Alpha3Lower: {
        const double prod = std::abs(xi[0] * xi[1] * xi[2]);
        if (max_abs(xi) < a || prod == 0.0)
            return {std::nullopt, true};
        return {std::abs(alpha(t, h.phys)) / prod, false};
    }
    case Lemma::Alpha4Size: {
        const double prod = std::abs((xi[0] + xi[1]) * (xi[0] + xi[2]) * (xi[0] + xi[3]));
        if (max_abs(xi) < a || prod == 0.0)
            return {std::nullopt, true};
        return {std::abs(alpha(t, h.phys)) / prod, false};
    }
    case Lemma::QuarticSum: {
        const double al = std::abs(alpha(t, h.phys));
        if (!all_at_least(a) || al <= resonance_guard(xi))
            return {std::nullopt, true};
        double s = 0.0;
        for (double x : xi)
            s += energy_density(x, h.imethod);
        const double top = max_abs(xi);
        return {std::abs(s) * top * top / al, false};
    }
    case Lemma::M4MaxBound:
        return {std::abs(M4(t, h)) * max_abs(xi), false};
    case Lemma::M4AlphaBound: {
        const double al = std::abs(alpha(t, h.phys));
        double prod = 1.0;
        for (double x : xi)
            prod *= std::abs(x);
        if (al <= resonance_guard(xi) || prod == 0.0)
            return {std::nullopt, true};
        return {std::abs(M4(t, h)) * prod / al, false};
    }
    case Lemma::M5Bound: {
        const double v = std::abs(M5(t, h));
        if (v == 0.0)
            return {0.0, false};
        const auto prod = omega5_min_product(xi, h.imethod.cutoff());
        if (!prod)
            return {std::nullopt, true};
        return {v * *prod, false};
    }
    }
    return {std::nullopt, true};
}

} // namespace

BoundReport scan_bound(Lemma l, const TupleSampler& sampler, std::size_t samples, std::uint64_t seed,
                       const Hierarchy& h)
{
    std::vector<SampleOutcome> outcomes(samples);
    parallel_for(samples, [&](std::size_t i) {
        std::mt19937_64 rng(derive_seed(seed, i));
        const FreqTuple t = sampler(rng);
        if (t.arity() != lemma_arity(l)) {
            outcomes[i] = {std::nullopt, true};
            return;
        }
        outcomes[i] = evaluate_ratio(l, t, h);
    });
    BoundReport r;
    r.lemma = lemma_id(l);
    r.seed = seed;
    for (const auto& o : outcomes) {
        if (!o.ratio) {
            ++r.violations;
            continue;
        }
        const double v = *o.ratio;
        r.min_ratio = r.samples == 0 ? v : std::min(r.min_ratio, v);
        r.max_ratio = std::max(r.max_ratio, v);
        ++r.samples;
    }
    return r;
}

BoundReport scan_bound(Lemma l, std::size_t samples, std::uint64_t seed, const Hierarchy& h)
{
    return scan_bound(l, default_sampler(l, h), samples, seed, h);
}

std::size_t scan_sigma4_guard(std::size_t samples, std::uint64_t seed, const Hierarchy& h, MultiplierStats& stats)
{
    const double n = h.imethod.cutoff();
    const double top = 16.0 * n;
    std::vector<MultiplierStats> local(samples);
    parallel_for(samples, [&](std::size_t i) {
        std::mt19937_64 rng(derive_seed(seed, i));
        std::array<double, 4> x{};
        if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.3) {
            const double p = signed_log_uniform(rng, n, top);
            const double q = signed_log_uniform(rng, n, top);
            x = {p, -p, q, -q};
            std::shuffle(x.begin(), x.end(), rng);
        } else {
            for (int attempt = 0;; ++attempt) {
                x[0] = signed_log_uniform(rng, n, top);
                x[1] = signed_log_uniform(rng, n, top);
                x[2] = signed_log_uniform(rng, n, top);
                x[3] = -(x[0] + x[1] + x[2]);
                if (std::abs(x[3]) >= n || attempt >= 64)
                    break;
            }
        }
        sigma4(FreqTuple(std::span<const double>(x)), h, &local[i]);
    });
    for (const auto& s : local) {
        stats.degenerate_sigma3 += s.degenerate_sigma3;
        stats.resonant_sigma4 += s.resonant_sigma4;
    }
    return samples;
}

} // namespace benjamin
