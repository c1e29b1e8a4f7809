#pragma once

// Multiplier hierarchy of the modified energies.
//
// On the hyperplane Gamma_k = {xi_1 + ... + xi_k = 0} the resonance function
// alpha_k = i (phi(xi_1) + ... + phi(xi_k)) is stored as its real coefficient.
// Starting from d/dt |Iu|^2 = Lambda_3(M3), each correction sigma_k = -M_k/alpha_k
// cancels the linear part of the next derivative and produces M_{k+1}.
// M4 is split by the high-frequency set Omega = {min |xi_j| >= N} into
// M4bar (kept) and M4tilde (cancelled by sigma4).
//
// The prefactors below follow from differentiating
// Lambda_k(m) = L^{1-k/2} sum m prod u_hat along u_t = i phi u - i xi (u^2)^
// and are checked against finite differences of the energies in the tests.

#include "core/imethod.hpp"
#include "core/report.hpp"
#include "core/spectral.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace benjamin {

/// M3 = i * kM3Coefficient * sum_j m^2(xi_j) xi_j.
inline constexpr double kM3Coefficient = 2.0 / 3.0;
/// M4 = i * kM4Coefficient * [sigma3(xi1, xi2, xi3 + xi4) (xi3 + xi4)]_sym.
inline constexpr double kM4Coefficient = -3.0;
/// M5 = i * kM5Coefficient * [sigma4(xi1, xi2, xi3, xi4 + xi5) (xi4 + xi5)]_sym.
inline constexpr double kM5Coefficient = -4.0;

/// A point of Gamma_k, k in {2, ..., 5}.
class FreqTuple {
public:
    FreqTuple(std::initializer_list<double> xi);
    explicit FreqTuple(std::span<const double> xi);

    int arity() const { return arity_; }
    std::span<const double> values() const { return {xi_.data(), static_cast<std::size_t>(arity_)}; }
    double operator[](int j) const { return xi_[static_cast<std::size_t>(j)]; }

private:
    std::array<double, 5> xi_{};
    int arity_ = 0;
};

/// Parameters shared by every multiplier. A band limits the partial sums that
/// may appear inside a regrouped argument (xi3 + xi4 in M4, xi4 + xi5 in M5):
/// terms whose partial sum exceeds it are dropped, mirroring a Galerkin
/// truncation of the quadratic nonlinearity.
struct Hierarchy {
    PhysParams phys;
    IParams imethod;
    std::optional<double> band;
};

/// Counters for quotients that were not formed.
struct MultiplierStats {
    std::uint64_t degenerate_sigma3 = 0;
    std::uint64_t resonant_sigma4 = 0;
};

/// Raised when alpha4 vanishes on Omega while M4tilde does not.
class ResonanceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scale-aware zero test: |alpha| <= 1e-12 (1 + sum |xi_j|)^3.
double resonance_guard(std::span<const double> xi);
bool in_omega(std::span<const double> xi, double cutoff);
/// Omega_5 up to relabeling: three entries of modulus >= N whose complement
/// pair sums to modulus >= N. Returns the smallest product of the three moduli
/// over admissible labelings, or nullopt.
std::optional<double> omega5_min_product(std::span<const double> xi, double cutoff);

/// Real coefficient of alpha_k; throws for tuples off Gamma_k.
double alpha(const FreqTuple& t, const PhysParams& p);

cplx M3(const FreqTuple& t, const Hierarchy& h);
/// Real-valued; zero wherever M3 vanishes.
double sigma3(const FreqTuple& t, const Hierarchy& h, MultiplierStats* stats = nullptr);
cplx M4(const FreqTuple& t, const Hierarchy& h, MultiplierStats* stats = nullptr);
/// (M4bar, M4tilde) with M4bar + M4tilde == M4.
std::pair<cplx, cplx> split_M4(const FreqTuple& t, const Hierarchy& h, MultiplierStats* stats = nullptr);
/// -M4tilde / alpha4; zero off Omega and on the resonant set.
double sigma4(const FreqTuple& t, const Hierarchy& h, MultiplierStats* stats = nullptr);
cplx M5(const FreqTuple& t, const Hierarchy& h, MultiplierStats* stats = nullptr);

/// |alpha3(xi1, xi2, xi3 + xi4) + alpha3(xi3, xi4, xi1 + xi2) - alpha4|.
double check_telescope(const FreqTuple& t, const PhysParams& p);

using TupleFunction = std::function<cplx(std::span<const double>)>;

/// Mean over all k! permutations of the arguments.
TupleFunction symmetrize(TupleFunction f, int arity);

/// Kernel placement for the bilinear operator.
enum class IsKernel {
    /// |phi'(xi1) - phi'(xi2)|^s for inputs at xi1, xi2.
    Inputs,
    /// |phi'(xi) - phi'(xi2)|^s with xi = xi1 + xi2 the output frequency.
    OutputSecond,
};

/// Truncated convolution L^{-1/2} sum_{xi1+xi2=xi} K(xi1, xi2) u_hat(xi1) v_hat(xi2)
/// with the same retained set as dealiased_product.
SpectralField Is_bilinear(const SpectralField& u, const SpectralField& v, double s_exp,
                          const PhysParams& p, IsKernel kernel = IsKernel::Inputs);

enum class Lemma {
    M3Bound,        // |M3| <~ m^2(xi_min)|xi_min|
    Alpha3Lower,    // |alpha3| >~ |xi1 xi2 xi3| when max |xi_j| >= a
    Alpha4Size,     // |alpha4| ~ |xi1+xi2||xi1+xi3||xi1+xi4|
    QuarticSum,     // |sum m^2(xi_j) xi_j| <~ |alpha4| / |xi_max|^2
    M4MaxBound,     // |M4| <~ 1/|xi_max|
    M4AlphaBound,   // |M4| <~ |alpha4| / prod |xi_j|
    M5Bound,        // |M5| <~ chi_Omega5 / |xi1 xi2 xi3|
};

std::string lemma_id(Lemma l);
Lemma parse_lemma(const std::string& id);
int lemma_arity(Lemma l);

using TupleSampler = std::function<FreqTuple(std::mt19937_64&)>;

/// Default sampler for a lemma: log-uniform moduli up to 16 N with random
/// signs, conditioned towards the lemma's hypothesis region.
TupleSampler default_sampler(Lemma l, const Hierarchy& h);

/// Empirical constant of a pointwise bound. Sample i draws from an engine
/// seeded by (seed, i), so the report does not depend on evaluation order.
BoundReport scan_bound(Lemma l, const TupleSampler& sampler, std::size_t samples, std::uint64_t seed,
                       const Hierarchy& h);
BoundReport scan_bound(Lemma l, std::size_t samples, std::uint64_t seed, const Hierarchy& h);

/// Evaluates sigma4 on Omega samples, a share of them exactly resonant.
/// Returns the number of samples; throws ResonanceError on the first
/// contradiction. stats receives the resonance count.
std::size_t scan_sigma4_guard(std::size_t samples, std::uint64_t seed, const Hierarchy& h,
                              MultiplierStats& stats);

/// Per-sample engine seed derived from a run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

} // namespace benjamin
