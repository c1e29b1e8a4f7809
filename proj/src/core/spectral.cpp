#include "core/spectral.hpp"

#include "core/fft.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace benjamin {

Grid::Grid(double box_length, int modes) : length_(box_length), modes_(modes)
{
    if (!(box_length > 0.0) || !std::isfinite(box_length))
        throw std::invalid_argument("grid: box length must be positive and finite");
    if (modes < 8 || modes % 2 != 0)
        throw std::invalid_argument("grid: mode count must be an even integer >= 8, got " +
                                    std::to_string(modes));
}

PhysParams::PhysParams(double nu, double mu) : nu_(nu), mu_(mu)
{
    if (mu == 0.0 || !std::isfinite(mu) || !std::isfinite(nu))
        throw std::invalid_argument("physics: mu must be finite and nonzero");
}

double PhysParams::a() const { return 2.0 * std::max(1.0, std::abs(2.0 * nu_ / (3.0 * mu_))); }

SpectralField::SpectralField(const Grid& grid)
    : grid_(grid), coeffs_(static_cast<std::size_t>(grid.modes()), cplx{})
{
}

SpectralField::SpectralField(const Grid& grid, std::vector<cplx> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs))
{
    if (coeffs_.size() != static_cast<std::size_t>(grid.modes()))
        throw std::invalid_argument("spectral field: coefficient count does not match grid");
    coeffs_[grid_.index(grid_.modes() / 2)] = 0.0;
}

void SpectralField::set_mode(int k, cplx value)
{
    if (std::abs(k) > grid_.kmax())
        throw std::out_of_range("spectral field: wavenumber outside the grid");
    if (k == 0) {
        coeffs_[0] = value.real();
        return;
    }
    coeffs_[grid_.index(k)] = value;
    coeffs_[grid_.index(-k)] = std::conj(value);
}

bool SpectralField::is_real_symmetric(double tol) const
{
    if (std::abs(at(grid_.modes() / 2)) > 0.0)
        return false;
    for (int k = 0; k <= grid_.kmax(); ++k)
        if (std::abs(at(k) - std::conj(at(-k))) > tol)
            return false;
    return true;
}

void SpectralField::truncate(int kcut)
{
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        if (std::abs(grid_.wavenumber(i)) > kcut)
            coeffs_[i] = 0.0;
}

double SpectralField::l2_norm_squared() const
{
    double s = 0.0;
    for (const auto& c : coeffs_)
        s += std::norm(c);
    return s;
}

double SpectralField::l2_norm() const { return std::sqrt(l2_norm_squared()); }

SpectralField& SpectralField::operator+=(const SpectralField& o)
{
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        coeffs_[i] += o.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o)
{
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        coeffs_[i] -= o.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double s)
{
    for (auto& c : coeffs_)
        c *= s;
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

double max_abs_diff(const SpectralField& a, const SpectralField& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.coeffs().size(); ++i)
        d = std::max(d, std::abs(a.coeffs()[i] - b.coeffs()[i]));
    return d;
}

double phase(double xi, const PhysParams& p)
{
    return -p.nu() * xi * std::abs(xi) + p.mu() * xi * xi * xi;
}

double phase_derivative(double xi, const PhysParams& p)
{
    return -2.0 * p.nu() * std::abs(xi) + 3.0 * p.mu() * xi * xi;
}

namespace {

template <class Symbol>
SpectralField apply_symbol(const SpectralField& u, Symbol&& symbol)
{
    SpectralField out(u.grid());
    const Grid& g = u.grid();
    auto src = u.coeffs();
    auto dst = out.coeffs();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const int k = g.wavenumber(i);
        if (std::abs(k) > g.kmax())
            continue;
        dst[i] = symbol(g.frequency(k)) * src[i];
    }
    return out;
}

// Restores exact conjugate symmetry after a transform round trip.
void symmetrize_reality(SpectralField& u)
{
    const Grid& g = u.grid();
    auto c = u.coeffs();
    c[0] = c[0].real();
    for (int k = 1; k <= g.kmax(); ++k) {
        const cplx avg = 0.5 * (c[g.index(k)] + std::conj(c[g.index(-k)]));
        c[g.index(k)] = avg;
        c[g.index(-k)] = std::conj(avg);
    }
    c[g.index(g.modes() / 2)] = 0.0;
}

std::vector<cplx> physical_complex(const SpectralField& u)
{
    std::vector<cplx> buf(u.coeffs().begin(), u.coeffs().end());
    fft::backward(buf);
    const double scale = 1.0 / std::sqrt(u.grid().box_length());
    for (auto& v : buf)
        v *= scale;
    return buf;
}

SpectralField spectral_from_complex(const Grid& grid, std::vector<cplx> buf)
{
    fft::forward(buf);
    const double scale = std::sqrt(grid.box_length()) / grid.modes();
    for (auto& v : buf)
        v *= scale;
    SpectralField out(grid, std::move(buf));
    symmetrize_reality(out);
    return out;
}

} // namespace

SpectralField hilbert(const SpectralField& u)
{
    return apply_symbol(u, [](double xi) {
        const double sgn = xi > 0.0 ? 1.0 : (xi < 0.0 ? -1.0 : 0.0);
        return cplx{0.0, -sgn};
    });
}

SpectralField derivative(const SpectralField& u, int order)
{
    if (order < 1)
        throw std::invalid_argument("derivative: order must be positive");
    return apply_symbol(u, [order](double xi) {
        cplx s{1.0, 0.0};
        for (int j = 0; j < order; ++j)
            s *= cplx{0.0, xi};
        return s;
    });
}

SpectralField linear_propagator(const SpectralField& u, double t, const PhysParams& p)
{
    return apply_symbol(u, [&](double xi) { return std::polar(1.0, t * phase(xi, p)); });
}

std::vector<double> to_physical(const SpectralField& u)
{
    auto buf = physical_complex(u);
    std::vector<double> out(buf.size());
    std::transform(buf.begin(), buf.end(), out.begin(), [](const cplx& c) { return c.real(); });
    return out;
}

SpectralField from_physical(const Grid& grid, std::span<const double> values)
{
    if (values.size() != static_cast<std::size_t>(grid.modes()))
        throw std::invalid_argument("from_physical: sample count does not match grid");
    return spectral_from_complex(grid, std::vector<cplx>(values.begin(), values.end()));
}

SpectralField dealiased_product(const SpectralField& u, const SpectralField& v)
{
    if (!(u.grid() == v.grid()))
        throw std::invalid_argument("dealiased_product: grid mismatch");
    const Grid& g = u.grid();
    const int kd = g.dealias_kmax();
    SpectralField uu = u;
    SpectralField vv = v;
    uu.truncate(kd);
    vv.truncate(kd);
    auto pu = physical_complex(uu);
    auto pv = physical_complex(vv);
    for (std::size_t i = 0; i < pu.size(); ++i)
        pu[i] = pu[i].real() * pv[i].real();
    auto out = spectral_from_complex(g, std::move(pu));
    out.truncate(kd);
    return out;
}

SpectralField dealiased_square(const SpectralField& u) { return dealiased_product(u, u); }

} // namespace benjamin
