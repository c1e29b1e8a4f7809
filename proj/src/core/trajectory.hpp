#pragma once

#include "core/imethod.hpp"
#include "core/spectral.hpp"

#include <optional>
#include <vector>

namespace benjamin {

struct ConservedSample {
    double t;
    double mean;
    double l2;
};

/// Uniformly sampled solution u(t_j), t_j = t_0 + j * sample_dt.
struct Trajectory {
    Trajectory(const Grid& g, const PhysParams& p, double step) : grid(g), phys(p), dt(step), sample_dt(step) {}

    Grid grid;
    PhysParams phys;
    std::optional<IParams> imethod;
    double dt;
    double sample_dt;
    std::vector<double> times;
    std::vector<SpectralField> fields;
    std::vector<ConservedSample> conserved;

    void record(double t, const SpectralField& u)
    {
        times.push_back(t);
        fields.push_back(u);
        conserved.push_back({t, u.at(0).real(), u.l2_norm()});
    }
    std::size_t size() const { return fields.size(); }
};

} // namespace benjamin
