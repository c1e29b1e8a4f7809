#pragma once

// Run configuration. JSON layout:
//
//   {
//     "experiment": "simulate",
//     "output": "out",
//     "seed": 1,
//     "physics":     {"nu": 1.0, "mu": 1.0},
//     "imethod":     {"N": 8.0, "s": -0.5},
//     "grid":        {"L": 6.283185307179586, "M": 128},
//     "integration": {"dt": 0.001, "T": 1.0, "stride": 100},
//     "initial":     {"type": "random", "amplitude": 1.0, "decay": 2.0},
//     "scan":        {"cutoffs": [4, 8, 16, 32, 64], "delta": 0.1, "samples": 100000}
//   }
//
// "initial" may instead be {"type": "modes", "modes": [{"k": 1, "amplitude": 1.0, "phase": 0.0}]}.
// physics.nu and physics.mu are required; everything else has a default.
// Unknown keys are rejected.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace benjamin {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message);
    /// Dotted key path ("physics.mu") or "line L, column C" for syntax errors.
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct ModeSpec {
    int k = 1;
    double amplitude = 1.0;
    double phase = 0.0;
    bool operator==(const ModeSpec&) const = default;
};

struct InitialCondition {
    enum class Kind { Random, Modes };
    Kind kind = Kind::Random;
    /// Random spectrum |u_hat(k)| = amplitude (1 + |k|)^{-decay} with seeded phases.
    double amplitude = 1.0;
    double decay = 2.0;
    std::vector<ModeSpec> modes;
    bool operator==(const InitialCondition&) const = default;
};

struct RunConfig {
    std::string experiment = "simulate";
    std::string output = "out";
    std::uint64_t seed = 1;
    double nu = 1.0;
    double mu = 1.0;
    double cutoff = 8.0;
    double s = -0.5;
    double box_length = 6.283185307179586;
    int modes = 128;
    double dt = 1e-3;
    double T = 1.0;
    int stride = 100;
    InitialCondition initial;
    std::vector<double> scan_cutoffs{4, 8, 16, 32, 64};
    double scan_delta = 0.1;
    std::size_t scan_samples = 100000;
    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Checks ranges; throws ConfigError naming the offending key.
void validate(const RunConfig& cfg);
std::string serialize_config(const RunConfig& cfg);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Documented defaults for an experiment id: simulate, nscan, identity, bounds,
/// bilinear, suite.
RunConfig default_config(const std::string& experiment);

} // namespace benjamin
