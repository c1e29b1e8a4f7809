#pragma once

// Output files: CSV tables, JSON manifests and persisted trajectories.
// Every file is written to a temporary name and renamed into place.

#include "core/energies.hpp"
#include "core/report.hpp"
#include "core/trajectory.hpp"
#include "harness/config.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace benjamin {

inline constexpr const char* kArtifactVersion = "1.0.0";
inline constexpr int kTrajectoryFormat = 1;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

/// Shortest round-trip decimal form.
std::string format_double(double x);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
    void add(std::vector<std::string> row);
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string energy_report_csv(const EnergyReport& r);
std::string bound_reports_csv(const std::vector<BoundReport>& reports, const std::vector<double>& cutoffs);
std::string bound_report_json(const BoundReport& r);

struct RunManifest {
    std::string config_hash;
    std::string started;
    std::string finished;
    std::vector<std::string> outputs;
};

/// ISO-8601 UTC timestamp.
std::string utc_now();
std::string manifest_json(const RunManifest& m, const RunConfig& cfg);

/// One CSV spectrum per sample (columns k, re, im) plus manifest.json.
std::vector<std::string> write_trajectory(const std::string& dir, const Trajectory& traj, const RunConfig& cfg,
                                          const std::string& config_hash);
Trajectory read_trajectory(const std::string& dir);

} // namespace benjamin
