#include "harness/io.hpp"

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace benjamin {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file_atomic(const std::string& path, const std::string& contents)
{
    const fs::path target(path);
    if (target.has_parent_path())
        fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot write " + tmp.string());
        out << contents;
        if (!out.flush())
            throw IoError("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string format_double(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void CsvTable::add(std::vector<std::string> row)
{
    if (row.size() != header_.size())
        throw std::invalid_argument("csv: row width does not match header");
    rows_.push_back(std::move(row));
}

std::string CsvTable::str() const
{
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out << (i ? "," : "") << cells[i];
        out << '\n';
    };
    line(header_);
    for (const auto& r : rows_)
        line(r);
    return out.str();
}

std::string energy_report_csv(const EnergyReport& r)
{
    CsvTable t({"t", "E2", "E3", "E4", "lambda3_M3", "lambda4_M4", "lambda4_M4bar", "lambda5_M5", "fd_dE2", "fd_dE3",
                "fd_dE4", "rel_err2", "rel_err3", "rel_err4"});
    for (std::size_t j = 0; j < r.times.size(); ++j)
        t.add({format_double(r.times[j]), format_double(r.E2[j]), format_double(r.E3[j]), format_double(r.E4[j]),
               format_double(r.lambda3_M3[j]), format_double(r.lambda4_M4[j]), format_double(r.lambda4_M4bar[j]),
               format_double(r.lambda5_M5[j]), format_double(r.fd_dE2[j]), format_double(r.fd_dE3[j]),
               format_double(r.fd_dE4[j]), format_double(r.rel_err2), format_double(r.rel_err3),
               format_double(r.rel_err4)});
    return t.str();
}

std::string bound_reports_csv(const std::vector<BoundReport>& reports, const std::vector<double>& cutoffs)
{
    CsvTable t({"lemma", "N", "samples", "max_ratio", "min_ratio", "violations", "seed"});
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        t.add({r.lemma, i < cutoffs.size() ? format_double(cutoffs[i]) : "", std::to_string(r.samples),
               format_double(r.max_ratio), format_double(r.min_ratio), std::to_string(r.violations),
               std::to_string(r.seed)});
    }
    return t.str();
}

std::string bound_report_json(const BoundReport& r)
{
    json j{{"lemma", r.lemma}, {"samples", r.samples}, {"max_ratio", r.max_ratio},
           {"min_ratio", r.min_ratio}, {"violations", r.violations}, {"seed", r.seed}};
    return j.dump(2) + "\n";
}

std::string utc_now()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string manifest_json(const RunManifest& m, const RunConfig& cfg)
{
    json j;
    j["artifact_version"] = kArtifactVersion;
    j["config_hash"] = m.config_hash;
    j["started"] = m.started;
    j["finished"] = m.finished;
    j["experiment"] = cfg.experiment;
    j["seed"] = cfg.seed;
    j["grid"] = {{"L", cfg.box_length}, {"M", cfg.modes}};
    j["physics"] = {{"nu", cfg.nu}, {"mu", cfg.mu}};
    j["imethod"] = {{"N", cfg.cutoff}, {"s", cfg.s}};
    j["outputs"] = m.outputs;
    return j.dump(2) + "\n";
}

std::vector<std::string> write_trajectory(const std::string& dir, const Trajectory& traj, const RunConfig& cfg,
                                          const std::string& config_hash)
{
    fs::create_directories(dir);
    std::vector<std::string> files;
    json samples = json::array();
    const int kmax = traj.grid.kmax();
    for (std::size_t j = 0; j < traj.size(); ++j) {
        char name[32];
        std::snprintf(name, sizeof name, "sample_%06zu.csv", j);
        CsvTable t({"k", "re", "im"});
        for (int k = -kmax; k <= kmax; ++k) {
            const cplx c = traj.fields[j].at(k);
            t.add({std::to_string(k), format_double(c.real()), format_double(c.imag())});
        }
        write_file_atomic((fs::path(dir) / name).string(), t.str());
        files.emplace_back(name);
        samples.push_back({{"file", name}, {"t", traj.times[j]}});
    }
    json m;
    m["format_version"] = kTrajectoryFormat;
    m["artifact_version"] = kArtifactVersion;
    m["config_hash"] = config_hash;
    m["seed"] = cfg.seed;
    m["grid"] = {{"L", traj.grid.box_length()}, {"M", traj.grid.modes()}};
    m["physics"] = {{"nu", traj.phys.nu()}, {"mu", traj.phys.mu()}};
    if (traj.imethod)
        m["imethod"] = {{"N", traj.imethod->cutoff()}, {"s", traj.imethod->s()}};
    m["dt"] = traj.dt;
    m["sample_dt"] = traj.sample_dt;
    m["T"] = traj.times.empty() ? 0.0 : traj.times.back();
    m["samples"] = samples;
    write_file_atomic((fs::path(dir) / "manifest.json").string(), m.dump(2) + "\n");
    files.emplace_back("manifest.json");
    return files;
}

Trajectory read_trajectory(const std::string& dir)
{
    const json m = json::parse(read_file((fs::path(dir) / "manifest.json").string()));
    if (m.at("format_version").get<int>() != kTrajectoryFormat)
        throw IoError("trajectory: unsupported format version");
    const Grid g(m.at("grid").at("L").get<double>(), m.at("grid").at("M").get<int>());
    const PhysParams p(m.at("physics").at("nu").get<double>(), m.at("physics").at("mu").get<double>());
    Trajectory traj(g, p, m.at("dt").get<double>());
    traj.sample_dt = m.at("sample_dt").get<double>();
    if (m.contains("imethod"))
        traj.imethod = IParams(m["imethod"].at("N").get<double>(), m["imethod"].at("s").get<double>());
    for (const auto& s : m.at("samples")) {
        std::istringstream in(read_file((fs::path(dir) / s.at("file").get<std::string>()).string()));
        std::string line;
        std::getline(in, line);
        SpectralField u(g);
        while (std::getline(in, line)) {
            if (line.empty())
                continue;
            std::istringstream cells(line);
            std::string k, re, im;
            std::getline(cells, k, ',');
            std::getline(cells, re, ',');
            std::getline(cells, im, ',');
            const int kk = std::stoi(k);
            if (std::abs(kk) > g.kmax())
                throw IoError("trajectory: wavenumber outside the grid");
            u.coeffs()[g.index(kk)] = cplx(std::stod(re), std::stod(im));
        }
        traj.record(s.at("t").get<double>(), u);
    }
    return traj;
}

} // namespace benjamin
