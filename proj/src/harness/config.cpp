#include "harness/config.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>

namespace benjamin {

using nlohmann::json;

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error(key + ": " + message), key_(std::move(key))
{
}

namespace {

std::string join(const std::string& prefix, const std::string& key)
{
    return prefix.empty() ? key : prefix + "." + key;
}

// Object view that remembers which keys were read so the rest can be rejected.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt)
    {
        used_.insert(key);
        if (!j_.contains(key)) {
            if (!fallback)
                throw ConfigError(join(path_, key), "required field is missing");
            return *fallback;
        }
        const json& v = j_.at(key);
        if (!v.is_number())
            throw ConfigError(join(path_, key), "expected a number");
        return v.get<double>();
    }

    long long integer(const std::string& key, long long fallback)
    {
        used_.insert(key);
        if (!j_.contains(key))
            return fallback;
        const json& v = j_.at(key);
        if (!v.is_number_integer())
            throw ConfigError(join(path_, key), "expected an integer");
        return v.get<long long>();
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback)
    {
        used_.insert(key);
        if (!j_.contains(key))
            return fallback;
        const json& v = j_.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            throw ConfigError(join(path_, key), "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    std::string string(const std::string& key, const std::string& fallback)
    {
        used_.insert(key);
        if (!j_.contains(key))
            return fallback;
        const json& v = j_.at(key);
        if (!v.is_string())
            throw ConfigError(join(path_, key), "expected a string");
        return v.get<std::string>();
    }

    const json* child(const std::string& key)
    {
        used_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    std::string path(const std::string& key) const { return join(path_, key); }

    void finish() const
    {
        for (const auto& item : j_.items())
            if (!used_.count(item.key()))
                throw ConfigError(join(path_, item.key()), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

std::string line_column(const std::string& text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void require(bool ok, const std::string& key, const std::string& message)
{
    if (!ok)
        throw ConfigError(key, message);
}

} // namespace

RunConfig parse_config(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(line_column(text, e.byte > 0 ? e.byte - 1 : 0), "malformed JSON");
    }

    RunConfig cfg;
    Section top(root, "");
    cfg.experiment = top.string("experiment", cfg.experiment);
    cfg.output = top.string("output", cfg.output);
    cfg.seed = top.unsigned_integer("seed", cfg.seed);

    const json* phys = top.child("physics");
    if (!phys)
        throw ConfigError("physics", "required section is missing");
    Section ps(*phys, "physics");
    cfg.nu = ps.number("nu");
    cfg.mu = ps.number("mu");
    ps.finish();

    if (const json* im = top.child("imethod")) {
        Section s(*im, "imethod");
        cfg.cutoff = s.number("N", cfg.cutoff);
        cfg.s = s.number("s", cfg.s);
        s.finish();
    }
    if (const json* gr = top.child("grid")) {
        Section s(*gr, "grid");
        cfg.box_length = s.number("L", cfg.box_length);
        cfg.modes = static_cast<int>(s.integer("M", cfg.modes));
        s.finish();
    }
    if (const json* in = top.child("integration")) {
        Section s(*in, "integration");
        cfg.dt = s.number("dt", cfg.dt);
        cfg.T = s.number("T", cfg.T);
        cfg.stride = static_cast<int>(s.integer("stride", cfg.stride));
        s.finish();
    }
    if (const json* ic = top.child("initial")) {
        Section s(*ic, "initial");
        const std::string type = s.string("type", "random");
        if (type == "random") {
            cfg.initial.kind = InitialCondition::Kind::Random;
            cfg.initial.amplitude = s.number("amplitude", cfg.initial.amplitude);
            cfg.initial.decay = s.number("decay", cfg.initial.decay);
        } else if (type == "modes") {
            cfg.initial.kind = InitialCondition::Kind::Modes;
            const json* list = s.child("modes");
            if (!list || !list->is_array())
                throw ConfigError(s.path("modes"), "expected an array of modes");
            for (std::size_t i = 0; i < list->size(); ++i) {
                Section m((*list)[i], s.path("modes") + "[" + std::to_string(i) + "]");
                ModeSpec spec;
                spec.k = static_cast<int>(m.integer("k", spec.k));
                spec.amplitude = m.number("amplitude");
                spec.phase = m.number("phase", 0.0);
                m.finish();
                cfg.initial.modes.push_back(spec);
            }
        } else {
            throw ConfigError(s.path("type"), "must be \"random\" or \"modes\"");
        }
        s.finish();
    }
    if (const json* sc = top.child("scan")) {
        Section s(*sc, "scan");
        if (const json* cuts = s.child("cutoffs")) {
            if (!cuts->is_array())
                throw ConfigError(s.path("cutoffs"), "expected an array of numbers");
            cfg.scan_cutoffs.clear();
            for (std::size_t i = 0; i < cuts->size(); ++i) {
                if (!(*cuts)[i].is_number())
                    throw ConfigError(s.path("cutoffs") + "[" + std::to_string(i) + "]", "expected a number");
                cfg.scan_cutoffs.push_back((*cuts)[i].get<double>());
            }
        }
        cfg.scan_delta = s.number("delta", cfg.scan_delta);
        cfg.scan_samples = static_cast<std::size_t>(s.unsigned_integer("samples", cfg.scan_samples));
        s.finish();
    }
    top.finish();
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(path, "cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void validate(const RunConfig& cfg)
{
    auto finite = [](double x) { return std::isfinite(x); };
    require(finite(cfg.nu), "physics.nu", "must be finite");
    require(finite(cfg.mu) && cfg.mu != 0.0, "physics.mu", "must be finite and nonzero");
    require(finite(cfg.cutoff) && cfg.cutoff >= 4.0, "imethod.N", "must be >= 4");
    require(cfg.s >= -0.75 && cfg.s < 0.0, "imethod.s", "must lie in [-3/4, 0)");
    require(finite(cfg.box_length) && cfg.box_length > 0.0, "grid.L", "must be positive");
    require(cfg.modes >= 8 && cfg.modes % 2 == 0, "grid.M", "must be an even integer >= 8");
    require(finite(cfg.dt) && cfg.dt > 0.0, "integration.dt", "must be positive");
    require(finite(cfg.T) && cfg.T > 0.0, "integration.T", "must be positive");
    require(cfg.stride >= 1, "integration.stride", "must be >= 1");
    if (cfg.initial.kind == InitialCondition::Kind::Random) {
        require(finite(cfg.initial.amplitude), "initial.amplitude", "must be finite");
        require(finite(cfg.initial.decay), "initial.decay", "must be finite");
    } else {
        require(!cfg.initial.modes.empty(), "initial.modes", "must list at least one mode");
        for (std::size_t i = 0; i < cfg.initial.modes.size(); ++i) {
            const auto& m = cfg.initial.modes[i];
            const std::string key = "initial.modes[" + std::to_string(i) + "]";
            require(m.k >= 0 && m.k <= cfg.modes / 2 - 1, key + ".k", "must lie in [0, M/2 - 1]");
            require(finite(m.amplitude), key + ".amplitude", "must be finite");
            require(finite(m.phase), key + ".phase", "must be finite");
        }
    }
    for (std::size_t i = 0; i < cfg.scan_cutoffs.size(); ++i)
        require(cfg.scan_cutoffs[i] >= 4.0 && finite(cfg.scan_cutoffs[i]),
                "scan.cutoffs[" + std::to_string(i) + "]", "must be >= 4");
    require(finite(cfg.scan_delta) && cfg.scan_delta > 0.0, "scan.delta", "must be positive");
    require(cfg.scan_samples > 0, "scan.samples", "must be positive");
}

std::string serialize_config(const RunConfig& cfg)
{
    json j;
    j["experiment"] = cfg.experiment;
    j["output"] = cfg.output;
    j["seed"] = cfg.seed;
    j["physics"] = {{"nu", cfg.nu}, {"mu", cfg.mu}};
    j["imethod"] = {{"N", cfg.cutoff}, {"s", cfg.s}};
    j["grid"] = {{"L", cfg.box_length}, {"M", cfg.modes}};
    j["integration"] = {{"dt", cfg.dt}, {"T", cfg.T}, {"stride", cfg.stride}};
    if (cfg.initial.kind == InitialCondition::Kind::Random) {
        j["initial"] = {{"type", "random"}, {"amplitude", cfg.initial.amplitude}, {"decay", cfg.initial.decay}};
    } else {
        json modes = json::array();
        for (const auto& m : cfg.initial.modes)
            modes.push_back({{"k", m.k}, {"amplitude", m.amplitude}, {"phase", m.phase}});
        j["initial"] = {{"type", "modes"}, {"modes", modes}};
    }
    j["scan"] = {{"cutoffs", cfg.scan_cutoffs}, {"delta", cfg.scan_delta}, {"samples", cfg.scan_samples}};
    return j.dump(2) + "\n";
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256: digest failed");
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i)
        out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return out.str();
}

RunConfig default_config(const std::string& experiment)
{
    RunConfig cfg;
    cfg.experiment = experiment;
    if (experiment == "simulate" || experiment == "suite" || experiment == "identity" || experiment == "bounds" ||
        experiment == "bilinear") {
        if (experiment == "bilinear") {
            cfg.box_length = 0.5 * 3.14159265358979323846;
            cfg.modes = 64;
            cfg.initial.decay = 1.0;
            cfg.scan_cutoffs = {16, 32, 64};
        }
        if (experiment == "bounds" || experiment == "suite")
            cfg.scan_cutoffs = {32, 64, 128, 256};
        return cfg;
    }
    if (experiment == "nscan") {
        cfg.modes = 256;
        cfg.dt = 1e-6;
        cfg.stride = 5000;
        cfg.initial.amplitude = 1.0;
        cfg.initial.decay = 1.25;
        cfg.seed = 11;
        cfg.scan_cutoffs = {4, 8, 16, 32, 64};
        cfg.scan_delta = 0.1;
        cfg.T = cfg.scan_delta;
        return cfg;
    }
    throw ConfigError("experiment", "unknown experiment '" + experiment + "'");
}

} // namespace benjamin
