#include "decaylab/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "decaylab/catalog.hpp"
#include "decaylab/errors.hpp"

namespace decaylab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

const ConfigKey* find_key(const std::string& path) {
    for (const auto& k : config_schema())
        if (path == k.path) return &k;
    return nullptr;
}

bool parse_real(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return errno == 0 && end == s.c_str() + s.size();
}

bool parse_int(const std::string& s, long long& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtoll(s.c_str(), &end, 10);
    return errno == 0 && end == s.c_str() + s.size();
}

void check_value(const ConfigKey& key, const std::string& value) {
    double r;
    long long i;
    auto fail = [&](const char* what) { throw ValidationError(key.path, std::string("expected ") + what + ", got '" + value + "'"); };
    switch (key.type) {
        case ValueType::String:
            if (value.empty()) fail("a non-empty string");
            break;
        case ValueType::Integer:
            if (!parse_int(value, i)) fail("an integer");
            break;
        case ValueType::Real:
            if (!parse_real(value, r)) fail("a real number");
            break;
        case ValueType::RealList:
            for (const auto& item : split_list(value))
                if (!parse_real(item, r)) fail("a comma-separated list of reals");
            break;
        case ValueType::IntegerList:
            for (const auto& item : split_list(value))
                if (!parse_int(item, i)) fail("a comma-separated list of integers");
            break;
    }
}

}  // namespace

const std::vector<ConfigKey>& config_schema() {
    static const std::vector<ConfigKey> schema = {
        {"experiment.id", ValueType::String, "catalog id"},
        {"experiment.seed", ValueType::Integer, "seed for random data suites"},
        {"grid.half_width", ValueType::Real, "grid covers [-half_width, half_width) per axis"},
        {"grid.points", ValueType::Integer, "nodes per axis"},
        {"datum.family", ValueType::String, "gaussian | product-gaussian-phase | bump | cube"},
        {"datum.center", ValueType::RealList, "center per axis"},
        {"datum.width", ValueType::Real, "Gaussian width w in exp(-x^2 / (2 w^2))"},
        {"datum.modulation", ValueType::Real, "frequency modulation"},
        {"datum.q_width", ValueType::Real, "phase-space Gaussian width in q"},
        {"datum.p_width", ValueType::Real, "phase-space Gaussian width in p"},
        {"datum.lambda", ValueType::Real, "bump scale"},
        {"time.t_min", ValueType::Real, "first sample time"},
        {"time.t_max", ValueType::Real, "last sample time"},
        {"time.ratio", ValueType::Real, "geometric ratio between sample times"},
        {"time.list", ValueType::RealList, "explicit sample times (overrides the geometric sequence)"},
        {"time.fit_min", ValueType::Real, "start of the fit window"},
        {"time.fit_max", ValueType::Real, "end of the fit window"},
        {"params.map", ValueType::String, "identity | relativistic | square-d1 | mixed-d2"},
        {"params.d", ValueType::Integer, "spatial dimension"},
        {"params.lambdas", ValueType::RealList, "bump scales"},
        {"params.theta", ValueType::RealList, "interpolation parameters"},
        {"params.sigma", ValueType::RealList, "local-mass exponents"},
        {"params.epsilon", ValueType::Real, "local-energy weight exponent"},
        {"params.k", ValueType::IntegerList, "half-orders of the even-order equations"},
        {"params.degrees", ValueType::IntegerList, "dispersion degrees"},
        {"params.samples", ValueType::Integer, "size of the random data suite"},
        {"params.centers", ValueType::RealList, "cube centers"},
        {"params.probe_min", ValueType::Real, "left end of the probe window"},
        {"params.probe_max", ValueType::Real, "right end of the probe window"},
        {"params.k_min", ValueType::Integer, "lowest dyadic index"},
        {"params.k_max", ValueType::Integer, "highest dyadic index"},
        {"tolerances.slope", ValueType::Real, "allowed deviation of a fitted slope"},
        {"tolerances.identity", ValueType::Real, "relative tolerance of conservation identities"},
        {"tolerances.inequality", ValueType::Real, "absolute slack of inequality checks"},
        {"tolerances.spread", ValueType::Real, "allowed max/min ratio spread"},
        {"output.dir", ValueType::String, "report directory"},
    };
    return schema;
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void ExperimentConfig::set(const std::string& path, const std::string& value) {
    const ConfigKey* key = find_key(path);
    if (!key) throw ValidationError(path, "unknown key");
    const std::string v = trim(value);
    check_value(*key, v);
    values_[path] = v;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ValidationError("line " + std::to_string(lineno), "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError("line " + std::to_string(lineno), "expected key = value");
        if (section.empty()) throw ValidationError("line " + std::to_string(lineno), "key outside of any section");
        const std::string path = section + "." + trim(line.substr(0, eq));
        if (cfg.has(path)) throw ValidationError(path, "duplicate key");
        cfg.set(path, line.substr(eq + 1));
    }
    if (!cfg.has("experiment.id")) throw ValidationError("experiment.id", "missing");
    if (!find_catalog_entry(cfg.id())) throw ValidationError("experiment.id", "unknown experiment '" + cfg.id() + "'");
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("--config", "cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string ExperimentConfig::emit() const {
    std::string out, section;
    for (const auto& key : config_schema()) {
        auto it = values_.find(key.path);
        if (it == values_.end()) continue;
        const std::string path = key.path;
        const auto dot = path.find('.');
        const std::string sec = path.substr(0, dot);
        if (sec != section) {
            if (!out.empty()) out += "\n";
            out += "[" + sec + "]\n";
            section = sec;
        }
        out += path.substr(dot + 1) + " = " + it->second + "\n";
    }
    return out;
}

std::string ExperimentConfig::get_string(const std::string& path) const {
    auto it = values_.find(path);
    if (it == values_.end()) throw ValidationError(path, "missing");
    return it->second;
}

long long ExperimentConfig::get_int(const std::string& path) const {
    long long v = 0;
    parse_int(get_string(path), v);
    return v;
}

double ExperimentConfig::get_real(const std::string& path) const {
    double v = 0.0;
    parse_real(get_string(path), v);
    return v;
}

std::vector<double> ExperimentConfig::get_reals(const std::string& path) const {
    std::vector<double> out;
    for (const auto& item : split_list(get_string(path))) {
        double v = 0.0;
        parse_real(item, v);
        out.push_back(v);
    }
    return out;
}

std::vector<long long> ExperimentConfig::get_ints(const std::string& path) const {
    std::vector<long long> out;
    for (const auto& item : split_list(get_string(path))) {
        long long v = 0;
        parse_int(item, v);
        out.push_back(v);
    }
    return out;
}

ExperimentConfig ExperimentConfig::resolved() const {
    const CatalogEntry* entry = find_catalog_entry(id());
    if (!entry) throw ValidationError("experiment.id", "unknown experiment '" + id() + "'");
    ExperimentConfig out = parse(entry->defaults);
    for (const auto& [k, v] : values_) out.values_[k] = v;
    return out;
}

}  // namespace decaylab
