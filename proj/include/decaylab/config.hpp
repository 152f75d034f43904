#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace decaylab {

enum class ValueType { String, Integer, Real, RealList, IntegerList };

struct ConfigKey {
    const char* path;  // "section.key"
    ValueType type;
    const char* help;
};

/// Every key an experiment config may set.
const std::vector<ConfigKey>& config_schema();

/// Flat key-value configuration. Text form:
///
///   # comment
///   [section]
///   key = value
///
/// Lists are comma separated. Keys are addressed as "section.key".
class ExperimentConfig {
public:
    /// Parses and validates. Throws ValidationError naming the offending key path.
    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);

    /// Canonical text: sections and keys in schema order.
    std::string emit() const;

    bool has(const std::string& path) const { return values_.count(path) != 0; }
    const std::map<std::string, std::string>& values() const { return values_; }
    void set(const std::string& path, const std::string& value);

    std::string get_string(const std::string& path) const;
    long long get_int(const std::string& path) const;
    double get_real(const std::string& path) const;
    std::vector<double> get_reals(const std::string& path) const;
    std::vector<long long> get_ints(const std::string& path) const;

    std::string id() const { return get_string("experiment.id"); }

    /// Catalog defaults for this config's id, overlaid with the explicitly set keys.
    ExperimentConfig resolved() const;

    bool operator==(const ExperimentConfig&) const = default;

private:
    std::map<std::string, std::string> values_;
};

/// Formats a real so that parsing it back gives the same double.
std::string format_real(double v);

}  // namespace decaylab
