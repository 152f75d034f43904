#pragma once

#include <map>
#include <string>
#include <vector>

#include "decaylab/config.hpp"
#include "decaylab/fit.hpp"

namespace decaylab {

struct CatalogEntry {
    std::string id;
    std::string anchor;       // the estimate or identity the experiment exercises
    std::string description;  // one line
    std::string defaults;     // full config text
};

const std::vector<CatalogEntry>& list_catalog();
const CatalogEntry* find_catalog_entry(const std::string& id);

/// Plot-ready table; cells are preformatted (reals with %.17g) so output is byte-stable.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::string to_tsv() const;
};

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

enum class RunStatus { Completed, Contaminated };

struct Report {
    static constexpr int kSchemaVersion = 1;

    ExperimentConfig config;  // resolved
    std::string anchor;
    std::map<std::string, std::string> profile;  // bump profile, dyadic window, grid, ...
    std::vector<Table> tables;
    std::vector<std::pair<std::string, DecayFit>> fits;
    std::vector<InequalityReport> inequalities;
    std::vector<Check> checks;
    RunStatus status = RunStatus::Completed;
    std::string error;  // set when the run stopped early
    double wall_clock_seconds = 0.0;

    bool pass() const;
    /// 0 all checks pass, 1 some check failed, 3 contamination left a suite unrunnable.
    int exit_code() const;
    std::string to_json() const;
};

/// Runs the experiment named by the config id with catalog defaults filled in. Numerical
/// contamination that leaves too few samples is reported through RunStatus, not thrown.
Report run(const ExperimentConfig& config);

/// Writes report.json, config.ini and one TSV per table into `dir` (created if missing).
void write_report(const Report& report, const std::string& dir);

}  // namespace decaylab
