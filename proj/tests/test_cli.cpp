#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "decaylab/catalog.hpp"
#include "decaylab/config.hpp"
#include "decaylab/errors.hpp"
#include "decaylab/parallel.hpp"

using namespace decaylab;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string validation_key(const std::string& text) {
    try {
        ExperimentConfig::parse(text);
    } catch (const ValidationError& e) {
        return e.key_path();
    }
    return "";
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("decaylab_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int exit_status(const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Report run_id(const std::string& id, int threads = 1) {
    set_thread_count(threads);
    return run(ExperimentConfig::parse("[experiment]\nid = " + id + "\n"));
}

}  // namespace

TEST_CASE("catalog lists fifteen experiments with unique ids and anchors") {
    const auto& cat = list_catalog();
    CHECK(cat.size() == 15);
    std::set<std::string> ids;
    for (const auto& e : cat) {
        ids.insert(e.id);
        CHECK_FALSE(e.anchor.empty());
        CHECK_FALSE(e.description.empty());
        CHECK(find_catalog_entry(e.id) == &e);
    }
    CHECK(ids.size() == cat.size());
    for (const char* id : {"vlasov-decay", "transport-degenerate", "counterexample", "conservation", "schrodinger-decay",
                           "schrodinger-ks", "schrodinger-xnorm", "lp-decay", "local-mass", "cube-translation",
                           "airy-pointwise", "airy-local-energy", "airy-decay", "monomial-2k", "commutation-suite"})
        CHECK(ids.count(id) == 1);
    CHECK(find_catalog_entry("no-such-id") == nullptr);
}

TEST_CASE("every catalog default round-trips through emit and parse") {
    for (const auto& e : list_catalog()) {
        CAPTURE(e.id);
        const auto cfg = ExperimentConfig::parse(e.defaults);
        CHECK(cfg.id() == e.id);
        const auto again = ExperimentConfig::parse(cfg.emit());
        CHECK(again == cfg);
        CHECK(again.emit() == cfg.emit());
        CHECK(ExperimentConfig::parse(cfg.resolved().emit()) == cfg.resolved());
    }
}

TEST_CASE("format_real round-trips doubles") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.70710678118654757}) {
        CHECK(std::strtod(format_real(v).c_str(), nullptr) == v);
    }
}

TEST_CASE("config parsing: comments, lists and accessors") {
    const auto cfg = ExperimentConfig::parse(
        "# leading comment\n[experiment]\nid = counterexample\n\n[params]\nlambdas = 4, 16 ,64\n");
    CHECK(cfg.get_string("experiment.id") == "counterexample");
    CHECK(cfg.get_reals("params.lambdas") == std::vector<double>{4, 16, 64});
    const auto r = cfg.resolved();
    CHECK(r.has("tolerances.inequality"));
    CHECK(r.get_real("tolerances.inequality") == doctest::Approx(1e-6));
}

TEST_CASE("config validation names the offending key") {
    CHECK(validation_key("[experiment]\nid = vlasov-decay\n[grid]\nbogus = 1\n") == "grid.bogus");
    CHECK(validation_key("[experiment]\nid = vlasov-decay\n[grid]\npoints = many\n") == "grid.points");
    CHECK(validation_key("[experiment]\nid = vlasov-decay\n[time]\nt_min = fast\n") == "time.t_min");
    CHECK(validation_key("[experiment]\nid = unknown-name\n") == "experiment.id");
    CHECK(validation_key("[experiment]\nid = counterexample\n[params]\nlambdas = 4, x\n") == "params.lambdas");
    CHECK(validation_key("[nosuchsection]\nkey = 1\n[experiment]\nid = counterexample\n") == "nosuchsection.key");
    CHECK_THROWS_AS(ExperimentConfig::parse("[experiment]\nid = counterexample\nthis line has no equals\n"),
                    ValidationError);
}

TEST_CASE("run rejects an unknown experiment id with the id key path") {
    ExperimentConfig cfg;
    cfg.set("experiment.id", "unknown-name");
    try {
        run(cfg);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.key_path() == "experiment.id");
    }
}

TEST_CASE("counterexample run gives three rows above 0.78") {
    const auto r = run_id("counterexample");
    REQUIRE(r.tables.size() == 1);
    const auto& t = r.tables[0];
    REQUIRE(t.rows.size() == 3);
    for (const auto& row : t.rows) CHECK(std::strtod(row[2].c_str(), nullptr) >= 0.78);
}

TEST_CASE("vlasov-decay defaults pass with slope near -1") {
    const auto r = run_id("vlasov-decay");
    CHECK(r.pass());
    CHECK(r.exit_code() == 0);
    REQUIRE_FALSE(r.fits.empty());
    CHECK(r.fits[0].second.slope == doctest::Approx(-1.0).epsilon(0.02));
}

TEST_CASE("samples tables are byte-identical across thread counts") {
    for (const char* id : {"vlasov-decay", "schrodinger-xnorm", "local-mass"}) {
        CAPTURE(id);
        const auto a = run_id(id, 1);
        const auto b = run_id(id, 4);
        REQUIRE(a.tables.size() == b.tables.size());
        for (std::size_t i = 0; i < a.tables.size(); ++i) CHECK(a.tables[i].to_tsv() == b.tables[i].to_tsv());
    }
    set_thread_count(1);
}

TEST_CASE("report JSON embeds the resolved config and the schema version") {
    const auto r = run_id("schrodinger-decay");
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j.at("schema_version") == Report::kSchemaVersion);
    CHECK(j.at("experiment") == "schrodinger-decay");
    CHECK(j.at("status") == "completed");
    CHECK(j.at("pass") == true);
    const auto resolved = r.config.resolved();
    for (const auto& [k, v] : resolved.values()) CHECK(j.at("config").at(k) == v);
    CHECK(j.at("tables").size() == r.tables.size());
    CHECK(j.at("checks").size() == r.checks.size());
    CHECK(j.contains("profile"));
    CHECK(j.at("wall_clock_seconds").get<double>() >= 0.0);
}

TEST_CASE("write_report emits report, config and one TSV per table") {
    const auto dir = scratch("write");
    const auto r = run_id("counterexample");
    write_report(r, (dir / "out").string());
    CHECK(fs::exists(dir / "out" / "report.json"));
    CHECK(fs::exists(dir / "out" / "counterexample.tsv"));
    const auto cfg = ExperimentConfig::load((dir / "out" / "config.ini").string());
    CHECK(cfg == r.config.resolved());
    CHECK(read_file(dir / "out" / "counterexample.tsv") == r.tables[0].to_tsv());
    fs::remove_all(dir);
}

TEST_CASE("table TSV layout") {
    Table t{"demo", {"t", "value"}, {{"1", "2.5"}, {"2", "1.25"}}};
    CHECK(t.to_tsv() == "t\tvalue\n1\t2.5\n2\t1.25\n");
}

TEST_CASE("exit codes follow the report outcome") {
    Report r;
    r.checks.push_back({"a", true, ""});
    CHECK(r.exit_code() == 0);
    r.checks.push_back({"b", false, ""});
    CHECK(r.exit_code() == 1);
    r.status = RunStatus::Contaminated;
    CHECK(r.exit_code() == 3);
}

TEST_CASE("golden reports are reproduced byte for byte") {
    for (const auto& entry : fs::directory_iterator(DECAYLAB_GOLDEN_DIR)) {
        const auto id = entry.path().filename().string();
        CAPTURE(id);
        const auto cfg = ExperimentConfig::load((entry.path() / "config.ini").string());
        set_thread_count(2);
        const auto r = run(cfg);
        std::size_t compared = 0;
        for (const auto& t : r.tables) {
            const auto golden = entry.path() / (t.name + ".tsv");
            REQUIRE(fs::exists(golden));
            CHECK(read_file(golden) == t.to_tsv());
            ++compared;
        }
        CHECK(compared > 0);
    }
    set_thread_count(1);
}

TEST_CASE("command line tool") {
    const std::string cli = DECAYLAB_CLI_PATH;
    const auto dir = scratch("tool");

    CHECK(exit_status(cli + " list") == 0);
    CHECK(exit_status(cli) == 2);
    CHECK(exit_status(cli + " run") == 2);

    write_file(dir / "bad.ini", "[experiment]\nid = counterexample\n[grid]\nbogus = 1\n");
    CHECK(exit_status(cli + " validate --config " + (dir / "bad.ini").string()) == 2);
    CHECK(exit_status(cli + " run --config " + (dir / "bad.ini").string()) == 2);
    CHECK(exit_status(cli + " validate --config " + (dir / "missing.ini").string()) == 2);

    write_file(dir / "good.ini", "[experiment]\nid = vlasov-decay\n");
    CHECK(exit_status(cli + " validate --config " + (dir / "good.ini").string()) == 0);
    CHECK(exit_status(cli + " run --config " + (dir / "good.ini").string() + " --out " + (dir / "vd").string() +
                      " --threads 3") == 0);
    const auto j = nlohmann::json::parse(read_file(dir / "vd" / "report.json"));
    CHECK(j.at("schema_version") == 1);
    CHECK(read_file(dir / "vd" / "sup_fit.tsv") == run_id("vlasov-decay").tables[1].to_tsv());

    // the tool's exit status mirrors the report's own verdict
    write_file(dir / "ce.ini", "[experiment]\nid = counterexample\n");
    const auto ce = run_id("counterexample");
    CHECK(exit_status(cli + " run --config " + (dir / "ce.ini").string() + " --out " + (dir / "ce").string()) ==
          ce.exit_code());

    fs::remove_all(dir);
}
