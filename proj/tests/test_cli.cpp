#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ghzlab/cli.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = ghzlab::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
  public:
    TempDir() {
        path_ = fs::temp_directory_path() /
                ("ghzlab_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

  private:
    static inline int counter_ = 0;
    fs::path path_;
};

std::string write_config(const TempDir& dir, const json& cfg, const char* name = "config.json") {
    const fs::path p = dir.path() / name;
    std::ofstream f(p);
    f << cfg.dump(2);
    return p.string();
}

} // namespace

TEST_CASE("bound prints the exact classical value") {
    const CliResult r = run_cli({"bound"});
    CHECK(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["classical_value"] == "3/4");
    CHECK(j["maximizers"].size() == 32);
    CHECK(j["maximizers"][0] == "++++++");
    CHECK(j.contains("config"));
}

TEST_CASE("bound on a single-constraint game prints 1") {
    TempDir dir;
    const json cfg = {{"game",
                       {{"players", 3},
                        {"support", json::array({{{"questions", "XXX"},
                                                  {"weight", "1"},
                                                  {"target", -1}}})}}}};
    const CliResult r = run_cli({"--config", write_config(dir, cfg), "bound"});
    CHECK(r.code == 0);
    CHECK(json::parse(r.out)["classical_value"] == "1");
}

TEST_CASE("bound rejects weights that do not sum to 1") {
    TempDir dir;
    const json cfg = {
        {"game",
         {{"players", 3},
          {"support", json::array({
                          {{"questions", "XXX"}, {"weight", "9/10"}, {"target", -1}},
                      })}}}};
    const CliResult r = run_cli({"--config", write_config(dir, cfg), "bound"});
    CHECK(r.code == 2);
    CHECK(!r.err.empty());
}

TEST_CASE("qvalue prints twelve decimals") {
    CHECK(run_cli({"qvalue"}).out == "1.000000000000\n");
    CHECK(run_cli({"qvalue", "--state", "ghz+"}).out == "0.000000000000\n");
    CHECK(run_cli({"qvalue", "--state", "zero"}).out == "0.500000000000\n");
    CHECK(run_cli({"qvalue", "--state", "w"}).code == 2);
}

TEST_CASE("simulate writes a self-describing report") {
    TempDir dir;
    const CliResult r = run_cli({"--seed", "9", "--out", dir.path().string(), "--format",
                                 "json,csv", "simulate", "--trials", "500"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["trials"] == 500);
    CHECK(j["wins"] == 500); // default strategy is the ideal quantum team
    CHECK(j["win_rate"] == 1.0);
    CHECK(j["master_seed"] == 9);
    CHECK(j["config"]["trials"] == 500);

    const json file = json::parse(std::ifstream(dir.path() / "report.json"));
    CHECK(file == j);

    std::ifstream csv(dir.path() / "trials.csv");
    std::string header;
    REQUIRE(std::getline(csv, header));
    CHECK(header == "index,q1,q2,q3,a1,a2,a3,won");
    int rows = 0;
    for (std::string line; std::getline(csv, line);) {
        ++rows;
    }
    CHECK(rows == 500);
}

TEST_CASE("simulate is deterministic across invocations and worker counts") {
    const CliResult a =
        run_cli({"--seed", "4", "simulate", "--trials", "2000", "--workers", "1"});
    const CliResult b =
        run_cli({"--seed", "4", "simulate", "--trials", "2000", "--workers", "5"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    const json ja = json::parse(a.out), jb = json::parse(b.out);
    CHECK(ja["wins"] == jb["wins"]);
    CHECK(ja["discarded"] == jb["discarded"]);
    CHECK(ja["win_rate"] == jb["win_rate"]);
}

TEST_CASE("simulate with a classical-best strategy stays near the bound") {
    TempDir dir;
    const json cfg = {{"strategy", {{"kind", "classical-best"}}}};
    const CliResult r = run_cli(
        {"--config", write_config(dir, cfg), "--seed", "1", "simulate", "--trials", "20000"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    const double rate = j["win_rate"];
    CHECK(rate > 0.73);
    CHECK(rate < 0.77);
    CHECK(double(j["p_value_vs_bound"]) > 0.01);
}

TEST_CASE("simulate to a missing directory is an I/O error") {
    const CliResult r = run_cli(
        {"--out", "/nonexistent/ghzlab_nowhere", "simulate", "--trials", "10"});
    CHECK(r.code == 3);
    CHECK(!r.err.empty());
}

TEST_CASE("extended-ensemble simulation with postselect scoring") {
    TempDir dir;
    const json cfg = {
        {"strategy",
         {{"kind", "extended"},
          {"ensemble", json::array({{{"strategy", "0+++++"}, {"weight", "1"}}})}}},
        {"scoring", "postselect"},
    };
    const CliResult r = run_cli(
        {"--config", write_config(dir, cfg), "--seed", "6", "simulate", "--trials", "4000"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["win_rate"] == 1.0);
    CHECK(double(j["discarded"]) > 1500);
}

TEST_CASE("source-model simulation lands between the bounds") {
    TempDir dir;
    const json cfg = {{"strategy", {{"kind", "source"}, {"p", "1/2"}, {"fallback", "best"}}}};
    const CliResult r = run_cli(
        {"--config", write_config(dir, cfg), "--seed", "12", "simulate", "--trials", "20000"});
    REQUIRE(r.code == 0);
    const double rate = json::parse(r.out)["win_rate"];
    CHECK(rate > 0.86);
    CHECK(rate < 0.89);
}

TEST_CASE("communication simulation follows the audit verdict") {
    TempDir dir;
    const json cfg = {{"strategy", {{"kind", "communication"}, {"timeline", "rowe"}}}};
    const CliResult r = run_cli(
        {"--config", write_config(dir, cfg), "--seed", "13", "simulate", "--trials", "2000"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["win_rate"] == 1.0);
}

TEST_CASE("threshold emits the certified answer") {
    const CliResult r = run_cli({"threshold", "--tol", "1e-4"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(std::fabs(double(j["eta_star"]) - 5.0 / 6.0) < 1e-4);
    CHECK(j["certified_feasible_at"] == "5/6");
    CHECK(j["certified_infeasible_above"] == "5/6");
    CHECK(!j["witness"].empty());
    CHECK(double(j["tolerance"]) == 1e-4);
    CHECK(double(j["bracket"]["infeasible"]) - double(j["bracket"]["feasible"]) <= 1e-4);
}

TEST_CASE("threshold rejects bad tolerances and game shapes") {
    CHECK(run_cli({"threshold", "--tol", "-1"}).code == 2);
    CHECK(run_cli({"threshold", "--tol", "0"}).code == 2);

    TempDir dir;
    const json cfg = {{"game",
                       {{"players", 3},
                        {"support", json::array({{{"questions", "XXX"},
                                                  {"weight", "1"},
                                                  {"target", -1}}})}}}};
    const CliResult r = run_cli({"--config", write_config(dir, cfg), "threshold"});
    CHECK(r.code == 2);
    CHECK(r.err.find("unsupported game shape") != std::string::npos);
}

TEST_CASE("audit exit codes distinguish open from closed") {
    const CliResult rowe = run_cli({"audit", "--preset", "rowe"});
    CHECK(rowe.code == 1);
    const json jr = json::parse(rowe.out);
    bool result_open = false;
    for (const auto& pair : jr["pairs"]) {
        result_open |= pair["result_channel_open"].get<bool>();
    }
    CHECK(result_open);
    CHECK(jr["heralding_gap"] == false);

    const CliResult galaxy = run_cli({"audit", "--preset", "galaxy"});
    CHECK(galaxy.code == 0);
    CHECK(json::parse(galaxy.out)["any_channel_open"] == false);

    const CliResult weihs = run_cli({"audit", "--preset", "weihs"});
    CHECK(weihs.code == 1);

    CHECK(run_cli({"audit", "--preset", "unknown"}).code == 2);
    CHECK(run_cli({"audit"}).code == 2);
}

TEST_CASE("audit validates timeline files") {
    TempDir dir;
    const json broken = {
        {"sites", json::array({{{"id", "A"}, {"position", {0, 0, 0}}}})},
        {"events", json::array({
                       {{"site", "A"}, {"kind", "ChoiceDetermined"}, {"time", 0.0}},
                       {{"site", "A"}, {"kind", "ChoiceMade"}, {"time", 2.0}},
                       {{"site", "A"}, {"kind", "MeasurementStart"}, {"time", 1.0}},
                       {{"site", "A"}, {"kind", "ResultAvailable"}, {"time", 3.0}},
                   })},
    };
    const std::string path = write_config(dir, broken, "timeline.json");
    const CliResult r = run_cli({"audit", "--timeline", path});
    CHECK(r.code == 2);
    CHECK(!r.err.empty());

    CHECK(run_cli({"audit", "--timeline", "/nonexistent/timeline.json"}).code == 2);
}

TEST_CASE("audit round-trips a preset written to disk") {
    TempDir dir;
    const CliResult ideal = run_cli({"audit", "--preset", "ideal"});
    REQUIRE(ideal.code == 0);
    const json resolved = json::parse(ideal.out)["config"]["resolved_timeline"];
    const fs::path p = dir.path() / "ideal.json";
    {
        std::ofstream f(p);
        f << resolved.dump(2);
    }
    const CliResult again = run_cli({"audit", "--timeline", p.string()});
    CHECK(again.code == 0);
    CHECK(json::parse(again.out)["any_channel_open"] == false);
}

TEST_CASE("help and bad usage") {
    CHECK(run_cli({"--help"}).code == 0);
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"frobnicate"}).code == 2);
}
