#include "ghzlab/cli.hpp"

#include "ghzlab/errors.hpp"
#include "ghzlab/game.hpp"
#include "ghzlab/harness.hpp"
#include "ghzlab/lhv.hpp"
#include "ghzlab/loopholes.hpp"
#include "ghzlab/quantum.hpp"
#include "ghzlab/spacetime.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

namespace ghzlab::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot read file '" + path + "'");
    }
    return json::parse(in);
}

GameSpec parse_game(const json& j) {
    if (j.is_null()) {
        return make_ghz_game();
    }
    if (j.is_string()) {
        if (j.get<std::string>() == "ghz") {
            return make_ghz_game();
        }
        throw ValidationError("unknown game shorthand '" + j.get<std::string>() +
                              "' (only \"ghz\" or a full game object)");
    }
    return GameSpec::from_json(j);
}

Rat parse_rat(const json& j, const char* what) {
    if (j.is_string()) {
        return rat_from_string(j.get<std::string>());
    }
    if (j.is_number_integer()) {
        return Rat(j.get<long long>());
    }
    throw ValidationError(std::string(what) + " must be a rational string like \"1/2\"");
}

lhv::MixedStrategy parse_mixture(const json& j) {
    lhv::MixedStrategy m;
    for (const auto& e : j) {
        m.components.emplace_back(lhv::LocalStrategy::from_string(e.at("strategy").get<std::string>()),
                                  parse_rat(e.at("weight"), "mixture weight"));
    }
    return m;
}

loopholes::ExtendedEnsemble parse_ensemble(const json& j) {
    loopholes::ExtendedEnsemble e;
    for (const auto& c : j) {
        e.components.emplace_back(
            loopholes::ExtendedStrategy::from_string(c.at("strategy").get<std::string>()),
            parse_rat(c.at("weight"), "ensemble weight"));
    }
    return e;
}

quantum::StateVector parse_state(const std::string& name) {
    if (name == "ghz-") {
        return quantum::ghz_state(3, -1);
    }
    if (name == "ghz+") {
        return quantum::ghz_state(3, +1);
    }
    if (name == "zero" || name == "000") {
        return quantum::StateVector::basis_state(3, 0);
    }
    throw ValidationError("unknown state '" + name + "' (expected ghz-, ghz+ or zero)");
}

quantum::MeasurementAssignment parse_assignment(const json& j) {
    auto assignment = quantum::MeasurementAssignment::standard();
    if (j.is_null()) {
        return assignment;
    }
    auto parse_pauli = [](const std::string& p) {
        if (p == "X") {
            return quantum::Pauli::X;
        }
        if (p == "Y") {
            return quantum::Pauli::Y;
        }
        throw ValidationError("observable must be X or Y, got '" + p + "'");
    };
    for (int player = 0; player < 3; ++player) {
        assignment.observable[player][0] = parse_pauli(j.value("X", "X"));
        assignment.observable[player][1] = parse_pauli(j.value("Y", "Y"));
    }
    return assignment;
}

spacetime::ExperimentTimeline parse_timeline(const json& j) {
    if (j.is_string()) {
        return spacetime::make_preset(j.get<std::string>());
    }
    if (j.is_object() && j.contains("path")) {
        return spacetime::ExperimentTimeline::from_json(
            load_json_file(j.at("path").get<std::string>()));
    }
    return spacetime::ExperimentTimeline::from_json(j);
}

std::unique_ptr<harness::TrialStrategy> parse_strategy(const json& j, const GameSpec& spec) {
    if (j.is_null()) {
        return harness::make_quantum_strategy(spec, quantum::ghz_state(3, -1),
                                              quantum::MeasurementAssignment::standard());
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "quantum") {
        return harness::make_quantum_strategy(spec, parse_state(j.value("state", "ghz-")),
                                              parse_assignment(j.value("assignment", json{})));
    }
    if (kind == "classical-best") {
        return harness::make_best_classical_strategy(spec);
    }
    if (kind == "classical") {
        if (j.contains("mixture")) {
            return harness::make_classical_strategy(parse_mixture(j.at("mixture")));
        }
        return harness::make_classical_strategy(
            lhv::LocalStrategy::from_string(j.at("strategy").get<std::string>()));
    }
    if (kind == "extended") {
        return harness::make_extended_strategy(parse_ensemble(j.at("ensemble")));
    }
    if (kind == "source") {
        loopholes::SourceModel model;
        model.emission_probability = parse_rat(j.at("p"), "emission probability");
        const json fallback = j.value("fallback", json("best"));
        if (fallback.is_string() && fallback.get<std::string>() == "best") {
            model.fallback =
                lhv::MixedStrategy::point_mass(lhv::classical_value(spec).maximizers.front());
        } else {
            model.fallback = parse_mixture(fallback);
        }
        return harness::make_source_strategy(spec, std::move(model));
    }
    if (kind == "communication") {
        loopholes::CommunicationModel model;
        model.channels = spacetime::audit(parse_timeline(j.at("timeline")));
        return harness::make_communication_strategy(spec, std::move(model));
    }
    throw ValidationError("unknown strategy kind '" + kind + "'");
}

void emit(std::ostream& out, const ordered_json& j) {
    out << j.dump(2) << "\n";
}

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::vector<std::string> formats;

    json config() const {
        return config_path.empty() ? json::object() : load_json_file(config_path);
    }
};

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write '" + path + "'");
    }
    out << contents;
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

int cmd_bound(const CommonArgs& common, std::ostream& out) {
    const json cfg = common.config();
    const GameSpec game = parse_game(cfg.value("game", json{}));
    const lhv::ClassicalValue cv = lhv::classical_value(game);
    const double lp = lhv::classical_value_lp(game);
    if (std::fabs(lp - rat_to_double(cv.value)) > 1e-9) {
        throw ValidationError("LP optimum " + std::to_string(lp) +
                              " disagrees with the enumerated classical value " +
                              rat_to_string(cv.value));
    }
    ordered_json report;
    report["classical_value"] = rat_to_string(cv.value);
    report["classical_value_lp"] = lp;
    report["maximizers"] = ordered_json::array();
    for (const auto& s : cv.maximizers) {
        report["maximizers"].push_back(s.to_string());
    }
    report["config"] = ordered_json{{"game", game.to_json()}};
    emit(out, report);
    return 0;
}

int cmd_qvalue(const CommonArgs& common, const std::string& state_flag, std::ostream& out) {
    const json cfg = common.config();
    const GameSpec game = parse_game(cfg.value("game", json{}));
    json qcfg = cfg.value("quantum", json::object());
    std::string state_name = qcfg.value("state", "ghz-");
    if (!state_flag.empty()) {
        state_name = state_flag;
    }
    const quantum::StateVector state = parse_state(state_name);
    const auto assignment = parse_assignment(qcfg.value("assignment", json{}));
    const double value = quantum::quantum_win_prob(game, state, assignment);
    std::ostringstream line;
    line << std::fixed << std::setprecision(12) << value;
    out << line.str() << "\n";
    return 0;
}

int cmd_simulate(const CommonArgs& common, std::optional<std::uint64_t> trials_flag,
                 const std::string& scoring_flag, int workers_flag, std::ostream& out) {
    const json cfg = common.config();
    const GameSpec game = parse_game(cfg.value("game", json{}));
    const json strategy_cfg = cfg.value("strategy", json{});
    const auto strategy = parse_strategy(strategy_cfg, game);

    harness::RunOptions opts;
    opts.trials = trials_flag.value_or(cfg.value("trials", std::uint64_t{100000}));
    opts.master_seed = common.seed.value_or(cfg.value("master_seed", std::uint64_t{1}));
    std::string scoring_name = cfg.value("scoring", "strict");
    if (!scoring_flag.empty()) {
        scoring_name = scoring_flag;
    }
    opts.scoring = harness::scoring_from_name(scoring_name);
    opts.workers = workers_flag > 0 ? workers_flag : cfg.value("workers", 1);
    opts.confidence = cfg.value("confidence", 0.95);
    if (cfg.contains("bound")) {
        opts.bound = parse_rat(cfg.at("bound"), "bound");
    }

    std::string out_dir = common.out_dir.empty() ? cfg.value("out", "") : common.out_dir;
    std::vector<std::string> formats =
        common.formats.empty() ? cfg.value("format", std::vector<std::string>{"json"})
                               : common.formats;
    const bool want_csv =
        std::find(formats.begin(), formats.end(), "csv") != formats.end();
    if (want_csv && out_dir.empty()) {
        throw ValidationError("csv output requires --out DIR");
    }
    opts.keep_records = want_csv;

    const harness::RunOutput result = harness::run_trials(game, *strategy, opts);

    ordered_json report = result.report.to_json();
    report["config"] = ordered_json{
        {"game", game.to_json()},
        {"strategy", strategy_cfg.is_null() ? json{{"kind", "quantum"}, {"state", "ghz-"}}
                                            : strategy_cfg},
        {"trials", opts.trials},
        {"master_seed", opts.master_seed},
        {"scoring", harness::scoring_name(opts.scoring)},
        {"workers", opts.workers},
        {"confidence", opts.confidence},
        {"bound", rat_to_string(opts.bound)},
        {"out", out_dir},
        {"format", formats},
    };
    emit(out, report);

    if (!out_dir.empty()) {
        if (!std::filesystem::is_directory(out_dir)) {
            throw IoError("output directory '" + out_dir + "' does not exist");
        }
        write_text_file(out_dir + "/report.json", report.dump(2) + "\n");
        if (want_csv) {
            std::ostringstream csv;
            harness::write_records_csv(csv, result.records);
            write_text_file(out_dir + "/trials.csv", csv.str());
        }
    }
    return 0;
}

int cmd_threshold(const CommonArgs& common, std::optional<double> tol_flag, std::ostream& out) {
    const json cfg = common.config();
    const GameSpec game = parse_game(cfg.value("game", json{}));
    const double tol = tol_flag.value_or(cfg.value("tolerance", 1e-6));
    const auto result = loopholes::detection_threshold(game, tol);

    ordered_json report;
    report["eta_star"] = result.eta_star;
    report["witness"] = ordered_json::array();
    for (const auto& [strategy, weight] : result.witness.components) {
        report["witness"].push_back(
            ordered_json{{"strategy", strategy.to_string()}, {"weight", rat_to_string(weight)}});
    }
    report["tolerance"] = result.tolerance;
    report["certified_feasible_at"] = rat_to_string(result.certified_feasible_at);
    report["certified_infeasible_above"] = rat_to_string(result.certified_infeasible_above);
    report["dual_weights"] = ordered_json::array();
    for (const auto& [label, weight] : result.dual_weights) {
        report["dual_weights"].push_back(
            ordered_json{{"constraint", label}, {"weight", rat_to_string(weight)}});
    }
    report["bracket"] = ordered_json{{"feasible", result.bracket_feasible},
                                     {"infeasible", result.bracket_infeasible}};
    report["probes"] = ordered_json::array();
    for (const auto& [eta, ok] : result.probes) {
        report["probes"].push_back(ordered_json{{"eta", eta}, {"feasible", ok}});
    }
    report["config"] = ordered_json{{"game", game.to_json()}, {"tolerance", tol}};
    emit(out, report);
    return 0;
}

int cmd_audit(const CommonArgs& common, const std::string& preset_flag,
              const std::string& timeline_flag, std::ostream& out) {
    const json cfg = common.config();
    spacetime::ExperimentTimeline timeline;
    json resolved;
    if (!preset_flag.empty()) {
        timeline = spacetime::make_preset(preset_flag);
        resolved = preset_flag;
    } else if (!timeline_flag.empty()) {
        timeline = spacetime::ExperimentTimeline::from_json(load_json_file(timeline_flag));
        resolved = json{{"path", timeline_flag}};
    } else if (cfg.contains("timeline")) {
        timeline = parse_timeline(cfg.at("timeline"));
        resolved = cfg.at("timeline");
    } else {
        throw ValidationError("audit needs --preset NAME, --timeline FILE or a config timeline");
    }

    const spacetime::LoopholeReport report = spacetime::audit(timeline);
    ordered_json j = report.to_json();
    j["config"] = ordered_json{{"timeline", resolved}, {"resolved_timeline", timeline.to_json()}};
    emit(out, j);
    return report.any_channel_open() ? 1 : 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"ghzlab: exact values, simulations and loophole audits for the "
                 "three-player parity game"};
    app.require_subcommand(1);
    app.fallthrough(true);

    CommonArgs common;
    app.add_option("--config", common.config_path, "JSON experiment config");
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "master seed override");
    app.add_option("--out", common.out_dir, "output directory");
    app.add_option("--format", common.formats, "output formats (json, csv)")->delimiter(',');

    auto* bound = app.add_subcommand("bound", "exact classical value by enumeration + LP check");

    auto* qvalue = app.add_subcommand("qvalue", "quantum win probability to 12 decimals");
    std::string state_flag;
    qvalue->add_option("--state", state_flag, "ghz-, ghz+ or zero");

    auto* simulate = app.add_subcommand("simulate", "seeded Monte Carlo run with statistics");
    std::uint64_t trials_value = 0;
    auto* trials_opt = simulate->add_option("--trials", trials_value, "number of trials");
    std::string scoring_flag;
    simulate->add_option("--scoring", scoring_flag, "strict or postselect");
    int workers_flag = 0;
    simulate->add_option("--workers", workers_flag, "worker thread count");

    auto* threshold =
        app.add_subcommand("threshold", "detection-efficiency threshold with certificates");
    double tol_value = 0.0;
    auto* tol_opt = threshold->add_option("--tol", tol_value, "bisection tolerance (default 1e-6)");

    auto* audit = app.add_subcommand("audit", "classify open causal channels of a timeline");
    std::string preset_flag;
    audit->add_option("--preset", preset_flag, "rowe, weihs, galaxy or ideal");
    std::string timeline_flag;
    audit->add_option("--timeline", timeline_flag, "timeline JSON file");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }

    if (seed_opt->count() > 0) {
        common.seed = seed_value;
    }

    try {
        if (bound->parsed()) {
            return cmd_bound(common, out);
        }
        if (qvalue->parsed()) {
            return cmd_qvalue(common, state_flag, out);
        }
        if (simulate->parsed()) {
            std::optional<std::uint64_t> trials;
            if (trials_opt->count() > 0) {
                trials = trials_value;
            }
            return cmd_simulate(common, trials, scoring_flag, workers_flag, out);
        }
        if (threshold->parsed()) {
            std::optional<double> tol;
            if (tol_opt->count() > 0) {
                tol = tol_value;
            }
            return cmd_threshold(common, tol, out);
        }
        if (audit->parsed()) {
            return cmd_audit(common, preset_flag, timeline_flag, out);
        }
        err << "error: no subcommand given\n";
        return 2;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args, std::cout, std::cerr);
}

} // namespace ghzlab::cli
