#pragma once

#include "ghzlab/game.hpp"
#include "ghzlab/lhv.hpp"
#include "ghzlab/loopholes.hpp"
#include "ghzlab/quantum.hpp"
#include "ghzlab/rational.hpp"
#include "ghzlab/rng.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ghzlab::harness {

struct TrialRecord {
    std::uint64_t index;
    QuestionTriple question;
    AnswerTriple answers;
    bool won;
};

/// How NoDetect answers are scored: strict counts them as losses,
/// postselect discards the trial.
enum class Scoring { Strict, Postselect };

std::string scoring_name(Scoring s);
Scoring scoring_from_name(const std::string& name);

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double confidence = 0.95;
};

struct RunReport {
    std::uint64_t trials = 0;
    std::uint64_t wins = 0;
    std::uint64_t discarded = 0;
    double win_rate = 0.0;
    Interval interval;
    double p_value_vs_bound = 1.0;
    double log10_p_value_vs_bound = 0.0;
    Rat bound = Rat(3, 4);
    std::uint64_t master_seed = 0;
    std::string strategy;
    Scoring scoring = Scoring::Strict;

    nlohmann::ordered_json to_json() const;
};

/// A team (honest or adversarial) that answers one referee question per
/// trial. play() must be pure given the stream: trials only ever see the
/// stream derived from (master_seed, trial index).
class TrialStrategy {
  public:
    virtual ~TrialStrategy() = default;
    virtual AnswerTriple play(const QuestionTriple& q, RngStream& rng) const = 0;
    virtual std::string descriptor() const = 0;
};

std::unique_ptr<TrialStrategy> make_classical_strategy(lhv::LocalStrategy s);
std::unique_ptr<TrialStrategy> make_classical_strategy(lhv::MixedStrategy m);
/// The lexicographically first maximizer of the game's classical value.
std::unique_ptr<TrialStrategy> make_best_classical_strategy(const GameSpec& spec);
std::unique_ptr<TrialStrategy> make_quantum_strategy(const GameSpec& spec,
                                                     quantum::StateVector state,
                                                     quantum::MeasurementAssignment assignment);
std::unique_ptr<TrialStrategy> make_extended_strategy(loopholes::ExtendedEnsemble ensemble);
/// Emits a triplet (ideal quantum play) with probability p, else the fallback.
std::unique_ptr<TrialStrategy> make_source_strategy(const GameSpec& spec,
                                                    loopholes::SourceModel model);
/// Plays perfectly when the audited timeline leaves any channel open,
/// otherwise falls back to the best classical strategy.
std::unique_ptr<TrialStrategy> make_communication_strategy(const GameSpec& spec,
                                                           loopholes::CommunicationModel model);

struct RunOptions {
    std::uint64_t trials = 0;
    std::uint64_t master_seed = 0;
    Scoring scoring = Scoring::Strict;
    int workers = 1;
    double confidence = 0.95;
    Rat bound = Rat(3, 4);
    bool keep_records = false;
};

struct RunOutput {
    RunReport report;
    std::vector<TrialRecord> records; // empty unless keep_records
};

/// Runs opts.trials independent rounds. Per-trial randomness is the
/// counter-based stream (master_seed, index), so counts are identical for any
/// worker count. Throws std::domain_error when trials == 0.
RunOutput run_trials(const GameSpec& spec, const TrialStrategy& strategy, const RunOptions& opts);

/// CSV with header index,q1,q2,q3,a1,a2,a3,won; answers are 1, -1 or ND.
void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records);

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t wins, std::uint64_t n, double confidence);

struct TailProbability {
    double p_value;
    double log10_p_value; // finite even when p_value underflows
};

/// Exact one-sided binomial tail P(W >= wins | n, p0), summed in log space.
TailProbability binomial_test_geq(std::uint64_t wins, std::uint64_t n, const Rat& p0 = Rat(3, 4));

} // namespace ghzlab::harness
