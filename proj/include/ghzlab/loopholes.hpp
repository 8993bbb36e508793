#pragma once

#include "ghzlab/game.hpp"
#include "ghzlab/lhv.hpp"
#include "ghzlab/rational.hpp"
#include "ghzlab/spacetime.hpp"

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ghzlab::loopholes {

/// Local instruction table where "not to be detected" is a legal entry.
/// 3^6 = 729 of these exist.
struct ExtendedStrategy {
    std::array<std::array<Answer, 2>, 3> answers; // [player][question]

    Answer answer(int player, Question q) const {
        return answers[player][static_cast<int>(q)];
    }

    auto operator<=>(const ExtendedStrategy&) const = default;

    /// Six characters over {+,-,0}: p1X p1Y p2X p2Y p3X p3Y ('0' = NoDetect).
    std::string to_string() const;
    static ExtendedStrategy from_string(const std::string& s);

    /// index 0..728, base-3 digits in the table order with '+','-','0'.
    static ExtendedStrategy from_index(int index);
};

/// Shared randomness over extended strategies; the players' no-detection
/// choices may be correlated through the hidden variable.
struct ExtendedEnsemble {
    std::vector<std::pair<ExtendedStrategy, Rat>> components;

    static ExtendedEnsemble point_mass(const ExtendedStrategy& s);
};

struct PostselectedStats {
    /// P(win | all three answered), absent when no trials survive.
    std::optional<Rat> conditional_win;
    std::array<Rat, 3> per_player_detection;
    Rat all_detected_rate;
};

/// Exact post-selected statistics of an ensemble, averaged over the question
/// distribution. Throws std::domain_error on an empty or invalid ensemble.
PostselectedStats postselected_stats(const ExtendedEnsemble& e, const GameSpec& spec);

/// True iff s never produces a fully-detected losing answer on any
/// positive-weight question triple (the support of any certainty-faking
/// ensemble lives inside this set).
bool never_loses_postselected(const ExtendedStrategy& s, const GameSpec& spec);

struct ThresholdResult {
    double eta_star = 0.0;
    double tolerance = 0.0;

    /// Exact witness: conditional win 1 and min detection certified_feasible_at.
    ExtendedEnsemble witness;
    Rat certified_feasible_at;

    /// Exact dual bound: no qualifying ensemble has min detection above this.
    Rat certified_infeasible_above;
    std::vector<std::pair<std::string, Rat>> dual_weights; // per (player,question)

    /// Bisection attestation: probed (eta, feasible) pairs, monotone.
    std::vector<std::pair<double, bool>> probes;
    double bracket_feasible = 0.0;
    double bracket_infeasible = 1.0;
};

/// Largest detection efficiency eta a post-selecting adversary can promise on
/// every question while still winning every surviving trial. Bisection over
/// eta with an LP feasibility check per probe; the final answer is certified
/// by exact-rational primal and dual witnesses. Requires the canonical
/// question support; tol must be positive.
ThresholdResult detection_threshold(const GameSpec& spec, double tol);

/// Source that emits a genuine triplet (ideal quantum play, wins surely) with
/// probability p and otherwise leaves the players to a fallback LHV mixture.
struct SourceModel {
    Rat emission_probability;
    lhv::MixedStrategy fallback;
};

/// p * 1 + (1-p) * mixed_win_prob(fallback).
Rat source_win_prob(const SourceModel& m, const GameSpec& spec);

/// Adversary that exploits whatever causal channels a timeline audit left
/// open. Modeled as an oracle: any open channel lets it fake the quantum
/// statistics exactly.
struct CommunicationModel {
    spacetime::LoopholeReport channels;
};

/// 1 when any choice/result/determination channel is open, else the game's
/// classical value.
Rat communication_win_prob(const CommunicationModel& m, const GameSpec& spec);

} // namespace ghzlab::loopholes
