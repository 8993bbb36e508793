#pragma once

#include "ghzlab/game.hpp"
#include "ghzlab/rational.hpp"

#include <compare>
#include <string>
#include <vector>

namespace ghzlab::lhv {

/// Deterministic local strategy: each player commits to a +-1 answer for each
/// question before separation. 2^6 = 64 of these exist for three players.
struct LocalStrategy {
    // answers[player][question], values +1 or -1
    std::array<std::array<int, 2>, 3> answers;

    int answer(int player, Question q) const {
        return answers[player][static_cast<int>(q)];
    }

    auto operator<=>(const LocalStrategy&) const = default;

    /// Six characters over {+,-}: p1X p1Y p2X p2Y p3X p3Y.
    std::string to_string() const;
    static LocalStrategy from_string(const std::string& s);

    /// index 0..63, lexicographic in the table above with '+' before '-'.
    static LocalStrategy from_index(int index);
};

/// Shared randomness over deterministic strategies.
struct MixedStrategy {
    std::vector<std::pair<LocalStrategy, Rat>> components;

    static MixedStrategy point_mass(const LocalStrategy& s);
};

/// All 64 deterministic strategies in index order.
/// Requires a 3-player, two-question game.
std::vector<LocalStrategy> enumerate_deterministic(const GameSpec& spec);

/// Total weight of the question triples whose parity constraint s satisfies.
Rat strategy_win_prob(const LocalStrategy& s, const GameSpec& spec);

struct ClassicalValue {
    Rat value;
    std::vector<LocalStrategy> maximizers; // in index (lexicographic) order
};

/// Exact classical value by exhaustive enumeration over all 64 strategies.
ClassicalValue classical_value(const GameSpec& spec);

/// Redundant oracle for classical_value: LP over the 64 mixture weights.
/// Runs in floating point; callers check agreement within 1e-9.
double classical_value_lp(const GameSpec& spec);

/// Weight-averaged strategy_win_prob. Throws std::domain_error when the
/// mixture weights do not sum to 1 or are negative.
Rat mixed_win_prob(const MixedStrategy& m, const GameSpec& spec);

} // namespace ghzlab::lhv
