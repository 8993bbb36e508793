#include "ghzlab/lhv.hpp"

#include "ghzlab/errors.hpp"
#include "ghzlab/simplex.hpp"

#include <stdexcept>

namespace ghzlab::lhv {

std::string LocalStrategy::to_string() const {
    std::string s;
    for (int player = 0; player < 3; ++player) {
        for (int q = 0; q < 2; ++q) {
            s += answers[player][q] > 0 ? '+' : '-';
        }
    }
    return s;
}

LocalStrategy LocalStrategy::from_string(const std::string& s) {
    if (s.size() != 6) {
        throw ValidationError("local strategy must be 6 characters, got '" + s + "'");
    }
    LocalStrategy out{};
    for (int k = 0; k < 6; ++k) {
        const char c = s[k];
        if (c != '+' && c != '-') {
            throw ValidationError("local strategy answers must be '+' or '-', got '" + s + "'");
        }
        out.answers[k / 2][k % 2] = c == '+' ? +1 : -1;
    }
    return out;
}

LocalStrategy LocalStrategy::from_index(int index) {
    if (index < 0 || index >= 64) {
        throw std::domain_error("local strategy index out of range");
    }
    LocalStrategy out{};
    for (int k = 0; k < 6; ++k) {
        const int bit = (index >> (5 - k)) & 1;
        out.answers[k / 2][k % 2] = bit ? -1 : +1;
    }
    return out;
}

MixedStrategy MixedStrategy::point_mass(const LocalStrategy& s) {
    return MixedStrategy{{{s, Rat(1)}}};
}

std::vector<LocalStrategy> enumerate_deterministic(const GameSpec& spec) {
    if (spec.player_count() != 3) {
        throw std::domain_error("deterministic enumeration requires a 3-player game");
    }
    std::vector<LocalStrategy> all;
    all.reserve(64);
    for (int i = 0; i < 64; ++i) {
        all.push_back(LocalStrategy::from_index(i));
    }
    return all;
}

Rat strategy_win_prob(const LocalStrategy& s, const GameSpec& spec) {
    Rat total = 0;
    for (const auto& entry : spec.support()) {
        int product = 1;
        for (int player = 0; player < 3; ++player) {
            product *= s.answer(player, entry.questions.q[player]);
        }
        if (product == entry.target_parity) {
            total += entry.weight;
        }
    }
    return total;
}

ClassicalValue classical_value(const GameSpec& spec) {
    ClassicalValue best;
    best.value = -1;
    for (const LocalStrategy& s : enumerate_deterministic(spec)) {
        const Rat v = strategy_win_prob(s, spec);
        if (v > best.value) {
            best.value = v;
            best.maximizers.clear();
            best.maximizers.push_back(s);
        } else if (v == best.value) {
            best.maximizers.push_back(s);
        }
    }
    return best;
}

double classical_value_lp(const GameSpec& spec) {
    // maximize sum_s v_s w_s over the probability simplex; the optimum of a
    // linear objective over the simplex must equal the best vertex, i.e. the
    // enumeration value. Kept as an independent route to the same number.
    const auto strategies = enumerate_deterministic(spec);
    LpProblem lp;
    lp.objective.resize(strategies.size());
    for (std::size_t i = 0; i < strategies.size(); ++i) {
        lp.objective[i] = rat_to_double(strategy_win_prob(strategies[i], spec));
    }
    lp.add_row(std::vector<double>(strategies.size(), 1.0), LpProblem::Op::Eq, 1.0);
    const LpResult res = solve_lp(lp);
    if (res.status != LpResult::Status::Optimal) {
        throw ValidationError("classical-value LP did not reach an optimum");
    }
    return res.value;
}

Rat mixed_win_prob(const MixedStrategy& m, const GameSpec& spec) {
    Rat total_weight = 0;
    Rat value = 0;
    for (const auto& [strategy, weight] : m.components) {
        if (weight < 0) {
            throw std::domain_error("mixed strategy has a negative weight");
        }
        total_weight += weight;
        value += weight * strategy_win_prob(strategy, spec);
    }
    if (total_weight != 1) {
        throw std::domain_error("mixed strategy weights sum to " + rat_to_string(total_weight) +
                                ", expected 1");
    }
    return value;
}

} // namespace ghzlab::lhv
