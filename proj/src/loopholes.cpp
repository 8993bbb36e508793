#include "ghzlab/loopholes.hpp"

#include "ghzlab/errors.hpp"
#include "ghzlab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace ghzlab::loopholes {

namespace {

constexpr int kExtendedCount = 729;
constexpr double kLpEps = 1e-9;

Answer answer_from_trit(int trit) {
    switch (trit) {
    case 0:
        return Answer::Plus;
    case 1:
        return Answer::Minus;
    default:
        return Answer::NoDetect;
    }
}

void validate_ensemble(const ExtendedEnsemble& e) {
    if (e.components.empty()) {
        throw std::domain_error("extended ensemble is empty");
    }
    Rat total = 0;
    for (const auto& [strategy, weight] : e.components) {
        if (weight < 0) {
            throw std::domain_error("extended ensemble has a negative weight");
        }
        total += weight;
    }
    if (total != 1) {
        throw std::domain_error("extended ensemble weights sum to " + rat_to_string(total) +
                                ", expected 1");
    }
}

struct TripleOutcome {
    bool all_detected;
    bool won;
    std::array<bool, 3> detected;
};

TripleOutcome evaluate(const ExtendedStrategy& s, const WeightedTriple& entry) {
    TripleOutcome out{true, false, {}};
    int product = 1;
    for (int player = 0; player < 3; ++player) {
        const Answer a = s.answer(player, entry.questions.q[player]);
        out.detected[player] = a != Answer::NoDetect;
        if (!out.detected[player]) {
            out.all_detected = false;
        } else {
            product *= static_cast<int>(a);
        }
    }
    out.won = out.all_detected && product == entry.target_parity;
    return out;
}

} // namespace

std::string ExtendedStrategy::to_string() const {
    std::string s;
    for (int player = 0; player < 3; ++player) {
        for (int q = 0; q < 2; ++q) {
            s += answer_char(answers[player][q]);
        }
    }
    return s;
}

ExtendedStrategy ExtendedStrategy::from_string(const std::string& s) {
    if (s.size() != 6) {
        throw ValidationError("extended strategy must be 6 characters, got '" + s + "'");
    }
    ExtendedStrategy out{};
    for (int k = 0; k < 6; ++k) {
        out.answers[k / 2][k % 2] = answer_from_char(s[k]);
    }
    return out;
}

ExtendedStrategy ExtendedStrategy::from_index(int index) {
    if (index < 0 || index >= kExtendedCount) {
        throw std::domain_error("extended strategy index out of range");
    }
    ExtendedStrategy out{};
    int rest = index;
    for (int k = 5; k >= 0; --k) {
        out.answers[k / 2][k % 2] = answer_from_trit(rest % 3);
        rest /= 3;
    }
    return out;
}

ExtendedEnsemble ExtendedEnsemble::point_mass(const ExtendedStrategy& s) {
    return ExtendedEnsemble{{{s, Rat(1)}}};
}

PostselectedStats postselected_stats(const ExtendedEnsemble& e, const GameSpec& spec) {
    validate_ensemble(e);
    Rat win_and_all = 0;
    Rat all_rate = 0;
    std::array<Rat, 3> detection = {Rat(0), Rat(0), Rat(0)};
    for (const auto& entry : spec.support()) {
        for (const auto& [strategy, weight] : e.components) {
            const Rat mass = entry.weight * weight;
            const TripleOutcome out = evaluate(strategy, entry);
            if (out.all_detected) {
                all_rate += mass;
            }
            if (out.won) {
                win_and_all += mass;
            }
            for (int player = 0; player < 3; ++player) {
                if (out.detected[player]) {
                    detection[player] += mass;
                }
            }
        }
    }
    PostselectedStats stats;
    stats.per_player_detection = detection;
    stats.all_detected_rate = all_rate;
    if (all_rate > 0) {
        stats.conditional_win = win_and_all / all_rate;
    }
    return stats;
}

bool never_loses_postselected(const ExtendedStrategy& s, const GameSpec& spec) {
    for (const auto& entry : spec.support()) {
        if (entry.weight == 0) {
            continue;
        }
        const TripleOutcome out = evaluate(s, entry);
        if (out.all_detected && !out.won) {
            return false;
        }
    }
    return true;
}

namespace {

struct DetectionConstraint {
    int player;
    Question question;
    std::string label() const {
        return "p" + std::to_string(player + 1) + question_char(question);
    }
};

std::vector<DetectionConstraint> detection_constraints(const GameSpec& spec) {
    std::set<std::pair<int, int>> seen;
    std::vector<DetectionConstraint> out;
    for (const auto& entry : spec.support()) {
        for (int player = 0; player < 3; ++player) {
            const Question q = entry.questions.q[player];
            if (seen.insert({player, static_cast<int>(q)}).second) {
                out.push_back({player, q});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::pair(a.player, static_cast<int>(a.question)) <
               std::pair(b.player, static_cast<int>(b.question));
    });
    return out;
}

bool detects(const ExtendedStrategy& s, const DetectionConstraint& c) {
    return s.answer(c.player, c.question) != Answer::NoDetect;
}

void require_canonical_shape(const GameSpec& spec) {
    std::set<std::string> questions;
    for (const auto& entry : spec.support()) {
        if (entry.weight <= 0) {
            throw std::domain_error("unsupported game shape: zero-weight question triple");
        }
        questions.insert(entry.questions.to_string());
    }
    const std::set<std::string> canonical = {"XXX", "XYY", "YXY", "YYX"};
    if (questions != canonical) {
        throw std::domain_error(
            "unsupported game shape: threshold search needs the canonical question support");
    }
}

/// Phase-1 style feasibility probe: does any ensemble over the never-losing
/// strategies keep every per-question detection rate at eta or above?
bool feasible_at(double eta, const std::vector<ExtendedStrategy>& pool,
                 const std::vector<DetectionConstraint>& constraints) {
    LpProblem lp;
    const std::size_t n = pool.size();
    lp.objective.assign(n, 0.0);
    lp.add_row(std::vector<double>(n, 1.0), LpProblem::Op::Eq, 1.0);
    for (const auto& c : constraints) {
        std::vector<double> row(n, 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            row[s] = detects(pool[s], c) ? 1.0 : 0.0;
        }
        lp.add_row(std::move(row), LpProblem::Op::Ge, eta);
    }
    return solve_lp(lp, kLpEps).status == LpResult::Status::Optimal;
}

std::vector<double> solve_primal_game(const std::vector<ExtendedStrategy>& pool,
                                      const std::vector<DetectionConstraint>& constraints,
                                      double& value) {
    // maximize z  s.t.  sum_s w_s d_c(s) - z >= 0 for each c, w on the simplex
    LpProblem lp;
    const std::size_t n = pool.size();
    lp.objective.assign(n + 1, 0.0);
    lp.objective[n] = 1.0;
    {
        std::vector<double> row(n + 1, 1.0);
        row[n] = 0.0;
        lp.add_row(std::move(row), LpProblem::Op::Eq, 1.0);
    }
    for (const auto& c : constraints) {
        std::vector<double> row(n + 1, 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            row[s] = detects(pool[s], c) ? 1.0 : 0.0;
        }
        row[n] = -1.0;
        lp.add_row(std::move(row), LpProblem::Op::Ge, 0.0);
    }
    const LpResult res = solve_lp(lp, kLpEps);
    if (res.status != LpResult::Status::Optimal) {
        throw ValidationError("primal threshold LP did not reach an optimum");
    }
    value = res.value;
    return {res.x.begin(), res.x.begin() + static_cast<long>(n)};
}

std::vector<double> solve_dual_game(const std::vector<ExtendedStrategy>& pool,
                                    const std::vector<DetectionConstraint>& constraints,
                                    double& value) {
    // minimize u  s.t.  sum_c y_c d_c(s) - u <= 0 for each s, y on the simplex
    LpProblem lp;
    const std::size_t k = constraints.size();
    lp.objective.assign(k + 1, 0.0);
    lp.objective[k] = -1.0; // maximize -u
    {
        std::vector<double> row(k + 1, 1.0);
        row[k] = 0.0;
        lp.add_row(std::move(row), LpProblem::Op::Eq, 1.0);
    }
    for (const ExtendedStrategy& s : pool) {
        std::vector<double> row(k + 1, 0.0);
        for (std::size_t c = 0; c < k; ++c) {
            row[c] = detects(s, constraints[c]) ? 1.0 : 0.0;
        }
        row[k] = -1.0;
        lp.add_row(std::move(row), LpProblem::Op::Le, 0.0);
    }
    const LpResult res = solve_lp(lp, kLpEps);
    if (res.status != LpResult::Status::Optimal) {
        throw ValidationError("dual threshold LP did not reach an optimum");
    }
    value = -res.value;
    return {res.x.begin(), res.x.begin() + static_cast<long>(k)};
}

Rat exact_min_detection(const ExtendedEnsemble& e,
                        const std::vector<DetectionConstraint>& constraints) {
    Rat best = 2;
    for (const auto& c : constraints) {
        Rat rate = 0;
        for (const auto& [strategy, weight] : e.components) {
            if (detects(strategy, c)) {
                rate += weight;
            }
        }
        best = std::min(best, rate);
    }
    return best;
}

} // namespace

ThresholdResult detection_threshold(const GameSpec& spec, double tol) {
    if (!(tol > 0)) {
        throw std::domain_error("threshold tolerance must be positive");
    }
    require_canonical_shape(spec);

    std::vector<ExtendedStrategy> pool;
    for (int i = 0; i < kExtendedCount; ++i) {
        const ExtendedStrategy s = ExtendedStrategy::from_index(i);
        if (never_loses_postselected(s, spec)) {
            pool.push_back(s);
        }
    }
    const auto constraints = detection_constraints(spec);

    ThresholdResult result;
    result.tolerance = tol;

    auto probe = [&](double eta) {
        const bool ok = feasible_at(eta, pool, constraints);
        result.probes.emplace_back(eta, ok);
        return ok;
    };

    double lo = 0.0;
    double hi = 1.0;
    if (!probe(lo)) {
        throw ValidationError("threshold search found eta=0 infeasible; game support is broken");
    }
    if (probe(hi)) {
        lo = hi; // a fully-detecting perfect ensemble exists
    } else {
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            if (probe(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    result.bracket_feasible = lo;
    result.bracket_infeasible = hi;

    // Feasibility must be monotone in eta: the constraint set only shrinks.
    double max_feasible = 0.0, min_infeasible = 1.0;
    for (const auto& [eta, ok] : result.probes) {
        if (ok) {
            max_feasible = std::max(max_feasible, eta);
        } else {
            min_infeasible = std::min(min_infeasible, eta);
        }
    }
    if (max_feasible > min_infeasible) {
        throw ValidationError("threshold bisection lost monotonicity");
    }

    // One exact primal/dual pair certifies the bisection answer.
    double primal_value = 0.0;
    const std::vector<double> w_float = solve_primal_game(pool, constraints, primal_value);
    double dual_value = 0.0;
    const std::vector<double> y_float = solve_dual_game(pool, constraints, dual_value);
    if (std::fabs(primal_value - dual_value) > 1e-7) {
        throw ValidationError("threshold LP duality gap in floating point");
    }

    // Snap the primal witness onto exact rationals and renormalize.
    ExtendedEnsemble witness;
    Rat total = 0;
    for (std::size_t s = 0; s < pool.size(); ++s) {
        if (w_float[s] > 1e-9) {
            const Rat w = rat_snap(w_float[s]);
            if (w > 0) {
                witness.components.emplace_back(pool[s], w);
                total += w;
            }
        }
    }
    if (total == 0) {
        throw ValidationError("threshold witness collapsed to zero weight");
    }
    for (auto& [strategy, weight] : witness.components) {
        weight /= total;
    }

    const PostselectedStats stats = postselected_stats(witness, spec);
    if (!stats.conditional_win || *stats.conditional_win != 1) {
        throw ValidationError("threshold witness does not win every surviving trial");
    }
    result.witness = witness;
    result.certified_feasible_at = exact_min_detection(witness, constraints);

    // Snap the dual weights; their exact value bounds every qualifying
    // ensemble's min detection from above (weak duality).
    std::vector<Rat> y(constraints.size());
    Rat y_total = 0;
    for (std::size_t c = 0; c < constraints.size(); ++c) {
        y[c] = rat_snap(std::max(0.0, y_float[c]));
        y_total += y[c];
    }
    if (y_total == 0) {
        throw ValidationError("threshold dual certificate collapsed to zero weight");
    }
    Rat upper = 0;
    for (std::size_t c = 0; c < constraints.size(); ++c) {
        y[c] /= y_total;
        result.dual_weights.emplace_back(constraints[c].label(), y[c]);
    }
    for (const ExtendedStrategy& s : pool) {
        Rat mix = 0;
        for (std::size_t c = 0; c < constraints.size(); ++c) {
            if (detects(s, constraints[c])) {
                mix += y[c];
            }
        }
        upper = std::max(upper, mix);
    }
    result.certified_infeasible_above = upper;

    if (result.certified_feasible_at > upper) {
        throw ValidationError("threshold certificates violate weak duality");
    }
    if (rat_to_double(upper - result.certified_feasible_at) > tol) {
        throw ValidationError("threshold certificates leave a gap wider than the tolerance");
    }
    result.eta_star = rat_to_double(result.certified_feasible_at);
    if (result.eta_star < lo - tol || result.eta_star > hi + tol) {
        throw ValidationError("certified threshold disagrees with the bisection bracket");
    }
    return result;
}

Rat source_win_prob(const SourceModel& m, const GameSpec& spec) {
    if (m.emission_probability < 0 || m.emission_probability > 1) {
        throw std::domain_error("emission probability must lie in [0,1]");
    }
    const Rat p = m.emission_probability;
    // Emitted triplets are played perfectly by the ideal quantum team.
    return p + (1 - p) * lhv::mixed_win_prob(m.fallback, spec);
}

Rat communication_win_prob(const CommunicationModel& m, const GameSpec& spec) {
    if (m.channels.any_channel_open()) {
        return Rat(1);
    }
    return lhv::classical_value(spec).value;
}

} // namespace ghzlab::loopholes
