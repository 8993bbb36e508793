#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ghzlab/errors.hpp"
#include "ghzlab/loopholes.hpp"
#include "ghzlab/rng.hpp"

#include <set>
#include <string>
#include <vector>

using namespace ghzlab;
using namespace ghzlab::loopholes;

namespace {

// A hand-built certainty-faking ensemble: six strategies, each blind to one
// (player, question) slot and perfect on the two surviving triples, mixed
// uniformly. Verified entry by entry in the tests below.
ExtendedEnsemble handcrafted_witness() {
    ExtendedEnsemble e;
    for (const char* s : {"0+++++", "-0+-++", "++0+++", "-++0++", "++++0+", "-++++0"}) {
        e.components.emplace_back(ExtendedStrategy::from_string(s), Rat(1, 6));
    }
    return e;
}

int no_detect_count(const ExtendedStrategy& s) {
    int n = 0;
    for (int player = 0; player < 3; ++player) {
        for (int q = 0; q < 2; ++q) {
            n += s.answers[player][q] == Answer::NoDetect;
        }
    }
    return n;
}

} // namespace

TEST_CASE("729 distinct extended strategies") {
    std::set<std::string> seen;
    for (int i = 0; i < 729; ++i) {
        const ExtendedStrategy s = ExtendedStrategy::from_index(i);
        seen.insert(s.to_string());
        CHECK(ExtendedStrategy::from_string(s.to_string()) == s);
    }
    CHECK(seen.size() == 729);
    CHECK_THROWS_AS(ExtendedStrategy::from_index(729), std::domain_error);
}

TEST_CASE("postselected stats: always-answering ensemble reduces to the LHV value") {
    const GameSpec game = make_ghz_game();
    const auto stats =
        postselected_stats(ExtendedEnsemble::point_mass(ExtendedStrategy::from_string("++++++")),
                           game);
    REQUIRE(stats.conditional_win.has_value());
    CHECK(*stats.conditional_win == Rat(3, 4));
    CHECK(stats.all_detected_rate == 1);
    for (int player = 0; player < 3; ++player) {
        CHECK(stats.per_player_detection[player] == 1);
    }
}

TEST_CASE("postselected stats: one blind slot fakes certainty at half the rate") {
    const GameSpec game = make_ghz_game();
    // Player 1 ducks the X question; the surviving triples YXY and YYX are
    // both satisfied by all-plus answers.
    const auto stats = postselected_stats(
        ExtendedEnsemble::point_mass(ExtendedStrategy::from_string("0+++++")), game);
    REQUIRE(stats.conditional_win.has_value());
    CHECK(*stats.conditional_win == Rat(1));
    CHECK(stats.per_player_detection[0] == Rat(1, 2));
    CHECK(stats.per_player_detection[1] == 1);
    CHECK(stats.per_player_detection[2] == 1);
    CHECK(stats.all_detected_rate == Rat(1, 2));
}

TEST_CASE("postselected stats edge cases") {
    const GameSpec game = make_ghz_game();
    CHECK_THROWS_AS(postselected_stats(ExtendedEnsemble{}, game), std::domain_error);

    ExtendedEnsemble bad;
    bad.components.emplace_back(ExtendedStrategy::from_string("++++++"), Rat(1, 2));
    CHECK_THROWS_AS(postselected_stats(bad, game), std::domain_error);

    // All answers refused: no trial survives, conditional win undefined.
    const auto stats = postselected_stats(
        ExtendedEnsemble::point_mass(ExtendedStrategy::from_string("000000")), game);
    CHECK(!stats.conditional_win.has_value());
    CHECK(stats.all_detected_rate == 0);
}

TEST_CASE("never-losing strategies must refuse at least one slot") {
    const GameSpec game = make_ghz_game();
    int pool_size = 0;
    for (int i = 0; i < 729; ++i) {
        const ExtendedStrategy s = ExtendedStrategy::from_index(i);
        if (never_loses_postselected(s, game)) {
            ++pool_size;
            // The parity obstruction: a fully-detecting strategy cannot win
            // all four constraints, so the never-losing set has no such member.
            CHECK(no_detect_count(s) >= 1);
        }
    }
    CHECK(pool_size > 0);
}

// Exact value of the detection threshold, proven from first principles:
//  - every never-losing strategy has >= 1 refused slot, so under any mixture
//    the six detection rates sum to at most 5 and their minimum is <= 5/6;
//  - the handcrafted ensemble achieves exactly 5/6 on every slot.
TEST_CASE("handcrafted witness pins the threshold at 5/6") {
    const GameSpec game = make_ghz_game();
    const ExtendedEnsemble witness = handcrafted_witness();

    for (const auto& [strategy, weight] : witness.components) {
        CHECK(never_loses_postselected(strategy, game));
        CHECK(no_detect_count(strategy) == 1);
    }

    const auto stats = postselected_stats(witness, game);
    REQUIRE(stats.conditional_win.has_value());
    CHECK(*stats.conditional_win == Rat(1));
    CHECK(stats.all_detected_rate == Rat(1, 2));

    // Per-slot detection rates: each slot is refused by exactly one of the
    // six components.
    for (int player = 0; player < 3; ++player) {
        for (Question q : {Question::X, Question::Y}) {
            Rat rate = 0;
            for (const auto& [strategy, weight] : witness.components) {
                if (strategy.answer(player, q) != Answer::NoDetect) {
                    rate += weight;
                }
            }
            CHECK(rate == Rat(5, 6));
        }
    }
}

TEST_CASE("detection threshold search certifies 5/6") {
    const GameSpec game = make_ghz_game();
    const double tol = 1e-6;
    const ThresholdResult result = detection_threshold(game, tol);

    // The bisection answer agrees with the first-principles value.
    CHECK(std::fabs(result.eta_star - 5.0 / 6.0) <= tol);
    CHECK(result.certified_feasible_at == Rat(5, 6));
    CHECK(result.certified_infeasible_above == Rat(5, 6));

    // The exact witness achieves certainty.
    const auto stats = postselected_stats(result.witness, game);
    REQUIRE(stats.conditional_win.has_value());
    CHECK(*stats.conditional_win == Rat(1));

    // Bracket attested and consistent.
    CHECK(result.bracket_infeasible - result.bracket_feasible <= tol);
    CHECK(result.bracket_feasible <= result.eta_star + tol);
    CHECK(result.eta_star <= result.bracket_infeasible + tol);

    // Feasible at 1/2, infeasible at 1 (both probed during bisection).
    bool saw_half = false, saw_one = false;
    double max_feasible = 0.0, min_infeasible = 1.0;
    for (const auto& [eta, ok] : result.probes) {
        if (eta == 0.5) {
            saw_half = true;
            CHECK(ok);
        }
        if (eta == 1.0) {
            saw_one = true;
            CHECK(!ok);
        }
        if (ok) {
            max_feasible = std::max(max_feasible, eta);
        } else {
            min_infeasible = std::min(min_infeasible, eta);
        }
    }
    CHECK(saw_half);
    CHECK(saw_one);
    CHECK(max_feasible <= min_infeasible); // monotone feasibility
}

TEST_CASE("threshold is invariant under reweighting the questions") {
    // The feasibility constraints depend only on which triples can be asked,
    // not on how often, so a lopsided canonical game keeps eta* = 5/6.
    const GameSpec lopsided({
        {QuestionTriple::from_string("XXX"), Rat(1, 2), -1},
        {QuestionTriple::from_string("XYY"), Rat(1, 6), +1},
        {QuestionTriple::from_string("YXY"), Rat(1, 6), +1},
        {QuestionTriple::from_string("YYX"), Rat(1, 6), +1},
    });
    const ThresholdResult result = detection_threshold(lopsided, 1e-4);
    CHECK(result.certified_feasible_at == Rat(5, 6));
    CHECK(result.certified_infeasible_above == Rat(5, 6));
    const auto stats = postselected_stats(result.witness, lopsided);
    REQUIRE(stats.conditional_win.has_value());
    CHECK(*stats.conditional_win == Rat(1));
}

TEST_CASE("a game winnable outright needs no refusals at all") {
    // Same question support, but every triple wants product +1: the all-plus
    // table wins everything fully detected, so eta* = 1.
    const GameSpec easy({
        {QuestionTriple::from_string("XXX"), Rat(1, 4), +1},
        {QuestionTriple::from_string("XYY"), Rat(1, 4), +1},
        {QuestionTriple::from_string("YXY"), Rat(1, 4), +1},
        {QuestionTriple::from_string("YYX"), Rat(1, 4), +1},
    });
    const ThresholdResult result = detection_threshold(easy, 1e-6);
    CHECK(result.certified_feasible_at == Rat(1));
    CHECK(result.certified_infeasible_above == Rat(1));
    CHECK(result.eta_star == 1.0);
}

TEST_CASE("threshold input validation") {
    const GameSpec game = make_ghz_game();
    CHECK_THROWS_AS(detection_threshold(game, 0.0), std::domain_error);
    CHECK_THROWS_AS(detection_threshold(game, -1e-3), std::domain_error);

    const GameSpec lopsided({{QuestionTriple::from_string("XXX"), Rat(1), -1}});
    CHECK_THROWS_AS(detection_threshold(lopsided, 1e-6), std::domain_error);
}

TEST_CASE("post-selection can only help") {
    const GameSpec game = make_ghz_game();
    // Optimum over always-answering ensembles is the classical 3/4; with
    // refusals on the table the adversary reaches conditional certainty.
    const auto witness_stats = postselected_stats(handcrafted_witness(), game);
    CHECK(*witness_stats.conditional_win == 1);
    CHECK(Rat(1) > lhv::classical_value(game).value);

    // And always-answering ensembles never exceed the classical value.
    RngStream rng(99, 0);
    for (int round = 0; round < 30; ++round) {
        ExtendedEnsemble e;
        const int parts = 1 + static_cast<int>(rng.next_u32() % 5);
        std::vector<Rat> raw;
        Rat total = 0;
        for (int i = 0; i < parts; ++i) {
            raw.emplace_back(1 + rng.next_u32() % 50);
            total += raw.back();
        }
        for (int i = 0; i < parts; ++i) {
            // Sample only from the 64 fully-detecting tables.
            const int idx = static_cast<int>(rng.next_u32() % 64);
            std::string s;
            for (int k = 5; k >= 0; --k) {
                s += ((idx >> k) & 1) ? '-' : '+';
            }
            e.components.emplace_back(ExtendedStrategy::from_string(s), raw[i] / total);
        }
        const auto stats = postselected_stats(e, game);
        REQUIRE(stats.conditional_win.has_value());
        CHECK(*stats.conditional_win <= Rat(3, 4));
    }
}

TEST_CASE("source model win probability is affine in the emission rate") {
    const GameSpec game = make_ghz_game();
    const lhv::MixedStrategy best =
        lhv::MixedStrategy::point_mass(lhv::classical_value(game).maximizers.front());

    CHECK(source_win_prob({Rat(1), best}, game) == Rat(1));
    CHECK(source_win_prob({Rat(0), best}, game) == Rat(3, 4));
    CHECK(source_win_prob({Rat(1, 2), best}, game) == Rat(7, 8));

    for (int k = 0; k <= 10; ++k) {
        const Rat p(k, 10);
        CHECK(source_win_prob({p, best}, game) == (3 + p) / 4);
        if (k < 10) {
            CHECK(source_win_prob({p, best}, game) < 1);
        }
    }

    CHECK_THROWS_AS(source_win_prob({Rat(3, 2), best}, game), std::domain_error);
}

TEST_CASE("communication adversary wins iff a channel is open") {
    const GameSpec game = make_ghz_game();

    CommunicationModel rowe{spacetime::audit(spacetime::make_preset("rowe"))};
    CHECK(communication_win_prob(rowe, game) == Rat(1));

    CommunicationModel weihs{spacetime::audit(spacetime::make_preset("weihs"))};
    CHECK(communication_win_prob(weihs, game) == Rat(1));

    CommunicationModel galaxy{spacetime::audit(spacetime::make_preset("galaxy"))};
    CHECK(communication_win_prob(galaxy, game) == Rat(3, 4));

    CommunicationModel ideal{spacetime::audit(spacetime::make_preset("ideal"))};
    CHECK(communication_win_prob(ideal, game) == Rat(3, 4));
}
