#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ghzlab/errors.hpp"
#include "ghzlab/game.hpp"

#include <cmath>
#include <map>

using namespace ghzlab;

namespace {

AnswerTriple answers(int a, int b, int c) {
    auto conv = [](int v) { return v > 0 ? Answer::Plus : Answer::Minus; };
    return {conv(a), conv(b), conv(c)};
}

} // namespace

TEST_CASE("canonical game support") {
    const GameSpec game = make_ghz_game();
    CHECK(game.player_count() == 3);
    REQUIRE(game.support().size() == 4);

    const auto& xxx = game.find(QuestionTriple::from_string("XXX"));
    CHECK(xxx.target_parity == -1);
    CHECK(xxx.weight == Rat(1, 4));

    for (const char* name : {"XYY", "YXY", "YYX"}) {
        const auto& entry = game.find(QuestionTriple::from_string(name));
        CHECK(entry.target_parity == +1);
        CHECK(entry.weight == Rat(1, 4));
    }

    CHECK(!game.contains(QuestionTriple::from_string("YYY")));
    CHECK(!game.contains(QuestionTriple::from_string("XXY")));

    Rat total = 0;
    for (const auto& entry : game.support()) {
        total += entry.weight;
    }
    CHECK(total == 1);
}

TEST_CASE("win predicate") {
    const GameSpec game = make_ghz_game();
    CHECK(wins(game, QuestionTriple::from_string("XXX"), answers(+1, +1, -1)));
    CHECK(wins(game, QuestionTriple::from_string("XYY"), answers(+1, +1, +1)));
    CHECK(!wins(game, QuestionTriple::from_string("XXX"), answers(+1, +1, +1)));
    CHECK(!wins(game, QuestionTriple::from_string("XYY"),
                AnswerTriple{Answer::Plus, Answer::NoDetect, Answer::Plus}));
    CHECK_THROWS_AS(wins(game, QuestionTriple::from_string("YYY"), answers(1, 1, 1)),
                    std::domain_error);
}

TEST_CASE("parity splits the answer cube evenly") {
    const GameSpec game = make_ghz_game();
    for (const auto& entry : game.support()) {
        int winners = 0;
        for (int bits = 0; bits < 8; ++bits) {
            const AnswerTriple a = answers(bits & 1 ? -1 : 1, bits & 2 ? -1 : 1,
                                           bits & 4 ? -1 : 1);
            winners += wins(game, entry.questions, a);
        }
        CHECK(winners == 4);
    }
}

TEST_CASE("validation rejects bad specs") {
    auto entry = [](const char* q, const Rat& w, int t) {
        return WeightedTriple{QuestionTriple::from_string(q), w, t};
    };
    CHECK_THROWS_AS(GameSpec({entry("XXX", Rat(1, 2), -1)}), ValidationError); // sums to 1/2
    CHECK_THROWS_AS(GameSpec({entry("XXX", Rat(1, 2), -1), entry("XXX", Rat(1, 2), -1)}),
                    ValidationError); // duplicate
    CHECK_THROWS_AS(GameSpec({entry("XXX", Rat(-1, 2), -1), entry("XYY", Rat(3, 2), 1)}),
                    ValidationError); // negative weight
    CHECK_THROWS_AS(GameSpec({entry("XXX", Rat(1), 2)}), ValidationError); // bad parity
    CHECK_THROWS_AS(GameSpec({entry("XXX", Rat(1), -1)}, 4), ValidationError); // player count
}

TEST_CASE("json round trip") {
    const GameSpec game = make_ghz_game();
    const auto j = game.to_json();
    CHECK(j["players"] == 3);
    CHECK(j["support"][0]["questions"] == "XXX");
    CHECK(j["support"][0]["weight"] == "1/4");
    CHECK(j["support"][0]["target"] == -1);

    const GameSpec back = GameSpec::from_json(j);
    CHECK(back.support().size() == 4);
    CHECK(back.find(QuestionTriple::from_string("XXX")).weight == Rat(1, 4));
    CHECK(back.to_json() == j);
}

TEST_CASE("question sampling is deterministic") {
    const GameSpec game = make_ghz_game();
    RngStream a(7, 0), b(7, 0);
    for (int i = 0; i < 200; ++i) {
        CHECK(sample_question(game, a) == sample_question(game, b));
    }
}

TEST_CASE("point-mass weights always yield their triple") {
    const GameSpec game({
        {QuestionTriple::from_string("XXX"), Rat(1), -1},
        {QuestionTriple::from_string("XYY"), Rat(0), +1},
    });
    RngStream rng(3, 0);
    for (int i = 0; i < 100; ++i) {
        CHECK(sample_question(game, rng) == QuestionTriple::from_string("XXX"));
    }
}

TEST_CASE("rational helpers") {
    CHECK(rat_from_string("3/4") == Rat(3, 4));
    CHECK(rat_from_string("-1/2") == Rat(-1, 2));
    CHECK(rat_from_string("2") == Rat(2));
    CHECK(rat_to_string(Rat(3, 4)) == "3/4");
    CHECK(rat_to_string(Rat(2)) == "2");
    CHECK_THROWS_AS(rat_from_string("0.25"), ValidationError);
    CHECK_THROWS_AS(rat_from_string("1/0"), ValidationError);
    CHECK_THROWS_AS(rat_from_string(""), ValidationError);

    CHECK(rat_snap(0.75) == Rat(3, 4));
    CHECK(rat_snap(1.0 / 3.0) == Rat(1, 3));
    CHECK(rat_snap(5.0 / 6.0) == Rat(5, 6));
    CHECK(rat_snap(0.0) == Rat(0));
    CHECK(rat_snap(-0.125) == Rat(-1, 8));
}

TEST_CASE("sampled frequencies stay within 4 sigma of the weights") {
    const GameSpec game = make_ghz_game();
    const int n = 100000;
    std::map<QuestionTriple, int> counts;
    RngStream rng(2024, 0);
    for (int i = 0; i < n; ++i) {
        counts[sample_question(game, rng)]++;
    }
    REQUIRE(counts.size() == 4);
    // Per-cell binomial: mean n/4, sigma = sqrt(n * 1/4 * 3/4).
    const double sigma = std::sqrt(n * 0.25 * 0.75);
    for (const auto& [triple, count] : counts) {
        CHECK(std::abs(count - n / 4.0) < 4.0 * sigma);
    }
}
