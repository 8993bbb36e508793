#pragma once

#include "ghzlab/rational.hpp"
#include "ghzlab/rng.hpp"

#include "json.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace ghzlab {

/// One of the two questions a referee may ask a player.
enum class Question : std::uint8_t { X, Y };

/// A player's answer. NoDetect stands for "my detector did not fire" and is
/// legal only for the loophole adversaries; the core win predicate treats it
/// as an automatic loss.
enum class Answer : std::int8_t { Plus = +1, Minus = -1, NoDetect = 0 };

char question_char(Question q);
Question question_from_char(char c);
char answer_char(Answer a);
Answer answer_from_char(char c);

/// The referee's question to the whole team, ordered by player index.
struct QuestionTriple {
    std::array<Question, 3> q;

    auto operator<=>(const QuestionTriple&) const = default;

    std::string to_string() const; // "XYY"
    static QuestionTriple from_string(const std::string& s);
};

using AnswerTriple = std::array<Answer, 3>;

struct WeightedTriple {
    QuestionTriple questions;
    Rat weight;
    int target_parity; // +1 or -1
};

/// The rules of a three-player parity game: which question triples may be
/// asked, how often, and which answer-product wins each of them.
class GameSpec {
  public:
    /// Validates: weights nonnegative and summing to exactly 1, triples
    /// distinct, targets in {+1,-1}. Throws ValidationError otherwise.
    GameSpec(std::vector<WeightedTriple> support, int player_count = 3);

    int player_count() const { return player_count_; }
    const std::vector<WeightedTriple>& support() const { return support_; }

    bool contains(const QuestionTriple& q) const;
    /// Throws std::domain_error if q is not in the support.
    const WeightedTriple& find(const QuestionTriple& q) const;

    nlohmann::ordered_json to_json() const;
    static GameSpec from_json(const nlohmann::json& j);

  private:
    std::vector<WeightedTriple> support_;
    int player_count_;
};

/// The canonical game: XXX wants product -1; XYY, YXY, YYX want +1;
/// all four asked with weight 1/4.
GameSpec make_ghz_game();

/// True iff all three answers are +-1 and their product equals the triple's
/// target parity. Any NoDetect loses. Throws std::domain_error when q is not
/// in the support.
bool wins(const GameSpec& spec, const QuestionTriple& q, const AnswerTriple& a);

/// Draws a question triple with probability equal to its weight.
QuestionTriple sample_question(const GameSpec& spec, RngStream& rng);

} // namespace ghzlab
