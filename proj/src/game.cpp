#include "ghzlab/game.hpp"

#include "ghzlab/errors.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace ghzlab {

char question_char(Question q) {
    return q == Question::X ? 'X' : 'Y';
}

Question question_from_char(char c) {
    switch (c) {
    case 'X':
        return Question::X;
    case 'Y':
        return Question::Y;
    default:
        throw ValidationError(std::string("bad question character: '") + c + "'");
    }
}

char answer_char(Answer a) {
    switch (a) {
    case Answer::Plus:
        return '+';
    case Answer::Minus:
        return '-';
    default:
        return '0';
    }
}

Answer answer_from_char(char c) {
    switch (c) {
    case '+':
        return Answer::Plus;
    case '-':
        return Answer::Minus;
    case '0':
        return Answer::NoDetect;
    default:
        throw ValidationError(std::string("bad answer character: '") + c + "'");
    }
}

std::string QuestionTriple::to_string() const {
    return {question_char(q[0]), question_char(q[1]), question_char(q[2])};
}

QuestionTriple QuestionTriple::from_string(const std::string& s) {
    if (s.size() != 3) {
        throw ValidationError("question triple must be 3 characters, got '" + s + "'");
    }
    return QuestionTriple{
        {question_from_char(s[0]), question_from_char(s[1]), question_from_char(s[2])}};
}

GameSpec::GameSpec(std::vector<WeightedTriple> support, int player_count)
    : support_(std::move(support)), player_count_(player_count) {
    if (player_count_ != 3) {
        throw ValidationError("only 3-player games are supported");
    }
    if (support_.empty()) {
        throw ValidationError("game support is empty");
    }
    Rat total = 0;
    std::set<QuestionTriple> seen;
    for (const auto& entry : support_) {
        if (entry.weight < 0) {
            throw ValidationError("negative question weight " + rat_to_string(entry.weight) +
                                  " on " + entry.questions.to_string());
        }
        if (entry.target_parity != 1 && entry.target_parity != -1) {
            throw ValidationError("target parity must be +1 or -1 on " +
                                  entry.questions.to_string());
        }
        if (!seen.insert(entry.questions).second) {
            throw ValidationError("duplicate question triple " + entry.questions.to_string());
        }
        total += entry.weight;
    }
    if (total != 1) {
        throw ValidationError("question weights sum to " + rat_to_string(total) + ", expected 1");
    }
}

bool GameSpec::contains(const QuestionTriple& q) const {
    return std::any_of(support_.begin(), support_.end(),
                       [&](const WeightedTriple& w) { return w.questions == q; });
}

const WeightedTriple& GameSpec::find(const QuestionTriple& q) const {
    for (const auto& entry : support_) {
        if (entry.questions == q) {
            return entry;
        }
    }
    throw std::domain_error("question triple " + q.to_string() + " is not in the game support");
}

nlohmann::ordered_json GameSpec::to_json() const {
    nlohmann::ordered_json j;
    j["players"] = player_count_;
    j["support"] = nlohmann::ordered_json::array();
    for (const auto& entry : support_) {
        nlohmann::ordered_json e;
        e["questions"] = entry.questions.to_string();
        e["weight"] = rat_to_string(entry.weight);
        e["target"] = entry.target_parity;
        j["support"].push_back(e);
    }
    return j;
}

GameSpec GameSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("support")) {
        throw ValidationError("game JSON must be an object with a 'support' array");
    }
    const int players = j.value("players", 3);
    std::vector<WeightedTriple> support;
    for (const auto& e : j.at("support")) {
        WeightedTriple entry;
        entry.questions = QuestionTriple::from_string(e.at("questions").get<std::string>());
        const auto& w = e.at("weight");
        if (w.is_string()) {
            entry.weight = rat_from_string(w.get<std::string>());
        } else if (w.is_number_integer()) {
            entry.weight = Rat(w.get<long long>());
        } else {
            throw ValidationError("weights must be rational strings like \"1/4\"");
        }
        entry.target_parity = e.at("target").get<int>();
        support.push_back(std::move(entry));
    }
    return GameSpec(std::move(support), players);
}

GameSpec make_ghz_game() {
    const Rat quarter(1, 4);
    std::vector<WeightedTriple> support = {
        {QuestionTriple::from_string("XXX"), quarter, -1},
        {QuestionTriple::from_string("XYY"), quarter, +1},
        {QuestionTriple::from_string("YXY"), quarter, +1},
        {QuestionTriple::from_string("YYX"), quarter, +1},
    };
    return GameSpec(std::move(support));
}

bool wins(const GameSpec& spec, const QuestionTriple& q, const AnswerTriple& a) {
    const WeightedTriple& entry = spec.find(q);
    int product = 1;
    for (const Answer ans : a) {
        if (ans == Answer::NoDetect) {
            return false;
        }
        product *= static_cast<int>(ans);
    }
    return product == entry.target_parity;
}

QuestionTriple sample_question(const GameSpec& spec, RngStream& rng) {
    const double u = rng.next_double();
    double cumulative = 0.0;
    for (const auto& entry : spec.support()) {
        cumulative += rat_to_double(entry.weight);
        if (u < cumulative) {
            return entry.questions;
        }
    }
    return spec.support().back().questions;
}

} // namespace ghzlab
