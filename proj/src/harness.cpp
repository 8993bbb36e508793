#include "ghzlab/harness.hpp"

#include "ghzlab/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace ghzlab::harness {

std::string scoring_name(Scoring s) {
    return s == Scoring::Strict ? "strict" : "postselect";
}

Scoring scoring_from_name(const std::string& name) {
    if (name == "strict") {
        return Scoring::Strict;
    }
    if (name == "postselect") {
        return Scoring::Postselect;
    }
    throw ValidationError("unknown scoring mode '" + name + "'");
}

nlohmann::ordered_json RunReport::to_json() const {
    nlohmann::ordered_json j;
    j["trials"] = trials;
    j["wins"] = wins;
    j["discarded"] = discarded;
    j["win_rate"] = win_rate;
    j["interval"] = {{"lo", interval.lo}, {"hi", interval.hi}, {"confidence", interval.confidence}};
    j["p_value_vs_bound"] = p_value_vs_bound;
    j["log10_p_value_vs_bound"] = log10_p_value_vs_bound;
    j["bound"] = rat_to_string(bound);
    j["master_seed"] = master_seed;
    j["strategy"] = strategy;
    j["scoring"] = scoring_name(scoring);
    return j;
}

namespace {

class DeterministicClassical final : public TrialStrategy {
  public:
    explicit DeterministicClassical(lhv::LocalStrategy s) : s_(s) {}
    AnswerTriple play(const QuestionTriple& q, RngStream&) const override {
        AnswerTriple a;
        for (int player = 0; player < 3; ++player) {
            a[player] = s_.answer(player, q.q[player]) > 0 ? Answer::Plus : Answer::Minus;
        }
        return a;
    }
    std::string descriptor() const override { return "classical:" + s_.to_string(); }

  private:
    lhv::LocalStrategy s_;
};

class MixedClassical final : public TrialStrategy {
  public:
    explicit MixedClassical(lhv::MixedStrategy m) : m_(std::move(m)) {
        double acc = 0.0;
        for (const auto& [strategy, weight] : m_.components) {
            acc += rat_to_double(weight);
            cdf_.push_back(acc);
        }
    }
    AnswerTriple play(const QuestionTriple& q, RngStream& rng) const override {
        const std::size_t pick = pick_component(rng.next_double());
        AnswerTriple a;
        for (int player = 0; player < 3; ++player) {
            a[player] = m_.components[pick].first.answer(player, q.q[player]) > 0 ? Answer::Plus
                                                                                  : Answer::Minus;
        }
        return a;
    }
    std::string descriptor() const override {
        return "classical-mixture[" + std::to_string(m_.components.size()) + "]";
    }

  private:
    std::size_t pick_component(double u) const {
        for (std::size_t i = 0; i < cdf_.size(); ++i) {
            if (u < cdf_[i]) {
                return i;
            }
        }
        return cdf_.size() - 1;
    }
    lhv::MixedStrategy m_;
    std::vector<double> cdf_;
};

class QuantumTeam final : public TrialStrategy {
  public:
    QuantumTeam(const GameSpec& spec, quantum::StateVector state,
                quantum::MeasurementAssignment assignment)
        : state_(std::move(state)), assignment_(assignment) {
        // One outcome distribution per supported question triple, computed up
        // front; trials then only invert a CDF.
        for (const auto& entry : spec.support()) {
            const auto obs = assignment_.for_triple(entry.questions);
            const auto dist = quantum::joint_outcome_distribution(state_, obs);
            std::vector<double> cdf(dist.size());
            double acc = 0.0;
            for (std::size_t i = 0; i < dist.size(); ++i) {
                acc += dist.prob(i);
                cdf[i] = acc;
            }
            cdfs_[entry.questions] = std::move(cdf);
        }
    }

    AnswerTriple play(const QuestionTriple& q, RngStream& rng) const override {
        const auto& cdf = cdfs_.at(q);
        const double u = rng.next_double();
        std::size_t outcome = cdf.size() - 1;
        for (std::size_t i = 0; i < cdf.size(); ++i) {
            if (u < cdf[i]) {
                outcome = i;
                break;
            }
        }
        AnswerTriple a;
        for (int player = 0; player < 3; ++player) {
            const bool minus = (outcome >> (2 - player)) & 1u;
            a[player] = minus ? Answer::Minus : Answer::Plus;
        }
        return a;
    }
    std::string descriptor() const override { return "quantum"; }

  private:
    quantum::StateVector state_;
    quantum::MeasurementAssignment assignment_;
    std::map<QuestionTriple, std::vector<double>> cdfs_;
};

class ExtendedAdversary final : public TrialStrategy {
  public:
    explicit ExtendedAdversary(loopholes::ExtendedEnsemble e) : e_(std::move(e)) {
        double acc = 0.0;
        for (const auto& [strategy, weight] : e_.components) {
            acc += rat_to_double(weight);
            cdf_.push_back(acc);
        }
    }
    AnswerTriple play(const QuestionTriple& q, RngStream& rng) const override {
        const double u = rng.next_double();
        std::size_t pick = cdf_.size() - 1;
        for (std::size_t i = 0; i < cdf_.size(); ++i) {
            if (u < cdf_[i]) {
                pick = i;
                break;
            }
        }
        AnswerTriple a;
        for (int player = 0; player < 3; ++player) {
            a[player] = e_.components[pick].first.answer(player, q.q[player]);
        }
        return a;
    }
    std::string descriptor() const override {
        return "extended-ensemble[" + std::to_string(e_.components.size()) + "]";
    }

  private:
    loopholes::ExtendedEnsemble e_;
    std::vector<double> cdf_;
};

class SourceAdversary final : public TrialStrategy {
  public:
    SourceAdversary(const GameSpec& spec, loopholes::SourceModel model)
        : p_(rat_to_double(model.emission_probability)),
          quantum_(spec, quantum::ghz_state(3, -1), quantum::MeasurementAssignment::standard()),
          fallback_(std::move(model.fallback)) {}

    AnswerTriple play(const QuestionTriple& q, RngStream& rng) const override {
        if (rng.next_double() < p_) {
            return quantum_.play(q, rng);
        }
        return fallback_.play(q, rng);
    }
    std::string descriptor() const override { return "source"; }

  private:
    double p_;
    QuantumTeam quantum_;
    MixedClassical fallback_;
};

class CommunicationAdversary final : public TrialStrategy {
  public:
    CommunicationAdversary(const GameSpec& spec, loopholes::CommunicationModel model)
        : open_(model.channels.any_channel_open()), spec_(spec),
          best_(lhv::classical_value(spec).maximizers.front()) {}

    AnswerTriple play(const QuestionTriple& q, RngStream& rng) const override {
        if (!open_) {
            AnswerTriple a;
            for (int player = 0; player < 3; ++player) {
                a[player] = best_.answer(player, q.q[player]) > 0 ? Answer::Plus : Answer::Minus;
            }
            return a;
        }
        // With a channel open the adversary reproduces the quantum statistics:
        // a uniform draw over the four answer triples with the right parity.
        const auto& entry = spec_.find(q);
        const std::uint32_t r = rng.next_u32() & 3u;
        int a0 = (r & 1u) ? -1 : +1;
        int a1 = (r & 2u) ? -1 : +1;
        int a2 = entry.target_parity * a0 * a1;
        AnswerTriple a;
        a[0] = a0 > 0 ? Answer::Plus : Answer::Minus;
        a[1] = a1 > 0 ? Answer::Plus : Answer::Minus;
        a[2] = a2 > 0 ? Answer::Plus : Answer::Minus;
        return a;
    }
    std::string descriptor() const override {
        return open_ ? "communication:open" : "communication:closed";
    }

  private:
    bool open_;
    GameSpec spec_;
    lhv::LocalStrategy best_;
};

} // namespace

std::unique_ptr<TrialStrategy> make_classical_strategy(lhv::LocalStrategy s) {
    return std::make_unique<DeterministicClassical>(s);
}

std::unique_ptr<TrialStrategy> make_classical_strategy(lhv::MixedStrategy m) {
    return std::make_unique<MixedClassical>(std::move(m));
}

std::unique_ptr<TrialStrategy> make_best_classical_strategy(const GameSpec& spec) {
    return std::make_unique<DeterministicClassical>(lhv::classical_value(spec).maximizers.front());
}

std::unique_ptr<TrialStrategy> make_quantum_strategy(const GameSpec& spec,
                                                     quantum::StateVector state,
                                                     quantum::MeasurementAssignment assignment) {
    return std::make_unique<QuantumTeam>(spec, std::move(state), assignment);
}

std::unique_ptr<TrialStrategy> make_extended_strategy(loopholes::ExtendedEnsemble ensemble) {
    return std::make_unique<ExtendedAdversary>(std::move(ensemble));
}

std::unique_ptr<TrialStrategy> make_source_strategy(const GameSpec& spec,
                                                    loopholes::SourceModel model) {
    return std::make_unique<SourceAdversary>(spec, std::move(model));
}

std::unique_ptr<TrialStrategy> make_communication_strategy(const GameSpec& spec,
                                                           loopholes::CommunicationModel model) {
    return std::make_unique<CommunicationAdversary>(spec, std::move(model));
}

RunOutput run_trials(const GameSpec& spec, const TrialStrategy& strategy, const RunOptions& opts) {
    if (opts.trials == 0) {
        throw std::domain_error("trial count must be at least 1");
    }
    if (opts.workers < 1) {
        throw std::domain_error("worker count must be at least 1");
    }

    RunOutput out;
    if (opts.keep_records) {
        out.records.resize(opts.trials);
    }

    struct Tally {
        std::uint64_t wins = 0;
        std::uint64_t discarded = 0;
    };
    const int workers = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(opts.workers), opts.trials));
    std::vector<Tally> tallies(workers);

    auto run_range = [&](int worker, std::uint64_t begin, std::uint64_t end) {
        Tally& tally = tallies[worker];
        for (std::uint64_t i = begin; i < end; ++i) {
            RngStream rng(opts.master_seed, i);
            const QuestionTriple q = sample_question(spec, rng);
            const AnswerTriple a = strategy.play(q, rng);
            const bool detected =
                std::all_of(a.begin(), a.end(), [](Answer x) { return x != Answer::NoDetect; });
            const bool won = wins(spec, q, a);
            if (!detected && opts.scoring == Scoring::Postselect) {
                ++tally.discarded;
            } else if (won) {
                ++tally.wins;
            }
            if (opts.keep_records) {
                out.records[i] = TrialRecord{i, q, a, won};
            }
        }
    };

    if (workers == 1) {
        run_range(0, 0, opts.trials);
    } else {
        std::vector<std::thread> threads;
        const std::uint64_t chunk = (opts.trials + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const std::uint64_t begin = chunk * static_cast<std::uint64_t>(w);
            const std::uint64_t end = std::min(opts.trials, begin + chunk);
            threads.emplace_back(run_range, w, begin, end);
        }
        for (auto& t : threads) {
            t.join();
        }
    }

    RunReport& report = out.report;
    report.trials = opts.trials;
    for (const Tally& t : tallies) {
        report.wins += t.wins;
        report.discarded += t.discarded;
    }
    report.master_seed = opts.master_seed;
    report.strategy = strategy.descriptor();
    report.scoring = opts.scoring;
    report.bound = opts.bound;

    const std::uint64_t scored = opts.trials - report.discarded;
    if (scored == 0) {
        report.win_rate = 0.0;
        report.interval = Interval{0.0, 1.0, opts.confidence};
        report.p_value_vs_bound = 1.0;
        report.log10_p_value_vs_bound = 0.0;
        return out;
    }
    report.win_rate = static_cast<double>(report.wins) / static_cast<double>(scored);
    report.interval = wilson_interval(report.wins, scored, opts.confidence);
    const TailProbability tail = binomial_test_geq(report.wins, scored, opts.bound);
    report.p_value_vs_bound = tail.p_value;
    report.log10_p_value_vs_bound = tail.log10_p_value;
    return out;
}

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
    out << "index,q1,q2,q3,a1,a2,a3,won\n";
    for (const TrialRecord& r : records) {
        out << r.index;
        for (int player = 0; player < 3; ++player) {
            out << ',' << question_char(r.question.q[player]);
        }
        for (int player = 0; player < 3; ++player) {
            out << ',';
            switch (r.answers[player]) {
            case Answer::Plus:
                out << "1";
                break;
            case Answer::Minus:
                out << "-1";
                break;
            case Answer::NoDetect:
                out << "ND";
                break;
            }
        }
        out << ',' << (r.won ? 1 : 0) << '\n';
    }
}

Interval wilson_interval(std::uint64_t wins, std::uint64_t n, double confidence) {
    if (n == 0) {
        throw std::domain_error("Wilson interval needs at least one trial");
    }
    if (wins > n) {
        throw std::domain_error("wins exceed trial count");
    }
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw std::domain_error("confidence must lie strictly between 0 and 1");
    }
    const boost::math::normal_distribution<double> normal;
    const double z = boost::math::quantile(normal, 0.5 * (1.0 + confidence));
    const double nn = static_cast<double>(n);
    const double phat = static_cast<double>(wins) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (phat + z2 / (2.0 * nn)) / denom;
    const double half =
        z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
    Interval out;
    out.lo = std::max(0.0, center - half);
    out.hi = std::min(1.0, center + half);
    out.confidence = confidence;
    return out;
}

TailProbability binomial_test_geq(std::uint64_t wins, std::uint64_t n, const Rat& p0) {
    if (n == 0) {
        throw std::domain_error("binomial test needs at least one trial");
    }
    if (wins > n) {
        throw std::domain_error("wins exceed trial count");
    }
    if (p0 < 0 || p0 > 1) {
        throw std::domain_error("null win probability must lie in [0,1]");
    }
    if (wins == 0) {
        return {1.0, 0.0};
    }
    const double p = rat_to_double(p0);
    if (p >= 1.0) {
        return {1.0, 0.0};
    }
    if (p <= 0.0) {
        return {0.0, -std::numeric_limits<double>::infinity()};
    }

    // log sum of C(n,k) p^k (1-p)^(n-k) for k = wins..n; the largest term
    // anchors the exponent so the sum never underflows prematurely.
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    const double nn = static_cast<double>(n);
    auto log_term = [&](std::uint64_t k) {
        const double kk = static_cast<double>(k);
        return std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0) +
               kk * log_p + (nn - kk) * log_q;
    };
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::uint64_t k = wins; k <= n; ++k) {
        max_log = std::max(max_log, log_term(k));
    }
    double sum = 0.0;
    for (std::uint64_t k = wins; k <= n; ++k) {
        sum += std::exp(log_term(k) - max_log);
    }
    const double log_tail = max_log + std::log(sum);
    TailProbability out;
    out.log10_p_value = std::min(0.0, log_tail / std::log(10.0));
    out.p_value = std::min(1.0, std::exp(log_tail));
    return out;
}

} // namespace ghzlab::harness
