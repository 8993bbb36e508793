#include "ghzlab/quantum.hpp"

#include "ghzlab/errors.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace ghzlab::quantum {

namespace {

constexpr double kNormTolerance = 1e-12;
constexpr double kProbabilityDust = 1e-14; // clamped to zero

} // namespace

StateVector::StateVector(int n_qubits, std::vector<Cplx> amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
    if (n_qubits_ < 1 || n_qubits_ > 16) {
        throw std::domain_error("qubit count must be in 1..16");
    }
    if (amplitudes_.size() != (std::size_t{1} << n_qubits_)) {
        throw ValidationError("amplitude vector length does not match qubit count");
    }
    if (std::fabs(norm_sq() - 1.0) > kNormTolerance) {
        throw ValidationError("state vector is not normalized");
    }
}

StateVector StateVector::basis_state(int n_qubits, std::uint64_t index) {
    if (n_qubits < 1 || n_qubits > 16) {
        throw std::domain_error("qubit count must be in 1..16");
    }
    std::vector<Cplx> amp(std::size_t{1} << n_qubits, Cplx(0.0, 0.0));
    if (index >= amp.size()) {
        throw std::domain_error("basis state index out of range");
    }
    amp[index] = Cplx(1.0, 0.0);
    return StateVector(n_qubits, std::move(amp));
}

double StateVector::norm_sq() const {
    double total = 0.0;
    for (const Cplx& a : amplitudes_) {
        total += std::norm(a);
    }
    return total;
}

StateVector ghz_state(int n_qubits, int sign) {
    if (sign != 1 && sign != -1) {
        throw std::domain_error("GHZ sign must be +1 or -1");
    }
    if (n_qubits < 1 || n_qubits > 16) {
        throw std::domain_error("qubit count must be in 1..16");
    }
    const double amp = 1.0 / std::sqrt(2.0);
    std::vector<Cplx> amplitudes(std::size_t{1} << n_qubits, Cplx(0.0, 0.0));
    amplitudes.front() = Cplx(amp, 0.0);
    amplitudes.back() = Cplx(sign * amp, 0.0);
    return StateVector(n_qubits, std::move(amplitudes));
}

std::array<Pauli, 3> MeasurementAssignment::for_triple(const QuestionTriple& t) const {
    return {for_question(0, t.q[0]), for_question(1, t.q[1]), for_question(2, t.q[2])};
}

MeasurementAssignment MeasurementAssignment::standard() {
    MeasurementAssignment a{};
    for (int player = 0; player < 3; ++player) {
        a.observable[player][static_cast<int>(Question::X)] = Pauli::X;
        a.observable[player][static_cast<int>(Question::Y)] = Pauli::Y;
    }
    return a;
}

OutcomeDistribution::OutcomeDistribution(int n_qubits, std::vector<double> probabilities)
    : n_qubits_(n_qubits), probs_(std::move(probabilities)) {
    if (probs_.size() != (std::size_t{1} << n_qubits_)) {
        throw ValidationError("outcome distribution has wrong size");
    }
    for (double& p : probs_) {
        if (p < kProbabilityDust) {
            p = 0.0;
        }
    }
    for (const double p : probs_) {
        if (p < 0.0 || p > 1.0 + kNormTolerance) {
            throw ValidationError("outcome probability out of [0,1]");
        }
    }
    if (std::fabs(total() - 1.0) > kNormTolerance) {
        throw ValidationError("outcome probabilities do not sum to 1");
    }
}

std::vector<int> OutcomeDistribution::outcome_signs(std::uint64_t outcome_index) const {
    std::vector<int> signs(n_qubits_);
    for (int k = 0; k < n_qubits_; ++k) {
        const int bit = static_cast<int>((outcome_index >> (n_qubits_ - 1 - k)) & 1u);
        signs[k] = bit ? -1 : +1;
    }
    return signs;
}

double OutcomeDistribution::total() const {
    double t = 0.0;
    for (const double p : probs_) {
        t += p;
    }
    return t;
}

OutcomeDistribution joint_outcome_distribution(const StateVector& state,
                                               std::span<const Pauli> observables) {
    const int n = state.n_qubits();
    if (static_cast<int>(observables.size()) != n) {
        throw std::domain_error("need exactly one observable per qubit");
    }

    // The +1/-1 eigenprojectors of X and Y are rank one, so the joint outcome
    // amplitude is the inner product with a tensor product of single-qubit
    // eigenvectors. Accumulate those inner products one qubit at a time:
    // after processing qubit k, index bit k of `amp` selects the +1 (bit 0)
    // or -1 (bit 1) eigenvector of that factor.
    //
    //   X eigenvectors: (|0> +- |1>)/sqrt(2)
    //   Y eigenvectors: (|0> +- i|1>)/sqrt(2)
    std::vector<Cplx> amp = state.amplitudes();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < n; ++k) {
        const std::size_t stride = std::size_t{1} << (n - 1 - k);
        const Pauli obs = observables[k];
        for (std::size_t base = 0; base < amp.size(); base += 2 * stride) {
            for (std::size_t offset = 0; offset < stride; ++offset) {
                const Cplx a0 = amp[base + offset];
                const Cplx a1 = amp[base + offset + stride];
                if (obs == Pauli::X) {
                    amp[base + offset] = (a0 + a1) * inv_sqrt2;
                    amp[base + offset + stride] = (a0 - a1) * inv_sqrt2;
                } else {
                    // <y+| = (<0| - i<1|)/sqrt(2), <y-| = (<0| + i<1|)/sqrt(2)
                    const Cplx ia1(-a1.imag(), a1.real());
                    amp[base + offset] = (a0 - ia1) * inv_sqrt2;
                    amp[base + offset + stride] = (a0 + ia1) * inv_sqrt2;
                }
            }
        }
    }

    std::vector<double> probs(amp.size());
    for (std::size_t i = 0; i < amp.size(); ++i) {
        probs[i] = std::norm(amp[i]);
    }
    return OutcomeDistribution(n, std::move(probs));
}

std::vector<int> sample_outcomes(const StateVector& state, std::span<const Pauli> observables,
                                 RngStream& rng) {
    const OutcomeDistribution dist = joint_outcome_distribution(state, observables);
    const double u = rng.next_double();
    double cumulative = 0.0;
    std::uint64_t chosen = dist.size() - 1;
    for (std::uint64_t i = 0; i < dist.size(); ++i) {
        cumulative += dist.prob(i);
        if (u < cumulative) {
            chosen = i;
            break;
        }
    }
    return dist.outcome_signs(chosen);
}

double quantum_win_prob(const GameSpec& spec, const StateVector& state,
                        const MeasurementAssignment& assignment) {
    if (state.n_qubits() != spec.player_count()) {
        throw std::domain_error("state qubit count must match the player count");
    }
    double total = 0.0;
    for (const auto& entry : spec.support()) {
        const auto obs = assignment.for_triple(entry.questions);
        const OutcomeDistribution dist = joint_outcome_distribution(state, obs);
        double winning_mass = 0.0;
        for (std::uint64_t i = 0; i < dist.size(); ++i) {
            // Outcome product is +1 iff the index has even popcount.
            const int product = (std::popcount(i) % 2 == 0) ? +1 : -1;
            if (product == entry.target_parity) {
                winning_mass += dist.prob(i);
            }
        }
        total += rat_to_double(entry.weight) * winning_mass;
    }
    return total;
}

} // namespace ghzlab::quantum
