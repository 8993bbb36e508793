#pragma once

#include "ghzlab/game.hpp"
#include "ghzlab/rng.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace ghzlab::quantum {

using Cplx = std::complex<double>;

/// Dense normalized amplitude vector over n qubits (n <= 16). Qubit 0 is the
/// leftmost / most significant bit of the amplitude index.
class StateVector {
  public:
    /// Validates 1 <= n <= 16, length 2^n, unit norm within 1e-12.
    StateVector(int n_qubits, std::vector<Cplx> amplitudes);

    static StateVector basis_state(int n_qubits, std::uint64_t index);

    int n_qubits() const { return n_qubits_; }
    std::size_t dimension() const { return amplitudes_.size(); }
    const std::vector<Cplx>& amplitudes() const { return amplitudes_; }
    double norm_sq() const;

  private:
    int n_qubits_;
    std::vector<Cplx> amplitudes_;
};

/// (|0...0> + sign |1...1>)/sqrt(2); sign is +1 or -1.
StateVector ghz_state(int n_qubits, int sign);

enum class Pauli : std::uint8_t { X, Y };

/// A player's device settings: which Pauli to measure for each question.
struct MeasurementAssignment {
    std::array<std::array<Pauli, 2>, 3> observable; // [player][question]

    Pauli for_question(int player, Question q) const {
        return observable[player][static_cast<int>(q)];
    }
    std::array<Pauli, 3> for_triple(const QuestionTriple& t) const;

    /// X question measures Pauli X, Y question measures Pauli Y, all players.
    static MeasurementAssignment standard();
};

/// Probabilities of the 2^n sign patterns of a joint one-Pauli-per-qubit
/// measurement. Outcome index bit (n-1-k) is 0 for qubit k reading +1 and 1
/// for -1, mirroring the amplitude index convention.
class OutcomeDistribution {
  public:
    OutcomeDistribution(int n_qubits, std::vector<double> probabilities);

    int n_qubits() const { return n_qubits_; }
    std::size_t size() const { return probs_.size(); }
    double prob(std::uint64_t outcome_index) const { return probs_[outcome_index]; }
    const std::vector<double>& probabilities() const { return probs_; }

    /// +1/-1 readings per qubit for an outcome index.
    std::vector<int> outcome_signs(std::uint64_t outcome_index) const;

    double total() const;

  private:
    int n_qubits_;
    std::vector<double> probs_;
};

/// Born-rule distribution via the rank-1 eigenprojectors of the chosen
/// Paulis, accumulated one tensor factor at a time.
OutcomeDistribution joint_outcome_distribution(const StateVector& state,
                                               std::span<const Pauli> observables);

/// One draw of +1/-1 readings per qubit; deterministic given the stream.
std::vector<int> sample_outcomes(const StateVector& state, std::span<const Pauli> observables,
                                 RngStream& rng);

/// Expected win probability of the quantum team that measures per the
/// assignment on the given 3-qubit state.
double quantum_win_prob(const GameSpec& spec, const StateVector& state,
                        const MeasurementAssignment& assignment);

} // namespace ghzlab::quantum
