#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mipt/circuit.hpp"
#include "mipt/clifford2.hpp"

namespace mipt::oracle {

/// Dense state vector; bit q of a basis index is qubit q.
class DenseState {
 public:
  static constexpr std::size_t max_qubits = 12;

  static DenseState zero(std::size_t n_qubits);

  std::size_t n_qubits() const { return n_; }
  const std::vector<std::complex<double>>& amplitudes() const { return amp_; }
  std::vector<std::complex<double>>& amplitudes() { return amp_; }
  double norm() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::complex<double>> amp_;
};

/// 4x4 matrix of a Hermitian two-qubit Pauli; local index = b1 + 2*b2.
Eigen::Matrix4cd pauli_matrix(Pauli2 p);

/// Unitary whose conjugation action is `g`, fixed up to global phase.
Eigen::Matrix4cd unitary_of(const CliffordGate2& g);

void apply_unitary(DenseState& s, const Eigen::Matrix4cd& u, std::size_t i, std::size_t j);
void apply_gate_dense(DenseState& s, const CliffordGate2& g, std::size_t i, std::size_t j);

/// Von Neumann entropy in bits of the reduced state on `subset`.
double entropy_dense(const DenseState& s, std::span<const std::size_t> subset);

struct DenseMeasurement {
  bool outcome = false;
  double prob_zero = 0.0;
};

/// Born-rule Z measurement driven by one uniform variate `u` in [0,1):
/// outcome 0 iff u < P(0). Probabilities within 1e-9 of 0, 1/2 or 1 are snapped.
DenseMeasurement measure_z_dense(DenseState& s, std::size_t q, double u);

template <class Rng>
DenseMeasurement measure_z_dense(DenseState& s, std::size_t q, Rng& rng) {
  return measure_z_dense(s, q, std::uniform_real_distribution<double>(0.0, 1.0)(rng));
}

/// Dense counterpart of mipt::replay_step.
std::vector<DenseMeasurement> replay_step(DenseState& s, const StepRecord& rec, const CliffordGroup2& group);

}  // namespace mipt::oracle
