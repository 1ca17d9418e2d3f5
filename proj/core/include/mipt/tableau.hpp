#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mipt/clifford2.hpp"
#include "mipt/gf2.hpp"

namespace mipt {

/// Pauli string on n qubits: ops[q] in {'I','X','Y','Z'} with a +/- sign.
struct PauliString {
  std::string ops;
  bool negative = false;

  std::string str() const { return (negative ? "-" : "+") + ops; }
  friend bool operator==(const PauliString&, const PauliString&) = default;
};

struct MeasureResult {
  bool outcome = false;
  bool random = false;
};

/// Stabilizer/destabilizer tableau of an n-qubit pure stabilizer state.
///
/// Storage is column-major: for every qubit there is an x plane and a z plane
/// whose bits run over rows, laid out as [destabilizer words | stabilizer words].
/// Gates on two qubits therefore touch four planes word-parallel, and the
/// stabilizer half of a plane is the column used by the entropy rank.
class Tableau {
 public:
  /// |0...0> on n >= 1 qubits.
  explicit Tableau(std::size_t n_qubits);

  /// |0>^L for the circuit model; L must be even and >= 2 (ConfigError otherwise).
  static Tableau zero_state(std::size_t L);

  std::size_t n_qubits() const { return n_; }

  void apply(const CompiledGate2& g, std::size_t i, std::size_t j);
  void apply(const CliffordGate2& g, std::size_t i, std::size_t j);

  void h(std::size_t q);
  void s(std::size_t q);
  void cnot(std::size_t control, std::size_t target);

  /// Z measurement; a random outcome is a fair coin drawn from `rng`.
  template <class Rng>
  MeasureResult measure_z(std::size_t q, Rng& rng) {
    if (!is_deterministic_z(q)) return measure_z_with(q, std::bernoulli_distribution(0.5)(rng));
    return measure_z_with(q, false);
  }

  /// Z measurement where a random outcome is fixed to `outcome_if_random`.
  MeasureResult measure_z_with(std::size_t q, bool outcome_if_random);

  /// Projects qubit q onto Z = (-1)^outcome_if_random when the outcome is
  /// random and leaves the state alone otherwise; a deterministic outcome is
  /// not computed. Returns whether the outcome was random.
  bool collapse_z(std::size_t q, bool outcome_if_random);

  /// True when Z_q (up to sign) is in the stabilizer group.
  bool is_deterministic_z(std::size_t q) const;

  /// Von Neumann entropy (bits) of `subset`, evaluated on the smaller of the
  /// subset and its complement. Duplicate indices are not allowed.
  int entropy(std::span<const std::size_t> subset) const;
  /// Rank formula applied to `subset` itself, without the complement shortcut.
  int entropy_direct(std::span<const std::size_t> subset) const;

  PauliString stabilizer(std::size_t k) const;
  PauliString destabilizer(std::size_t k) const;

  /// Commutation structure and linear independence of all 2n rows.
  bool check_invariants() const;

  /// Raw bit-plane dump with a {magic, format-version, n} header.
  void save(std::ostream& os) const;
  static Tableau load(std::istream& is);
  static constexpr std::uint32_t format_version = 1;

  friend bool operator==(const Tableau&, const Tableau&) = default;

 private:
  std::size_t words() const { return 2 * ws_; }
  gf2::word_t* xcol(std::size_t q) { return x_.data() + q * words(); }
  gf2::word_t* zcol(std::size_t q) { return z_.data() + q * words(); }
  const gf2::word_t* xcol(std::size_t q) const { return x_.data() + q * words(); }
  const gf2::word_t* zcol(std::size_t q) const { return z_.data() + q * words(); }
  bool bit(const gf2::word_t* plane, std::size_t row) const { return (plane[row / 64] >> (row % 64)) & 1U; }
  static void put(gf2::word_t* plane, std::size_t row, bool v);
  std::size_t stab_row(std::size_t k) const { return ws_ * 64 + k; }
  PauliString row_string(std::size_t row) const;
  void check_qubit(std::size_t q) const;
  void random_collapse(std::size_t q, std::size_t pivot, bool outcome);
  bool deterministic_outcome(std::size_t q) const;
  int rank_of_columns(std::span<const std::size_t> qubits) const;

  std::size_t n_ = 0;
  std::size_t ws_ = 0;  // words per half plane
  std::vector<gf2::word_t> x_;
  std::vector<gf2::word_t> z_;
  std::vector<gf2::word_t> r_;
};

}  // namespace mipt
