#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace mipt {

/// Two-qubit Pauli in packed form: bit0 = x1, bit1 = z1, bit2 = x2, bit3 = z2.
/// (x, z) = (1, 1) denotes the Hermitian Y.
struct Pauli2 {
  std::uint8_t bits = 0;
  bool negative = false;

  friend bool operator==(const Pauli2&, const Pauli2&) = default;
};

/// Symplectic inner product (1 when the two Paulis anticommute).
int symplectic_product(std::uint8_t a, std::uint8_t b);

/// A two-qubit Clifford, stored as its conjugation action on X1, Z1, X2, Z2.
/// Global phase is not represented.
class CliffordGate2 {
 public:
  enum Generator : std::size_t { X1 = 0, Z1 = 1, X2 = 2, Z2 = 3 };

  CliffordGate2();  // identity
  explicit CliffordGate2(std::array<Pauli2, 4> images);

  const std::array<Pauli2, 4>& images() const { return images_; }

  /// U P U^dagger for a Hermitian two-qubit Pauli P.
  Pauli2 conjugate(Pauli2 p) const;

  /// Gate equivalent to applying `first`, then `second`.
  static CliffordGate2 compose(const CliffordGate2& first, const CliffordGate2& second);

  /// True when the images satisfy the Pauli commutation relations and are nonidentity.
  bool preserves_symplectic_form() const;

  /// 20-bit packed key of the images (4 x 5 bits); distinct actions have distinct keys.
  std::uint32_t key() const;

  friend bool operator==(const CliffordGate2& a, const CliffordGate2& b) { return a.images_ == b.images_; }

  static CliffordGate2 hadamard(int qubit);
  static CliffordGate2 phase(int qubit);
  static CliffordGate2 cnot(int control, int target);

 private:
  std::array<Pauli2, 4> images_;
  // table_[b] = conjugate({b, false}) as 4 bits + sign in bit 4.
  std::array<std::uint8_t, 16> table_{};
  bool hermitian_images_ = true;

  void build_table();
};

/// Bit-sliced form of a gate used by the tableau: each output plane is an XOR
/// of input planes, and the sign flip is an XOR of products of input planes.
struct CompiledGate2 {
  std::array<std::uint8_t, 4> linear{};      // input-plane masks per output plane
  std::array<std::uint8_t, 16> sign_terms{};  // ANF monomials (input-plane subsets)
  std::uint8_t n_sign_terms = 0;

  static CompiledGate2 from(const CliffordGate2& g);
};

/// The 11520-element two-qubit Clifford group, sorted by CliffordGate2::key().
class CliffordGroup2 {
 public:
  static constexpr std::size_t expected_size = 11520;

  /// Closure under {H1, H2, S1, S2, CNOT12, CNOT21}. Throws std::logic_error on a wrong census.
  static std::vector<CliffordGate2> enumerate();

  /// Process-wide immutable instance, built on first use.
  static const CliffordGroup2& instance();

  explicit CliffordGroup2(std::vector<CliffordGate2> gates);

  std::size_t size() const { return gates_.size(); }
  const CliffordGate2& operator[](std::size_t i) const { return gates_[i]; }
  const CompiledGate2& compiled(std::size_t i) const { return compiled_[i]; }
  std::span<const CliffordGate2> gates() const { return gates_; }

  /// Index of `g` in the table, or size() if absent.
  std::size_t index_of(const CliffordGate2& g) const;

  template <class Rng>
  std::size_t sample_index(Rng& rng) const {
    return std::uniform_int_distribution<std::size_t>(0, gates_.size() - 1)(rng);
  }

  template <class Rng>
  const CliffordGate2& sample_uniform(Rng& rng) const {
    return gates_[sample_index(rng)];
  }

 private:
  std::vector<CliffordGate2> gates_;
  std::vector<CompiledGate2> compiled_;
};

}  // namespace mipt
