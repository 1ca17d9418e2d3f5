#include "mipt/clifford2.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <stdexcept>
#include <unordered_set>

namespace mipt {
namespace {

// i^k X^x Z^z with x, z two-bit masks (bit q = qubit q).
struct PhasedPauli {
  unsigned x = 0;
  unsigned z = 0;
  unsigned k = 0;
};

unsigned x_mask(std::uint8_t bits) { return (bits & 1U) | (((bits >> 2) & 1U) << 1); }
unsigned z_mask(std::uint8_t bits) { return ((bits >> 1) & 1U) | (((bits >> 3) & 1U) << 1); }

PhasedPauli from_hermitian(Pauli2 p) {
  PhasedPauli r{x_mask(p.bits), z_mask(p.bits), 0};
  r.k = (2U * (p.negative ? 1U : 0U) + static_cast<unsigned>(std::popcount(r.x & r.z))) & 3U;
  return r;
}

PhasedPauli multiply(const PhasedPauli& a, const PhasedPauli& b) {
  // X^a.x Z^a.z X^b.x Z^b.z = (-1)^{|a.z & b.x|} X^(a.x^b.x) Z^(a.z^b.z)
  return {a.x ^ b.x, a.z ^ b.z,
          (a.k + b.k + 2U * static_cast<unsigned>(std::popcount(a.z & b.x))) & 3U};
}

Pauli2 to_hermitian(const PhasedPauli& p) {
  const unsigned k = (p.k + 4U - static_cast<unsigned>(std::popcount(p.x & p.z))) & 3U;
  if (k & 1U) throw std::logic_error("non-Hermitian Pauli image");
  const auto bits = static_cast<std::uint8_t>((p.x & 1U) | ((p.z & 1U) << 1) | (((p.x >> 1) & 1U) << 2) |
                                              (((p.z >> 1) & 1U) << 3));
  return {bits, k == 2U};
}

}  // namespace

int symplectic_product(std::uint8_t a, std::uint8_t b) {
  const unsigned ax = x_mask(a), az = z_mask(a), bx = x_mask(b), bz = z_mask(b);
  return std::popcount((ax & bz) ^ (az & bx)) & 1;
}

CliffordGate2::CliffordGate2() : CliffordGate2({Pauli2{0b0001}, Pauli2{0b0010}, Pauli2{0b0100}, Pauli2{0b1000}}) {}

CliffordGate2::CliffordGate2(std::array<Pauli2, 4> images) : images_(images) { build_table(); }

void CliffordGate2::build_table() {
  hermitian_images_ = true;
  for (unsigned b = 0; b < 16; ++b) {
    const PhasedPauli in = from_hermitian(Pauli2{static_cast<std::uint8_t>(b), false});
    // i^k X1^x1 X2^x2 Z1^z1 Z2^z2 -> i^k U(X1)^x1 U(X2)^x2 U(Z1)^z1 U(Z2)^z2
    PhasedPauli out{0, 0, in.k};
    if (in.x & 1U) out = multiply(out, from_hermitian(images_[X1]));
    if (in.x & 2U) out = multiply(out, from_hermitian(images_[X2]));
    if (in.z & 1U) out = multiply(out, from_hermitian(images_[Z1]));
    if (in.z & 2U) out = multiply(out, from_hermitian(images_[Z2]));
    // Images that break the commutation relations can make the product
    // anti-Hermitian; such gates keep a sign-less entry and fail
    // preserves_symplectic_form().
    const unsigned k = (out.k + 4U - static_cast<unsigned>(std::popcount(out.x & out.z))) & 3U;
    const Pauli2 h = (k & 1U) ? to_hermitian({out.x, out.z, (out.k + 1U) & 3U}) : to_hermitian(out);
    hermitian_images_ &= (k & 1U) == 0;
    table_[b] = static_cast<std::uint8_t>(h.bits | (h.negative && (k & 1U) == 0 ? 0x10U : 0U));
  }
}

Pauli2 CliffordGate2::conjugate(Pauli2 p) const {
  const std::uint8_t t = table_[p.bits & 0xFU];
  return {static_cast<std::uint8_t>(t & 0xFU), static_cast<bool>((t >> 4) & 1U) != p.negative};
}

CliffordGate2 CliffordGate2::compose(const CliffordGate2& first, const CliffordGate2& second) {
  std::array<Pauli2, 4> imgs;
  for (std::size_t k = 0; k < 4; ++k) imgs[k] = second.conjugate(first.images_[k]);
  return CliffordGate2(imgs);
}

bool CliffordGate2::preserves_symplectic_form() const {
  if (!hermitian_images_) return false;
  for (std::size_t a = 0; a < 4; ++a) {
    if ((images_[a].bits & 0xFU) == 0) return false;
    for (std::size_t b = a + 1; b < 4; ++b) {
      // Paired generators (X1,Z1) and (X2,Z2) anticommute; all other pairs commute.
      const int want = (a / 2 == b / 2) ? 1 : 0;
      if (symplectic_product(images_[a].bits, images_[b].bits) != want) return false;
    }
  }
  return true;
}

std::uint32_t CliffordGate2::key() const {
  std::uint32_t k = 0;
  for (std::size_t a = 0; a < 4; ++a)
    k |= static_cast<std::uint32_t>((images_[a].bits & 0xFU) | (images_[a].negative ? 0x10U : 0U)) << (5 * a);
  return k;
}

CliffordGate2 CliffordGate2::hadamard(int qubit) {
  CliffordGate2 g;
  auto imgs = g.images_;
  if (qubit == 0) {
    imgs[X1] = {0b0010};
    imgs[Z1] = {0b0001};
  } else {
    imgs[X2] = {0b1000};
    imgs[Z2] = {0b0100};
  }
  return CliffordGate2(imgs);
}

CliffordGate2 CliffordGate2::phase(int qubit) {
  CliffordGate2 g;
  auto imgs = g.images_;
  if (qubit == 0)
    imgs[X1] = {0b0011};
  else
    imgs[X2] = {0b1100};
  return CliffordGate2(imgs);
}

CliffordGate2 CliffordGate2::cnot(int control, int target) {
  CliffordGate2 g;
  auto imgs = g.images_;
  if (control == 0 && target == 1) {
    imgs[X1] = {0b0101};
    imgs[Z2] = {0b1010};
  } else if (control == 1 && target == 0) {
    imgs[X2] = {0b0101};
    imgs[Z1] = {0b1010};
  } else {
    throw std::invalid_argument("cnot: qubits must be {0,1} and distinct");
  }
  return CliffordGate2(imgs);
}

CompiledGate2 CompiledGate2::from(const CliffordGate2& g) {
  CompiledGate2 c;
  // Output planes are linear in the inputs: read them off the unit-vector images.
  for (unsigned in = 0; in < 4; ++in) {
    const std::uint8_t img = g.conjugate(Pauli2{static_cast<std::uint8_t>(1U << in), false}).bits;
    for (unsigned out = 0; out < 4; ++out)
      if ((img >> out) & 1U) c.linear[out] |= static_cast<std::uint8_t>(1U << in);
  }
  // Sign flip as a boolean function of the four input bits, converted to ANF
  // with the Moebius transform.
  std::array<std::uint8_t, 16> f{};
  for (unsigned b = 0; b < 16; ++b) f[b] = g.conjugate(Pauli2{static_cast<std::uint8_t>(b), false}).negative ? 1 : 0;
  for (unsigned bit = 1; bit < 16; bit <<= 1)
    for (unsigned s = 0; s < 16; ++s)
      if (s & bit) f[s] ^= f[s ^ bit];
  if (f[0] != 0) throw std::logic_error("CompiledGate2: identity input changed sign");
  for (unsigned s = 1; s < 16; ++s)
    if (f[s]) c.sign_terms[c.n_sign_terms++] = static_cast<std::uint8_t>(s);
  return c;
}

std::vector<CliffordGate2> CliffordGroup2::enumerate() {
  const std::array<CliffordGate2, 6> generators = {
      CliffordGate2::hadamard(0), CliffordGate2::hadamard(1), CliffordGate2::phase(0),
      CliffordGate2::phase(1),    CliffordGate2::cnot(0, 1),  CliffordGate2::cnot(1, 0)};

  std::vector<CliffordGate2> found{CliffordGate2{}};
  std::unordered_set<std::uint32_t> seen{found.front().key()};
  std::deque<std::size_t> frontier{0};
  while (!frontier.empty()) {
    const CliffordGate2 g = found[frontier.front()];
    frontier.pop_front();
    for (const auto& gen : generators) {
      CliffordGate2 h = CliffordGate2::compose(g, gen);
      if (seen.insert(h.key()).second) {
        found.push_back(h);
        frontier.push_back(found.size() - 1);
      }
    }
  }
  if (found.size() != expected_size)
    throw std::logic_error("two-qubit Clifford closure has " + std::to_string(found.size()) + " elements");
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
  return found;
}

const CliffordGroup2& CliffordGroup2::instance() {
  static const CliffordGroup2 group(enumerate());
  return group;
}

CliffordGroup2::CliffordGroup2(std::vector<CliffordGate2> gates) : gates_(std::move(gates)) {
  if (gates_.empty()) throw std::invalid_argument("CliffordGroup2: empty gate list");
  std::sort(gates_.begin(), gates_.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
  compiled_.reserve(gates_.size());
  for (const auto& g : gates_) compiled_.push_back(CompiledGate2::from(g));
}

std::size_t CliffordGroup2::index_of(const CliffordGate2& g) const {
  const auto k = g.key();
  auto it = std::lower_bound(gates_.begin(), gates_.end(), k, [](const CliffordGate2& a, std::uint32_t v) { return a.key() < v; });
  if (it != gates_.end() && it->key() == k) return static_cast<std::size_t>(it - gates_.begin());
  return gates_.size();
}

}  // namespace mipt
