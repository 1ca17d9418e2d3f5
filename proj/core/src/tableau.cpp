#include "mipt/tableau.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "mipt/errors.hpp"

namespace mipt {

using gf2::word_t;

namespace {

constexpr char kMagic[8] = {'M', 'I', 'P', 'T', 'T', 'A', 'B', '\0'};

inline word_t broadcast(bool b) { return b ? ~word_t{0} : word_t{0}; }

inline word_t inclusive_prefix_xor(word_t v) {
  v ^= v << 1;
  v ^= v << 2;
  v ^= v << 4;
  v ^= v << 8;
  v ^= v << 16;
  v ^= v << 32;
  return v;
}

}  // namespace

Tableau::Tableau(std::size_t n_qubits) : n_(n_qubits), ws_(gf2::words_for(n_qubits)) {
  if (n_qubits == 0) throw ConfigError("Tableau: need at least one qubit");
  x_.assign(n_ * words(), 0);
  z_.assign(n_ * words(), 0);
  r_.assign(words(), 0);
  for (std::size_t q = 0; q < n_; ++q) {
    put(xcol(q), q, true);            // destabilizer q = +X_q
    put(zcol(q), stab_row(q), true);  // stabilizer q = +Z_q
  }
}

Tableau Tableau::zero_state(std::size_t L) {
  if (L < 2 || L % 2 != 0) throw ConfigError("zero_state: L must be even and >= 2, got " + std::to_string(L));
  return Tableau(L);
}

void Tableau::put(word_t* plane, std::size_t row, bool v) {
  const word_t m = word_t{1} << (row % 64);
  plane[row / 64] = v ? (plane[row / 64] | m) : (plane[row / 64] & ~m);
}

void Tableau::check_qubit(std::size_t q) const {
  if (q >= n_) throw std::out_of_range("Tableau: qubit " + std::to_string(q) + " out of range");
}

void Tableau::apply(const CompiledGate2& g, std::size_t i, std::size_t j) {
  check_qubit(i);
  check_qubit(j);
  if (i == j) throw std::invalid_argument("Tableau::apply: qubits must differ");

  // sel[o][b] is all-ones when input plane b feeds output plane o.
  word_t sel[4][4];
  for (int o = 0; o < 4; ++o)
    for (int b = 0; b < 4; ++b) sel[o][b] = broadcast((g.linear[o] >> b) & 1U);
  const std::size_t nterms = g.n_sign_terms;

  word_t* xi = xcol(i);
  word_t* zi = zcol(i);
  word_t* xj = xcol(j);
  word_t* zj = zcol(j);
  const std::size_t W = words();
  for (std::size_t w = 0; w < W; ++w) {
    const word_t v[4] = {xi[w], zi[w], xj[w], zj[w]};
    word_t mono[16];
    mono[0] = ~word_t{0};
    for (unsigned s = 1; s < 16; ++s) mono[s] = mono[s & (s - 1)] & v[std::countr_zero(s)];
    word_t flip = 0;
    for (std::size_t t = 0; t < nterms; ++t) flip ^= mono[g.sign_terms[t]];
    r_[w] ^= flip;
    word_t out[4];
    for (int o = 0; o < 4; ++o)
      out[o] = (sel[o][0] & v[0]) ^ (sel[o][1] & v[1]) ^ (sel[o][2] & v[2]) ^ (sel[o][3] & v[3]);
    xi[w] = out[0];
    zi[w] = out[1];
    xj[w] = out[2];
    zj[w] = out[3];
  }
}

void Tableau::apply(const CliffordGate2& g, std::size_t i, std::size_t j) { apply(CompiledGate2::from(g), i, j); }

void Tableau::h(std::size_t q) {
  check_qubit(q);
  word_t* x = xcol(q);
  word_t* z = zcol(q);
  for (std::size_t w = 0; w < words(); ++w) {
    r_[w] ^= x[w] & z[w];
    std::swap(x[w], z[w]);
  }
}

void Tableau::s(std::size_t q) {
  check_qubit(q);
  word_t* x = xcol(q);
  word_t* z = zcol(q);
  for (std::size_t w = 0; w < words(); ++w) {
    r_[w] ^= x[w] & z[w];
    z[w] ^= x[w];
  }
}

void Tableau::cnot(std::size_t control, std::size_t target) {
  check_qubit(control);
  check_qubit(target);
  if (control == target) throw std::invalid_argument("Tableau::cnot: qubits must differ");
  word_t* xa = xcol(control);
  word_t* za = zcol(control);
  word_t* xb = xcol(target);
  word_t* zb = zcol(target);
  for (std::size_t w = 0; w < words(); ++w) {
    r_[w] ^= xa[w] & zb[w] & ~(xb[w] ^ za[w]);
    xb[w] ^= xa[w];
    za[w] ^= zb[w];
  }
}

bool Tableau::is_deterministic_z(std::size_t q) const {
  check_qubit(q);
  const word_t* x = xcol(q) + ws_;
  for (std::size_t w = 0; w < ws_; ++w)
    if (x[w] != 0) return false;
  return true;
}

MeasureResult Tableau::measure_z_with(std::size_t q, bool outcome_if_random) {
  check_qubit(q);
  const word_t* xs = xcol(q) + ws_;
  for (std::size_t w = 0; w < ws_; ++w) {
    if (xs[w] != 0) {
      random_collapse(q, w * 64 + static_cast<std::size_t>(std::countr_zero(xs[w])), outcome_if_random);
      return {outcome_if_random, true};
    }
  }
  return {deterministic_outcome(q), false};
}

bool Tableau::collapse_z(std::size_t q, bool outcome_if_random) {
  check_qubit(q);
  const word_t* xs = xcol(q) + ws_;
  for (std::size_t w = 0; w < ws_; ++w) {
    if (xs[w] != 0) {
      random_collapse(q, w * 64 + static_cast<std::size_t>(std::countr_zero(xs[w])), outcome_if_random);
      return true;
    }
  }
  return false;
}

void Tableau::random_collapse(std::size_t q, std::size_t pivot, bool outcome) {
  const std::size_t W = words();
  const std::size_t prow = stab_row(pivot);

  thread_local std::vector<word_t> scratch;
  scratch.assign(3 * W, 0);
  word_t* mask = scratch.data();
  word_t* lo = mask + W;
  word_t* hi = lo + W;

  // Every row other than the pivot (and its destabilizer, overwritten below)
  // with an X component on q is multiplied by the pivot row.
  std::copy_n(xcol(q), W, mask);
  put(mask, prow, false);
  put(mask, pivot, false);

  // Exponent of i in P_pivot * P_row on each column, as +1 / -1 masks,
  // accumulated mod 4 in the (lo, hi) bit planes.
  auto multiply = [&](word_t* xc, word_t* zc, auto pauli) {
    for (std::size_t w = 0; w < W; ++w) {
      const word_t m = mask[w];
      const word_t x = xc[w];
      const word_t z = zc[w];
      word_t plus;
      word_t minus;
      if constexpr (pauli == 1) {  // X
        plus = x & z;
        minus = ~x & z;
        xc[w] = x ^ m;
      } else if constexpr (pauli == 2) {  // Z
        plus = x & ~z;
        minus = x & z;
        zc[w] = z ^ m;
      } else {  // Y
        plus = ~x & z;
        minus = x & ~z;
        xc[w] = x ^ m;
        zc[w] = z ^ m;
      }
      plus &= m;
      minus &= m;
      hi[w] ^= (lo[w] & plus) | (~lo[w] & minus);
      lo[w] ^= plus | minus;
    }
  };
  for (std::size_t c = 0; c < n_; ++c) {
    word_t* xc = xcol(c);
    word_t* zc = zcol(c);
    const unsigned kind = (bit(xc, prow) ? 1U : 0U) | (bit(zc, prow) ? 2U : 0U);
    if (kind == 1) multiply(xc, zc, std::integral_constant<unsigned, 1>{});
    else if (kind == 2) multiply(xc, zc, std::integral_constant<unsigned, 2>{});
    else if (kind == 3) multiply(xc, zc, std::integral_constant<unsigned, 3>{});
  }

  const word_t rp = broadcast(bit(r_.data(), prow));
  for (std::size_t w = 0; w < W; ++w) {
    assert((lo[w] & mask[w]) == 0);
    r_[w] ^= mask[w] & (hi[w] ^ rp);
  }

  // Destabilizer partner takes the old pivot row; the pivot becomes +-Z_q.
  for (std::size_t c = 0; c < n_; ++c) {
    word_t* xc = xcol(c);
    word_t* zc = zcol(c);
    put(xc, pivot, bit(xc, prow));
    put(zc, pivot, bit(zc, prow));
    put(xc, prow, false);
    put(zc, prow, c == q);
  }
  put(r_.data(), pivot, bit(r_.data(), prow));
  put(r_.data(), prow, outcome);
}

bool Tableau::deterministic_outcome(std::size_t q) const {
  // Z_q = +- product of stabilizers k whose destabilizer has X on q.
  const word_t* sel = xcol(q);  // destabilizer half
  unsigned total = 0;
  for (std::size_t w = 0; w < ws_; ++w)
    total += 2U * static_cast<unsigned>(std::popcount(r_[ws_ + w] & sel[w]));

  for (std::size_t c = 0; c < n_; ++c) {
    const word_t* xc = xcol(c) + ws_;
    const word_t* zc = zcol(c) + ws_;
    unsigned count_y = 0;
    unsigned pairs = 0;
    unsigned xpar = 0;
    word_t carry = 0;
    for (std::size_t w = 0; w < ws_; ++w) {
      const word_t x = xc[w] & sel[w];
      const word_t z = zc[w] & sel[w];
      if ((x | z) == 0) continue;
      count_y += static_cast<unsigned>(std::popcount(x & z));
      // Ordered product picks up (-1) for every earlier Z meeting a later X.
      const word_t before = (inclusive_prefix_xor(z) << 1) ^ carry;
      pairs ^= static_cast<unsigned>(std::popcount(before & x)) & 1U;
      if (std::popcount(z) & 1) carry = ~carry;
      xpar ^= static_cast<unsigned>(std::popcount(x)) & 1U;
    }
    const unsigned zpar = carry != 0 ? 1U : 0U;
    total += count_y + 2U * pairs + 4U - (xpar & zpar);
  }
  assert((total & 1U) == 0);
  return ((total >> 1) & 1U) != 0;
}

int Tableau::rank_of_columns(std::span<const std::size_t> qubits) const {
  thread_local std::vector<word_t> scratch;
  const std::size_t nrows = 2 * qubits.size();
  scratch.resize(nrows * ws_);
  word_t* out = scratch.data();
  for (std::size_t q : qubits) {
    check_qubit(q);
    std::copy_n(xcol(q) + ws_, ws_, out);
    out += ws_;
    std::copy_n(zcol(q) + ws_, ws_, out);
    out += ws_;
  }
  return static_cast<int>(gf2::rank_in_place(std::span<word_t>(scratch.data(), nrows * ws_), nrows, ws_));
}

int Tableau::entropy_direct(std::span<const std::size_t> subset) const {
  if (subset.empty()) return 0;
  return rank_of_columns(subset) - static_cast<int>(subset.size());
}

int Tableau::entropy(std::span<const std::size_t> subset) const {
  if (2 * subset.size() <= n_) return entropy_direct(subset);
  thread_local std::vector<char> in;
  thread_local std::vector<std::size_t> complement;
  in.assign(n_, 0);
  for (std::size_t q : subset) {
    check_qubit(q);
    in[q] = 1;
  }
  complement.clear();
  for (std::size_t q = 0; q < n_; ++q)
    if (!in[q]) complement.push_back(q);
  return entropy_direct(complement);
}

PauliString Tableau::row_string(std::size_t row) const {
  PauliString p;
  p.ops.resize(n_);
  for (std::size_t q = 0; q < n_; ++q) {
    const bool x = bit(xcol(q), row);
    const bool z = bit(zcol(q), row);
    p.ops[q] = x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
  }
  p.negative = bit(r_.data(), row);
  return p;
}

PauliString Tableau::stabilizer(std::size_t k) const {
  check_qubit(k);
  return row_string(stab_row(k));
}

PauliString Tableau::destabilizer(std::size_t k) const {
  check_qubit(k);
  return row_string(k);
}

bool Tableau::check_invariants() const {
  // Row-major copy: 2n rows of (x | z).
  gf2::BitMatrix rows(2 * n_, 2 * n_);
  auto row_index = [&](std::size_t r) { return r < n_ ? r : stab_row(r - n_); };
  for (std::size_t r = 0; r < 2 * n_; ++r)
    for (std::size_t q = 0; q < n_; ++q) {
      if (bit(xcol(q), row_index(r))) rows.set(r, q, true);
      if (bit(zcol(q), row_index(r))) rows.set(r, n_ + q, true);
    }
  auto anticommute = [&](std::size_t a, std::size_t b) {
    int s = 0;
    for (std::size_t q = 0; q < n_; ++q)
      s ^= (rows.get(a, q) & rows.get(b, n_ + q)) ^ (rows.get(a, n_ + q) & rows.get(b, q));
    return s != 0;
  };
  for (std::size_t a = 0; a < 2 * n_; ++a)
    for (std::size_t b = a + 1; b < 2 * n_; ++b) {
      // Only destabilizer k and stabilizer k anticommute.
      const bool want = (a < n_) && (b == a + n_);
      if (anticommute(a, b) != want) return false;
    }
  if (gf2::rank(rows) != 2 * n_) return false;
  // Pad bits stay clear.
  if (n_ % 64 != 0) {
    const word_t pad = ~((word_t{1} << (n_ % 64)) - 1);
    for (std::size_t q = 0; q < n_; ++q)
      for (std::size_t h = 0; h < 2; ++h) {
        const std::size_t w = h * ws_ + ws_ - 1;
        if ((xcol(q)[w] | zcol(q)[w]) & pad) return false;
        if (r_[w] & pad) return false;
      }
  }
  return true;
}

void Tableau::save(std::ostream& os) const {
  const std::uint32_t version = format_version;
  const std::uint32_t reserved = 0;
  const std::uint64_t n = n_;
  os.write(kMagic, sizeof kMagic);
  os.write(reinterpret_cast<const char*>(&version), sizeof version);
  os.write(reinterpret_cast<const char*>(&reserved), sizeof reserved);
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  auto dump = [&](const std::vector<word_t>& v) {
    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(word_t)));
  };
  dump(x_);
  dump(z_);
  dump(r_);
  if (!os) throw std::runtime_error("Tableau::save: write failed");
}

Tableau Tableau::load(std::istream& is) {
  char magic[8];
  std::uint32_t version = 0;
  std::uint32_t reserved = 0;
  std::uint64_t n = 0;
  is.read(magic, sizeof magic);
  is.read(reinterpret_cast<char*>(&version), sizeof version);
  is.read(reinterpret_cast<char*>(&reserved), sizeof reserved);
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0) throw std::runtime_error("Tableau::load: bad header");
  if (version != format_version) throw std::runtime_error("Tableau::load: unsupported format version");
  if (n == 0 || n > (std::uint64_t{1} << 24)) throw std::runtime_error("Tableau::load: bad qubit count");
  Tableau t(static_cast<std::size_t>(n));
  auto fill = [&](std::vector<word_t>& v) {
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(word_t)));
  };
  fill(t.x_);
  fill(t.z_);
  fill(t.r_);
  if (!is) throw std::runtime_error("Tableau::load: truncated payload");
  return t;
}

}  // namespace mipt
