#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mipt::gf2 {

using word_t = std::uint64_t;
inline constexpr std::size_t word_bits = 64;

constexpr std::size_t words_for(std::size_t bits) { return (bits + word_bits - 1) / word_bits; }

/// Row-major, word-packed binary matrix. Pad bits past `cols()` in each row
/// are kept at zero by every mutating operation.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t row_words() const { return row_words_; }

  bool get(std::size_t r, std::size_t c) const;
  void set(std::size_t r, std::size_t c, bool v);

  std::span<word_t> row(std::size_t r) { return {data_.data() + r * row_words_, row_words_}; }
  std::span<const word_t> row(std::size_t r) const { return {data_.data() + r * row_words_, row_words_}; }

  /// Copies `src` into row `r`; bits beyond cols() are masked off.
  void assign_row(std::size_t r, std::span<const word_t> src);

  /// dst <- dst XOR src. Throws std::out_of_range on bad indices and
  /// std::invalid_argument when src == dst.
  void xor_row_into(std::size_t src, std::size_t dst);
  void swap_rows(std::size_t a, std::size_t b);

  BitMatrix transposed() const;

  /// Rows of `other` appended below the rows of this matrix.
  BitMatrix stacked(const BitMatrix& other) const;

  std::span<const word_t> words() const { return data_; }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  word_t tail_mask() const;

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t row_words_ = 0;
  std::vector<word_t> data_;
};

/// GF(2) rank. Elimination runs on a thread-local scratch copy; `m` is untouched.
std::size_t rank(const BitMatrix& m);

/// Rank of `nrows` packed rows of `row_words` words each, eliminated in place.
std::size_t rank_in_place(std::span<word_t> data, std::size_t nrows, std::size_t row_words);

}  // namespace mipt::gf2
