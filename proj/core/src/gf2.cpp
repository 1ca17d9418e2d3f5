#include "mipt/gf2.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace mipt::gf2 {

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_words_(words_for(cols)), data_(rows * words_for(cols), 0) {}

word_t BitMatrix::tail_mask() const {
  const std::size_t rem = cols_ % word_bits;
  return rem == 0 ? ~word_t{0} : (word_t{1} << rem) - 1;
}

bool BitMatrix::get(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_) throw std::out_of_range("BitMatrix::get");
  return (data_[r * row_words_ + c / word_bits] >> (c % word_bits)) & 1U;
}

void BitMatrix::set(std::size_t r, std::size_t c, bool v) {
  if (r >= rows_ || c >= cols_) throw std::out_of_range("BitMatrix::set");
  word_t& w = data_[r * row_words_ + c / word_bits];
  const word_t bit = word_t{1} << (c % word_bits);
  w = v ? (w | bit) : (w & ~bit);
}

void BitMatrix::assign_row(std::size_t r, std::span<const word_t> src) {
  if (r >= rows_) throw std::out_of_range("BitMatrix::assign_row");
  auto dst = row(r);
  const std::size_t n = std::min(dst.size(), src.size());
  std::copy_n(src.begin(), n, dst.begin());
  std::fill(dst.begin() + static_cast<std::ptrdiff_t>(n), dst.end(), word_t{0});
  if (!dst.empty()) dst.back() &= tail_mask();
}

void BitMatrix::xor_row_into(std::size_t src, std::size_t dst) {
  if (src >= rows_ || dst >= rows_) throw std::out_of_range("BitMatrix::xor_row_into");
  if (src == dst) throw std::invalid_argument("BitMatrix::xor_row_into: src == dst");
  const word_t* s = data_.data() + src * row_words_;
  word_t* d = data_.data() + dst * row_words_;
  for (std::size_t w = 0; w < row_words_; ++w) d[w] ^= s[w];
}

void BitMatrix::swap_rows(std::size_t a, std::size_t b) {
  if (a >= rows_ || b >= rows_) throw std::out_of_range("BitMatrix::swap_rows");
  if (a == b) return;
  std::swap_ranges(data_.begin() + static_cast<std::ptrdiff_t>(a * row_words_),
                   data_.begin() + static_cast<std::ptrdiff_t>((a + 1) * row_words_),
                   data_.begin() + static_cast<std::ptrdiff_t>(b * row_words_));
}

BitMatrix BitMatrix::transposed() const {
  BitMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      if (get(r, c)) t.set(c, r, true);
  return t;
}

BitMatrix BitMatrix::stacked(const BitMatrix& other) const {
  if (other.cols_ != cols_) throw std::invalid_argument("BitMatrix::stacked: column mismatch");
  BitMatrix s(rows_ + other.rows_, cols_);
  std::copy(data_.begin(), data_.end(), s.data_.begin());
  std::copy(other.data_.begin(), other.data_.end(),
            s.data_.begin() + static_cast<std::ptrdiff_t>(data_.size()));
  return s;
}

std::size_t rank_in_place(std::span<word_t> data, std::size_t nrows, std::size_t row_words) {
  std::size_t rank = 0;
  for (std::size_t w = 0; w < row_words && rank < nrows; ++w) {
    // Pivot search restricted to word w; earlier words are already reduced.
    word_t pending = ~word_t{0};
    while (rank < nrows && pending != 0) {
      // Lowest column in this word that still has a candidate pivot row.
      word_t any = 0;
      for (std::size_t r = rank; r < nrows; ++r) any |= data[r * row_words + w];
      any &= pending;
      if (any == 0) break;
      const word_t bit = any & (~any + 1);
      pending &= ~((bit << 1) - 1);

      std::size_t piv = rank;
      while ((data[piv * row_words + w] & bit) == 0) ++piv;
      word_t* prow = data.data() + piv * row_words;
      if (piv != rank) {
        word_t* rrow = data.data() + rank * row_words;
        for (std::size_t k = w; k < row_words; ++k) std::swap(prow[k], rrow[k]);
        prow = rrow;
      }
      for (std::size_t r = rank + 1; r < nrows; ++r) {
        word_t* row = data.data() + r * row_words;
        if (row[w] & bit)
          for (std::size_t k = w; k < row_words; ++k) row[k] ^= prow[k];
      }
      ++rank;
    }
  }
  return rank;
}

std::size_t rank(const BitMatrix& m) {
  thread_local std::vector<word_t> scratch;
  const auto words = m.words();
  scratch.assign(words.begin(), words.end());
  return rank_in_place(scratch, m.rows(), m.row_words());
}

}  // namespace mipt::gf2
