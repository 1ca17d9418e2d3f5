#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "mipt/gf2.hpp"

namespace {

using mipt::gf2::BitMatrix;

BitMatrix from_strings(const std::vector<std::string>& rows) {
  BitMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m.set(r, c, rows[r][c] == '1');
  return m;
}

BitMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double density = 0.5) {
  std::bernoulli_distribution bit(density);
  BitMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m.set(r, c, bit(rng));
  return m;
}

// Independent dense eliminator on vector<vector<int>>.
std::size_t dense_rank(const BitMatrix& m) {
  std::vector<std::vector<int>> a(m.rows(), std::vector<int>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) a[r][c] = m.get(r, c);
  std::size_t rank = 0;
  for (std::size_t c = 0; c < m.cols() && rank < m.rows(); ++c) {
    std::size_t piv = rank;
    while (piv < m.rows() && a[piv][c] == 0) ++piv;
    if (piv == m.rows()) continue;
    std::swap(a[piv], a[rank]);
    for (std::size_t r = 0; r < m.rows(); ++r)
      if (r != rank && a[r][c])
        for (std::size_t k = 0; k < m.cols(); ++k) a[r][k] ^= a[rank][k];
    ++rank;
  }
  return rank;
}

TEST(Gf2Rank, Identity) {
  BitMatrix m(4, 4);
  for (std::size_t k = 0; k < 4; ++k) m.set(k, k, true);
  EXPECT_EQ(mipt::gf2::rank(m), 4u);
}

TEST(Gf2Rank, AllZero) { EXPECT_EQ(mipt::gf2::rank(BitMatrix(3, 5)), 0u); }

TEST(Gf2Rank, EmptyMatrix) {
  EXPECT_EQ(mipt::gf2::rank(BitMatrix()), 0u);
  EXPECT_EQ(mipt::gf2::rank(BitMatrix(0, 7)), 0u);
  EXPECT_EQ(mipt::gf2::rank(BitMatrix(5, 0)), 0u);
}

TEST(Gf2Rank, DependentThirdRow) { EXPECT_EQ(mipt::gf2::rank(from_strings({"1100", "0110", "1010"})), 2u); }

TEST(Gf2Rank, DoesNotMutateInput) {
  const BitMatrix m = from_strings({"1100", "0110", "1010"});
  const BitMatrix copy = m;
  (void)mipt::gf2::rank(m);
  EXPECT_EQ(m, copy);
}

TEST(Gf2XorRow, ProducesZeroRowFromItself) {
  BitMatrix m = from_strings({"1011", "1011"});
  m.xor_row_into(0, 1);
  EXPECT_EQ(m, from_strings({"1011", "0000"}));
}

TEST(Gf2XorRow, ZeroSourceLeavesDestination) {
  BitMatrix m = from_strings({"000", "101"});
  m.xor_row_into(0, 1);
  EXPECT_EQ(m, from_strings({"000", "101"}));
}

TEST(Gf2XorRow, HandExample) {
  BitMatrix m = from_strings({"101", "011", "111"});
  m.xor_row_into(0, 1);
  EXPECT_EQ(m, from_strings({"101", "110", "111"}));
}

TEST(Gf2XorRow, ContractViolations) {
  BitMatrix m(2, 3);
  EXPECT_THROW(m.xor_row_into(0, 2), std::out_of_range);
  EXPECT_THROW(m.xor_row_into(5, 0), std::out_of_range);
  EXPECT_THROW(m.xor_row_into(1, 1), std::invalid_argument);
}

TEST(Gf2BitMatrix, AssignRowMasksPadBits) {
  BitMatrix m(1, 70);
  const std::vector<mipt::gf2::word_t> src = {~0ULL, ~0ULL};
  m.assign_row(0, src);
  EXPECT_EQ(m.row(0)[1], (1ULL << 6) - 1);
}

TEST(Gf2Properties, RankMatchesDenseAndTranspose) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t rows = 1 + rng() % 16;
    const std::size_t cols = 1 + rng() % 16;
    const BitMatrix m = random_matrix(rows, cols, rng, trial % 2 ? 0.5 : 0.2);
    const std::size_t r = mipt::gf2::rank(m);
    EXPECT_EQ(r, dense_rank(m));
    EXPECT_EQ(r, mipt::gf2::rank(m.transposed()));
    EXPECT_LE(r, std::min(rows, cols));
  }
}

TEST(Gf2Properties, RankInvariantUnderRowOperations) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = 2 + rng() % 40;
    const std::size_t cols = 1 + rng() % 150;
    BitMatrix m = random_matrix(rows, cols, rng, 0.3);
    const std::size_t r = mipt::gf2::rank(m);
    for (int op = 0; op < 20; ++op) {
      const std::size_t a = rng() % rows;
      std::size_t b = rng() % rows;
      if (a == b) b = (b + 1) % rows;
      if (op % 2)
        m.swap_rows(a, b);
      else
        m.xor_row_into(a, b);
    }
    EXPECT_EQ(mipt::gf2::rank(m), r);
  }
}

TEST(Gf2Properties, StackedWithItselfKeepsRank) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const BitMatrix m = random_matrix(1 + rng() % 30, 1 + rng() % 130, rng);
    EXPECT_EQ(mipt::gf2::rank(m.stacked(m)), mipt::gf2::rank(m));
  }
}

TEST(Gf2Properties, WideMatricesAgreeWithDense) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const BitMatrix m = random_matrix(60 + rng() % 80, 60 + rng() % 200, rng, 0.05 + 0.1 * (trial % 5));
    EXPECT_EQ(mipt::gf2::rank(m), dense_rank(m));
  }
}

}  // namespace
