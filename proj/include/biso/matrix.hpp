#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace biso {

// Dense row-major matrix of doubles.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {
    if (r < 0 || c < 0) throw std::invalid_argument("Matrix: negative dimension");
  }

  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

  Matrix transposed() const {
    Matrix t(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool operator==(const Matrix& o) const {
    return rows == o.rows && cols == o.cols && data == o.data;
  }
};

// Square 0/1 matrix packed into 64-bit words, row-major.
class BitMatrix {
 public:
  BitMatrix() = default;
  explicit BitMatrix(int n)
      : n_(n), words_per_row_((n + 63) / 64),
        bits_(static_cast<std::size_t>(n) * words_per_row_, 0) {}

  int size() const { return n_; }

  bool get(int i, int j) const {
    return (bits_[row_word(i, j)] >> (j & 63)) & 1u;
  }

  // Returns true if the bit was newly set.
  bool set(int i, int j) {
    std::uint64_t& w = bits_[row_word(i, j)];
    const std::uint64_t m = 1ULL << (j & 63);
    if (w & m) return false;
    w |= m;
    return true;
  }

  // Number of set bits in row i restricted to positions marked in `mask`
  // (mask has one word layout identical to a row).
  int row_count_masked(int i, const std::vector<std::uint64_t>& mask) const {
    const std::size_t base = static_cast<std::size_t>(i) * words_per_row_;
    int c = 0;
    for (int w = 0; w < words_per_row_; ++w)
      c += __builtin_popcountll(bits_[base + w] & mask[w]);
    return c;
  }

  std::vector<std::uint64_t> make_row_mask(const std::vector<std::int32_t>& members) const {
    std::vector<std::uint64_t> mask(words_per_row_, 0);
    for (int j : members) mask[j >> 6] |= 1ULL << (j & 63);
    return mask;
  }

  std::int64_t count_set() const {
    std::int64_t c = 0;
    for (std::uint64_t w : bits_) c += __builtin_popcountll(w);
    return c;
  }

 private:
  std::size_t row_word(int i, int j) const {
    return static_cast<std::size_t>(i) * words_per_row_ + (j >> 6);
  }

  int n_ = 0;
  int words_per_row_ = 0;
  std::vector<std::uint64_t> bits_;
};

}  // namespace biso
