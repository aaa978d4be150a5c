#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace tlds {

// Fixed-size row mask used for cover/support counting over dataset rows.
class RowMask {
 public:
  RowMask() = default;
  explicit RowMask(std::size_t n_rows)
      : n_(n_rows), words_((n_rows + 63) / 64, 0) {}

  std::size_t size() const { return n_; }

  void set(std::size_t i) { words_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
  bool test(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (std::uint64_t w : words_) c += std::popcount(w);
    return c;
  }

  RowMask& operator&=(const RowMask& o) {
    check_same(o);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  RowMask& operator|=(const RowMask& o) {
    check_same(o);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }

  friend RowMask operator&(RowMask a, const RowMask& b) { return a &= b; }
  friend RowMask operator|(RowMask a, const RowMask& b) { return a |= b; }

  // dst = a & b, reusing dst's storage.
  static void and_into(RowMask& dst, const RowMask& a, const RowMask& b) {
    a.check_same(b);
    dst.n_ = a.n_;
    dst.words_.resize(a.words_.size());
    for (std::size_t i = 0; i < a.words_.size(); ++i)
      dst.words_[i] = a.words_[i] & b.words_[i];
  }

  // popcount(a & b) without materializing the intersection.
  static std::size_t count_and(const RowMask& a, const RowMask& b) {
    a.check_same(b);
    std::size_t c = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i)
      c += std::popcount(a.words_[i] & b.words_[i]);
    return c;
  }

  // popcount(a | b)
  static std::size_t count_or(const RowMask& a, const RowMask& b) {
    a.check_same(b);
    std::size_t c = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i)
      c += std::popcount(a.words_[i] | b.words_[i]);
    return c;
  }

  // popcount(a & ~b)
  static std::size_t count_and_not(const RowMask& a, const RowMask& b) {
    a.check_same(b);
    std::size_t c = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i)
      c += std::popcount(a.words_[i] & ~b.words_[i]);
    return c;
  }

  bool operator==(const RowMask& o) const {
    return n_ == o.n_ && words_ == o.words_;
  }

 private:
  void check_same(const RowMask& o) const {
    if (n_ != o.n_) throw std::logic_error("RowMask size mismatch");
  }

  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace tlds
