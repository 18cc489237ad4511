#pragma once

#include <cstdint>
#include <cstdlib>
#include <span>
#include <vector>

namespace tt {

/// A signed symbol: +k is the k-th generator (or oriented edge), -k its inverse.
/// Index 0 is never valid.
using Letter = std::int32_t;

/// Fixed total order on signed symbols: x1 < x1^-1 < x2 < x2^-1 < ...
constexpr std::uint32_t letter_key(Letter x) noexcept {
  const auto index = static_cast<std::uint32_t>(x < 0 ? -x : x);
  return 2 * (index - 1) + (x < 0 ? 1u : 0u);
}

constexpr bool letter_less(Letter a, Letter b) noexcept { return letter_key(a) < letter_key(b); }

/// Start offset of the lexicographically least rotation (Booth's algorithm, linear time).
inline std::size_t least_rotation(std::span<const Letter> s) {
  const std::size_t n = s.size();
  if (n < 2) return 0;
  std::vector<std::ptrdiff_t> fail(2 * n, -1);
  std::size_t k = 0;
  auto at = [&](std::size_t i) { return letter_key(s[i % n]); };
  for (std::size_t j = 1; j < 2 * n; ++j) {
    const auto sj = at(j);
    std::ptrdiff_t i = fail[j - k - 1];
    while (i != -1 && sj != at(k + static_cast<std::size_t>(i) + 1)) {
      if (sj < at(k + static_cast<std::size_t>(i) + 1)) k = j - static_cast<std::size_t>(i) - 1;
      i = fail[static_cast<std::size_t>(i)];
    }
    if (sj != at(k + static_cast<std::size_t>(i) + 1)) {  // i == -1
      if (sj < at(k)) k = j;
      fail[j - k] = -1;
    } else {
      fail[j - k] = i + 1;
    }
  }
  return k % n;
}

/// Rotates `s` in place so that it starts at its least rotation.
inline void canonicalize_rotation(std::vector<Letter>& s) {
  const auto k = least_rotation(s);
  if (k != 0) {
    std::vector<Letter> out;
    out.reserve(s.size());
    out.insert(out.end(), s.begin() + static_cast<std::ptrdiff_t>(k), s.end());
    out.insert(out.end(), s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k));
    s = std::move(out);
  }
}

/// Lexicographic comparison under `letter_key`.
inline bool letters_less(std::span<const Letter> a, std::span<const Letter> b) {
  const std::size_t n = a.size() < b.size() ? a.size() : b.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) return letter_less(a[i], b[i]);
  }
  return a.size() < b.size();
}

}  // namespace tt
