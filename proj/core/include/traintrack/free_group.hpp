#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "traintrack/letters.hpp"

namespace tt {

/// Freely reduced word over a fixed basis. Letters are signed generator indices.
class Word {
 public:
  Word() = default;

  /// Freely reduces `letters`. Does not check the rank; see `reduce`.
  explicit Word(std::vector<Letter> letters);
  Word(std::initializer_list<Letter> letters) : Word(std::vector<Letter>(letters)) {}

  std::span<const Letter> letters() const noexcept { return letters_; }
  const std::vector<Letter>& vec() const noexcept { return letters_; }
  std::size_t length() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  Letter front() const { return letters_.front(); }
  Letter back() const { return letters_.back(); }

  Word inverse() const;
  /// Largest generator index used, 0 for the empty word.
  int max_index() const noexcept;

  friend Word operator*(const Word& u, const Word& v);
  friend bool operator==(const Word&, const Word&) = default;
  friend std::strong_ordering operator<=>(const Word& a, const Word& b) {
    if (a.letters_ == b.letters_) return std::strong_ordering::equal;
    return letters_less(a.letters_, b.letters_) ? std::strong_ordering::less
                                                : std::strong_ordering::greater;
  }

  /// Appends `x` with cancellation.
  void push_back(Letter x);

 private:
  std::vector<Letter> letters_;
};

/// Free reduction with rank validation. Throws ValidationError on a letter
/// outside 1..rank.
Word reduce(std::span<const Letter> raw, int rank);

/// Conjugacy class of a word: the cyclically reduced core in its least
/// rotation. `length()` is the conjugacy length.
class CyclicWord {
 public:
  CyclicWord() = default;
  explicit CyclicWord(const Word& w);

  std::span<const Letter> letters() const noexcept { return letters_; }
  const std::vector<Letter>& vec() const noexcept { return letters_; }
  std::size_t length() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  /// The class of the inverse element.
  CyclicWord inverse() const;
  Word as_word() const { return Word(letters_); }

  friend bool operator==(const CyclicWord&, const CyclicWord&) = default;
  friend bool operator<(const CyclicWord& a, const CyclicWord& b) {
    return letters_less(a.letters_, b.letters_);
  }

  /// Wraps letters already known to be cyclically reduced and canonical.
  static CyclicWord from_canonical(std::vector<Letter> letters) {
    CyclicWord c;
    c.letters_ = std::move(letters);
    return c;
  }

 private:
  std::vector<Letter> letters_;
};

/// w = conjugator * core * conjugator^-1, core cyclically reduced; `cls` is
/// the canonical rotation of `core`.
struct CyclicReduction {
  CyclicWord cls;
  Word core;
  Word conjugator;
};

CyclicReduction cyclic_reduce(const Word& w);

/// Names for the basis letters, used for text input and output.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> names);
  /// a, b, c, ... (x1, x2, ... past 26).
  static Alphabet standard(int rank);

  int rank() const noexcept { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(int index) const { return names_.at(static_cast<std::size_t>(index - 1)); }
  /// 1-based index, 0 when unknown.
  int index_of(std::string_view name) const;

  /// Space separated tokens, inverse written `x^-1`. "1" or an empty string is the identity.
  std::vector<Letter> parse_letters(std::string_view text) const;
  std::string format(std::span<const Letter> letters) const;
  std::string format(const Word& w) const { return format(w.letters()); }
  std::string format(const CyclicWord& w) const { return format(w.letters()); }

 private:
  std::vector<std::string> names_;
};

/// Automorphism of the free group of rank `rank()`, given by the images of the
/// basis and optionally the images of the basis under the inverse.
class Automorphism {
 public:
  Automorphism(int rank, std::vector<Word> images,
               std::optional<std::vector<Word>> inverse_images = std::nullopt,
               std::string label = {});

  static Automorphism identity(int rank);
  /// x -> c x c^-1.
  static Automorphism inner(int rank, const Word& c);

  int rank() const noexcept { return rank_; }
  const std::vector<Word>& images() const noexcept { return images_; }
  const std::optional<std::vector<Word>>& inverse_images() const noexcept { return inverse_images_; }
  const std::string& label() const noexcept { return label_; }
  /// Image of a single signed letter.
  Word image(Letter x) const;

  /// True when inverse images are present and compose to the identity both ways.
  bool inverse_verified() const noexcept { return inverse_verified_; }
  /// The inverse automorphism. Throws ValidationError unless inverse_verified().
  Automorphism inverse() const;
  Automorphism with_inverse(std::vector<Word> inverse_images) const;
  Automorphism with_label(std::string label) const;

 private:
  int rank_;
  std::vector<Word> images_;
  std::optional<std::vector<Word>> inverse_images_;
  std::string label_;
  bool inverse_verified_ = false;
};

Word apply(const Automorphism& phi, const Word& w);
Word apply(const Automorphism& phi, std::span<const Letter> w);
/// Class of phi(w) for a class w.
CyclicWord apply(const Automorphism& phi, const CyclicWord& w);

/// (phi o psi)(x) = phi(psi(x)). Inverse images are carried when both have them.
Automorphism compose(const Automorphism& phi, const Automorphism& psi);

/// Checks that the stored inverse images invert the map on both sides.
bool invert_verify(const Automorphism& phi);

/// phi^n(w). Negative n uses the stored inverse and throws ValidationError
/// when it is missing or unverified.
Word iterate(const Automorphism& phi, const Word& w, int n);

/// Searches for the inverse among compositions of at most `depth` elementary
/// Nielsen automorphisms (transvections plus one final signed permutation).
/// The search only visits image tuples whose total length does not increase.
std::optional<Automorphism> nielsen_inverse_search(const Automorphism& phi, int depth);

/// True when psi and phi differ by an inner automorphism. `phi` must carry a
/// verified inverse.
bool same_outer_class(const Automorphism& psi, const Automorphism& phi);

}  // namespace tt
