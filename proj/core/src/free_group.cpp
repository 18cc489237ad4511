#include "traintrack/free_group.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <map>
#include <set>

#include "traintrack/error.hpp"

namespace tt {

Word::Word(std::vector<Letter> letters) {
  letters_.reserve(letters.size());
  for (Letter x : letters) push_back(x);
}

void Word::push_back(Letter x) {
  if (!letters_.empty() && letters_.back() == -x) {
    letters_.pop_back();
  } else {
    letters_.push_back(x);
  }
}

Word Word::inverse() const {
  Word w;
  w.letters_.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) w.letters_.push_back(-*it);
  return w;
}

int Word::max_index() const noexcept {
  int m = 0;
  for (Letter x : letters_) m = std::max(m, std::abs(x));
  return m;
}

Word operator*(const Word& u, const Word& v) {
  Word w = u;
  w.letters_.reserve(u.length() + v.length());
  for (Letter x : v.letters_) w.push_back(x);
  return w;
}

Word reduce(std::span<const Letter> raw, int rank) {
  for (Letter x : raw) {
    if (x == 0 || std::abs(x) > rank) {
      throw ValidationError("generator index " + std::to_string(x) + " outside rank " +
                            std::to_string(rank));
    }
  }
  return Word(std::vector<Letter>(raw.begin(), raw.end()));
}

namespace {

// Strips matching ends of a freely reduced word.
CyclicReduction strip(const Word& w) {
  const auto& s = w.vec();
  std::size_t lo = 0;
  std::size_t hi = s.size();
  while (hi - lo >= 2 && s[lo] == -s[hi - 1]) {
    ++lo;
    --hi;
  }
  CyclicReduction r;
  r.conjugator = Word(std::vector<Letter>(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(lo)));
  std::vector<Letter> core(s.begin() + static_cast<std::ptrdiff_t>(lo),
                           s.begin() + static_cast<std::ptrdiff_t>(hi));
  r.core = Word(core);
  canonicalize_rotation(core);
  r.cls = CyclicWord::from_canonical(std::move(core));
  return r;
}

}  // namespace

CyclicReduction cyclic_reduce(const Word& w) { return strip(w); }

CyclicWord::CyclicWord(const Word& w) : letters_(strip(w).cls.letters_) {}

CyclicWord CyclicWord::inverse() const { return CyclicWord(Word(letters_).inverse()); }

// ---------------------------------------------------------------------------

Alphabet::Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty() || n == "1" || n.find('^') != std::string::npos) {
      throw ValidationError("invalid generator name '" + n + "'");
    }
    if (!seen.insert(n).second) throw ValidationError("duplicate generator name '" + n + "'");
  }
}

Alphabet Alphabet::standard(int rank) {
  std::vector<std::string> names;
  for (int i = 0; i < rank; ++i) {
    names.push_back(rank <= 26 ? std::string(1, static_cast<char>('a' + i)) : "x" + std::to_string(i + 1));
  }
  return Alphabet(std::move(names));
}

int Alphabet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<int>(i + 1);
  }
  return 0;
}

std::vector<Letter> Alphabet::parse_letters(std::string_view text) const {
  std::vector<Letter> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && text[end] != ' ' && text[end] != '\t') ++end;
    std::string_view tok = text.substr(pos, end - pos);
    pos = end;
    if (tok == "1") continue;
    int exponent = 1;
    if (auto caret = tok.find('^'); caret != std::string_view::npos) {
      auto exp_text = tok.substr(caret + 1);
      auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
      if (ec != std::errc() || ptr != exp_text.data() + exp_text.size() || exponent == 0) {
        throw ValidationError("bad exponent in token '" + std::string(tok) + "'");
      }
      tok = tok.substr(0, caret);
    }
    const int index = index_of(tok);
    if (index == 0) throw ValidationError("unknown symbol '" + std::string(tok) + "'");
    const Letter x = exponent > 0 ? index : -index;
    for (int k = 0; k < std::abs(exponent); ++k) out.push_back(x);
  }
  return out;
}

std::string Alphabet::format(std::span<const Letter> letters) const {
  if (letters.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (i) out += ' ';
    out += name(std::abs(letters[i]));
    if (letters[i] < 0) out += "^-1";
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void check_images(int rank, const std::vector<Word>& images, const char* what) {
  if (static_cast<int>(images.size()) != rank) {
    throw ValidationError(std::string(what) + ": expected " + std::to_string(rank) + " images, got " +
                          std::to_string(images.size()));
  }
  for (const auto& w : images) {
    if (w.max_index() > rank) throw ValidationError(std::string(what) + ": letter outside rank");
    if (w.empty()) throw ValidationError(std::string(what) + ": trivial image");
  }
}

Word apply_images(const std::vector<Word>& images, std::span<const Letter> w) {
  Word out;
  for (Letter x : w) {
    const auto& img = images[static_cast<std::size_t>(std::abs(x) - 1)].vec();
    if (x > 0) {
      for (Letter y : img) out.push_back(y);
    } else {
      for (auto it = img.rbegin(); it != img.rend(); ++it) out.push_back(-*it);
    }
  }
  return out;
}

bool composes_to_identity(const std::vector<Word>& outer, const std::vector<Word>& inner) {
  for (std::size_t i = 0; i < inner.size(); ++i) {
    const Word w = apply_images(outer, inner[i].letters());
    if (w.length() != 1 || w.front() != static_cast<Letter>(i + 1)) return false;
  }
  return true;
}

}  // namespace

Automorphism::Automorphism(int rank, std::vector<Word> images,
                           std::optional<std::vector<Word>> inverse_images, std::string label)
    : rank_(rank), images_(std::move(images)), inverse_images_(std::move(inverse_images)),
      label_(std::move(label)) {
  if (rank_ < 1) throw ValidationError("rank must be positive");
  check_images(rank_, images_, "images");
  if (inverse_images_) {
    check_images(rank_, *inverse_images_, "inverse images");
    inverse_verified_ = composes_to_identity(images_, *inverse_images_) &&
                        composes_to_identity(*inverse_images_, images_);
  }
}

Automorphism Automorphism::identity(int rank) {
  std::vector<Word> id;
  for (int i = 1; i <= rank; ++i) id.push_back(Word{i});
  return Automorphism(rank, id, id, "identity");
}

Automorphism Automorphism::inner(int rank, const Word& c) {
  std::vector<Word> fwd;
  std::vector<Word> bwd;
  const Word ci = c.inverse();
  for (int i = 1; i <= rank; ++i) {
    fwd.push_back(c * Word{i} * ci);
    bwd.push_back(ci * Word{i} * c);
  }
  return Automorphism(rank, std::move(fwd), std::move(bwd), "inner");
}

Word Automorphism::image(Letter x) const {
  const Word& w = images_.at(static_cast<std::size_t>(std::abs(x) - 1));
  return x > 0 ? w : w.inverse();
}

Automorphism Automorphism::inverse() const {
  if (!inverse_verified_) throw ValidationError("automorphism has no verified inverse");
  return Automorphism(rank_, *inverse_images_, images_, label_.empty() ? "" : label_ + "^-1");
}

Automorphism Automorphism::with_inverse(std::vector<Word> inverse_images) const {
  return Automorphism(rank_, images_, std::move(inverse_images), label_);
}

Automorphism Automorphism::with_label(std::string label) const {
  return Automorphism(rank_, images_, inverse_images_, std::move(label));
}

Word apply(const Automorphism& phi, std::span<const Letter> w) { return apply_images(phi.images(), w); }

Word apply(const Automorphism& phi, const Word& w) { return apply_images(phi.images(), w.letters()); }

CyclicWord apply(const Automorphism& phi, const CyclicWord& w) {
  return CyclicWord(apply_images(phi.images(), w.letters()));
}

Automorphism compose(const Automorphism& phi, const Automorphism& psi) {
  if (phi.rank() != psi.rank()) throw ValidationError("compose: rank mismatch");
  std::vector<Word> images;
  for (const auto& w : psi.images()) images.push_back(apply(phi, w));
  std::optional<std::vector<Word>> inv;
  if (phi.inverse_images() && psi.inverse_images()) {
    inv.emplace();
    for (const auto& w : *phi.inverse_images()) inv->push_back(apply_images(*psi.inverse_images(), w.letters()));
  }
  return Automorphism(phi.rank(), std::move(images), std::move(inv));
}

bool invert_verify(const Automorphism& phi) { return phi.inverse_verified(); }

Word iterate(const Automorphism& phi, const Word& w, int n) {
  if (n < 0 && !phi.inverse_verified()) {
    throw ValidationError("negative iterate requires a verified inverse");
  }
  const auto& images = n >= 0 ? phi.images() : *phi.inverse_images();
  Word out = w;
  for (int k = 0; k < std::abs(n); ++k) out = apply_images(images, out.letters());
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct SearchState {
  std::vector<Word> tuple;  // images of phi o psi
  std::vector<Word> psi;    // images of psi
  int moves = 0;
};

std::size_t total_length(const std::vector<Word>& t) {
  std::size_t s = 0;
  for (const auto& w : t) s += w.length();
  return s;
}

bool is_signed_permutation(const std::vector<Word>& t) {
  std::vector<bool> used(t.size() + 1, false);
  for (const auto& w : t) {
    if (w.length() != 1) return false;
    const auto i = static_cast<std::size_t>(std::abs(w.front()));
    if (used[i]) return false;
    used[i] = true;
  }
  return true;
}

bool is_identity_tuple(const std::vector<Word>& t) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i].length() != 1 || t[i].front() != static_cast<Letter>(i + 1)) return false;
  }
  return true;
}

}  // namespace

std::optional<Automorphism> nielsen_inverse_search(const Automorphism& phi, int depth) {
  if (depth < 1) throw ValidationError("nielsen_inverse_search: depth must be >= 1");
  const int n = phi.rank();

  SearchState start;
  start.tuple = phi.images();
  for (int i = 1; i <= n; ++i) start.psi.push_back(Word{i});

  std::set<std::vector<Word>> visited{start.tuple};
  std::deque<SearchState> frontier{start};
  while (!frontier.empty()) {
    SearchState s = std::move(frontier.front());
    frontier.pop_front();
    if (is_signed_permutation(s.tuple)) {
      const int cost = s.moves + (is_identity_tuple(s.tuple) ? 0 : 1);
      if (cost <= depth) {
        // phi o psi = pi, so phi^-1 = psi o pi^-1.
        std::vector<Word> inv(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
          const Letter target = s.tuple[static_cast<std::size_t>(i)].front();
          const Word& p = s.psi[static_cast<std::size_t>(i)];
          inv[static_cast<std::size_t>(std::abs(target) - 1)] = target > 0 ? p : p.inverse();
        }
        Automorphism result(n, phi.images(), std::move(inv), phi.label());
        if (result.inverse_verified()) return result.inverse().with_inverse(phi.images());
      }
    }
    if (s.moves >= depth) continue;
    const std::size_t len = total_length(s.tuple);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const auto ui = static_cast<std::size_t>(i);
        const auto uj = static_cast<std::size_t>(j);
        for (int variant = 0; variant < 4; ++variant) {
          const bool right = variant < 2;
          const bool invert = variant % 2 == 1;
          auto combine = [&](const Word& a, const Word& b) {
            const Word bb = invert ? b.inverse() : b;
            return right ? a * bb : bb * a;
          };
          SearchState next = s;
          next.tuple[ui] = combine(s.tuple[ui], s.tuple[uj]);
          if (total_length(next.tuple) > len) continue;
          if (!visited.insert(next.tuple).second) continue;
          next.psi[ui] = combine(s.psi[ui], s.psi[uj]);
          next.moves = s.moves + 1;
          frontier.push_back(std::move(next));
        }
      }
    }
  }
  return std::nullopt;
}

bool same_outer_class(const Automorphism& psi, const Automorphism& phi) {
  if (psi.rank() != phi.rank()) return false;
  if (!phi.inverse_verified()) throw ValidationError("same_outer_class: phi needs a verified inverse");
  const int n = phi.rank();
  std::vector<Word> theta;
  for (const auto& w : *phi.inverse_images()) theta.push_back(apply(psi, w));
  // theta = psi o phi^-1 must be conjugation by some c.
  const auto r = cyclic_reduce(theta[0]);
  if (r.core.length() != 1 || r.core.front() != 1) return false;
  if (n == 1) return true;
  const Word& p = r.conjugator;
  const Word pi = p.inverse();
  // c = p x1^k; find k from the second generator.
  const Word w2 = pi * theta[1] * p;
  long k = 0;
  for (Letter x : w2.letters()) {
    if (x == 1) ++k;
    else if (x == -1) --k;
    else break;
  }
  auto x1_pow = [](long e) {
    std::vector<Letter> s(static_cast<std::size_t>(std::abs(e)), e > 0 ? 1 : -1);
    return Word(s);
  };
  const Word c = p * x1_pow(k);
  const Word ci = c.inverse();
  for (int i = 0; i < n; ++i) {
    if (theta[static_cast<std::size_t>(i)] != c * Word{i + 1} * ci) return false;
  }
  return true;
}

}  // namespace tt
