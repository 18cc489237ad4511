#include "traintrack/hyperbolicity.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include "parallel.hpp"
#include "traintrack/error.hpp"

namespace tt {

namespace {

std::vector<Letter> alphabet_letters(int rank) {
  std::vector<Letter> out;
  for (int i = 1; i <= rank; ++i) {
    out.push_back(i);
    out.push_back(-i);
  }
  return out;  // increasing letter_key
}

// Canonical classes of length exactly n whose first letter is `first`. The
// first letter of a least rotation is its smallest letter, which prunes the
// walk.
void classes_with_first(int rank, std::size_t n, Letter first, std::vector<CyclicWord>& out) {
  const auto letters = alphabet_letters(rank);
  std::vector<Letter> w{first};
  w.reserve(n);
  auto rec = [&](auto&& self) -> void {
    if (w.size() == n) {
      if (n > 1 && w.back() == -w.front()) return;
      if (least_rotation(w) == 0) out.push_back(CyclicWord::from_canonical(w));
      return;
    }
    for (Letter x : letters) {
      if (letter_key(x) < letter_key(first) || x == -w.back()) continue;
      w.push_back(x);
      self(self);
      w.pop_back();
    }
  };
  rec(rec);
}

std::size_t image_length_estimate(const Automorphism& phi, const CyclicWord& c) {
  std::size_t s = 0;
  for (Letter x : c.letters()) s += phi.images()[static_cast<std::size_t>(std::abs(x) - 1)].length();
  return s;
}

}  // namespace

std::vector<CyclicWord> enumerate_classes(int rank, int max_len, int jobs) {
  if (rank < 1) throw ValidationError("enumerate_classes: rank must be positive");
  std::vector<std::pair<std::size_t, Letter>> tasks;
  for (int n = 1; n <= max_len; ++n) {
    for (Letter x : alphabet_letters(rank)) tasks.emplace_back(static_cast<std::size_t>(n), x);
  }
  std::vector<std::vector<CyclicWord>> parts(tasks.size());
  detail::parallel_for(tasks.size(), jobs,
                       [&](std::size_t t) { classes_with_first(rank, tasks[t].first, tasks[t].second, parts[t]); });
  std::vector<CyclicWord> out;
  for (auto& p : parts) out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
  return out;  // tasks run in (length, first letter) order and each part is generated in letter order
}

const char* to_string(AtoroidalityVerdict v) {
  return v == AtoroidalityVerdict::not_atoroidal ? "not-atoroidal" : "no-witness-within-bounds";
}

AtoroidalityReport atoroidality_probe(const Automorphism& phi, int max_class_len, int max_period, int jobs) {
  if (max_class_len < 1 || max_period < 1) throw ValidationError("atoroidality_probe: bounds must be positive");
  AtoroidalityReport rep;
  rep.max_class_len = max_class_len;
  rep.max_period = max_period;
  const auto classes = enumerate_classes(phi.rank(), max_class_len, jobs);
  rep.classes_checked = classes.size();
  std::vector<std::optional<PeriodicWitness>> found(classes.size());
  detail::parallel_for(classes.size(), jobs, [&](std::size_t idx) {
    const CyclicWord& start = classes[idx];
    const CyclicWord inv = start.inverse();
    CyclicWord x = start;
    PeriodicWitness w{start, 0, std::nullopt};
    for (int k = 1; k <= max_period; ++k) {
      x = apply(phi, x);
      if (x == start) {
        w.period = k;
        break;
      }
      if (!w.inverse_at && x == inv) w.inverse_at = k;
    }
    if (w.period > 0 || w.inverse_at) found[idx] = std::move(w);
  });
  for (auto& w : found) {
    if (!w) continue;
    (w->period > 0 ? rep.witnesses : rep.inverse_only).push_back(std::move(*w));
  }
  rep.verdict = rep.witnesses.empty() ? AtoroidalityVerdict::no_witness_within_bounds
                                      : AtoroidalityVerdict::not_atoroidal;
  return rep;
}

const char* to_string(CertificateVerdict v) {
  return v == CertificateVerdict::empirical_certificate ? "empirical-certificate" : "no-certificate-within-bounds";
}

HyperbolicityCertificate certificate_search(const Automorphism& phi, int M_max, int max_class_len, int jobs) {
  if (M_max < 1 || max_class_len < 1) throw ValidationError("certificate_search: bounds must be positive");
  const Automorphism inv = phi.inverse();  // throws without a verified inverse
  const auto classes = enumerate_classes(phi.rank(), max_class_len, jobs);
  HyperbolicityCertificate cert;
  cert.M_max = M_max;
  cert.max_class_len = max_class_len;
  // Forward and backward orbits advance one step per M; the search stops at
  // the first certifying exponent.
  std::vector<CyclicWord> fwd(classes), bwd(classes);
  std::vector<double> ratio(classes.size());
  for (int M = 1; M <= M_max; ++M) {
    detail::parallel_for(classes.size(), jobs, [&](std::size_t idx) {
      fwd[idx] = apply(phi, fwd[idx]);
      bwd[idx] = apply(inv, bwd[idx]);
      ratio[idx] = static_cast<double>(std::max(fwd[idx].length(), bwd[idx].length())) /
                   static_cast<double>(classes[idx].length());
    });
    const double r = *std::min_element(ratio.begin(), ratio.end());
    cert.r_by_M.push_back(r);
    cert.M = M;
    cert.lambda = r;
    if (r > 1 + 1e-12) {
      cert.verdict = CertificateVerdict::empirical_certificate;
      break;
    }
  }
  cert.table.reserve(classes.size());
  for (std::size_t idx = 0; idx < classes.size(); ++idx) {
    cert.table.push_back({classes[idx], classes[idx].length(), fwd[idx].length(), bwd[idx].length(), ratio[idx]});
  }
  return cert;
}

double distortion_constant(const GraphMap& f, const Metric& metric) {
  const Graph& g = f.graph();
  if (!g.has_marking()) throw ValidationError("distortion_constant: graph has no marking");
  double C = 0;
  for (int e = 1; e <= g.edge_count(); ++e) {
    const double l = metric.length(e);
    C = std::max({C, l, static_cast<double>(g.mark(e).length()) / l});
  }
  return C;
}

std::vector<std::size_t> growth_table(const Automorphism& phi, const Word& g, int k_from, int k_to,
                                      std::size_t letter_budget) {
  if (k_from > k_to) throw ValidationError("growth_table: empty range");
  std::optional<Automorphism> inv;
  if (k_from < 0) inv = phi.inverse();
  auto walk = [&](const Automorphism& a, int steps, std::vector<std::size_t>& lens) {
    // lens[j] = |a^j g| for j = 0..steps
    CyclicWord x(g);
    lens.push_back(x.length());
    for (int j = 1; j <= steps; ++j) {
      if (image_length_estimate(a, x) > letter_budget) {
        throw ValidationError("growth_table: iterate " + std::to_string(j) + " exceeds the letter budget");
      }
      x = apply(a, x);
      lens.push_back(x.length());
    }
  };
  std::vector<std::size_t> pos, neg;
  if (k_to > 0) walk(phi, k_to, pos);
  if (k_from < 0) walk(*inv, -k_from, neg);
  const std::size_t base = CyclicWord(g).length();
  std::vector<std::size_t> out;
  for (int k = k_from; k <= k_to; ++k) {
    if (k == 0) {
      out.push_back(base);
    } else if (k > 0) {
      out.push_back(pos[static_cast<std::size_t>(k)]);
    } else {
      out.push_back(neg[static_cast<std::size_t>(-k)]);
    }
  }
  return out;
}

}  // namespace tt
