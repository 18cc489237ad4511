#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "traintrack/free_group.hpp"
#include "traintrack/graph_map.hpp"
#include "traintrack/strata.hpp"

namespace tt {

/// Every canonical conjugacy class (cyclically reduced, least rotation) with
/// 1 <= length <= max_len, in increasing (length, letters) order.
std::vector<CyclicWord> enumerate_classes(int rank, int max_len, int jobs = 1);

struct PeriodicWitness {
  CyclicWord cls;
  int period = 0;  // least k with class(phi^k g) = class(g)
  /// Least j with class(phi^j g) = class(g^-1), when the orbit meets it
  /// within the probed iterates.
  std::optional<int> inverse_at;
};

enum class AtoroidalityVerdict { not_atoroidal, no_witness_within_bounds };
const char* to_string(AtoroidalityVerdict v);

struct AtoroidalityReport {
  std::vector<PeriodicWitness> witnesses;
  /// Classes that reach their inverse class within the bound but do not
  /// return to themselves; periodic only if g and g^-1 are identified.
  std::vector<PeriodicWitness> inverse_only;
  int max_class_len = 0;
  int max_period = 0;
  std::size_t classes_checked = 0;
  AtoroidalityVerdict verdict = AtoroidalityVerdict::no_witness_within_bounds;
};

/// Follows class(phi^k g) for k <= max_period from every canonical class of
/// length <= max_class_len and records returns to the starting class.
AtoroidalityReport atoroidality_probe(const Automorphism& phi, int max_class_len, int max_period, int jobs = 1);

struct RatioRow {
  CyclicWord cls;
  std::size_t norm = 0;
  std::size_t fwd = 0;  // |phi^M g|
  std::size_t bwd = 0;  // |phi^-M g|
  double ratio = 0;     // max(fwd, bwd) / norm
};

enum class CertificateVerdict { empirical_certificate, no_certificate_within_bounds };
const char* to_string(CertificateVerdict v);

struct HyperbolicityCertificate {
  CertificateVerdict verdict = CertificateVerdict::no_certificate_within_bounds;
  int M = 0;           // certifying exponent, or M_max without a certificate
  double lambda = 0;   // r(M)
  int max_class_len = 0;
  int M_max = 0;
  std::vector<double> r_by_M;  // r(1), ..., r(M)
  std::vector<RatioRow> table;  // rows at M, in class order
};

/// r(M) = min over classes of length <= max_class_len of
/// max(|phi^M g|, |phi^-M g|) / |g|; the search stops at the first M with
/// r(M) > 1.
/// Needs a verified inverse.
HyperbolicityCertificate certificate_search(const Automorphism& phi, int M_max, int max_class_len, int jobs = 1);

/// C with C^-1 L(sigma) <= |x| <= C L(sigma): the larger of the longest edge
/// and the largest ratio |mark(e)| / l(e). Needs a marking.
double distortion_constant(const GraphMap& f, const Metric& metric);

/// Conjugacy lengths |phi^k g| for k = k_from..k_to. Negative k uses the
/// inverse. Throws ValidationError when an iterate would exceed letter_budget.
std::vector<std::size_t> growth_table(const Automorphism& phi, const Word& g, int k_from, int k_to,
                                      std::size_t letter_budget = 10'000'000);

}  // namespace tt
