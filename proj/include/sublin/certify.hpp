#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>

#include "sublin/calculus.hpp"
#include "sublin/eigen.hpp"
#include "sublin/model.hpp"

namespace sublin {

enum class ConditionName {
  seno,
  expo,
  lap,
  rem,
  i1,
  i2,
  puf,
  nec,
  nec_c,
  trivial_mplus
};

std::string to_string(ConditionName n);

struct ConditionReport {
  ConditionName name{ConditionName::seno};
  double lhs{std::numeric_limits<double>::quiet_NaN()};
  double rhs{std::numeric_limits<double>::quiet_NaN()};
  bool holds{false};
  double margin{std::numeric_limits<double>::quiet_NaN()};  // rhs - lhs
  std::optional<Interval> tau_window;
  double quadrature_error{0.0};
  bool applied{false};
  std::string skip_reason;
  bool strict{false};
  std::optional<Interval> interval;  // candidate interval the report refers to

  static ConditionReport skipped(ConditionName n, std::string reason);
};

enum class Verdict { Exists, NotExists, Inconclusive };

std::string to_string(Verdict v);

enum class Method { Sinh, Cosh, I1, I2 };

struct Witness {
  Interval I;
  double tau{0.0};
  Method method{Method::Sinh};
  ConditionName condition{ConditionName::seno};
  /// Extra weight scale for the puf route (weight used downstream is
  /// tau * weight_scale * m); 1 otherwise.
  double weight_scale{1.0};
  /// c sup-norm to use in the construction (rem restricts it to M^-).
  double c_norm{0.0};
};

struct Certificate {
  Verdict verdict{Verdict::Inconclusive};
  std::vector<ConditionReport> reports;
  std::optional<Witness> witness;
};

/// Cache of principal eigenpairs keyed by candidate interval (the pair
/// depends only on (b,c,m,I), not on p or tau).
class EigenCache {
 public:
  const EigenPair& get(const Problem& problem, const Interval& I, double tol = 1e-8);

 private:
  std::map<std::pair<double, double>, EigenPair> cache_;
};

enum class TheoremAaVariant { seno, expo, lap, rem };
enum class TheoremBienVariant { i1, i2, puf };

ConditionReport check_theorem_aa(const Problem& problem, const Interval& I,
                                 TheoremAaVariant variant, EigenCache* cache = nullptr);
ConditionReport check_theorem_bien(const Problem& problem, const Interval& I,
                                   TheoremBienVariant variant,
                                   EigenCache* cache = nullptr);
/// Necessary condition; returns nec and, when c > 0 on M+, also nec_c.
std::vector<ConditionReport> check_necessary(const Problem& problem);

Certificate certify(const Problem& problem, EigenCache* cache = nullptr);

}  // namespace sublin
