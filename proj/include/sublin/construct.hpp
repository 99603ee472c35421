#pragma once

#include <optional>

#include "sublin/certify.hpp"
#include "sublin/pwfunction.hpp"

namespace sublin {

struct ConstructError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OuterPieces {
  std::optional<PiecewiseFunction> u1;  // on [alpha, I.hi]
  std::optional<PiecewiseFunction> u3;  // on [I.lo, beta]
  double k{0.0};
  double sigma{0.0};
  double epsilon{0.0};
  bool degenerate{false};  // m^- identically zero: outer pieces are zero
};

struct SubsolutionSpec {
  double tau{0.0};
  Method method{Method::Sinh};
  double k{0.0};
  double sigma{0.0};
  double epsilon{0.0};
  double x_under0{0.0};
  double x_over1{0.0};
  PiecewiseFunction glued;
  Interval I;
  bool degenerate{false};
};

struct VerificationReport {
  double max_violation{0.0};
  double worst_x{0.0};
  double tolerance{0.0};
  bool pass{false};
  std::size_t nodes_checked{0};
};

struct SupersolutionSpec {
  std::vector<double> x;    // grid incl. boundary
  std::vector<double> phi;  // solution of L phi = w+
  double k_super{0.0};
  double value(double xq) const;  // k_super * (phi+1), interpolated
};

struct ConstructOptions {
  double c_norm{-1.0};     // sup |c| used by sinh/cosh/i1 (default: compute)
  bool allow_tall{false};  // skip the ||u1|| <= 1 admissibility check
};

/// Outer subsolution pieces u1 = f^k, u3 = g^k for the given method and tau.
/// The problem must be normalized (a == 1).
OuterPieces build_outer_pieces(const Problem& problem, const Interval& I,
                               double tau, Method method,
                               const ConstructOptions& opts = {});

/// Glue u1 | u2 | u3 at the crossing points inside I (Lemma-style max glue).
SubsolutionSpec glue(const OuterPieces& outer, const EigenPair& eig,
                     const Problem& problem, double tau, Method method);

/// Pointwise check of -u'' + b u' + c u <= w u^p for the glued function,
/// where w is the (already tau-scaled) weight.
VerificationReport verify_subsolution(const SubsolutionSpec& spec,
                                      const Problem& problem,
                                      const Coefficient& weight);

/// k(phi+1) with L phi = w+, phi = 0 on the boundary.
SupersolutionSpec build_supersolution(const Problem& problem,
                                      const Coefficient& weight, int n = 2000);

}  // namespace sublin
