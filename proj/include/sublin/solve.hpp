#pragma once

#include "sublin/construct.hpp"

namespace sublin {

struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Grid {
  int n{0};
  double h{0.0};
  double alpha{0.0}, beta{0.0};
  double node(int i) const { return alpha + (i + 1) * h; }  // interior i=0..n-1
  static Grid make(const Problem& problem, int n_request);
};

struct SolveResult {
  std::vector<double> x;  // interior nodes
  std::vector<double> u;
  double residual_inf{0.0};
  double min_interior{0.0};
  int iterations{0};
  std::vector<double> monotone_trace;  // sup-change per iteration
  bool converged{false};
};

/// Tridiagonal solve of -u'' + b u' + (c + shift_i) u = rhs, zero Dirichlet.
std::vector<double> solve_linear(const Problem& problem,
                                 const std::vector<double>& rhs, const Grid& grid,
                                 const std::vector<double>* shift_diag = nullptr);

/// Monotone iteration between the glued subsolution and the supersolution
/// for weight w (typically tau*m): u_{k+1} = (L+Lam)^{-1}(w u_k^p + Lam u_k).
SolveResult solve_sublinear(const Problem& problem, const Coefficient& weight,
                            const std::vector<double>& lower,
                            const std::vector<double>& upper, const Grid& grid,
                            double tol = 1e-6);

/// Divide out the weight scale: u solving weight s*m maps to a solution of
/// weight m via u / s^{1/(1-p)}.
SolveResult rescale_solution(const SolveResult& r, double s, double p);

struct LiftResult {
  std::vector<double> v;  // u^gamma at interior nodes
  double gamma{0.0};
  double max_violation{0.0};
  double tolerance{0.0};
  bool pass{false};
};

/// Lemma-style exponent lifting: v = u^gamma, gamma = (1-p)/(1-q), checked as
/// a discrete subsolution for exponent q and weight gamma*m.
LiftResult lift_exponent(const Problem& problem, const SolveResult& u,
                         const Grid& grid, double q);

// ---------------------------------------------------------------- pipeline

struct PipelineOptions {
  int grid_n{2000};
  double solver_tol{1e-6};
  double eigen_tol{1e-8};
  bool allow_numeric_witness{true};
  std::vector<double> tau_ladder{1.02, 1.05, 1.1, 1.25, 1.5, 2.0};
};

enum class EvidenceKind { none, certificate, numeric, necessary, trivial };

struct PipelineOutcome {
  Verdict verdict{Verdict::Inconclusive};
  Certificate certificate;
  EvidenceKind evidence{EvidenceKind::none};
  std::optional<SubsolutionSpec> subsolution;   // in the tau-frame
  std::optional<VerificationReport> verification;
  double tau{0.0};
  double weight_scale{1.0};                     // total scale s: weight = s*m
  std::optional<SolveResult> tau_frame;         // solution for weight s*m
  std::optional<SolveResult> solution;          // rescaled to weight m
};

/// certify -> construct -> verify -> solve -> rescale; falls back to a
/// tau-ladder numeric witness when certification is inconclusive.
PipelineOutcome run_pipeline(const Problem& problem, const PipelineOptions& opts = {},
                             EigenCache* cache = nullptr);

// ------------------------------------------------------------------ pstar

struct PStarProbe {
  double p{0.0};
  Verdict verdict{Verdict::Inconclusive};
  EvidenceKind evidence{EvidenceKind::none};
};

struct PStarResult {
  double p_lo{0.0};  // largest certified-NotExists p (0 if none found)
  double p_hi{1.0};  // smallest certified-Exists p (1 if none found)
  bool upper_open{false};  // no Exists probe found up to 1 - 1e-3
  bool all_notexists{false};
  std::vector<PStarProbe> probes;
};

PStarResult pstar_search(const Problem& problem, double tol_p = 0.02,
                         const PipelineOptions& opts = {});

// ------------------------------------------------------- general nonlinearity

struct NonlinearitySpec {
  std::function<double(double)> f;  // on [0, infinity)
  double k1{1.0}, k2{1.0}, k3{1.0};
  double q{0.5};
  double K_under{0.0};  // filled by the pipeline: [k1*J+]^{1/(1-p)}
  double K_over{1.0};
};

struct GeneralSolveOutcome {
  PipelineOutcome modified;  // pipeline on weight k1 m+ - k2 m-
  SolveResult result;        // solution of Lu = m f(u)
  double k_ceiling{0.0};
};

GeneralSolveOutcome solve_general_f(const Problem& problem, NonlinearitySpec spec,
                                    const PipelineOptions& opts = {});

}  // namespace sublin
