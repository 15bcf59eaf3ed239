#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nevan/nevanlinna.hpp"
#include "nevan/symbolic.hpp"
#include "nevan/words.hpp"

namespace nevan {

/// max(n+1-p, 1).
unsigned kappa(std::size_t p, std::size_t n);

/// Nonnegative least-squares coefficients of violation ~ c1 * log+ T + c2 * log r.
struct ErrorTermFit {
  double c_log_t = 0;
  double c_log_r = 0;
  double residual = 0;
};

/// Nonnegative least squares for y ~ a * x1 + b * x2 (two columns, exhaustive over
/// active sets).
ErrorTermFit fit_error_term(const std::vector<double>& log_t, const std::vector<double>& log_r,
                            const std::vector<double>& violation);

struct VerificationReport {
  std::string theorem;
  bool passed = false;
  std::string verdict;
  std::vector<double> radii;
  std::vector<double> margins;
  std::optional<ErrorTermFit> fit;
  std::vector<double> violation_radii;
  /// Named scalar results, e.g. final_ratio, empirical_K, defect_sum.
  std::map<std::string, double> metrics;
  /// Named non-numeric findings, e.g. the witness operator set or linear relations.
  std::map<std::string, std::string> facts;
};

struct NumericSetup {
  RadiusGrid grid = RadiusGrid::standard();
  ProfileOptions options;
};

/// e(r) = m(r, Q) + N(r, Q) - d T(r) for a homogeneous form Q of degree d; passes
/// iff max e - min e <= band.
VerificationReport check_fmt(const ProjectiveMap& map, const Polynomial& q, const NumericSetup& setup, double band);
VerificationReport check_fmt(const ProjectiveMap& map, const LinearForm& h, const NumericSetup& setup, double band);

/// Hypotheses shared by the second-main-theorem style checks. Throws
/// TooFewHyperplanes (q < n+2), NotGeneralPosition, or DegenerateMap (linearly
/// degenerate or not of maximal rank). Returns the witness operator set when p <= n.
std::optional<OperatorSet> require_smt_hypotheses(const ProjectiveMap& map, const HyperplaneFamily& hyperplanes);

/// margin(r) = sum_i N^[k](r, H_i) - (q-n-1) T(r) with k = truncation or kappa(p, n).
/// Passes iff max(0, -margin)/T <= ratio_limit over the last decade of the grid.
VerificationReport check_smt(const ProjectiveMap& map, const HyperplaneFamily& hyperplanes, const NumericSetup& setup,
                             std::optional<Truncation> truncation = std::nullopt, double ratio_limit = 0.05);

struct DefectResult {
  std::vector<double> defects;
  VerificationReport report;
};

/// delta_i = 1 - N^[k](R, H_i)/T(R) at the largest radius; passes iff
/// sum delta_i <= n + 1 + slack.
DefectResult defects(const ProjectiveMap& map, const HyperplaneFamily& hyperplanes, const NumericSetup& setup,
                     std::optional<Truncation> truncation = std::nullopt, double slack = 0.1);

/// Minimum multiplicity of the zero divisor of g; nullopt (infinite) when g is a
/// nonzero constant. Exact for every p (multivariate square-free decomposition).
std::optional<unsigned> min_zero_multiplicity(const Polynomial& g);

/// sum_i (1 - k/mu_i), infinite multiplicities contributing 1.
double ramification_sum(const std::vector<std::optional<unsigned>>& mu, unsigned k);

struct RamificationResult {
  std::vector<std::optional<unsigned>> mu;
  VerificationReport report;
};

/// Passes iff sum_i (1 - kappa(p,n)/mu_i) <= n + 1. Requires general position and a
/// linearly nondegenerate map.
RamificationResult ramification_check(const ProjectiveMap& map, const HyperplaneFamily& hyperplanes);

/// Maps landing in the Fermat hypersurface sum w_j^d = 0. Throws NotOnFermat,
/// NotMaximalRank.
VerificationReport fermat_section_check(const ProjectiveMap& map, unsigned d);

/// Maps omitting the Fermat hypersurface (sum f_j^d a nonzero constant). Throws
/// DoesNotOmit, NotMaximalRank.
VerificationReport fermat_omit_check(const ProjectiveMap& map, unsigned d);

/// Pole order of Delta^w g / g along every component of the zero set of g is at most
/// min(ord g, |w|). Vacuous pass when Delta^w g vanishes identically.
VerificationReport check_pole_order_bound(const Polynomial& g, const Word& w);

/// Divisor inequality sum_i (g_i)_0 - (W_S(f))_0 <= sum_i min((g_i)_0, kappa(p,n)),
/// checked exactly on every component. Requires pairwise distinct hyperplanes and
/// W_S(f) != 0.
VerificationReport check_vanishing_estimate(const ProjectiveMap& map, const HyperplaneFamily& hyperplanes,
                                            const OperatorSet& s);

struct AprioriOptions {
  std::size_t samples = 64;
  double factor = 100;
  std::uint64_t seed = 0;
  /// Additional sample points, tried before the generated ones.
  std::vector<std::vector<std::complex<double>>> extra_points;
};

/// Ratio |f|_max^{q-n-1} / (phi * psi) with phi = prod |g_i| / |W_S(f)| and psi the
/// sum over (n+1)-subsets R of |det(Delta^s g_i / g_i)|, rows normalised to unit
/// length. Samples lie on the grid spheres and at random radii; points where some g_i
/// or W_S(f) vanishes are redrawn. Passes iff max/median <= factor; reports the
/// empirical constant K = max ratio.
VerificationReport check_apriori_estimate(const ProjectiveMap& map, const HyperplaneFamily& hyperplanes,
                                          const OperatorSet& s, const RadiusGrid& grid,
                                          const AprioriOptions& options = {});

}  // namespace nevan
