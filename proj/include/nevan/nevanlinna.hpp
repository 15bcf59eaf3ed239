#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "nevan/polynomial.hpp"
#include "nevan/quadrature.hpp"
#include "nevan/symbolic.hpp"

namespace nevan {

/// Strictly increasing radii, all > 1.
class RadiusGrid {
 public:
  explicit RadiusGrid(std::vector<double> radii);

  /// r_k = 10^{k/4}, k = 4..16.
  static RadiusGrid standard();
  /// Same quarter-decade spacing from 10 up to (at least) r_max.
  static RadiusGrid geometric_to(double r_max);

  const std::vector<double>& radii() const { return radii_; }
  std::size_t size() const { return radii_.size(); }
  double back() const { return radii_.back(); }

 private:
  std::vector<double> radii_;
};

/// Truncation level for counting functions; kUntruncated counts full multiplicity.
using Truncation = unsigned;
inline constexpr Truncation kUntruncated = std::numeric_limits<unsigned>::max();

/// "1", "2", ..., "inf".
std::string truncation_name(Truncation m);

/// log max_j |f_j(z)|, the integrand of the order function.
double log_max_norm(const std::vector<NumericPolynomial>& f, std::span<const std::complex<double>> z);

/// Sphere average of log max_j |f_j|.
double order_function(const ProjectiveMap& map, double r, const QuadratureSpec& quad);

/// Sphere average of log(|f|_max^d |Q|_max / |Q(f)|), where |Q|_max is the largest
/// coefficient modulus of the homogeneous form Q. IdenticallyZeroComposition when
/// Q(f) vanishes identically.
double proximity(const ProjectiveMap& map, const Polynomial& q, double r, const QuadratureSpec& quad);

struct DivisorPoint {
  std::complex<double> location;
  unsigned multiplicity;
};

struct DivisorP1 {
  std::vector<DivisorPoint> points;
};

/// Zeros of a univariate g with exact multiplicities (square-free decomposition)
/// and numerically located roots (companion eigenvalues, Newton polished).
DivisorP1 divisor_p1(const Polynomial& g);

/// sum over |a| <= r of min(mult, m) * log(r / max(|a|, 1)).
double counting_p1(const DivisorP1& div, double r, Truncation m);

/// Untruncated counting function by Jensen: avg log|g| on |z| = r minus on |z| = 1.
double counting_jensen(const Polynomial& g, double r, const QuadratureSpec& quad);

/// Jensen estimate repeated over independently shifted low-discrepancy rules; the
/// spread of the replicates gives the standard error.
Estimate counting_jensen_replicated(const Polynomial& g, double r, const QuadratureSpec& quad,
                                    std::size_t replicates);

/// Divisors of g restricted to random complex lines through the origin (directions
/// uniform on P^{p-1}). Restrictions are computed exactly on rational directions, so
/// multiplicities along each line are exact. Counting estimates at different radii
/// and truncations reuse the same lines.
class SlicedDivisor {
 public:
  /// DegenerateSlice when a line keeps landing inside the zero set of g.
  SlicedDivisor(const Polynomial& g, std::size_t lines, std::uint64_t seed);

  Estimate counting(double r, Truncation m) const;
  /// Smallest multiplicity seen on any line (0 if no line meets the divisor).
  unsigned min_multiplicity() const;
  std::size_t lines() const { return slices_.size(); }
  std::size_t resampled() const { return resampled_; }

 private:
  std::vector<DivisorP1> slices_;  // locations already measured in unit-speed line parameter
  std::size_t resampled_ = 0;
};

Estimate counting_sliced(const Polynomial& g, double r, Truncation m, std::size_t lines, std::uint64_t seed);

struct HyperplaneProfile {
  std::vector<double> proximity;
  /// counting[t][k]: truncation index t, radius index k.
  std::vector<std::vector<double>> counting;
  std::vector<std::vector<double>> counting_error;
};

struct FunctionalProfile {
  std::size_t p = 1;
  std::vector<double> radii;
  std::vector<double> order;
  /// Ascending; always ends with kUntruncated.
  std::vector<Truncation> truncations;
  std::vector<HyperplaneProfile> hyperplanes;

  std::size_t truncation_index(Truncation m) const;
  const std::vector<double>& counting(std::size_t hyperplane, Truncation m) const;
  const std::vector<double>& counting_error(std::size_t hyperplane, Truncation m) const;
};

struct ProfileOptions {
  QuadratureSpec quad;
  /// Lines per hyperplane for truncated counting when p >= 2.
  std::size_t lines = 400;
  std::size_t threads = 1;
};

/// Order, proximity and counting functions of map against each hyperplane over the
/// grid. p = 1 counts exactly from divisor_p1; p >= 2 uses Jensen for the untruncated
/// level and line slicing for finite levels.
FunctionalProfile profile(const ProjectiveMap& map, const HyperplaneFamily& hyperplanes, const RadiusGrid& grid,
                          std::vector<Truncation> truncations, const ProfileOptions& options);

/// Checks the monotonicity and truncation-ordering invariants. Estimated values are
/// compared with a slack of sigmas * (combined standard error) plus a small
/// quadrature allowance. Returns human-readable violations, empty when valid.
std::vector<std::string> validate_profile(const FunctionalProfile& profile, double sigmas = 3.0);

}  // namespace nevan
