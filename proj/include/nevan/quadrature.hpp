#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace nevan {

enum class QuadratureScheme { ProductRule, LowDiscrepancy };

std::string to_string(QuadratureScheme s);
/// "product" or "low-discrepancy"; ConfigError otherwise.
QuadratureScheme parse_quadrature_scheme(const std::string& name);

struct QuadratureSpec {
  QuadratureScheme scheme = QuadratureScheme::ProductRule;
  std::size_t nodes = 4096;
  std::uint64_t seed = 0;
};

/// Mean with a standard error; the error is zero for deterministic quantities.
struct Estimate {
  double value = 0;
  double standard_error = 0;
};

/// Weighted nodes on the unit sphere of C^p. Weights sum to 1 and the rule
/// integrates against the rotation-invariant probability measure (for p = 1 the
/// uniform measure on the circle).
struct SphereRule {
  std::size_t p = 1;
  std::vector<std::complex<double>> points;  // node k occupies [k*p, (k+1)*p)
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const std::complex<double>> node(std::size_t k) const { return {points.data() + k * p, p}; }
};

/// p = 1: equispaced circle nodes rotated by a seed-dependent offset.
/// p >= 2, product rule: Gauss-Legendre on the simplex of |z_j|^2 times equispaced
/// phases. p >= 2, low discrepancy: shifted Sobol points mapped to the sphere
/// through normalised Gaussians (equal weights).
/// Throws ConfigError when spec.nodes < 64.
SphereRule sphere_rule(std::size_t p, const QuadratureSpec& spec);

using SphereIntegrand = std::function<double(std::span<const std::complex<double>>)>;

/// Average of h over the sphere of radius r. A non-finite sample triggers a redraw
/// of the rule with the next seed; after a few redraws QuadratureFailure is raised
/// naming the offending node.
double sphere_average(const SphereIntegrand& h, std::size_t p, double r, const QuadratureSpec& spec);

/// Deterministic 64-bit mixer used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace nevan
