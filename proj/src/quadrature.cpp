#include "nevan/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/special_functions/legendre.hpp>
#include <boost/random/sobol.hpp>

#include "nevan/errors.hpp"

namespace nevan {

namespace {

constexpr int kMaxRedraws = 8;

double frac(double x) { return x - std::floor(x); }

/// Irrational per-axis multipliers for seed-dependent offsets.
double axis_offset(std::uint64_t seed, std::size_t axis) {
  static constexpr double kSteps[] = {0.6180339887498949, 0.4142135623730950, 0.7320508075688772,
                                      0.2360679774997897, 0.6457513110645906, 0.3166247903554000,
                                      0.6055512754639891, 0.1231056256176605};
  return frac(0.5 + static_cast<double>(seed % (1ULL << 40)) * kSteps[axis % 8]);
}

/// Gauss-Legendre nodes and weights mapped to [0, 1].
void gauss_legendre01(int k, std::vector<double>& x, std::vector<double>& w) {
  const auto zeros = boost::math::legendre_p_zeros<double>(k);
  x.clear();
  w.clear();
  for (double t : zeros) {
    const double d = boost::math::legendre_p_prime(k, t);
    const double wt = 1.0 / ((1 - t * t) * d * d);  // half of the [-1,1] weight
    x.push_back(0.5 * (1 + t));
    w.push_back(wt);
    if (t != 0) {
      x.push_back(0.5 * (1 - t));
      w.push_back(wt);
    }
  }
}

SphereRule circle_rule(const QuadratureSpec& spec) {
  SphereRule rule;
  rule.p = 1;
  const std::size_t n = spec.nodes;
  const double offset = axis_offset(spec.seed, 0);
  rule.points.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double theta = 2 * std::numbers::pi * (static_cast<double>(k) + offset) / static_cast<double>(n);
    rule.points.emplace_back(std::cos(theta), std::sin(theta));
  }
  rule.weights.assign(n, 1.0 / static_cast<double>(n));
  return rule;
}

SphereRule product_rule(std::size_t p, const QuadratureSpec& spec) {
  const std::size_t axes = 2 * p - 1;
  std::size_t k = 4;
  auto power = [&](std::size_t base) {
    std::size_t v = 1;
    for (std::size_t a = 0; a < axes; ++a) v *= base;
    return v;
  };
  while (power(k + 1) <= spec.nodes) ++k;

  // Radial part: |z_j|^2 is uniform on the simplex. Stick-breaking coordinates u_j
  // with a smoothstep substitution that flattens the endpoint log singularities.
  std::vector<double> gx, gw;
  gauss_legendre01(static_cast<int>(k), gx, gw);
  std::vector<double> ux(k), uw(k);
  for (std::size_t a = 0; a < k; ++a) {
    const double s = gx[a];
    ux[a] = s * s * (3 - 2 * s);
    uw[a] = gw[a] * 6 * s * (1 - s);
  }

  std::vector<std::vector<double>> radial;  // each entry: x_1..x_p, weight
  std::vector<std::size_t> idx(p - 1, 0);
  for (;;) {
    std::vector<double> x(p + 1);
    double rest = 1, weight = 1;
    for (std::size_t j = 0; j + 1 < p; ++j) {
      const double u = ux[idx[j]];
      x[j] = rest * u;
      weight *= uw[idx[j]] * std::pow(1 - u, static_cast<double>(p - 2 - j));
      rest *= 1 - u;
    }
    x[p - 1] = rest;
    x[p] = weight;
    radial.push_back(std::move(x));
    std::size_t j = 0;
    while (j < p - 1 && ++idx[j] == k) idx[j++] = 0;
    if (j == p - 1) break;
  }

  std::vector<double> offsets(p);
  for (std::size_t j = 0; j < p; ++j) offsets[j] = axis_offset(spec.seed, j);

  SphereRule rule;
  rule.p = p;
  std::size_t phases = 1;
  for (std::size_t j = 0; j < p; ++j) phases *= k;
  rule.points.reserve(radial.size() * phases * p);
  double total = 0;
  for (const auto& x : radial) {
    std::vector<std::size_t> ph(p, 0);
    for (std::size_t c = 0; c < phases; ++c) {
      for (std::size_t j = 0; j < p; ++j) {
        const double theta =
            2 * std::numbers::pi * (static_cast<double>(ph[j]) + offsets[j]) / static_cast<double>(k);
        rule.points.push_back(std::polar(std::sqrt(std::max(x[j], 0.0)), theta));
      }
      rule.weights.push_back(x[p]);
      total += x[p];
      std::size_t j = 0;
      while (j < p && ++ph[j] == k) ph[j++] = 0;
    }
  }
  for (auto& w : rule.weights) w /= total;
  return rule;
}

SphereRule sobol_rule(std::size_t p, const QuadratureSpec& spec) {
  boost::random::sobol qrng(2 * p);
  std::mt19937_64 rng(mix_seed(spec.seed, 0x5eed));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> shift(2 * p);
  for (auto& s : shift) s = uni(rng);
  // Skip the all-zero first point of the sequence.
  qrng.discard(2 * p);

  const double scale = 1.0 / static_cast<double>(qrng.max() - qrng.min() + 1.0);
  SphereRule rule;
  rule.p = p;
  rule.points.reserve(spec.nodes * p);
  std::vector<double> u(2 * p);
  std::vector<std::complex<double>> z(p);
  for (std::size_t k = 0; k < spec.nodes; ++k) {
    for (std::size_t a = 0; a < 2 * p; ++a) u[a] = frac(static_cast<double>(qrng() - qrng.min()) * scale + shift[a]);
    double norm2 = 0;
    for (std::size_t j = 0; j < p; ++j) {
      const double radius = std::sqrt(-2 * std::log(1 - u[2 * j]));
      z[j] = std::polar(radius, 2 * std::numbers::pi * u[2 * j + 1]);
      norm2 += std::norm(z[j]);
    }
    if (norm2 == 0) {
      z[0] = 1;
      norm2 = 1;
    }
    const double inv = 1 / std::sqrt(norm2);
    for (auto& c : z) rule.points.push_back(c * inv);
  }
  rule.weights.assign(spec.nodes, 1.0 / static_cast<double>(spec.nodes));
  return rule;
}

std::string describe(std::span<const std::complex<double>> z) {
  std::ostringstream out;
  out.precision(17);
  out << "(";
  for (std::size_t j = 0; j < z.size(); ++j) out << (j ? ", " : "") << z[j].real() << (z[j].imag() < 0 ? "" : "+")
                                                 << z[j].imag() << "i";
  out << ")";
  return out.str();
}

}  // namespace

std::string to_string(QuadratureScheme s) {
  return s == QuadratureScheme::ProductRule ? "product" : "low-discrepancy";
}

QuadratureScheme parse_quadrature_scheme(const std::string& name) {
  if (name == "product" || name == "product-rule") return QuadratureScheme::ProductRule;
  if (name == "low-discrepancy" || name == "qmc") return QuadratureScheme::LowDiscrepancy;
  throw ConfigError("unknown quadrature scheme '" + name + "' (expected product or low-discrepancy)");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finaliser over the combined input.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SphereRule sphere_rule(std::size_t p, const QuadratureSpec& spec) {
  if (p == 0) throw PreconditionError("sphere_rule: p must be positive");
  if (spec.nodes < 64) throw ConfigError("quadrature needs at least 64 nodes, got " + std::to_string(spec.nodes));
  if (p == 1) return circle_rule(spec);
  return spec.scheme == QuadratureScheme::ProductRule ? product_rule(p, spec) : sobol_rule(p, spec);
}

double sphere_average(const SphereIntegrand& h, std::size_t p, double r, const QuadratureSpec& spec) {
  if (!(r > 0)) throw PreconditionError("sphere_average: radius must be positive");
  std::vector<std::complex<double>> z(p);
  std::string last_node;
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    QuadratureSpec s = spec;
    s.seed = spec.seed + static_cast<std::uint64_t>(attempt);
    const SphereRule rule = sphere_rule(p, s);
    double sum = 0;
    bool ok = true;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const auto node = rule.node(k);
      for (std::size_t j = 0; j < p; ++j) z[j] = r * node[j];
      const double v = h(z);
      if (!std::isfinite(v)) {
        ok = false;
        last_node = describe(z);
        break;
      }
      sum += rule.weights[k] * v;
    }
    if (ok) return sum;
  }
  throw QuadratureFailure("non-finite integrand at node " + last_node + " after " + std::to_string(kMaxRedraws) +
                          " redraws");
}

}  // namespace nevan
