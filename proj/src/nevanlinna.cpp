#include "nevan/nevanlinna.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "nevan/algebra.hpp"
#include "nevan/errors.hpp"
#include "nevan/parallel.hpp"

namespace nevan {

namespace {

std::vector<NumericPolynomial> numeric_components(const ProjectiveMap& map) {
  std::vector<NumericPolynomial> out;
  for (const auto& c : map.components()) out.emplace_back(c);
  return out;
}

std::vector<std::complex<double>> coefficients_low_to_high(const Polynomial& g) {
  std::vector<std::complex<double>> c(g.total_degree() + 1);
  for (const auto& [e, coef] : g.terms()) c[e[0]] = coef.to_complex();
  return c;
}

std::complex<double> horner(const std::vector<std::complex<double>>& c, std::complex<double> z,
                            std::complex<double>* derivative) {
  std::complex<double> v = 0, d = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    d = d * z + v;
    v = v * z + *it;
  }
  if (derivative) *derivative = d;
  return v;
}

/// Roots of a square-free univariate polynomial of degree >= 1.
std::vector<std::complex<double>> simple_roots(const Polynomial& f) {
  const auto c = coefficients_low_to_high(f);
  const std::size_t deg = c.size() - 1;
  std::vector<std::complex<double>> roots;
  if (deg == 1) {
    roots.push_back(-c[0] / c[1]);
    return roots;
  }
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(deg), static_cast<Eigen::Index>(deg));
  for (std::size_t i = 1; i < deg; ++i) companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1;
  for (std::size_t i = 0; i < deg; ++i)
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(deg - 1)) = -c[i] / c[deg];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw NumericError("companion eigenvalue solve did not converge");
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    std::complex<double> z = solver.eigenvalues()[i];
    for (int it = 0; it < 3; ++it) {
      std::complex<double> d;
      const std::complex<double> v = horner(c, z, &d);
      if (d == 0.0) break;
      const std::complex<double> step = v / d;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      z -= step;
    }
    roots.push_back(z);
  }
  return roots;
}

Estimate mean_and_error(const std::vector<double>& values) {
  Estimate e;
  const double n = static_cast<double>(values.size());
  if (values.empty()) return e;
  for (double v : values) e.value += v;
  e.value /= n;
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - e.value) * (v - e.value);
    e.standard_error = std::sqrt(ss / (n - 1) / n);
  }
  return e;
}

double max_abs_coefficient(const Polynomial& q) {
  double m = 0;
  for (const auto& [e, c] : q.terms()) m = std::max(m, std::abs(c.to_complex()));
  return m;
}

}  // namespace

RadiusGrid::RadiusGrid(std::vector<double> radii) : radii_(std::move(radii)) {
  if (radii_.empty()) throw ConfigError("radius grid is empty");
  for (std::size_t k = 0; k < radii_.size(); ++k) {
    if (!(radii_[k] > 1) || !std::isfinite(radii_[k])) throw ConfigError("grid radii must be finite and > 1");
    if (k && !(radii_[k] > radii_[k - 1])) throw ConfigError("grid radii must be strictly increasing");
  }
}

RadiusGrid RadiusGrid::standard() { return geometric_to(1e4); }

RadiusGrid RadiusGrid::geometric_to(double r_max) {
  if (!(r_max >= 10)) throw ConfigError("grid maximum must be at least 10");
  std::vector<double> r;
  for (int k = 4;; ++k) {
    r.push_back(std::pow(10.0, k / 4.0));
    if (r.back() >= r_max * (1 - 1e-12)) break;
  }
  return RadiusGrid(std::move(r));
}

std::string truncation_name(Truncation m) { return m == kUntruncated ? "inf" : std::to_string(m); }

double log_max_norm(const std::vector<NumericPolynomial>& f, std::span<const std::complex<double>> z) {
  double m = 0;
  for (const auto& c : f) m = std::max(m, std::abs(c(z)));
  return std::log(m);
}

double order_function(const ProjectiveMap& map, double r, const QuadratureSpec& quad) {
  const auto f = numeric_components(map);
  return sphere_average([&](auto z) { return log_max_norm(f, z); }, map.p(), r, quad);
}

double proximity(const ProjectiveMap& map, const Polynomial& q, double r, const QuadratureSpec& quad) {
  if (q.vars() != map.n() + 1) throw PreconditionError("proximity: form has the wrong number of variables");
  if (q.is_zero() || !q.is_homogeneous()) throw PreconditionError("proximity: form must be nonzero and homogeneous");
  const Polynomial composed = pullback(q, map);
  if (composed.is_zero()) throw IdenticallyZeroComposition(0, "Q(f) vanishes identically");
  const auto f = numeric_components(map);
  const NumericPolynomial qf(composed);
  const double d = q.total_degree();
  const double log_q = std::log(max_abs_coefficient(q));
  return sphere_average([&](auto z) { return d * log_max_norm(f, z) + log_q - std::log(std::abs(qf(z))); }, map.p(),
                        r, quad);
}

DivisorP1 divisor_p1(const Polynomial& g) {
  if (g.vars() != 1) throw PreconditionError("divisor_p1 needs a univariate polynomial");
  if (g.is_zero()) throw PreconditionError("divisor_p1: zero polynomial has no divisor");
  DivisorP1 div;
  if (g.is_constant()) return div;
  const auto sqf = square_free_decomposition(g);
  for (std::size_t k = 0; k < sqf.factors.size(); ++k) {
    if (sqf.factors[k].is_constant()) continue;
    for (auto z : simple_roots(sqf.factors[k])) div.points.push_back({z, static_cast<unsigned>(k + 1)});
  }
  return div;
}

double counting_p1(const DivisorP1& div, double r, Truncation m) {
  if (!(r > 1)) throw PreconditionError("counting functions need r > 1");
  double n = 0;
  for (const auto& pt : div.points) {
    const double a = std::abs(pt.location);
    if (a > r) continue;
    n += std::min(pt.multiplicity, m) * std::log(r / std::max(a, 1.0));
  }
  return n;
}

double counting_jensen(const Polynomial& g, double r, const QuadratureSpec& quad) {
  if (g.is_zero()) throw PreconditionError("counting_jensen: zero polynomial");
  if (!(r > 1)) throw PreconditionError("counting functions need r > 1");
  const NumericPolynomial ng(g);
  auto h = [&](std::span<const std::complex<double>> z) { return std::log(std::abs(ng(z))); };
  return sphere_average(h, g.vars(), r, quad) - sphere_average(h, g.vars(), 1.0, quad);
}

Estimate counting_jensen_replicated(const Polynomial& g, double r, const QuadratureSpec& quad,
                                    std::size_t replicates) {
  if (replicates < 2) throw PreconditionError("need at least two replicates for an error estimate");
  std::vector<double> values;
  for (std::size_t k = 0; k < replicates; ++k) {
    QuadratureSpec q = quad;
    q.scheme = QuadratureScheme::LowDiscrepancy;
    q.seed = mix_seed(quad.seed, k);
    values.push_back(counting_jensen(g, r, q));
  }
  return mean_and_error(values);
}

SlicedDivisor::SlicedDivisor(const Polynomial& g, std::size_t lines, std::uint64_t seed) {
  constexpr int kRetries = 8;
  if (g.is_zero()) throw PreconditionError("counting_sliced: zero polynomial");
  if (lines < 2) throw PreconditionError("counting_sliced needs at least two lines");
  const std::size_t p = g.vars();
  const mpz_class denominator = mpz_class(1) << 20;
  for (std::size_t line = 0; line < lines; ++line) {
    bool done = false;
    for (int attempt = 0; attempt < kRetries && !done; ++attempt) {
      std::mt19937_64 rng(mix_seed(mix_seed(seed, line), static_cast<std::uint64_t>(attempt)));
      std::normal_distribution<double> normal;
      std::vector<Polynomial> direction;
      double norm2 = 0;
      for (std::size_t j = 0; j < p; ++j) {
        mpq_class re(mpz_class(std::lround(normal(rng) * 1048576.0)), denominator);
        mpq_class im(mpz_class(std::lround(normal(rng) * 1048576.0)), denominator);
        re.canonicalize();
        im.canonicalize();
        GaussianRational u(re, im);
        norm2 += u.norm2().get_d();
        direction.push_back(Polynomial::monomial(u, Exponent{1}));
      }
      const Polynomial restricted = g.compose(direction);
      if (restricted.is_zero() || norm2 == 0) {
        ++resampled_;
        continue;
      }
      DivisorP1 div = divisor_p1(restricted);
      // Parameter t on the line t*u has speed |u|.
      const double speed = std::sqrt(norm2);
      for (auto& pt : div.points) pt.location *= speed;
      slices_.push_back(std::move(div));
      done = true;
    }
    if (!done)
      throw DegenerateSlice("line " + std::to_string(line) + " stayed inside the zero set after " +
                            std::to_string(kRetries) + " draws");
  }
}

Estimate SlicedDivisor::counting(double r, Truncation m) const {
  std::vector<double> values;
  values.reserve(slices_.size());
  for (const auto& s : slices_) values.push_back(counting_p1(s, r, m));
  return mean_and_error(values);
}

unsigned SlicedDivisor::min_multiplicity() const {
  unsigned best = 0;
  for (const auto& s : slices_)
    for (const auto& pt : s.points) best = best == 0 ? pt.multiplicity : std::min(best, pt.multiplicity);
  return best;
}

Estimate counting_sliced(const Polynomial& g, double r, Truncation m, std::size_t lines, std::uint64_t seed) {
  if (g.vars() < 2) throw PreconditionError("counting_sliced needs p >= 2");
  return SlicedDivisor(g, lines, seed).counting(r, m);
}

std::size_t FunctionalProfile::truncation_index(Truncation m) const {
  auto it = std::find(truncations.begin(), truncations.end(), m);
  if (it == truncations.end()) throw PreconditionError("truncation " + truncation_name(m) + " not in profile");
  return static_cast<std::size_t>(it - truncations.begin());
}

const std::vector<double>& FunctionalProfile::counting(std::size_t hyperplane, Truncation m) const {
  return hyperplanes.at(hyperplane).counting[truncation_index(m)];
}

const std::vector<double>& FunctionalProfile::counting_error(std::size_t hyperplane, Truncation m) const {
  return hyperplanes.at(hyperplane).counting_error[truncation_index(m)];
}

FunctionalProfile profile(const ProjectiveMap& map, const HyperplaneFamily& hyperplanes, const RadiusGrid& grid,
                          std::vector<Truncation> truncations, const ProfileOptions& options) {
  if (hyperplanes.n() != map.n())
    throw PreconditionError("hyperplanes live in P^" + std::to_string(hyperplanes.n()) + " but the map targets P^" +
                            std::to_string(map.n()));
  truncations.push_back(kUntruncated);
  std::sort(truncations.begin(), truncations.end());
  truncations.erase(std::unique(truncations.begin(), truncations.end()), truncations.end());
  if (truncations.front() == 0) throw PreconditionError("truncation levels start at 1");

  const std::size_t q = hyperplanes.q(), R = grid.size(), nt = truncations.size(), p = map.p();
  std::vector<Polynomial> g;
  for (std::size_t i = 0; i < q; ++i) {
    g.push_back(compose_linear_form(map, hyperplanes[i]));
    if (g.back().is_zero())
      throw IdenticallyZeroComposition(i, "image of the map lies in hyperplane H" + std::to_string(i + 1));
  }

  FunctionalProfile out;
  out.p = p;
  out.radii = grid.radii();
  out.truncations = truncations;
  out.order.assign(R, 0);
  out.hyperplanes.resize(q);
  for (auto& h : out.hyperplanes) {
    h.proximity.assign(R, 0);
    h.counting.assign(nt, std::vector<double>(R, 0));
    h.counting_error.assign(nt, std::vector<double>(R, 0));
  }

  const auto& radii = out.radii;
  const QuadratureSpec& quad = options.quad;
  parallel_for(R, options.threads, [&](std::size_t k) { out.order[k] = order_function(map, radii[k], quad); });

  std::vector<Polynomial> forms;
  for (std::size_t i = 0; i < q; ++i) forms.push_back(linear_form_polynomial(hyperplanes[i]));
  parallel_for(q * R, options.threads, [&](std::size_t task) {
    const std::size_t i = task / R, k = task % R;
    try {
      out.hyperplanes[i].proximity[k] = proximity(map, forms[i], radii[k], quad);
    } catch (const IdenticallyZeroComposition& e) {
      throw IdenticallyZeroComposition(i, e.what());
    }
  });

  if (p == 1) {
    parallel_for(q, options.threads, [&](std::size_t i) {
      const DivisorP1 div = divisor_p1(g[i]);
      for (std::size_t t = 0; t < nt; ++t)
        for (std::size_t k = 0; k < R; ++k) out.hyperplanes[i].counting[t][k] = counting_p1(div, radii[k], truncations[t]);
    });
    return out;
  }

  parallel_for(q * R, options.threads, [&](std::size_t task) {
    const std::size_t i = task / R, k = task % R;
    out.hyperplanes[i].counting[nt - 1][k] = counting_jensen(g[i], radii[k], quad);
  });
  if (nt > 1) {
    parallel_for(q, options.threads, [&](std::size_t i) {
      const SlicedDivisor sliced(g[i], options.lines, mix_seed(quad.seed, 1000 + i));
      for (std::size_t t = 0; t + 1 < nt; ++t)
        for (std::size_t k = 0; k < R; ++k) {
          const Estimate e = sliced.counting(radii[k], truncations[t]);
          out.hyperplanes[i].counting[t][k] = e.value;
          out.hyperplanes[i].counting_error[t][k] = e.standard_error;
        }
    });
  }
  return out;
}

std::vector<std::string> validate_profile(const FunctionalProfile& prof, double sigmas) {
  std::vector<std::string> issues;
  // Exact divisor arithmetic for p = 1 only leaves rounding; quadrature-based values
  // for p >= 2 get a relative allowance on top of the statistical slack.
  const double rel = prof.p == 1 ? 1e-9 : 1e-3;
  auto slack = [&](double a, double b, double ea, double eb) {
    return rel * (1 + std::max(std::abs(a), std::abs(b))) + sigmas * std::hypot(ea, eb);
  };
  auto report = [&](const std::string& what, std::size_t k) {
    std::ostringstream s;
    s.precision(6);
    s << what << " at r=" << prof.radii[k];
    issues.push_back(s.str());
  };

  for (std::size_t k = 1; k < prof.radii.size(); ++k)
    if (prof.order[k] < prof.order[k - 1] - slack(prof.order[k], prof.order[k - 1], 0, 0))
      report("order function decreases", k);

  for (std::size_t i = 0; i < prof.hyperplanes.size(); ++i) {
    const auto& h = prof.hyperplanes[i];
    const std::string tag = "H" + std::to_string(i + 1);
    for (std::size_t t = 0; t < prof.truncations.size(); ++t) {
      const auto& n = h.counting[t];
      const auto& e = h.counting_error[t];
      const std::string name = "N[" + truncation_name(prof.truncations[t]) + "]_" + tag;
      for (std::size_t k = 0; k < n.size(); ++k) {
        if (k && n[k] < n[k - 1] - slack(n[k], n[k - 1], e[k], e[k - 1])) report(name + " decreases", k);
        if (n[k] < -slack(n[k], 0, e[k], 0)) report(name + " is negative", k);
        for (std::size_t u = t + 1; u < prof.truncations.size(); ++u) {
          const auto& nu = h.counting[u];
          const auto& eu = h.counting_error[u];
          if (n[k] > nu[k] + slack(n[k], nu[k], e[k], eu[k]))
            report(name + " exceeds N[" + truncation_name(prof.truncations[u]) + "]_" + tag, k);
        }
        const Truncation m = prof.truncations[t];
        if (m != kUntruncated && prof.truncations.front() == 1) {
          const double n1 = h.counting[0][k], e1 = h.counting_error[0][k];
          if (n[k] > m * n1 + slack(n[k], m * n1, e[k], m * e1)) report(name + " exceeds m * N[1]_" + tag, k);
        }
      }
    }
  }
  return issues;
}

}  // namespace nevan
