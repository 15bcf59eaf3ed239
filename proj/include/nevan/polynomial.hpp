#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nevan/gaussian_rational.hpp"

namespace nevan {

using Exponent = std::vector<unsigned>;

/// Sparse multivariate polynomial over Q(i) in variables z_1..z_p.
///
/// Terms are kept in a std::map keyed by exponent vector, so iteration order is
/// lexicographic with z_1 most significant; the last entry is the leading term.
/// Zero coefficients are never stored.
class Polynomial {
 public:
  using TermMap = std::map<Exponent, GaussianRational>;

  explicit Polynomial(std::size_t vars = 1) : vars_(vars) {}
  Polynomial(std::size_t vars, TermMap terms);

  static Polynomial constant(std::size_t vars, const GaussianRational& c);
  /// z_{index+1}; index is zero based.
  static Polynomial variable(std::size_t vars, std::size_t index);
  static Polynomial monomial(const GaussianRational& c, Exponent e);

  std::size_t vars() const { return vars_; }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Constant term (zero if absent).
  GaussianRational constant_term() const;
  unsigned total_degree() const;
  unsigned degree_in(std::size_t var) const;
  bool is_homogeneous() const;

  /// Leading term in lex order. Requires !is_zero().
  const std::pair<const Exponent, GaussianRational>& leading_term() const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Polynomial& o);
  Polynomial& operator*=(const GaussianRational& c);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const GaussianRational& c) { return a *= c; }
  friend Polynomial operator*(const GaussianRational& c, Polynomial a) { return a *= c; }
  Polynomial operator-() const;

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  Polynomial pow(unsigned e) const;
  /// d/dz_{var+1}.
  Polynomial derivative(std::size_t var) const;

  GaussianRational evaluate(std::span<const GaussianRational> point) const;
  std::complex<double> evaluate(std::span<const std::complex<double>> point) const;

  /// Substitutes components[k] for variable k. components share a common arity.
  Polynomial compose(std::span<const Polynomial> components) const;

  /// Coefficients of this polynomial viewed as univariate in `var`; entry k is
  /// the coefficient of z_var^k, still expressed over all variables.
  std::vector<Polynomial> coefficients_in(std::size_t var) const;

  /// Quotient when `divisor` divides exactly, otherwise nullopt.
  std::optional<Polynomial> divide_exact(const Polynomial& divisor) const;

  /// Largest absolute value of a coefficient.
  double max_abs_coefficient() const;

  std::string to_string() const;

 private:
  void add_term(const Exponent& e, const GaussianRational& c);

  std::size_t vars_;
  TermMap terms_;
};

/// Division that must be exact; throws InternalError otherwise.
Polynomial exact_quotient(const Polynomial& a, const Polynomial& b);

/// Floating point snapshot of a Polynomial, cheap to evaluate in quadrature loops.
class NumericPolynomial {
 public:
  NumericPolynomial() = default;
  explicit NumericPolynomial(const Polynomial& p);

  std::size_t vars() const { return vars_; }
  std::complex<double> operator()(std::span<const std::complex<double>> z) const;

 private:
  std::size_t vars_ = 0;
  unsigned max_degree_ = 0;
  std::vector<std::pair<std::vector<unsigned>, std::complex<double>>> terms_;
};

/// Parses expressions such as "z1^2 - (1/2+i)*z2 + 3". Variables are z1..zp;
/// when vars == 1 a bare "z" is accepted too. '/' only divides by constants.
Polynomial parse_polynomial(std::string_view text, std::size_t vars);

std::ostream& operator<<(std::ostream& os, const Polynomial& p);

}  // namespace nevan
