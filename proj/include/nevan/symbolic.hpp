#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nevan/gaussian_rational.hpp"
#include "nevan/polynomial.hpp"
#include "nevan/words.hpp"

namespace nevan {

/// Reduced representation [f_0 : ... : f_n] of a polynomial map C^p -> P^n.
/// Construction enforces: n+1 >= 2 components of equal arity, not all zero,
/// and a constant gcd.
class ProjectiveMap {
 public:
  explicit ProjectiveMap(std::vector<Polynomial> components);

  std::size_t p() const { return components_.front().vars(); }
  std::size_t n() const { return components_.size() - 1; }
  const std::vector<Polynomial>& components() const { return components_; }
  const Polynomial& operator[](std::size_t j) const { return components_[j]; }

  std::string to_string() const;

 private:
  std::vector<Polynomial> components_;
};

using LinearForm = std::vector<GaussianRational>;

/// q linear forms on C^{n+1}, stored exactly.
class HyperplaneFamily {
 public:
  explicit HyperplaneFamily(std::vector<LinearForm> rows);

  std::size_t q() const { return rows_.size(); }
  std::size_t n() const { return rows_.front().size() - 1; }
  const std::vector<LinearForm>& rows() const { return rows_; }
  const LinearForm& operator[](std::size_t i) const { return rows_[i]; }

  /// Every (n+1) x (n+1) minor is nonzero.
  bool in_general_position() const;
  /// det of the rows indexed by `subset` (size n+1).
  GaussianRational minor(std::span<const std::size_t> subset) const;
  /// Rows scaled to unit Euclidean norm, for the floating point pipeline.
  std::vector<std::vector<std::complex<double>>> normalized_rows() const;

 private:
  std::vector<LinearForm> rows_;
};

/// Standard coordinate hyperplanes {w_j = 0}, j = 0..n.
HyperplaneFamily coordinate_hyperplanes(std::size_t n);

/// Iterated partial derivative along the letters of w.
Polynomial differentiate(const Polynomial& f, const Word& w);

/// det(Delta^{s} f_j) with rows in the canonical order of S.
Polynomial generalized_wronskian(const OperatorSet& s, std::span<const Polynomial> fs);

/// True when W_S(fs) is not identically zero. Tries exact evaluation at a few
/// rational points first and falls back to the symbolic determinant only when
/// every evaluation vanishes.
bool wronskian_nonvanishing(const OperatorSet& s, std::span<const Polynomial> fs);

struct IndependenceResult {
  bool independent = false;
  /// First admissible full set with a nonvanishing Wronskian (only searched when
  /// the family has n+1 members and is independent).
  std::optional<OperatorSet> witness;
};

/// Exact rank test on coefficient vectors. When independent, also searches the
/// admissible full sets for a nonvanishing Wronskian; failure to find one raises
/// InternalError.
IndependenceResult is_linearly_independent(std::span<const Polynomial> fs);

/// First admissible full set (canonical order) whose Wronskian does not vanish,
/// independent of any rank computation.
std::optional<OperatorSet> find_nonvanishing_wronskian(std::span<const Polynomial> fs);

/// Bare rank oracle on coefficient vectors.
bool coefficient_rank_independent(std::span<const Polynomial> fs);

/// Vectors c with sum_j c_j fs[j] = 0 (exact), normalised as in left_kernel.
std::vector<LinearForm> linear_relations(std::span<const Polynomial> fs);

/// Generic rank of the differential, maximised over affine charts.
std::size_t generic_rank(const ProjectiveMap& map);

/// Admissible full set containing all p first-order words with W_S(f) != 0.
/// Requires p <= n; throws NotMaximalRank or LinearlyDegenerate.
OperatorSet find_witness_family(const ProjectiveMap& map);

/// g = sum_j h_j f_j.
Polynomial compose_linear_form(const ProjectiveMap& map, const LinearForm& h);

/// Checks W_S({g_i}_{i in R}) == A_R * W_S(f) exactly. Rows of `r` must be
/// independent (A_R != 0); otherwise PreconditionError.
bool wronskian_transfer_check(const OperatorSet& s, const ProjectiveMap& map, std::span<const LinearForm> r);

struct FermatPush {
  ProjectiveMap map;
  /// Common factor divided out of (f_0^d, ..., f_n^d).
  Polynomial removed_factor;
};

/// [f_0^d : ... : f_n^d], reduced.
FermatPush fermat_push(const ProjectiveMap& map, unsigned d);

/// sum_j f_j^d.
Polynomial fermat_membership(const ProjectiveMap& map, unsigned d);

/// Q(f_0, ..., f_n) for a homogeneous Q in n+1 variables.
Polynomial pullback(const Polynomial& q, const ProjectiveMap& map);

/// Linear form sum_j h_j w_j as a polynomial in n+1 variables.
Polynomial linear_form_polynomial(const LinearForm& h);

}  // namespace nevan
