#pragma once

#include <cstddef>
#include <vector>

#include "nevan/gaussian_rational.hpp"
#include "nevan/polynomial.hpp"

namespace nevan {

// Polynomial ring Q(i)[z_1..z_p]: gcd, square-free structure, and exact
// determinants/rank over the ring and over Q(i).

/// Scales p so its leading coefficient is 1. The zero polynomial is returned as is.
Polynomial make_monic(const Polynomial& p);

/// Monic greatest common divisor (recursive primitive remainder sequence).
Polynomial gcd(const Polynomial& a, const Polynomial& b);
Polynomial gcd(const std::vector<Polynomial>& ps);

/// gcd of the coefficients of p seen as a polynomial in z_var.
Polynomial content_in(const Polynomial& p, std::size_t var);

/// One square-free factor per multiplicity: p = unit * prod factors[k]^(k+1).
/// Factors are monic, pairwise coprime and may be constant 1.
struct SquareFreeDecomposition {
  GaussianRational unit;
  std::vector<Polynomial> factors;

  /// Smallest multiplicity carried by a nonconstant factor, or 0 when p is constant.
  unsigned min_multiplicity() const;
};

SquareFreeDecomposition square_free_decomposition(const Polynomial& p);

/// A component of a divisor: square-free polynomial whose zeros all carry the same
/// multiplicity.
struct DivisorComponent {
  Polynomial factor;
  unsigned multiplicity;
};

/// Pairwise coprime refinement of the square-free parts of `ps`: every zero of every
/// input belongs to exactly one returned factor, and within one factor each input
/// vanishes to a single order. orders[j][i] is the order of ps[i] along basis[j].
struct CoprimeBase {
  std::vector<Polynomial> basis;
  std::vector<std::vector<unsigned>> orders;
};

CoprimeBase coprime_base(const std::vector<Polynomial>& ps);

using PolyMatrix = std::vector<std::vector<Polynomial>>;
using ScalarMatrix = std::vector<std::vector<GaussianRational>>;

/// Determinant by fraction-free (Bareiss) elimination over the polynomial ring.
Polynomial determinant(PolyMatrix m);

/// Rank over the fraction field Q(i)(z_1..z_p).
std::size_t rank(PolyMatrix m);

GaussianRational determinant(ScalarMatrix m);
std::size_t rank(ScalarMatrix m);

/// Basis of {c : sum_i c_i * rows[i] = 0}. Each vector is normalised so that its
/// last nonzero entry is 1.
std::vector<std::vector<GaussianRational>> left_kernel(const ScalarMatrix& rows);

}  // namespace nevan
