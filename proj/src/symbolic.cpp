#include "nevan/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "nevan/algebra.hpp"
#include "nevan/errors.hpp"

namespace nevan {

ProjectiveMap::ProjectiveMap(std::vector<Polynomial> components) : components_(std::move(components)) {
  if (components_.size() < 2) throw PreconditionError("a map into P^n needs at least two components");
  const std::size_t vars = components_.front().vars();
  for (const auto& c : components_)
    if (c.vars() != vars) throw PreconditionError("map components have different arity");
  if (std::all_of(components_.begin(), components_.end(), [](const Polynomial& c) { return c.is_zero(); }))
    throw PreconditionError("all components of the map are identically zero");
  const Polynomial g = gcd(components_);
  if (!g.is_constant())
    throw PreconditionError("map representation is not reduced: components share the factor " + g.to_string());
}

std::string ProjectiveMap::to_string() const {
  std::string s = "[";
  for (std::size_t j = 0; j < components_.size(); ++j) {
    if (j) s += " : ";
    s += components_[j].to_string();
  }
  return s + "]";
}

HyperplaneFamily::HyperplaneFamily(std::vector<LinearForm> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw PreconditionError("empty hyperplane family");
  const std::size_t width = rows_.front().size();
  if (width < 2) throw PreconditionError("hyperplanes need at least two coefficients");
  for (const auto& r : rows_) {
    if (r.size() != width) throw PreconditionError("hyperplane rows have different widths");
    if (std::all_of(r.begin(), r.end(), [](const GaussianRational& c) { return c.is_zero(); }))
      throw PreconditionError("a hyperplane row is identically zero");
  }
}

GaussianRational HyperplaneFamily::minor(std::span<const std::size_t> subset) const {
  if (subset.size() != n() + 1) throw PreconditionError("minor needs n+1 rows");
  ScalarMatrix m;
  for (std::size_t i : subset) m.push_back(rows_.at(i));
  return determinant(std::move(m));
}

bool HyperplaneFamily::in_general_position() const {
  const std::size_t k = n() + 1;
  if (q() < k) {
    // Fewer than n+1 forms: general position means independence.
    ScalarMatrix m(rows_.begin(), rows_.end());
    return rank(std::move(m)) == q();
  }
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    if (minor(idx).is_zero()) return false;
    std::size_t pos = k;
    while (pos-- > 0) {
      if (idx[pos] < q() - k + pos) {
        ++idx[pos];
        for (std::size_t j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
        break;
      }
      if (pos == 0) return true;
    }
  }
}

std::vector<std::vector<std::complex<double>>> HyperplaneFamily::normalized_rows() const {
  std::vector<std::vector<std::complex<double>>> out;
  for (const auto& r : rows_) {
    std::vector<std::complex<double>> row;
    double norm2 = 0.0;
    for (const auto& c : r) {
      row.push_back(c.to_complex());
      norm2 += std::norm(row.back());
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& c : row) c *= inv;
    out.push_back(std::move(row));
  }
  return out;
}

HyperplaneFamily coordinate_hyperplanes(std::size_t n) {
  std::vector<LinearForm> rows;
  for (std::size_t j = 0; j <= n; ++j) {
    LinearForm r(n + 1);
    r[j] = 1;
    rows.push_back(std::move(r));
  }
  return HyperplaneFamily(std::move(rows));
}

Polynomial differentiate(const Polynomial& f, const Word& w) {
  Polynomial out = f;
  for (int letter : w.letters()) {
    if (static_cast<std::size_t>(letter) > f.vars())
      throw PreconditionError("word " + w.to_string() + " differentiates in a variable beyond p");
    out = out.derivative(static_cast<std::size_t>(letter - 1));
    if (out.is_zero()) break;
  }
  return out;
}

namespace {

void check_family(const OperatorSet& s, std::span<const Polynomial> fs) {
  if (fs.size() != s.words().size())
    throw PreconditionError("Wronskian needs |S| = " + std::to_string(s.words().size()) + " functions, got " +
                            std::to_string(fs.size()));
  for (const auto& f : fs)
    if (f.vars() != s.p()) throw PreconditionError("function arity does not match the operator alphabet");
}

PolyMatrix wronskian_matrix(const OperatorSet& s, std::span<const Polynomial> fs) {
  PolyMatrix m;
  for (const Word& w : s.words()) {
    std::vector<Polynomial> row;
    for (const auto& f : fs) row.push_back(differentiate(f, w));
    m.push_back(std::move(row));
  }
  return m;
}

// Fixed Gaussian-integer sample points; deterministic, and unlikely to sit on
// the zero set of a Wronskian built from small-coefficient inputs.
std::vector<std::vector<GaussianRational>> probe_points(std::size_t p) {
  static const long re[] = {3, -5, 7, 2, -11, 13, 5, -2};
  static const long im[] = {1, 2, -3, 5, 4, -7, 1, 3};
  std::vector<std::vector<GaussianRational>> pts;
  for (std::size_t t = 0; t < 3; ++t) {
    std::vector<GaussianRational> pt;
    for (std::size_t k = 0; k < p; ++k) {
      std::size_t j = (t * 3 + k * 5 + 1) % 8;
      pt.emplace_back(mpq_class(re[j] * static_cast<long>(t + 1), 1), mpq_class(im[(j + t) % 8], 2));
    }
    pts.push_back(std::move(pt));
  }
  return pts;
}

}  // namespace

Polynomial generalized_wronskian(const OperatorSet& s, std::span<const Polynomial> fs) {
  check_family(s, fs);
  return determinant(wronskian_matrix(s, fs));
}

bool wronskian_nonvanishing(const OperatorSet& s, std::span<const Polynomial> fs) {
  check_family(s, fs);
  PolyMatrix m = wronskian_matrix(s, fs);
  for (const auto& pt : probe_points(s.p())) {
    ScalarMatrix v;
    for (const auto& row : m) {
      std::vector<GaussianRational> vr;
      for (const auto& e : row) vr.push_back(e.evaluate(pt));
      v.push_back(std::move(vr));
    }
    if (!determinant(std::move(v)).is_zero()) return true;
  }
  return !determinant(std::move(m)).is_zero();
}

namespace {

ScalarMatrix coefficient_matrix(std::span<const Polynomial> fs) {
  std::set<Exponent> monomials;
  for (const auto& f : fs)
    for (const auto& [e, c] : f.terms()) monomials.insert(e);
  ScalarMatrix m;
  for (const auto& f : fs) {
    std::vector<GaussianRational> row;
    for (const auto& e : monomials) {
      auto it = f.terms().find(e);
      row.push_back(it == f.terms().end() ? GaussianRational() : it->second);
    }
    m.push_back(std::move(row));
  }
  return m;
}

}  // namespace

bool coefficient_rank_independent(std::span<const Polynomial> fs) {
  if (fs.empty()) return true;
  return rank(coefficient_matrix(fs)) == fs.size();
}

std::vector<LinearForm> linear_relations(std::span<const Polynomial> fs) {
  if (fs.empty()) return {};
  return left_kernel(coefficient_matrix(fs));
}

std::optional<OperatorSet> find_nonvanishing_wronskian(std::span<const Polynomial> fs) {
  if (fs.empty()) throw PreconditionError("Wronskian of an empty family");
  for (const auto& s : enumerate_admissible_full_sets(fs.front().vars(), fs.size() - 1))
    if (wronskian_nonvanishing(s, fs)) return s;
  return std::nullopt;
}

IndependenceResult is_linearly_independent(std::span<const Polynomial> fs) {
  IndependenceResult result;
  if (fs.empty()) throw PreconditionError("independence test of an empty family");
  const std::size_t p = fs.front().vars();
  for (const auto& f : fs)
    if (f.vars() != p) throw PreconditionError("family members have different arity");
  result.independent = coefficient_rank_independent(fs);
  if (!result.independent) return result;

  result.witness = find_nonvanishing_wronskian(fs);
  if (result.witness) return result;
  throw InternalError("coefficient rank says independent but every geometric generalized Wronskian vanishes");
}

std::size_t generic_rank(const ProjectiveMap& map) {
  const std::size_t p = map.p(), n = map.n();
  const std::size_t target = std::min(p, n);
  std::size_t best = 0;
  for (std::size_t k = 0; k <= n && best < target; ++k) {
    const Polynomial& fk = map[k];
    if (fk.is_zero()) continue;
    // Rows d(f_j/f_k) scaled by f_k^2; scaling rows leaves the rank unchanged.
    PolyMatrix jac;
    for (std::size_t j = 0; j <= n; ++j) {
      if (j == k) continue;
      std::vector<Polynomial> row;
      for (std::size_t l = 0; l < p; ++l) row.push_back(fk * map[j].derivative(l) - map[j] * fk.derivative(l));
      jac.push_back(std::move(row));
    }
    best = std::max(best, rank(std::move(jac)));
  }
  return best;
}

OperatorSet find_witness_family(const ProjectiveMap& map) {
  const std::size_t p = map.p(), n = map.n();
  if (p > n) throw PreconditionError("witness families are defined for p <= n");
  if (generic_rank(map) < p) throw NotMaximalRank("map " + map.to_string() + " is not of maximal rank");
  if (!coefficient_rank_independent(map.components()))
    throw LinearlyDegenerate("map " + map.to_string() + " is linearly degenerate");
  for (const auto& s : enumerate_admissible_full_sets(p, n, n + 1 - p)) {
    if (s.first_order_count() < p) continue;
    if (wronskian_nonvanishing(s, map.components())) return s;
  }
  throw InternalError("no witness family with all first-order operators for a nondegenerate map of maximal rank");
}

Polynomial compose_linear_form(const ProjectiveMap& map, const LinearForm& h) {
  if (h.size() != map.n() + 1)
    throw PreconditionError("linear form has " + std::to_string(h.size()) + " coefficients, map has " +
                            std::to_string(map.n() + 1) + " components");
  Polynomial g(map.p());
  for (std::size_t j = 0; j < h.size(); ++j)
    if (!h[j].is_zero()) g += h[j] * map[j];
  return g;
}

bool wronskian_transfer_check(const OperatorSet& s, const ProjectiveMap& map, std::span<const LinearForm> r) {
  if (r.size() != map.n() + 1) throw PreconditionError("transfer identity needs n+1 linear forms");
  ScalarMatrix a(r.begin(), r.end());
  const GaussianRational det = determinant(a);
  if (det.is_zero()) throw PreconditionError("selected hyperplanes are dependent (A_R = 0)");
  std::vector<Polynomial> gs;
  for (const auto& row : r) gs.push_back(compose_linear_form(map, row));
  const Polynomial lhs = generalized_wronskian(s, gs);
  const Polynomial rhs = det * generalized_wronskian(s, map.components());
  return lhs == rhs;
}

FermatPush fermat_push(const ProjectiveMap& map, unsigned d) {
  if (d < 1) throw PreconditionError("Fermat degree must be at least 1");
  std::vector<Polynomial> powers;
  for (const auto& f : map.components()) powers.push_back(f.pow(d));
  Polynomial common = gcd(powers);
  if (!common.is_constant())
    for (auto& f : powers) f = exact_quotient(f, common);
  else
    common = Polynomial::constant(map.p(), 1);
  return FermatPush{ProjectiveMap(std::move(powers)), std::move(common)};
}

Polynomial fermat_membership(const ProjectiveMap& map, unsigned d) {
  if (d < 1) throw PreconditionError("Fermat degree must be at least 1");
  Polynomial sum(map.p());
  for (const auto& f : map.components()) sum += f.pow(d);
  return sum;
}

Polynomial pullback(const Polynomial& q, const ProjectiveMap& map) {
  if (q.vars() != map.n() + 1) throw PreconditionError("divisor polynomial must have n+1 variables");
  return q.compose(map.components());
}

Polynomial linear_form_polynomial(const LinearForm& h) {
  Polynomial out(h.size());
  for (std::size_t j = 0; j < h.size(); ++j)
    if (!h[j].is_zero()) out += h[j] * Polynomial::variable(h.size(), j);
  return out;
}

}  // namespace nevan
