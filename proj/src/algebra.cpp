#include "nevan/algebra.hpp"

#include <algorithm>
#include <map>

#include "nevan/errors.hpp"

namespace nevan {

Polynomial make_monic(const Polynomial& p) {
  if (p.is_zero()) return p;
  const GaussianRational& lc = p.leading_term().second;
  if (lc.is_one()) return p;
  return p * lc.inverse();
}

namespace {

// Highest variable index with positive degree in any of the inputs, or -1.
int top_variable(const Polynomial& a, const Polynomial& b) {
  for (std::size_t k = a.vars(); k-- > 0;)
    if (a.degree_in(k) > 0 || b.degree_in(k) > 0) return static_cast<int>(k);
  return -1;
}

Polynomial x_power(std::size_t vars, std::size_t var, unsigned e) {
  Exponent ex(vars, 0);
  ex[var] = e;
  return Polynomial::monomial(GaussianRational(1), std::move(ex));
}

// lc(b)^k * a mod b in z_var, with k just large enough.
Polynomial pseudo_remainder(const Polynomial& a, const Polynomial& b, std::size_t var) {
  const unsigned db = b.degree_in(var);
  const Polynomial lb = b.coefficients_in(var).back();
  Polynomial r = a;
  while (!r.is_zero()) {
    const unsigned dr = r.degree_in(var);
    if (dr < db) break;
    Polynomial lr = r.coefficients_in(var).back();
    r = lb * r - lr * x_power(r.vars(), var, dr - db) * b;
  }
  return r;
}

Polynomial primitive_part(const Polynomial& p, std::size_t var) {
  if (p.is_zero()) return p;
  return make_monic(exact_quotient(p, content_in(p, var)));
}

}  // namespace

Polynomial content_in(const Polynomial& p, std::size_t var) {
  Polynomial g(p.vars());
  for (const Polynomial& c : p.coefficients_in(var)) {
    if (c.is_zero()) continue;
    g = gcd(g, c);
    if (g.is_constant()) break;
  }
  return g;
}

Polynomial gcd(const Polynomial& a, const Polynomial& b) {
  if (a.vars() != b.vars()) throw PreconditionError("gcd of polynomials of different arity");
  if (a.is_zero()) return make_monic(b);
  if (b.is_zero()) return make_monic(a);
  const std::size_t vars = a.vars();
  if (a.is_constant() || b.is_constant()) return Polynomial::constant(vars, 1);

  const int top = top_variable(a, b);
  const auto var = static_cast<std::size_t>(top);
  if (a.degree_in(var) == 0) return gcd(a, content_in(b, var));
  if (b.degree_in(var) == 0) return gcd(content_in(a, var), b);

  const Polynomial ca = content_in(a, var);
  const Polynomial cb = content_in(b, var);
  const Polynomial c = gcd(ca, cb);
  Polynomial pa = make_monic(exact_quotient(a, ca));
  Polynomial pb = make_monic(exact_quotient(b, cb));
  if (pa.degree_in(var) < pb.degree_in(var)) std::swap(pa, pb);

  while (!pb.is_zero()) {
    if (pb.degree_in(var) == 0) {
      // A primitive polynomial free of z_var is a unit.
      pa = Polynomial::constant(vars, 1);
      break;
    }
    Polynomial r = pseudo_remainder(pa, pb, var);
    pa = std::move(pb);
    pb = primitive_part(r, var);
  }
  return make_monic(primitive_part(pa, var) * c);
}

Polynomial gcd(const std::vector<Polynomial>& ps) {
  if (ps.empty()) throw PreconditionError("gcd of an empty list");
  Polynomial g(ps.front().vars());
  for (const auto& p : ps) {
    g = gcd(g, p);
    if (!g.is_zero() && g.is_constant()) break;
  }
  return g;
}

unsigned SquareFreeDecomposition::min_multiplicity() const {
  for (std::size_t k = 0; k < factors.size(); ++k)
    if (!factors[k].is_constant()) return static_cast<unsigned>(k + 1);
  return 0;
}

namespace {

void accumulate(std::vector<Polynomial>& acc, std::size_t multiplicity, const Polynomial& f) {
  if (f.is_constant()) return;
  while (acc.size() < multiplicity) acc.push_back(Polynomial::constant(f.vars(), 1));
  acc[multiplicity - 1] = make_monic(acc[multiplicity - 1] * f);
}

// Yun's algorithm for a polynomial all of whose irreducible factors involve z_var.
void yun(const Polynomial& f, std::size_t var, std::vector<Polynomial>& acc) {
  const Polynomial df = f.derivative(var);
  const Polynomial a0 = gcd(f, df);
  Polynomial b = exact_quotient(f, a0);
  Polynomial c = exact_quotient(df, a0);
  Polynomial d = c - b.derivative(var);
  std::size_t i = 1;
  while (!b.is_constant()) {
    const Polynomial a = gcd(b, d);
    accumulate(acc, i, a);
    b = exact_quotient(b, a);
    c = exact_quotient(d, a);
    d = c - b.derivative(var);
    ++i;
  }
}

void square_free_recursive(const Polynomial& q, std::vector<Polynomial>& acc) {
  if (q.is_constant()) return;
  std::size_t var = 0;
  for (std::size_t k = q.vars(); k-- > 0;) {
    if (q.degree_in(k) > 0) {
      var = k;
      break;
    }
  }
  const Polynomial c = content_in(q, var);
  yun(make_monic(exact_quotient(q, c)), var, acc);
  square_free_recursive(c, acc);
}

}  // namespace

SquareFreeDecomposition square_free_decomposition(const Polynomial& p) {
  if (p.is_zero()) throw PreconditionError("square-free decomposition of the zero polynomial");
  SquareFreeDecomposition out;
  out.unit = p.leading_term().second;
  square_free_recursive(make_monic(p), out.factors);
  return out;
}

CoprimeBase coprime_base(const std::vector<Polynomial>& ps) {
  std::vector<SquareFreeDecomposition> decomps;
  std::vector<Polynomial> pool;
  for (const auto& p : ps) {
    decomps.push_back(square_free_decomposition(p));
    for (const auto& f : decomps.back().factors)
      if (!f.is_constant()) pool.push_back(f);
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < pool.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < pool.size() && !changed; ++j) {
        Polynomial g = gcd(pool[i], pool[j]);
        if (g.is_constant()) continue;
        Polynomial a = exact_quotient(pool[i], g);
        Polynomial b = exact_quotient(pool[j], g);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
        pool.push_back(make_monic(g));
        if (!a.is_constant()) pool.push_back(make_monic(a));
        if (!b.is_constant()) pool.push_back(make_monic(b));
        changed = true;
      }
    }
  }
  // Deterministic order independent of the refinement history.
  std::sort(pool.begin(), pool.end(), [](const Polynomial& a, const Polynomial& b) {
    if (a.total_degree() != b.total_degree()) return a.total_degree() < b.total_degree();
    return a.to_string() < b.to_string();
  });

  CoprimeBase base;
  base.basis = pool;
  for (const auto& b : pool) {
    std::vector<unsigned> orders;
    for (const auto& d : decomps) {
      unsigned order = 0;
      for (std::size_t k = 0; k < d.factors.size(); ++k) {
        if (d.factors[k].is_constant()) continue;
        if (!gcd(b, d.factors[k]).is_constant()) {
          order = static_cast<unsigned>(k + 1);
          break;
        }
      }
      orders.push_back(order);
    }
    base.orders.push_back(std::move(orders));
  }
  return base;
}

Polynomial determinant(PolyMatrix m) {
  const std::size_t n = m.size();
  if (n == 0) throw PreconditionError("determinant of an empty matrix");
  for (const auto& row : m)
    if (row.size() != n) throw PreconditionError("determinant of a non-square matrix");
  const std::size_t vars = m[0][0].vars();
  Polynomial prev = Polynomial::constant(vars, 1);
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    // Sparsest nonzero pivot keeps intermediate growth down.
    std::size_t best = n;
    for (std::size_t i = k; i < n; ++i) {
      if (m[i][k].is_zero()) continue;
      if (best == n || m[i][k].term_count() < m[best][k].term_count()) best = i;
    }
    if (best == n) return Polynomial(vars);
    if (best != k) {
      std::swap(m[best], m[k]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Polynomial t = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        m[i][j] = exact_quotient(t, prev);
      }
      m[i][k] = Polynomial(vars);
    }
    prev = m[k][k];
  }
  Polynomial det = m[n - 1][n - 1];
  return negate ? -det : det;
}

std::size_t rank(PolyMatrix m) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size(), cols = m[0].size();
  if (cols == 0) return 0;
  const std::size_t vars = m[0][0].vars();
  Polynomial prev = Polynomial::constant(vars, 1);
  std::size_t r = 0;
  for (std::size_t col = 0; col < cols && r < rows; ++col) {
    std::size_t best = rows;
    for (std::size_t i = r; i < rows; ++i) {
      if (m[i][col].is_zero()) continue;
      if (best == rows || m[i][col].term_count() < m[best][col].term_count()) best = i;
    }
    if (best == rows) continue;
    std::swap(m[best], m[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = col + 1; j < cols; ++j) {
        Polynomial t = m[i][j] * m[r][col] - m[i][col] * m[r][j];
        m[i][j] = exact_quotient(t, prev);
      }
      m[i][col] = Polynomial(vars);
    }
    prev = m[r][col];
    ++r;
  }
  return r;
}

namespace {

// In-place reduced row echelon form; returns pivot columns.
std::vector<std::size_t> rref(ScalarMatrix& m, bool* negated = nullptr) {
  std::vector<std::size_t> pivots;
  if (m.empty()) return pivots;
  const std::size_t rows = m.size(), cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t col = 0; col < cols && r < rows; ++col) {
    std::size_t piv = rows;
    for (std::size_t i = r; i < rows; ++i)
      if (!m[i][col].is_zero()) {
        piv = i;
        break;
      }
    if (piv == rows) continue;
    if (piv != r) {
      std::swap(m[piv], m[r]);
      if (negated) *negated = !*negated;
    }
    const GaussianRational inv = m[r][col].inverse();
    for (std::size_t j = col; j < cols; ++j) m[r][j] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][col].is_zero()) continue;
      const GaussianRational f = m[i][col];
      for (std::size_t j = col; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(col);
    ++r;
  }
  return pivots;
}

}  // namespace

GaussianRational determinant(ScalarMatrix m) {
  const std::size_t n = m.size();
  for (const auto& row : m)
    if (row.size() != n) throw PreconditionError("determinant of a non-square matrix");
  GaussianRational det(1);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = n;
    for (std::size_t i = k; i < n; ++i)
      if (!m[i][k].is_zero()) {
        piv = i;
        break;
      }
    if (piv == n) return GaussianRational();
    if (piv != k) {
      std::swap(m[piv], m[k]);
      det = -det;
    }
    det *= m[k][k];
    const GaussianRational inv = m[k][k].inverse();
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m[i][k].is_zero()) continue;
      const GaussianRational f = m[i][k] * inv;
      for (std::size_t j = k; j < n; ++j) m[i][j] -= f * m[k][j];
    }
  }
  return det;
}

std::size_t rank(ScalarMatrix m) { return rref(m).size(); }

std::vector<std::vector<GaussianRational>> left_kernel(const ScalarMatrix& rows) {
  std::vector<std::vector<GaussianRational>> basis;
  const std::size_t k = rows.size();
  if (k == 0) return basis;
  const std::size_t width = rows[0].size();
  ScalarMatrix t(width, std::vector<GaussianRational>(k));
  for (std::size_t i = 0; i < k; ++i) {
    if (rows[i].size() != width) throw PreconditionError("ragged matrix");
    for (std::size_t j = 0; j < width; ++j) t[j][i] = rows[i][j];
  }
  const auto pivots = rref(t);
  std::vector<bool> is_pivot(k, false);
  for (auto p : pivots) is_pivot[p] = true;
  for (std::size_t free = 0; free < k; ++free) {
    if (is_pivot[free]) continue;
    std::vector<GaussianRational> v(k);
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -t[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace nevan
