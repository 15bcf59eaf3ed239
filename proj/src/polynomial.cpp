#include "nevan/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <sstream>

#include "nevan/errors.hpp"

namespace nevan {

Polynomial::Polynomial(std::size_t vars, TermMap terms) : vars_(vars) {
  for (auto& [e, c] : terms) {
    if (e.size() != vars_) throw PreconditionError("exponent arity does not match variable count");
    if (!c.is_zero()) terms_.emplace(e, c);
  }
}

Polynomial Polynomial::constant(std::size_t vars, const GaussianRational& c) {
  Polynomial p(vars);
  if (!c.is_zero()) p.terms_.emplace(Exponent(vars, 0), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t vars, std::size_t index) {
  if (index >= vars) throw PreconditionError("variable index out of range");
  Exponent e(vars, 0);
  e[index] = 1;
  Polynomial p(vars);
  p.terms_.emplace(std::move(e), GaussianRational(1));
  return p;
}

Polynomial Polynomial::monomial(const GaussianRational& c, Exponent e) {
  Polynomial p(e.size());
  if (!c.is_zero()) p.terms_.emplace(std::move(e), c);
  return p;
}

bool Polynomial::is_constant() const {
  if (terms_.empty()) return true;
  if (terms_.size() > 1) return false;
  const auto& e = terms_.begin()->first;
  return std::all_of(e.begin(), e.end(), [](unsigned k) { return k == 0; });
}

GaussianRational Polynomial::constant_term() const {
  auto it = terms_.find(Exponent(vars_, 0));
  return it == terms_.end() ? GaussianRational() : it->second;
}

unsigned Polynomial::total_degree() const {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) {
    unsigned s = 0;
    for (unsigned k : e) s += k;
    d = std::max(d, s);
  }
  return d;
}

unsigned Polynomial::degree_in(std::size_t var) const {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
  return d;
}

bool Polynomial::is_homogeneous() const {
  if (terms_.empty()) return true;
  std::optional<unsigned> deg;
  for (const auto& [e, c] : terms_) {
    unsigned s = 0;
    for (unsigned k : e) s += k;
    if (deg && *deg != s) return false;
    deg = s;
  }
  return true;
}

const std::pair<const Exponent, GaussianRational>& Polynomial::leading_term() const {
  if (terms_.empty()) throw PreconditionError("leading term of the zero polynomial");
  return *terms_.rbegin();
}

void Polynomial::add_term(const Exponent& e, const GaussianRational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.vars_ != vars_) throw PreconditionError("adding polynomials of different arity");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.vars_ != vars_) throw PreconditionError("subtracting polynomials of different arity");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.vars_ != b.vars_) throw PreconditionError("multiplying polynomials of different arity");
  Polynomial r(a.vars_);
  Exponent e(a.vars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t k = 0; k < e.size(); ++k) e[k] = ea[k] + eb[k];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

Polynomial& Polynomial::operator*=(const Polynomial& o) { return *this = *this * o; }

Polynomial& Polynomial::operator*=(const GaussianRational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& [e, c] : r.terms_) c = -c;
  return r;
}

Polynomial Polynomial::pow(unsigned e) const {
  Polynomial result = constant(vars_, 1);
  Polynomial base = *this;
  while (e > 0) {
    if (e & 1u) result *= base;
    e >>= 1u;
    if (e > 0) base *= base;
  }
  return result;
}

Polynomial Polynomial::derivative(std::size_t var) const {
  if (var >= vars_) throw PreconditionError("derivative variable out of range");
  Polynomial r(vars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponent d = e;
    --d[var];
    r.terms_.emplace(std::move(d), c * GaussianRational(static_cast<long>(e[var])));
  }
  return r;
}

GaussianRational Polynomial::evaluate(std::span<const GaussianRational> point) const {
  if (point.size() != vars_) throw PreconditionError("evaluation point has wrong arity");
  std::vector<std::vector<GaussianRational>> powers(vars_);
  for (std::size_t k = 0; k < vars_; ++k) {
    unsigned d = degree_in(k);
    powers[k].reserve(d + 1);
    powers[k].emplace_back(1);
    for (unsigned j = 1; j <= d; ++j) powers[k].push_back(powers[k].back() * point[k]);
  }
  GaussianRational sum;
  for (const auto& [e, c] : terms_) {
    GaussianRational t = c;
    for (std::size_t k = 0; k < vars_; ++k)
      if (e[k]) t *= powers[k][e[k]];
    sum += t;
  }
  return sum;
}

std::complex<double> Polynomial::evaluate(std::span<const std::complex<double>> point) const {
  return NumericPolynomial(*this)(point);
}

Polynomial Polynomial::compose(std::span<const Polynomial> components) const {
  if (components.size() != vars_) throw PreconditionError("composition needs one component per variable");
  if (components.empty()) throw PreconditionError("composition with no components");
  const std::size_t out_vars = components.front().vars();
  std::vector<std::vector<Polynomial>> powers(vars_);
  for (std::size_t k = 0; k < vars_; ++k) {
    powers[k].push_back(constant(out_vars, 1));
    for (unsigned j = 1; j <= degree_in(k); ++j) powers[k].push_back(powers[k].back() * components[k]);
  }
  Polynomial r(out_vars);
  for (const auto& [e, c] : terms_) {
    Polynomial t = constant(out_vars, c);
    for (std::size_t k = 0; k < vars_; ++k)
      if (e[k]) t *= powers[k][e[k]];
    r += t;
  }
  return r;
}

std::vector<Polynomial> Polynomial::coefficients_in(std::size_t var) const {
  std::vector<Polynomial> out(degree_in(var) + 1, Polynomial(vars_));
  for (const auto& [e, c] : terms_) {
    Exponent rest = e;
    rest[var] = 0;
    out[e[var]].terms_.emplace(std::move(rest), c);
  }
  return out;
}

std::optional<Polynomial> Polynomial::divide_exact(const Polynomial& divisor) const {
  if (divisor.is_zero()) throw PreconditionError("division by the zero polynomial");
  if (divisor.vars_ != vars_) throw PreconditionError("dividing polynomials of different arity");
  Polynomial remainder = *this;
  Polynomial quotient(vars_);
  const auto& [lead_e, lead_c] = divisor.leading_term();
  const GaussianRational lead_inv = lead_c.inverse();
  Exponent e(vars_);
  while (!remainder.is_zero()) {
    const auto& [re, rc] = remainder.leading_term();
    for (std::size_t k = 0; k < vars_; ++k) {
      if (re[k] < lead_e[k]) return std::nullopt;
      e[k] = re[k] - lead_e[k];
    }
    GaussianRational c = rc * lead_inv;
    quotient.add_term(e, c);
    for (const auto& [de, dc] : divisor.terms_) {
      Exponent te = de;
      for (std::size_t k = 0; k < vars_; ++k) te[k] += e[k];
      remainder.add_term(te, -(c * dc));
    }
  }
  return quotient;
}

Polynomial exact_quotient(const Polynomial& a, const Polynomial& b) {
  auto q = a.divide_exact(b);
  if (!q) throw InternalError("expected exact division of " + a.to_string() + " by " + b.to_string());
  return *std::move(q);
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c.to_complex()));
  return m;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    bool is_const = std::all_of(e.begin(), e.end(), [](unsigned k) { return k == 0; });
    std::string cs = c.to_string();
    bool negative_real = sgn(c.im()) == 0 && sgn(c.re()) < 0;
    if (!first) os << (negative_real ? " - " : " + ");
    else if (negative_real) os << "-";
    if (negative_real) cs = GaussianRational(-c).to_string();
    bool unit = cs == "1";
    if (!unit || is_const) {
      os << cs;
      if (!is_const) os << "*";
    }
    bool first_var = true;
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (e[k] == 0) continue;
      if (!first_var) os << "*";
      os << (vars_ == 1 ? std::string("z") : "z" + std::to_string(k + 1));
      if (e[k] > 1) os << "^" << e[k];
      first_var = false;
    }
    first = false;
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Polynomial& p) { return os << p.to_string(); }

NumericPolynomial::NumericPolynomial(const Polynomial& p) : vars_(p.vars()) {
  terms_.reserve(p.term_count());
  for (const auto& [e, c] : p.terms()) {
    for (unsigned k : e) max_degree_ = std::max(max_degree_, k);
    terms_.emplace_back(e, c.to_complex());
  }
}

std::complex<double> NumericPolynomial::operator()(std::span<const std::complex<double>> z) const {
  if (z.size() != vars_) throw PreconditionError("evaluation point has wrong arity");
  // Small dense power table; degrees here stay in the tens.
  thread_local std::vector<std::complex<double>> powers;
  const std::size_t stride = max_degree_ + 1;
  powers.resize(vars_ * stride);
  for (std::size_t k = 0; k < vars_; ++k) {
    powers[k * stride] = 1.0;
    for (unsigned j = 1; j <= max_degree_; ++j) powers[k * stride + j] = powers[k * stride + j - 1] * z[k];
  }
  std::complex<double> sum = 0.0;
  for (const auto& [e, c] : terms_) {
    std::complex<double> t = c;
    for (std::size_t k = 0; k < vars_; ++k)
      if (e[k]) t *= powers[k * stride + e[k]];
    sum += t;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Expression parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::size_t vars) : text_(text), vars_(vars) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("polynomial '" + std::string(text_) + "': " + msg + " at offset " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  int peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : -1;
  }

  bool starts_primary() {
    int c = peek();
    return c == '(' || c == 'i' || c == 'z' || std::isdigit(c) || c == '.';
  }

  Polynomial expr() {
    Polynomial acc(vars_);
    bool negate = false;
    if (peek() == '+' || peek() == '-') negate = text_[pos_++] == '-';
    Polynomial t = term();
    acc = negate ? -t : t;
    while (peek() == '+' || peek() == '-') {
      bool minus = text_[pos_++] == '-';
      Polynomial rhs = term();
      if (minus) acc -= rhs;
      else acc += rhs;
    }
    return acc;
  }

  Polynomial term() {
    Polynomial acc = power();
    for (;;) {
      int c = peek();
      if (c == '*') {
        ++pos_;
        acc *= power();
      } else if (c == '/') {
        ++pos_;
        Polynomial d = power();
        if (!d.is_constant() || d.is_zero()) fail("division by a non-constant or zero");
        acc *= d.constant_term().inverse();
      } else if (starts_primary()) {
        acc *= power();
      } else {
        return acc;
      }
    }
  }

  Polynomial power() {
    Polynomial base = primary();
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected an exponent");
      unsigned long e = std::stoul(std::string(text_.substr(start, pos_ - start)));
      if (e > 256) fail("exponent too large");
      base = base.pow(static_cast<unsigned>(e));
    }
    return base;
  }

  Polynomial primary() {
    int c = peek();
    if (c == '-') {
      ++pos_;
      return -primary();
    }
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (c == 'i') {
      ++pos_;
      return Polynomial::constant(vars_, GaussianRational::i());
    }
    if (c == 'z') {
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::size_t index;
      if (start == pos_) {
        if (vars_ != 1) fail("bare 'z' is only allowed for one variable");
        index = 1;
      } else {
        index = std::stoul(std::string(text_.substr(start, pos_ - start)));
      }
      if (index < 1 || index > vars_) fail("variable z" + std::to_string(index) + " out of range");
      return Polynomial::variable(vars_, index - 1);
    }
    if (std::isdigit(c) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
        ++pos_;
      return Polynomial::constant(vars_, GaussianRational(GaussianRational::parse_rational(text_.substr(start, pos_ - start))));
    }
    fail("expected a number, 'i', a variable or '('");
  }

  std::string_view text_;
  std::size_t vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(std::string_view text, std::size_t vars) {
  if (vars == 0) throw ConfigError("polynomials need at least one variable");
  return Parser(text, vars).parse();
}

}  // namespace nevan
