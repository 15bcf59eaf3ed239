// Acceptance suite: one line per criterion, nonzero exit if any criterion fails.
// Reference values come from the closed forms and from tests/oracles.hpp, never
// from the code path under test.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "nevan/algebra.hpp"
#include "nevan/cli.hpp"
#include "nevan/errors.hpp"
#include "nevan/nevanlinna.hpp"
#include "nevan/symbolic.hpp"
#include "nevan/theorems.hpp"
#include "nevan/words.hpp"
#include "oracles.hpp"

using namespace nevan;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream o;
  o.precision(precision);
  o << v;
  return o.str();
}

ProjectiveMap map_of(std::initializer_list<const char*> comps, std::size_t vars = 1) {
  std::vector<Polynomial> out;
  for (auto c : comps) out.push_back(parse_polynomial(c, vars));
  return ProjectiveMap(out);
}

std::vector<std::vector<int>> rows_of(const OperatorSet& s) {
  std::vector<std::vector<int>> rows;
  for (const auto& w : s.words()) rows.push_back(w.letters());
  return rows;
}

GaussianRational random_gaussian(std::mt19937_64& rng, int bound) {
  std::uniform_int_distribution<int> c(-bound, bound);
  return GaussianRational(c(rng), c(rng));
}

/// Random polynomial whose total degree is at most `degree`, never zero.
Polynomial nonzero_polynomial(std::mt19937_64& rng, std::size_t vars, unsigned degree, int terms) {
  for (;;) {
    Polynomial f = oracle::random_polynomial(rng, vars, degree, terms);
    if (!f.is_zero()) return f;
  }
}

const HyperplaneFamily kStandard3({{1, 0}, {0, 1}, {1, 1}});
const HyperplaneFamily kGeneric4({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 2, 3}});

// ---------------------------------------------------------------------------

Outcome criterion1() {
  const auto t0 = Clock::now();
  std::size_t cases = 0, sets = 0;
  for (std::size_t p = 1; p <= 3; ++p)
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto expected = oracle::brute_force_full_sets(p, n);
      std::set<std::set<std::vector<int>>> got;
      for (const auto& s : enumerate_admissible_full_sets(p, n)) {
        std::set<std::vector<int>> words;
        for (const auto& w : s.words()) words.insert(w.letters());
        got.insert(words);
      }
      if (got != expected)
        return {false, "p=" + std::to_string(p) + " n=" + std::to_string(n) + ": " + std::to_string(got.size()) +
                           " sets vs brute force " + std::to_string(expected.size())};
      ++cases;
      sets += got.size();
    }
  const double elapsed = seconds_since(t0);
  return {elapsed < 10, std::to_string(cases) + " (p,n) pairs, " + std::to_string(sets) + " sets, " +
                            fmt(elapsed) + " s (limit 10 s)"};
}

Outcome criterion2() {
  std::mt19937_64 rng(2002);
  std::size_t scaling = 0, transfer = 0;
  while (scaling < 100 || transfer < 100) {
    const std::size_t p = 1 + rng() % 2, n = 1 + rng() % 3;
    const auto all = enumerate_admissible_full_sets(p, n);
    const OperatorSet& s = all[rng() % all.size()];
    std::vector<Polynomial> fs;
    for (std::size_t j = 0; j <= n; ++j) fs.push_back(nonzero_polynomial(rng, p, 4, 3));
    const Polynomial w_oracle = oracle::wronskian(rows_of(s), fs);
    if (generalized_wronskian(s, fs) != w_oracle) return {false, "library Wronskian differs from cofactor oracle"};

    // Scaling: W_S(g f) = g^{n+1} W_S(f).
    const Polynomial g = nonzero_polynomial(rng, p, 2, 2);
    std::vector<Polynomial> gf;
    for (const auto& f : fs) gf.push_back(g * f);
    if (generalized_wronskian(s, gf) != g.pow(static_cast<unsigned>(n + 1)) * w_oracle)
      return {false, "scaling identity failed for S = " + s.to_string()};
    ++scaling;

    // Transfer: W_S(A f) = det(A) W_S(f) for an invertible block A.
    std::vector<LinearForm> a(n + 1, LinearForm(n + 1));
    std::vector<std::vector<Polynomial>> a_poly(n + 1, std::vector<Polynomial>(n + 1, Polynomial(1)));
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j <= n; ++j) {
        a[i][j] = random_gaussian(rng, 3);
        a_poly[i][j] = Polynomial::constant(1, a[i][j]);
      }
    const Polynomial det_a = oracle::cofactor_determinant(a_poly);
    if (det_a.is_zero()) continue;
    std::unique_ptr<ProjectiveMap> f;
    try {
      f = std::make_unique<ProjectiveMap>(fs);
    } catch (const PreconditionError&) {
      continue;  // not a reduced representation
    }
    std::vector<Polynomial> composed;
    for (const auto& row : a) {
      Polynomial acc(p);
      for (std::size_t j = 0; j <= n; ++j) acc += fs[j] * row[j];
      composed.push_back(acc);
    }
    const Polynomial lhs = oracle::wronskian(rows_of(s), composed);
    if (lhs != w_oracle * det_a.constant_term()) return {false, "transfer identity failed in the oracle"};
    if (!wronskian_transfer_check(s, *f, a)) return {false, "wronskian_transfer_check rejected a valid instance"};
    ++transfer;
  }
  return {true, std::to_string(scaling) + " scaling and " + std::to_string(transfer) +
                    " transfer instances, exact equality"};
}

Outcome criterion3() {
  std::mt19937_64 rng(3003);
  std::size_t families = 0, dependent = 0, disagreements = 0;
  for (; families < 240; ++families) {
    const std::size_t p = 1 + families % 3, n = 1 + (families / 3) % 3;
    std::vector<Polynomial> fs;
    for (std::size_t j = 0; j <= n; ++j) fs.push_back(oracle::random_polynomial(rng, p, 3, 5));
    if (families % 3 == 0) {
      // Engineered dependence: the last member is a combination of the others.
      Polynomial combo(p);
      for (std::size_t j = 0; j < n; ++j) combo += fs[j] * random_gaussian(rng, 2);
      fs.back() = combo;
    }
    const bool independent = oracle::coefficient_rank(fs) == fs.size();
    dependent += !independent;
    const bool wronskian = find_nonvanishing_wronskian(fs).has_value();
    disagreements += independent != wronskian;
    disagreements += coefficient_rank_independent(fs) != independent;
  }
  return {disagreements == 0, std::to_string(families) + " families (" + std::to_string(dependent) +
                                  " dependent), " + std::to_string(disagreements) + " disagreements"};
}

Outcome criterion4() {
  std::mt19937_64 rng(4004);
  std::size_t maps = 0, attempts = 0;
  while (maps < 60) {
    if (++attempts > 5000) return {false, "could not generate enough maps"};
    const std::size_t p = 1 + rng() % 2, n = 2 + rng() % 3;
    // 1, z_k + (higher order), ... has an invertible differential at the origin.
    std::vector<Polynomial> fs{Polynomial::constant(p, 1)};
    for (std::size_t k = 0; k < p; ++k) {
      Polynomial hot(p);
      const Polynomial raw = oracle::random_polynomial(rng, p, 3, 2);
      for (const auto& [e, c] : raw.terms()) {
        unsigned deg = 0;
        for (unsigned x : e) deg += x;
        if (deg >= 2) hot += Polynomial::monomial(c, e);
      }
      fs.push_back(Polynomial::variable(p, k) + hot);
    }
    while (fs.size() < n + 1) fs.push_back(nonzero_polynomial(rng, p, 4, 3));
    if (oracle::coefficient_rank(fs) != fs.size()) continue;
    const ProjectiveMap f(fs);
    const OperatorSet s = find_witness_family(f);
    std::set<std::vector<int>> words;
    for (const auto& w : s.words()) words.insert(w.letters());
    std::vector<std::size_t> orders;
    for (const auto& w : words) orders.push_back(w.size());
    std::sort(orders.begin(), orders.end());
    bool ok = words.size() == n + 1;
    for (std::size_t k = 0; k < orders.size(); ++k) ok = ok && orders[k] <= k;
    for (const auto& w : words)
      for (const auto& v : oracle::all_words(p, w.size()))
        if (oracle::is_submultiset(v, w) && !words.count(v)) ok = false;
    for (int l = 1; l <= static_cast<int>(p); ++l) ok = ok && words.count({l});
    ok = ok && orders.back() <= n + 1 - p;
    ok = ok && !oracle::wronskian(rows_of(s), fs).is_zero();
    if (!ok) return {false, "bad witness " + s.to_string() + " for " + f.to_string()};
    ++maps;
  }
  return {true, std::to_string(maps) + " maps with p <= 2 <= n <= 4, all witnesses full, admissible, order <= n+1-p"};
}

Outcome criterion5() {
  const auto t0 = Clock::now();
  const RadiusGrid grid = RadiusGrid::standard();
  const auto f = map_of({"1", "z"});
  ProfileOptions opt;
  const auto prof = profile(f, kStandard3, grid, {kUntruncated}, opt);
  double worst = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& hp = prof.hyperplanes[i];
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      // T(r) = log r in closed form for r > 1.
      if (std::abs(prof.order[k] - std::log(grid.radii()[k])) > 1e-9) return {false, "T(r) != log r"};
      const double e = hp.proximity[k] + prof.counting(i, kUntruncated)[k] - prof.order[k];
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    worst = std::max(worst, hi - lo);
  }
  const double elapsed = seconds_since(t0);
  return {worst <= 5e-3 && elapsed < 5, "max spread of m + N - T = " + fmt(worst) + " (limit 5e-3), " +
                                            fmt(elapsed) + " s (limit 5 s)"};
}

Outcome criterion6() {
  const RadiusGrid grid = RadiusGrid::standard();
  ProfileOptions opt;
  const auto prof = profile(map_of({"1", "z"}), kStandard3, grid, {1}, opt);
  double worst = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double sum = 0;
    for (std::size_t i = 0; i < 3; ++i) sum += prof.counting(i, 1)[k];
    worst = std::max(worst, std::abs(sum - prof.order[k] - std::log(grid.radii()[k])));
  }
  NumericSetup setup;
  const auto rep = check_smt(map_of({"1", "z", "z^2"}), kGeneric4, setup, kappa(1, 2));
  const bool ok = worst <= 5e-3 && rep.passed && rep.metrics.at("final_ratio") <= 0.05 &&
                  rep.metrics.at("truncation") == 2;
  return {ok, "n=1: |margin - log r| <= " + fmt(worst) + "; n=2 at truncation 2: final ratio " +
                  fmt(rep.metrics.at("final_ratio")) + ", " + (rep.passed ? "pass" : "fail")};
}

/// Truncation chain on one profile with levels {1, 2, 3, inf}.
std::size_t chain_violations(const FunctionalProfile& prof, std::size_t& comparisons) {
  std::size_t bad = 0;
  const std::vector<Truncation> levels{1, 2, 3, kUntruncated};
  for (std::size_t i = 0; i < prof.hyperplanes.size(); ++i)
    for (std::size_t k = 0; k < prof.radii.size(); ++k) {
      auto val = [&](Truncation m) { return prof.counting(i, m)[k]; };
      auto err = [&](Truncation m) { return prof.p == 1 ? 0.0 : prof.counting_error(i, m)[k]; };
      auto le = [&](double a, double ea, double b, double eb) {
        ++comparisons;
        const double slack = 3 * std::hypot(ea, eb) + 1e-9 * (1 + std::abs(a) + std::abs(b));
        return a <= b + slack;
      };
      for (std::size_t t = 0; t + 1 < levels.size(); ++t)
        bad += !le(val(levels[t]), err(levels[t]), val(levels[t + 1]), err(levels[t + 1]));
      for (Truncation m : {2u, 3u}) bad += !le(val(m), err(m), m * val(1), m * err(1));
    }
  return bad;
}

Outcome criterion7() {
  std::size_t profiles = 0, comparisons = 0, bad = 0;
  for (const auto& entry : cli::catalog(cli::scenario_dir())) {
    const auto s = cli::load_scenario(entry.path);
    const auto prof = profile(s.map, s.hyperplanes, s.grid, {1, 2, 3, kUntruncated},
                              ProfileOptions{s.quad, s.lines, 1});
    bad += chain_violations(prof, comparisons);
    ++profiles;
  }
  std::mt19937_64 rng(7007);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Polynomial> fs{Polynomial::constant(1, 1)};
    for (int j = 0; j < 2; ++j) fs.push_back(oracle::random_polynomial(rng, 1, 4, 3, false) + parse_polynomial("z^4", 1));
    std::unique_ptr<ProjectiveMap> f;
    try {
      f = std::make_unique<ProjectiveMap>(fs);
      const auto prof = profile(*f, kGeneric4, RadiusGrid::standard(), {1, 2, 3, kUntruncated}, ProfileOptions{});
      bad += chain_violations(prof, comparisons);
      ++profiles;
    } catch (const PreconditionError&) {
      continue;
    }
  }
  return {bad == 0 && profiles >= 10, std::to_string(profiles) + " profiles, " + std::to_string(comparisons) +
                                          " comparisons, " + std::to_string(bad) + " violations"};
}

Outcome criterion8() {
  std::mt19937_64 rng(8008);
  std::size_t polys = 0, disagreements = 0;
  double worst = 0;
  QuadratureSpec quad;
  quad.scheme = QuadratureScheme::LowDiscrepancy;
  quad.nodes = 4096;
  const double radius = 10;
  while (polys < 20) {
    Polynomial g = oracle::random_polynomial(rng, 2, 4, 4);
    if (g.is_constant()) continue;
    quad.seed = mix_seed(8008, polys);
    const Estimate jensen = counting_jensen_replicated(g, radius, quad, 8);
    const Estimate sliced = counting_sliced(g, radius, kUntruncated, 400, mix_seed(8009, polys));
    const double diff = std::abs(jensen.value - sliced.value);
    const double tol = 3 * std::hypot(jensen.standard_error, sliced.standard_error) + 1e-9 * (1 + sliced.value);
    worst = std::max(worst, diff / tol);
    disagreements += diff > tol;
    ++polys;
  }
  return {disagreements == 0, std::to_string(polys) + " bivariate polynomials at r = 10, " +
                                  std::to_string(disagreements) + " outside 3 combined SE, worst |diff|/tol = " +
                                  fmt(worst)};
}

Outcome criterion9() {
  std::size_t scenarios = 0;
  std::string skipped;
  double worst_margin = INFINITY;
  for (const auto& entry : cli::catalog(cli::scenario_dir())) {
    const auto s = cli::load_scenario(entry.path);
    NumericSetup setup{s.grid, ProfileOptions{s.quad, s.lines, 1}};
    try {
      const auto res = defects(s.map, s.hyperplanes, setup, kappa(s.p, s.n), 0.1);
      double sum = 0;
      for (double d : res.defects) sum += d;
      worst_margin = std::min(worst_margin, static_cast<double>(s.n + 1) + 0.1 - sum);
      ++scenarios;
    } catch (const PreconditionError& e) {
      skipped += (skipped.empty() ? "" : ", ") + s.name;
    }
  }
  NumericSetup setup;
  const auto line = defects(map_of({"1", "z"}), kStandard3, setup);
  const double delta0 = line.defects[0];
  const bool ok = worst_margin >= 0 && std::abs(delta0 - 1) <= 1e-3;
  return {ok, std::to_string(scenarios) + " scenarios, min (n+1.1 - sum delta) = " + fmt(worst_margin) +
                  "; delta(w0) for [1:z] = " + fmt(delta0, 6) + "; hypotheses fail (skipped): " + skipped};
}

Outcome criterion10() {
  std::mt19937_64 rng(10010);
  // Pole order: g with known Gaussian-integer roots, w = "1"^L.
  std::size_t pole_cases = 0, pole_bad = 0;
  while (pole_cases < 120) {
    std::vector<std::pair<GaussianRational, unsigned>> roots;
    const int count = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < count; ++k) {
      const GaussianRational a = random_gaussian(rng, 3);
      bool dup = false;
      for (const auto& [b, m] : roots) dup = dup || b == a;
      if (!dup) roots.emplace_back(a, 1 + rng() % 4);
    }
    Polynomial g = Polynomial::constant(1, 1);
    for (const auto& [a, m] : roots)
      g *= (Polynomial::variable(1, 0) - Polynomial::constant(1, a)).pow(m);
    const unsigned len = 1 + static_cast<unsigned>(rng() % 5);
    const Polynomial dg = oracle::apply_word(g, std::vector<int>(len, 1));
    const auto rep = check_pole_order_bound(g, Word(std::vector<int>(len, 1)));
    if (dg.is_zero()) {
      pole_bad += !rep.passed;
      ++pole_cases;
      continue;
    }
    double oracle_max = 0;
    for (const auto& [a, m] : roots) {
      const unsigned pole = m > oracle::order_at(dg, a) ? m - oracle::order_at(dg, a) : 0;
      pole_bad += pole > std::min(m, len);
      oracle_max = std::max(oracle_max, static_cast<double>(pole));
    }
    pole_bad += !rep.passed || rep.metrics.at("max_pole_order") != oracle_max;
    ++pole_cases;
  }

  // Vanishing estimate. (a) Hyperplane compositions with known roots: g = A f is
  // chosen first, so divisor orders are read off exactly and checked pointwise.
  std::size_t van_exact = 0, van_bad = 0;
  while (van_exact < 50) {
    const std::size_t n = 1 + rng() % 3;
    std::vector<Polynomial> gs;
    std::set<std::pair<std::string, std::string>> used;
    std::vector<std::vector<std::pair<GaussianRational, unsigned>>> roots(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      Polynomial gi = Polynomial::constant(1, random_gaussian(rng, 2) + GaussianRational(5));
      if (rng() % 4 != 0) {
        const GaussianRational a = random_gaussian(rng, 4);
        const unsigned m = 1 + static_cast<unsigned>(rng() % 5);
        if (used.insert({a.re().get_str(), a.im().get_str()}).second) {
          roots[i].emplace_back(a, m);
          gi *= (Polynomial::variable(1, 0) - Polynomial::constant(1, a)).pow(m);
        }
      }
      gs.push_back(gi);
    }
    // Rows of H are the inverse of a random matrix B with f = B g.
    std::vector<std::vector<GaussianRational>> b(n + 1, std::vector<GaussianRational>(n + 1));
    std::vector<std::vector<Polynomial>> b_poly(n + 1, std::vector<Polynomial>(n + 1, Polynomial(1)));
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j <= n; ++j) b_poly[i][j] = Polynomial::constant(1, b[i][j] = random_gaussian(rng, 2));
    if (oracle::cofactor_determinant(b_poly).is_zero()) continue;
    std::vector<Polynomial> fs(n + 1, Polynomial(1));
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j <= n; ++j) fs[i] += gs[j] * b[i][j];
    if (oracle::coefficient_rank(fs) != n + 1) continue;
    // H = B^{-1} via Gauss-Jordan on [B | I].
    std::vector<std::vector<GaussianRational>> aug(n + 1, std::vector<GaussianRational>(2 * n + 2));
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = 0; j <= n; ++j) aug[i][j] = b[i][j];
      aug[i][n + 1 + i] = 1;
    }
    for (std::size_t c = 0; c <= n; ++c) {
      std::size_t piv = c;
      while (aug[piv][c].is_zero()) ++piv;
      std::swap(aug[piv], aug[c]);
      const GaussianRational inv = aug[c][c].inverse();
      for (auto& x : aug[c]) x *= inv;
      for (std::size_t r = 0; r <= n; ++r) {
        if (r == c || aug[r][c].is_zero()) continue;
        const GaussianRational fct = aug[r][c];
        for (std::size_t k = 0; k < aug[r].size(); ++k) aug[r][k] -= fct * aug[c][k];
      }
    }
    std::vector<LinearForm> h(n + 1);
    for (std::size_t i = 0; i <= n; ++i) h[i].assign(aug[i].begin() + static_cast<long>(n + 1), aug[i].end());
    const ProjectiveMap f(fs);
    std::vector<std::vector<int>> rows;
    for (std::size_t k = 0; k <= n; ++k) rows.push_back(std::vector<int>(k, 1));
    const Polynomial w = oracle::wronskian(rows, fs);
    if (w.is_zero()) continue;
    for (std::size_t i = 0; i <= n; ++i)
      for (const auto& [a, m] : roots[i]) {
        long lhs = -static_cast<long>(oracle::order_at(w, a)), rhs = 0;
        for (std::size_t j = 0; j <= n; ++j) {
          const unsigned o = oracle::order_at(gs[j], a);
          lhs += o;
          rhs += std::min(o, static_cast<unsigned>(n));
        }
        van_bad += lhs > rhs;
      }
    std::vector<Word> words;
    for (const auto& r : rows) words.emplace_back(r);
    const auto rep = check_vanishing_estimate(f, HyperplaneFamily(h), OperatorSet(1, words));
    van_bad += !rep.passed;
    ++van_exact;
  }
  // (b) Random maps against four lines in general position.
  std::size_t van_random = 0;
  const OperatorSet s2(1, {Word::parse("e"), Word::parse("1"), Word::parse("11")});
  while (van_random < 100) {
    std::vector<Polynomial> fs;
    for (int j = 0; j < 3; ++j) fs.push_back(oracle::random_polynomial(rng, 1, 4, 3, false));
    if (oracle::coefficient_rank(fs) != 3) continue;
    try {
      const ProjectiveMap f(fs);
      van_bad += !check_vanishing_estimate(f, kGeneric4, s2).passed;
      ++van_random;
    } catch (const PreconditionError&) {
      continue;
    }
  }
  const bool ok = pole_bad == 0 && van_bad == 0;
  return {ok, "pole order: " + std::to_string(pole_cases) + " instances, " + std::to_string(pole_bad) +
                  " violations; vanishing: " + std::to_string(van_exact) + " exact-oracle + " +
                  std::to_string(van_random) + " random instances, " + std::to_string(van_bad) + " violations"};
}

Outcome criterion11() {
  std::vector<std::string> problems;
  auto expect_throw = [&](const std::string& what, auto&& fn, auto tag) {
    try {
      fn();
      problems.push_back(what + " did not throw");
    } catch (const decltype(tag)&) {
    } catch (const std::exception& e) {
      problems.push_back(what + " threw something else: " + e.what());
    }
  };
  const auto section = fermat_section_check(map_of({"1", "i", "z", "i*z"}), 2);
  if (!section.passed || section.facts.at("degenerate") != "yes") problems.push_back("section verdict");
  const auto omit = fermat_omit_check(map_of({"1", "i*z^3", "z^3"}), 2);
  if (!omit.passed || omit.facts.at("degenerate") != "yes") problems.push_back("omit verdict");
  if (section.facts.at("multiplicities_at_least_d") != "yes" || omit.facts.at("multiplicities_at_least_d") != "yes")
    problems.push_back("library multiplicity fact");

  // Exact multiplicities of the pushed coordinates f_j^2, by Taylor coefficients.
  for (const auto& comps : {std::vector<std::string>{"1", "i", "z", "i*z"}, {"1", "i*z^3", "z^3"}})
    for (const auto& c : comps) {
      const Polynomial pushed = parse_polynomial(c, 1).pow(2);
      if (pushed.is_constant()) continue;
      if (oracle::order_at(pushed, GaussianRational(0)) < 2) problems.push_back("multiplicity of " + c + "^2");
    }
  const Polynomial sum = parse_polynomial("1 + (i*z^3)^2 + (z^3)^2", 1);
  if (!sum.is_constant() || sum.is_zero()) problems.push_back("omission identity");

  expect_throw("perturbed section", [] { fermat_section_check(map_of({"1", "i", "z", "i*z + 1"}), 2); },
               NotOnFermat(""));
  expect_throw("perturbed section (i z^2)", [] { fermat_section_check(map_of({"1", "i", "z", "i*z^2"}), 2); },
               NotOnFermat(""));
  expect_throw("perturbed omission", [] { fermat_omit_check(map_of({"1", "i*z^3", "z^3 + z"}), 2); },
               DoesNotOmit(""));
  expect_throw("perturbed omission (2 h)", [] { fermat_omit_check(map_of({"1", "i*z^3", "2*z^3"}), 2); },
               DoesNotOmit(""));

  // The bundled scenarios carry the same constructions end to end.
  for (const std::string name : {"fermat_section_d2", "fermat_omit_d2"}) {
    const auto s = cli::load_scenario(cli::resolve_config(name));
    const auto res = cli::run_scenario(s);
    if (res.exit_code != 0) problems.push_back("scenario " + name + " exit " + std::to_string(res.exit_code));
  }
  std::string joined;
  for (const auto& p : problems) joined += (joined.empty() ? "" : "; ") + p;
  return {problems.empty(), problems.empty() ? "degenerate verdicts on both constructions, 4 perturbations rejected, "
                                               "pushed multiplicities >= 2 exact"
                                             : joined};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion12() {
  const fs::path root = fs::temp_directory_path() / "nevan_acceptance_determinism";
  fs::remove_all(root);
  const std::size_t many = std::max<std::size_t>(2, std::thread::hardware_concurrency());
  auto run = [&](const std::string& tag, std::size_t threads) {
    const std::string dir = (root / tag).string(), dirs = cli::scenario_dir().string(),
                      t = std::to_string(threads);
    const char* argv[] = {"nevan", "--config", dirs.c_str(), "--out", dir.c_str(), "--threads", t.c_str()};
    std::ostringstream out, err;
    return cli::main(7, argv, out, err);
  };
  const int a = run("first", 1), b = run("second", 1), c = run("threaded", many);
  std::size_t compared = 0, differ = 0;
  for (const auto& entry : cli::catalog(cli::scenario_dir())) {
    const auto name = entry.path.stem();
    const std::string one = slurp(root / "first" / name / "report.json");
    if (one.empty()) ++differ;
    differ += one != slurp(root / "second" / name / "report.json");
    differ += one != slurp(root / "threaded" / name / "report.json");
    ++compared;
  }
  fs::remove_all(root);
  return {differ == 0 && a == b && b == c,
          std::to_string(compared) + " report.json files at 1, 1 and " + std::to_string(many) + " threads, " +
              std::to_string(differ) + " mismatches (corpus exit code " + std::to_string(a) + ")"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"combinatorics oracle", criterion1},
      {"Wronskian scaling and transfer identities", criterion2},
      {"rank oracle vs generalized Wronskians", criterion3},
      {"witness family for maximal-rank maps", criterion4},
      {"first main theorem on [1:z]", criterion5},
      {"Cartan desk cases", criterion6},
      {"truncation ordering", criterion7},
      {"p=2 Jensen vs slicing", criterion8},
      {"defect relation", criterion9},
      {"pole-order and vanishing suites", criterion10},
      {"Fermat constructions", criterion11},
      {"determinism", criterion12},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.passed;
    std::cout << (o.passed ? "PASS" : "FAIL") << "  criterion " << (k + 1) << ": " << criteria[k].first << " - "
              << o.detail << " [" << fmt(seconds_since(t0), 2) << " s]" << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
