#include "nevan/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "nevan/algebra.hpp"
#include "nevan/errors.hpp"
#include "nevan/parallel.hpp"

#ifndef NEVAN_SCENARIO_DIR
#define NEVAN_SCENARIO_DIR "scenarios"
#endif

namespace nevan::cli {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Parsing

/// Signed or unsigned JSON integer that is >= lo.
bool is_int_at_least(const json& v, std::int64_t lo) {
  if (v.is_number_unsigned()) return true;
  return v.is_number_integer() && v.get<std::int64_t>() >= lo;
}

[[noreturn]] void config_fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

mpq_class parse_real(const json& v, const std::string& where) {
  try {
    if (v.is_number()) return GaussianRational::parse_rational(v.dump());
    if (v.is_string()) return GaussianRational::parse_rational(v.get<std::string>());
  } catch (const Error& e) {
    config_fail(where, e.what());
  }
  config_fail(where, "expected a number or a \"num/den\" string, got " + v.dump());
}

/// A number, a string such as "1/2" or "2-i/3", or an [re, im] pair.
GaussianRational parse_scalar(const json& v, const std::string& where) {
  if (v.is_array()) {
    if (v.size() != 2) config_fail(where, "complex numbers are written [re, im]");
    return {parse_real(v[0], where), parse_real(v[1], where)};
  }
  if (v.is_string()) {
    Polynomial c;
    try {
      c = parse_polynomial(v.get<std::string>(), 1);
    } catch (const Error& e) {
      config_fail(where, e.what());
    }
    if (!c.is_constant()) config_fail(where, "expected a constant, got '" + v.get<std::string>() + "'");
    return c.constant_term();
  }
  return parse_real(v, where);
}

Polynomial parse_component(const json& v, std::size_t p, const std::string& where) {
  if (v.is_string()) {
    try {
      return parse_polynomial(v.get<std::string>(), p);
    } catch (const Error& e) {
      config_fail(where, e.what());
    }
  }
  if (!v.is_array()) config_fail(where, "a polynomial is a string or a list of [coefficient, [exponents]] terms");
  Polynomial out(p);
  for (std::size_t t = 0; t < v.size(); ++t) {
    const std::string at = where + "[" + std::to_string(t) + "]";
    const json& term = v[t];
    if (!term.is_array() || term.size() != 2 || !term[1].is_array())
      config_fail(at, "term must be [coefficient, [exponents]]");
    if (term[1].size() != p) config_fail(at, "exponent vector must have p = " + std::to_string(p) + " entries");
    Exponent e;
    for (const auto& x : term[1]) {
      if (!is_int_at_least(x, 0)) config_fail(at, "exponents must be nonnegative integers");
      e.push_back(x.get<unsigned>());
    }
    out += Polynomial::monomial(parse_scalar(term[0], at), e);
  }
  return out;
}

Truncation parse_truncation(const json& v, const std::string& where) {
  if (v.is_string() && (v == "inf" || v == "infinity")) return kUntruncated;
  if (is_int_at_least(v, 1) && v.get<std::uint64_t>() < kUntruncated)
    return v.get<Truncation>();
  config_fail(where, "truncation must be a positive integer or \"inf\"");
}

std::size_t get_count(const json& obj, const char* key, std::size_t fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!is_int_at_least(v, 0)) config_fail(where + "." + key, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

double get_real(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) config_fail(where + "." + key, "expected a number");
  return v.get<double>();
}

std::string describe_count_requirement(const Scenario& s) {
  return "needs q >= n+2 hyperplanes; got q = " + std::to_string(s.hyperplanes.q()) +
         " with n = " + std::to_string(s.n);
}

void validate_check(const Scenario& s, const CheckSpec& c) {
  const std::string where = "checks." + c.name;
  const auto& o = c.options;
  for (const auto& [key, _] : o.items()) {
    static const std::map<std::string, std::vector<std::string>> allowed = {
        {"fmt", {"band", "hyperplanes", "form", "expect_error"}},
        {"smt", {"truncation", "ratio_limit", "expect_error"}},
        {"defects", {"truncation", "slack", "expect_error"}},
        {"ramification", {"expect_error"}},
        {"fermat_section", {"d", "map", "expect_error"}},
        {"fermat_omit", {"d", "map", "expect_error"}},
        {"pole_order", {"cases", "random", "max_order", "expect_error"}},
        {"vanishing", {"operators", "random", "expect_error"}},
        {"apriori", {"operators", "samples", "factor", "expect_error"}},
        {"wronskian", {"expect_error"}},
        {"jensen_slicing", {"replicates", "sigmas", "expect_error"}},
    };
    const auto& keys = allowed.at(c.name);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) config_fail(where, "unknown option '" + key + "'");
  }
  const bool needs_q = c.name == "smt" || c.name == "defects";
  if (needs_q && s.hyperplanes.q() < s.n + 2 && !o.contains("expect_error"))
    config_fail(where, describe_count_requirement(s));
  if ((c.name == "fermat_section" || c.name == "fermat_omit") && !o.contains("d") && s.d == 0)
    config_fail(where, "Fermat checks need a degree d (scenario field \"d\" or check option)");
  if (o.contains("truncation")) parse_truncation(o["truncation"], where + ".truncation");
  if (o.contains("expect_error") && !o["expect_error"].is_string())
    config_fail(where + ".expect_error", "expected an error name");
}

// ---------------------------------------------------------------------------
// Checks

std::string error_name(const std::exception& e) {
  if (dynamic_cast<const TooFewHyperplanes*>(&e)) return "TooFewHyperplanes";
  if (dynamic_cast<const NotGeneralPosition*>(&e)) return "NotGeneralPosition";
  if (dynamic_cast<const DegenerateMap*>(&e)) return "DegenerateMap";
  if (dynamic_cast<const NotOnFermat*>(&e)) return "NotOnFermat";
  if (dynamic_cast<const DoesNotOmit*>(&e)) return "DoesNotOmit";
  if (dynamic_cast<const NotMaximalRank*>(&e)) return "NotMaximalRank";
  if (dynamic_cast<const LinearlyDegenerate*>(&e)) return "LinearlyDegenerate";
  if (dynamic_cast<const IdenticallyZeroComposition*>(&e)) return "IdenticallyZeroComposition";
  if (dynamic_cast<const BudgetExceeded*>(&e)) return "BudgetExceeded";
  if (dynamic_cast<const QuadratureFailure*>(&e)) return "QuadratureFailure";
  if (dynamic_cast<const DegenerateSlice*>(&e)) return "DegenerateSlice";
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const PreconditionError*>(&e)) return "PreconditionError";
  if (dynamic_cast<const NumericError*>(&e)) return "NumericError";
  if (dynamic_cast<const InternalError*>(&e)) return "InternalError";
  return "Error";
}

std::optional<Truncation> option_truncation(const CheckSpec& c) {
  if (!c.options.contains("truncation")) return std::nullopt;
  return parse_truncation(c.options["truncation"], "checks." + c.name + ".truncation");
}

std::optional<OperatorSet> option_operators(const CheckSpec& c, std::size_t p) {
  if (!c.options.contains("operators")) return std::nullopt;
  const json& v = c.options["operators"];
  if (!v.is_array()) config_fail("checks." + c.name + ".operators", "expected a list of words such as \"e\", \"1\"");
  std::vector<Word> words;
  try {
    for (const auto& w : v) words.push_back(Word::parse(w.get<std::string>()));
    return OperatorSet(p, words);
  } catch (const PreconditionError& e) {
    config_fail("checks." + c.name + ".operators", e.what());
  } catch (const json::exception& e) {
    config_fail("checks." + c.name + ".operators", e.what());
  }
}

ProjectiveMap option_map(const Scenario& s, const CheckSpec& c) {
  if (!c.options.contains("map")) return s.map;
  const json& v = c.options["map"];
  const std::string where = "checks." + c.name + ".map";
  if (!v.is_array()) config_fail(where, "expected a list of components");
  std::vector<Polynomial> comps;
  for (std::size_t j = 0; j < v.size(); ++j) comps.push_back(parse_component(v[j], s.p, where));
  try {
    return ProjectiveMap(comps);
  } catch (const PreconditionError& e) {
    config_fail(where, e.what());
  }
}

/// Products of random linear factors with small Gaussian-integer coefficients.
Polynomial random_factored(std::mt19937_64& rng, std::size_t p) {
  std::uniform_int_distribution<int> coef(-3, 3), mult(1, 4), count(1, 3);
  Polynomial g = Polynomial::constant(p, 1);
  const int factors = count(rng);
  for (int k = 0; k < factors; ++k) {
    Polynomial lin = Polynomial::constant(p, GaussianRational(coef(rng), coef(rng)));
    bool has_var = false;
    for (std::size_t v = 0; v < p; ++v) {
      const int a = coef(rng);
      if (a == 0 && (v + 1 < p || has_var)) continue;
      lin += Polynomial::variable(p, v) * GaussianRational(a == 0 ? 1 : a);
      has_var = true;
    }
    g *= lin.pow(mult(rng));
  }
  return g;
}

Polynomial random_sparse(std::mt19937_64& rng, std::size_t p, unsigned degree, std::size_t terms) {
  std::uniform_int_distribution<int> coef(-4, 4);
  std::uniform_int_distribution<unsigned> exp(0, degree);
  Polynomial g(p);
  for (std::size_t t = 0; t < terms; ++t) {
    Exponent e(p);
    unsigned total = 0;
    for (auto& x : e) {
      x = std::min(exp(rng), degree - total);
      total += x;
    }
    const int c = coef(rng);
    if (c != 0) g += Polynomial::monomial(GaussianRational(c), e);
  }
  return g;
}

VerificationReport suite_report(const std::string& theorem, std::size_t instances, std::size_t violations,
                                std::size_t skipped, const std::vector<std::string>& failures) {
  VerificationReport r;
  r.theorem = theorem;
  r.passed = violations == 0 && instances > 0;
  r.metrics["instances"] = static_cast<double>(instances);
  r.metrics["violations"] = static_cast<double>(violations);
  r.metrics["skipped"] = static_cast<double>(skipped);
  if (!failures.empty()) {
    std::string joined;
    for (const auto& f : failures) joined += (joined.empty() ? "" : "; ") + f;
    r.facts["failures"] = joined;
  }
  r.verdict = std::to_string(violations) + " violation(s) across " + std::to_string(instances) + " instance(s)";
  return r;
}

VerificationReport run_pole_order(const Scenario& s, const CheckSpec& c) {
  std::vector<std::pair<Polynomial, Word>> cases;
  const std::string where = "checks.pole_order";
  if (c.options.contains("cases")) {
    for (const auto& item : c.options["cases"]) {
      if (!item.is_object() || !item.contains("g") || !item.contains("word"))
        config_fail(where + ".cases", "each case is {\"g\": polynomial, \"word\": \"11\"}");
      try {
        cases.emplace_back(parse_component(item["g"], s.p, where + ".cases"),
                           Word::parse(item["word"].get<std::string>()));
      } catch (const json::exception& e) {
        config_fail(where + ".cases", e.what());
      } catch (const PreconditionError& e) {
        config_fail(where + ".cases", e.what());
      }
    }
  }
  const std::size_t random = get_count(c.options, "random", 0, where);
  const std::size_t max_order = std::max<std::size_t>(1, get_count(c.options, "max_order", 5, where));
  std::mt19937_64 rng(mix_seed(s.seed, 21));
  for (std::size_t k = 0; k < random; ++k) {
    Polynomial g = random_factored(rng, s.p);
    std::uniform_int_distribution<std::size_t> len(1, max_order);
    std::uniform_int_distribution<int> letter(1, static_cast<int>(s.p));
    std::vector<int> letters(len(rng));
    for (auto& l : letters) l = letter(rng);
    cases.emplace_back(std::move(g), Word(letters));
  }
  std::size_t violations = 0, vacuous = 0;
  std::vector<std::string> failures;
  for (const auto& [g, w] : cases) {
    const auto rep = check_pole_order_bound(g, w);
    if (rep.facts.count("vacuous")) ++vacuous;
    if (!rep.passed) {
      ++violations;
      failures.push_back("g = " + g.to_string() + ", w = " + w.to_string());
    }
  }
  auto r = suite_report("pole_order_bound", cases.size(), violations, 0, failures);
  r.metrics["vacuous"] = static_cast<double>(vacuous);
  return r;
}

VerificationReport run_vanishing(const Scenario& s, const CheckSpec& c) {
  const auto fixed = option_operators(c, s.p);
  const std::size_t random = get_count(c.options, "random", 0, "checks.vanishing");
  std::size_t instances = 0, violations = 0, skipped = 0;
  std::vector<std::string> failures;
  double max_excess = 0;

  auto one = [&](const ProjectiveMap& f, bool required) {
    std::optional<OperatorSet> ops = fixed;
    try {
      if (!ops) ops = find_witness_family(f);
      const auto rep = check_vanishing_estimate(f, s.hyperplanes, *ops);
      ++instances;
      max_excess = std::max(max_excess, rep.metrics.at("max_excess"));
      if (!rep.passed) {
        ++violations;
        failures.push_back(f.to_string());
      }
    } catch (const PreconditionError&) {
      if (required) throw;
      ++skipped;
    }
  };
  one(s.map, true);
  std::mt19937_64 rng(mix_seed(s.seed, 32));
  std::size_t produced = 0, attempts = 0;
  while (produced < random) {
    if (++attempts > 50 * (random + 1)) throw NumericError("vanishing: could not generate admissible random maps");
    std::vector<Polynomial> comps;
    for (std::size_t j = 0; j <= s.n; ++j) comps.push_back(random_sparse(rng, s.p, 4, 3));
    std::unique_ptr<ProjectiveMap> f;
    try {
      f = std::make_unique<ProjectiveMap>(comps);
    } catch (const PreconditionError&) {
      continue;
    }
    if (!coefficient_rank_independent(f->components())) continue;
    const std::size_t before = skipped;
    one(*f, false);
    if (skipped == before) ++produced;
  }
  auto r = suite_report("vanishing_estimate", instances, violations, skipped, failures);
  r.metrics["max_excess"] = max_excess;
  r.facts["hyperplanes_in_general_position"] = s.hyperplanes.in_general_position() ? "yes" : "no";
  return r;
}

VerificationReport run_wronskian(const Scenario& s) {
  VerificationReport r;
  r.theorem = "wronskian_witness";
  const auto& fs = s.map.components();
  std::optional<OperatorSet> w;
  if (s.p <= s.n) {
    w = find_witness_family(s.map);
  } else {
    w = find_nonvanishing_wronskian(fs);
    if (!w) throw LinearlyDegenerate("map " + s.map.to_string() + " is linearly degenerate");
  }
  const Polynomial det = generalized_wronskian(*w, fs);
  const bool ok = !det.is_zero() && w->full() && w->admissible() &&
                  (s.p > s.n || (w->first_order_count() == s.p && w->max_order() <= s.n + 1 - s.p));
  r.passed = ok;
  r.facts["operator_set"] = w->to_string();
  r.facts["wronskian"] = det.to_string();
  r.metrics["max_order"] = static_cast<double>(w->max_order());
  r.metrics["first_order_words"] = static_cast<double>(w->first_order_count());
  r.metrics["wronskian_degree"] = det.is_zero() ? -1.0 : static_cast<double>(det.total_degree());
  r.metrics["generic_rank"] = static_cast<double>(generic_rank(s.map));
  r.verdict = ok ? "nonvanishing Wronskian over " + w->to_string() : "witness family failed its invariants";
  return r;
}

VerificationReport run_jensen_slicing(const Scenario& s, const CheckSpec& c) {
  const std::string where = "checks.jensen_slicing";
  const std::size_t replicates = std::max<std::size_t>(2, get_count(c.options, "replicates", 8, where));
  const double sigmas = get_real(c.options, "sigmas", 3.0, where);
  VerificationReport r;
  r.theorem = "jensen_slicing_consistency";
  std::size_t comparisons = 0, disagreements = 0;
  double worst = 0;
  for (std::size_t i = 0; i < s.hyperplanes.q(); ++i) {
    const Polynomial g = compose_linear_form(s.map, s.hyperplanes[i]);
    QuadratureSpec quad = s.quad;
    quad.scheme = QuadratureScheme::LowDiscrepancy;
    quad.seed = mix_seed(s.quad.seed, 500 + i);
    std::optional<SlicedDivisor> sliced;
    std::optional<DivisorP1> exact;
    if (s.p == 1)
      exact = divisor_p1(g);
    else
      sliced.emplace(g, s.lines, mix_seed(s.seed, 600 + i));
    for (double radius : s.grid.radii()) {
      const Estimate jensen = counting_jensen_replicated(g, radius, quad, replicates);
      Estimate other{};
      if (exact)
        other.value = counting_p1(*exact, radius, kUntruncated);
      else
        other = sliced->counting(radius, kUntruncated);
      const double diff = std::abs(jensen.value - other.value);
      // Both sides can be exact (e.g. a coordinate plane), so keep a rounding floor.
      const double tol = s.p == 1 ? 1e-3 * (1 + std::abs(other.value))
                                  : sigmas * std::hypot(jensen.standard_error, other.standard_error) +
                                        1e-9 * (1 + std::abs(other.value));
      ++comparisons;
      r.radii.push_back(radius);
      r.margins.push_back(tol - diff);
      worst = std::max(worst, diff / std::max(tol, 1e-300));
      if (diff > tol) {
        ++disagreements;
        r.violation_radii.push_back(radius);
      }
    }
  }
  r.passed = disagreements == 0;
  r.metrics["comparisons"] = static_cast<double>(comparisons);
  r.metrics["disagreements"] = static_cast<double>(disagreements);
  r.metrics["worst_ratio"] = worst;
  r.metrics["sigmas"] = sigmas;
  r.verdict = std::to_string(disagreements) + " of " + std::to_string(comparisons) + " comparisons outside tolerance";
  return r;
}

std::vector<CheckOutcome> run_check(const Scenario& s, const CheckSpec& c, std::size_t threads) {
  NumericSetup setup{s.grid, ProfileOptions{s.quad, s.lines, threads}};
  std::vector<CheckOutcome> out;
  const std::string expected = c.options.value("expect_error", std::string());

  auto record = [&](const std::string& label, auto&& body) {
    CheckOutcome o;
    o.name = c.name;
    o.label = label;
    try {
      VerificationReport rep = body();
      o.report = std::move(rep);
      o.status = o.report->passed && expected.empty() ? CheckStatus::Pass : CheckStatus::Fail;
      if (!expected.empty()) o.error = "expected " + expected + " but the check completed";
    } catch (const ConfigError&) {
      throw;
    } catch (const NumericError& e) {
      o.status = expected == error_name(e) ? CheckStatus::Pass : CheckStatus::NumericFailure;
      o.error = error_name(e) + ": " + e.what();
    } catch (const Error& e) {
      o.status = expected == error_name(e) ? CheckStatus::Pass : CheckStatus::Error;
      o.error = error_name(e) + ": " + e.what();
    }
    out.push_back(std::move(o));
  };

  const std::string& name = c.name;
  if (name == "fmt") {
    const double band = get_real(c.options, "band", 0.05, "checks.fmt");
    std::vector<std::size_t> which;
    if (c.options.contains("hyperplanes")) {
      for (const auto& v : c.options["hyperplanes"]) {
        if (!is_int_at_least(v, 1) || v.get<std::size_t>() > s.hyperplanes.q())
          config_fail("checks.fmt.hyperplanes", "hyperplane indices run from 1 to q");
        which.push_back(v.get<std::size_t>() - 1);
      }
    } else if (!c.options.contains("form")) {
      for (std::size_t i = 0; i < s.hyperplanes.q(); ++i) which.push_back(i);
    }
    for (std::size_t i : which)
      record("fmt[H" + std::to_string(i + 1) + "]", [&] { return check_fmt(s.map, s.hyperplanes[i], setup, band); });
    if (c.options.contains("form")) {
      const Polynomial q = parse_component(c.options["form"], s.n + 1, "checks.fmt.form");
      record("fmt[form]", [&] { return check_fmt(s.map, q, setup, band); });
    }
  } else if (name == "smt") {
    const double limit = get_real(c.options, "ratio_limit", 0.05, "checks.smt");
    record("smt", [&] { return check_smt(s.map, s.hyperplanes, setup, option_truncation(c), limit); });
  } else if (name == "defects") {
    const double slack = get_real(c.options, "slack", 0.1, "checks.defects");
    record("defects", [&] { return defects(s.map, s.hyperplanes, setup, option_truncation(c), slack).report; });
  } else if (name == "ramification") {
    record("ramification", [&] { return ramification_check(s.map, s.hyperplanes).report; });
  } else if (name == "fermat_section" || name == "fermat_omit") {
    const unsigned d = static_cast<unsigned>(get_count(c.options, "d", s.d, "checks." + name));
    const ProjectiveMap f = option_map(s, c);
    const std::string label = c.options.contains("map") ? name + "[alt]" : name;
    if (name == "fermat_section")
      record(label, [&] { return fermat_section_check(f, d); });
    else
      record(label, [&] { return fermat_omit_check(f, d); });
  } else if (name == "pole_order") {
    record("pole_order", [&] { return run_pole_order(s, c); });
  } else if (name == "vanishing") {
    record("vanishing", [&] { return run_vanishing(s, c); });
  } else if (name == "apriori") {
    const auto ops = option_operators(c, s.p);
    AprioriOptions opt;
    opt.samples = get_count(c.options, "samples", opt.samples, "checks.apriori");
    opt.factor = get_real(c.options, "factor", opt.factor, "checks.apriori");
    opt.seed = mix_seed(s.seed, 77);
    record("apriori", [&] {
      return check_apriori_estimate(s.map, s.hyperplanes, ops ? *ops : find_witness_family(s.map), s.grid, opt);
    });
  } else if (name == "wronskian") {
    record("wronskian", [&] { return run_wronskian(s); });
  } else if (name == "jensen_slicing") {
    record("jensen_slicing", [&] { return run_jensen_slicing(s, c); });
  } else {
    config_fail("checks", "unknown check '" + name + "'");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

std::string short_number(double v) {
  std::ostringstream o;
  o.precision(6);
  o << v;
  return o.str();
}

}  // namespace

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names = {"fmt",        "smt",      "defects", "ramification",
                                                 "fermat_section", "fermat_omit", "pole_order", "vanishing",
                                                 "apriori",    "wronskian", "jensen_slicing"};
  return names;
}

Scenario parse_scenario(const json& doc, const std::string& fallback_name) {
  if (!doc.is_object()) throw ConfigError("scenario must be a JSON object");
  static const std::vector<std::string> fields = {"name", "description", "p", "n", "map", "hyperplanes", "d",
                                                  "grid", "quadrature", "truncations", "lines", "seed", "checks"};
  for (const auto& [key, _] : doc.items())
    if (std::find(fields.begin(), fields.end(), key) == fields.end()) config_fail(key, "unknown scenario field");

  Scenario s;
  s.name = doc.value("name", fallback_name);
  s.description = doc.value("description", std::string());
  if (!doc.contains("p") || !is_int_at_least(doc["p"], 1))
    config_fail("p", "required positive integer");
  if (!doc.contains("n") || !is_int_at_least(doc["n"], 1))
    config_fail("n", "required positive integer");
  s.p = doc["p"].get<std::size_t>();
  s.n = doc["n"].get<std::size_t>();

  if (!doc.contains("map") || !doc["map"].is_array()) config_fail("map", "required list of n+1 components");
  const json& comps = doc["map"];
  if (comps.size() != s.n + 1)
    config_fail("map", "expected n+1 = " + std::to_string(s.n + 1) + " components, got " + std::to_string(comps.size()));
  std::vector<Polynomial> polys;
  for (std::size_t j = 0; j < comps.size(); ++j) {
    polys.push_back(parse_component(comps[j], s.p, "map[" + std::to_string(j) + "]"));
    if (polys.back().vars() != s.p) config_fail("map[" + std::to_string(j) + "]", "arity does not match p");
  }
  try {
    s.map = ProjectiveMap(polys);
  } catch (const PreconditionError& e) {
    config_fail("map", e.what());
  }

  if (doc.contains("hyperplanes")) {
    const json& rows = doc["hyperplanes"];
    if (!rows.is_array() || rows.empty()) config_fail("hyperplanes", "expected a nonempty list of rows");
    std::vector<LinearForm> forms;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string where = "hyperplanes[" + std::to_string(i) + "]";
      if (!rows[i].is_array() || rows[i].size() != s.n + 1)
        config_fail(where, "each row needs n+1 = " + std::to_string(s.n + 1) + " coefficients");
      LinearForm h;
      for (std::size_t j = 0; j < rows[i].size(); ++j)
        h.push_back(parse_scalar(rows[i][j], where + "[" + std::to_string(j) + "]"));
      if (std::all_of(h.begin(), h.end(), [](const auto& c) { return c.is_zero(); }))
        config_fail(where, "zero row");
      forms.push_back(std::move(h));
    }
    s.hyperplanes = HyperplaneFamily(forms);
  } else {
    s.hyperplanes = coordinate_hyperplanes(s.n);
  }

  s.d = static_cast<unsigned>(get_count(doc, "d", 0, "scenario"));
  s.seed = get_count(doc, "seed", 0, "scenario");
  s.lines = get_count(doc, "lines", 400, "scenario");
  if (s.lines < 2) config_fail("lines", "need at least 2 lines");

  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    if (!g.is_object()) config_fail("grid", "expected {\"radii\": [...]} or {\"max\": R}");
    try {
      if (g.contains("radii")) {
        s.grid = RadiusGrid(g["radii"].get<std::vector<double>>());
      } else if (g.contains("max")) {
        s.grid = RadiusGrid::geometric_to(g["max"].get<double>());
      } else {
        config_fail("grid", "expected {\"radii\": [...]} or {\"max\": R}");
      }
    } catch (const json::exception& e) {
      config_fail("grid", e.what());
    } catch (const Error& e) {
      config_fail("grid", e.what());
    }
  }

  s.quad.seed = s.seed;
  if (doc.contains("quadrature")) {
    const json& q = doc["quadrature"];
    if (!q.is_object()) config_fail("quadrature", "expected an object");
    for (const auto& [key, _] : q.items())
      if (key != "scheme" && key != "nodes" && key != "seed") config_fail("quadrature." + key, "unknown field");
    if (q.contains("scheme")) {
      if (!q["scheme"].is_string()) config_fail("quadrature.scheme", "expected a string");
      s.quad.scheme = parse_quadrature_scheme(q["scheme"].get<std::string>());
    }
    s.quad.nodes = get_count(q, "nodes", s.quad.nodes, "quadrature");
    s.quad.seed = get_count(q, "seed", s.quad.seed, "quadrature");
  }
  if (s.quad.nodes < 64) config_fail("quadrature.nodes", "need at least 64 nodes");

  const Truncation k = kappa(s.p, s.n);
  if (doc.contains("truncations")) {
    if (!doc["truncations"].is_array()) config_fail("truncations", "expected a list");
    for (const auto& t : doc["truncations"]) s.truncations.push_back(parse_truncation(t, "truncations"));
  } else {
    s.truncations = {1, k, kUntruncated};
  }
  std::sort(s.truncations.begin(), s.truncations.end());
  s.truncations.erase(std::unique(s.truncations.begin(), s.truncations.end()), s.truncations.end());

  if (doc.contains("checks")) {
    if (!doc["checks"].is_array()) config_fail("checks", "expected a list");
    for (const auto& entry : doc["checks"]) {
      CheckSpec c;
      if (entry.is_string()) {
        c.name = entry.get<std::string>();
      } else if (entry.is_object() && entry.contains("check") && entry["check"].is_string()) {
        c.name = entry["check"].get<std::string>();
        c.options = entry;
        c.options.erase("check");
      } else {
        config_fail("checks", "entries are names or {\"check\": name, ...options}");
      }
      const auto& names = known_checks();
      if (std::find(names.begin(), names.end(), c.name) == names.end())
        config_fail("checks", "unknown check '" + c.name + "'");
      validate_check(s, c);
      s.checks.push_back(std::move(c));
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_scenario(doc, path.stem().string());
}

void apply_overrides(Scenario& s, const Overrides& o) {
  if (o.seed) {
    s.seed = *o.seed;
    s.quad.seed = *o.seed;
  }
  if (o.grid_max) s.grid = RadiusGrid::geometric_to(*o.grid_max);
  if (o.quad_nodes) {
    if (*o.quad_nodes < 64) throw ConfigError("--quad-nodes: need at least 64 nodes");
    s.quad.nodes = *o.quad_nodes;
  }
}

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass:
      return "pass";
    case CheckStatus::Fail:
      return "fail";
    case CheckStatus::Error:
      return "error";
    case CheckStatus::NumericFailure:
      return "numeric-failure";
  }
  return "fail";
}

ScenarioResult run_scenario(const Scenario& s, std::size_t threads) {
  threads = std::max<std::size_t>(1, threads);
  ScenarioResult result;
  try {
    result.profile = profile(s.map, s.hyperplanes, s.grid, s.truncations, ProfileOptions{s.quad, s.lines, threads});
  } catch (const IdenticallyZeroComposition& e) {
    throw ConfigError("hyperplane H" + std::to_string(e.index() + 1) + " contains the image of the map");
  } catch (const ConfigError&) {
    throw;
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("profile: ") + e.what());
  }
  const auto violations = validate_profile(result.profile);
  if (!violations.empty()) {
    std::string msg = "profile failed validation:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw NumericError(msg);
  }

  std::vector<std::vector<CheckOutcome>> slots(s.checks.size());
  if (s.checks.size() >= threads) {
    parallel_for(s.checks.size(), threads, [&](std::size_t k) { slots[k] = run_check(s, s.checks[k], 1); });
  } else {
    for (std::size_t k = 0; k < s.checks.size(); ++k) slots[k] = run_check(s, s.checks[k], threads);
  }
  bool failed = false, numeric = false;
  for (auto& slot : slots)
    for (auto& o : slot) {
      failed |= o.status != CheckStatus::Pass;
      numeric |= o.status == CheckStatus::NumericFailure;
      result.checks.push_back(std::move(o));
    }
  result.exit_code = numeric ? 3 : failed ? 1 : 0;
  return result;
}

void write_profile_csv(std::ostream& out, const FunctionalProfile& prof) {
  const bool estimated = prof.p >= 2;
  out << "r,T";
  for (std::size_t i = 0; i < prof.hyperplanes.size(); ++i) {
    const std::string h = "_H" + std::to_string(i + 1);
    out << ",m" << h;
    for (Truncation t : prof.truncations) out << ",N[" << truncation_name(t) << "]" << h;
    if (estimated)
      for (Truncation t : prof.truncations) out << ",se[" << truncation_name(t) << "]" << h;
  }
  out << "\n";
  for (std::size_t k = 0; k < prof.radii.size(); ++k) {
    out << fmt17(prof.radii[k]) << "," << fmt17(prof.order[k]);
    for (const auto& hp : prof.hyperplanes) {
      out << "," << fmt17(hp.proximity[k]);
      for (std::size_t t = 0; t < prof.truncations.size(); ++t) out << "," << fmt17(hp.counting[t][k]);
      if (estimated)
        for (std::size_t t = 0; t < prof.truncations.size(); ++t) out << "," << fmt17(hp.counting_error[t][k]);
    }
    out << "\n";
  }
}

json report_json(const Scenario& s, const ScenarioResult& result) {
  json doc;
  doc["scenario"] = s.name;
  doc["description"] = s.description;
  doc["p"] = s.p;
  doc["n"] = s.n;
  doc["q"] = s.hyperplanes.q();
  doc["map"] = s.map.to_string();
  json rows = json::array();
  for (const auto& h : s.hyperplanes.rows()) {
    json row = json::array();
    for (const auto& c : h) row.push_back(c.to_string());
    rows.push_back(row);
  }
  doc["hyperplanes"] = rows;
  doc["seed"] = s.seed;
  doc["quadrature"] = {{"scheme", to_string(s.quad.scheme)}, {"nodes", s.quad.nodes}, {"seed", s.quad.seed}};
  doc["grid"] = numbers(s.grid.radii());
  json truncs = json::array();
  for (Truncation t : result.profile.truncations) truncs.push_back(truncation_name(t));
  doc["truncations"] = truncs;
  doc["kappa"] = kappa(s.p, s.n);

  json checks = json::array();
  for (const auto& o : result.checks) {
    json c;
    c["check"] = o.name;
    c["label"] = o.label;
    c["status"] = to_string(o.status);
    if (!o.error.empty()) c["error"] = o.error;
    if (o.report) {
      const auto& r = *o.report;
      c["theorem"] = r.theorem;
      c["passed"] = r.passed;
      c["verdict"] = r.verdict;
      if (!r.radii.empty()) {
        c["radii"] = numbers(r.radii);
        c["margins"] = numbers(r.margins);
      }
      c["violation_radii"] = numbers(r.violation_radii);
      if (r.fit)
        c["fit"] = {{"c_log_t", number(r.fit->c_log_t)},
                    {"c_log_r", number(r.fit->c_log_r)},
                    {"residual", number(r.fit->residual)}};
      json metrics = json::object();
      for (const auto& [k, v] : r.metrics) metrics[k] = number(v);
      c["metrics"] = metrics;
      c["facts"] = r.facts;
    }
    checks.push_back(c);
  }
  doc["checks"] = checks;
  doc["passed"] = result.exit_code == 0;
  doc["exit_code"] = result.exit_code;
  return doc;
}

void write_report_text(std::ostream& out, const Scenario& s, const ScenarioResult& result) {
  out << "scenario: " << s.name << "\n";
  if (!s.description.empty()) out << "description: " << s.description << "\n";
  out << "map: " << s.map.to_string() << "  (p = " << s.p << ", n = " << s.n << ", q = " << s.hyperplanes.q()
      << ", kappa = " << kappa(s.p, s.n) << ")\n";
  out << "grid: " << s.grid.size() << " radii from " << short_number(s.grid.radii().front()) << " to "
      << short_number(s.grid.back()) << "\n";
  out << "quadrature: " << to_string(s.quad.scheme) << ", " << s.quad.nodes << " nodes, seed " << s.quad.seed
      << "\n\n";
  for (const auto& o : result.checks) {
    std::string tag = to_string(o.status);
    std::transform(tag.begin(), tag.end(), tag.begin(), ::toupper);
    out << "[" << tag << "] " << o.label << "\n";
    if (!o.error.empty()) out << "  " << o.error << "\n";
    if (!o.report) continue;
    const auto& r = *o.report;
    out << "  verdict: " << r.verdict << "\n";
    if (r.fit)
      out << "  error-term fit: " << short_number(r.fit->c_log_t) << " log T + " << short_number(r.fit->c_log_r)
          << " log r (residual " << short_number(r.fit->residual) << ")\n";
    if (!r.violation_radii.empty()) {
      out << "  violation radii:";
      for (double v : r.violation_radii) out << " " << short_number(v);
      out << "\n";
    }
    if (!r.radii.empty()) {
      out << "  margins:";
      for (std::size_t k = 0; k < r.radii.size(); ++k)
        out << (k % 4 == 0 ? "\n    " : "  ") << "r=" << short_number(r.radii[k]) << ": " << short_number(r.margins[k]);
      out << "\n";
    }
    for (const auto& [k, v] : r.metrics) out << "  " << k << " = " << short_number(v) << "\n";
    for (const auto& [k, v] : r.facts) out << "  " << k << ": " << v << "\n";
  }
  out << "\noverall: " << (result.exit_code == 0 ? "PASS" : "FAIL") << " (exit " << result.exit_code << ")\n";
}

std::vector<CatalogEntry> catalog(const std::filesystem::path& dir) {
  std::vector<CatalogEntry> out;
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    const json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) continue;
    CatalogEntry c;
    c.path = entry.path();
    c.name = doc.value("name", entry.path().stem().string());
    c.description = doc.value("description", std::string());
    if (doc.contains("checks"))
      for (const auto& chk : doc["checks"]) {
        if (chk.is_string())
          c.checks.push_back(chk.get<std::string>());
        else if (chk.is_object() && chk.contains("check"))
          c.checks.push_back(chk["check"].get<std::string>());
      }
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

std::filesystem::path scenario_dir() {
  if (const char* env = std::getenv("NEVAN_SCENARIO_DIR"); env && *env) return env;
  return NEVAN_SCENARIO_DIR;
}

std::filesystem::path resolve_config(const std::string& arg) {
  const std::filesystem::path direct(arg);
  if (std::filesystem::exists(direct)) return direct;
  for (const auto& candidate : {scenario_dir() / arg, scenario_dir() / (arg + ".json")})
    if (std::filesystem::exists(candidate)) return candidate;
  throw ConfigError("no such config or bundled scenario: " + arg);
}

namespace {

int run_one(const std::filesystem::path& path, const std::filesystem::path& out_dir, const Overrides& overrides,
            bool json_stdout, std::ostream& out, std::ostream& err) {
  try {
    Scenario s = load_scenario(path);
    apply_overrides(s, overrides);
    const ScenarioResult result = run_scenario(s, overrides.threads);
    std::filesystem::create_directories(out_dir);
    const json doc = report_json(s, result);
    {
      std::ofstream csv(out_dir / "profile.csv");
      write_profile_csv(csv, result.profile);
      std::ofstream txt(out_dir / "report.txt");
      write_report_text(txt, s, result);
      std::ofstream js(out_dir / "report.json");
      js << doc.dump(2) << "\n";
      if (!csv || !txt || !js) throw ConfigError("cannot write outputs to " + out_dir.string());
    }
    if (json_stdout) {
      out << doc.dump(2) << "\n";
    } else {
      for (const auto& o : result.checks) {
        out << s.name << ": " << to_string(o.status) << " " << o.label;
        if (o.report) out << " - " << o.report->verdict;
        out << "\n";
      }
      out << s.name << ": " << (result.exit_code == 0 ? "PASS" : "FAIL") << " -> " << out_dir.string() << "\n";
    }
    for (const auto& o : result.checks)
      if (o.status != CheckStatus::Pass)
        err << s.name << ": check " << o.label << " " << to_string(o.status)
            << (o.error.empty() ? "" : ": " + o.error) << "\n";
    return result.exit_code;
  } catch (const ConfigError& e) {
    err << "config error (" << path.string() << "): " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "numeric failure (" << path.string() << "): " << e.what() << "\n";
    return 3;
  } catch (const PreconditionError& e) {
    err << "config error (" << path.string() << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error (" << path.string() << "): " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nevanlinna theory verification harness for polynomial maps C^p -> P^n"};
  std::string config, out_dir = "nevan_out";
  Overrides overrides;
  std::uint64_t seed = 0;
  double grid_max = 0;
  std::size_t quad_nodes = 0;
  bool list = false, json_out = false;
  app.add_option("--config", config, "scenario file, directory of scenarios, or bundled scenario name");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--threads", overrides.threads, "worker threads (0 = hardware concurrency)")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "override the scenario seed");
  auto* grid_opt = app.add_option("--grid-max", grid_max, "replace the grid by quarter-decade radii 10..R");
  auto* nodes_opt = app.add_option("--quad-nodes", quad_nodes, "quadrature nodes per sphere");
  app.add_flag("--list", list, "list bundled scenarios");
  app.add_flag("--json", json_out, "machine-readable output on stdout");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }
  if (*seed_opt) overrides.seed = seed;
  if (*grid_opt) overrides.grid_max = grid_max;
  if (*nodes_opt) overrides.quad_nodes = quad_nodes;
  if (overrides.threads == 0) overrides.threads = std::max(1u, std::thread::hardware_concurrency());

  if (list) {
    const auto entries = catalog(scenario_dir());
    if (json_out) {
      json a = json::array();
      for (const auto& c : entries)
        a.push_back({{"name", c.name}, {"description", c.description}, {"checks", c.checks},
                     {"path", c.path.string()}});
      out << a.dump(2) << "\n";
    } else {
      for (const auto& c : entries) {
        std::string checks;
        for (const auto& k : c.checks) checks += (checks.empty() ? "" : ",") + k;
        out << c.name << "  " << c.description << "  [" << checks << "]\n";
      }
    }
    return 0;
  }
  if (config.empty()) {
    err << "nothing to do: pass --config or --list (see --help)\n";
    return 2;
  }

  std::filesystem::path path;
  try {
    path = resolve_config(config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }
  if (!std::filesystem::is_directory(path)) return run_one(path, out_dir, overrides, json_out, out, err);

  // A directory runs every scenario in it, each into its own output folder.
  const auto entries = catalog(path);
  if (entries.empty()) {
    err << "config error: no scenarios in " << path.string() << "\n";
    return 2;
  }
  bool config_error = false, numeric = false, failed = false;
  for (const auto& c : entries) {
    const int code = run_one(c.path, std::filesystem::path(out_dir) / c.path.stem(), overrides, json_out, out, err);
    config_error |= code == 2;
    numeric |= code == 3;
    failed |= code == 1;
  }
  return config_error ? 2 : numeric ? 3 : failed ? 1 : 0;
}

}  // namespace nevan::cli
