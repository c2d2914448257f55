#pragma once

// Symbolic observability check for SEIR with only I observed: the ideal of the
// dynamics prolonged to third derivatives, its reduced lex Groebner basis over
// Q(b, e, g), and the recovery polynomials for the hidden compartments.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "aopinn/algebra/groebner.hpp"
#include "aopinn/algebra/parser.hpp"
#include "aopinn/algebra/ratfun.hpp"
#include "aopinn/rng.hpp"

namespace aopinn {

using algebra::Rational;
using SeirPoly = algebra::Polynomial<algebra::RationalFunction>;

/// Variables in lex order (most significant first) and the parameters b, e, g.
inline const algebra::RingNames& seir_ring() {
  static const algebra::RingNames names{
      {"d3I", "d3E", "d3S", "d2I", "d2E", "d2S", "d1I", "d1E", "d1S", "I", "E", "S", "d3Y", "d2Y", "d1Y", "Y"},
      {"b", "e", "g"}};
  return names;
}

inline std::size_t seir_var(const std::string& name) {
  const auto& v = seir_ring().variables;
  const auto it = std::find(v.begin(), v.end(), name);
  if (it == v.end()) throw ValidationError("unknown SEIR ring variable '" + name + "'");
  return static_cast<std::size_t>(it - v.begin());
}

inline SeirPoly parse_seir(const std::string& text) {
  return algebra::parse_polynomial<algebra::RationalFunction>(text, seir_ring());
}

/// The dynamics and their first two time derivatives (9 generators) plus the
/// output identifications Y = I up to the third derivative (4 generators).
inline std::vector<SeirPoly> build_seir_ideal() {
  static const char* const text[] = {
      "d1S + S*I*b",
      "d2S + S*d1I*b + I*d1S*b",
      "d3S + S*d2I*b + I*d2S*b + 2*d1S*d1I*b",
      "d1E + E*e - S*I*b",
      "d2E + d1E*e - S*d1I*b - I*d1S*b",
      "d3E + d2E*e - S*d2I*b - I*d2S*b - 2*d1S*d1I*b",
      "d1I - E*e + I*g",
      "d2I - d1E*e + d1I*g",
      "d3I - d2E*e + d2I*g",
      "Y - I",
      "d1Y - d1I",
      "d2Y - d2I",
      "d3Y - d3I",
  };
  std::vector<SeirPoly> out;
  for (const char* t : text) out.push_back(parse_seir(t));
  return out;
}

/// A coefficient-denominator-free multiple of p: polynomial coefficients in
/// (b, e, g) with integer rational parts, no common factor, leading sign positive.
inline std::vector<std::pair<algebra::Monomial, algebra::QPoly>> clear_denominators(const SeirPoly& p) {
  using algebra::QPoly;
  namespace mp = boost::multiprecision;
  std::vector<std::pair<algebra::Monomial, algebra::QPoly>> out;
  if (p.is_zero()) return out;
  QPoly l = QPoly::constant(0, 1);
  for (const auto& [m, c] : p.terms())
    l = algebra::detail::exact_div(l * c.denominator(), algebra::gcd(l, c.denominator()));
  QPoly content;
  for (const auto& [m, c] : p.terms()) {
    out.emplace_back(m, c.numerator() * algebra::detail::exact_div(l, c.denominator()));
    content = algebra::gcd(content, out.back().second);
  }
  mp::cpp_int den = 1;
  mp::cpp_int num = 0;
  for (auto& [m, c] : out) {
    c = algebra::detail::exact_div(c, content);
    for (const auto& [pm, q] : c.terms()) {
      den = mp::lcm(den, mp::denominator(q));
      num = mp::gcd(num, mp::numerator(q));
    }
  }
  Rational scale(den, num);
  if (out.front().second.leading_coefficient() < 0) scale = -scale;
  for (auto& [m, c] : out) c = c.scaled(scale);
  return out;
}

/// Singular-style text, e.g. `(e)*E-d1Y+(-g)*Y`.
inline std::string format_singular(const SeirPoly& p) {
  const auto& names = seir_ring();
  const auto terms = clear_denominators(p);
  if (terms.empty()) return "0";
  std::string out;
  for (const auto& [m, c] : terms) {
    const std::string mono = algebra::format_monomial(m, names.variables);
    if (c.is_constant()) {
      const Rational k = c.constant_term();
      const Rational mag = abs(k);
      if (k < 0) out += '-';
      else if (!out.empty()) out += '+';
      if (mono.empty()) out += algebra::format_rational(mag);
      else if (mag == 1) out += mono;
      else out += algebra::format_rational(mag) + '*' + mono;
    } else {
      if (!out.empty()) out += '+';
      out += '(' + algebra::format_polynomial(c, names.parameters) + ')';
      if (!mono.empty()) out += '*' + mono;
    }
  }
  return out;
}

enum class ObservabilityStatus { observed, found, not_found };

struct ObservabilityCheck {
  ObservabilityStatus status = ObservabilityStatus::not_found;
  std::optional<SeirPoly> relation;
};

namespace detail {

/// Highest derivative order of Y occurring in p, or -1.
inline int output_order(const SeirPoly& p) {
  int order = -1;
  for (std::size_t v : p.support()) {
    const std::string& n = seir_ring().variables[v];
    if (n == "Y") order = std::max(order, 0);
    else if (n.size() == 3 && n[0] == 'd' && n[2] == 'Y') order = std::max(order, n[1] - '0');
  }
  return order;
}

inline bool is_output(const std::string& name) {
  return name == "Y" || name == "d1Y" || name == "d2Y" || name == "d3Y";
}

}  // namespace detail

/// A basis element involving only `var` (linearly) and Y and its derivatives.
/// Among several, the one with the lowest derivative order of Y wins, then
/// the one with the fewest terms.
inline ObservabilityCheck check_observable(const std::string& var, const std::vector<SeirPoly>& basis) {
  const std::size_t v = seir_var(var);
  if (detail::is_output(var)) return {ObservabilityStatus::observed, std::nullopt};
  ObservabilityCheck best;
  for (const auto& p : basis) {
    if (p.degree_in(v) != 1) continue;
    bool allowed = true;
    for (std::size_t u : p.support())
      allowed = allowed && (u == v || detail::is_output(seir_ring().variables[u]));
    if (!allowed) continue;
    if (best.relation) {
      const int a = detail::output_order(p);
      const int b = detail::output_order(*best.relation);
      if (a > b || (a == b && p.size() >= best.relation->size())) continue;
    }
    best = {ObservabilityStatus::found, p};
  }
  return best;
}

/// Exact point satisfying the SEIR dynamics: random positive b, e, g, S, E, I
/// and every derivative obtained by differentiating the right-hand side.
struct SeirAssignment {
  std::vector<Rational> params;     // b, e, g
  std::vector<Rational> variables;  // ring order
};

inline SeirAssignment seir_consistent_assignment(std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed);
  std::uint64_t k = index * 12;
  auto draw = [&] {
    const auto n = static_cast<long long>(rng.at(k++) % 999 + 1);
    const auto d = static_cast<long long>(rng.at(k++) % 999 + 1);
    return Rational(n, d);
  };
  const Rational b = draw(), e = draw(), g = draw();
  const Rational s = draw(), ex = draw(), i = draw();
  const Rational s1 = -b * s * i;
  const Rational e1 = b * s * i - e * ex;
  const Rational i1 = e * ex - g * i;
  const Rational s2 = -b * (s1 * i + s * i1);
  const Rational e2 = b * (s1 * i + s * i1) - e * e1;
  const Rational i2 = e * e1 - g * i1;
  const Rational s3 = -b * (s2 * i + 2 * s1 * i1 + s * i2);
  const Rational e3 = b * (s2 * i + 2 * s1 * i1 + s * i2) - e * e2;
  const Rational i3 = e * e2 - g * i2;
  SeirAssignment a;
  a.params = {b, e, g};
  a.variables = {i3, e3, s3, i2, e2, s2, i1, e1, s1, i, ex, s, i3, i2, i1, i};
  return a;
}

inline Rational evaluate(const SeirPoly& p, const SeirAssignment& a) {
  Rational sum = 0;
  for (const auto& [m, c] : p.terms()) {
    Rational t = c.evaluate(a.params);
    for (std::size_t v = 0; v < m.size(); ++v)
      for (int k = 0; k < m[v]; ++k) t *= a.variables[v];
    sum += t;
  }
  return sum;
}

/// True if every polynomial is exactly zero at `count` consistent points.
inline bool vanishes_on_samples(const std::vector<SeirPoly>& polys, std::size_t count, std::uint64_t seed) {
  for (std::size_t k = 0; k < count; ++k) {
    const auto a = seir_consistent_assignment(seed, k);
    for (const auto& p : polys)
      if (evaluate(p, a) != 0) return false;
  }
  return true;
}

struct ObservabilityOptions {
  algebra::GroebnerOptions groebner;
  std::size_t samples = 100;
  std::uint64_t sample_seed = 0;
};

struct ObservabilityReport {
  std::vector<SeirPoly> generators;
  std::vector<SeirPoly> basis;
  algebra::GroebnerStats stats;
  ObservabilityCheck e_check, s_check, i_check;
  bool e_matches = false;  // proportional to e*E - d1Y - g*Y
  bool s_matches = false;  // proportional to b*e*Y*S - d2Y - (e+g)*d1Y - e*g*Y
  bool reduced = false;
  bool generators_reduce_to_zero = false;
  std::size_t samples = 0;
  bool basis_vanishes = false;
  bool relations_vanish = false;

  [[nodiscard]] bool ok() const {
    return e_matches && s_matches && reduced && generators_reduce_to_zero && basis_vanishes && relations_vanish;
  }
};

inline SeirPoly expected_e_relation() { return parse_seir("e*E - d1Y - g*Y"); }
inline SeirPoly expected_s_relation() { return parse_seir("b*e*Y*S - d2Y - (e+g)*d1Y - e*g*Y"); }

inline ObservabilityReport run_observability(const ObservabilityOptions& opt = {}) {
  ObservabilityReport r;
  r.generators = build_seir_ideal();
  r.basis = algebra::buchberger(r.generators, opt.groebner, &r.stats);
  r.reduced = algebra::is_reduced_basis(r.basis);
  r.generators_reduce_to_zero = true;
  for (const auto& g : r.generators)
    r.generators_reduce_to_zero = r.generators_reduce_to_zero && algebra::normal_form(g, r.basis).is_zero();
  r.e_check = check_observable("E", r.basis);
  r.s_check = check_observable("S", r.basis);
  r.i_check = check_observable("I", r.basis);
  r.e_matches = r.e_check.relation && algebra::make_monic(*r.e_check.relation) == algebra::make_monic(expected_e_relation());
  r.s_matches = r.s_check.relation && algebra::make_monic(*r.s_check.relation) == algebra::make_monic(expected_s_relation());
  r.samples = opt.samples;
  r.basis_vanishes = vanishes_on_samples(r.basis, opt.samples, opt.sample_seed);
  std::vector<SeirPoly> rel;
  if (r.e_check.relation) rel.push_back(*r.e_check.relation);
  if (r.s_check.relation) rel.push_back(*r.s_check.relation);
  r.relations_vanish = rel.size() == 2 && vanishes_on_samples(rel, opt.samples, opt.sample_seed);
  return r;
}

inline void write_observability_report(std::ostream& os, const ObservabilityReport& r) {
  const auto& names = seir_ring();
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
    return s;
  };
  auto status = [](const ObservabilityCheck& c) {
    switch (c.status) {
      case ObservabilityStatus::observed: return std::string("observed");
      case ObservabilityStatus::found: return "found " + format_singular(*c.relation);
      case ObservabilityStatus::not_found: break;
    }
    return std::string("not found");
  };
  auto yes = [](bool b) { return b ? "yes" : "no"; };
  os << "ring (0," << join(names.parameters) << "),(" << join(names.variables) << "),lp\n";
  os << "generators " << r.generators.size() << '\n';
  for (std::size_t k = 0; k < r.generators.size(); ++k)
    os << "J[" << k + 1 << "]=" << format_singular(r.generators[k]) << '\n';
  os << "basis " << r.basis.size() << " (pairs " << r.stats.pairs_taken << ", coprime " << r.stats.coprime_skipped
     << ", chain " << r.stats.chain_skipped << ", zero " << r.stats.zero_reductions << ")\n";
  for (std::size_t k = 0; k < r.basis.size(); ++k)
    os << "G[" << k + 1 << "]=" << format_singular(r.basis[k]) << '\n';
  os << "reduced " << yes(r.reduced) << '\n';
  os << "generators reduce to zero " << yes(r.generators_reduce_to_zero) << '\n';
  os << "E: " << status(r.e_check) << '\n';
  os << "S: " << status(r.s_check) << '\n';
  os << "I: " << status(r.i_check) << '\n';
  os << "E relation matches e*E-d1Y-g*Y " << yes(r.e_matches) << '\n';
  os << "S relation matches b*e*Y*S-d2Y-(e+g)*d1Y-e*g*Y " << yes(r.s_matches) << '\n';
  os << "basis vanishes on " << r.samples << " samples " << yes(r.basis_vanishes) << '\n';
  os << "relations vanish on " << r.samples << " samples " << yes(r.relations_vanish) << '\n';
  os << "result " << (r.ok() ? "ok" : "mismatch") << '\n';
}

}  // namespace aopinn
