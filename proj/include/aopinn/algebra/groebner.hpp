#pragma once

// Buchberger's algorithm for reduced lex Groebner bases.

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "aopinn/algebra/polynomial.hpp"

namespace aopinn::algebra {

struct GroebnerOptions {
  /// S-pairs that may be taken from the queue before giving up.
  std::size_t max_pairs = 100000;
};

struct GroebnerStats {
  std::size_t pairs_taken = 0;
  std::size_t coprime_skipped = 0;
  std::size_t chain_skipped = 0;
  std::size_t zero_reductions = 0;
  std::size_t basis_added = 0;
};

template <class K>
Polynomial<K> s_polynomial(const Polynomial<K>& f, const Polynomial<K>& g) {
  const Monomial l = monomial_lcm(f.leading_monomial(), g.leading_monomial());
  const K one = FieldTraits<K>::one();
  Polynomial<K> a = f.mul_term(monomial_div(l, f.leading_monomial()), one / f.leading_coefficient());
  a.sub_scaled(one / g.leading_coefficient(), monomial_div(l, g.leading_monomial()), g);
  return a;
}

/// Reduced Groebner basis of the ideal generated by `gens`, sorted by
/// descending leading monomial, every element monic.
template <class K>
std::vector<Polynomial<K>> buchberger(const std::vector<Polynomial<K>>& gens, const GroebnerOptions& opt = {},
                                      GroebnerStats* stats = nullptr) {
  GroebnerStats st;
  std::vector<Polynomial<K>> g;
  for (const auto& p : gens)
    if (!p.is_zero()) g.push_back(make_monic(p));

  using Pair = std::pair<std::size_t, std::size_t>;
  std::set<Pair> pending;
  for (std::size_t j = 1; j < g.size(); ++j)
    for (std::size_t i = 0; i < j; ++i) pending.insert({i, j});

  auto is_pending = [&](std::size_t a, std::size_t b) { return pending.count({std::min(a, b), std::max(a, b)}) > 0; };

  while (!pending.empty()) {
    // Normal strategy: smallest lcm of leading monomials first.
    auto pick = pending.begin();
    Monomial pick_lcm = monomial_lcm(g[pick->first].leading_monomial(), g[pick->second].leading_monomial());
    for (auto it = std::next(pending.begin()); it != pending.end(); ++it) {
      Monomial l = monomial_lcm(g[it->first].leading_monomial(), g[it->second].leading_monomial());
      if (l < pick_lcm) {
        pick = it;
        pick_lcm = std::move(l);
      }
    }
    const auto [i, j] = *pick;
    pending.erase(pick);
    if (++st.pairs_taken > opt.max_pairs)
      throw CappedComputation("buchberger: S-pair budget of " + std::to_string(opt.max_pairs) + " exhausted");

    if (coprime(g[i].leading_monomial(), g[j].leading_monomial())) {
      ++st.coprime_skipped;
      continue;
    }
    bool chain = false;
    for (std::size_t k = 0; k < g.size() && !chain; ++k)
      chain = k != i && k != j && divides(g[k].leading_monomial(), pick_lcm) && !is_pending(i, k) &&
              !is_pending(j, k);
    if (chain) {
      ++st.chain_skipped;
      continue;
    }

    Polynomial<K> h = normal_form(s_polynomial(g[i], g[j]), g);
    if (h.is_zero()) {
      ++st.zero_reductions;
      continue;
    }
    g.push_back(make_monic(h));
    ++st.basis_added;
    for (std::size_t k = 0; k + 1 < g.size(); ++k) pending.insert({k, g.size() - 1});
  }

  // Minimal basis: drop elements whose leading monomial is a multiple of another's.
  std::vector<Polynomial<K>> minimal;
  for (std::size_t k = 0; k < g.size(); ++k) {
    bool redundant = false;
    for (std::size_t l = 0; l < g.size() && !redundant; ++l) {
      if (l == k || !divides(g[l].leading_monomial(), g[k].leading_monomial())) continue;
      redundant = g[l].leading_monomial() != g[k].leading_monomial() || l < k;
    }
    if (!redundant) minimal.push_back(g[k]);
  }

  std::vector<Polynomial<K>> reduced;
  for (std::size_t k = 0; k < minimal.size(); ++k) {
    std::vector<Polynomial<K>> others;
    for (std::size_t l = 0; l < minimal.size(); ++l)
      if (l != k) others.push_back(minimal[l]);
    reduced.push_back(make_monic(normal_form(minimal[k], others)));
  }
  std::sort(reduced.begin(), reduced.end(), [](const Polynomial<K>& a, const Polynomial<K>& b) {
    return a.leading_monomial() > b.leading_monomial();
  });
  if (stats != nullptr) *stats = st;
  return reduced;
}

/// No monomial of any element is divisible by another element's leading
/// monomial, and every element is monic.
template <class K>
bool is_reduced_basis(const std::vector<Polynomial<K>>& basis) {
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (basis[k].is_zero() || !(basis[k].leading_coefficient() == FieldTraits<K>::one())) return false;
    for (std::size_t l = 0; l < basis.size(); ++l) {
      if (l == k) continue;
      for (const auto& [m, c] : basis[k].terms())
        if (divides(basis[l].leading_monomial(), m)) return false;
    }
  }
  return true;
}

/// Buchberger's criterion: every S-polynomial reduces to zero.
template <class K>
bool is_groebner_basis(const std::vector<Polynomial<K>>& basis) {
  for (std::size_t j = 1; j < basis.size(); ++j)
    for (std::size_t i = 0; i < j; ++i)
      if (!normal_form(s_polynomial(basis[i], basis[j]), basis).is_zero()) return false;
  return true;
}

}  // namespace aopinn::algebra
