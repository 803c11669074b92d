/*
 * Copyright 2026 The btn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "btn/bitvec.hpp"
#include "btn/errors.hpp"
#include "btn/tensor.hpp"

namespace btn {

using VarIndex = std::uint32_t;

/// Monomial over binary variables: strictly increasing variable indices.
/// The empty monomial is the constant term.
using Monomial = std::vector<VarIndex>;

namespace detail {

/// Shared storage of a multilinear polynomial over {0,1} variables.
/// Zero coefficients are never stored; monomial keys are sorted and unique.
class BinaryPoly {
public:
    explicit BinaryPoly(VarIndex num_vars = 0) : num_vars_(num_vars) {}

    VarIndex num_vars() const { return num_vars_; }

    const std::map<Monomial, double>& terms() const { return terms_; }

    /// Adds c * prod(m). Indices are sorted and deduplicated; a coefficient
    /// that cancels to zero removes the term.
    void add(Monomial m, double c) {
        std::sort(m.begin(), m.end());
        m.erase(std::unique(m.begin(), m.end()), m.end());
        if (!m.empty() && m.back() >= num_vars_)
            throw ValueError("monomial references variable " + std::to_string(m.back()) +
                             " of " + std::to_string(num_vars_));
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            if (c != 0.0) terms_.emplace(std::move(m), c);
        } else {
            it->second += c;
            if (it->second == 0.0) terms_.erase(it);
        }
    }

    double coefficient(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? 0.0 : it->second;
    }

    double constant() const { return coefficient({}); }

    std::size_t degree() const {
        std::size_t d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m.size());
        return d;
    }

    /// True when no term with at least one variable has a nonzero coefficient
    /// (the "empty" problem of the solver layer; a constant may remain).
    bool is_constant() const {
        for (const auto& [m, c] : terms_)
            if (!m.empty()) return false;
        return true;
    }

    std::size_t term_count() const { return terms_.size(); }

    bool operator==(const BinaryPoly& o) const {
        return num_vars_ == o.num_vars_ && terms_ == o.terms_;
    }

protected:
    VarIndex num_vars_;
    std::map<Monomial, double> terms_;
};

inline double evaluate_terms(const std::map<Monomial, double>& terms, const BitVec& x) {
    double e = 0.0;
    for (const auto& [m, c] : terms) {
        bool active = true;
        for (VarIndex v : m)
            if (!x.get(v)) {
                active = false;
                break;
            }
        if (active) e += c;
    }
    return e;
}

inline std::string format_coeff_12sig(double c) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", c);
    return buf;
}

} // namespace detail

/// Higher-order unconstrained binary optimization problem: a multilinear
/// polynomial to be minimized over {0,1}^num_vars.
class Hubo : public detail::BinaryPoly {
public:
    using BinaryPoly::BinaryPoly;
};

/// Degree <= 2 special case. Remembers which auxiliary variable stands for
/// which substituted variable pair, when produced by quadratization.
class Qubo : public detail::BinaryPoly {
public:
    using BinaryPoly::BinaryPoly;

    void add(Monomial m, double c) {
        std::sort(m.begin(), m.end());
        m.erase(std::unique(m.begin(), m.end()), m.end());
        if (m.size() > 2)
            throw ValueError("QUBO term of degree " + std::to_string(m.size()));
        BinaryPoly::add(std::move(m), c);
    }

    /// auxiliary index -> the two variables whose product it represents.
    const std::map<VarIndex, std::pair<VarIndex, VarIndex>>& aux_pairs() const {
        return aux_pairs_;
    }
    void record_aux(VarIndex aux, VarIndex a, VarIndex b) { aux_pairs_[aux] = {a, b}; }

private:
    std::map<VarIndex, std::pair<VarIndex, VarIndex>> aux_pairs_;
};

inline double evaluate(const Hubo& h, const BitVec& x) {
    if (x.size() != h.num_vars())
        throw ShapeError("evaluate: assignment length " + std::to_string(x.size()) +
                         " != num_vars " + std::to_string(h.num_vars()));
    return detail::evaluate_terms(h.terms(), x);
}

inline double evaluate(const Qubo& q, const BitVec& x) {
    if (x.size() != q.num_vars())
        throw ShapeError("evaluate: assignment length " + std::to_string(x.size()) +
                         " != num_vars " + std::to_string(q.num_vars()));
    return detail::evaluate_terms(q.terms(), x);
}

/// Penalty weight heuristic for quadratization: the maximum absolute value of
/// any non-constant coefficient, 1 for the degenerate all-zero polynomial.
inline double default_strength(const Hubo& h) {
    double s = 0.0;
    for (const auto& [m, c] : h.terms())
        if (!m.empty()) s = std::max(s, std::fabs(c));
    return s == 0.0 ? 1.0 : s;
}

/// Builds the Hamming-distance polynomial of one column equation: H(y) equals
/// the Hamming distance between m_col and the Boolean product A*y for every
/// y in {0,1}^rank, expanded as
///   C - sum_{j: m_col[j]=1} f(row_j(A) . y) + sum_{j: m_col[j]=0} f(row_j(A) . y)
/// with f(x_1..x_k) = 1 - prod(1 - x_i). Rows with identical patterns are
/// merged first, which bounds the polynomial by 2^rank terms regardless of
/// the matrix height.
inline Hubo build_column_hubo(const BooleanMatrix& a, const BitVec& m_col) {
    if (m_col.size() != a.rows())
        throw ShapeError("build_column_hubo: column length " + std::to_string(m_col.size()) +
                         " != matrix rows " + std::to_string(a.rows()));
    const std::size_t r = a.cols();
    if (r > 20)
        throw ValueError("build_column_hubo: rank " + std::to_string(r) +
                         " exceeds the dense-expansion limit of 20");

    // weight[pattern] = (#rows with m_col=0) - (#rows with m_col=1)
    std::unordered_map<std::uint64_t, double> weight;
    std::size_t ones = 0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        std::uint64_t pattern = 0;
        for (std::size_t l = 0; l < r; ++l)
            if (a.get(i, l)) pattern |= 1ull << l;
        const bool in_t = m_col.get(i);
        if (in_t) ++ones;
        if (pattern == 0) continue; // all-zero row: f == 0
        weight[pattern] += in_t ? -1.0 : 1.0;
    }

    // f_p(y) = sum over nonempty subsets S of p of (-1)^(|S|+1) * y_S
    std::unordered_map<std::uint64_t, double> coeff;
    for (const auto& [pattern, w] : weight) {
        if (w == 0.0) continue;
        for (std::uint64_t s = pattern; s; s = (s - 1) & pattern) {
            const int parity = std::popcount(s) & 1 ? +1 : -1;
            coeff[s] += w * parity;
        }
    }

    Hubo h(static_cast<VarIndex>(r));
    if (ones > 0) h.add({}, static_cast<double>(ones));
    for (const auto& [mask, c] : coeff) {
        if (c == 0.0) continue;
        Monomial m;
        for (std::size_t l = 0; l < r; ++l)
            if (mask & (1ull << l)) m.push_back(static_cast<VarIndex>(l));
        h.add(std::move(m), c);
    }
    return h;
}

/// Reduces a HUBO to a QUBO by repeated pairwise substitution: the variable
/// pair occurring in the most monomials of degree >= 3 is replaced by one
/// auxiliary variable u (ties to the lexicographically smallest pair), and
/// the penalty strength*(x_a x_b - 2 x_a u - 2 x_b u + 3 u) enforces
/// u = x_a x_b at any minimizer. Each pair gets a single auxiliary, reused
/// across all monomials that contain it.
inline Qubo hubo_to_qubo(const Hubo& h, double strength) {
    if (strength <= 0.0) throw ValueError("hubo_to_qubo: strength must be positive");

    std::map<Monomial, double> work(h.terms());
    VarIndex next_var = h.num_vars();
    std::vector<std::tuple<VarIndex, VarIndex, VarIndex>> penalties; // (a, b, u)

    for (;;) {
        using Pair = std::pair<VarIndex, VarIndex>;
        std::map<Pair, std::size_t> freq;
        for (const auto& [m, c] : work) {
            if (m.size() < 3) continue;
            for (std::size_t i = 0; i < m.size(); ++i)
                for (std::size_t j = i + 1; j < m.size(); ++j) freq[{m[i], m[j]}]++;
        }
        if (freq.empty()) break;

        Pair best = freq.begin()->first;
        std::size_t best_count = freq.begin()->second;
        for (const auto& [p, n] : freq)
            if (n > best_count) {
                best = p;
                best_count = n;
            }

        const VarIndex u = next_var++;
        penalties.emplace_back(best.first, best.second, u);

        std::map<Monomial, double> next;
        for (auto& [m, c] : work) {
            if (m.size() >= 3 && std::binary_search(m.begin(), m.end(), best.first) &&
                std::binary_search(m.begin(), m.end(), best.second)) {
                Monomial sub;
                sub.reserve(m.size() - 1);
                for (VarIndex v : m)
                    if (v != best.first && v != best.second) sub.push_back(v);
                sub.push_back(u); // u has the largest index so far, order kept
                auto [it, inserted] = next.emplace(std::move(sub), c);
                if (!inserted && (it->second += c) == 0.0) next.erase(it);
            } else {
                auto [it, inserted] = next.emplace(m, c);
                if (!inserted && (it->second += c) == 0.0) next.erase(it);
            }
        }
        work = std::move(next);
    }

    Qubo q(next_var);
    for (const auto& [m, c] : work) q.add(m, c);
    for (const auto& [a, b, u] : penalties) {
        q.record_aux(u, a, b);
        q.add({a, b}, strength);
        q.add({a, u}, -2.0 * strength);
        q.add({b, u}, -2.0 * strength);
        q.add({u}, 3.0 * strength);
    }
    return q;
}

/// Canonical JSON text {"n":N,"terms":[[[i,...],c],...]} with terms in
/// lexicographic monomial order and coefficients printed with 12 significant
/// digits. Stable against floating-point construction-order noise, so it
/// doubles as the memoization key of the solver cache.
template <typename Poly>
inline std::string canonical_json(const Poly& p) {
    std::string out = "{\"n\":" + std::to_string(p.num_vars()) + ",\"terms\":[";
    bool first = true;
    for (const auto& [m, c] : p.terms()) {
        if (!first) out += ',';
        first = false;
        out += "[[";
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(m[i]);
        }
        out += "],";
        out += detail::format_coeff_12sig(c);
        out += ']';
    }
    out += "]}";
    return out;
}

} // namespace btn
