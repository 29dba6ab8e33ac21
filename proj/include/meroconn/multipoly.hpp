#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gaussian_rational.hpp"

namespace meroconn {

using Exponents = std::vector<std::uint32_t>;

// Multivariate polynomial over Q(i), stored sparsely in canonical form:
// no zero coefficients are kept, so structural equality is mathematical
// equality.  The term order induced by the map keys is lexicographic with
// the first variable heaviest.
class MultiPoly {
  public:
    MultiPoly() = default;
    explicit MultiPoly(std::size_t nvars) : nvars_(nvars) {}

    static MultiPoly constant(std::size_t nvars, GaussianRational c) {
        MultiPoly p(nvars);
        if (!c.is_zero()) p.terms_[Exponents(nvars, 0)] = std::move(c);
        return p;
    }
    static MultiPoly variable(std::size_t nvars, std::size_t index, std::uint32_t power = 1) {
        MultiPoly p(nvars);
        Exponents e(nvars, 0);
        e[index] = power;
        p.terms_[std::move(e)] = GaussianRational(1);
        return p;
    }

    std::size_t nvars() const { return nvars_; }
    const std::map<Exponents, GaussianRational>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        if (terms_.empty()) return true;
        return terms_.size() == 1 && terms_.begin()->first == Exponents(nvars_, 0);
    }
    GaussianRational constant_value() const {
        if (terms_.empty()) return GaussianRational(0);
        return terms_.begin()->second;
    }

    void add_term(const Exponents& e, const GaussianRational& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(e, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    MultiPoly operator-() const {
        MultiPoly r(nvars_);
        for (const auto& [e, c] : terms_) r.terms_[e] = -c;
        return r;
    }
    MultiPoly& operator+=(const MultiPoly& o) {
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    MultiPoly& operator-=(const MultiPoly& o) {
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }

    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
        MultiPoly r(a.nvars_);
        Exponents e(a.nvars_, 0);
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                for (std::size_t k = 0; k < a.nvars_; ++k) e[k] = ea[k] + eb[k];
                r.add_term(e, ca * cb);
            }
        }
        return r;
    }
    MultiPoly& operator*=(const MultiPoly& o) { return *this = *this * o; }

    MultiPoly scaled(const GaussianRational& c) const {
        MultiPoly r(nvars_);
        if (c.is_zero()) return r;
        for (const auto& [e, coeff] : terms_) r.terms_[e] = coeff * c;
        return r;
    }

    friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const MultiPoly& a, const MultiPoly& b) { return !(a == b); }

    std::uint32_t degree_in(std::size_t var) const {
        std::uint32_t d = 0;
        for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
        return d;
    }
    std::uint32_t total_degree() const {
        std::uint32_t d = 0;
        for (const auto& [e, c] : terms_) {
            std::uint32_t s = 0;
            for (auto x : e) s += x;
            d = std::max(d, s);
        }
        return d;
    }

    // Coefficient of var^power, as a polynomial in the remaining variables
    // (same variable set, exponent of var zeroed).
    MultiPoly coefficient_in(std::size_t var, std::uint32_t power) const {
        MultiPoly r(nvars_);
        for (const auto& [e, c] : terms_) {
            if (e[var] != power) continue;
            Exponents e2 = e;
            e2[var] = 0;
            r.terms_[std::move(e2)] = c;
        }
        return r;
    }

    MultiPoly derivative(std::size_t var) const {
        MultiPoly r(nvars_);
        for (const auto& [e, c] : terms_) {
            if (e[var] == 0) continue;
            Exponents e2 = e;
            e2[var] -= 1;
            r.add_term(e2, c * GaussianRational(static_cast<long>(e[var])));
        }
        return r;
    }

    std::complex<double> eval(const std::vector<std::complex<double>>& z) const {
        std::complex<double> acc = 0.0;
        for (const auto& [e, c] : terms_) {
            std::complex<double> t = c.to_complex();
            for (std::size_t k = 0; k < nvars_; ++k)
                for (std::uint32_t p = 0; p < e[k]; ++p) t *= z[k];
            acc += t;
        }
        return acc;
    }

    GaussianRational eval_exact(const std::vector<GaussianRational>& z) const {
        GaussianRational acc(0);
        for (const auto& [e, c] : terms_) {
            GaussianRational t = c;
            for (std::size_t k = 0; k < nvars_; ++k)
                for (std::uint32_t p = 0; p < e[k]; ++p) t *= z[k];
            acc += t;
        }
        return acc;
    }

    // Composition with a polynomial map: args[k] substitutes variable k.  All
    // args must share a variable count, which becomes the result's.
    MultiPoly compose(const std::vector<MultiPoly>& args) const {
        std::size_t out_vars = args.empty() ? 0 : args[0].nvars();
        MultiPoly acc(out_vars);
        std::vector<std::vector<MultiPoly>> powers(nvars_);
        for (std::size_t k = 0; k < nvars_; ++k)
            powers[k].push_back(MultiPoly::constant(out_vars, GaussianRational(1)));
        for (const auto& [e, c] : terms_) {
            MultiPoly t = MultiPoly::constant(out_vars, c);
            for (std::size_t k = 0; k < nvars_; ++k) {
                while (powers[k].size() <= e[k]) powers[k].push_back(powers[k].back() * args[k]);
                if (e[k] > 0) t *= powers[k][e[k]];
            }
            acc += t;
        }
        return acc;
    }

    // Exact division: returns true and sets quotient iff divisor divides
    // *this exactly.  Lexicographic leading-term elimination; sound because
    // divisibility forces LT(this) = LT(q) * LT(d) at every step.
    bool try_divide(const MultiPoly& d, MultiPoly& quotient) const {
        if (d.is_zero()) return false;
        MultiPoly r = *this;
        MultiPoly q(nvars_);
        const auto& dl = *d.terms_.rbegin();
        while (!r.is_zero()) {
            const auto& rl = *r.terms_.rbegin();
            Exponents e(nvars_);
            for (std::size_t k = 0; k < nvars_; ++k) {
                if (rl.first[k] < dl.first[k]) return false;
                e[k] = rl.first[k] - dl.first[k];
            }
            GaussianRational c = rl.second / dl.second;
            MultiPoly t(nvars_);
            t.terms_[e] = c;
            q.add_term(e, c);
            r -= t * d;
        }
        quotient = std::move(q);
        return true;
    }

    bool divisible_by(const MultiPoly& d) const {
        MultiPoly q;
        return try_divide(d, q);
    }

    // Largest k with d^k dividing *this; caller guarantees *this != 0.
    int max_division_power(const MultiPoly& d) const {
        int k = 0;
        MultiPoly cur = *this, q;
        while (cur.try_divide(d, q)) {
            cur = q;
            ++k;
        }
        return k;
    }

    // Componentwise minimum exponent over all terms (the monomial content).
    Exponents monomial_content() const {
        Exponents m(nvars_, 0);
        bool first = true;
        for (const auto& [e, c] : terms_) {
            if (first) {
                m = e;
                first = false;
            } else {
                for (std::size_t k = 0; k < nvars_; ++k) m[k] = std::min(m[k], e[k]);
            }
        }
        return m;
    }

    MultiPoly shifted_down(const Exponents& m) const {
        MultiPoly r(nvars_);
        for (const auto& [e, c] : terms_) {
            Exponents e2(nvars_);
            for (std::size_t k = 0; k < nvars_; ++k) e2[k] = e[k] - m[k];
            r.terms_[std::move(e2)] = c;
        }
        return r;
    }

    // The variables that actually occur.
    std::vector<std::size_t> support_vars() const {
        std::vector<bool> used(nvars_, false);
        for (const auto& [e, c] : terms_)
            for (std::size_t k = 0; k < nvars_; ++k)
                if (e[k] > 0) used[k] = true;
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < nvars_; ++k)
            if (used[k]) out.push_back(k);
        return out;
    }

    const GaussianRational& leading_coefficient() const { return terms_.rbegin()->second; }

    std::string str(const std::vector<std::string>& names) const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            if (!first) out += " + ";
            first = false;
            bool has_vars = false;
            for (auto x : it->first)
                if (x) has_vars = true;
            std::string c = it->second.str();
            if (!has_vars || c != "1") {
                if (c.find(' ') != std::string::npos) c = "(" + c + ")";
                out += c;
                if (has_vars) out += "*";
            }
            bool firstv = true;
            for (std::size_t k = 0; k < nvars_; ++k) {
                if (it->first[k] == 0) continue;
                if (!firstv) out += "*";
                firstv = false;
                out += names[k];
                if (it->first[k] > 1) out += "^" + std::to_string(it->first[k]);
            }
        }
        return out;
    }

  private:
    std::size_t nvars_ = 0;
    std::map<Exponents, GaussianRational> terms_;
};

// Euclidean GCD for polynomials supported on a single variable, monic result.
inline MultiPoly univariate_gcd(const MultiPoly& a, const MultiPoly& b, std::size_t var) {
    auto make_monic = [&](const MultiPoly& p) {
        if (p.is_zero()) return p;
        GaussianRational lead;
        std::uint32_t best = 0;
        bool found = false;
        for (const auto& [e, c] : p.terms()) {
            if (!found || e[var] >= best) {
                best = e[var];
                lead = c;
                found = true;
            }
        }
        return p.scaled(GaussianRational(1) / lead);
    };
    MultiPoly x = a, y = b;
    while (!y.is_zero()) {
        // remainder of x by y in the single variable
        std::uint32_t dy = y.degree_in(var);
        GaussianRational ly = y.coefficient_in(var, dy).constant_value();
        MultiPoly r = x;
        while (!r.is_zero() && r.degree_in(var) >= dy) {
            std::uint32_t dr = r.degree_in(var);
            GaussianRational lr = r.coefficient_in(var, dr).constant_value();
            MultiPoly t = MultiPoly::variable(a.nvars(), var, dr - dy).scaled(lr / ly);
            r -= t * y;
            if (!r.is_zero() && r.degree_in(var) == dr) break; // safety: no progress
        }
        x = y;
        y = r;
    }
    return make_monic(x);
}

} // namespace meroconn
