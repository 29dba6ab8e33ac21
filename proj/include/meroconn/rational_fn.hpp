#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chart.hpp"
#include "errors.hpp"
#include "multipoly.hpp"

namespace meroconn {

// Exact rational function over Q(i).  Kept in a reduced form strong enough
// for the divisor bookkeeping done here: monomial content is cancelled,
// denominators are normalized to leading coefficient one, and a univariate
// GCD is applied when numerator and denominator share a single variable.
// Full multivariate GCD is deliberately not attempted; declared divisor
// polynomials can be cancelled through reduce_by().  Mathematical equality
// is decided by cross-multiplication, independent of the reduction quality.
class RationalFn {
  public:
    RationalFn() = default;
    explicit RationalFn(MultiPoly num)
        : num_(std::move(num)), den_(MultiPoly::constant(num_.nvars(), GaussianRational(1))) {}
    RationalFn(MultiPoly num, MultiPoly den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero()) throw ValidationError("RationalFn: zero denominator");
        reduce();
    }

    static RationalFn constant(std::size_t nvars, GaussianRational c) {
        return RationalFn(MultiPoly::constant(nvars, std::move(c)));
    }
    static RationalFn variable(std::size_t nvars, std::size_t index) {
        return RationalFn(MultiPoly::variable(nvars, index));
    }
    static RationalFn zero(std::size_t nvars) { return constant(nvars, GaussianRational(0)); }
    static RationalFn one(std::size_t nvars) { return constant(nvars, GaussianRational(1)); }

    const MultiPoly& num() const { return num_; }
    const MultiPoly& den() const { return den_; }
    std::size_t nvars() const { return num_.nvars(); }

    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_constant(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    GaussianRational constant_value() const { return num_.constant_value() / den_.constant_value(); }

    RationalFn operator-() const {
        RationalFn r = *this;
        r.num_ = -r.num_;
        return r;
    }
    friend RationalFn operator+(const RationalFn& a, const RationalFn& b) {
        return RationalFn(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RationalFn operator-(const RationalFn& a, const RationalFn& b) {
        return RationalFn(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RationalFn operator*(const RationalFn& a, const RationalFn& b) {
        return RationalFn(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RationalFn operator/(const RationalFn& a, const RationalFn& b) {
        if (b.is_zero()) throw ValidationError("RationalFn: division by zero");
        return RationalFn(a.num_ * b.den_, a.den_ * b.num_);
    }
    RationalFn& operator+=(const RationalFn& o) { return *this = *this + o; }
    RationalFn& operator-=(const RationalFn& o) { return *this = *this - o; }
    RationalFn& operator*=(const RationalFn& o) { return *this = *this * o; }
    RationalFn& operator/=(const RationalFn& o) { return *this = *this / o; }

    RationalFn pow(int k) const {
        if (k == 0) return one(nvars());
        RationalFn base = k > 0 ? *this : one(nvars()) / *this;
        int e = k > 0 ? k : -k;
        RationalFn acc = one(nvars());
        for (int j = 0; j < e; ++j) acc *= base;
        return acc;
    }

    friend bool operator==(const RationalFn& a, const RationalFn& b) {
        return a.num_ * b.den_ == b.num_ * a.den_;
    }
    friend bool operator!=(const RationalFn& a, const RationalFn& b) { return !(a == b); }

    // Exact symbolic partial derivative.
    RationalFn partial(std::size_t var) const {
        return RationalFn(num_.derivative(var) * den_ - num_ * den_.derivative(var), den_ * den_);
    }

    std::complex<double> eval(const std::vector<std::complex<double>>& z,
                              double floor = 1e-13) const {
        std::complex<double> d = den_.eval(z);
        if (std::abs(d) < floor)
            throw NearPoleEvaluation("denominator modulus " + std::to_string(std::abs(d)) +
                                     " below evaluation floor");
        return num_.eval(z) / d;
    }

    std::optional<GaussianRational> eval_exact(const std::vector<GaussianRational>& z) const {
        GaussianRational d = den_.eval_exact(z);
        if (d.is_zero()) return std::nullopt;
        return num_.eval_exact(z) / d;
    }

    // Substitute a polynomial map for the variables.
    RationalFn compose(const std::vector<MultiPoly>& args) const {
        return RationalFn(num_.compose(args), den_.compose(args));
    }

    // Cancel declared polynomial factors common to numerator and denominator.
    RationalFn& reduce_by(std::span<const MultiPoly> hints) {
        for (const auto& h : hints) {
            if (h.is_constant()) continue;
            MultiPoly qn, qd;
            while (!num_.is_zero() && num_.try_divide(h, qn) && den_.try_divide(h, qd)) {
                num_ = qn;
                den_ = qd;
            }
        }
        reduce();
        return *this;
    }

    std::string str(const std::vector<std::string>& names) const {
        if (is_polynomial()) return num_.str(names);
        return "(" + num_.str(names) + ")/(" + den_.str(names) + ")";
    }

  private:
    void reduce() {
        if (num_.is_zero()) {
            den_ = MultiPoly::constant(num_.nvars(), GaussianRational(1));
            return;
        }
        Exponents mn = num_.monomial_content();
        Exponents md = den_.monomial_content();
        Exponents common(mn.size());
        bool any = false;
        for (std::size_t k = 0; k < mn.size(); ++k) {
            common[k] = std::min(mn[k], md[k]);
            any = any || common[k] > 0;
        }
        if (any) {
            num_ = num_.shifted_down(common);
            den_ = den_.shifted_down(common);
        }
        if (!den_.is_constant()) {
            auto sn = num_.support_vars();
            auto sd = den_.support_vars();
            if (sd.size() == 1 && (sn.empty() || (sn.size() == 1 && sn[0] == sd[0]))) {
                std::size_t var = sd[0];
                MultiPoly g = univariate_gcd(num_, den_, var);
                if (!g.is_constant()) {
                    MultiPoly qn, qd;
                    if (num_.try_divide(g, qn) && den_.try_divide(g, qd)) {
                        num_ = qn;
                        den_ = qd;
                    }
                }
            }
        }
        GaussianRational lead = den_.leading_coefficient();
        if (!(lead == GaussianRational(1))) {
            GaussianRational inv = GaussianRational(1) / lead;
            num_ = num_.scaled(inv);
            den_ = den_.scaled(inv);
        }
    }

    MultiPoly num_;
    MultiPoly den_{MultiPoly::constant(0, GaussianRational(1))};
};

// ord_q(num) - ord_q(den); empty optional encodes +infinity (the zero
// function).
inline std::optional<int> order_along(const RationalFn& f, const DivisorComponent& q) {
    if (q.poly.is_constant()) throw ValidationError("order_along: constant divisor polynomial");
    if (f.is_zero()) return std::nullopt;
    return f.num().max_division_power(q.poly) - f.den().max_division_power(q.poly);
}

inline bool order_at_least(const RationalFn& f, const DivisorComponent& q, int bound) {
    auto ord = order_along(f, q);
    return !ord.has_value() || *ord >= bound;
}

inline bool vanishes_on(const RationalFn& f, const DivisorComponent& q) {
    auto ord = order_along(f, q);
    if (ord.has_value() && *ord < 0)
        throw PoleOnComponent("vanishes_on: function has a pole on the component");
    return !ord.has_value() || *ord >= 1;
}

// Decides whether every pole of f lies on one of the given components.
// Divisor factors are stripped from the denominator; a residual denominator
// must then divide the numerator exactly, otherwise a pole off the divisor
// remains.  Sound because divisor components are declared irreducible.
inline bool poles_only_on(const RationalFn& f, std::span<const MultiPoly> divisor) {
    if (f.is_zero()) return true;
    MultiPoly num = f.num();
    MultiPoly den = f.den();
    MultiPoly q;
    for (const auto& h : divisor) {
        if (h.is_constant()) continue;
        while (den.try_divide(h, q)) den = q;
    }
    if (den.is_constant()) return true;
    if (num.try_divide(den, q)) return true;
    return false;
}

inline bool poles_only_on(const RationalFn& f, const Chart& chart) {
    auto polys = chart.divisor_polys();
    return poles_only_on(f, polys);
}

inline bool is_holomorphic_on_chart(const RationalFn& f, const Chart& chart) {
    if (f.is_zero()) return true;
    for (const auto& q : chart.divisor) {
        if (!order_at_least(f, q, 0)) return false;
    }
    return poles_only_on(f, chart);
}

} // namespace meroconn
