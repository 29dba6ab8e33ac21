#pragma once

#include <complex>
#include <random>
#include <vector>

#include "meroconn/chart.hpp"
#include "meroconn/connection.hpp"
#include "meroconn/expr.hpp"
#include "meroconn/matrix.hpp"
#include "meroconn/rational_fn.hpp"

namespace testutil {

using namespace meroconn;

inline Chart chart2(std::vector<DivisorComponent> div = {}) {
    return Chart({"z1", "z2"}, std::move(div));
}

inline DivisorComponent comp(const std::string& expr, const std::vector<std::string>& vars,
                             int mult = 1) {
    RationalFn f = parse_expression(expr, vars);
    return DivisorComponent(f.num(), mult, expr);
}

inline RationalFn rf(const std::string& expr, const Chart& c) {
    return parse_expression(expr, c.var_names);
}

// Small random polynomial with integer coefficients in [-3, 3].
inline MultiPoly random_poly(std::mt19937_64& rng, std::size_t nvars, unsigned max_deg,
                             int max_terms = 4, bool allow_zero = true) {
    std::uniform_int_distribution<int> coeff(-3, 3);
    std::uniform_int_distribution<unsigned> deg(0, max_deg);
    std::uniform_int_distribution<int> nterms(1, max_terms);
    MultiPoly p(nvars);
    int t = nterms(rng);
    for (int k = 0; k < t; ++k) {
        Exponents e(nvars);
        unsigned budget = deg(rng);
        for (std::size_t v = 0; v < nvars; ++v) {
            std::uniform_int_distribution<unsigned> take(0, budget);
            e[v] = take(rng);
            budget -= e[v];
        }
        p.add_term(e, GaussianRational(coeff(rng)));
    }
    if (!allow_zero && p.is_zero()) p.add_term(Exponents(nvars, 0), GaussianRational(1));
    return p;
}

// Random rational function with poles only on the given divisor components.
inline RationalFn random_divisor_fn(std::mt19937_64& rng, const Chart& chart, unsigned max_deg,
                                    int max_pole_order = 1) {
    MultiPoly num = random_poly(rng, chart.nvars, max_deg);
    MultiPoly den = MultiPoly::constant(chart.nvars, GaussianRational(1));
    std::uniform_int_distribution<int> pow(0, max_pole_order);
    for (const auto& q : chart.divisor) {
        int k = pow(rng);
        for (int j = 0; j < k; ++j) den *= q.poly;
    }
    return RationalFn(num, den);
}

inline std::vector<std::complex<double>> random_point(std::mt19937_64& rng, std::size_t nvars,
                                                      const Chart& chart, double min_div = 0.3) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<std::complex<double>> z(nvars);
        for (auto& v : z) v = {u(rng), u(rng)};
        bool ok = true;
        for (const auto& q : chart.divisor)
            if (std::abs(q.poly.eval(z)) < min_div) ok = false;
        if (ok) return z;
    }
    throw std::runtime_error("random_point: could not avoid divisor");
}

inline double cnorm(std::complex<double> v) { return std::abs(v); }

} // namespace testutil

namespace testutil {

// Hopf-cover connection: Gamma^1_{11} = 1/z1, divisor z1, frame
// diag(1/(2 z1), 1, ..., 1); pullback of the flat connection by
// (z1, ..., zn) -> (z1^2, z2, ..., zn).
inline ChartConnection hopf_connection(std::size_t n = 2) {
    std::vector<std::string> names;
    for (std::size_t k = 1; k <= n; ++k) names.push_back("z" + std::to_string(k));
    Chart c(names, {DivisorComponent(MultiPoly::variable(n, 0), 1, "z1")});
    ChartConnection conn = ChartConnection::zero(c);
    conn.set_gamma(0, 0, 0, RationalFn(MultiPoly::constant(n, GaussianRational(1)),
                                       MultiPoly::variable(n, 0)));
    return conn;
}

inline SubmoduleFrame hopf_frame(const ChartConnection& conn) {
    std::size_t n = conn.nvars();
    RatMat Q = rat_identity(n, n);
    RatMat Qi = rat_identity(n, n);
    Q.at(0, 0) = RationalFn(MultiPoly::constant(n, GaussianRational(1)),
                            MultiPoly::variable(n, 0).scaled(GaussianRational(2)));
    Qi.at(0, 0) = RationalFn(MultiPoly::variable(n, 0).scaled(GaussianRational(2)));
    return SubmoduleFrame(GaugeMatrix(Q, Qi), conn.chart);
}

// Frame of right-invariant fields on the unipotent upper-triangular group,
// in exponential-type coordinates: Y1 = d1 + z2 d3, Y2 = d2, Y3 = d3.
inline GaugeMatrix heisenberg_frame_matrix() {
    RatMat Q = rat_identity(3, 3);
    RatMat Qi = rat_identity(3, 3);
    Q.at(2, 0) = RationalFn::variable(3, 1);
    Qi.at(2, 0) = -RationalFn::variable(3, 1);
    return GaugeMatrix(Q, Qi);
}

inline ChartConnection heisenberg_connection() {
    Chart c({"z1", "z2", "z3"});
    return frame_parallel_connection(c, heisenberg_frame_matrix());
}

// Gamma^k_{1k} = lambda/z1 on two variables, divisor z1.
inline ChartConnection scalar_lambda_connection(const GaussianRational& lambda) {
    Chart c({"z1", "z2"}, {DivisorComponent(MultiPoly::variable(2, 0), 1, "z1")});
    ChartConnection conn = ChartConnection::zero(c);
    RationalFn pole(MultiPoly::constant(2, lambda), MultiPoly::variable(2, 0));
    conn.set_gamma(0, 0, 0, pole);
    conn.set_gamma(1, 0, 1, pole);
    return conn;
}

} // namespace testutil
