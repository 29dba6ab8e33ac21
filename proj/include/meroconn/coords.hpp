#pragma once

#include <optional>
#include <string>
#include <vector>

#include "connection.hpp"
#include "errors.hpp"

namespace meroconn {

// Polynomial coordinate change with a declared polynomial inverse.
// forward[a] expresses old coordinate z_a in the new coordinates w;
// inverse[k] expresses w_k in the old coordinates z.
struct CoordinateChange {
    std::vector<MultiPoly> forward;
    std::vector<MultiPoly> inverse;
    std::vector<std::string> new_names;

    CoordinateChange(std::vector<MultiPoly> fwd, std::vector<MultiPoly> inv,
                     std::vector<std::string> names)
        : forward(std::move(fwd)), inverse(std::move(inv)), new_names(std::move(names)) {
        std::size_t n = forward.size();
        if (inverse.size() != n || new_names.size() != n)
            throw ValidationError("coordinate change: size mismatch");
        for (std::size_t k = 0; k < n; ++k) {
            MultiPoly check = inverse[k].compose(forward);
            if (check != MultiPoly::variable(n, k))
                throw ValidationError("coordinate change: declared inverse fails w(z(w)) = w");
        }
    }
};

// Transported Christoffel symbols:
//   Gamma'^k_{ij}(w) = sum_c dw_k/dz_c [ sum_{ab} Gamma^c_{ab} dz_a/dw_i dz_b/dw_j
//                                        + d^2 z_c / dw_i dw_j ]
inline ChartConnection transform_connection(const ChartConnection& conn,
                                            const CoordinateChange& chg) {
    std::size_t n = conn.nvars();
    std::vector<DivisorComponent> new_div;
    for (const auto& q : conn.chart.divisor) {
        MultiPoly moved = q.poly.compose(chg.forward);
        if (moved.is_constant()) throw ValidationError("divisor component degenerates under change");
        new_div.emplace_back(std::move(moved), q.multiplicity, q.label);
    }
    Chart new_chart(chg.new_names, std::move(new_div));
    auto hints = new_chart.divisor_polys();

    // Jacobians: dz_a/dw_i polynomial in w; dw_k/dz_c polynomial in z, composed into w.
    std::vector<std::vector<MultiPoly>> dz_dw(n, std::vector<MultiPoly>(n));
    std::vector<std::vector<MultiPoly>> dw_dz(n, std::vector<MultiPoly>(n));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t i = 0; i < n; ++i) dz_dw[a][i] = chg.forward[a].derivative(i);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t c = 0; c < n; ++c) dw_dz[k][c] = chg.inverse[k].derivative(c).compose(chg.forward);

    ChartConnection out = ChartConnection::zero(new_chart);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                RationalFn acc = RationalFn::zero(n);
                for (std::size_t c = 0; c < n; ++c) {
                    RationalFn inner = RationalFn::zero(n);
                    for (std::size_t a = 0; a < n; ++a)
                        for (std::size_t b = 0; b < n; ++b) {
                            const RationalFn& g = conn.gamma(c, a, b);
                            if (g.is_zero()) continue;
                            inner += g.compose(chg.forward) *
                                     RationalFn(dz_dw[a][i] * dz_dw[b][j]);
                        }
                    inner += RationalFn(chg.forward[c].derivative(i).derivative(j));
                    if (!dw_dz[k][c].is_zero()) acc += RationalFn(dw_dz[k][c]) * inner;
                }
                acc.reduce_by(hints);
                out.set_gamma(k, i, j, std::move(acc));
            }
    return out;
}

struct Straightening {
    CoordinateChange change;     // maps the component to {w_front = 0}
    std::size_t graph_var = 0;   // original coordinate solved for
    MultiPoly graph_rhs;         // z_graph_var = graph_rhs(other variables)
};

// Components expressible as c * z_j - s(other variables) are straightened by
// w_j = q(z)/c (so the component becomes {w_j = 0}); the straightened chart
// keeps the variable order, with graph_var playing the role of the first
// coordinate of the local model.
inline std::optional<Straightening> straighten_component(const Chart& chart,
                                                         const DivisorComponent& comp) {
    std::size_t n = chart.nvars;
    for (std::size_t j = 0; j < n; ++j) {
        if (comp.poly.degree_in(j) != 1) continue;
        MultiPoly coeff = comp.poly.coefficient_in(j, 1);
        if (!coeff.is_constant()) continue;
        GaussianRational c = coeff.constant_value();
        // q = c z_j - s  with  s = -(q - c z_j)
        MultiPoly s = (comp.poly.coefficient_in(j, 0)).scaled(GaussianRational(-1) / c);
        // forward: z_j = w_j + s(w_others); others identity
        std::vector<MultiPoly> fwd, inv;
        for (std::size_t k = 0; k < n; ++k) {
            if (k == j) {
                fwd.push_back(MultiPoly::variable(n, j) + s);
            } else {
                fwd.push_back(MultiPoly::variable(n, k));
            }
        }
        // inverse: w_j = z_j - s(z_others)
        for (std::size_t k = 0; k < n; ++k) {
            if (k == j) {
                inv.push_back(MultiPoly::variable(n, j) - s);
            } else {
                inv.push_back(MultiPoly::variable(n, k));
            }
        }
        std::vector<std::string> names;
        for (std::size_t k = 0; k < n; ++k) names.push_back("w" + std::to_string(k + 1));
        Straightening st{CoordinateChange(std::move(fwd), std::move(inv), std::move(names)), j, s};
        return st;
    }
    return std::nullopt;
}

} // namespace meroconn
