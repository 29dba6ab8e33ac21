#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <optional>
#include <random>
#include <vector>

#include "connection.hpp"
#include "coords.hpp"
#include "errors.hpp"
#include "geodesic.hpp"
#include "ode.hpp"

namespace meroconn {

struct FrameBundlePoint {
    CVec z;
    CVec g; // n x n, row-major

    static FrameBundlePoint identity_frame(CVec z0, std::size_t n) {
        FrameBundlePoint p;
        p.z = std::move(z0);
        p.g.assign(n * n, 0.0);
        for (std::size_t k = 0; k < n; ++k) p.g[k * n + k] = 1.0;
        return p;
    }

    std::complex<double> det(std::size_t n) const {
        Eigen::MatrixXcd m(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) m(r, c) = g[r * n + c];
        return m.determinant();
    }
};

// The pole-cleared omega_0-constant vector field on the trivialized frame
// bundle (z, g), as exact rational functions of the n + n^2 variables.  The
// uncleared field is z' = Q g A, g' = -FrameForm(z') g; the clearing factor m
// is the minimal monomial in the divisor polynomials making every component
// pole-free with order exactly zero somewhere on each cleared component.
struct DistinguishedField {
    std::size_t n = 0;
    Chart base_chart;
    Chart ext_chart;                    // variables z_1..z_n, g_11..g_nn
    std::vector<RationalFn> field;      // n + n^2 cleared components
    MultiPoly clearing;                 // m, in the base chart variables
    std::vector<GaussianRational> direction;

    CVec eval(const CVec& y, double floor = 1e-13) const {
        CVec out(field.size());
        for (std::size_t k = 0; k < field.size(); ++k) out[k] = field[k].eval(y, floor);
        return out;
    }
};

namespace detail {

inline MultiPoly extend_vars(const MultiPoly& p, std::size_t n_old, std::size_t n_new) {
    std::vector<MultiPoly> args;
    args.reserve(n_old);
    for (std::size_t k = 0; k < n_old; ++k) args.push_back(MultiPoly::variable(n_new, k));
    return p.compose(args);
}

inline RationalFn extend_vars(const RationalFn& f, std::size_t n_old, std::size_t n_new) {
    return RationalFn(extend_vars(f.num(), n_old, n_new), extend_vars(f.den(), n_old, n_new));
}

} // namespace detail

inline DistinguishedField distinguished_field(const ChartConnection& conn,
                                              const SubmoduleFrame& frame,
                                              const std::vector<GaussianRational>& A) {
    std::size_t n = conn.nvars();
    bool nonzero = false;
    for (const auto& a : A) nonzero = nonzero || !a.is_zero();
    if (!nonzero) throw ValidationError("distinguished_field: direction must be nonzero");

    BranchedVerdict bv = is_branched(conn, frame);
    if (!bv.branched)
        throw NotBranched("distinguished_field: connection is not branched for this frame");

    std::size_t N = n + n * n;
    std::vector<std::string> names = conn.chart.var_names;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            names.push_back("g" + std::to_string(r + 1) + std::to_string(c + 1));
    std::vector<DivisorComponent> ext_div;
    for (const auto& q : conn.chart.divisor)
        ext_div.emplace_back(detail::extend_vars(q.poly, n, N), q.multiplicity, q.label);
    Chart ext(names, ext_div);

    auto gv = [&](std::size_t r, std::size_t c) { return RationalFn::variable(N, n + r * n + c); };

    // z'_d = sum_{c,e} Q_{dc} g_{ce} A_e
    std::vector<RationalFn> zdot(n, RationalFn::zero(N));
    for (std::size_t d = 0; d < n; ++d) {
        RationalFn acc = RationalFn::zero(N);
        for (std::size_t c = 0; c < n; ++c) {
            RationalFn qdc = detail::extend_vars(frame.frame.Q.at(d, c), n, N);
            if (qdc.is_zero()) continue;
            for (std::size_t e = 0; e < n; ++e) {
                if (A[e].is_zero()) continue;
                acc += qdc * gv(c, e) * RationalFn::constant(N, A[e]);
            }
        }
        zdot[d] = acc;
    }

    // g'_{ce} = -sum_i z'_i (FrameForm_i g)_{ce}
    std::vector<RationalFn> gdot(n * n, RationalFn::zero(N));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t e = 0; e < n; ++e) {
                RationalFn acc = RationalFn::zero(N);
                for (std::size_t f = 0; f < n; ++f) {
                    RationalFn form = detail::extend_vars(bv.gauged.matrices[i].at(c, f), n, N);
                    if (form.is_zero()) continue;
                    acc += form * gv(f, e);
                }
                if (!acc.is_zero()) gdot[c * n + e] -= zdot[i] * acc;
            }
    }

    std::vector<RationalFn> all;
    all.reserve(N);
    for (auto& f : zdot) all.push_back(std::move(f));
    for (auto& f : gdot) all.push_back(std::move(f));

    auto hints = ext.divisor_polys();
    for (auto& f : all) f.reduce_by(hints);

    // minimal clearing monomial
    MultiPoly m = MultiPoly::constant(n, GaussianRational(1));
    MultiPoly m_ext = MultiPoly::constant(N, GaussianRational(1));
    for (std::size_t qi = 0; qi < conn.chart.divisor.size(); ++qi) {
        const DivisorComponent& q_ext = ext.divisor[qi];
        int worst = 0;
        for (const auto& f : all) {
            auto ord = order_along(f, q_ext);
            if (ord.has_value()) worst = std::min(worst, *ord);
        }
        for (int k = 0; k < -worst; ++k) {
            m *= conn.chart.divisor[qi].poly;
            m_ext *= q_ext.poly;
        }
    }
    if (!m_ext.is_constant()) {
        RationalFn mf(m_ext);
        for (auto& f : all) {
            f *= mf;
            f.reduce_by(hints);
        }
    }

    DistinguishedField out;
    out.n = n;
    out.base_chart = conn.chart;
    out.ext_chart = std::move(ext);
    out.field = std::move(all);
    out.clearing = std::move(m);
    out.direction = A;
    return out;
}

struct DivisorCrossing {
    double parameter = 0.0;
    CVec point;                  // base point on (or nearest to) the component
    std::size_t component = 0;
    bool transversal = false;
    std::complex<double> dq_dt;  // time derivative of the component equation
    double residual_modulus = 0.0;
};

enum class CurveStatus { Completed, FrameDegenerate, StepUnderflow };

struct DistinguishedCurveSample {
    double t = 0.0;
    FrameBundlePoint point;
};

struct DistinguishedCurveResult {
    std::vector<DistinguishedCurveSample> samples;
    std::optional<DivisorCrossing> crossing;
    std::vector<std::complex<double>> h_factor; // clearing monomial along the curve
    CurveStatus status = CurveStatus::Completed;
};

struct CurveOptions {
    double t_end = 2.0;
    Tolerances tol;
};

namespace detail {

// State of the cleared field at parameter t, re-integrated from a nearby
// anchor sample with tight tolerance.
inline CVec state_at(const DistinguishedField& fld, const OdeSample& anchor, double t,
                     const Tolerances& tol) {
    if (t == anchor.t) return anchor.y;
    OdeOptions opt;
    opt.abs_tol = tol.rk_abs * 0.01;
    opt.rel_tol = tol.rk_rel * 0.01;
    auto f = [&](double, const CVec& y) { return fld.eval(y, tol.eval_floor); };
    OdeResult r = dp54(f, anchor.t, t, anchor.y, opt, [](double, const CVec&) { return true; });
    return r.samples.back().y;
}

inline std::complex<double> q_value(const DistinguishedField& fld, std::size_t qi, const CVec& y) {
    CVec z(y.begin(), y.begin() + fld.n);
    return fld.base_chart.divisor[qi].poly.eval(z);
}

inline std::complex<double> q_derivative(const DistinguishedField& fld, std::size_t qi,
                                         const CVec& y, double floor) {
    // dq/dt = sum_k dq/dz_k * z'_k
    CVec z(y.begin(), y.begin() + fld.n);
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < fld.n; ++k) {
        MultiPoly dq = fld.base_chart.divisor[qi].poly.derivative(k);
        if (dq.is_zero()) continue;
        acc += dq.eval(z) * fld.field[k].eval(y, floor);
    }
    return acc;
}

} // namespace detail

// Integrates the pole-cleared field (holomorphic, valid across the divisor),
// detecting divisor crossings along the way.  Roots of q(z(t)) are bracketed
// at modulus minima of the sampled values and refined by parabolic bisection
// of |q|^2 down to the configured parameter width.
inline DistinguishedCurveResult integrate_distinguished_curve(const DistinguishedField& fld,
                                                              const FrameBundlePoint& start,
                                                              const CurveOptions& opts = {}) {
    std::size_t n = fld.n;
    std::size_t N = n + n * n;
    const Tolerances& tol = opts.tol;

    CVec y0(N);
    for (std::size_t k = 0; k < n; ++k) y0[k] = start.z[k];
    for (std::size_t k = 0; k < n * n; ++k) y0[n + k] = start.g[k];
    {
        FrameBundlePoint chk{start.z, start.g};
        if (std::abs(chk.det(n)) < tol.det_floor)
            throw ValidationError("integrate_distinguished_curve: starting frame is singular");
    }

    OdeOptions opt;
    opt.abs_tol = tol.rk_abs;
    opt.rel_tol = tol.rk_rel;
    auto f = [&](double, const CVec& y) { return fld.eval(y, tol.eval_floor); };
    bool degenerate = false;
    auto guard = [&](double, const CVec& y) {
        Eigen::MatrixXcd g(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) g(r, c) = y[n + r * n + c];
        if (std::abs(g.determinant()) < tol.det_floor) {
            degenerate = true;
            return false;
        }
        return true;
    };
    OdeResult r = dp54(f, 0.0, opts.t_end, y0, opt, guard);

    DistinguishedCurveResult out;
    if (r.status == OdeStatus::StepUnderflow) out.status = CurveStatus::StepUnderflow;
    if (r.status == OdeStatus::Halted && degenerate) out.status = CurveStatus::FrameDegenerate;

    for (const auto& s : r.samples) {
        DistinguishedCurveSample cs;
        cs.t = s.t;
        cs.point.z.assign(s.y.begin(), s.y.begin() + n);
        cs.point.g.assign(s.y.begin() + n, s.y.end());
        out.samples.push_back(std::move(cs));
        CVec z(s.y.begin(), s.y.begin() + n);
        out.h_factor.push_back(fld.clearing.eval(z));
    }

    // Crossing detection per component; keep the earliest.  A root of q(z(t))
    // is either visible directly (sampled modulus below the hit threshold) or
    // bracketed by a sign change of d|q|^2/dt = 2 Re(conj(q) q') between
    // consecutive samples, which is robust against large adaptive steps.
    for (std::size_t qi = 0; qi < fld.base_chart.divisor.size(); ++qi) {
        std::size_t ns = r.samples.size();
        std::vector<double> mods(ns), slope(ns);
        for (std::size_t s = 0; s < ns; ++s) {
            std::complex<double> q = detail::q_value(fld, qi, r.samples[s].y);
            std::complex<double> dq = detail::q_derivative(fld, qi, r.samples[s].y, tol.eval_floor);
            mods[s] = std::abs(q);
            slope[s] = 2.0 * std::real(std::conj(q) * dq);
        }

        auto record = [&](double t_star, const CVec& y_star, double q_mod) {
            if (q_mod > tol.crossing_hit) return;
            DivisorCrossing cx;
            cx.parameter = t_star;
            cx.point.assign(y_star.begin(), y_star.begin() + n);
            cx.component = qi;
            cx.dq_dt = detail::q_derivative(fld, qi, y_star, tol.eval_floor);
            cx.transversal = std::abs(cx.dq_dt) > tol.transversality;
            cx.residual_modulus = q_mod;
            if (!out.crossing || cx.parameter < out.crossing->parameter) out.crossing = cx;
        };

        bool found = false;
        for (std::size_t s = 0; s < ns && !found; ++s) {
            if (mods[s] < tol.crossing_hit) {
                record(r.samples[s].t, r.samples[s].y, mods[s]);
                found = true;
            }
        }
        if (found) continue;

        for (std::size_t s = 0; s + 1 < ns && !found; ++s) {
            if (!(slope[s] < 0.0 && slope[s + 1] >= 0.0)) continue;
            const OdeSample& anchor = r.samples[s];
            double a = r.samples[s].t, b = r.samples[s + 1].t;
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
            auto phi = [&](double t) {
                return std::abs(detail::q_value(fld, qi, detail::state_at(fld, anchor, t, tol)));
            };
            double f1 = phi(c1), f2 = phi(c2);
            int iter = 0;
            while (b - a > tol.crossing_refine && iter++ < 200) {
                if (f1 <= f2) {
                    b = c2;
                    c2 = c1;
                    f2 = f1;
                    c1 = b - gr * (b - a);
                    f1 = phi(c1);
                } else {
                    a = c1;
                    c1 = c2;
                    f1 = f2;
                    c2 = a + gr * (b - a);
                    f2 = phi(c2);
                }
            }
            double t_star = 0.5 * (a + b);
            CVec y_star = detail::state_at(fld, anchor, t_star, tol);
            double q_mod = std::abs(detail::q_value(fld, qi, y_star));
            if (q_mod <= tol.crossing_hit) {
                record(t_star, y_star, q_mod);
                found = true;
            }
        }
    }
    return out;
}

// --- spiral / A^0_{E,1} classification -------------------------------------

// Surface test: after straightening the component to {w = 0}, membership in
// the non-spiral family requires the upper-right Christoffel symbol c_2 to
// vanish on the component and d_2 to stay holomorphic across it.
inline bool classify_A01(const ChartConnection& conn, const DivisorComponent& component) {
    if (conn.nvars() != 2)
        throw UnsupportedComponent("classify_A01: only two-variable charts are supported");
    auto st = straighten_component(conn.chart, component);
    if (!st) throw UnsupportedComponent("classify_A01: component is not a coordinate graph");

    ChartConnection moved = transform_connection(conn, st->change);
    std::size_t first = st->graph_var;      // plays z1 in the local model
    std::size_t second = 1 - first;         // plays z2
    DivisorComponent w1(MultiPoly::variable(2, first), component.multiplicity, component.label);

    const RationalFn& c2 = moved.gamma(first, second, second);
    const RationalFn& d2 = moved.gamma(second, second, second);
    return order_at_least(c2, w1, 1) && order_at_least(d2, w1, 0);
}

struct SpiralWitness {
    std::string component_label;
    std::size_t component_index = 0;
    std::vector<GaussianRational> base_point_exact;
    CVec base_point;
    std::vector<GaussianRational> direction;
    DivisorCrossing crossing;
};

struct SpiralSearchOptions {
    int budget = 64;
    double t_end = 2.0;
    unsigned long long seed = 0;
    Tolerances tol;
};

// Samples exact rational base points on the component and directions over the
// g_- basis plus random small-integer combinations; returns the first
// transversal-crossing witness found by curve integration.
inline std::optional<SpiralWitness> spiral_search(const ChartConnection& conn,
                                                  const SubmoduleFrame& frame,
                                                  std::size_t component_index,
                                                  const SpiralSearchOptions& opts = {}) {
    std::size_t n = conn.nvars();
    const DivisorComponent& component = conn.chart.divisor.at(component_index);
    auto st = straighten_component(conn.chart, component);
    if (!st) throw UnsupportedComponent("spiral_search: component is not a coordinate graph");

    std::mt19937_64 rng(opts.seed * 1000003ULL + component_index + 1);
    std::uniform_int_distribution<int> numer(-8, 8);
    std::uniform_int_distribution<int> denom(1, 4);
    std::uniform_int_distribution<int> small(-2, 2);

    for (int tried = 0; tried < opts.budget; ++tried) {
        // directions: g_- basis first, then random small-integer combinations
        std::vector<GaussianRational> A(n, GaussianRational(0));
        if (tried < static_cast<int>(n)) {
            A[tried] = GaussianRational(1);
        } else {
            bool nz = false;
            while (!nz)
                for (auto& c : A) {
                    c = GaussianRational(small(rng));
                    nz = nz || !c.is_zero();
                }
        }

        // exact rational base point on the component via the graph form
        std::vector<GaussianRational> ze(n, GaussianRational(0));
        for (std::size_t k = 0; k < n; ++k) {
            if (k == st->graph_var) continue;
            ze[k] = GaussianRational::from_ratio(numer(rng), denom(rng));
        }
        ze[st->graph_var] = st->graph_rhs.eval_exact(ze);

        bool on_other = false;
        for (std::size_t qj = 0; qj < conn.chart.divisor.size(); ++qj) {
            if (qj == component_index) continue;
            if (conn.chart.divisor[qj].poly.eval_exact(ze).is_zero()) on_other = true;
        }
        if (on_other) continue;

        DistinguishedField fld = distinguished_field(conn, frame, A);
        CVec z0(n);
        for (std::size_t k = 0; k < n; ++k) z0[k] = ze[k].to_complex();
        FrameBundlePoint start = FrameBundlePoint::identity_frame(z0, n);
        CurveOptions copts;
        copts.t_end = opts.t_end;
        copts.tol = opts.tol;
        DistinguishedCurveResult res = integrate_distinguished_curve(fld, start, copts);
        if (res.crossing && res.crossing->transversal &&
            res.crossing->component == component_index) {
            SpiralWitness w;
            w.component_label = component.label;
            w.component_index = component_index;
            w.base_point_exact = ze;
            w.base_point = z0;
            w.direction = A;
            w.crossing = *res.crossing;
            return w;
        }
    }
    return std::nullopt;
}

// Direction-resolved non-invariance test along the canonical identity-frame
// section: the straightened component equation must keep a nonzero Lie
// derivative under the cleared field after restriction to the component.
inline bool strong_spiral_test(const ChartConnection& conn, const SubmoduleFrame& frame,
                               std::size_t component_index,
                               const std::vector<GaussianRational>& A) {
    std::size_t n = conn.nvars();
    const DivisorComponent& component = conn.chart.divisor.at(component_index);
    auto st = straighten_component(conn.chart, component);
    if (!st) throw UnsupportedComponent("strong_spiral_test: component is not a coordinate graph");

    DistinguishedField fld = distinguished_field(conn, frame, A);

    // substitute the identity frame: g_{rc} = delta_{rc}
    std::vector<MultiPoly> args;
    for (std::size_t k = 0; k < n; ++k) args.push_back(MultiPoly::variable(n, k));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            args.push_back(MultiPoly::constant(n, GaussianRational(r == c ? 1 : 0)));

    // L_Z(q) = sum_k dq/dz_k * Z_k, with Z the z-part of the cleared field
    RationalFn lie = RationalFn::zero(n);
    for (std::size_t k = 0; k < n; ++k) {
        MultiPoly dq = component.poly.derivative(k);
        if (dq.is_zero()) continue;
        lie += RationalFn(dq) * fld.field[k].compose(args);
    }
    if (lie.is_zero()) return false;

    // restrict to the component: z_graph = graph_rhs(other variables)
    std::vector<MultiPoly> restrict_args;
    for (std::size_t k = 0; k < n; ++k) {
        if (k == st->graph_var)
            restrict_args.push_back(st->graph_rhs);
        else
            restrict_args.push_back(MultiPoly::variable(n, k));
    }
    RationalFn restricted = lie.compose(restrict_args);
    return !restricted.is_zero();
}

// Residual of the reparametrized geodesic equation along the projection of a
// distinguished curve: gamma'' + Gamma(gamma', gamma') - (m'/m) gamma'.
inline double reparametrization_residual(const ChartConnection& conn,
                                         const DistinguishedField& fld, const CVec& y,
                                         const Tolerances& tol = {}) {
    std::size_t n = fld.n;
    CVec z(y.begin(), y.begin() + n);
    CVec zdot(n), zddot(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) zdot[k] = fld.field[k].eval(y, tol.eval_floor);
    // second derivative by the chain rule through the full field
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t v = 0; v < fld.field.size(); ++v) {
            RationalFn d = fld.field[k].partial(v);
            if (d.is_zero()) continue;
            acc += d.eval(y, tol.eval_floor) * fld.field[v].eval(y, tol.eval_floor);
        }
        zddot[k] = acc;
    }
    std::complex<double> m = fld.clearing.eval(z);
    std::complex<double> mdot = 0.0;
    for (std::size_t k = 0; k < n; ++k) mdot += fld.clearing.derivative(k).eval(z) * zdot[k];

    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> gam = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const RationalFn& g = conn.gamma(k, i, j);
                if (g.is_zero()) continue;
                gam += g.eval(z, tol.eval_floor) * zdot[i] * zdot[j];
            }
        std::complex<double> res = zddot[k] + gam - (mdot / m) * zdot[k];
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

} // namespace meroconn
