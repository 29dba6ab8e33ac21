#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "chart.hpp"
#include "errors.hpp"
#include "matrix.hpp"
#include "rational_fn.hpp"

namespace meroconn {

// Rank-r meromorphic connection in matrix form: the one-form sum_i dz_i (x) A_i.
struct LinearMeromorphicSystem {
    Chart chart;
    std::size_t rank = 0;
    std::vector<RatMat> matrices; // one r x r matrix per chart variable

    LinearMeromorphicSystem() = default;
    LinearMeromorphicSystem(Chart c, std::vector<RatMat> mats, bool validate = true)
        : chart(std::move(c)), matrices(std::move(mats)) {
        rank = matrices.empty() ? 0 : matrices[0].rows();
        if (matrices.size() != chart.nvars)
            throw ValidationError("system needs one matrix per chart variable");
        if (validate) {
            for (const auto& m : matrices)
                for (std::size_t i = 0; i < m.rows(); ++i)
                    for (std::size_t j = 0; j < m.cols(); ++j)
                        if (!poles_only_on(m.at(i, j), chart))
                            throw ValidationError("system entry has a pole off the divisor");
        }
    }
};

// Christoffel data of a meromorphic affine connection on the chart.
// Convention: (A_i)_{kj} = Gamma^k_{ij}, so nabla_{d_i} d_j = sum_k Gamma^k_{ij} d_k.
struct ChartConnection {
    Chart chart;
    std::vector<RatMat> A; // matrix form, one n x n matrix per variable

    ChartConnection() = default;
    ChartConnection(Chart c, std::vector<RatMat> mats) : chart(std::move(c)), A(std::move(mats)) {
        if (A.size() != chart.nvars) throw ValidationError("connection needs one matrix per variable");
        for (const auto& m : A)
            for (std::size_t i = 0; i < m.rows(); ++i)
                for (std::size_t j = 0; j < m.cols(); ++j)
                    if (!poles_only_on(m.at(i, j), chart))
                        throw ValidationError("Christoffel symbol has a pole off the divisor");
    }

    static ChartConnection zero(Chart c) {
        std::size_t n = c.nvars;
        std::vector<RatMat> mats(n, rat_zero(n, n, n));
        return ChartConnection(std::move(c), std::move(mats));
    }

    std::size_t nvars() const { return chart.nvars; }
    const RationalFn& gamma(std::size_t k, std::size_t i, std::size_t j) const {
        return A[i].at(k, j);
    }
    void set_gamma(std::size_t k, std::size_t i, std::size_t j, RationalFn v) {
        A[i].at(k, j) = std::move(v);
    }

    LinearMeromorphicSystem system() const { return LinearMeromorphicSystem(chart, A, false); }
};

struct GaugeMatrix {
    RatMat Q;
    RatMat Qinv;

    GaugeMatrix() = default;
    GaugeMatrix(RatMat q, RatMat qinv) : Q(std::move(q)), Qinv(std::move(qinv)) {
        std::size_t n = Q.rows();
        std::size_t nv = Q.at(0, 0).nvars();
        RatMat prod = Q * Qinv;
        if (!(prod == rat_identity(n, nv)) && !rat_is_zero(prod - rat_identity(n, nv)))
            throw ValidationError("gauge matrix: declared inverse fails Q*Qinv = Id");
    }

    static GaugeMatrix identity(std::size_t n, std::size_t nvars) {
        return GaugeMatrix(rat_identity(n, nvars), rat_identity(n, nvars));
    }
};

// Basis of a locally free submodule E with TM subset E subset TM(*D): columns
// of Q are the components of the basis in the coordinate frame.
struct SubmoduleFrame {
    GaugeMatrix frame;

    SubmoduleFrame() = default;
    SubmoduleFrame(GaugeMatrix g, const Chart& chart) : frame(std::move(g)) {
        for (std::size_t i = 0; i < frame.Q.rows(); ++i)
            for (std::size_t j = 0; j < frame.Q.cols(); ++j) {
                if (!poles_only_on(frame.Q.at(i, j), chart))
                    throw ValidationError("frame has a pole off the divisor");
                if (!is_holomorphic_on_chart(frame.Qinv.at(i, j), chart))
                    throw ValidationError("frame inverse is not holomorphic (TM not contained in E)");
            }
    }

    static SubmoduleFrame identity(const Chart& chart) {
        return SubmoduleFrame(GaugeMatrix::identity(chart.nvars, chart.nvars), chart);
    }
};

struct TorsionTensor {
    std::vector<RatMat> T; // T[k].at(i,j) = Gamma^k_{ij} - Gamma^k_{ji}

    bool is_zero() const {
        for (const auto& m : T)
            if (!rat_is_zero(m)) return false;
        return true;
    }
    const RationalFn& at(std::size_t k, std::size_t i, std::size_t j) const { return T[k].at(i, j); }
};

struct CurvatureTensor {
    std::size_t nvars = 0;
    std::size_t rank = 0;
    std::vector<RatMat> blocks; // R_{ij} for i < j, flattened

    const RatMat& block(std::size_t i, std::size_t j) const { return blocks[index(i, j)]; }
    std::size_t index(std::size_t i, std::size_t j) const {
        // caller passes i < j
        return i * nvars - i * (i + 1) / 2 + (j - i - 1);
    }
    bool is_zero() const {
        for (const auto& m : blocks)
            if (!rat_is_zero(m)) return false;
        return true;
    }
};

inline LinearMeromorphicSystem gauge_transform(const LinearMeromorphicSystem& system,
                                               const GaugeMatrix& gauge) {
    auto hints = system.chart.divisor_polys();
    std::vector<RatMat> out;
    out.reserve(system.matrices.size());
    for (std::size_t i = 0; i < system.matrices.size(); ++i) {
        RatMat a = gauge.Qinv * rat_partial(gauge.Q, i) + gauge.Qinv * system.matrices[i] * gauge.Q;
        out.push_back(rat_reduce_by(std::move(a), hints));
    }
    return LinearMeromorphicSystem(system.chart, std::move(out), false);
}

inline TorsionTensor torsion(const ChartConnection& conn) {
    std::size_t n = conn.nvars();
    TorsionTensor t;
    t.T.assign(n, rat_zero(n, n, n));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                t.T[k].at(i, j) = conn.gamma(k, i, j) - conn.gamma(k, j, i);
    return t;
}

// R_{ij} = d_i A_j - d_j A_i + A_i A_j - A_j A_i, exact.
inline CurvatureTensor curvature(const LinearMeromorphicSystem& system) {
    std::size_t n = system.chart.nvars;
    auto hints = system.chart.divisor_polys();
    CurvatureTensor r;
    r.nvars = n;
    r.rank = system.rank;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            RatMat blk = rat_partial(system.matrices[j], i) - rat_partial(system.matrices[i], j) +
                         system.matrices[i] * system.matrices[j] -
                         system.matrices[j] * system.matrices[i];
            r.blocks.push_back(rat_reduce_by(std::move(blk), hints));
        }
    return r;
}

inline CurvatureTensor curvature(const ChartConnection& conn) { return curvature(conn.system()); }

struct NullMorphism {};

using PullbackResult = std::variant<NullMorphism, LinearMeromorphicSystem>;

// Pullback of the system along a polynomial curve C -> C^n.  When the curve
// lies inside the polar divisor the target module collapses and the result is
// the null morphism; the concrete detection is that some divisor component
// vanishes identically along the curve while the system genuinely has a pole
// on that component.
inline PullbackResult pullback_along_curve(const LinearMeromorphicSystem& system,
                                           const std::vector<MultiPoly>& curve,
                                           const std::string& param_name = "t") {
    std::size_t n = system.chart.nvars;
    if (curve.size() != n) throw ValidationError("curve component count mismatch");
    for (const auto& c : curve)
        if (c.nvars() != 1) throw ValidationError("curve components must be univariate");

    for (const auto& q : system.chart.divisor) {
        MultiPoly restricted = q.poly.compose(curve);
        if (!restricted.is_zero()) continue;
        bool has_pole = false;
        for (const auto& m : system.matrices)
            for (std::size_t a = 0; a < m.rows() && !has_pole; ++a)
                for (std::size_t b = 0; b < m.cols() && !has_pole; ++b)
                    if (!order_at_least(m.at(a, b), q, 0)) has_pole = true;
        if (has_pole) return NullMorphism{};
    }

    std::vector<DivisorComponent> pulled;
    for (const auto& q : system.chart.divisor) {
        MultiPoly restricted = q.poly.compose(curve);
        if (!restricted.is_zero() && !restricted.is_constant())
            pulled.emplace_back(restricted, q.multiplicity, q.label);
    }
    Chart line({param_name}, std::move(pulled));

    RatMat acc = rat_zero(system.rank, system.rank, 1);
    for (std::size_t i = 0; i < n; ++i) {
        MultiPoly dgi = curve[i].derivative(0);
        if (dgi.is_zero()) continue;
        RatMat sub = rat_compose(system.matrices[i], curve);
        RationalFn speed{dgi};
        sub = sub.map([&](const RationalFn& f) { return f * speed; });
        acc = acc + sub;
    }
    auto hints = line.divisor_polys();
    acc = rat_reduce_by(std::move(acc), hints);
    return LinearMeromorphicSystem(std::move(line), {std::move(acc)}, false);
}

struct BranchedVerdict {
    bool branched = false;
    LinearMeromorphicSystem gauged; // connection form in the frame basis
    std::vector<std::string> offending_entries;

    explicit operator bool() const { return branched; }
};

// A connection is branched with respect to the frame iff its matrix form in
// the frame basis is holomorphic on the whole chart.
inline BranchedVerdict is_branched(const ChartConnection& conn, const SubmoduleFrame& frame) {
    BranchedVerdict v;
    v.gauged = gauge_transform(conn.system(), frame.frame);
    v.branched = true;
    for (std::size_t i = 0; i < v.gauged.matrices.size(); ++i)
        for (std::size_t a = 0; a < v.gauged.rank; ++a)
            for (std::size_t b = 0; b < v.gauged.rank; ++b)
                if (!is_holomorphic_on_chart(v.gauged.matrices[i].at(a, b), conn.chart)) {
                    v.branched = false;
                    v.offending_entries.push_back("A_" + std::to_string(i + 1) + "[" +
                                                  std::to_string(a + 1) + "," +
                                                  std::to_string(b + 1) + "]");
                }
    return v;
}

// --- affine Lie algebra g = C^n (semidirect) gl_n -------------------------
//
// Graded basis: e_1..e_n (translations), then elementary matrices E_{kl} in
// row-major order.  Index of E_{kl} is n + k*n + l.

inline std::size_t affine_dim(std::size_t n) { return n + n * n; }

// ad(v, A) as an End(g) matrix in the graded basis: acting on (w, B) it gives
// (A w - B v, [A, B]).
inline RatMat affine_ad(const std::vector<RationalFn>& v, const RatMat& a, std::size_t nvars) {
    std::size_t n = v.size();
    std::size_t N = affine_dim(n);
    RatMat m = rat_zero(N, N, nvars);
    // on translations e_c: (A e_c, 0)
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d) m.at(d, c) = a.at(d, c);
    // on E_{kl}: (-v_l e_k, A E_{kl} - E_{kl} A)
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
            std::size_t col = n + k * n + l;
            m.at(k, col) = -v[l];
            for (std::size_t aa = 0; aa < n; ++aa) {
                // A E_{kl} = sum_a A_{ak} E_{al}
                m.at(n + aa * n + l, col) += a.at(aa, k);
                // E_{kl} A = sum_b A_{lb} E_{kb}
                m.at(n + k * n + aa, col) -= a.at(l, aa);
            }
        }
    return m;
}

// Cartan curvature coefficients of the induced affine Cartan geometry at the
// frame-bundle point (z, g = Id), against the graded basis of g.  Only the
// g_- x g_- slots can be nonzero; the g_- part carries the frame-basis
// torsion and the p part the frame-basis curvature.
struct CartanStructure {
    std::size_t n = 0;
    std::vector<std::complex<double>> coeffs; // indexed k*N*N + i*N + j, k,i,j < N

    std::size_t N() const { return affine_dim(n); }
    std::complex<double> at(std::size_t k, std::size_t i, std::size_t j) const {
        std::size_t Nn = N();
        return coeffs[k * Nn * Nn + i * Nn + j];
    }
};

inline CartanStructure cartan_structure_functions(const ChartConnection& conn,
                                                  const SubmoduleFrame& frame,
                                                  const std::vector<std::complex<double>>& point,
                                                  double eval_floor = 1e-13) {
    std::size_t n = conn.nvars();
    std::size_t N = affine_dim(n);
    const RatMat& Q = frame.frame.Q;
    const RatMat& Qi = frame.frame.Qinv;

    LinearMeromorphicSystem gauged = gauge_transform(conn.system(), frame.frame);
    CurvatureTensor R = curvature(gauged); // frame-basis curvature
    TorsionTensor T = torsion(conn);       // coordinate torsion, tensorial

    Eigen::MatrixXcd Qv = rat_eval(Q, point, eval_floor);
    Eigen::MatrixXcd Qiv = rat_eval(Qi, point, eval_floor);

    CartanStructure cs;
    cs.n = n;
    cs.coeffs.assign(N * N * N, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            // torsion of the frame fields, expressed in the frame basis
            Eigen::VectorXcd tor(n);
            for (std::size_t k = 0; k < n; ++k) {
                std::complex<double> acc = 0.0;
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = 0; b < n; ++b) {
                        const RationalFn& tk = T.T[k].at(a, b);
                        if (tk.is_zero()) continue;
                        acc += tk.eval(point, eval_floor) * Qv(a, i) * Qv(b, j);
                    }
                tor(k) = acc;
            }
            tor = Qiv * tor;
            // R(Y_i, Y_j) in the frame basis: the gauged curvature blocks are
            // frame-basis valued but their 2-form legs are coordinate legs,
            // so contract those with the frame components.
            Eigen::MatrixXcd contracted = Eigen::MatrixXcd::Zero(n, n);
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = a + 1; b < n; ++b) {
                    Eigen::MatrixXcd Rab = rat_eval(R.block(a, b), point, eval_floor);
                    contracted += (Qv(a, i) * Qv(b, j) - Qv(b, i) * Qv(a, j)) * Rab;
                }
            for (std::size_t k = 0; k < n; ++k) cs.coeffs[k * N * N + i * N + j] = tor(k);
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = 0; l < n; ++l)
                    cs.coeffs[(n + k * n + l) * N * N + i * N + j] = contracted(k, l);
        }
    return cs;
}

// Trace of the tractor-connection curvature ad(d w0) + ad(w0 ^ w0), assembled
// at the canonical section g = Id.  Returns the n x n antisymmetric matrix of
// 2-form components C(i,j); for the affine algebra tr(ad(v, A)) = tr(A).
inline RatMat tractor_curvature_trace(const ChartConnection& conn, const SubmoduleFrame& frame) {
    std::size_t n = conn.nvars();
    auto hints = conn.chart.divisor_polys();
    LinearMeromorphicSystem gauged = gauge_transform(conn.system(), frame.frame);
    const RatMat& Qi = frame.frame.Qinv;

    // w0 = sum_i dz_i (x) W_i with W_i = (Qinv column i, gauged A_i)
    std::vector<std::vector<RationalFn>> wv(n);
    for (std::size_t i = 0; i < n; ++i) {
        wv[i].reserve(n);
        for (std::size_t d = 0; d < n; ++d) wv[i].push_back(Qi.at(d, i));
    }

    RatMat out = rat_zero(n, n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            // curvature element F_ij = d_i W_j - d_j W_i + [W_i, W_j] in g
            std::vector<RationalFn> fv(n, RationalFn::zero(n));
            for (std::size_t d = 0; d < n; ++d)
                fv[d] = wv[j][d].partial(i) - wv[i][d].partial(j);
            RatMat fm = rat_partial(gauged.matrices[j], i) - rat_partial(gauged.matrices[i], j);
            // bracket [(v,A),(w,B)] = (A w - B v, [A,B])
            for (std::size_t d = 0; d < n; ++d) {
                RationalFn acc = RationalFn::zero(n);
                for (std::size_t c = 0; c < n; ++c)
                    acc += gauged.matrices[i].at(d, c) * wv[j][c] -
                           gauged.matrices[j].at(d, c) * wv[i][c];
                fv[d] += acc;
            }
            fm = fm + gauged.matrices[i] * gauged.matrices[j] -
                 gauged.matrices[j] * gauged.matrices[i];
            RatMat ad = affine_ad(fv, fm, n);
            RationalFn trace = RationalFn::zero(n);
            for (std::size_t d = 0; d < affine_dim(n); ++d) trace += ad.at(d, d);
            trace.reduce_by(hints);
            out.at(i, j) = trace;
            out.at(j, i) = -trace;
        }
    return out;
}

// Christoffel matrices of the connection that makes the given frame parallel:
// A_i = -(d_i Q) Qinv.
inline ChartConnection frame_parallel_connection(const Chart& chart, const GaugeMatrix& frame) {
    std::size_t n = chart.nvars;
    auto hints = chart.divisor_polys();
    std::vector<RatMat> mats;
    mats.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        RatMat a = rat_zero(n, n, n) - rat_partial(frame.Q, i) * frame.Qinv;
        mats.push_back(rat_reduce_by(std::move(a), hints));
    }
    return ChartConnection(chart, std::move(mats));
}

} // namespace meroconn
