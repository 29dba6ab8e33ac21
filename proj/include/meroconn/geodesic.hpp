#pragma once

#include <complex>
#include <vector>

#include "connection.hpp"
#include "errors.hpp"
#include "ode.hpp"

namespace meroconn {

struct GeodesicState {
    CVec z;
    CVec v;
    std::complex<double> t{0.0, 0.0};
};

// z' = v, v'^k = -sum_{ij} Gamma^k_{ij} v_i v_j
inline GeodesicState geodesic_rhs(const ChartConnection& conn, const GeodesicState& state,
                                  const Tolerances& tol = {}) {
    std::size_t n = conn.nvars();
    for (const auto& q : conn.chart.divisor)
        if (std::abs(q.poly.eval(state.z)) < tol.rhs_pole_guard)
            throw NearPoleEvaluation("geodesic_rhs: state too close to divisor component " + q.label);
    GeodesicState d;
    d.z = state.v;
    d.v.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const RationalFn& g = conn.gamma(k, i, j);
                if (g.is_zero()) continue;
                acc -= g.eval(state.z, tol.eval_floor) * state.v[i] * state.v[j];
            }
        d.v[k] = acc;
    }
    return d;
}

enum class TrajectoryStatus { Completed, PoleApproach, StepUnderflow };

struct GeodesicSample {
    std::complex<double> t;
    CVec z;
    CVec v;
};

struct GeodesicTrajectory {
    std::vector<GeodesicSample> samples;
    TrajectoryStatus status = TrajectoryStatus::Completed;

    const GeodesicSample& last() const { return samples.back(); }
};

// Integrates the geodesic along a polyline of complex times.  Halts with
// PoleApproach status when any divisor polynomial modulus drops below the
// configured guard, keeping the last safe state.
inline GeodesicTrajectory integrate_geodesic(const ChartConnection& conn,
                                             const GeodesicState& initial,
                                             const std::vector<std::complex<double>>& time_points,
                                             const Tolerances& tol = {}) {
    std::size_t n = conn.nvars();
    double vnorm = 0.0;
    for (auto c : initial.v) vnorm += std::norm(c);
    if (vnorm == 0.0) throw ValidationError("integrate_geodesic: zero initial velocity");
    if (time_points.size() < 2) throw ValidationError("integrate_geodesic: need a time segment");

    GeodesicTrajectory out;
    CVec y(2 * n);
    for (std::size_t d = 0; d < n; ++d) {
        y[d] = initial.z[d];
        y[n + d] = initial.v[d];
    }

    OdeOptions opt;
    opt.abs_tol = tol.rk_abs;
    opt.rel_tol = tol.rk_rel;

    for (std::size_t leg = 0; leg + 1 < time_points.size(); ++leg) {
        std::complex<double> t0 = time_points[leg];
        std::complex<double> dt = time_points[leg + 1] - time_points[leg];
        // A stage evaluation can land closer to the divisor than any accepted
        // state; the stepper's poison protocol discards such attempts so only
        // safe states are ever accepted.
        bool stage_pole = false;
        auto f = [&](double, const CVec& state) {
            CVec dy(2 * n, std::complex<double>(0.0, 0.0));
            if (stage_pole) return dy;
            GeodesicState s;
            s.z.assign(state.begin(), state.begin() + n);
            s.v.assign(state.begin() + n, state.end());
            try {
                GeodesicState d = geodesic_rhs(conn, s, tol);
                for (std::size_t k = 0; k < n; ++k) {
                    dy[k] = dt * d.z[k];
                    dy[n + k] = dt * d.v[k];
                }
            } catch (const NearPoleEvaluation&) {
                stage_pole = true;
            }
            return dy;
        };
        auto poison = [&]() {
            bool p = stage_pole;
            stage_pole = false;
            return p;
        };
        auto guard = [&](double, const CVec& state) {
            for (const auto& q : conn.chart.divisor) {
                CVec z(state.begin(), state.begin() + n);
                if (std::abs(q.poly.eval(z)) < tol.pole_approach) return false;
            }
            return true;
        };
        OdeResult r = dp54(f, 0.0, 1.0, y, opt, guard, poison);
        for (const auto& s : r.samples) {
            GeodesicSample gs;
            gs.t = t0 + s.t * dt;
            gs.z.assign(s.y.begin(), s.y.begin() + n);
            gs.v.assign(s.y.begin() + n, s.y.end());
            out.samples.push_back(std::move(gs));
        }
        if (r.status == OdeStatus::StepUnderflow) {
            out.status = TrajectoryStatus::StepUnderflow;
            return out;
        }
        if (r.status == OdeStatus::Halted) {
            // the only halt causes here are the divisor guard and poisoning
            out.status = TrajectoryStatus::PoleApproach;
            return out;
        }
        y = r.samples.back().y;
    }
    out.status = TrajectoryStatus::Completed;
    return out;
}

} // namespace meroconn
