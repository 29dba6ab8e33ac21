#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace meroconn {

using CVec = std::vector<std::complex<double>>;

struct OdeOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_steps = 400000;
    double initial_step = 1e-3;
};

struct OdeSample {
    double t = 0.0;
    CVec y;
    CVec dy;
};

enum class OdeStatus { Completed, Halted, StepUnderflow };

struct OdeResult {
    std::vector<OdeSample> samples;
    OdeStatus status = OdeStatus::Completed;
    double t_end = 0.0;
};

// Embedded Dormand-Prince 5(4) with standard step-size control.  The guard is
// evaluated at accepted states; returning false halts the integration with
// the last accepted state kept.  The optional poison callback is checked
// after every step attempt: when it reports true the attempt is discarded and
// the step shrunk, so states computed from invalid stage evaluations are
// never accepted; if no step survives, the integration halts at the last
// safe state.
template <class F, class Guard>
OdeResult dp54(F&& f, double t0, double t1, CVec y0, const OdeOptions& opt, Guard&& guard,
               const std::function<bool()>& poison = {}) {
    static const double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static const double a[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static const double b5[7] = {35.0 / 384,      0.0,        500.0 / 1113, 125.0 / 192,
                                 -2187.0 / 6784, 11.0 / 84,  0.0};
    static const double b4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                                 -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

    const std::size_t dim = y0.size();
    const double span = t1 - t0;
    const double dir = span >= 0 ? 1.0 : -1.0;

    OdeResult out;
    double t = t0;
    CVec y = std::move(y0);
    CVec k[7];
    for (auto& kk : k) kk.assign(dim, 0.0);
    CVec ytmp(dim), y5(dim), y4(dim);

    k[0] = f(t, y);
    out.samples.push_back({t, y, k[0]});
    if (!guard(t, y)) {
        out.status = OdeStatus::Halted;
        out.t_end = t;
        return out;
    }

    double h = std::min(std::abs(opt.initial_step), std::abs(span));
    if (h == 0.0) h = 1e-6;
    int steps = 0;
    bool fsal_valid = true;

    while (dir * (t1 - t) > 1e-15 * std::abs(span)) {
        if (++steps > opt.max_steps)
            throw StepUnderflow("dp54: step budget exhausted at t = " + std::to_string(t));
        if (h > std::abs(t1 - t)) h = std::abs(t1 - t);
        double hs = dir * h;

        if (!fsal_valid) k[0] = f(t, y);
        for (int stage = 1; stage < 7; ++stage) {
            for (std::size_t d = 0; d < dim; ++d) {
                std::complex<double> acc = 0.0;
                for (int j = 0; j < stage; ++j) acc += a[stage][j] * k[j][d];
                ytmp[d] = y[d] + hs * acc;
            }
            k[stage] = f(t + c[stage] * hs, ytmp);
        }
        if (poison && poison()) {
            fsal_valid = false;
            h *= 0.2;
            if (h < 1e-14 * std::max(1.0, std::abs(span))) {
                out.status = OdeStatus::Halted;
                out.t_end = t;
                return out;
            }
            continue;
        }
        double err = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            std::complex<double> acc5 = 0.0, acc4 = 0.0;
            for (int j = 0; j < 7; ++j) {
                acc5 += b5[j] * k[j][d];
                acc4 += b4[j] * k[j][d];
            }
            y5[d] = y[d] + hs * acc5;
            y4[d] = y[d] + hs * acc4;
            double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[d]), std::abs(y5[d]));
            err = std::max(err, std::abs(y5[d] - y4[d]) / sc);
        }

        if (err <= 1.0) {
            t += hs;
            y = y5;
            k[0] = k[6]; // FSAL
            fsal_valid = true;
            out.samples.push_back({t, y, f(t, y)});
            if (!guard(t, y)) {
                out.status = OdeStatus::Halted;
                out.t_end = t;
                return out;
            }
        } else {
            fsal_valid = false;
        }
        double factor = 0.9 * std::pow(err > 1e-300 ? 1.0 / err : 1e10, 0.2);
        h *= std::min(5.0, std::max(0.2, factor));
        if (h < 1e-14 * std::max(1.0, std::abs(span))) {
            out.status = OdeStatus::StepUnderflow;
            out.t_end = t;
            return out;
        }
    }
    out.status = OdeStatus::Completed;
    out.t_end = t;
    return out;
}

// --- parametrized paths in C^n --------------------------------------------

struct LineSeg {
    CVec from;
    CVec to;
};

// Circle in the complex line where only `coord` varies; the other coordinates
// are taken from `base`.
struct CircleArc {
    CVec base;
    std::size_t coord = 0;
    std::complex<double> center;
    double radius = 0.0;
    double theta0 = 0.0;
    double theta1 = 0.0;
};

using PathSegment = std::variant<LineSeg, CircleArc>;

inline CVec segment_point(const PathSegment& seg, double s) {
    if (const auto* l = std::get_if<LineSeg>(&seg)) {
        CVec z(l->from.size());
        for (std::size_t d = 0; d < z.size(); ++d) z[d] = l->from[d] + s * (l->to[d] - l->from[d]);
        return z;
    }
    const auto& arc = std::get<CircleArc>(seg);
    CVec z = arc.base;
    double th = arc.theta0 + s * (arc.theta1 - arc.theta0);
    z[arc.coord] = arc.center + arc.radius * std::exp(std::complex<double>(0.0, th));
    return z;
}

inline CVec segment_velocity(const PathSegment& seg, double s) {
    if (const auto* l = std::get_if<LineSeg>(&seg)) {
        CVec v(l->from.size());
        for (std::size_t d = 0; d < v.size(); ++d) v[d] = l->to[d] - l->from[d];
        return v;
    }
    const auto& arc = std::get<CircleArc>(seg);
    CVec v(arc.base.size(), 0.0);
    double th = arc.theta0 + s * (arc.theta1 - arc.theta0);
    v[arc.coord] = arc.radius * (arc.theta1 - arc.theta0) *
                   std::complex<double>(0.0, 1.0) * std::exp(std::complex<double>(0.0, th));
    return v;
}

struct Path {
    std::vector<PathSegment> segments;

    CVec start() const { return segment_point(segments.front(), 0.0); }
    CVec end() const { return segment_point(segments.back(), 1.0); }
};

inline Path polyline(const std::vector<CVec>& vertices) {
    Path p;
    for (std::size_t k = 0; k + 1 < vertices.size(); ++k)
        p.segments.push_back(LineSeg{vertices[k], vertices[k + 1]});
    return p;
}

} // namespace meroconn
