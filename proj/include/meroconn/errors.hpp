#pragma once

#include <stdexcept>
#include <string>

namespace meroconn {

struct ParseError : std::runtime_error {
    int line = 0;
    int column = 0;
    ParseError(std::string msg, int l, int c)
        : std::runtime_error(std::move(msg)), line(l), column(c) {}
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when an operation requires a pole-free function on a divisor component.
struct PoleOnComponent : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric evaluation too close to a zero of the denominator.
struct NearPoleEvaluation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Trajectory came within the pole guard distance of the divisor.
struct PoleApproach : std::runtime_error {
    double last_time = 0.0;
    explicit PoleApproach(std::string msg, double t = 0.0)
        : std::runtime_error(std::move(msg)), last_time(t) {}
};

struct StepUnderflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotBranched : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedComponent : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateTransversal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuotientIllDefined : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StabilizationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All numeric thresholds used by the toolkit, with their defaults.  Every
// tolerance that appears in a verdict is taken from here so reports can echo
// the exact configuration.
struct Tolerances {
    double eval_floor = 1e-13;          // |den| floor for numeric evaluation
    double pole_approach = 1e-8;        // geodesic halt distance to the divisor
    double rhs_pole_guard = 1e-10;      // geodesic_rhs precondition distance
    double det_floor = 1e-10;           // frame determinant monitor
    double rk_abs = 1e-10;              // geodesic integrator tolerances
    double rk_rel = 1e-10;
    double transport_tol = 1e-11;       // linear transport integrator tolerance
    double crossing_refine = 1e-12;     // parameter refinement width
    double crossing_hit = 1e-9;         // |q| considered an actual crossing
    double transversality = 1e-8;       // |d/dt q| threshold at a crossing
    double rank_svd = 1e-9;             // singular value cutoff for jet ranks
    double principal_angle = 1e-6;      // subspace agreement tolerance
    double monodromy_trivial = 1e-6;    // ||M - I|| triviality threshold
    double eigen_integer = 1e-8;        // residue eigenvalue integrality
    double eigen_condition = 1e8;       // diagonalizability condition bound
    double min_divisor_distance = 1e-6; // loops must keep this distance
    double loop_closure = 1e-12;
    double transport_pole_guard = 1e-8;
    int spiral_budget = 64;             // point-direction pairs per component
    unsigned long long seed = 0;
};

} // namespace meroconn
