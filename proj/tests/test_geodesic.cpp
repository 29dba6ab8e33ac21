#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "meroconn/distinguished.hpp"
#include "meroconn/geodesic.hpp"
#include "test_util.hpp"

using namespace meroconn;
using testutil::chart2;
using testutil::comp;
using testutil::rf;

namespace {

ChartConnection flat_with_divisor() {
    Chart c = chart2({comp("z1", {"z1", "z2"})});
    return ChartConnection::zero(c);
}

} // namespace

TEST_CASE("geodesic_rhs") {
    ChartConnection flat = flat_with_divisor();
    GeodesicState s{{{0.3, 0.0}, {0.7, 0.0}}, {{1.0, 0.0}, {0.0, 1.0}}};
    GeodesicState d = geodesic_rhs(flat, s);
    CHECK(std::abs(d.v[0]) < 1e-15);
    CHECK(std::abs(d.v[1]) < 1e-15);
    CHECK(std::abs(d.z[0] - s.v[0]) < 1e-15);

    ChartConnection hopf = testutil::hopf_connection();
    GeodesicState h{{{1.0, 0.0}, {0.0, 0.0}}, {{1.0, 0.0}, {0.0, 0.0}}};
    GeodesicState dh = geodesic_rhs(hopf, h);
    CHECK(std::abs(dh.v[0] - std::complex<double>(-1.0, 0.0)) < 1e-14);
    CHECK(std::abs(dh.v[1]) < 1e-14);

    ChartConnection s2 = testutil::scalar_lambda_connection(GaussianRational(2));
    GeodesicState g{{{1.0, 0.0}, {1.0, 0.0}}, {{1.0, 0.0}, {1.0, 0.0}}};
    GeodesicState dg = geodesic_rhs(s2, g);
    CHECK(std::abs(dg.v[0] - std::complex<double>(-2.0, 0.0)) < 1e-14);
    CHECK(std::abs(dg.v[1] - std::complex<double>(-2.0, 0.0)) < 1e-14);

    GeodesicState near{{{1e-12, 0.0}, {0.0, 0.0}}, {{1.0, 0.0}, {0.0, 0.0}}};
    CHECK_THROWS_AS((void)geodesic_rhs(hopf, near), NearPoleEvaluation);
}

TEST_CASE("integrate_geodesic closed forms") {
    // flat on a divisor-free chart: straight line from the origin
    ChartConnection plain = ChartConnection::zero(chart2());
    GeodesicState s0{{{0.0, 0.0}, {0.0, 0.0}}, {{1.0, 0.0}, {0.0, 1.0}}};
    GeodesicTrajectory tr = integrate_geodesic(plain, s0, {{0.0, 0.0}, {1.0, 0.0}});
    REQUIRE(tr.status == TrajectoryStatus::Completed);
    CHECK(std::abs(tr.last().z[0] - std::complex<double>(1.0, 0.0)) < 1e-9);
    CHECK(std::abs(tr.last().z[1] - std::complex<double>(0.0, 1.0)) < 1e-9);

    // flat with a declared divisor, starting off it
    ChartConnection flat = flat_with_divisor();
    GeodesicState s1{{{0.5, 0.0}, {0.1, 0.0}}, {{1.0, 0.0}, {0.0, 1.0}}};
    GeodesicTrajectory tr1 = integrate_geodesic(flat, s1, {{0.0, 0.0}, {1.0, 0.0}});
    REQUIRE(tr1.status == TrajectoryStatus::Completed);
    CHECK(std::abs(tr1.last().z[0] - std::complex<double>(1.5, 0.0)) < 1e-9);

    // Hopf: z1(t)^2 affine in t; z1(3) = 2 from z1(0) = 1, v1 = 1/2
    ChartConnection hopf = testutil::hopf_connection();
    GeodesicState h0{{{1.0, 0.0}, {0.0, 0.0}}, {{0.5, 0.0}, {0.0, 0.0}}};
    GeodesicTrajectory th = integrate_geodesic(hopf, h0, {{0.0, 0.0}, {3.0, 0.0}});
    REQUIRE(th.status == TrajectoryStatus::Completed);
    CHECK(std::abs(th.last().z[0] - std::complex<double>(2.0, 0.0)) < 1e-8);

    // scalar lambda = -1: z1(t) = e^t
    ChartConnection sc = testutil::scalar_lambda_connection(GaussianRational(-1));
    GeodesicState g0{{{1.0, 0.0}, {0.0, 0.0}}, {{1.0, 0.0}, {0.0, 0.0}}};
    GeodesicTrajectory tg = integrate_geodesic(sc, g0, {{0.0, 0.0}, {1.0, 0.0}});
    REQUIRE(tg.status == TrajectoryStatus::Completed);
    CHECK(std::abs(tg.last().z[0] - std::exp(1.0)) < 1e-8);

    // pole approach: Hopf geodesic running into z1 = 0 halts at a safe state
    GeodesicState toward{{{1.0, 0.0}, {0.0, 0.0}}, {{-0.5, 0.0}, {0.0, 0.0}}};
    GeodesicTrajectory tp = integrate_geodesic(hopf, toward, {{0.0, 0.0}, {2.0, 0.0}});
    CHECK(tp.status == TrajectoryStatus::PoleApproach);
    CHECK(std::abs(tp.last().z[0]) < 1e-3);
    CHECK(std::abs(tp.last().z[0]) > 1e-11);

    CHECK_THROWS_AS((void)integrate_geodesic(flat, GeodesicState{s1.z, {{0, 0}, {0, 0}}},
                                             {{0.0, 0.0}, {1.0, 0.0}}),
                    ValidationError);
}

TEST_CASE("distinguished_field symbolics") {
    // flat, identity frame, A = e1: z' = g column 1, g' = 0, m = 1
    ChartConnection flat = flat_with_divisor();
    SubmoduleFrame id = SubmoduleFrame::identity(flat.chart);
    std::vector<GaussianRational> e1 = {GaussianRational(1), GaussianRational(0)};
    DistinguishedField f = distinguished_field(flat, id, e1);
    CHECK(f.clearing.is_constant());
    std::vector<std::string> ext = f.ext_chart.var_names;
    CHECK(f.field[0] == parse_expression("g11", ext));
    CHECK(f.field[1] == parse_expression("g21", ext));
    for (std::size_t k = 2; k < 6; ++k) CHECK(f.field[k].is_zero());

    // Hopf, A = e1, cleared by z1: z1' = g11/2, z2' = z1 g21, g' = 0
    ChartConnection hopf = testutil::hopf_connection();
    SubmoduleFrame frame = testutil::hopf_frame(hopf);
    DistinguishedField fh = distinguished_field(hopf, frame, e1);
    CHECK(fh.clearing == MultiPoly::variable(2, 0));
    CHECK(fh.field[0] == parse_expression("g11/2", ext));
    CHECK(fh.field[1] == parse_expression("z1*g21", ext));
    for (std::size_t k = 2; k < 6; ++k) CHECK(fh.field[k].is_zero());

    // order zero along the cleared component: z1' does not vanish on z1 = 0
    DivisorComponent z1ext(MultiPoly::variable(6, 0), 1, "z1");
    CHECK(order_along(fh.field[0], z1ext) == 0);

    // not branched: gate
    ChartConnection half = testutil::scalar_lambda_connection(GaussianRational::from_ratio(1, 2));
    CHECK_THROWS_AS((void)distinguished_field(half, SubmoduleFrame::identity(half.chart), e1),
                    NotBranched);
    CHECK_THROWS_AS((void)distinguished_field(flat, id, {GaussianRational(0), GaussianRational(0)}),
                    ValidationError);
}

TEST_CASE("distinguished curves cross or hug the divisor as predicted") {
    ChartConnection hopf = testutil::hopf_connection();
    SubmoduleFrame frame = testutil::hopf_frame(hopf);
    std::vector<GaussianRational> e1 = {GaussianRational(1), GaussianRational(0)};
    std::vector<GaussianRational> e2 = {GaussianRational(0), GaussianRational(1)};

    // A = e1 from (-1, 0): z1(t) = -1 + t/2 crosses transversally at t = 2
    DistinguishedField f1 = distinguished_field(hopf, frame, e1);
    FrameBundlePoint start = FrameBundlePoint::identity_frame({{-1.0, 0.0}, {0.0, 0.0}}, 2);
    CurveOptions opts;
    opts.t_end = 3.0;
    DistinguishedCurveResult r1 = integrate_distinguished_curve(f1, start, opts);
    REQUIRE(r1.status == CurveStatus::Completed);
    REQUIRE(r1.crossing.has_value());
    CHECK(r1.crossing->transversal);
    CHECK(std::abs(r1.crossing->parameter - 2.0) < 1e-6);
    CHECK(std::abs(r1.crossing->dq_dt - std::complex<double>(0.5, 0.0)) < 1e-8);
    for (const auto& s : r1.samples) CHECK(std::abs(s.point.z[1]) < 1e-12);

    // h_factor samples the clearing monomial z1 along the curve
    for (std::size_t k = 0; k < r1.samples.size(); ++k)
        CHECK(std::abs(r1.h_factor[k] - r1.samples[k].point.z[0]) < 1e-12);

    // flat with declared divisor, A = e2 from the origin: motion inside z1 = 0
    ChartConnection flat = flat_with_divisor();
    DistinguishedField f2 =
        distinguished_field(flat, SubmoduleFrame::identity(flat.chart), e2);
    FrameBundlePoint origin = FrameBundlePoint::identity_frame({{0.0, 0.0}, {0.0, 0.0}}, 2);
    DistinguishedCurveResult r2 = integrate_distinguished_curve(f2, origin, opts);
    REQUIRE(r2.crossing.has_value());
    CHECK_FALSE(r2.crossing->transversal);
    for (const auto& s : r2.samples) CHECK(std::abs(s.point.z[0]) < 1e-12);

    // Hopf, A = e2 from the origin: tangent to the divisor, non-transverse
    DistinguishedField f3 = distinguished_field(hopf, frame, e2);
    DistinguishedCurveResult r3 = integrate_distinguished_curve(f3, origin, opts);
    REQUIRE(r3.crossing.has_value());
    CHECK_FALSE(r3.crossing->transversal);
}

TEST_CASE("curve samples satisfy the cleared ODE between steps") {
    ChartConnection hopf = testutil::hopf_connection();
    SubmoduleFrame frame = testutil::hopf_frame(hopf);
    std::vector<GaussianRational> e1 = {GaussianRational(1), GaussianRational(0)};
    DistinguishedField fld = distinguished_field(hopf, frame, e1);
    FrameBundlePoint start = FrameBundlePoint::identity_frame({{-1.0, 0.0}, {0.3, 0.0}}, 2);
    DistinguishedCurveResult r = integrate_distinguished_curve(fld, start);
    REQUIRE(r.samples.size() >= 2);
    Tolerances tol;
    for (std::size_t k = 0; k + 1 < r.samples.size(); k += std::max<std::size_t>(1, r.samples.size() / 5)) {
        CVec y0(6), y1(6);
        for (int d = 0; d < 2; ++d) {
            y0[d] = r.samples[k].point.z[d];
            y1[d] = r.samples[k + 1].point.z[d];
        }
        for (int d = 0; d < 4; ++d) {
            y0[2 + d] = r.samples[k].point.g[d];
            y1[2 + d] = r.samples[k + 1].point.g[d];
        }
        OdeOptions tight;
        tight.abs_tol = 1e-13;
        tight.rel_tol = 1e-13;
        OdeResult re = dp54([&](double, const CVec& y) { return fld.eval(y); },
                            r.samples[k].t, r.samples[k + 1].t, y0, tight,
                            [](double, const CVec&) { return true; });
        double err = 0.0;
        for (std::size_t d = 0; d < 6; ++d)
            err = std::max(err, std::abs(re.samples.back().y[d] - y1[d]));
        CHECK(err < 1e-8);
    }
}

TEST_CASE("reparametrization consistency along distinguished curves") {
    // flat: straight lines, residual at rounding level
    ChartConnection flat = flat_with_divisor();
    std::vector<GaussianRational> e1 = {GaussianRational(1), GaussianRational(0)};
    DistinguishedField ff = distinguished_field(flat, SubmoduleFrame::identity(flat.chart), e1);
    FrameBundlePoint fs = FrameBundlePoint::identity_frame({{1.0, 0.0}, {0.5, 0.0}}, 2);
    DistinguishedCurveResult fr = integrate_distinguished_curve(ff, fs);
    for (const auto& s : fr.samples) {
        CVec y(6);
        for (int d = 0; d < 2; ++d) y[d] = s.point.z[d];
        for (int d = 0; d < 4; ++d) y[2 + d] = s.point.g[d];
        CHECK(reparametrization_residual(flat, ff, y) < 1e-10);
    }

    // Hopf: residual below 1e-6 at pole-free samples
    ChartConnection hopf = testutil::hopf_connection();
    SubmoduleFrame frame = testutil::hopf_frame(hopf);
    DistinguishedField fh = distinguished_field(hopf, frame, e1);
    FrameBundlePoint hs = FrameBundlePoint::identity_frame({{-1.0, 0.0}, {0.2, 0.0}}, 2);
    CurveOptions opts;
    opts.t_end = 3.0;
    DistinguishedCurveResult hr = integrate_distinguished_curve(fh, hs, opts);
    int checked = 0;
    for (const auto& s : hr.samples) {
        if (std::abs(s.point.z[0]) < 1e-2) continue;
        CVec y(6);
        for (int d = 0; d < 2; ++d) y[d] = s.point.z[d];
        for (int d = 0; d < 4; ++d) y[2 + d] = s.point.g[d];
        CHECK(reparametrization_residual(hopf, fh, y) < 1e-6);
        ++checked;
    }
    CHECK(checked > 3);
}

TEST_CASE("geodesic and distinguished projections agree off the divisor") {
    ChartConnection hopf = testutil::hopf_connection();
    SubmoduleFrame frame = testutil::hopf_frame(hopf);
    std::vector<GaussianRational> e1 = {GaussianRational(1), GaussianRational(0)};
    DistinguishedField fld = distinguished_field(hopf, frame, e1);

    // integrate (z, g, s) with s the arclength-normalizing quadrature ds/dt = m
    CVec y0 = {std::complex<double>(1.0, 0.0), std::complex<double>(0.5, 0.0),
               1.0, 0.0, 0.0, 1.0, 0.0};
    auto f = [&](double, const CVec& y) {
        CVec core(y.begin(), y.begin() + 6);
        CVec d = fld.eval(core);
        CVec z(y.begin(), y.begin() + 2);
        d.push_back(fld.clearing.eval(z));
        return d;
    };
    OdeOptions opt;
    opt.abs_tol = 1e-12;
    opt.rel_tol = 1e-12;
    OdeResult run = dp54(f, 0.0, 1.5, y0, opt, [](double, const CVec&) { return true; });
    REQUIRE(run.status == OdeStatus::Completed);

    // geodesic start: velocity = uncleared field value Q g A at the start
    GeodesicState g0;
    g0.z = {y0[0], y0[1]};
    g0.v = {std::complex<double>(0.5, 0.0), std::complex<double>(0.0, 0.0)}; // Q(z0) Id e1
    std::vector<std::complex<double>> times = {{0.0, 0.0}};
    std::vector<const OdeSample*> picked;
    for (std::size_t k = 1; k < run.samples.size() && picked.size() < 8; ++k) {
        picked.push_back(&run.samples[k]);
        times.push_back(run.samples[k].y[6]);
    }
    REQUIRE(picked.size() >= 2);
    GeodesicTrajectory tr = integrate_geodesic(hopf, g0, times);
    REQUIRE(tr.status == TrajectoryStatus::Completed);

    for (const auto* s : picked) {
        std::complex<double> target_time = s->y[6];
        double best = 1e9;
        for (const auto& gs : tr.samples) {
            if (std::abs(gs.t - target_time) > 1e-12) continue;
            double d = std::max(std::abs(gs.z[0] - s->y[0]), std::abs(gs.z[1] - s->y[1]));
            best = std::min(best, d);
        }
        CHECK(best < 1e-7);
    }
}

TEST_CASE("classify_A01") {
    ChartConnection hopf = testutil::hopf_connection();
    CHECK(classify_A01(hopf, hopf.chart.divisor[0]));

    Chart c = chart2({comp("z1", {"z1", "z2"})});
    ChartConnection bad = ChartConnection::zero(c);
    bad.set_gamma(0, 1, 1, rf("1", c)); // c_2 = 1 cannot vanish on the divisor
    CHECK_FALSE(classify_A01(bad, c.divisor[0]));

    ChartConnection pole = ChartConnection::zero(c);
    pole.set_gamma(1, 1, 1, rf("1/z1", c)); // d_2 has a pole
    CHECK_FALSE(classify_A01(pole, c.divisor[0]));

    // a curved graph component z1 = z2^2: straightening injects the
    // second-derivative term 2 into c_2, so the connection must supply -2
    // for the component to carry interior geodesics
    Chart cp = chart2({comp("z1 - z2^2", {"z1", "z2"})});
    ChartConnection onpar = ChartConnection::zero(cp);
    onpar.set_gamma(0, 1, 1, rf("z1 - z2^2 - 2", cp));
    CHECK(classify_A01(onpar, cp.divisor[0]));

    ChartConnection offpar = ChartConnection::zero(cp);
    offpar.set_gamma(0, 1, 1, rf("z1 - z2^2", cp)); // vanishes on D but c_2 = w1 + 2
    CHECK_FALSE(classify_A01(offpar, cp.divisor[0]));
}

TEST_CASE("classify_A01 is invariant under linear changes preserving the component") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> coeff(-3, 3);
    Chart c = chart2({comp("z1", {"z1", "z2"})});

    ChartConnection good = ChartConnection::zero(c);
    good.set_gamma(0, 1, 1, rf("z1*(1+z2)", c));
    good.set_gamma(1, 1, 1, rf("z2^2", c));
    good.set_gamma(0, 0, 0, rf("1/z1", c));

    ChartConnection bad = ChartConnection::zero(c);
    bad.set_gamma(0, 1, 1, rf("1 + z1", c));

    for (int trial = 0; trial < 10; ++trial) {
        int a = 0, cc = 0, b;
        while (a == 0) a = coeff(rng);
        while (cc == 0) cc = coeff(rng);
        b = coeff(rng);
        // z1 = a w1, z2 = b w1 + c w2 preserves {z1 = 0}
        std::vector<MultiPoly> fwd = {
            MultiPoly::variable(2, 0).scaled(GaussianRational(a)),
            MultiPoly::variable(2, 0).scaled(GaussianRational(b)) +
                MultiPoly::variable(2, 1).scaled(GaussianRational(cc))};
        std::vector<MultiPoly> inv = {
            MultiPoly::variable(2, 0).scaled(GaussianRational(1) / GaussianRational(a)),
            MultiPoly::variable(2, 1).scaled(GaussianRational(1) / GaussianRational(cc)) -
                MultiPoly::variable(2, 0).scaled(GaussianRational(b) /
                                                 (GaussianRational(a) * GaussianRational(cc)))};
        CoordinateChange chg(fwd, inv, {"w1", "w2"});
        ChartConnection good2 = transform_connection(good, chg);
        ChartConnection bad2 = transform_connection(bad, chg);
        CHECK(classify_A01(good2, good2.chart.divisor[0]) ==
              classify_A01(good, good.chart.divisor[0]));
        CHECK(classify_A01(bad2, bad2.chart.divisor[0]) ==
              classify_A01(bad, bad.chart.divisor[0]));
    }
}

TEST_CASE("spiral_search finds witnesses") {
    ChartConnection hopf = testutil::hopf_connection();
    SubmoduleFrame frame = testutil::hopf_frame(hopf);
    auto w = spiral_search(hopf, frame, 0);
    REQUIRE(w.has_value());
    CHECK(w->direction[0] == GaussianRational(1)); // e1 is tried first and succeeds
    CHECK(w->direction[1] == GaussianRational(0));
    CHECK(w->crossing.transversal);

    // replay: the witness re-integrates to a transversal crossing
    DistinguishedField fld = distinguished_field(hopf, frame, w->direction);
    FrameBundlePoint start = FrameBundlePoint::identity_frame(w->base_point, 2);
    DistinguishedCurveResult replay = integrate_distinguished_curve(fld, start);
    REQUIRE(replay.crossing.has_value());
    CHECK(replay.crossing->transversal);

    ChartConnection flat = flat_with_divisor();
    auto wf = spiral_search(flat, SubmoduleFrame::identity(flat.chart), 0);
    REQUIRE(wf.has_value());
    CHECK(wf->crossing.transversal);

    // NotBranched gate: d + (dz2/z1) Id as an affine connection, identity frame
    Chart c = chart2({comp("z1", {"z1", "z2"})});
    ChartConnection iso = ChartConnection::zero(c);
    iso.set_gamma(0, 1, 0, rf("1/z1", c));
    iso.set_gamma(1, 1, 1, rf("1/z1", c));
    CHECK_THROWS_AS((void)spiral_search(iso, SubmoduleFrame::identity(c), 0), NotBranched);
}

TEST_CASE("strong_spiral_test") {
    ChartConnection hopf = testutil::hopf_connection();
    SubmoduleFrame frame = testutil::hopf_frame(hopf);
    std::vector<GaussianRational> e1 = {GaussianRational(1), GaussianRational(0)};
    std::vector<GaussianRational> e2 = {GaussianRational(0), GaussianRational(1)};
    CHECK(strong_spiral_test(hopf, frame, 0, e1));
    CHECK_FALSE(strong_spiral_test(hopf, frame, 0, e2));

    ChartConnection flat = flat_with_divisor();
    CHECK(strong_spiral_test(flat, SubmoduleFrame::identity(flat.chart), 0, e1));
}
