#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "edslab/blockdiag.hpp"

#include <cmath>

using namespace edslab;

namespace {

const ProlongedSystem& P() {
    static ProlongedSystem p = prolong();
    return p;
}

const ConstraintLocus& L() {
    static ConstraintLocus l = restrict_to_S(P());
    return l;
}

Form omega(const FrameBundle& fb, int a) { return Form::generator(fb.omega_id(a)); }

} // namespace

TEST_CASE("second derivative of the coframe is curvature, killed by the cyclic identity") {
    FrameBundle fb = frame_bundle_context();
    Form dd = exterior_derivative(fb.ctx.structure.at(fb.omega_id(1)), fb.ctx);
    Form expected(3);
    for (int b = 2; b <= 4; ++b) {
        Form curv(2);
        for (int c = 1; c <= 4; ++c)
            for (int d = c + 1; d <= 4; ++d)
                curv.add_term({fb.omega_id(c), fb.omega_id(d)}, RiemannIndex::component(1, b, c, d));
        expected -= wedge(curv, omega(fb, b));
    }
    CHECK(dd == expected);
    fb.ctx.first_bianchi = true;
    CHECK(exterior_derivative(fb.ctx.structure.at(fb.omega_id(1)), fb.ctx).is_zero());
}

TEST_CASE("the four block 4-forms expand exactly as printed") {
    FrameBundle fb = frame_bundle_context();
    ExteriorSystem sys = build_theta_system();
    auto w = [&](int a) { return fb.omega_id(a); };
    auto c = [&](int a, int b) { return fb.conn_id(a, b); };
    Form t1(4), t2(4), t3(4), t4(4);
    t1.add_term({w(1), w(2), w(3), c(1, 3)}, Scalar(1));
    t1.add_term({w(1), w(2), w(4), c(1, 4)}, Scalar(1));
    t2.add_term({w(1), w(2), w(3), c(2, 3)}, Scalar(1));
    t2.add_term({w(1), w(2), w(4), c(2, 4)}, Scalar(1));
    t3.add_term({w(1), w(3), w(4), c(1, 3)}, Scalar(-1));
    t3.add_term({w(2), w(3), w(4), c(2, 3)}, Scalar(-1));
    t4.add_term({w(1), w(3), w(4), c(1, 4)}, Scalar(-1));
    t4.add_term({w(2), w(3), w(4), c(2, 4)}, Scalar(-1));
    REQUIRE(sys.generators.size() == 4);
    CHECK(sys.generators[0] == t1);
    CHECK(sys.generators[1] == t2);
    CHECK(sys.generators[2] == t3);
    CHECK(sys.generators[3] == t4);
    Form vol(4);
    vol.add_term({w(1), w(2), w(3), w(4)}, Scalar(1));
    CHECK(sys.independence == vol);
}

TEST_CASE("the integral-element equations are the four symmetry conditions") {
    ThetaChart tc = theta_chart();
    FrameBundle fb;
    fb.ctx = tc.sys.ctx;
    auto lam = [&](int c, int a, int b) {
        return Scalar::variable(tc.chart.lambda(c - 1, fb.conn_id(a, b)));
    };
    std::set<Scalar> expected = {
        lam(1, 2, 3) - lam(2, 1, 3),
        lam(1, 2, 4) - lam(2, 1, 4),
        lam(3, 1, 4) - lam(4, 1, 3),
        lam(3, 2, 4) - lam(4, 2, 3),
    };
    std::set<Scalar> got(tc.equations.begin(), tc.equations.end());
    CHECK(got == expected);
    CHECK(solution_codimension(tc.equations) == 4);
    CHECK(tc.chart.reduction.size() == 4);
}

TEST_CASE("on the constrained chart the 4-forms rewrite onto the shifted fiber basis") {
    ThetaChart tc = theta_chart();
    FrameBundle fb;
    fb.ctx = tc.sys.ctx;
    CoframeContext ctx = tc.sys.ctx;
    std::map<std::pair<int, int>, int> pi;
    std::map<int, Form> sub;
    for (auto pr : {std::pair{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}) {
        auto [a, b] = pr;
        pi[{a, b}] = ctx.add_generator("pi" + std::to_string(a) + std::to_string(b));
        Form v = Form::generator(pi[{a, b}]);
        for (int c = 1; c <= 4; ++c)
            v.add_term({fb.omega_id(c)},
                       Scalar::variable(tc.chart.lambda(c - 1, fb.conn_id(a, b)))
                           .substitute(tc.chart.reduction));
        sub[fb.conn_id(a, b)] = v;
    }
    auto w = [&](int a) { return fb.omega_id(a); };
    Form exp1(4), exp3(4);
    exp1.add_term({w(1), w(2), w(3), pi[{1, 3}]}, Scalar(1));
    exp1.add_term({w(1), w(2), w(4), pi[{1, 4}]}, Scalar(1));
    exp3.add_term({w(1), w(3), w(4), pi[{1, 3}]}, Scalar(-1));
    exp3.add_term({w(2), w(3), w(4), pi[{2, 3}]}, Scalar(-1));
    CHECK(substitute_generators(tc.sys.generators[0], sub) == exp1);
    CHECK(substitute_generators(tc.sys.generators[2], sub) == exp3);
}

TEST_CASE("polar matrix of a three-vector flag has the minor pattern and degenerate determinant") {
    ThetaChart tc = theta_chart();
    FrameBundle fb;
    fb.ctx = tc.sys.ctx;
    FlagChart flag;
    for (int i = 0; i < 3; ++i) {
        ScalarVec row;
        for (int a = 0; a < 4; ++a)
            row.push_back(Scalar::variable("bdf" + std::to_string(i + 1) + std::to_string(a + 1)));
        flag.coeff.push_back(std::move(row));
    }
    auto [A, B, C, D] = flag_minors(flag);
    PolarMatrix pm = polar_space(tc.sys, tc.chart, flag);
    REQUIRE(pm.rows.size() >= 4);
    // columns are the fiber generators w12, w13, w14, w23, w24, w34
    REQUIRE(pm.columns == std::vector<int>{fb.conn_id(1, 2), fb.conn_id(1, 3), fb.conn_id(1, 4),
                                           fb.conn_id(2, 3), fb.conn_id(2, 4), fb.conn_id(3, 4)});
    ScalarVec zero6(6);
    ScalarVec r1 = {Scalar(), -A, -B, Scalar(), Scalar(), Scalar()};
    ScalarVec r2 = {Scalar(), Scalar(), Scalar(), -A, -B, Scalar()};
    ScalarVec r3 = {Scalar(), D, Scalar(), C, Scalar(), Scalar()};
    ScalarVec r4 = {Scalar(), Scalar(), D, Scalar(), C, Scalar()};
    CHECK(pm.rows[0] == r1);
    CHECK(pm.rows[1] == r2);
    CHECK(pm.rows[2] == r3);
    CHECK(pm.rows[3] == r4);
    ScalarMatrix alpha;
    for (int i = 0; i < 4; ++i)
        alpha.push_back({pm.rows[static_cast<size_t>(i)][1], pm.rows[static_cast<size_t>(i)][2],
                         pm.rows[static_cast<size_t>(i)][3], pm.rows[static_cast<size_t>(i)][4]});
    CHECK(determinant(alpha).is_zero());
}

TEST_CASE("the distinguished flag reaches polar rank three but Cartan's test still fails") {
    ThetaChart tc = theta_chart();
    FrameBundle fb;
    fb.ctx = tc.sys.ctx;
    // e1 = v2, e2 = v3, e3 = v1 + v4, completed by e4 = v4
    FlagChart flag;
    flag.coeff = {{Scalar(), Scalar(1), Scalar(), Scalar()},
                  {Scalar(), Scalar(), Scalar(1), Scalar()},
                  {Scalar(1), Scalar(), Scalar(), Scalar(1)},
                  {Scalar(), Scalar(), Scalar(), Scalar(1)}};
    FlagChart first3;
    first3.coeff.assign(flag.coeff.begin(), flag.coeff.begin() + 3);
    auto [A, B, C, D] = flag_minors(first3);
    CHECK(A == Scalar(1));
    CHECK(B == Scalar());
    CHECK(C == Scalar(1));
    CHECK(D == Scalar());
    PolarMatrix pm = polar_space(tc.sys, tc.chart, first3);
    CHECK(polar_rank(pm) == 3);
    // the polar space is cut out by the annihilators along w13, w23, w24 only
    for (auto& row : pm.rows) {
        CHECK(row[0].is_zero());
        CHECK(row[2].is_zero());
        CHECK(row[5].is_zero());
    }
    CHECK(cartan_characters(tc.sys, tc.chart, flag) == std::vector<int>{0, 0, 0, 3, 6});
    CartanTestResult res = cartan_test(tc.sys, tc.chart, flag);
    CHECK(!res.passes);
    CHECK(res.sum_ck == 3);
    CHECK(res.codim == 4);
}

TEST_CASE("the principal symbol determinant vanishes identically") {
    ScalarMatrix grads(4, ScalarVec(4));
    for (int b = 0; b < 4; ++b)
        for (int a = 0; a < 4; ++a)
            grads[static_cast<size_t>(b)][static_cast<size_t>(a)] =
                Scalar::variable("bdy" + std::to_string(b + 1) + std::to_string(a + 1));
    ScalarVec xi;
    for (int a = 0; a < 4; ++a) xi.push_back(Scalar::variable("bdxi" + std::to_string(a + 1)));
    CHECK(linearisation_symbol(grads, xi).is_zero());

    RationalSampler sampler(5);
    ScalarMatrix ng(4, ScalarVec(4));
    for (auto& row : ng)
        for (auto& e : row) e = Scalar(sampler.next_signed());
    for (int t = 0; t < 100; ++t) {
        ScalarVec nxi;
        for (int a = 0; a < 4; ++a) nxi.push_back(Scalar(sampler.next_signed()));
        CHECK(linearisation_symbol(ng, nxi).is_zero());
    }
    CHECK(linearisation_symbol(ng, ScalarVec(4)).is_zero());
}

TEST_CASE("prolonged structure equations carry exactly the quadratic torsion") {
    const ProlongedSystem& pro = P();
    for (auto pr : {std::pair{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}) {
        auto [a, b] = pr;
        Form expected(2);
        for (int c = 1; c <= 4; ++c)
            expected -= wedge(pro.dlambda(c, a, b), Form::generator(pro.base.omega_id(c)));
        for (int c = 1; c <= 4; ++c)
            for (int d = c + 1; d <= 4; ++d)
                expected.add_term({pro.base.omega_id(c), pro.base.omega_id(d)},
                                  pro.torsion_component(a, b, c, d));
        CHECK(pro.dtheta.at({a, b}) == expected);
    }
    CHECK(pro.lambda_symbols.size() == 20);
    CHECK(pro.presentation.pi.size() == 20);
}

TEST_CASE("flat curvature with vanishing coordinates leaves no torsion") {
    const ProlongedSystem& pro = P();
    for (auto& [key, c] : pro.torsion.c) {
        (void)key;
        std::map<int, Rational> zeros;
        for (int s : c.symbols()) zeros[s] = 0;
        CHECK(c.evaluate(zeros) == Rational(0));
    }
}

TEST_CASE("the distinguished absorption leaves a single essential residual") {
    const ProlongedSystem& pro = P();
    Scalar T = essential_torsion_scalar(pro);
    auto lam = [&](int c, int a, int b) { return pro.lambda(c, a, b); };
    Scalar printed = RiemannIndex::component(1, 2, 3, 4) +
                     lam(1, 2, 3) * (lam(2, 2, 4) - lam(1, 1, 4)) +
                     lam(1, 2, 4) * (lam(1, 1, 3) - lam(2, 2, 3)) +
                     lam(3, 4, 1) * (lam(4, 4, 2) - lam(3, 3, 2)) +
                     lam(3, 4, 2) * (lam(3, 3, 1) - lam(4, 4, 1));
    CHECK(T == printed);
    REQUIRE(pro.golden.residual.size() == 1);
    auto it = pro.golden.residual.begin();
    // theta order w12, w13, w14, w23, w24, w34: the leftover sits in d(th24)
    CHECK(it->first == std::tuple{4, 0, 2});
    CHECK(it->second == T.scaled(2));
}

TEST_CASE("generic absorption lands in the same essential-torsion class") {
    const ProlongedSystem& pro = P();
    AbsorptionSolution generic = absorb_torsion(pro.presentation, pro.torsion);
    CHECK(same_torsion_class(pro.presentation, pro.torsion, generic, pro.golden));
    bool torsion_free = generic.residual.empty();
    CHECK(!torsion_free);
}

TEST_CASE("the volume combination is invariant under homogeneous rewritings") {
    CHECK(essential_torsion_invariant(P(), 10, 99));
}

TEST_CASE("quadratic coordinates split the torsion and drop the z block") {
    const ProlongedSystem& pro = P();
    Scalar T = essential_torsion_scalar(pro);
    Scalar Tyz = yz_transform(pro, T);
    auto y = [](int k) { return Scalar::variable("y" + std::to_string(k)); };
    Scalar expected = RiemannIndex::component(1, 2, 3, 4) +
                      (y(1) * y(2) - y(3) * y(4) + y(5) * y(6) - y(7) * y(8)).scaled(2);
    CHECK(Tyz == expected);
    for (int k = 1; k <= 4; ++k) CHECK(Tyz.derivative(sym("z" + std::to_string(k))).is_zero());
    CHECK(yz_inverse(pro, Tyz) == T);
    // round trip over a generic polynomial in the transformed coordinates
    Scalar probe;
    for (int c = 1; c <= 4; ++c)
        for (auto pr : {std::pair{1, 3}, {1, 4}, {2, 3}, {2, 4}})
            probe += Scalar(c) * pro.lambda(c, pr.first, pr.second) *
                     pro.lambda(5 - c, pr.first, pr.second);
    CHECK(yz_inverse(pro, yz_transform(pro, probe)) == probe);
}

TEST_CASE("the derivative of the torsion matches the printed horizontal coefficients") {
    const ProlongedSystem& pro = P();
    const ConstraintLocus& loc = L();
    for (int a = 1; a <= 4; ++a) {
        Scalar expected = Scalar::variable("R1234_" + std::to_string(a));
        for (int b = 1; b <= 4; ++b) {
            expected += pro.lambda(a, b, 1) * RiemannIndex::component(b, 2, 3, 4);
            expected += pro.lambda(a, b, 2) * RiemannIndex::component(1, b, 3, 4);
            expected += pro.lambda(a, b, 3) * RiemannIndex::component(1, 2, b, 4);
            expected += pro.lambda(a, b, 4) * RiemannIndex::component(1, 2, 3, b);
        }
        CHECK(loc.Phi[static_cast<size_t>(a - 1)] == expected);
    }
}

TEST_CASE("the fiber part of the torsion derivative is the registered linear relation") {
    const ProlongedSystem& pro = P();
    const ConstraintLocus& loc = L();
    Form fiber(1);
    for (auto& [g, c] : loc.fiber_part) fiber.add_term({g}, c);
    Form tilde = substitute_generators(fiber, loc.tilde_map);
    Form mapped(1);
    for (auto& [t, c] : tilde.terms()) mapped.add_term(t, yz_transform(pro, c));
    auto y = [](int k) { return Scalar::variable("y" + std::to_string(k)); };
    auto g = [&](const std::string& n) { return loc.on_S.ctx.generator(n); };
    Form expected(1);
    expected.add_term({g("pi1")}, y(2).scaled(2));
    expected.add_term({g("pi2")}, y(1).scaled(2));
    expected.add_term({g("pi3")}, y(4).scaled(-2));
    expected.add_term({g("pi4")}, y(3).scaled(-2));
    expected.add_term({g("pi5")}, y(6).scaled(2));
    expected.add_term({g("pi6")}, y(5).scaled(2));
    expected.add_term({g("pi7")}, y(8).scaled(-2));
    expected.add_term({g("pi8")}, y(7).scaled(-2));
    CHECK(mapped == expected);
    // the registered relation is the same covector up to overall scale
    REQUIRE(loc.on_S.relations.size() == 1);
    for (auto& [gen, coef] : loc.on_S.relations[0])
        CHECK(mapped.coefficient({gen}) == coef.scaled(2));
}

TEST_CASE("restricted structure equations take the tilde tableau shape") {
    const ConstraintLocus& loc = L();
    const CoframeContext& ctx = loc.on_S.ctx;
    auto g = [&](const std::string& n) { return Form::generator(ctx.generator(n)); };
    auto w = [&](int a) { return Form::generator(ctx.generator("w" + std::to_string(a))); };
    Form row12(2), row13(2), row24(2);
    for (int c = 1; c <= 4; ++c) row12 -= wedge(g("mu" + std::to_string(c)), w(c));
    row13 -= wedge(g("rho2") - g("pi4"), w(1));
    row13 -= wedge(g("pi1"), w(2));
    row13 -= wedge(-g("rho4") + g("pi8"), w(3));
    row13 -= wedge(-g("pi5"), w(4));
    row24 -= wedge(g("pi3"), w(1));
    row24 -= wedge(g("rho1") + g("pi2"), w(2));
    row24 -= wedge(-g("pi7"), w(3));
    row24 -= wedge(-g("rho3") - g("pi6"), w(4));
    CHECK(loc.on_S.structure.at(ctx.generator("th12")) == row12);
    CHECK(loc.on_S.structure.at(ctx.generator("th13")) == row13);
    CHECK(loc.on_S.structure.at(ctx.generator("th24")) == row24);
}

TEST_CASE("the rewriting freedom counts 25 then 21 parameters in the pi/rho block") {
    const ConstraintLocus& loc = L();
    CHECK(loc.shift_parameters_before == 25);
    CHECK(loc.shift_parameters_after == 21);
}

TEST_CASE("a vanishing y coordinate is rejected as non-generic") {
    std::map<int, Rational> y;
    for (int k = 1; k <= 8; ++k) y[sym("y" + std::to_string(k))] = 1;
    y[sym("y3")] = 0;
    CHECK_THROWS_WITH(restrict_to_S(P(), y), doctest::Contains("non-generic point"));
}

TEST_CASE("the restricted system is involutive with characters (6,6,5,2) and 41 rewritings") {
    FullReport r = full_report(L());
    CHECK(r.characters.s == std::vector<int>{6, 6, 5, 2});
    CHECK(r.characters.sum == 19);
    CHECK(r.characters.weighted == 6 + 12 + 15 + 8);
    CHECK(r.r1 == 41);
    CHECK(r.verdict.torsion_free);
    CHECK(r.verdict.involutive);
    CHECK(r.characters_without_relation.sum != 19);
    CHECK(r.rotation_invariant);
}

TEST_CASE("block rotations keep the 4-form system inside its own span") {
    ExteriorSystem sys = build_theta_system();
    FrameBundle fb;
    fb.ctx = sys.ctx;
    auto rot = block_rotation(fb, Rational(3, 5), Rational(4, 5), Rational(5, 13),
                              Rational(12, 13));
    CHECK(ideal_invariant_under(sys, rot));
    // a rotation mixing the two blocks is not a symmetry
    std::map<int, Form> mix;
    mix[fb.omega_id(1)] = Form::generator(fb.omega_id(3));
    mix[fb.omega_id(3)] = Form::generator(fb.omega_id(1));
    CHECK(!ideal_invariant_under(sys, mix));
}

TEST_CASE("curvature condition residual") {
    GammaField g;
    CHECK(curvature_condition_residual(g) == 0.0);
    RationalSampler sampler(17);
    for (int a = 1; a <= 4; ++a)
        for (int b = 1; b <= 4; ++b)
            for (int c = 1; c <= 4; ++c) g.gamma[a][b][c] = to_double(sampler.next_signed());
    g.R1234 = 0;
    double rest = curvature_condition_residual(g);
    g.R1234 = -rest;
    CHECK(std::abs(curvature_condition_residual(g)) < 1e-12);
}

namespace {

double im_product(std::complex<double> a, std::complex<double> b) {
    return a.real() * b.imag() + a.imag() * b.real();
}

} // namespace

TEST_CASE("NP constraint residuals") {
    NPScalars np{};
    NPReport r = np_constraint(np);
    CHECK(r.im_rho == 0.0);
    CHECK(r.constraint == 0.0);
    CHECK(r.im_K == 0.0);
    CHECK(r.im_Kstar == 0.0);

    np.Psi2 = {0, 1};
    r = np_constraint(np);
    CHECK(r.constraint == doctest::Approx(1.0));
    CHECK(r.im_Psi2 == doctest::Approx(1.0));

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> dist(-2, 2);
    auto rc = [&]() { return std::complex<double>(dist(rng), dist(rng)); };
    np = {rc(), rc(), rc(), rc(), rc(), rc(), rc(), rc(), rc(), rc(), rc()};
    r = np_constraint(np);
    double oracle = np.Psi2.imag() + im_product(np.kappa, np.kappap) -
                    im_product(np.sigma, np.sigmap);
    CHECK(r.constraint == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(r.tau_reality == np.tau - std::conj(np.taup));
    CHECK(r.im_K == doctest::Approx((np.sigma * np.sigmap - np.Psi2 - np.rho * np.rhop +
                                     np.Phi11 + np.Lambda)
                                        .imag()));

    // spin/boost rescalings: kappa (3,1), kappa' (-3,-1), sigma (3,-1),
    // sigma' (-3,1), Psi2 (0,0); the constraint is a weight-zero combination
    std::complex<double> lam = rc();
    auto weight = [&](std::complex<double> v, int p, int q) {
        return v * std::pow(lam, p) * std::pow(std::conj(lam), q);
    };
    NPScalars scaled = np;
    scaled.kappa = weight(np.kappa, 3, 1);
    scaled.kappap = weight(np.kappap, -3, -1);
    scaled.sigma = weight(np.sigma, 3, -1);
    scaled.sigmap = weight(np.sigmap, -3, 1);
    CHECK(np_constraint(scaled).constraint == doctest::Approx(r.constraint).epsilon(1e-9));
}
