#include "edslab/blockdiag.hpp"

#include <algorithm>
#include <stdexcept>

namespace edslab {

namespace {

const std::array<std::pair<int, int>, 6> kPairs = {
    {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}};

std::string wname(int a) { return "w" + std::to_string(a); }
std::string wname(int a, int b) { return "w" + std::to_string(a) + std::to_string(b); }

// All canonical curvature index quadruples (pair-ordered representatives).
std::vector<std::array<int, 4>> canonical_quads() {
    std::vector<std::array<int, 4>> quads;
    for (size_t i = 0; i < kPairs.size(); ++i)
        for (size_t j = i; j < kPairs.size(); ++j)
            quads.push_back({kPairs[i].first, kPairs[i].second, kPairs[j].first, kPairs[j].second});
    return quads;
}

} // namespace

int FrameBundle::omega_id(int a) const { return ctx.generator(wname(a)); }

int FrameBundle::conn_id(int a, int b) const {
    if (a == b) throw std::runtime_error("no connection generator with equal indices");
    if (a > b) std::swap(a, b);
    return ctx.generator(wname(a, b));
}

Form FrameBundle::conn_form(int a, int b) const {
    if (a == b) return Form(1);
    Form f = Form::generator(conn_id(a, b));
    return a < b ? f : -f;
}

FrameBundle frame_bundle_context() {
    FrameBundle fb;
    CoframeContext& ctx = fb.ctx;
    for (int a = 1; a <= 4; ++a) ctx.add_generator(wname(a));
    for (auto& [a, b] : kPairs) ctx.add_generator(wname(a, b));

    // d w^a = -sum_b w^a_b ^ w^b
    for (int a = 1; a <= 4; ++a) {
        Form d(2);
        for (int b = 1; b <= 4; ++b) {
            if (b == a) continue;
            int sign = a < b ? 1 : -1;
            d.add_term({fb.conn_id(a, b), fb.omega_id(b)}, Scalar(Rational(-sign)));
        }
        ctx.structure[fb.omega_id(a)] = d;
    }
    // d w^a_b = -sum_c w^a_c ^ w^c_b + sum_{c<d} R_abcd w^c ^ w^d
    for (auto& [a, b] : kPairs) {
        Form d(2);
        for (int c = 1; c <= 4; ++c) {
            if (c == a || c == b) continue;
            int s1 = a < c ? 1 : -1;
            int s2 = c < b ? 1 : -1;
            d.add_term({fb.conn_id(a, c), fb.conn_id(c, b)}, Scalar(Rational(-s1 * s2)));
        }
        for (int c = 1; c <= 4; ++c)
            for (int e = c + 1; e <= 4; ++e)
                d.add_term({fb.omega_id(c), fb.omega_id(e)}, RiemannIndex::component(a, b, c, e));
        ctx.structure[fb.conn_id(a, b)] = d;
    }

    // exterior derivatives of the curvature symbols: jets along w^e plus the
    // rotation terms along the connection generators
    for (auto& quad : canonical_quads()) {
        RiemannIndex idx = RiemannIndex::canonical(quad[0], quad[1], quad[2], quad[3]);
        if (idx.sign == 0) continue;
        std::string name = idx.symbol_name();
        int id = ctx.symbols->declare(name, SymbolKind::Curvature);
        Form d(1);
        for (int e = 1; e <= 4; ++e) {
            int jet = ctx.symbols->declare(name + "_" + std::to_string(e), SymbolKind::Jet);
            d.add_term({fb.omega_id(e)}, Scalar::variable(jet));
        }
        std::array<int, 4> ix{idx.a, idx.b, idx.c, idx.d};
        for (auto& [b, c] : kPairs) {
            Scalar k;
            for (int slot = 0; slot < 4; ++slot) {
                std::array<int, 4> mod = ix;
                if (ix[static_cast<size_t>(slot)] == c) {
                    mod[static_cast<size_t>(slot)] = b;
                    k += RiemannIndex::component(mod[0], mod[1], mod[2], mod[3]);
                }
                mod = ix;
                if (ix[static_cast<size_t>(slot)] == b) {
                    mod[static_cast<size_t>(slot)] = c;
                    k -= RiemannIndex::component(mod[0], mod[1], mod[2], mod[3]);
                }
            }
            if (!k.is_zero()) d.add_term({fb.conn_id(b, c)}, k);
        }
        ctx.scalar_d[id] = d;
    }
    return fb;
}

ExteriorSystem build_theta_system() {
    FrameBundle fb = frame_bundle_context();
    ExteriorSystem sys;
    sys.ctx = fb.ctx;
    auto w = [&](int a) { return Form::generator(fb.omega_id(a)); };
    auto block = [&](int i, int j, int k) {
        return wedge(wedge(w(i), w(j)), fb.ctx.structure.at(fb.omega_id(k)));
    };
    sys.generators = {block(1, 2, 1), block(1, 2, 2), block(3, 4, 3), block(3, 4, 4)};
    sys.independence = wedge_all({w(1), w(2), w(3), w(4)});
    return sys;
}

ThetaChart theta_chart() {
    ThetaChart tc;
    tc.sys = build_theta_system();
    tc.chart = make_chart(tc.sys, "L");
    tc.equations = integral_element_equations(tc.sys, tc.chart);
    apply_constraints(tc.chart, tc.equations);
    return tc;
}

Scalar linearisation_symbol(const ScalarMatrix& gradients, const ScalarVec& xi) {
    if (gradients.size() != 4 || xi.size() != 4)
        throw std::runtime_error("linearisation symbol needs four gradients and one covector");
    ScalarVec n(4);
    for (size_t b = 0; b < 4; ++b) {
        if (gradients[b].size() != 4)
            throw std::runtime_error("linearisation symbol needs four gradients and one covector");
        for (size_t a = 0; a < 4; ++a) n[b] += gradients[b][a] * xi[a];
    }
    Scalar zero;
    ScalarMatrix m = {{n[2], zero, n[0], zero},
                      {n[3], zero, zero, n[0]},
                      {zero, n[2], n[1], zero},
                      {zero, n[3], zero, n[1]}};
    return determinant(m);
}

Scalar ProlongedSystem::lambda(int c, int a, int b) const {
    if (a == b) return Scalar();
    Rational sign(1);
    if (a > b) {
        std::swap(a, b);
        sign = -1;
    }
    int id = chart.lambda(c - 1, base.conn_id(a, b));
    return Scalar::variable(id).substitute(lambda_reduction).scaled(sign);
}

int ProlongedSystem::dlambda_gen(int c, int a, int b) const {
    Scalar l = lambda(c, a, b);
    std::set<int> syms = l.symbols();
    if (syms.size() != 1) throw std::runtime_error("lambda coordinate is not a single symbol");
    return ctx.generator("d" + sym_name(*syms.begin()));
}

Form ProlongedSystem::dlambda(int c, int a, int b) const {
    if (a == b) return Form(1);
    Rational sign(1);
    int aa = a, bb = b;
    if (aa > bb) {
        std::swap(aa, bb);
        sign = -1;
    }
    return Form::generator(dlambda_gen(c, aa, bb)).scaled(Scalar(sign));
}

Scalar ProlongedSystem::torsion_component(int a, int b, int c, int d) const {
    Scalar t = RiemannIndex::component(a, b, c, d);
    for (int e = 1; e <= 4; ++e) {
        t += lambda(e, a, b) * (lambda(c, e, d) - lambda(d, e, c));
        t -= lambda(c, a, e) * lambda(d, e, b);
        t += lambda(d, a, e) * lambda(c, e, b);
    }
    return reduce_first_bianchi(t);
}

namespace {

// The mod-theta substitution: every connection generator replaced by its
// lambda expansion over the horizontal generators.
std::map<int, Form> connection_substitution(const ProlongedSystem& pro) {
    std::map<int, Form> sub;
    for (auto& [a, b] : kPairs) {
        Form v(1);
        for (int c = 1; c <= 4; ++c)
            v.add_term({pro.base.omega_id(c)}, pro.lambda(c, a, b));
        sub[pro.base.conn_id(a, b)] = v;
    }
    return sub;
}

} // namespace

ProlongedSystem prolong() {
    ProlongedSystem pro;
    ThetaChart tc = theta_chart();
    pro.base.ctx = tc.sys.ctx;
    pro.chart = tc.chart;
    pro.lambda_reduction = tc.chart.reduction;

    pro.ctx = pro.base.ctx;
    // the printed torsion assumes an honest curvature tensor: canonicalise
    // with the cyclic identity throughout the prolonged computation
    pro.ctx.first_bianchi = true;
    for (auto& [a, b] : kPairs) {
        for (int c = 1; c <= 4; ++c) {
            int ls = pro.chart.lambda(c - 1, pro.base.conn_id(a, b));
            if (pro.lambda_reduction.count(ls)) continue;
            pro.lambda_symbols.push_back(ls);
            pro.ctx.symbols->declare(sym_name(ls), SymbolKind::ConnectionCoefficient);
            int gid = pro.ctx.add_generator("d" + sym_name(ls));
            pro.ctx.structure[gid] = Form(2); // the new coordinates are closed
            pro.ctx.scalar_d[ls] = Form::generator(gid);
        }
    }

    std::map<int, Form> sub = connection_substitution(pro);
    for (auto& [a, b] : kPairs) {
        Form th = Form::generator(pro.base.conn_id(a, b));
        for (int c = 1; c <= 4; ++c)
            th.add_term({pro.base.omega_id(c)}, -pro.lambda(c, a, b));
        pro.theta[{a, b}] = th;
        pro.dtheta[{a, b}] = substitute_generators(exterior_derivative(th, pro.ctx), sub);
    }

    pro.presentation.ctx = pro.ctx;
    for (auto& [a, b] : kPairs) {
        pro.presentation.theta.push_back(pro.base.conn_id(a, b));
        pro.presentation.structure[pro.base.conn_id(a, b)] = pro.dtheta.at({a, b});
    }
    for (int a = 1; a <= 4; ++a) pro.presentation.omega.push_back(pro.base.omega_id(a));
    for (int ls : pro.lambda_symbols)
        pro.presentation.pi.push_back(pro.ctx.generator("d" + sym_name(ls)));

    pro.torsion = extract_torsion(pro.presentation);

    // the distinguished absorption table, keyed by (c, a, b) of the shifted
    // fiber form and the horizontal index it multiplies
    std::map<std::pair<int, int>, Scalar> p;
    std::map<int, int> pi_pos;
    for (size_t e = 0; e < pro.presentation.pi.size(); ++e)
        pi_pos[pro.presentation.pi[e]] = static_cast<int>(e);
    auto T = [&](int a, int b, int c, int d) { return pro.torsion_component(a, b, c, d); };
    auto add = [&](int c, int a, int b, int i, const Scalar& v) {
        p[{pi_pos.at(pro.dlambda_gen(c, a, b)), i - 1}] = v;
    };
    add(1, 1, 2, 2, T(1, 2, 1, 2));
    add(1, 1, 2, 3, T(1, 2, 1, 3));
    add(1, 1, 2, 4, T(1, 2, 1, 4));
    add(2, 1, 2, 3, T(1, 2, 2, 3));
    add(2, 1, 2, 4, T(1, 2, 2, 4));
    add(3, 1, 2, 4, T(1, 2, 3, 4));
    add(1, 1, 3, 2, T(1, 3, 1, 2));
    add(1, 1, 3, 3, T(1, 3, 1, 3));
    add(1, 1, 3, 4, T(1, 3, 1, 4));
    add(2, 1, 3, 4, T(1, 3, 2, 4));
    add(3, 1, 3, 2, -T(1, 3, 2, 3));
    add(3, 1, 3, 4, T(1, 3, 3, 4));
    add(1, 1, 4, 2, T(1, 4, 1, 2));
    add(1, 1, 4, 3, T(1, 4, 1, 3));
    add(1, 1, 4, 4, T(1, 4, 1, 4));
    add(2, 1, 4, 3, T(1, 4, 2, 3));
    add(4, 1, 4, 2, -T(1, 4, 2, 4));
    add(4, 1, 4, 3, -T(1, 4, 3, 4));
    add(2, 2, 3, 1, -T(2, 3, 1, 2));
    add(2, 2, 3, 3, T(2, 3, 2, 3));
    add(2, 2, 3, 4, T(2, 3, 2, 4));
    add(3, 2, 3, 1, -T(2, 3, 1, 3));
    add(3, 2, 3, 4, T(2, 3, 3, 4));
    add(4, 2, 3, 1, T(1, 3, 2, 4) + T(2, 3, 4, 1));
    add(2, 2, 4, 1, -T(2, 4, 1, 2));
    add(2, 2, 4, 3, T(2, 4, 2, 3));
    add(2, 2, 4, 4, T(2, 4, 2, 4));
    add(4, 2, 4, 1, -T(2, 4, 1, 4));
    add(4, 2, 4, 3, -T(2, 4, 3, 4));
    add(1, 3, 4, 2, T(3, 4, 1, 2));
    add(1, 3, 4, 3, T(3, 4, 1, 3));
    add(1, 3, 4, 4, T(3, 4, 1, 4));
    add(2, 3, 4, 3, T(3, 4, 2, 3));
    add(2, 3, 4, 4, T(3, 4, 2, 4));
    add(3, 3, 4, 4, T(3, 4, 3, 4));
    pro.golden = apply_shift(pro.presentation, pro.torsion, p);
    return pro;
}

namespace {

Form essential_combination(const ProlongedSystem& pro,
                           const std::map<std::pair<int, int>, Form>& dth) {
    auto w = [&](int a) { return Form::generator(pro.base.omega_id(a)); };
    Form f = wedge(wedge(w(1), w(3)), dth.at({1, 3}));
    f += wedge(wedge(w(1), w(4)), dth.at({1, 4}));
    f += wedge(wedge(w(2), w(3)), dth.at({2, 3}));
    f += wedge(wedge(w(2), w(4)), dth.at({2, 4}));
    return f;
}

} // namespace

Scalar essential_torsion_scalar(const ProlongedSystem& pro) {
    Form f = essential_combination(pro, pro.dtheta);
    std::vector<int> vol = {pro.base.omega_id(1), pro.base.omega_id(2), pro.base.omega_id(3),
                            pro.base.omega_id(4)};
    for (auto& [tuple, coeff] : f.terms()) {
        (void)coeff;
        if (tuple != vol)
            throw std::runtime_error(
                "essential torsion combination is not proportional to the volume form");
    }
    return f.coefficient(vol).scaled(Rational(-1, 2));
}

bool essential_torsion_invariant(const ProlongedSystem& pro, int trials, std::uint64_t seed) {
    std::vector<RatVec> basis = nullspace(shift_system(pro.presentation, pro.torsion));
    int n = pro.presentation.n();
    Form reference = essential_combination(pro, pro.dtheta);
    RationalSampler sampler(seed);
    for (int t = 0; t < trials; ++t) {
        std::map<std::pair<int, int>, Scalar> p;
        for (auto& v : basis) {
            Rational c = sampler.next_signed();
            for (size_t k = 0; k < v.size(); ++k) {
                if (v[k] == 0) continue;
                int e = static_cast<int>(k) / n, i = static_cast<int>(k) % n;
                p[{e, i}] += Scalar(c * v[k]);
            }
        }
        AbsorptionSolution sol = apply_shift(pro.presentation, pro.torsion, p);
        std::map<std::pair<int, int>, Form> rebuilt;
        for (size_t k = 0; k < kPairs.size(); ++k)
            rebuilt[kPairs[k]] = reconstruct_structure(pro.presentation, pro.torsion,
                                                       static_cast<int>(k), &sol);
        if (essential_combination(pro, rebuilt) != reference) return false;
    }
    return true;
}

namespace {

struct YZMaps {
    std::map<int, Scalar> forward; // lambda symbol -> y/z expression
    std::map<int, Scalar> inverse; // y/z symbol -> lambda expression
};

YZMaps yz_maps(const ProlongedSystem& pro) {
    YZMaps m;
    auto yz = [](const std::string& name) { return Scalar::variable(sym(name)); };
    auto lam = [&](int c, int a, int b) { return pro.lambda(c, a, b); };
    // forward: solve each defining relation for its lambda representative
    auto assign = [&](const Scalar& lambda_scalar, const Scalar& rhs) {
        if (lambda_scalar.symbols().size() != 1 || lambda_scalar.total_degree() != 1)
            throw std::runtime_error("lambda coordinate is not a single symbol");
        int id = *lambda_scalar.symbols().begin();
        Rational coef = lambda_scalar.linear_coefficient(id).constant_value();
        m.forward[id] = rhs.scaled(Rational(1) / coef);
    };
    assign(lam(1, 2, 3), yz("y1"));
    assign(lam(1, 2, 4), yz("y3"));
    assign(lam(3, 4, 1), yz("y5"));
    assign(lam(3, 4, 2), yz("y7"));
    assign(lam(2, 2, 4), yz("z1") + yz("y2"));
    assign(lam(1, 1, 4), yz("z1") - yz("y2"));
    assign(lam(2, 2, 3), yz("z2") + yz("y4"));
    assign(lam(1, 1, 3), yz("z2") - yz("y4"));
    assign(lam(4, 4, 2), yz("z3") + yz("y6"));
    assign(lam(3, 3, 2), yz("z3") - yz("y6"));
    assign(lam(4, 4, 1), yz("z4") + yz("y8"));
    assign(lam(3, 3, 1), yz("z4") - yz("y8"));

    Rational half(1, 2);
    m.inverse[sym("y1")] = lam(1, 2, 3);
    m.inverse[sym("y2")] = (lam(2, 2, 4) - lam(1, 1, 4)).scaled(half);
    m.inverse[sym("y3")] = lam(1, 2, 4);
    m.inverse[sym("y4")] = (lam(2, 2, 3) - lam(1, 1, 3)).scaled(half);
    m.inverse[sym("y5")] = lam(3, 4, 1);
    m.inverse[sym("y6")] = (lam(4, 4, 2) - lam(3, 3, 2)).scaled(half);
    m.inverse[sym("y7")] = lam(3, 4, 2);
    m.inverse[sym("y8")] = (lam(4, 4, 1) - lam(3, 3, 1)).scaled(half);
    m.inverse[sym("z1")] = (lam(2, 2, 4) + lam(1, 1, 4)).scaled(half);
    m.inverse[sym("z2")] = (lam(2, 2, 3) + lam(1, 1, 3)).scaled(half);
    m.inverse[sym("z3")] = (lam(4, 4, 2) + lam(3, 3, 2)).scaled(half);
    m.inverse[sym("z4")] = (lam(4, 4, 1) + lam(3, 3, 1)).scaled(half);
    return m;
}

} // namespace

Scalar yz_transform(const ProlongedSystem& pro, const Scalar& expr) {
    return expr.substitute(yz_maps(pro).forward);
}

Scalar yz_inverse(const ProlongedSystem& pro, const Scalar& expr) {
    return expr.substitute(yz_maps(pro).inverse);
}

ConstraintLocus restrict_to_S(const ProlongedSystem& pro, const std::map<int, Rational>& y_point,
                              std::uint64_t seed) {
    ConstraintLocus loc;
    loc.T = essential_torsion_scalar(pro);
    loc.T_yz = yz_transform(pro, loc.T);
    loc.dT = substitute_generators(exterior_derivative(Form::scalar(loc.T), pro.ctx),
                                   connection_substitution(pro));
    for (int a = 1; a <= 4; ++a)
        loc.Phi[static_cast<size_t>(a - 1)] = loc.dT.coefficient({pro.base.omega_id(a)});
    for (int g : pro.presentation.pi) {
        Scalar c = loc.dT.coefficient({g});
        if (!c.is_zero()) loc.fiber_part[g] = c;
    }

    // the tilde fiber basis on S
    CoframeContext& ctx3 = loc.on_S.ctx;
    for (int a = 1; a <= 4; ++a) ctx3.add_generator(wname(a));
    for (auto& [a, b] : kPairs) ctx3.add_generator("th" + std::to_string(a) + std::to_string(b));
    for (int k = 1; k <= 8; ++k) ctx3.add_generator("pi" + std::to_string(k));
    for (int k = 1; k <= 4; ++k) ctx3.add_generator("rho" + std::to_string(k));
    for (int k = 1; k <= 4; ++k) ctx3.add_generator("mu" + std::to_string(k));
    for (int k = 1; k <= 4; ++k) ctx3.add_generator("nu" + std::to_string(k));
    auto g3 = [&](const std::string& name) { return Form::generator(ctx3.generator(name)); };

    for (int c = 1; c <= 4; ++c) {
        loc.tilde_map[pro.dlambda_gen(c, 1, 2)] = g3("mu" + std::to_string(c));
        loc.tilde_map[pro.dlambda_gen(c, 3, 4)] = g3("nu" + std::to_string(c));
    }
    loc.tilde_map[pro.dlambda_gen(1, 2, 3)] = g3("pi1");
    loc.tilde_map[pro.dlambda_gen(2, 2, 4)] = g3("rho1") + g3("pi2");
    loc.tilde_map[pro.dlambda_gen(1, 1, 4)] = g3("rho1") - g3("pi2");
    loc.tilde_map[pro.dlambda_gen(1, 2, 4)] = g3("pi3");
    loc.tilde_map[pro.dlambda_gen(2, 2, 3)] = g3("rho2") + g3("pi4");
    loc.tilde_map[pro.dlambda_gen(1, 1, 3)] = g3("rho2") - g3("pi4");
    loc.tilde_map[pro.dlambda_gen(4, 1, 3)] = -g3("pi5");
    loc.tilde_map[pro.dlambda_gen(4, 2, 4)] = -g3("rho3") - g3("pi6");
    loc.tilde_map[pro.dlambda_gen(3, 2, 3)] = -g3("rho3") + g3("pi6");
    loc.tilde_map[pro.dlambda_gen(4, 2, 3)] = -g3("pi7");
    loc.tilde_map[pro.dlambda_gen(4, 1, 4)] = -g3("rho4") - g3("pi8");
    loc.tilde_map[pro.dlambda_gen(3, 1, 3)] = -g3("rho4") + g3("pi8");

    for (auto& [a, b] : kPairs) {
        // on S the essential residual vanishes; the fiber forms are the
        // shifted ones, so each row is a pure tableau row
        Form s(2);
        for (int c = 1; c <= 4; ++c) {
            int gen = pro.dlambda_gen(c, a, b);
            s -= wedge(loc.tilde_map.at(gen), Form::generator(c - 1));
        }
        loc.on_S.structure[ctx3.generator("th" + std::to_string(a) + std::to_string(b))] = s;
    }
    for (auto& [a, b] : kPairs)
        loc.on_S.theta.push_back(ctx3.generator("th" + std::to_string(a) + std::to_string(b)));
    for (int a = 1; a <= 4; ++a) loc.on_S.omega.push_back(ctx3.generator(wname(a)));
    for (int k = 1; k <= 8; ++k) loc.on_S.pi.push_back(ctx3.generator("pi" + std::to_string(k)));
    for (int k = 1; k <= 4; ++k) loc.on_S.pi.push_back(ctx3.generator("rho" + std::to_string(k)));
    for (int k = 1; k <= 4; ++k) loc.on_S.pi.push_back(ctx3.generator("mu" + std::to_string(k)));
    for (int k = 1; k <= 4; ++k) loc.on_S.pi.push_back(ctx3.generator("nu" + std::to_string(k)));

    auto y = [&](int k) { return Scalar::variable(sym("y" + std::to_string(k))); };
    std::map<int, Scalar> relation;
    relation[ctx3.generator("pi1")] = y(2);
    relation[ctx3.generator("pi2")] = y(1);
    relation[ctx3.generator("pi3")] = -y(4);
    relation[ctx3.generator("pi4")] = -y(3);
    relation[ctx3.generator("pi5")] = y(6);
    relation[ctx3.generator("pi6")] = y(5);
    relation[ctx3.generator("pi7")] = -y(8);
    relation[ctx3.generator("pi8")] = -y(7);
    for (int k = 1; k <= 8; ++k) ctx3.symbols->declare("y" + std::to_string(k), SymbolKind::Auxiliary);
    loc.on_S.relations.push_back(relation);

    // shift freedom of the pi/rho block, with and without the relation
    TorsionTensor st = extract_torsion(loc.on_S);
    RatMatrix rows = shift_system(loc.on_S, st);
    int n = loc.on_S.n();
    RatMatrix restricted;
    for (auto& row : rows) {
        RatVec r(row.begin(), row.begin() + 12 * n);
        restricted.push_back(std::move(r));
    }
    loc.shift_parameters_before = 12 * n - rank(restricted);

    std::map<int, Rational> yv = y_point;
    if (yv.empty()) {
        RationalSampler sampler(seed);
        for (int k = 1; k <= 8; ++k) yv[sym("y" + std::to_string(k))] = sampler.next_signed();
    }
    for (int k = 1; k <= 8; ++k) {
        auto it = yv.find(sym("y" + std::to_string(k)));
        if (it == yv.end() || it->second == 0)
            throw std::runtime_error("non-generic point: y" + std::to_string(k) +
                                     " must be nonzero");
    }
    RatMatrix aug = restricted;
    ScalarVec b(restricted.size(), Scalar());
    for (int i = 0; i < n; ++i) {
        RatVec row(static_cast<size_t>(12 * n), Rational(0));
        for (int e = 0; e < 8; ++e) {
            const Scalar& coef = relation.at(loc.on_S.pi[static_cast<size_t>(e)]);
            row[static_cast<size_t>(e * n + i)] = coef.evaluate(yv);
        }
        aug.push_back(std::move(row));
        b.push_back(-Scalar::variable(sym("Psi" + std::to_string(i + 1))));
    }
    loc.shift_parameters_after = 12 * n - rank(aug);
    LinearSolveResult lin = solve_least_residual(aug, b);
    for (auto& r : lin.residual)
        if (!r.is_zero())
            throw std::runtime_error("non-generic point: the shift equations are unsolvable");
    return loc;
}

FullReport full_report(const ConstraintLocus& locus) {
    FullReport r;
    TorsionTensor st = extract_torsion(locus.on_S);
    r.characters = reduced_characters(locus.on_S, st);
    r.r1 = degree_of_indeterminacy(locus.on_S, st);
    r.verdict = involutivity_verdict(locus.on_S, st, absorb_torsion(locus.on_S, st));
    PfaffianPresentation no_rel = locus.on_S;
    no_rel.relations.clear();
    r.characters_without_relation = reduced_characters(no_rel, st);
    ExteriorSystem sys = build_theta_system();
    FrameBundle fb;
    fb.ctx = sys.ctx;
    r.rotation_invariant =
        ideal_invariant_under(sys, block_rotation(fb, Rational(3, 5), Rational(4, 5),
                                                  Rational(5, 13), Rational(12, 13))) &&
        ideal_invariant_under(sys, block_rotation(fb, Rational(5, 13), Rational(-12, 13),
                                                  Rational(-3, 5), Rational(4, 5)));
    return r;
}

std::map<int, Form> block_rotation(const FrameBundle& fb, const Rational& c1, const Rational& s1,
                                   const Rational& c2, const Rational& s2) {
    if (c1 * c1 + s1 * s1 != 1 || c2 * c2 + s2 * s2 != 1)
        throw std::runtime_error("block rotation needs rational points on the unit circle");
    Rational L[5][5] = {};
    L[1][1] = c1;
    L[1][2] = s1;
    L[2][1] = -s1;
    L[2][2] = c1;
    L[3][3] = c2;
    L[3][4] = s2;
    L[4][3] = -s2;
    L[4][4] = c2;
    std::map<int, Form> sub;
    for (int a = 1; a <= 4; ++a) {
        Form v(1);
        for (int b = 1; b <= 4; ++b)
            if (L[b][a] != 0) v.add_term({fb.omega_id(b)}, Scalar(L[b][a]));
        sub[fb.omega_id(a)] = v;
    }
    for (auto& [a, b] : kPairs) {
        Form v(1);
        for (auto& [c, d] : kPairs) {
            Rational coef = L[c][a] * L[d][b] - L[d][a] * L[c][b];
            if (coef != 0) v.add_term({fb.conn_id(c, d)}, Scalar(coef));
        }
        sub[fb.conn_id(a, b)] = v;
    }
    return sub;
}

bool ideal_invariant_under(const ExteriorSystem& sys, const std::map<int, Form>& substitution) {
    for (auto& g : sys.generators) {
        Form im = substitute_generators(g, substitution);
        // solve sum_j x_j gen_j = im over the union of the involved tuples
        std::map<std::vector<int>, size_t> tuples;
        auto note = [&](const Form& f) {
            for (auto& [t, c] : f.terms()) {
                (void)c;
                if (!tuples.count(t)) {
                    size_t k = tuples.size();
                    tuples[t] = k;
                }
            }
        };
        note(im);
        for (auto& gg : sys.generators) note(gg);
        RatMatrix a(tuples.size(), RatVec(sys.generators.size(), Rational(0)));
        ScalarVec b(tuples.size(), Scalar());
        for (auto& [t, row] : tuples) {
            for (size_t j = 0; j < sys.generators.size(); ++j) {
                Scalar c = sys.generators[j].coefficient(t);
                if (!c.is_constant())
                    throw std::runtime_error("ideal membership needs constant coefficients");
                a[row][j] = c.constant_value();
            }
            b[row] = im.coefficient(t);
        }
        LinearSolveResult lin = solve_least_residual(a, b);
        for (auto& r : lin.residual)
            if (!r.is_zero()) return false;
    }
    return true;
}

double curvature_condition_residual(const GammaField& g) {
    return g.R1234 + g.G(1, 2, 3) * (g.G(2, 2, 4) - g.G(1, 1, 4)) +
           g.G(1, 2, 4) * (g.G(1, 1, 3) - g.G(2, 2, 3)) +
           g.G(3, 4, 1) * (g.G(4, 4, 2) - g.G(3, 3, 2)) +
           g.G(3, 4, 2) * (g.G(3, 3, 1) - g.G(4, 4, 1));
}

NPReport np_constraint(const NPScalars& np) {
    NPReport r;
    r.im_rho = np.rho.imag();
    r.im_rhop = np.rhop.imag();
    r.tau_reality = np.tau - std::conj(np.taup);
    r.taup_reality = np.taup - std::conj(np.tau);
    r.constraint = (np.Psi2 + np.kappa * np.kappap - np.sigma * np.sigmap).imag();
    std::complex<double> K = np.sigma * np.sigmap - np.Psi2 - np.rho * np.rhop + np.Phi11 +
                             np.Lambda;
    std::complex<double> Kstar = (-np.kappa) * np.kappap - np.Psi2 - np.rho * np.rhop + np.Phi11 +
                                 np.Lambda;
    r.im_K = K.imag();
    r.im_Kstar = Kstar.imag();
    r.im_Psi2 = np.Psi2.imag();
    return r;
}

} // namespace edslab
