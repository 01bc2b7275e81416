#include <doctest.h>

#include <cmath>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>

#include "domsplit/cocycle.hpp"
#include "domsplit/error.hpp"
#include "domsplit/flow.hpp"
#include "domsplit/scenario.hpp"
#include "domsplit/splitting.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace domsplit;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

CocycleSystem constant(const Matrix& a) {
    return CocycleSystem(BaseSystem::finite_cycle(1), [a](const Vector&) { return a; },
                         static_cast<int>(a.rows()), Norm::euclidean(static_cast<int>(a.rows())));
}

std::string scenario(const std::string& name) { return std::string(DOMSPLIT_SCENARIO_DIR) + "/" + name + ".json"; }

Vector axis(int d, int i) { return Matrix::Identity(d, d).col(i); }

}  // namespace

TEST_SUITE("cocycle") {
    TEST_CASE("orbit products match the naive product and obey the cocycle law") {
        gen::Source src(401);
        for (int t = 0; t < 20; ++t) {
            const int d = src.integer(2, 4), len = src.integer(1, 5);
            std::vector<Matrix> mats;
            for (int i = 0; i < len; ++i) mats.push_back(src.conditioned(d, 2.0));
            CocycleSystem c(BaseSystem::finite_cycle(len),
                            [mats](const Vector& x) { return mats[static_cast<std::size_t>(std::lround(x(0)))]; }, d,
                            Norm::euclidean(d));
            const int n = src.integer(1, 12), m = src.integer(1, 12);
            const Vector x = Vector::Constant(1, src.integer(0, len - 1));
            std::vector<Matrix> seq;
            Vector y = x;
            for (int i = 0; i < n; ++i) {
                seq.push_back(c.generator(y));
                y = c.base().forward(y);
            }
            const Matrix naive = oracle::naive_product(seq);
            const Matrix an = c.orbit_product(x, n).matrix();
            CHECK((an - naive).norm() <= 1e-10 * naive.norm());
            const Matrix anm = c.orbit_product(x, n + m).matrix();
            const Matrix law = c.orbit_product(c.base().iterate(x, n), m).matrix() * an;
            CHECK((anm - law).norm() <= 1e-10 * anm.norm());
            // A^{-n}_x A^n_{T^-n x} = I
            const Matrix inv = c.orbit_product(x, -n).matrix() * c.orbit_product(c.base().iterate(x, -n), n).matrix();
            CHECK((inv - Matrix::Identity(d, d)).norm() < 1e-9);
        }
    }

    TEST_CASE("long products keep their singular values") {
        const CocycleSystem c = constant(mat2(2, 0, 0, 0.5));
        // singular value ratio 4^400, well past the range of a double
        const Vector ls = c.orbit_product(Vector::Zero(1), 400).log_singular_values();
        CHECK(ls(0) == doctest::Approx(400 * std::log(2.0)));
        CHECK(ls(1) == doctest::Approx(-400 * std::log(2.0)));
    }

    TEST_CASE("horizon and base systems") {
        CocycleSystem c = constant(Matrix::Identity(2, 2));
        c.set_horizon(10);
        CHECK_NOTHROW(c.orbit_product(Vector::Zero(1), 10));
        try {
            c.orbit_product(Vector::Zero(1), 11);
            FAIL("expected horizon error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::horizon_exceeded);
        }
        const BaseSystem r = BaseSystem::circle_rotation(0.25, 8);
        CHECK(r.samples().size() == 8);
        CHECK(r.same_point(r.iterate(r.samples()[0], 4), r.samples()[0]));
        CHECK(r.sample_index(Vector::Constant(1, 0.375)) == 3);
        CHECK(BaseSystem::finite_cycle(3).iterate(Vector::Zero(1), -1)(0) == 2.0);
        CHECK(constant(mat2(2, 0, 0, 1)).kappa() == doctest::Approx(2.0));
    }

    TEST_CASE("rebased cocycle generates A^m") {
        const Matrix a = mat2(1, 1, 0, 1);
        const CocycleSystem c = constant(a).rebase(3);
        CHECK((c.generator(Vector::Zero(1)) - a * a * a).norm() < 1e-12);
    }
}

TEST_SUITE("splitting") {
    TEST_CASE("constant diag(2,1)") {
        const CocycleSystem c = constant(mat2(2, 0, 0, 1));
        const DominationCertificate cert = detect_domination(c, 1, 60, Criterion::bogo);
        REQUIRE(cert.pass);
        CHECK(cert.fit.tau == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(cert.fit.k == doctest::Approx(1.0).epsilon(1e-9));
        for (int n = 1; n <= 60; ++n) CHECK(cert.sup_ratios[n - 1] == doctest::Approx(std::pow(2.0, -n)).epsilon(1e-9));
        const SplittingReport rep = construct_splitting(c, cert, 1e-10);
        CHECK(oracle::proj_dist(rep.points[0].e.basis(), axis(2, 0)) < 1e-10);
        CHECK(oracle::proj_dist(rep.points[0].f.basis(), axis(2, 1)) < 1e-10);
        const Verification v = verify_splitting(c, rep, 60);
        CHECK(v.pass);
        CHECK(v.equivariance_e == 0.0);
        CHECK(v.equivariance_f == 0.0);
        CHECK(v.k_tilde == doctest::Approx(1.0));
        for (int n = 1; n <= 60; ++n) CHECK(v.sup_ratios[n - 1] == doctest::Approx(std::pow(2.0, -n)).epsilon(1e-9));
        const RBound rb = r_bound_certificate(c, rep, cert, 60);
        CHECK(rb.log_estimate == doctest::Approx(0.0));
        CHECK(rb.holds);
    }

    TEST_CASE("all criteria agree on a constant cocycle") {
        const CocycleSystem c = constant(mat2(3, 0, 0, 1));
        for (Criterion cr : {Criterion::bogo, Criterion::magic, Criterion::magic_simplified}) {
            const DominationCertificate cert = detect_domination(c, 1, 30, cr);
            CHECK(cert.pass);
            CHECK(cert.fit.tau == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
        }
        CHECK(parse_criterion(criterion_name(Criterion::magic)) == Criterion::magic);
        CHECK_THROWS_AS(parse_criterion("nope"), Error);
    }

    TEST_CASE("theorem bound closed form") {
        // q = ceil(log(3 kappa^3 K / (1 - tau)) / log(1 / tau)), bound = -(2 k q log kappa + 36 k / (1 - tau))
        const double q = std::ceil(std::log(3.0 * 8.0 * 1.0 / 0.5) / std::log(2.0));
        const double expected = -(2.0 * q * std::log(2.0) + 36.0 / 0.5);
        int qi = 0;
        CHECK(theorem_log_bound(1, 2.0, 1.0, 0.5, &qi) == doctest::Approx(expected).epsilon(1e-14));
        CHECK(qi == 6);
        CHECK(expected == doctest::Approx(-80.31776617).epsilon(1e-9));
        CHECK_THROWS_AS(theorem_log_bound(1, 2.0, 1.0, 1.0), Error);
    }

    TEST_CASE("upper triangular constant matches power iteration and eigen oracles") {
        const Matrix a = mat2(2, 1, 0, 1);
        const CocycleSystem c = constant(a);
        const DominationCertificate cert = detect_domination(c, 1, 40, Criterion::bogo);
        REQUIRE(cert.pass);
        const SplittingReport rep = construct_splitting(c, cert, 1e-12);
        // top left singular direction of A^n for large n
        Matrix an = Matrix::Identity(2, 2);
        for (int i = 0; i < 40; ++i) an = a * an;
        CHECK(oracle::proj_dist(rep.points[0].e.basis(), oracle::power_top(an / an.norm())) < 1e-10);
        CHECK(oracle::proj_dist(rep.points[0].e.basis(), oracle::eigvec2(a, 2.0)) < 1e-10);
        CHECK(oracle::proj_dist(rep.points[0].f.basis(), oracle::eigvec2(a, 1.0)) < 1e-10);
    }

    TEST_CASE("non-dominated controls") {
        const double th = 0.7;
        for (const Matrix& a : {Matrix(mat2(std::cos(th), -std::sin(th), std::sin(th), std::cos(th))),
                                Matrix(Matrix::Identity(2, 2))}) {
            const DominationCertificate cert = detect_domination(constant(a), 1, 60, Criterion::bogo);
            CHECK_FALSE(cert.pass);
            CHECK(cert.fit.tau >= 0.99);
            CHECK_THROWS_AS(construct_splitting(constant(a), cert, 1e-8), Error);
        }
    }

    TEST_CASE("swapped bundles fail verification") {
        const CocycleSystem c = constant(mat2(2, 0, 0, 1));
        const DominationCertificate cert = detect_domination(c, 1, 20, Criterion::bogo);
        SplittingReport rep = construct_splitting(c, cert, 1e-10);
        std::swap(rep.points[0].e, rep.points[0].f);
        const Verification v = verify_splitting(c, rep, 20);
        CHECK_FALSE(v.pass);
        CHECK(v.sup_ratios[9] == doctest::Approx(1024.0));
    }

    TEST_CASE("skew product: uniqueness across horizons and rebasing") {
        const ScenarioConfig cfg = load_config(scenario("skew_product"));
        const CocycleSystem c = build_cocycle(cfg);
        const DominationCertificate c30 = detect_domination(c, 1, 30, Criterion::bogo);
        const DominationCertificate c60 = detect_domination(c, 1, 60, Criterion::bogo);
        REQUIRE(c30.pass);
        REQUIRE(c60.pass);
        const SplittingReport r30 = construct_splitting(c, c30, 1e-10);
        const SplittingReport r60 = construct_splitting(c, c60, 1e-10);
        const Uniqueness u = uniqueness_check(r30, r60);
        CHECK(u.max_e < 1e-6);
        CHECK(u.max_f < 1e-6);
        const CocycleSystem c2 = c.rebase(2);
        const DominationCertificate cr = detect_domination(c2, 1, 30, Criterion::bogo);
        REQUIRE(cr.pass);
        const Uniqueness u2 = uniqueness_check(r60, construct_splitting(c2, cr, 1e-10));
        CHECK(u2.max_e < 1e-6);
        CHECK(u2.max_f < 1e-6);
        // neighbouring samples carry nearby bundles
        double jump = 0.0;
        for (std::size_t i = 0; i + 1 < r60.points.size(); ++i)
            jump = std::max(jump, oracle::proj_dist(r60.points[i].e.basis(), r60.points[i + 1].e.basis()));
        CHECK(jump < 0.1);
    }

    TEST_CASE("jobs do not change results") {
        const ScenarioConfig cfg = load_config(scenario("random_cycle"));
        const CocycleSystem c = build_cocycle(cfg);
        RunOptions one, four;
        four.jobs = 4;
        const DominationCertificate a = detect_domination(c, cfg.analysis.k, 30, Criterion::bogo, one);
        const DominationCertificate b = detect_domination(c, cfg.analysis.k, 30, Criterion::bogo, four);
        CHECK(a.sup_ratios == b.sup_ratios);
        const SplittingReport ra = construct_splitting(c, a, 1e-10, one);
        const SplittingReport rb = construct_splitting(c, b, 1e-10, four);
        for (std::size_t i = 0; i < ra.points.size(); ++i) {
            CHECK(ra.points[i].e.basis() == rb.points[i].e.basis());
            CHECK(ra.points[i].f.basis() == rb.points[i].f.basis());
        }
    }
}

TEST_SUITE("flow") {
    TEST_CASE("closed forms") {
        Vector diag(2);
        diag << 1.0, -1.0;
        const FlowCocycle fc(FlowBase::fixed_point(), FieldSpec::constant_matrix(diag.asDiagonal()), Norm::euclidean(2));
        const Matrix b = evaluate_flow(fc, Vector::Zero(1), 0.5).value;
        CHECK(b(0, 0) == doctest::Approx(std::exp(0.5)).epsilon(1e-12));
        CHECK(b(1, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
        CHECK(std::abs(b(0, 1)) < 1e-15);
        CHECK_THROWS_AS(evaluate_flow(fc, Vector::Zero(1), 65.0), Error);

        const FlowCocycle rot(FlowBase::fixed_point(), FieldSpec::rotation(1.0), Norm::euclidean(2));
        const Matrix r = evaluate_flow(rot, Vector::Zero(1), 2.0).value;
        CHECK((r - mat2(std::cos(2.0), std::sin(2.0), -std::sin(2.0), std::cos(2.0))).norm() < 1e-10);
    }

    TEST_CASE("rk4 error ratio under step halving") {
        Matrix m(3, 3);
        m << 0.3, 1.0, 0.0, -1.0, 0.1, 0.5, 0.2, -0.4, -0.6;
        const FlowCocycle fc(FlowBase::fixed_point(), FieldSpec::constant_matrix(m), Norm::euclidean(3));
        const double t = 4.0;
        const Matrix exact = (m * t).exp();
        const double e1 = (fc.integrate(Vector::Zero(1), t, 0.2) - exact).norm();
        const double e2 = (fc.integrate(Vector::Zero(1), t, 0.1) - exact).norm();
        CHECK(e1 / e2 >= 12.0);
        CHECK(e1 / e2 <= 20.0);
        const FlowEvaluation ev = evaluate_flow(fc, Vector::Zero(1), t);
        CHECK((ev.value - exact).norm() < 1e-9 * exact.norm());
        CHECK(ev.error_estimate < 1e-9 * exact.norm());
    }

    TEST_CASE("forced diagonal field against its closed form") {
        FieldTerm term;
        term.coefficient = mat2(0.5, 0, 0, -0.25);
        term.component = 0;
        const Vector d = Eigen::Vector2d(0.8, -0.8);
        const FlowCocycle fc(FlowBase::torus(Vector::Constant(1, 0.618), {8}),
                             FieldSpec::diagonal_trig(d, {term}), Norm::euclidean(2));
        REQUIRE(fc.has_closed_form());
        for (const Vector& x : fc.samples()) {
            for (double t : {0.3, 1.0, 2.7}) {
                const Matrix num = evaluate_flow(fc, x, t).value;
                CHECK((num - fc.closed_form(x, t)).norm() < 1e-10);
            }
        }
    }

    TEST_CASE("time-1/m maps and the diagonal flow splitting") {
        CHECK(discretization_step(1.0 / 256.0, 3) * std::ceil((1.0 / 3.0) / (1.0 / 256.0)) ==
              doctest::Approx(1.0 / 3.0));
        const Matrix diag = mat2(1, 0, 0, -1);
        const FlowCocycle fc(FlowBase::fixed_point(), FieldSpec::constant_matrix(diag), Norm::euclidean(2));
        const Matrix g = discretize_flow(fc, 2).generator(Vector::Zero(1));
        CHECK(g(0, 0) == doctest::Approx(std::exp(0.5)).epsilon(1e-12));
        const FlowDomination cert = continuous_domination_check(fc, 1, 8.0);
        REQUIRE(cert.pass);
        CHECK(cert.gamma == doctest::Approx(2.0).epsilon(1e-3));
        const FlowSplitting s = flow_splitting(fc, cert, {1, 2, 3}, 30, 1e-10, 8.0);
        CHECK(s.pass);
        CHECK(s.agree);
        CHECK(oracle::proj_dist(s.reports[0].points[0].e.basis(), axis(2, 0)) < 1e-8);
        CHECK(oracle::proj_dist(s.reports[0].points[0].f.basis(), axis(2, 1)) < 1e-8);
        CHECK(s.half_time_ratio == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
        CHECK(s.gamma == doctest::Approx(2.0).epsilon(1e-3));
    }

    TEST_CASE("rotation flow is not dominated") {
        const FlowCocycle fc(FlowBase::fixed_point(), FieldSpec::rotation(1.0), Norm::euclidean(2));
        const FlowDomination cert = continuous_domination_check(fc, 1, 4.0);
        CHECK_FALSE(cert.pass);
        CHECK(std::abs(cert.gamma) < 1e-6);
    }
}
