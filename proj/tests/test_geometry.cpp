#include <doctest.h>

#include <cmath>

#include "domsplit/error.hpp"
#include "domsplit/geometry.hpp"
#include "domsplit/snumbers.hpp"
#include "domsplit/svd_split.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace domsplit;

namespace {

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

SearchOptions multistart() {
    SearchOptions o;
    o.strategy = Strategy::multistart;
    return o;
}

}  // namespace

TEST_SUITE("geometry") {
    TEST_CASE("euclidean distances between subspaces") {
        const Norm n = Norm::euclidean(2);
        const Subspace e1 = Subspace::coordinate(2, {0});
        const Subspace line = Subspace::span(vec2(1.0, 1.0));
        CHECK(hausdorff(e1, line, n) == doctest::Approx(std::sqrt(0.5)));
        CHECK(gap(e1, line, n) == doctest::Approx(std::sqrt(0.5)));
        CHECK(minimal_angle(e1, Subspace::coordinate(2, {1}), n).sin_theta == doctest::Approx(1.0));
        CHECK(hausdorff(e1, e1, n) == doctest::Approx(0.0));
    }

    TEST_CASE("gap and angle for d = 2 polyhedral norms match grid enumeration") {
        gen::Source src(101);
        for (double p : {1.0, infinity}) {
            const Norm n = Norm::lp(2, p);
            for (int t = 0; t < 20; ++t) {
                const Vector e = src.vector(2), f = src.vector(2);
                const Subspace se = Subspace::span(e), sf = Subspace::span(f);
                const double ref = oracle::line_gap(e, f, p);
                for (const SearchOptions& o : {SearchOptions{}, multistart()}) {
                    CHECK(gap(se, sf, n, o) == doctest::Approx(ref).epsilon(1e-5));
                    CHECK(minimal_angle(se, sf, n, o).sin_theta == doctest::Approx(ref).epsilon(1e-5));
                }
                // unit spheres of two lines are {+-e}, {+-f}
                const Vector eu = e / oracle::lp(e, p), fu = f / oracle::lp(f, p);
                const double sphere = std::min(oracle::lp(eu - fu, p), oracle::lp(eu + fu, p));
                CHECK(hausdorff(se, sf, n) == doctest::Approx(sphere).epsilon(1e-9));
            }
        }
    }

    TEST_CASE("oblique projection, random") {
        gen::Source src(102);
        for (int t = 0; t < 60; ++t) {
            const int d = src.integer(2, 5), k = src.integer(1, d - 1);
            const Subspace e = Subspace::span(src.matrix(d, k));
            const Subspace f = Subspace::span(src.matrix(d, d - k));
            const Norm n = t % 2 ? Norm::euclidean(d) : Norm::lp(d, infinity);
            const Projection pr = oblique_projection(e, f, n);
            CHECK((pr.matrix * pr.matrix - pr.matrix).norm() < 1e-9 * (1.0 + pr.matrix.norm()));
            CHECK((pr.matrix * e.basis() - e.basis()).norm() < 1e-9 * (1.0 + pr.matrix.norm()));
            CHECK((pr.matrix * f.basis()).norm() < 1e-9 * (1.0 + pr.matrix.norm()));
            CHECK(pr.norm >= 1.0 - 1e-9);
        }
        CHECK_THROWS_AS(oblique_projection(Subspace::coordinate(2, {0}), Subspace::coordinate(2, {0}),
                                           Norm::euclidean(2)),
                        Error);
    }

    TEST_CASE("operator norms of polyhedral norms have row and column sum forms") {
        gen::Source src(103);
        for (int t = 0; t < 40; ++t) {
            const int d = src.integer(2, 5);
            const Matrix a = src.matrix(d, d);
            CHECK(operator_norm(a, Norm::lp(d, infinity)) ==
                  doctest::Approx(a.cwiseAbs().rowwise().sum().maxCoeff()));
            CHECK(operator_norm(a, Norm::lp(d, 1.0)) == doctest::Approx(a.cwiseAbs().colwise().sum().maxCoeff()));
            CHECK(operator_norm(a, Norm::euclidean(d)) == doctest::Approx(oracle::singular_values(a)(0)));
        }
    }

    TEST_CASE("ball volumes") {
        CHECK(ball_volume(Matrix::Identity(3, 3), Norm::euclidean(3)).value == doctest::Approx(4.0 * M_PI / 3.0));
        const BallVolume l1 = ball_volume(Matrix::Identity(3, 3), Norm::lp(3, 1.0));
        CHECK(std::abs(l1.value - 4.0 / 3.0) <= 3.0 * l1.tolerance * (4.0 / 3.0) + 1e-12);
        const BallVolume linf = ball_volume(Matrix::Identity(2, 2), Norm::lp(2, infinity));
        CHECK(std::abs(linf.value - 4.0) <= 3.0 * linf.tolerance * 4.0 + 1e-12);
        // a line section {c : |c b| <= 1} has length 2 / |b|
        Matrix b(3, 1);
        b << 0.6, 0.0, 0.8;
        CHECK(ball_volume(b, Norm::lp(3, infinity)).value == doctest::Approx(2.0 / 0.8).epsilon(1e-6));
        CHECK(ball_volume(b, Norm::lp(3, 1.0)).value == doctest::Approx(2.0 / 1.4).epsilon(1e-6));
    }

    TEST_CASE("euclidean subspace determinant equals the Gram oracle") {
        gen::Source src(104);
        for (int t = 0; t < 100; ++t) {
            const int d = src.integer(2, 6), k = src.integer(1, d);
            const Matrix a = src.matrix(d, d);
            const Matrix e = src.matrix(d, k);
            CHECK(subspace_determinant(a, Subspace::span(e), Norm::euclidean(d)) ==
                  doctest::Approx(oracle::gram_det(a, e)).epsilon(1e-9));
        }
    }

    TEST_CASE("determinant splitting stays within the angle bounds, euclidean") {
        gen::Source src(105);
        for (int t = 0; t < 50; ++t) {
            const int d = src.integer(2, 5), l = src.integer(1, d - 1);
            const Matrix a = src.conditioned(d, 5.0);
            const Subspace g = Subspace::span(src.matrix(d, l));
            const Subspace h = Subspace::span(src.matrix(d, d - l));
            const DetSplit s = det_split_bound(a, g, h, Norm::euclidean(d));
            CHECK(s.within);
        }
    }
}

TEST_SUITE("snumbers") {
    TEST_CASE("euclidean s-numbers collapse to singular values") {
        gen::Source src(201);
        for (int t = 0; t < 100; ++t) {
            const int d = src.integer(1, 8);
            const Matrix a = src.matrix(d, d);
            const Vector s = oracle::singular_values(a);
            const Norm n = Norm::euclidean(d);
            double prod = 1.0;
            for (int q = 1; q <= d; ++q) {
                prod *= s(q - 1);
                CHECK(gelfand_number(a, q, n).value == doctest::Approx(s(q - 1)).epsilon(1e-9).scale(1e-12));
                CHECK(kolmogorov_number(a, q, n).value == doctest::Approx(s(q - 1)).epsilon(1e-9).scale(1e-12));
                CHECK(volume_growth(a, q, n).value == doctest::Approx(prod).epsilon(1e-9).scale(1e-12));
            }
        }
    }

    TEST_CASE("d = 2 polyhedral gelfand and kolmogorov numbers match grid enumeration") {
        gen::Source src(202);
        for (double p : {1.0, infinity}) {
            const Norm n = Norm::lp(2, p);
            for (int t = 0; t < 20; ++t) {
                const Matrix a = src.matrix(2, 2, -2.0, 2.0);
                const double top = oracle::ratio_extremum(a, p, true);
                const double bottom = oracle::ratio_extremum(a, p, false);
                for (const SearchOptions& o : {SearchOptions{}, multistart()}) {
                    CHECK(gelfand_number(a, 1, n, o).value == doctest::Approx(top).epsilon(1e-5));
                    CHECK(gelfand_number(a, 2, n, o).value == doctest::Approx(bottom).epsilon(1e-5));
                    CHECK(kolmogorov_number(a, 1, n, o).value == doctest::Approx(top).epsilon(1e-5));
                    CHECK(kolmogorov_number(a, 2, n, o).value == doctest::Approx(bottom).epsilon(1e-5));
                }
            }
        }
    }

    TEST_CASE("hand computed linf values") {
        const Norm n = Norm::lp(2, infinity);
        const Matrix a = mat2(3, 1, 0, 1);
        CHECK(gelfand_number(a, 1, n).value == doctest::Approx(4.0));
        CHECK(gelfand_number(a, 2, n).value == doctest::Approx(1.0));
        CHECK(kolmogorov_number(mat2(3, 1, 0, 1), 1, Norm::lp(2, 1.0)).value == doctest::Approx(3.0));
        CHECK(min_norm(a, Subspace::coordinate(2, {0}), n) == doctest::Approx(3.0));
    }

    TEST_CASE("s-numbers are non-increasing and submultiplicative, random") {
        gen::Source src(203);
        for (int t = 0; t < 30; ++t) {
            const int d = src.integer(2, 3);
            const Norm n = t % 2 ? Norm::lp(d, 1.0) : Norm::lp(d, infinity);
            const Matrix a = src.matrix(d, d), b = src.matrix(d, d);
            for (int q = 1; q < d; ++q) {
                CHECK(gelfand_number(a, q + 1, n).value <= gelfand_number(a, q, n).value * (1.0 + 1e-9) + 1e-12);
                CHECK(kolmogorov_number(a, q + 1, n).value <= kolmogorov_number(a, q, n).value * (1.0 + 1e-9) + 1e-12);
            }
            const double ab = gelfand_number(a * b, 1, n).value;
            CHECK(ab <= gelfand_number(a, 1, n).value * gelfand_number(b, 1, n).value * (1.0 + 1e-9) + 1e-12);
        }
    }

    TEST_CASE("dimension caps") {
        CHECK_NOTHROW(check_dim_cap(16, Norm::euclidean(16)));
        CHECK_THROWS_AS(check_dim_cap(17, Norm::euclidean(17)), Error);
        CHECK_THROWS_AS(check_dim_cap(7, Norm::lp(7, infinity)), Error);
        try {
            gelfand_number(Matrix::Identity(7, 7), 1, Norm::lp(7, 1.0));
            FAIL("expected a cap error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::cap_exceeded);
        }
    }
}

TEST_SUITE("svd_split") {
    TEST_CASE("diagonal example") {
        const HilbertSplit s = hilbert_svd_split(mat2(2, 0, 0, 1), Subspace::coordinate(2, {0}));
        CHECK(oracle::proj_dist(s.f.basis(), Matrix::Identity(2, 2).col(1)) < 1e-14);
        CHECK(s.r == doctest::Approx(1.0));
        CHECK(s.min_norm_e == doctest::Approx(2.0));
        CHECK(s.norm_on_f == doctest::Approx(1.0));
        CHECK(s.projection_norm == doctest::Approx(1.0));
        CHECK(s.bounds_hold);
    }

    TEST_CASE("hilbert split inequalities, random") {
        gen::Source src(301);
        for (int t = 0; t < 200; ++t) {
            const int d = src.integer(2, 8), k = src.integer(1, d - 1);
            const Matrix a = src.matrix(d, d);
            const Subspace e = Subspace::span(src.matrix(d, k));
            const HilbertSplit s = hilbert_svd_split(a, e);
            const Vector sv = oracle::singular_values(a);
            double vk = 1.0;
            for (int i = 0; i < k; ++i) vk *= sv(i);
            const double r = oracle::gram_det(a, e.basis()) / vk;
            CHECK(s.r == doctest::Approx(r).epsilon(1e-8));
            CHECK(s.min_norm_e >= r * sv(k - 1) * (1.0 - 1e-9));
            CHECK(s.norm_on_f <= sv(k) / r * (1.0 + 1e-9));
            CHECK(s.projection_norm <= (1.0 + 1e-9) / r);
            CHECK(s.bounds_hold);
            // A F is orthogonal to A E
            CHECK(((a * e.basis()).transpose() * (a * s.f.basis())).norm() < 1e-9 * a.squaredNorm());
        }
    }

    TEST_CASE("one step, linf hand case") {
        const Matrix a = mat2(2, 1, 0, 1);
        const OneStep s = banach_one_step(a, vec2(1, 0), Norm::lp(2, infinity));
        CHECK(oracle::proj_dist(s.g_image.basis(), vec2(0, 1)) < 1e-12);
        CHECK(oracle::proj_dist(s.g.basis(), a.inverse() * vec2(0, 1)) < 1e-12);
        CHECK(s.image_projection_norm == doctest::Approx(1.0));
        CHECK(s.bound == doctest::Approx(3.0 / 2.0));
        CHECK(s.projection_norm <= s.bound * (1.0 + 1e-9));
        CHECK(s.bound_holds);
    }

    TEST_CASE("generalized split reproduces the hilbert split on euclidean inputs") {
        gen::Source src(302);
        for (int t = 0; t < 100; ++t) {
            const int d = src.integer(2, 6), k = src.integer(1, d - 1);
            const Matrix a = src.matrix(d, d);
            Eigen::JacobiSVD<Matrix> ref(a, Eigen::ComputeFullV);
            const Subspace e = Subspace::span(ref.matrixV().leftCols(k));
            const GenSvd g = banach_gen_svd(a, e, Norm::euclidean(d));
            const HilbertSplit h = hilbert_svd_split(a, e);
            CHECK(oracle::proj_dist(g.f.basis(), h.f.basis()) < 1e-8);
            CHECK(g.containment_residual < 1e-9);
        }
    }

    TEST_CASE("generalized split, linf small cases") {
        gen::Source src(303);
        for (int t = 0; t < 30; ++t) {
            const int d = src.integer(2, 3), k = src.integer(1, d - 1);
            const Matrix a = src.conditioned(d, 4.0);
            const Subspace e = Subspace::span(src.matrix(d, k));
            const GenSvd g = banach_gen_svd(a, e, Norm::lp(d, infinity));
            CHECK(g.containment_residual < 1e-9);
            CHECK(g.f.dim() == d - k);
            CHECK(std::isfinite(g.empirical_d));
            CHECK(g.projection_norm <= g.empirical_d * (1.0 + 1e-12));
            CHECK(g.image_projection_norm <= g.empirical_d * (1.0 + 1e-12));
            CHECK(g.norm_on_f <= g.empirical_d * g.c_next * (1.0 + 1e-12) + 1e-15);
        }
    }

    TEST_CASE("determinant lipschitz bounds") {
        const BoundCheck c = det_lipschitz_matrices(Matrix::Identity(2, 2), 1.1 * Matrix::Identity(2, 2));
        CHECK(c.lhs == doctest::Approx(2.0 * std::log(1.1)));
        CHECK(c.rhs == doctest::Approx(2.0 * 0.1 / 0.9));
        CHECK(c.pass);
        gen::Source src(304);
        for (int t = 0; t < 200; ++t) {
            const int k = src.integer(1, 5);
            const Matrix b1 = src.conditioned(k, 3.0);
            const Matrix b2 = b1 + 0.05 * oracle::singular_values(b1)(k - 1) * src.matrix(k, k) / k;
            CHECK(det_lipschitz_matrices(b1, b2).pass);
        }
    }
}
