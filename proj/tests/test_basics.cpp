#include <doctest.h>

#include <cmath>
#include <vector>

#include "domsplit/error.hpp"
#include "domsplit/kernels.hpp"
#include "domsplit/linalg.hpp"
#include "domsplit/norm.hpp"
#include "domsplit/rng.hpp"
#include "domsplit/subspace.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace domsplit;

TEST_SUITE("linalg") {
    TEST_CASE("jacobi svd matches the two-sided reference") {
        gen::Source src(11);
        for (int t = 0; t < 200; ++t) {
            const int r = src.integer(1, 8), c = src.integer(1, 8);
            const Matrix a = src.matrix(r, c);
            const Svd s = jacobi_svd(a);
            const Vector ref = oracle::singular_values(a);
            const int m = std::min(r, c);
            REQUIRE(s.s.size() == m);
            for (int i = 0; i < m; ++i) CHECK(s.s(i) == doctest::Approx(ref(i)).epsilon(1e-9).scale(1.0));
            const Matrix rebuilt = s.u * s.s.asDiagonal() * s.v.transpose();
            CHECK((rebuilt - a).norm() < 1e-12 * (1.0 + a.norm()));
            CHECK((s.u.transpose() * s.u - Matrix::Identity(m, m)).norm() < 1e-12);
            CHECK((s.v.transpose() * s.v - Matrix::Identity(m, m)).norm() < 1e-12);
        }
    }

    TEST_CASE("graded matrices keep small singular values") {
        Matrix r(2, 2);
        r << 1.0, 1e-3, 0.0, 1e-30;
        const Vector s = singular_values(r);
        CHECK(s(1) == doctest::Approx(1e-30 / std::hypot(1.0, 1e-3)).epsilon(1e-10));
    }

    TEST_CASE("null space and orthonormal basis") {
        gen::Source src(12);
        for (int t = 0; t < 50; ++t) {
            const int d = src.integer(2, 7), k = src.integer(1, d - 1);
            const Matrix b = src.matrix(d, k);
            const Matrix q = orthonormal_basis(b);
            CHECK(q.cols() == k);
            const Matrix n = null_space(b.transpose());
            CHECK(n.cols() == d - k);
            CHECK((b.transpose() * n).norm() < 1e-12);
            const Matrix c = complement_basis(q);
            CHECK((q.transpose() * c).norm() < 1e-12);
        }
        Matrix dep(3, 2);
        dep << 1, 2, 1, 2, 1, 2;
        CHECK(orthonormal_basis(dep).cols() == 1);
    }

    TEST_CASE("euclidean ball volumes") {
        CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
        CHECK(unit_ball_volume(2) == doctest::Approx(M_PI));
        CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * M_PI / 3.0));
    }
}

TEST_SUITE("rng") {
    TEST_CASE("streams are reproducible and seed sensitive") {
        Rng a(42), b(42), c(43);
        for (int i = 0; i < 100; ++i) {
            const double x = a.normal();
            CHECK(x == b.normal());
            (void)c;
        }
        CHECK(Rng(42).next() != Rng(43).next());
        CHECK(mix_seed(1, 0) != mix_seed(1, 1));
        CHECK(mix_seed(7, 3) == mix_seed(7, 3));
    }

    TEST_CASE("normal moments") {
        Rng r(5);
        double s = 0.0, s2 = 0.0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            const double x = r.normal();
            s += x;
            s2 += x * x;
        }
        CHECK(std::abs(s / n) < 0.01);
        CHECK(std::abs(s2 / n - 1.0) < 0.01);
    }

    TEST_CASE("halton radical inverse") {
        CHECK(halton(1, 0) == doctest::Approx(0.5));
        CHECK(halton(2, 0) == doctest::Approx(0.25));
        CHECK(halton(3, 0) == doctest::Approx(0.75));
        CHECK(halton(1, 1) == doctest::Approx(1.0 / 3.0));
        CHECK(halton(5, 1) == doctest::Approx(7.0 / 9.0));
    }
}

TEST_SUITE("norm") {
    TEST_CASE("values and duals") {
        Vector x(3);
        x << 3, -4, 1;
        CHECK(Norm::lp(3, 1.0)(x) == doctest::Approx(8.0));
        CHECK(Norm::lp(3, infinity)(x) == doctest::Approx(4.0));
        CHECK(Norm::euclidean(3)(x) == doctest::Approx(std::sqrt(26.0)));
        CHECK(Norm::lp(3, 1.0).dual(x) == doctest::Approx(4.0));
        Vector w(3);
        w << 2, 1, 1;
        CHECK(Norm::weighted(w, 1.0)(x) == doctest::Approx(11.0));
        CHECK(Norm::parse("linf", 3) == Norm::lp(3, infinity));
        CHECK(Norm::parse("weighted:2,1,1@1", 3)(x) == doctest::Approx(11.0));
        CHECK_THROWS_AS(Norm::parse("l7x", 3), Error);
    }

    TEST_CASE("norm axioms and norming functionals, random") {
        gen::Source src(21);
        const std::vector<double> ps{1.0, 1.5, 2.0, 3.0, infinity};
        for (int t = 0; t < 300; ++t) {
            const int d = src.integer(1, 6);
            Vector w(d);
            for (int i = 0; i < d; ++i) w(i) = src.uniform(0.5, 2.0);
            const Norm n = Norm::weighted(w, ps[t % ps.size()]);
            const Vector x = src.vector(d), y = src.vector(d);
            const double a = src.uniform(-3.0, 3.0);
            CHECK(n(x + y) <= n(x) + n(y) + 1e-12);
            CHECK(n(a * x) == doctest::Approx(std::abs(a) * n(x)));
            const Vector f = n.norming_functional(x);
            CHECK(n.dual(f) == doctest::Approx(1.0));
            CHECK(f.dot(x) == doctest::Approx(n(x)));
            CHECK(std::abs(f.dot(y)) <= n(y) + 1e-12);
        }
    }

    TEST_CASE("linf norming functional ties go to the lowest index") {
        Vector x(3);
        x << 1, -1, 1;
        const Vector f = Norm::lp(3, infinity).norming_functional(x);
        CHECK(f(0) == doctest::Approx(1.0));
        CHECK(f(1) == 0.0);
        CHECK(f(2) == 0.0);
    }
}

TEST_SUITE("kernels") {
    TEST_CASE("every supported isa matches the scalar reference") {
        gen::Source src(31);
        for (int d : {1, 2, 3, 5, 8}) {
            const std::size_t n = 1003;
            const Matrix pts = src.matrix(static_cast<int>(n), d);  // column-major: coordinate j of point i
            Vector w(d);
            for (int i = 0; i < d; ++i) w(i) = src.uniform(0.5, 2.0);
            for (double p : {1.0, 2.0, 3.0, infinity}) {
                std::vector<double> ref(n), out(n);
                kernels::weighted_norms(kernels::Isa::scalar, pts.data(), n, d, w.data(), p, ref.data());
                for (std::size_t i = 0; i < n; ++i)
                    CHECK(ref[i] == doctest::Approx(oracle::lp(w.cwiseProduct(pts.row(i).transpose()), p)));
                const std::size_t ref_count =
                    kernels::count_within(kernels::Isa::scalar, pts.data(), n, d, nullptr, p, 0.9);
                for (auto isa : {kernels::Isa::avx2, kernels::Isa::neon}) {
                    if (!kernels::isa_supported(isa)) continue;
                    kernels::weighted_norms(isa, pts.data(), n, d, w.data(), p, out.data());
                    for (std::size_t i = 0; i < n; ++i) CHECK(out[i] == doctest::Approx(ref[i]).epsilon(1e-14));
                    CHECK(kernels::count_within(isa, pts.data(), n, d, nullptr, p, 0.9) == ref_count);
                }
            }
        }
    }

    TEST_CASE("dispatch can be forced to scalar") {
        const auto before = kernels::active_isa();
        kernels::set_isa(kernels::Isa::scalar);
        CHECK(kernels::active_isa() == kernels::Isa::scalar);
        kernels::set_isa(before);
        CHECK(kernels::isa_supported(kernels::Isa::scalar));
    }
}

TEST_SUITE("subspace") {
    TEST_CASE("construction and lattice operations") {
        const Subspace e1 = Subspace::coordinate(3, {0});
        const Subspace e12 = Subspace::coordinate(3, {0, 1});
        CHECK(e12.dim() == 2);
        CHECK(e12.contains(e1.basis().col(0)));
        CHECK(e1.complement().dim() == 2);
        CHECK(e1.sum(Subspace::coordinate(3, {2})).dim() == 2);
        CHECK(e12.intersect(Subspace::coordinate(3, {1, 2})).dim() == 1);
        CHECK(Subspace::whole(3).dim() == 3);
        CHECK(Subspace::zero(3).dim() == 0);
        Matrix dep(3, 2);
        dep << 1, 2, 0, 0, 0, 0;
        CHECK_THROWS_AS(Subspace::span(dep), Error);
        CHECK(Subspace::span_of(dep).dim() == 1);
    }

    TEST_CASE("image and preimage are inverse, random") {
        gen::Source src(41);
        for (int t = 0; t < 100; ++t) {
            const int d = src.integer(2, 6), k = src.integer(1, d - 1);
            const Matrix a = src.conditioned(d, 10.0);
            const Subspace e = Subspace::span(src.matrix(d, k));
            const Subspace back = e.image(a).preimage(a);
            CHECK(oracle::proj_dist(back.basis(), e.basis()) < 1e-9);
        }
        Matrix sing = Matrix::Zero(2, 2);
        sing(0, 0) = 1.0;
        CHECK_THROWS_AS(Subspace::coordinate(2, {1}).image(sing), Error);
    }
}
