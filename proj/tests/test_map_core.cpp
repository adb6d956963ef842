#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bbmap/map_core.hpp"

using namespace bbmap;

namespace {

bool same_direction(const ProjectiveDirection& a, const ProjectiveDirection& b, double tol) {
    return norm(a.vec() - b.vec()) < tol;
}

ProjectiveDirection random_valid(std::mt19937_64& g) {
    std::normal_distribution<double> n;
    return ProjectiveDirection(std::abs(n(g)), n(g), -std::abs(n(g))).canonical();
}

}  // namespace

TEST_CASE("canonical sign rule") {
    const auto a = ProjectiveDirection(-1, 2, 3).canonical();
    CHECK(a.x > 0);
    CHECK(a.z < 0);
    CHECK(std::abs(norm(a.vec()) - 1) < 1e-15);
    const auto b = ProjectiveDirection(0, 1, 2).canonical();
    CHECK(b.x == 0);
    CHECK(b.z < 0);
    const auto c = ProjectiveDirection(0, -3, 0).canonical();
    CHECK(c.y == doctest::Approx(1));
    CHECK_THROWS_AS(ProjectiveDirection(0, 0, 0).canonical(), DomainError);
    CHECK(a.is_canonical_sign());
}

TEST_CASE("restitution range") {
    CHECK_THROWS_AS(Restitution(0.0), DomainError);
    CHECK_THROWS_AS(Restitution(1.0), DomainError);
    CHECK_NOTHROW(Restitution(0.5));
}

TEST_CASE("branch matrices") {
    const Vec3 v{1, 0, -1};
    const Vec3 w = branch_matrix(2, 0.4) * v;
    CHECK(w[0] == doctest::Approx(0.4));
    CHECK(w[1] == doctest::Approx(0).epsilon(1e-15));
    CHECK(w[2] == doctest::Approx(-0.4));
    CHECK(det(branch_matrix(1, 1.0 / 3)) == doctest::Approx(1.0 / 81).epsilon(1e-14));
    CHECK(det(branch_matrix(2, 0.5)) == doctest::Approx(1.0 / 8).epsilon(1e-14));
    const Mat3 P3 = J() * branch_matrix(1, 0.3) * J();
    CHECK(max_abs_diff(P3, branch_matrix(3, 0.3)) < 1e-15);
}

TEST_CASE("collision matrices") {
    const Mat3 A = collision_matrix('a', 0.3), C = collision_matrix('c', 0.3);
    CHECK(A.a[0] == doctest::Approx(-0.3));
    CHECK(A.a[1] == 0);
    CHECK(A.a[2] == 0);
    CHECK(max_abs_diff(A * C, C * A) == 0);
    const Vec3 b = collision_matrix('b', 1.0) * Vec3{0, 1, 0};
    CHECK(b[0] == doctest::Approx(1));
    CHECK(b[1] == doctest::Approx(-1));
    CHECK(b[2] == doctest::Approx(1));
}

TEST_CASE("classify examples") {
    CHECK(classify({0.1, 1, -1}, 0.2).id == 1);
    CHECK(classify({1, 1, -1}, 0.2).id == 2);
    CHECK(classify({1, -1, -0.1}, 0.2).id == 3);
    CHECK(classify({1, 0, -1}, 0.2).id == 2);
    // on the boundary alpha*y = x
    CHECK(classify({0.6, 1, -1}, 0.2).id == 2);
}

TEST_CASE("step examples") {
    const auto s1 = step(ProjectiveDirection(0.1, 1, -1).canonical(), 0.2);
    CHECK(s1.branch.id == 1);
    CHECK(same_direction(s1.next, ProjectiveDirection(0.1, -0.02, -0.04).canonical(), 1e-14));
    const auto s2 = step(ProjectiveDirection(1, 1, -1).canonical(), 0.2);
    CHECK(s2.branch.id == 2);
    CHECK(same_direction(s2.next, ProjectiveDirection(0.08, -0.52, -0.32).canonical(), 1e-14));
    CHECK(iterate(ProjectiveDirection(1, 1, -1), 0.2, 0).empty());
}

TEST_CASE("P2 fixed direction for every r") {
    const ProjectiveDirection e(1 / std::numbers::sqrt2, 0, -1 / std::numbers::sqrt2);
    for (double r : {0.01, 0.1, 0.3, 0.7, 0.99}) {
        const auto s = step(e, r);
        CHECK(s.branch.id == 2);
        CHECK(same_direction(s.next, e, 1e-15));
        CHECK(s.raw_norm == doctest::Approx(r).epsilon(1e-12));
    }
}

TEST_CASE("angles and strip coordinates") {
    CHECK(theta({1, 0, -1}) == doctest::Approx(std::numbers::pi / 4));
    CHECK(theta({1, 0.7, 0}) == doctest::Approx(0));
    CHECK(theta({0, 0.3, -1}) == doctest::Approx(std::numbers::pi / 2));
    CHECK(phi({1, 0, -1}) == doctest::Approx(std::numbers::pi / 2));
    CHECK(phi({1, 1, -1}) == doctest::Approx(std::acos(-1 / std::sqrt(3.0))));
    CHECK(phi({1, 0.3, -2}) > std::numbers::pi / 2);
    auto [a1, a2] = strip_coords({1, 0, -1});
    CHECK(a1 == doctest::Approx(0));
    CHECK(a2 == doctest::Approx(0));
    auto [b1, b2] = strip_coords({1, 1, -1});
    CHECK(b1 == doctest::Approx(0.5));
    CHECK(b2 == doctest::Approx(0));
    const auto u = from_strip(0.3, -0.2);
    auto [c1, c2] = strip_coords(u);
    CHECK(c1 == doctest::Approx(0.3));
    CHECK(c2 == doctest::Approx(-0.2));
}

TEST_CASE("strip branch condition matches classify") {
    std::mt19937_64 g(7);
    for (int i = 0; i < 2000; ++i) {
        const auto u = random_valid(g);
        const double r = 0.05 + 0.9 * (i % 97) / 96.0;
        auto [w1, w2] = strip_coords(u);
        const double a = alpha_of(r);
        CHECK((w2 < 2 * a * w1 - 1) == (classify(u, r).id == 1));
    }
}

TEST_CASE("property: quadrant invariance") {
    std::mt19937_64 g(11);
    std::size_t steps = 0;
    for (double r : {0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 0.8, 0.95}) {
        for (int k = 0; k < 5; ++k) {
            ProjectiveDirection u = random_valid(g);
            for (int i = 0; i < 2500; ++i, ++steps) {
                u = step(u, r).next;
                REQUIRE(u.x >= 0);
                REQUIRE(u.z <= 0);
                REQUIRE(std::abs(norm(u.vec()) - 1) < 1e-12);
            }
        }
    }
    CHECK(steps >= 100000);
}

TEST_CASE("property: projective consistency") {
    std::mt19937_64 g(12);
    std::uniform_real_distribution<double> lam(-5, 5);
    for (int i = 0; i < 2000; ++i) {
        const auto u = random_valid(g);
        double l = lam(g);
        if (std::abs(l) < 1e-3) l = 1.5;
        const ProjectiveDirection v(l * u.x, l * u.y, l * u.z);
        const double r = 0.2 + 0.001 * i / 3;
        CHECK(same_direction(step(u, r).next, step(v.canonical(), r).next, 1e-12));
    }
}

TEST_CASE("property: formula and matrix agree") {
    std::mt19937_64 g(13);
    std::normal_distribution<double> n;
    for (int i = 0; i < 10000; ++i) {
        const Vec3 u{n(g), n(g), n(g)};
        const double r = 0.01 + 0.98 * (i % 101) / 100.0;
        for (int b = 1; b <= 3; ++b) {
            const Vec3 f = apply_formula(b, u, r);
            const Vec3 m = branch_matrix(b, r) * u;
            REQUIRE(norm(f - m) <= 1e-14 * (1 + norm(u)));
        }
    }
}

TEST_CASE("property: J symmetry") {
    std::mt19937_64 g(14);
    for (int i = 0; i < 3000; ++i) {
        const auto u = random_valid(g);
        const double r = 0.05 + 0.9 * (i % 89) / 88.0;
        const auto m = mirror(u).canonical();
        const int b = classify(u, r).id, bm = classify(m, r).id;
        CHECK(bm == (b == 2 ? 2 : 4 - b));
        CHECK(same_direction(mirror(step(u, r).next).canonical(), step(m, r).next, 1e-12));
    }
}

TEST_CASE("branch symbols") {
    CHECK(Branch{1}.symbols(0.5) == "ab");
    CHECK(Branch{3}.symbols(-0.5) == "cb");
    CHECK(Branch{2}.symbols(0.5) == "acb");
    CHECK(Branch{2}.symbols(-0.5) == "cab");
}
