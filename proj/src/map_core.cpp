#include "bbmap/map_core.hpp"

#include "bbmap/detail/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace bbmap {

Mat3 Mat3::identity() { return from_rows({1, 0, 0}, {0, 1, 0}, {0, 0, 1}); }

Mat3 Mat3::from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
    Mat3 m;
    for (int j = 0; j < 3; ++j) {
        m(0, j) = r0[j];
        m(1, j) = r1[j];
        m(2, j) = r2[j];
    }
    return m;
}

Mat3 operator*(const Mat3& m, const Mat3& n) {
    Mat3 p;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            p(i, j) = m(i, 0) * n(0, j) + m(i, 1) * n(1, j) + m(i, 2) * n(2, j);
    return p;
}

Vec3 operator*(const Mat3& m, const Vec3& v) {
    return {m(0, 0) * v[0] + m(0, 1) * v[1] + m(0, 2) * v[2],
            m(1, 0) * v[0] + m(1, 1) * v[1] + m(1, 2) * v[2],
            m(2, 0) * v[0] + m(2, 1) * v[1] + m(2, 2) * v[2]};
}

Mat3 transpose(const Mat3& m) {
    Mat3 t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t(i, j) = m(j, i);
    return t;
}

double det(const Mat3& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

double trace(const Mat3& m) { return m(0, 0) + m(1, 1) + m(2, 2); }

double max_abs_diff(const Mat3& m, const Mat3& n) {
    double d = 0;
    for (int k = 0; k < 9; ++k) d = std::max(d, std::abs(m.a[k] - n.a[k]));
    return d;
}

double dot(const Vec3& u, const Vec3& v) { return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]; }

Vec3 cross(const Vec3& u, const Vec3& v) {
    return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

Vec3 normalized(const Vec3& v) { return scaled(v, 1.0 / norm(v)); }

Vec3 scaled(const Vec3& v, double s) { return {v[0] * s, v[1] * s, v[2] * s}; }

Vec3 operator+(const Vec3& u, const Vec3& v) { return {u[0] + v[0], u[1] + v[1], u[2] + v[2]}; }

Vec3 operator-(const Vec3& u, const Vec3& v) { return {u[0] - v[0], u[1] - v[1], u[2] - v[2]}; }

Restitution::Restitution(double r_) : r(r_) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("restitution coefficient must lie in (0,1)");
}

bool ProjectiveDirection::is_canonical_sign() const {
    if (x > 0) return true;
    if (x < 0) return false;
    if (z < 0) return true;
    if (z > 0) return false;
    return y > 0;
}

ProjectiveDirection ProjectiveDirection::canonical() const {
    Vec3 v = vec();
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) || !kernel::canonicalize(v))
        throw DomainError("zero or non-finite direction");
    return ProjectiveDirection(v);
}

ProjectiveDirection mirror(const ProjectiveDirection& u) { return {-u.z, -u.y, -u.x}; }

std::string Branch::symbols(double y_entry) const {
    switch (id) {
        case 1: return "ab";
        case 3: return "cb";
        default: return y_entry > 0 ? "acb" : "cab";
    }
}

Mat3 branch_matrix(int i, double r) { return Mat3{kernel::branch_matrix<double>(i, r)}; }

Mat3 collision_matrix(char s, double r) { return Mat3{kernel::collision_matrix<double>(s, r)}; }

Mat3 J() { return Mat3::from_rows({0, 0, 1}, {0, 1, 0}, {1, 0, 0}); }

Branch classify(const ProjectiveDirection& u, const Restitution& r) {
    Vec3 c = u.vec();
    if (!kernel::canonicalize(c)) throw DomainError("zero or non-finite direction");
    const int b = kernel::classify(c, r.r);
    if (b == 0) throw DomainError("direction outside the domain (x*z > 0)");
    return {b};
}

Vec3 apply_formula(int branch, const Vec3& u, const Restitution& rr) {
    const double r = rr.r, a = rr.alpha();
    const double x = u[0], y = u[1], z = u[2];
    switch (branch) {
        case 1: return {r * (a * y - x), a * (a * y - x) - r * y + r * a * z, r * r * z};
        case 2: return {-r * (a * y - x), -a * (a * y - x) - a * (a * y - z) + r * y, -r * (a * y - z)};
        case 3: return {r * r * x, a * (a * y - z) - r * y + r * a * x, r * (a * y - z)};
        default: throw std::invalid_argument("branch id must be 1, 2 or 3");
    }
}

StepResult step(const ProjectiveDirection& u, const Restitution& r) {
    Vec3 v = u.canonical().vec();
    StepResult res;
    res.branch.id = kernel::step(v, r.r, res.raw_norm);
    if (res.branch.id == 0) throw DomainError("direction outside the domain (x*z > 0)");
    res.next = ProjectiveDirection(v);
    return res;
}

std::vector<StepResult> iterate(const ProjectiveDirection& u0, const Restitution& r, std::size_t n) {
    std::vector<StepResult> out;
    out.reserve(n);
    ProjectiveDirection u = u0.canonical();
    for (std::size_t k = 0; k < n; ++k) {
        out.push_back(step(u, r));
        u = out.back().next;
    }
    return out;
}

double theta(const ProjectiveDirection& u) {
    const ProjectiveDirection c = u.canonical();
    if (c.x == 0 && c.z == 0) throw DomainError("theta undefined for x = z = 0");
    return std::atan2(-c.z, c.x);
}

double phi(const ProjectiveDirection& u) {
    const ProjectiveDirection c = u.canonical();
    const double s = c.x * c.x + c.z * c.z;
    if (!(s > 0)) throw DomainError("phi undefined for x = z = 0");
    const Vec3 q{-c.x * c.y, s, -c.y * c.z};
    const double cp = std::clamp(-c.y * std::sqrt(s) / norm(q), -1.0, 1.0);
    return std::acos(cp);
}

std::pair<double, double> strip_coords(const ProjectiveDirection& u) {
    const ProjectiveDirection c = u.canonical();
    const double d = c.x - c.z;
    if (d == 0) throw DomainError("strip coordinates undefined for x = z");
    return {c.y / d, (c.x + c.z) / d};
}

ProjectiveDirection from_strip(double w1, double w2) {
    return ProjectiveDirection((1 + w2) / 2, w1, (w2 - 1) / 2).canonical();
}

}  // namespace bbmap
