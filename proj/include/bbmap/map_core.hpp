#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bbmap {

using Vec3 = std::array<double, 3>;

struct Mat3 {
    std::array<double, 9> a{};

    double operator()(int i, int j) const { return a[3 * i + j]; }
    double& operator()(int i, int j) { return a[3 * i + j]; }

    static Mat3 identity();
    static Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2);
};

Mat3 operator*(const Mat3& m, const Mat3& n);
Vec3 operator*(const Mat3& m, const Vec3& v);
Mat3 transpose(const Mat3& m);
double det(const Mat3& m);
double trace(const Mat3& m);
double max_abs_diff(const Mat3& m, const Mat3& n);

double dot(const Vec3& u, const Vec3& v);
Vec3 cross(const Vec3& u, const Vec3& v);
double norm(const Vec3& v);
Vec3 normalized(const Vec3& v);
Vec3 scaled(const Vec3& v, double s);
Vec3 operator+(const Vec3& u, const Vec3& v);
Vec3 operator-(const Vec3& u, const Vec3& v);

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct Restitution {
    double r;

    Restitution(double r);  // NOLINT: implicit on purpose
    double alpha() const { return (r + 1.0) / 2.0; }
};

// Normal vector u of the plane Span[p, q]; u and -u describe the same state.
struct ProjectiveDirection {
    double x = 0, y = 0, z = 0;

    ProjectiveDirection() = default;
    ProjectiveDirection(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}
    explicit ProjectiveDirection(const Vec3& v) : x(v[0]), y(v[1]), z(v[2]) {}

    Vec3 vec() const { return {x, y, z}; }
    bool is_canonical_sign() const;
    // Sign rule x >= 0, then z <= 0, then y > 0; Euclidean norm 1.
    ProjectiveDirection canonical() const;
};

// J-mirror u -> (-z, -y, -x); swaps branches 1 and 3.
ProjectiveDirection mirror(const ProjectiveDirection& u);

// 1 = ab, 2 = acb or cab, 3 = cb.
struct Branch {
    int id = 2;
    // Collision symbols, resolved by the sign of y on entry.
    std::string symbols(double y_entry) const;
};

struct StepResult {
    ProjectiveDirection next;
    Branch branch;
    double raw_norm = 0;
};

inline double alpha_of(double r) { return (r + 1.0) / 2.0; }

// Matrix builders accept any real r; only the map itself requires 0 < r < 1.
Mat3 branch_matrix(int i, double r);
Mat3 collision_matrix(char s, double r);
Mat3 J();

Branch classify(const ProjectiveDirection& u, const Restitution& r);
// The vector formula of the piecewise map, without matrices.
Vec3 apply_formula(int branch, const Vec3& u, const Restitution& r);
StepResult step(const ProjectiveDirection& u, const Restitution& r);
std::vector<StepResult> iterate(const ProjectiveDirection& u0, const Restitution& r, std::size_t n);

double theta(const ProjectiveDirection& u);
double phi(const ProjectiveDirection& u);
std::pair<double, double> strip_coords(const ProjectiveDirection& u);

// Inverse chart: the canonical direction with strip coordinates (w1, w2).
ProjectiveDirection from_strip(double w1, double w2);

}  // namespace bbmap
