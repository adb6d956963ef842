#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "bbmap/map_core.hpp"

namespace bbmap {

using cplx = std::complex<double>;
using CVec3 = std::array<cplx, 3>;

struct EigenSystem {
    std::array<cplx, 3> values{};
    std::array<CVec3, 3> vectors{};
    std::optional<int> dominant_index;
};

// lambda^3 + c2 lambda^2 + c1 lambda + c0
struct Cubic {
    double c2 = 0, c1 = 0, c0 = 0;

    cplx operator()(cplx x) const { return ((x + c2) * x + c1) * x + c0; }
    // Real roots first in ascending order, then the conjugate pair (negative imaginary part first).
    std::array<cplx, 3> roots() const;
};

Cubic char_poly(const Mat3& m);

// Index of the strictly dominant modulus; empty on a relative tie below 1e-12.
std::optional<int> dominant_of(const std::array<cplx, 3>& values);

EigenSystem eigen_numeric(const Mat3& m);
EigenSystem eigen_P1(double r);
EigenSystem eigen_P2(double r);
EigenSystem eigen_P3(double r);

// (alpha^2/4)(r^2 - 14r + 1) and alpha^2 (r^2 - 6r + 1).
double discriminant_P1(double r);
double discriminant_P2(double r);

// 1 <-> 3, 2 fixed.
std::string mirror_word(std::string_view w);
// Expands exponents on single letters: "132^3312^3" -> "1322231222".
std::string expand_pattern(std::string_view s);

struct PatternWord {
    std::string letters;
    std::optional<std::string> palindromic_half;

    // Validates the alphabet and detects a palindromic half.
    static PatternWord parse(std::string_view s);
    static PatternWord from_half(const std::string& half);
};

Mat3 word_matrix(const PatternWord& w, double r);
Mat3 word_matrix(std::string_view letters, double r);
Mat3 reduced_matrix(std::string_view half, double r);

// x-component 1 when |x| > 1e-9, else y-component 1.
CVec3 scale_convention(const CVec3& v);

struct FeasibilityFailure {
    std::size_t step = 0;  // 1-based letter index
    std::string inequality;
};

std::optional<FeasibilityFailure> feasibility_check(const PatternWord& w, const ProjectiveDirection& u,
                                                    double r);
// Walks the palindromic half only.
std::optional<FeasibilityFailure> feasibility_check_half(const PatternWord& w, const ProjectiveDirection& u,
                                                         double r);
std::optional<FeasibilityFailure> feasibility_check(std::string_view letters, const Vec3& u, double r);

enum class Stability { stable, unstable, undecided };

struct PeriodicOrbitCertificate {
    PatternWord word;
    double r = 0;
    bool exists = false;
    bool stable = false;
    Stability stability = Stability::unstable;
    std::optional<ProjectiveDirection> direction;
    cplx multiplier{};
    std::optional<FeasibilityFailure> failed_inequality;
};

PeriodicOrbitCertificate certify_pattern(const PatternWord& w, double r);

// Eigenvector of the most negative real eigenvalue, scaled to x = 1 (y = 1 when x vanishes).
std::optional<Vec3> most_negative_eigenvector(const Mat3& m);

class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol);

// alpha*u_y - u_x for the reduced matrix of "132".
double g_132(double r);
double critical_r_132(double tolerance);

// Bisection on the stable flag of certify_pattern; the flag must differ at lo and hi.
double stability_boundary(const PatternWord& w, double lo, double hi, double tol);

PatternWord family_word(int family, int n);

}  // namespace bbmap
