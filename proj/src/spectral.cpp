#include "bbmap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bbmap/detail/kernels.hpp"
#include "bbmap/spectral_exact.hpp"

namespace bbmap {

namespace {

double newton_real(const Cubic& p, double x) {
    for (int k = 0; k < 3; ++k) {
        const double f = ((x + p.c2) * x + p.c1) * x + p.c0;
        const double fp = (3 * x + 2 * p.c2) * x + p.c1;
        if (f == 0 || fp == 0) break;
        const double xn = x - f / fp;
        const double fn = ((xn + p.c2) * xn + p.c1) * xn + p.c0;
        if (!(std::abs(fn) < std::abs(f))) break;
        x = xn;
    }
    return x;
}

cplx newton_complex(const Cubic& p, cplx x) {
    for (int k = 0; k < 3; ++k) {
        const cplx f = p(x);
        const cplx fp = (3.0 * x + 2.0 * p.c2) * x + p.c1;
        if (std::abs(f) == 0 || std::abs(fp) == 0) break;
        const cplx xn = x - f / fp;
        if (!(std::abs(p(xn)) < std::abs(f))) break;
        x = xn;
    }
    return x;
}

// Roots of x^2 + b x + c without cancellation.
std::array<cplx, 2> quadratic(double b, double c) {
    const double disc = b * b - 4 * c;
    if (disc < 0) {
        const double re = -b / 2, im = std::sqrt(-disc) / 2;
        return {cplx(re, -im), cplx(re, im)};
    }
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (q == 0) return {cplx(0), cplx(0)};
    double x1 = q, x2 = c / q;
    if (x1 > x2) std::swap(x1, x2);
    return {cplx(x1), cplx(x2)};
}

cplx cdot(const CVec3& u, const CVec3& v) { return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]; }

double cnorm(const CVec3& v) {
    return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
}

CVec3 ccross(const CVec3& u, const CVec3& v) {
    return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

CVec3 null_vector(const Mat3& m, cplx lambda) {
    std::array<CVec3, 3> rows;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) rows[i][j] = m(i, j) - (i == j ? lambda : cplx(0));
    const std::array<CVec3, 3> cand = {ccross(rows[0], rows[1]), ccross(rows[0], rows[2]),
                                       ccross(rows[1], rows[2])};
    int best = 0;
    for (int k = 1; k < 3; ++k)
        if (cnorm(cand[k]) > cnorm(cand[best])) best = k;
    if (cnorm(cand[best]) > 0) return cand[best];
    // Rank at most one: any vector orthogonal to the nonzero row.
    for (const auto& row : rows) {
        if (cnorm(row) > 0) {
            const CVec3 e = std::abs(row[0]) < std::abs(row[1]) ? CVec3{1, 0, 0} : CVec3{0, 1, 0};
            return ccross(row, e);
        }
    }
    return {1, 0, 0};
}

Mat3 to_mat(const kernel::A9<double>& a) { return Mat3{a}; }

Vec3 real_part(const CVec3& v) { return {v[0].real(), v[1].real(), v[2].real()}; }

}  // namespace

std::array<cplx, 3> Cubic::roots() const {
    const double a = c2, b = c1, c = c0;
    const double p = b - a * a / 3;
    const double q = 2 * a * a * a / 27 - a * b / 3 + c;
    const double D = q * q / 4 + p * p * p / 27;
    if (D > 0) {
        const double u = std::cbrt(-q / 2 - std::copysign(std::sqrt(D), q));
        const double t = u - p / (3 * u);
        const double x1 = newton_real(*this, t - a / 3);
        const double B = a + x1;
        const double C = std::abs(x1) > 1e-3 ? -c / x1 : b + B * x1;
        auto pair = quadratic(B, C);
        if (pair[0].imag() != 0) {
            cplx z = newton_complex(*this, pair[1]);
            if (z.imag() <= 0) z = pair[1];
            return {cplx(x1), std::conj(z), z};
        }
        std::array<double, 3> r = {x1, newton_real(*this, pair[0].real()), newton_real(*this, pair[1].real())};
        std::sort(r.begin(), r.end());
        return {cplx(r[0]), cplx(r[1]), cplx(r[2])};
    }
    std::array<double, 3> r;
    if (p == 0) {
        r.fill(-a / 3);
    } else {
        const double m = 2 * std::sqrt(-p / 3);
        const double arg = std::clamp(3 * q / (p * m), -1.0, 1.0);
        const double th = std::acos(arg) / 3;
        const double two_pi_3 = 2 * std::acos(-1.0) / 3;
        for (int k = 0; k < 3; ++k) r[k] = newton_real(*this, m * std::cos(th - k * two_pi_3) - a / 3);
    }
    std::sort(r.begin(), r.end());
    return {cplx(r[0]), cplx(r[1]), cplx(r[2])};
}

Cubic char_poly(const Mat3& m) {
    const auto c = kernel::char_poly(m.a);
    return Cubic{c[0], c[1], c[2]};
}

std::array<mpq_class, 3> char_poly_exact(std::string_view letters, const mpq_class& r, bool reduced) {
    for (char ch : letters)
        if (ch < '1' || ch > '3') throw std::invalid_argument("pattern letters must be 1, 2 or 3");
    auto m = kernel::word_matrix<mpq_class>(std::string(letters), r);
    if (reduced) m = kernel::apply_J(m);
    return kernel::char_poly(m);
}

std::optional<int> dominant_of(const std::array<cplx, 3>& values) {
    std::array<int, 3> idx = {0, 1, 2};
    std::sort(idx.begin(), idx.end(),
              [&](int i, int j) { return std::abs(values[i]) > std::abs(values[j]); });
    const double top = std::abs(values[idx[0]]), second = std::abs(values[idx[1]]);
    if (top - second <= 1e-12 * top) return std::nullopt;
    return idx[0];
}

CVec3 scale_convention(const CVec3& v) {
    const double n = cnorm(v);
    if (n == 0) return v;
    CVec3 u = {v[0] / n, v[1] / n, v[2] / n};
    cplx s = std::abs(u[0]) > 1e-9 ? u[0] : std::abs(u[1]) > 1e-9 ? u[1] : u[2];
    return {u[0] / s, u[1] / s, u[2] / s};
}

EigenSystem eigen_numeric(const Mat3& m) {
    EigenSystem es;
    es.values = char_poly(m).roots();
    for (int k = 0; k < 3; ++k) es.vectors[k] = scale_convention(null_vector(m, es.values[k]));
    es.dominant_index = dominant_of(es.values);
    return es;
}

double discriminant_P1(double r) {
    const double a = alpha_of(r);
    return a * a / 4 * (r * r - 14 * r + 1);
}

double discriminant_P2(double r) {
    const double a = alpha_of(r);
    return a * a * (r * r - 6 * r + 1);
}

EigenSystem eigen_P1(double r) {
    const double a = alpha_of(r);
    const cplx s = std::sqrt(cplx(r * r - 14 * r + 1));
    const cplx sq = std::sqrt(cplx(a * a - 4 * r));
    EigenSystem es;
    es.values = {cplx(r * r), (r * r - 6 * r + 1 - (r + 1) * s) / 8.0, (r * r - 6 * r + 1 + (r + 1) * s) / 8.0};
    es.vectors = {CVec3{a, r + 1, 3 * a}, CVec3{2 * r, a - sq, 0}, CVec3{2 * r, a + sq, 0}};
    es.dominant_index = dominant_of(es.values);
    return es;
}

EigenSystem eigen_P2(double r) {
    const double a = alpha_of(r);
    const cplx sq = std::sqrt(cplx(a * a - 2 * r));
    EigenSystem es;
    es.values = {cplx(r), r - a * a + a * sq, r - a * a - a * sq};
    es.vectors = {CVec3{1, 0, -1}, CVec3{r, a - sq, r}, CVec3{r, a + sq, r}};
    es.dominant_index = dominant_of(es.values);
    return es;
}

EigenSystem eigen_P3(double r) {
    EigenSystem es = eigen_P1(r);
    for (auto& v : es.vectors) std::swap(v[0], v[2]);
    return es;
}

std::string mirror_word(std::string_view w) {
    std::string out(w);
    for (char& ch : out) {
        if (ch == '1') ch = '3';
        else if (ch == '3') ch = '1';
    }
    return out;
}

std::string expand_pattern(std::string_view s) {
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char ch = s[i];
        if (ch == '1' || ch == '2' || ch == '3') {
            out += ch;
            ++i;
        } else if (ch == '^') {
            if (out.empty()) throw std::invalid_argument("exponent without a letter");
            ++i;
            std::string digits;
            if (i < s.size() && s[i] == '{') {
                ++i;
                while (i < s.size() && s[i] != '}') digits += s[i++];
                if (i == s.size()) throw std::invalid_argument("unterminated exponent");
                ++i;
            } else if (i < s.size()) {
                digits = s[i++];
            }
            if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit))
                throw std::invalid_argument("bad exponent in pattern");
            const int k = std::stoi(digits);
            if (k < 1) throw std::invalid_argument("exponent must be positive");
            out.append(static_cast<std::size_t>(k - 1), out.back());
        } else if (ch == ' ' || ch == '\t') {
            ++i;
        } else {
            throw std::invalid_argument(std::string("bad pattern character '") + ch + "'");
        }
    }
    return out;
}

PatternWord PatternWord::parse(std::string_view s) {
    PatternWord w;
    w.letters = expand_pattern(s);
    if (w.letters.empty()) throw std::invalid_argument("empty pattern");
    const std::size_t n = w.letters.size();
    if (n % 2 == 0) {
        const std::string h = w.letters.substr(0, n / 2);
        if (h + mirror_word(h) == w.letters) w.palindromic_half = h;
    }
    return w;
}

PatternWord PatternWord::from_half(const std::string& half) {
    if (half.empty()) throw std::invalid_argument("empty pattern");
    PatternWord w;
    w.letters = expand_pattern(half) + mirror_word(expand_pattern(half));
    w.palindromic_half = expand_pattern(half);
    return w;
}

Mat3 word_matrix(std::string_view letters, double r) {
    for (char ch : letters)
        if (ch < '1' || ch > '3') throw std::invalid_argument("pattern letters must be 1, 2 or 3");
    return to_mat(kernel::word_matrix<double>(std::string(letters), r));
}

Mat3 word_matrix(const PatternWord& w, double r) { return word_matrix(w.letters, r); }

Mat3 reduced_matrix(std::string_view half, double r) { return J() * word_matrix(half, r); }

std::optional<FeasibilityFailure> feasibility_check(std::string_view letters, const Vec3& u, double r) {
    if (!(u[0] > 0)) return FeasibilityFailure{1, "x > 0"};
    if (!(u[2] < 0)) return FeasibilityFailure{1, "z < 0"};
    const double a = alpha_of(r);
    Vec3 v = normalized(u);
    for (std::size_t k = 0; k < letters.size(); ++k) {
        const double g1 = a * v[1] - v[0];
        const double g3 = a * v[1] - v[2];
        switch (letters[k]) {
            case '1':
                if (!(g1 > 0)) return FeasibilityFailure{k + 1, "alpha*y - x > 0"};
                break;
            case '3':
                if (!(g3 < 0)) return FeasibilityFailure{k + 1, "alpha*y - z < 0"};
                break;
            case '2':
                if (!(g1 < 0)) return FeasibilityFailure{k + 1, "alpha*y - x < 0"};
                if (!(g3 > 0)) return FeasibilityFailure{k + 1, "alpha*y - z > 0"};
                break;
            default: throw std::invalid_argument("pattern letters must be 1, 2 or 3");
        }
        v = normalized(branch_matrix(letters[k] - '0', r) * v);
    }
    return std::nullopt;
}

std::optional<FeasibilityFailure> feasibility_check(const PatternWord& w, const ProjectiveDirection& u,
                                                    double r) {
    return feasibility_check(w.letters, u.vec(), r);
}

std::optional<FeasibilityFailure> feasibility_check_half(const PatternWord& w, const ProjectiveDirection& u,
                                                         double r) {
    return feasibility_check(w.palindromic_half ? *w.palindromic_half : w.letters, u.vec(), r);
}

PeriodicOrbitCertificate certify_pattern(const PatternWord& w, double r) {
    PeriodicOrbitCertificate cert;
    cert.word = w;
    cert.r = r;
    const bool pal = w.palindromic_half.has_value();
    const Mat3 m = pal ? reduced_matrix(*w.palindromic_half, r) : word_matrix(w, r);
    const EigenSystem es = eigen_numeric(m);

    std::vector<int> order;
    if (es.dominant_index) order.push_back(*es.dominant_index);
    for (int k = 0; k < 3; ++k)
        if (!es.dominant_index || k != *es.dominant_index) order.push_back(k);

    bool failure_recorded = false;
    for (int k : order) {
        if (es.values[k].imag() != 0) continue;
        const Vec3 v = real_part(es.vectors[k]);
        for (double sgn : {1.0, -1.0}) {
            const Vec3 u = scaled(v, sgn);
            const auto fail = feasibility_check(w.letters, u, r);
            if (!fail) {
                cert.exists = true;
                cert.direction = ProjectiveDirection(u).canonical();
                cert.multiplier = pal ? es.values[k] * es.values[k] : es.values[k];
                cert.failed_inequality.reset();
                if (!es.dominant_index) {
                    cert.stability = Stability::undecided;
                } else {
                    cert.stable = k == *es.dominant_index;
                    cert.stability = cert.stable ? Stability::stable : Stability::unstable;
                }
                return cert;
            }
            if (!failure_recorded && fail->inequality != "x > 0") {
                cert.failed_inequality = fail;
                failure_recorded = true;
            }
        }
    }
    return cert;
}

std::optional<Vec3> most_negative_eigenvector(const Mat3& m) {
    const EigenSystem es = eigen_numeric(m);
    int best = -1;
    for (int k = 0; k < 3; ++k)
        if (es.values[k].imag() == 0 && (best < 0 || es.values[k].real() < es.values[best].real())) best = k;
    if (best < 0) return std::nullopt;
    return real_part(es.vectors[best]);
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
    if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo > 0) == (fhi > 0)) throw BracketError("bisection bracket has no sign change");
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0) return mid;
        if ((fm > 0) == (flo > 0)) lo = mid, flo = fm;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double g_132(double r) {
    const auto u = most_negative_eigenvector(reduced_matrix("132", r));
    if (!u) throw std::runtime_error("no real eigenvalue");
    return alpha_of(r) * (*u)[1] - (*u)[0];
}

double critical_r_132(double tolerance) { return bisect_root(g_132, 0.19, 0.25, tolerance); }

double stability_boundary(const PatternWord& w, double lo, double hi, double tol) {
    auto f = [&](double r) { return certify_pattern(w, r).stable ? 1.0 : -1.0; };
    return bisect_root(f, lo, hi, tol);
}

PatternWord family_word(int family, int n) {
    if (n < 1) throw std::invalid_argument("family exponent must be positive");
    const std::string run(static_cast<std::size_t>(n), '2');
    switch (family) {
        case 1: {
            PatternWord w;
            w.letters = "13" + run;
            return w;
        }
        case 2: return PatternWord::from_half("13" + run);
        case 3: return PatternWord::from_half("13131" + run);
        default: throw std::invalid_argument("family must be 1, 2 or 3");
    }
}

}  // namespace bbmap
