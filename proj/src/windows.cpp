#include "bbmap/windows.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include <mpfr.h>

namespace bbmap {

namespace {

using IntPoly = std::vector<mpz_class>;
using PolyMat = std::array<IntPoly, 9>;

void trim(IntPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

IntPoly mul(const IntPoly& a, const IntPoly& b) {
    if (a.empty() || b.empty()) return {};
    IntPoly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    }
    trim(c);
    return c;
}

void add_into(IntPoly& acc, const IntPoly& p) {
    if (acc.size() < p.size()) acc.resize(p.size(), 0);
    for (std::size_t i = 0; i < p.size(); ++i) acc[i] += p[i];
}

PolyMat mat_mul(const PolyMat& m, const PolyMat& n) {
    PolyMat p;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            IntPoly acc;
            for (int k = 0; k < 3; ++k) add_into(acc, mul(m[3 * i + k], n[3 * k + j]));
            trim(acc);
            p[3 * i + j] = acc;
        }
    return p;
}

// 4BA = (2B)(2A) with integer polynomial entries.
PolyMat four_BA() {
    const IntPoly zero{}, two{2}, rp1{1, 1}, m2r{0, -2};
    const PolyMat A2 = {m2r, zero, zero, rp1, two, zero, zero, zero, two};
    const PolyMat B2 = {two, rp1, zero, zero, m2r, zero, zero, rp1, two};
    return mat_mul(B2, A2);
}

PolyMat mat_pow(PolyMat base, int n) {
    PolyMat acc = {IntPoly{1}, {}, {}, {}, IntPoly{1}, {}, {}, {}, IntPoly{1}};
    while (n > 0) {
        if (n & 1) acc = mat_mul(acc, base);
        n >>= 1;
        if (n > 0) base = mat_mul(base, base);
    }
    return acc;
}

// tr(J M) = M20 + M11 + M02
IntPoly trace_J(const PolyMat& m) {
    IntPoly t;
    add_into(t, m[6]);
    add_into(t, m[4]);
    add_into(t, m[2]);
    trim(t);
    return t;
}

// 16^n Q_n = T rev(T) - 16^n r^{2n}, with T = 4^n P_n.
IntPoly q_numerator(const IntPoly& T, int n) {
    IntPoly t = T;
    t.resize(2 * n + 1, 0);
    IntPoly rev(t.rbegin(), t.rend());
    IntPoly q = mul(t, rev);
    q.resize(4 * n + 1, 0);
    mpz_class s;
    mpz_ui_pow_ui(s.get_mpz_t(), 16, n);
    q[2 * n] -= s;
    trim(q);
    return q;
}

RationalPoly to_rational(const IntPoly& p, const mpz_class& den) {
    std::vector<mpq_class> c;
    c.reserve(p.size());
    for (const auto& v : p) {
        mpq_class x(v, den);
        x.canonicalize();
        c.push_back(x);
    }
    return RationalPoly(c);
}

IntPoly to_integer(const RationalPoly& p) {
    mpz_class l = 1;
    for (const auto& v : p.coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
    IntPoly out;
    for (const auto& v : p.coeffs()) out.push_back(v.get_num() * (l / v.get_den()));
    return out;
}

// Sign of p(num/den) for den > 0, exactly.
int sign_at(const IntPoly& p, const mpz_class& num, const mpz_class& den) {
    if (p.empty()) return 0;
    mpz_class h = p.back(), pw = den;
    for (std::size_t i = p.size() - 1; i-- > 0;) {
        h = h * num + p[i] * pw;
        pw *= den;
    }
    return sgn(h);
}

int sign_at(const IntPoly& p, const mpq_class& x) { return sign_at(p, x.get_num(), x.get_den()); }

void taylor_shift1(IntPoly& p) {
    const std::size_t d = p.size();
    for (std::size_t i = 0; i + 1 < d; ++i)
        for (std::size_t j = d - 1; j-- > i;) p[j] += p[j + 1];
}

void taylor_shift(IntPoly& p, const mpz_class& c) {
    const std::size_t d = p.size();
    for (std::size_t i = 0; i + 1 < d; ++i)
        for (std::size_t j = d - 1; j-- > i;) p[j] += c * p[j + 1];
}

int variations(const IntPoly& p) {
    int v = 0, last = 0;
    for (const auto& c : p) {
        const int s = sgn(c);
        if (s == 0) continue;
        if (last != 0 && s != last) ++v;
        last = s;
    }
    return v;
}

// Descartes bound for roots of P in (0, 1).
int bound01(const IntPoly& P) {
    IntPoly q(P.rbegin(), P.rend());
    taylor_shift1(q);
    return variations(q);
}

// 2^d P(s/2)
IntPoly halve(const IntPoly& P) {
    IntPoly out = P;
    const std::size_t d = P.size() - 1;
    for (std::size_t i = 0; i <= d; ++i) mpz_mul_2exp(out[i].get_mpz_t(), out[i].get_mpz_t(), d - i);
    return out;
}

struct Isolation {
    std::vector<std::pair<mpq_class, mpq_class>> open;  // one root each
    std::vector<mpq_class> exact;
};

// P has its roots of interest in (0, 1); s maps to lo + (hi - lo) s.
void isolate01(IntPoly P, const mpq_class& lo, const mpq_class& hi, int depth, Isolation& out) {
    trim(P);
    if (P.size() <= 1) return;
    const int v = bound01(P);
    if (v == 0) return;
    if (v == 1) {
        out.open.emplace_back(lo, hi);
        return;
    }
    if (depth > 400) throw std::runtime_error("root isolation did not converge");
    const mpq_class mid = (lo + hi) / 2;
    IntPoly L = halve(P);
    mpz_class at_one = 0;
    for (const auto& c : L) at_one += c;
    if (at_one == 0) {
        out.exact.push_back(mid);
        // P = (2s - 1) q
        const std::size_t d = P.size() - 1;
        IntPoly q(d);
        q[d - 1] = P[d] / 2;
        for (std::size_t i = d - 1; i >= 1; --i) q[i - 1] = (P[i] + q[i]) / 2;
        P = q;
        L = halve(P);
    }
    IntPoly R = L;
    taylor_shift1(R);
    isolate01(L, lo, mid, depth + 1, out);
    isolate01(R, mid, hi, depth + 1, out);
}

Isolation isolate(const IntPoly& p, const mpq_class& lo, const mpq_class& hi) {
    // p(lo + w s) as an integer polynomial in s, up to a positive factor
    const mpq_class w = hi - lo;
    const mpz_class den = lo.get_den() * w.get_den();
    const mpz_class a = lo.get_num() * w.get_den();  // lo = a / den
    const mpz_class b = w.get_num() * lo.get_den();  // w = b / den
    const std::size_t d = p.size() - 1;
    IntPoly P(p.size());
    // p((a + b s)/den) den^d = sum p_i (a + b s)^i den^(d-i)
    mpz_class pw = 1;
    for (std::size_t i = d + 1; i-- > 0;) {
        P[i] = p[i] * pw;
        pw *= den;
    }
    // now P(y) with y = a + b s; shift by a then scale by b
    taylor_shift(P, a);
    mpz_class bp = 1;
    for (std::size_t i = 0; i <= d; ++i) {
        P[i] *= bp;
        bp *= b;
    }
    Isolation out;
    isolate01(P, lo, hi, 0, out);
    return out;
}

struct Mpfr {
    mpfr_t v;
    explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v, prec); }
    ~Mpfr() { mpfr_clear(v); }
    Mpfr(const Mpfr&) = delete;
    Mpfr& operator=(const Mpfr&) = delete;
};

mpfr_prec_t bits_for(int digits) { return static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623)) + 8; }

// (2 cos(pi/2n) - sqrt(4 cos^2(pi/2n) - 1))^2
void upper_value(mpfr_t out, int n) {
    const mpfr_prec_t p = mpfr_get_prec(out);
    Mpfr c(p), s(p);
    mpfr_const_pi(c.v, MPFR_RNDN);
    mpfr_div_ui(c.v, c.v, 2 * static_cast<unsigned long>(n), MPFR_RNDN);
    mpfr_cos(c.v, c.v, MPFR_RNDN);
    mpfr_sqr(s.v, c.v, MPFR_RNDN);
    mpfr_mul_ui(s.v, s.v, 4, MPFR_RNDN);
    mpfr_sub_ui(s.v, s.v, 1, MPFR_RNDN);
    mpfr_sqrt(s.v, s.v, MPFR_RNDN);
    mpfr_mul_ui(out, c.v, 2, MPFR_RNDN);
    mpfr_sub(out, out, s.v, MPFR_RNDN);
    mpfr_sqr(out, out, MPFR_RNDN);
}

// 7 - 4 sqrt 3
void accumulation_value(mpfr_t out) {
    mpfr_sqrt_ui(out, 3, MPFR_RNDN);
    mpfr_mul_ui(out, out, 4, MPFR_RNDN);
    mpfr_ui_sub(out, 7, out, MPFR_RNDN);
}

constexpr int kDyadicBits = 48;

// floor(x 2^k) + shift, as a dyadic rational
mpq_class dyadic(const mpfr_t x, long shift) {
    Mpfr y(mpfr_get_prec(x) + kDyadicBits);
    mpfr_mul_2ui(y.v, x, kDyadicBits, MPFR_RNDN);
    mpz_class z;
    mpfr_get_z(z.get_mpz_t(), y.v, MPFR_RNDD);
    z += shift;
    mpz_class den = 1;
    den <<= kDyadicBits;
    mpq_class q(z, den);
    q.canonicalize();
    return q;
}

std::string round_mpfr(const mpfr_t x, int decimals, bool& near_tie) {
    const mpfr_prec_t p = mpfr_get_prec(x);
    Mpfr y(p), t(p), frac(p);
    mpfr_ui_pow_ui(t.v, 10, static_cast<unsigned long>(decimals), MPFR_RNDN);
    mpfr_mul(y.v, x, t.v, MPFR_RNDN);
    mpfr_rint(t.v, y.v, MPFR_RNDN);
    mpfr_sub(frac.v, y.v, t.v, MPFR_RNDN);
    mpfr_abs(frac.v, frac.v, MPFR_RNDN);
    near_tie = mpfr_cmp_d(frac.v, 0.5 - 1e-6) > 0;
    mpz_class z;
    mpfr_get_z(z.get_mpz_t(), t.v, MPFR_RNDN);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(decimals));
    return round_decimal(mpq_class(z, den), decimals);
}

std::string lower_from_numerator(const IntPoly& q, int n, const PrecisionBudget& budget) {
    const mpfr_prec_t prec = bits_for(budget.working_digits);
    Mpfr lo_v(prec), hi_v(prec);
    accumulation_value(lo_v.v);
    const mpq_class lo = dyadic(lo_v.v, 1);
    mpq_class hi;
    if (n == 1) {
        mpz_class den = 1;
        den <<= kDyadicBits;
        hi = mpq_class(den - 1, den);
    } else {
        upper_value(hi_v.v, n);
        hi = dyadic(hi_v.v, -1);
    }
    const Isolation iso = isolate(q, lo, hi);
    const int count = static_cast<int>(iso.open.size() + iso.exact.size());
    if (count != 1) {
        std::vector<std::pair<double, double>> br;
        for (const auto& [a, b] : iso.open) br.emplace_back(a.get_d(), b.get_d());
        for (const auto& e : iso.exact) br.emplace_back(e.get_d(), e.get_d());
        throw RootCountError(n, count, br);
    }
    if (!iso.exact.empty()) return round_decimal(iso.exact.front(), budget.target_decimals);
    mpq_class a = iso.open.front().first, b = iso.open.front().second;
    const int sa = sign_at(q, a);
    mpz_class tenp;
    mpz_ui_pow_ui(tenp.get_mpz_t(), 10, static_cast<unsigned long>(budget.target_decimals + 2));
    const mpq_class width(1, tenp);
    for (int it = 0; it < 4000; ++it) {
        if (b - a < width) {
            const std::string ra = round_decimal(a, budget.target_decimals);
            if (ra == round_decimal(b, budget.target_decimals)) return ra;
        }
        const mpq_class m = (a + b) / 2;
        const int sm = sign_at(q, m);
        if (sm == 0) return round_decimal(m, budget.target_decimals);
        if (sm == sa) a = m;
        else b = m;
    }
    throw std::runtime_error("lower bound bisection did not settle the rounding");
}

}  // namespace

RationalPoly::RationalPoly(std::vector<mpq_class> coeffs) : c_(std::move(coeffs)) { trim(); }

void RationalPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

mpq_class RationalPoly::operator()(const mpq_class& x) const {
    mpq_class h = 0;
    for (std::size_t i = c_.size(); i-- > 0;) h = h * x + c_[i];
    return h;
}

double RationalPoly::eval(double x) const {
    double h = 0;
    for (std::size_t i = c_.size(); i-- > 0;) h = h * x + c_[i].get_d();
    return h;
}

std::string RationalPoly::to_string() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = c_.size(); i-- > 0;) {
        if (c_[i] == 0) continue;
        mpq_class v = c_[i];
        if (!first) os << (v < 0 ? " - " : " + ");
        else if (v < 0) os << "-";
        if (v < 0) v = -v;
        first = false;
        if (v != 1 || i == 0) os << v.get_str() << (i > 0 ? " " : "");
        if (i >= 1) os << "r";
        if (i >= 2) os << "^" << i;
    }
    return os.str();
}

RationalPoly operator+(const RationalPoly& a, const RationalPoly& b) {
    std::vector<mpq_class> c(std::max(a.c_.size(), b.c_.size()), 0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
    return RationalPoly(c);
}

RationalPoly operator-(const RationalPoly& a, const RationalPoly& b) {
    std::vector<mpq_class> c(std::max(a.c_.size(), b.c_.size()), 0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] -= b.c_[i];
    return RationalPoly(c);
}

RationalPoly operator*(const RationalPoly& a, const RationalPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<mpq_class> c(a.c_.size() + b.c_.size() - 1, 0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return RationalPoly(c);
}

std::pair<RationalPoly, RationalPoly> divmod(const RationalPoly& a, const RationalPoly& b) {
    if (b.is_zero()) throw std::invalid_argument("division by the zero polynomial");
    std::vector<mpq_class> rem = a.coeffs();
    const int db = b.degree();
    if (a.degree() < db) return {RationalPoly{}, a};
    std::vector<mpq_class> quo(a.degree() - db + 1, 0);
    for (int k = a.degree() - db; k >= 0; --k) {
        const mpq_class f = rem[k + db] / b[db];
        quo[k] = f;
        for (int j = 0; j <= db; ++j) rem[k + j] -= f * b[j];
    }
    return {RationalPoly(quo), RationalPoly(rem)};
}

void PrecisionBudget::validate() const {
    if (target_decimals < 1) throw std::invalid_argument("target decimals must be positive");
    if (working_digits < target_decimals + 10)
        throw std::invalid_argument("working digits must be at least target decimals + 10");
}

RootCountError::RootCountError(int n_, int count_, std::vector<std::pair<double, double>> brackets_)
    : std::runtime_error("window " + std::to_string(n_) + ": expected one root, found " + std::to_string(count_)),
      n(n_),
      count(count_),
      brackets(std::move(brackets_)) {}

RationalPoly trace_poly(int n) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 4, n);
    return to_rational(trace_J(mat_pow(four_BA(), n)), den);
}

RationalPoly q_poly(int n) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 16, n);
    return to_rational(q_numerator(trace_J(mat_pow(four_BA(), n)), n), den);
}

std::string lower_bound(int n, const PrecisionBudget& budget) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    budget.validate();
    return lower_from_numerator(q_numerator(trace_J(mat_pow(four_BA(), n)), n), n, budget);
}

std::string upper_bound(int n, const PrecisionBudget& budget) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    budget.validate();
    if (n == 1) return "not defined";
    for (int extra = 0; extra < 4; ++extra) {
        const mpfr_prec_t p = bits_for(budget.working_digits) * (1 << extra);
        Mpfr x(p), y(p + 64);
        upper_value(x.v, n);
        upper_value(y.v, n);
        bool tie_x = false, tie_y = false;
        const std::string sx = round_mpfr(x.v, budget.target_decimals, tie_x);
        const std::string sy = round_mpfr(y.v, budget.target_decimals, tie_y);
        if (sx == sy && !tie_x && !tie_y) return sx;
    }
    throw std::runtime_error("upper bound rounding is not decided at the available precision");
}

std::vector<StabilityWindow> window_table(int n_max, const PrecisionBudget& budget, int threads) {
    if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
    budget.validate();
    const PolyMat M = four_BA();
    std::vector<IntPoly> numerators;
    PolyMat power = M;
    for (int n = 1; n <= n_max; ++n) {
        if (n > 1) power = mat_mul(power, M);
        numerators.push_back(q_numerator(trace_J(power), n));
    }
    std::vector<StabilityWindow> out(n_max);
    auto work = [&](int first, int stride) {
        for (int n = first; n <= n_max; n += stride)
            out[n - 1] = StabilityWindow{n, lower_from_numerator(numerators[n - 1], n, budget),
                                         upper_bound(n, budget)};
    };
    threads = std::max(1, threads);
    std::vector<std::future<void>> jobs;
    for (int t = 1; t < threads; ++t) jobs.push_back(std::async(std::launch::async, work, 1 + t, threads));
    work(1, threads);
    for (auto& j : jobs) j.get();
    return out;
}

int count_roots(const RationalPoly& p, const mpq_class& lo, const mpq_class& hi) {
    if (!(lo < hi)) throw std::invalid_argument("empty interval");
    const IntPoly q = to_integer(p);
    if (q.size() <= 1) return 0;
    const Isolation iso = isolate(q, lo, hi);
    return static_cast<int>(iso.open.size() + iso.exact.size());
}

std::string round_decimal(const mpq_class& x, int decimals) {
    if (decimals < 0) throw std::invalid_argument("negative decimals");
    const bool neg = x < 0;
    mpq_class ax = neg ? mpq_class(-x) : x;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(decimals));
    const mpz_class num = ax.get_num() * scale;
    const mpz_class den = ax.get_den();
    mpz_class q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    const int c = cmp(2 * r, den);
    if (c > 0 || (c == 0 && mpz_odd_p(q.get_mpz_t()))) q += 1;
    std::string digits = q.get_str();
    if (static_cast<int>(digits.size()) <= decimals) digits.insert(0, decimals + 1 - digits.size(), '0');
    std::string out = digits.substr(0, digits.size() - decimals);
    if (decimals > 0) out += "." + digits.substr(digits.size() - decimals);
    if (neg && q != 0) out.insert(0, "-");
    return out;
}

}  // namespace bbmap
