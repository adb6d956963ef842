#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace bbmap {

// Exact polynomial over Q; c[k] multiplies r^k.
class RationalPoly {
public:
    RationalPoly() = default;
    explicit RationalPoly(std::vector<mpq_class> coeffs);

    const std::vector<mpq_class>& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const mpq_class& operator[](std::size_t k) const { return c_[k]; }

    mpq_class operator()(const mpq_class& x) const;
    double eval(double x) const;
    std::string to_string() const;

    friend RationalPoly operator+(const RationalPoly& a, const RationalPoly& b);
    friend RationalPoly operator-(const RationalPoly& a, const RationalPoly& b);
    friend RationalPoly operator*(const RationalPoly& a, const RationalPoly& b);
    friend bool operator==(const RationalPoly& a, const RationalPoly& b) { return a.c_ == b.c_; }

private:
    void trim();
    std::vector<mpq_class> c_;
};

// Quotient and remainder; throws on a zero divisor.
std::pair<RationalPoly, RationalPoly> divmod(const RationalPoly& a, const RationalPoly& b);

struct PrecisionBudget {
    int working_digits = 64;
    int target_decimals = 12;

    void validate() const;
};

struct StabilityWindow {
    int n = 0;
    std::string lower;
    std::string upper;  // "not defined" for n = 1
};

class RootCountError : public std::runtime_error {
public:
    RootCountError(int n, int count, std::vector<std::pair<double, double>> brackets);
    int n;
    int count;
    std::vector<std::pair<double, double>> brackets;
};

// tr(J (BA)^n), degree 2n.
RationalPoly trace_poly(int n);
// r^{2n} P_n(r) P_n(1/r) - r^{2n}, degree 4n.
RationalPoly q_poly(int n);

std::string lower_bound(int n, const PrecisionBudget& budget = {});
std::string upper_bound(int n, const PrecisionBudget& budget = {});
std::vector<StabilityWindow> window_table(int n_max, const PrecisionBudget& budget = {}, int threads = 1);

// Number of distinct real roots of p in the open interval (lo, hi), by Descartes' rule with subdivision.
int count_roots(const RationalPoly& p, const mpq_class& lo, const mpq_class& hi);

// Decimal string of x with the given number of decimals, ties to even.
std::string round_decimal(const mpq_class& x, int decimals);

}  // namespace bbmap
