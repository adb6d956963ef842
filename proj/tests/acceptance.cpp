// Acceptance suite. Run without arguments for all criteria, or pass criterion numbers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "bbmap/analysis.hpp"
#include "bbmap/cli.hpp"
#include "bbmap/oracles.hpp"
#include "bbmap/spectral.hpp"
#include "bbmap/spectral_exact.hpp"
#include "bbmap/windows.hpp"
#include "support.hpp"

using namespace bbmap;

namespace {

// Pinned tolerances and budgets.
constexpr double kEigenTol = 1e-11;
constexpr double kBracketTol = 1e-10;
constexpr double kStripeTol = 1e-12;
constexpr double kRotationTol = 1e-3;
constexpr double kQuasiLyapunov = 1e-2;
constexpr double kClusterTol = 1e-6;
constexpr unsigned kValidateDigits = 100;
constexpr std::uint64_t kValidateSeed = 20240601;
constexpr std::uint64_t kTableSeed = 12345;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string join(const std::vector<std::string>& v, std::size_t limit = 6) {
    std::string s;
    for (std::size_t i = 0; i < v.size() && i < limit; ++i) s += (i ? "; " : "") + v[i];
    if (v.size() > limit) s += fmt::format("; ... ({} total)", v.size());
    return s;
}

Outcome budget(Outcome o, double seconds, double limit) {
    if (seconds > limit) {
        o.pass = false;
        o.detail += fmt::format("; over the {:.0f} s budget", limit);
    }
    return o;
}

Outcome c1_polynomials() {
    const auto table = testdata::developed_table();
    std::vector<std::string> bad;
    for (int n = 1; n <= 10; ++n) {
        const auto it = table.find(n);
        if (it == table.end()) {
            bad.push_back(fmt::format("n={} missing", n));
            continue;
        }
        const auto& want = it->second;
        const auto got = q_poly(n).coeffs();
        if (got.size() != want.size()) {
            bad.push_back(fmt::format("n={} degree {} vs {}", n, got.size() - 1, want.size() - 1));
            continue;
        }
        for (std::size_t k = 0; k < got.size(); ++k)
            if (got[k] != want[k])
                bad.push_back(fmt::format("n={} r^{}: computed {} table {}", n, k, got[k].get_str(), want[k].get_str()));
    }
    return {bad.empty(), bad.empty() ? "all 10 developed rows equal" : "mismatch: " + join(bad)};
}

Outcome c2_lower() {
    const auto table = testdata::bounds_table();
    std::vector<std::string> bad;
    for (int n = 1; n <= 100; ++n) {
        const std::string got = lower_bound(n);
        if (got != table.at(n).lower) bad.push_back(fmt::format("n={} {} vs {}", n, got, table.at(n).lower));
    }
    return {bad.empty(), bad.empty() ? "100/100 lower bounds match" : join(bad)};
}

Outcome c3_upper() {
    const auto table = testdata::bounds_table();
    std::vector<std::string> bad;
    if (upper_bound(1) != "not defined") bad.push_back("n=1 should be not defined");
    for (int n = 2; n <= 100; ++n) {
        const std::string got = upper_bound(n);
        if (got != table.at(n).upper) bad.push_back(fmt::format("n={} computed {} table {}", n, got, table.at(n).upper));
    }
    return {bad.empty(), bad.empty() ? "99/99 upper bounds match, n=1 not defined" : join(bad)};
}

Outcome c4_pattern_132312() {
    std::ostringstream out, err;
    const int code = cli::run({"bbmap", "pattern", "--word", "132312", "--r-min", "0.19", "--r-max", "0.25", "--nr",
                               "61", "--threads", "1"},
                              out, err);
    std::vector<std::string> bad;
    if (code != 0) bad.push_back(fmt::format("pattern exit {}", code));
    const std::string text = out.str();
    if (text.find("# boundary 0.220069786146 ") == std::string::npos) bad.push_back("boundary line missing or wrong");
    const PatternWord w = PatternWord::parse("132312");
    for (double r : {0.23, 0.3, 0.5})
        if (!certify_pattern(w, r).stable) bad.push_back(fmt::format("not stable at {}", r));
    for (double r : {0.20, 0.21})
        if (certify_pattern(w, r).stable) bad.push_back(fmt::format("stable at {}", r));
    const double crit = critical_r_132(1e-14);
    if (fmt::format("{:.12f}", crit) != "0.220069786146") bad.push_back(fmt::format("critical_r_132 {:.15f}", crit));
    return {bad.empty(), bad.empty() ? fmt::format("boundary {:.12f}, stable at 0.23/0.3/0.5, not at 0.20/0.21", crit)
                                     : join(bad)};
}

Outcome c5_pattern_13223122() {
    const PatternWord w = PatternWord::parse("13223122");
    int stable = 0, points = 0, exists = 0;
    for (int k = 11; k <= 989; ++k) {
        const auto c = certify_pattern(w, k * 1e-3);
        stable += c.stable;
        exists += c.exists;
        ++points;
    }
    const double target = 3 - 2 * std::numbers::sqrt2;
    auto vec = [](double r) {
        const auto u = most_negative_eigenvector(reduced_matrix("1322", r));
        if (!u) throw std::runtime_error("no real negative eigenvalue");
        return *u;
    };
    const double rz = bisect_root([&](double r) { return vec(r)[2]; }, 0.17, 0.1725, 1e-14);
    const double rg = bisect_root([&](double r) { const auto u = vec(r); return alpha_of(r) * u[1] - u[0]; }, 0.17,
                                  0.1725, 1e-14);
    const bool ok = stable == 0 && std::abs(rz - target) < kBracketTol && std::abs(rg - target) < kBracketTol;
    return {ok, fmt::format("stable at {}/{} grid points (exists unstably at {}); u_z root {:.13f}, alpha*u_y-u_x "
                            "root {:.13f}, 3-2sqrt2 = {:.13f}",
                            stable, points, exists, rz, rg, target)};
}

Outcome c6_char_poly() {
    auto poly = [](const std::vector<long>& c, const mpq_class& r, long den) {
        mpq_class s = 0, p = 1;
        for (long k : c) {
            s += k * p;
            p *= r;
        }
        return mpq_class(s / den);
    };
    auto pw = [](const mpq_class& r, int e) {
        mpq_class p = 1;
        for (int i = 0; i < e; ++i) p *= r;
        return p;
    };
    // ascending coefficients
    const std::vector<long> a132 = {1, -8, 21, 0, -29, -24, 7};
    const std::vector<long> b132 = {0, 0, 0, 0, 0, 7, -24, -29, 0, 21, -8, 1};
    const std::vector<long> a1322 = {-1, 10, -30, 38, 24, -58, -18, 42, -7};
    const std::vector<long> b1322 = {0, 0, 0, 0, 0, 0, -7, 42, -18, -58, 24, 38, -30, 10, -1};
    std::vector<std::string> bad;
    for (const mpq_class r : {mpq_class(1, 7), mpq_class(1, 5), mpq_class(1, 3), mpq_class(1, 2), mpq_class(2, 3)}) {
        const auto c = char_poly_exact("132", r, true);
        if (c[0] != poly(a132, r, 32) || c[1] != poly(b132, r, 32) || c[2] != pw(r, 11))
            bad.push_back("132 at r=" + r.get_str());
        const auto d = char_poly_exact("1322", r, true);
        if (d[0] != poly(a1322, r, 64) || d[1] != poly(b1322, r, 64) || d[2] != pw(r, 14))
            bad.push_back("1322 at r=" + r.get_str());
    }
    return {bad.empty(), bad.empty() ? "both reduced matrices match at 5 rational r" : join(bad)};
}

Outcome c7_closed_forms() {
    double worst = 0;
    for (int k = 1; k <= 99; ++k) {
        const double r = k * 0.01;
        const std::pair<EigenSystem, Mat3> cases[] = {{eigen_P1(r), branch_matrix(1, r)},
                                                      {eigen_P2(r), branch_matrix(2, r)}};
        for (const auto& [es, m] : cases) {
            const auto roots = char_poly(m).roots();
            for (const cplx& l : es.values) {
                double best = INFINITY;
                for (const cplx& x : roots) best = std::min(best, std::abs(l - x));
                worst = std::max(worst, best);
            }
        }
    }
    const double s1 = 7 - 4 * std::sqrt(3.0), s2 = 3 - 2 * std::numbers::sqrt2;
    std::vector<double> switch1, switch2;
    for (int k = 1; k < 99; ++k) {
        const double a = k * 0.01, b = (k + 1) * 0.01;
        if ((discriminant_P1(a) > 0) != (discriminant_P1(b) > 0))
            switch1.push_back(bisect_root(discriminant_P1, a, b, 1e-15));
        if ((discriminant_P2(a) > 0) != (discriminant_P2(b) > 0))
            switch2.push_back(bisect_root(discriminant_P2, a, b, 1e-15));
    }
    auto complex_pair = [](const EigenSystem& es) {
        return std::count_if(es.values.begin(), es.values.end(), [](cplx v) { return v.imag() != 0; }) == 2;
    };
    const double eps = 1e-9;
    const bool regimes = !complex_pair(eigen_P1(s1 - eps)) && complex_pair(eigen_P1(s1 + eps)) &&
                         !complex_pair(eigen_P2(s2 - eps)) && complex_pair(eigen_P2(s2 + eps));
    const bool ok = worst < kEigenTol && switch1.size() == 1 && switch2.size() == 1 &&
                    std::abs(switch1[0] - s1) < 1e-14 && std::abs(switch2[0] - s2) < 1e-14 && regimes;
    return {ok, fmt::format("max closed-form deviation {:.2e}; P1 switch {} at {:.15f}; P2 switch {} at {:.15f}",
                            worst, switch1.size(), switch1.empty() ? NAN : switch1[0], switch2.size(),
                            switch2.empty() ? NAN : switch2[0])};
}

Outcome c8_engines() {
    const auto inits = random_inits(100, kValidateSeed);
    std::vector<std::string> notes, fp;
    bool ok = true;
    for (double r : {0.1, 0.15, 0.2, 0.3}) {
        const auto rep = triple_engine_validate(r, inits, 200, true, kValidateDigits);
        ok = ok && rep.all_agree();
        notes.push_back(fmt::format("r={} mismatches {} trig excluded {}", r, rep.mismatches.size(),
                                    rep.trig_degenerate.size()));
        const auto dbl = triple_engine_validate(r, inits, 200, true, 0);
        fp.push_back(fmt::format("r={}: {}", r, dbl.mismatches.size()));
    }
    return {ok, fmt::format("{} digits: {}; double precision mismatches (information only): {}", kValidateDigits,
                            join(notes), join(fp))};
}

Outcome c9_phenomenology() {
    ScanConfig cfg;
    cfg.r_min = 0.1275;
    cfg.r_max = 0.1716;
    cfg.n_r = 200;
    cfg.n_iter = 5000;
    cfg.tail = 100;
    const auto recs = bifurcation_scan(cfg, threads());
    const std::size_t n_init = cfg.init_grid.size();
    std::size_t total = 0, periodic = 0, clustered = 0, both = 0;
    for (std::size_t job = 0; job < cfg.n_r * n_init; ++job) {
        std::vector<int> br;
        std::vector<double> th;
        for (int k = 0; k < cfg.tail; ++k) {
            const auto& b = recs[job * cfg.tail + k];
            br.push_back(b.branch);
            th.push_back(b.theta);
        }
        const auto p = detect_period(br, cfg.tail / 3);
        const bool is1133 = p && p->word == "1133";
        const bool few = count_clusters(th, kClusterTol) <= 4;
        ++total;
        periodic += is1133;
        clustered += few;
        both += is1133 && few;
    }
    const double frac_a = static_cast<double>(both) / total;

    std::vector<double> rs(200);
    for (int i = 0; i < 200; ++i) rs[i] = 0.102 + (0.1275 - 0.102) * i / 199;
    const auto grid = default_grid();
    std::vector<char> none(rs.size() * grid.size());
    parallel_for(none.size(), threads(), [&](std::size_t job) {
        const auto br = orbit_branches(grid[job % grid.size()], rs[job / grid.size()], 5000);
        none[job] = !detect_period(br, 64);
    });
    const double frac_b = static_cast<double>(std::count(none.begin(), none.end(), 1)) / none.size();
    return {frac_a >= 0.95 && frac_b >= 0.90,
            fmt::format("window: 1133 {}/{} , <=4 theta clusters {}/{}, both {:.4f}; chaotic band: no period <= 64 "
                        "{:.4f}",
                        periodic, total, clustered, total, frac_a, frac_b)};
}

Outcome c10_table() {
    const std::map<double, std::vector<std::string>> want = {
        {0.16, {"1133"}}, {0.2, {"132^3312^3"}}, {0.3, {"132312"}}, {0.58, {"132312"}}};
    const auto inits = random_inits(10, kTableSeed);
    std::vector<std::string> notes;
    bool ok = true;
    for (const auto& [r, words] : want) {
        std::map<std::string, int> seen;
        for (const auto& u : inits) {
            const auto p = detect_period(orbit_branches(u, r, 20000), 64);
            ++seen[p ? p->word : "none"];
        }
        std::string found;
        for (const auto& [w, k] : seen) found += fmt::format(" {}x{}", w, k);
        for (const auto& w : words) {
            const std::string canon = least_rotation(expand_pattern(w));
            if (!seen.count(canon)) {
                ok = false;
                found += " (missing " + w + ")";
            }
        }
        notes.push_back(fmt::format("r={}:{}", r, found));
    }
    return {ok, join(notes)};
}

Outcome c11_stripes() {
    const double e1 = std::abs(thin_stripe_r(1, 2) - (3 - 2 * std::numbers::sqrt2));
    const double e2 = std::abs(thin_stripe_r(1, 3) - (2 - std::sqrt(3.0)));
    double worst = 0;
    int count = 0;
    for (int m = 1; m <= 120; ++m)
        for (int l = 1; l < m; ++l) {
            if (std::gcd(l, m) != 1 || 4 * l < m || 4 * l > 3 * m) continue;
            const double r = thin_stripe_r(l, m);
            worst = std::max(worst, std::abs(cos_beta(r) - std::cos(2 * std::numbers::pi * l / m)));
            ++count;
        }
    return {e1 < kStripeTol && e2 < kStripeTol && worst < kStripeTol,
            fmt::format("r(1/2) err {:.1e}, r(1/3) err {:.1e}, cos beta max err {:.1e} over {} fractions", e1, e2,
                        worst, count)};
}

Outcome c12_diagnostics() {
    const auto cert = certify_pattern(PatternWord::parse("132312"), 0.3);
    if (!cert.direction) return {false, "no certified 132312 orbit at 0.3"};
    const double l1 = lyapunov_max(*cert.direction, 0.3, 10000).lambda_max;
    const double l2 = lyapunov_max(ProjectiveDirection(1, 0.05, -1), 0.2, 100000).lambda_max;
    const double rho = rotation_number(ProjectiveDirection(1, 0.05, -1), 2 - std::sqrt(3.0), 100000).rho;
    const bool ok = l1 < 0 && std::abs(l2) < kQuasiLyapunov && std::abs(rho - 1.0 / 3) < kRotationTol;
    return {ok, fmt::format("lambda(132312, 0.3) = {:.4f}; lambda(quasi-periodic, 0.2) = {:.2e}; rho(2-sqrt3) = "
                            "{:.8f}",
                            l1, l2, rho)};
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> fn;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {1, "q_poly developed forms", 10, c1_polynomials},
        {2, "lower bounds n=1..100", 1800, c2_lower},
        {3, "upper bounds n=2..100", 60, c3_upper},
        {4, "132312 certificate and boundary", 60, c4_pattern_132312},
        {5, "13223122 never stable", 300, c5_pattern_13223122},
        {6, "characteristic polynomial anchors", 1, c6_char_poly},
        {7, "spectral closed forms", 1, c7_closed_forms},
        {8, "engine equivalence", 60, c8_engines},
        {9, "window phenomenology", 300, c9_phenomenology},
        {10, "periodic pattern spot checks", 120, c10_table},
        {11, "thin stripes", 1, c11_stripes},
        {12, "Lyapunov and rotation diagnostics", 60, c12_diagnostics},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));
    int failed = 0;
    for (const auto& c : all) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o = budget(o, s, c.limit_seconds);
        failed += !o.pass;
        std::printf("criterion %2d %s  %s (%.2f s): %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, s, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
