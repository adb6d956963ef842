#include "bbmap/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "bbmap/spectral.hpp"

namespace bbmap {

Observable parse_observable(const std::string& s) {
    if (s == "theta") return Observable::theta;
    if (s == "phi") return Observable::phi;
    if (s == "strip") return Observable::strip;
    throw std::invalid_argument("observable must be theta, phi or strip");
}

std::string to_string(Observable o) {
    switch (o) {
        case Observable::theta: return "theta";
        case Observable::phi: return "phi";
        case Observable::strip: return "strip";
    }
    return "theta";
}

std::vector<ProjectiveDirection> default_grid() {
    std::vector<ProjectiveDirection> g;
    g.reserve(32);
    for (int gi = 1; gi <= 8; ++gi)
        for (int h = 1; h <= 4; ++h) g.emplace_back(1.0, -(1.0 + 8.0) / (2.0 + gi), -0.1 - h);
    return g;
}

std::vector<ProjectiveDirection> random_inits(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<ProjectiveDirection> out;
    out.reserve(n);
    while (out.size() < n) {
        const double x = nd(gen), y = nd(gen), z = nd(gen);
        if (x == 0 || z == 0) continue;
        out.push_back(ProjectiveDirection(std::abs(x), y, -std::abs(z)).canonical());
    }
    return out;
}

void ScanConfig::validate() const {
    if (!(0 < r_min && r_min < r_max && r_max < 1)) throw std::invalid_argument("need 0 < r_min < r_max < 1");
    if (n_r < 1) throw std::invalid_argument("n_r must be positive");
    if (init_grid.empty()) throw std::invalid_argument("empty initial grid");
    if (n_iter < 1 || tail < 1 || tail > n_iter) throw std::invalid_argument("need 1 <= tail <= n_iter");
}

double ScanConfig::r_at(int i) const {
    if (n_r == 1) return r_min;
    return r_min + (r_max - r_min) * i / (n_r - 1);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    const std::size_t t = std::max(1, threads);
    if (t == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    for (std::size_t k = 0; k < std::min(t, n); ++k) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) err = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

std::vector<BifurcationRecord> bifurcation_scan(const ScanConfig& cfg, int threads) {
    return bifurcation_scan_block(cfg, 0, cfg.n_r, threads);
}

std::vector<BifurcationRecord> bifurcation_scan_block(const ScanConfig& cfg, int r_begin, int r_end, int threads) {
    cfg.validate();
    if (r_begin < 0 || r_end > cfg.n_r || r_begin > r_end) throw std::invalid_argument("bad r index block");
    const std::size_t n_init = cfg.init_grid.size();
    const std::size_t tail = static_cast<std::size_t>(cfg.tail);
    const std::size_t n_jobs = static_cast<std::size_t>(r_end - r_begin) * n_init;
    std::vector<BifurcationRecord> out(n_jobs * tail);
    parallel_for(n_jobs, threads, [&](std::size_t job) {
        const int ri = r_begin + static_cast<int>(job / n_init);
        const int ii = static_cast<int>(job % n_init);
        const double r = cfg.r_at(ri);
        BifurcationRecord* rec = &out[job * tail];
        ProjectiveDirection u = cfg.init_grid[ii].canonical();
        const Restitution rr(r);
        const int first = cfg.n_iter - cfg.tail;
        bool dead = false;
        for (int k = 0; k < cfg.n_iter; ++k) {
            int branch = 0;
            if (!dead) {
                try {
                    const StepResult s = step(u, rr);
                    branch = s.branch.id;
                    if (k >= first) {
                        BifurcationRecord& b = rec[k - first];
                        b.theta = theta(u);
                        b.phi = phi(u);
                        const auto [w1, w2] = strip_coords(u);
                        b.w1 = w1;
                        b.w2 = w2;
                    }
                    u = s.next;
                } catch (const DomainError&) {
                    dead = true;
                }
            }
            if (k >= first) {
                BifurcationRecord& b = rec[k - first];
                b.r = r;
                b.r_index = ri;
                b.init_index = ii;
                b.iter_index = k;
                b.branch = branch;
                b.degenerate = dead;
                if (dead) b.theta = b.phi = b.w1 = b.w2 = std::nan("");
            }
        }
    });
    return out;
}

std::vector<int> orbit_branches(const ProjectiveDirection& u0, const Restitution& r, std::size_t n) {
    std::vector<int> b;
    b.reserve(n);
    ProjectiveDirection u = u0.canonical();
    try {
        for (std::size_t k = 0; k < n; ++k) {
            const StepResult s = step(u, r);
            b.push_back(s.branch.id);
            u = s.next;
        }
    } catch (const DomainError&) {
    }
    return b;
}

std::string least_rotation(const std::string& w) {
    std::string best = w;
    for (std::size_t k = 1; k < w.size(); ++k) {
        std::string rot = w.substr(k) + w.substr(0, k);
        if (rot < best) best = rot;
    }
    return best;
}

int symbol_length(const std::string& w) {
    int n = 0;
    for (char c : w) n += c == '2' ? 3 : 2;
    return n;
}

std::optional<PeriodResult> detect_period(const std::vector<int>& branches, int max_period) {
    if (max_period < 1) throw std::invalid_argument("max_period must be positive");
    const std::size_t window = 3 * static_cast<std::size_t>(max_period);
    if (branches.size() < window) return std::nullopt;
    const std::size_t start = branches.size() - window;
    for (int p = 1; p <= max_period; ++p) {
        bool ok = true;
        for (std::size_t i = start; i + p < branches.size() && ok; ++i) ok = branches[i] == branches[i + p];
        if (!ok) continue;
        std::string w;
        for (std::size_t i = branches.size() - p; i < branches.size(); ++i) w += static_cast<char>('0' + branches[i]);
        PeriodResult res;
        res.period = p;
        res.word = least_rotation(w);
        res.symbol_length = symbol_length(w);
        return res;
    }
    return std::nullopt;
}

int count_clusters(std::vector<double> values, double tol) {
    values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }), values.end());
    if (values.empty()) return 0;
    std::sort(values.begin(), values.end());
    int n = 1;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] - values[i - 1] > tol) ++n;
    return n;
}

double cos_beta(double r) { return -(1 - r) * (1 - r) / (4 * r); }

double thin_stripe_r(int l, int m) {
    if (m <= 0 || 4 * l < m || 4 * l > 3 * m) throw DomainError("thin_stripe_r needs 1/4 <= l/m <= 3/4");
    const double xi = std::cos(std::numbers::pi - 2 * std::numbers::pi * l / m);
    const double s = xi + xi * xi;
    if (s < 0) throw DomainError("thin_stripe_r: xi + xi^2 < 0");
    return 1 + 2 * xi - 2 * std::sqrt(s);
}

namespace {

bool near_boundary(const ProjectiveDirection& u, double r) {
    const double a = alpha_of(r);
    return std::abs(a * u.y - u.x) < 1e-12 || std::abs(a * u.y - u.z) < 1e-12;
}

Vec3 tangent_seed(const Vec3& u, std::string& name) {
    const std::array<std::pair<Vec3, const char*>, 3> refs = {
        {{{0, 1, 0}, "(0,1,0)"}, {{1, 0, 1}, "(1,0,1)"}, {{1, 0, 0}, "(1,0,0)"}}};
    for (const auto& [ref, label] : refs) {
        const Vec3 v = ref - scaled(u, dot(ref, u));
        if (norm(v) > 1e-6) {
            name = label;
            return normalized(v);
        }
    }
    throw DomainError("degenerate tangent seed");
}

}  // namespace

LyapunovEstimate lyapunov_max(const ProjectiveDirection& u0, const Restitution& r, std::size_t n) {
    if (n < 1) throw std::invalid_argument("n must be positive");
    LyapunovEstimate est;
    ProjectiveDirection u = u0.canonical();
    Vec3 v = tangent_seed(u.vec(), est.seed);
    double sum = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (near_boundary(u, r.r)) est.near_boundary = true;
        const StepResult s = step(u, r);
        const Mat3 P = branch_matrix(s.branch.id, r.r);
        const Vec3 un = s.next.vec();
        Vec3 w = scaled(P * v, 1.0 / s.raw_norm);
        w = w - scaled(un, dot(w, un));
        const double g = norm(w);
        if (!(g > 0)) throw DomainError("tangent vector collapsed");
        sum += std::log(g);
        v = scaled(w, 1.0 / g);
        u = s.next;
        est.n_steps = k + 1;
    }
    est.lambda_max = sum / static_cast<double>(n);
    return est;
}

RotationEstimate rotation_number(const ProjectiveDirection& u0, const Restitution& r, std::size_t n) {
    if (!(r.r > 3 - 2 * std::sqrt(2.0))) throw DomainError("rotation_number needs r > 3 - 2 sqrt 2");
    const EigenSystem es = eigen_P2(r.r);
    // basis v1, Re v2, Im v2 with v2 the eigenvector of r - alpha^2 + i alpha sqrt|alpha^2 - 2r|
    Mat3 basis;
    for (int i = 0; i < 3; ++i) {
        basis(i, 0) = es.vectors[0][i].real();
        basis(i, 1) = es.vectors[1][i].real();
        basis(i, 2) = es.vectors[1][i].imag();
    }
    const double d = det(basis);
    auto coords = [&](const Vec3& u) {
        // Cramer's rule
        Vec3 c;
        for (int j = 0; j < 3; ++j) {
            Mat3 m = basis;
            for (int i = 0; i < 3; ++i) m(i, j) = u[i];
            c[j] = det(m) / d;
        }
        return c;
    };
    auto angle = [&](const Vec3& u) {
        Vec3 c = coords(u);
        if (c[0] < 0) c = scaled(c, -1);
        return std::atan2(-c[2], c[1]);
    };
    RotationEstimate est;
    ProjectiveDirection u = u0.canonical();
    double prev = angle(u.vec());
    double winding = 0;
    const double two_pi = 2 * std::numbers::pi;
    for (std::size_t k = 0; k < n; ++k) {
        const StepResult s = step(u, r);
        if (s.branch.id != 2) {
            est.exit_step = k;
            break;
        }
        u = s.next;
        const double a = angle(u.vec());
        double inc = std::fmod(a - prev, two_pi);
        if (inc < 0) inc += two_pi;
        winding += inc;
        prev = a;
        est.window = k + 1;
    }
    if (est.window > 0) {
        double rho = winding / (two_pi * static_cast<double>(est.window));
        rho -= std::floor(rho);
        est.rho = rho;
    }
    return est;
}

CorrelationSeries correlations(const ProjectiveDirection& u0, const Restitution& r, const ObservableFn& phi_fn,
                               const ObservableFn& psi_fn, std::size_t N, const std::vector<int>& lags) {
    int max_lag = 0;
    for (int l : lags) {
        if (l < 0) throw std::invalid_argument("lags must be non-negative");
        max_lag = std::max(max_lag, l);
    }
    if (N <= static_cast<std::size_t>(max_lag)) throw std::invalid_argument("N must exceed the largest lag");
    const std::size_t len = N + static_cast<std::size_t>(max_lag);
    std::vector<double> a(len), b(len);
    ProjectiveDirection u = u0.canonical();
    for (std::size_t k = 0; k < len; ++k) {
        a[k] = phi_fn(u);
        b[k] = psi_fn(u);
        u = step(u, r).next;
    }
    double ma = 0, mb = 0;
    for (std::size_t k = 0; k < N; ++k) {
        ma += a[k];
        mb += b[k];
    }
    ma /= static_cast<double>(N);
    mb /= static_cast<double>(N);
    CorrelationSeries out;
    out.lags = lags;
    for (int l : lags) {
        double s = 0;
        for (std::size_t k = 0; k < N; ++k) s += a[k] * b[k + static_cast<std::size_t>(l)];
        out.values.push_back(s / static_cast<double>(N) - ma * mb);
    }
    return out;
}

Histogram2D empirical_histogram(const ProjectiveDirection& u0, const Restitution& r, std::size_t N, int bins_w1,
                                int bins_w2, std::size_t burn_in, double w1_min, double w1_max) {
    if (bins_w1 < 1 || bins_w2 < 1) throw std::invalid_argument("need at least one bin per axis");
    if (N < 1) throw std::invalid_argument("N must be positive");
    if (!(w1_min < w1_max)) throw std::invalid_argument("empty w1 range");
    Histogram2D h;
    h.bins_w1 = bins_w1;
    h.bins_w2 = bins_w2;
    h.w1_min = w1_min;
    h.w1_max = w1_max;
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins_w1) * bins_w2, 0);
    ProjectiveDirection u = u0.canonical();
    for (std::size_t k = 0; k < burn_in; ++k) u = step(u, r).next;
    auto bin = [](double v, double lo, double hi, int nb) {
        const int i = static_cast<int>(std::floor((v - lo) / (hi - lo) * nb));
        return std::clamp(i, 0, nb - 1);
    };
    for (std::size_t k = 0; k < N; ++k) {
        const auto [w1, w2] = strip_coords(u);
        const int i = bin(w1, h.w1_min, h.w1_max, bins_w1);
        const int j = bin(w2, h.w2_min, h.w2_max, bins_w2);
        ++counts[static_cast<std::size_t>(i) * bins_w2 + j];
        u = step(u, r).next;
    }
    h.mass.resize(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) h.mass[k] = static_cast<double>(counts[k]) / static_cast<double>(N);
    return h;
}

}  // namespace bbmap
