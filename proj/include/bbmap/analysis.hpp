#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bbmap/map_core.hpp"

namespace bbmap {

enum class Observable { theta, phi, strip };

Observable parse_observable(const std::string& s);
std::string to_string(Observable o);

// X = (1, -(1+8)/(2+g), -0.1-h), 1 <= g <= 8, 1 <= h <= 4, ordered by g then h.
std::vector<ProjectiveDirection> default_grid();

// Canonical directions from a Gaussian draw folded into x >= 0, z <= 0.
std::vector<ProjectiveDirection> random_inits(std::size_t n, std::uint64_t seed);

struct ScanConfig {
    double r_min = 0.1;
    double r_max = 0.2;
    int n_r = 100;
    std::vector<ProjectiveDirection> init_grid = default_grid();
    int n_iter = 5000;
    int tail = 100;
    Observable observable = Observable::theta;

    void validate() const;
    double r_at(int i) const;
};

struct BifurcationRecord {
    double r = 0;
    int r_index = 0;
    int init_index = 0;
    int iter_index = 0;  // the state after iter_index steps
    double theta = 0, phi = 0, w1 = 0, w2 = 0;
    int branch = 0;  // branch of the next step; 0 when degenerate
    bool degenerate = false;
};

// Ordered by (r index, init index, iter index) for any thread count.
std::vector<BifurcationRecord> bifurcation_scan(const ScanConfig& cfg, int threads = 1);
// Same records restricted to r indices in [r_begin, r_end).
std::vector<BifurcationRecord> bifurcation_scan_block(const ScanConfig& cfg, int r_begin, int r_end, int threads = 1);

// Branch ids of the first n steps from u0; stops early on a domain error.
std::vector<int> orbit_branches(const ProjectiveDirection& u0, const Restitution& r, std::size_t n);

struct PeriodResult {
    int period = 0;
    std::string word;       // least rotation over {1,2,3}
    int symbol_length = 0;  // in collision symbols: 1 and 3 count 2, 2 counts 3
};

std::string least_rotation(const std::string& w);
int symbol_length(const std::string& w);

// Smallest p <= max_period with the last 3*max_period letters p-periodic.
std::optional<PeriodResult> detect_period(const std::vector<int>& branches, int max_period);

// Number of groups after sorting, splitting at gaps larger than tol.
int count_clusters(std::vector<double> values, double tol);

// cos(beta) = -(1-r)^2/(4r), the rotation angle of P2 in its complex regime.
double cos_beta(double r);
// r(l/m) = 1 + 2 xi - 2 sqrt(xi + xi^2), xi = cos(pi - 2 pi l/m); needs 1/4 <= l/m <= 3/4.
double thin_stripe_r(int l, int m);

struct LyapunovEstimate {
    double lambda_max = 0;
    std::size_t n_steps = 0;
    std::string seed;           // reference vector used for the tangent seed
    bool near_boundary = false;  // some state came within 1e-12 of a branch boundary
};

LyapunovEstimate lyapunov_max(const ProjectiveDirection& u0, const Restitution& r, std::size_t n);

struct RotationEstimate {
    double rho = 0;  // in [0, 1)
    std::size_t window = 0;
    std::optional<std::size_t> exit_step;  // first step that left branch 2
};

RotationEstimate rotation_number(const ProjectiveDirection& u0, const Restitution& r, std::size_t n);

using ObservableFn = std::function<double(const ProjectiveDirection&)>;

struct CorrelationSeries {
    std::vector<int> lags;
    std::vector<double> values;
};

// C_N(n) = (1/N) sum_k phi_k psi_{k+n} - mean_N(phi) mean_N(psi)
CorrelationSeries correlations(const ProjectiveDirection& u0, const Restitution& r, const ObservableFn& phi,
                               const ObservableFn& psi, std::size_t N, const std::vector<int>& lags);

struct Histogram2D {
    int bins_w1 = 0, bins_w2 = 0;
    double w1_min = -2, w1_max = 2, w2_min = -1, w2_max = 1;
    std::vector<double> mass;  // row-major in w1

    double at(int i, int j) const { return mass[static_cast<std::size_t>(i) * bins_w2 + j]; }
};

// Points after burn_in steps; values outside the range land in the edge bins.
Histogram2D empirical_histogram(const ProjectiveDirection& u0, const Restitution& r, std::size_t N, int bins_w1,
                                int bins_w2, std::size_t burn_in = 1000, double w1_min = -2, double w1_max = 2);

// Calls fn(i) for i in [0, n) over the given number of worker threads.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace bbmap
