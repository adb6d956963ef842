#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bbmap::cli {

struct RunConfig {
    std::string subcommand;
    std::vector<std::string> argv;  // the invocation, program name first

    std::vector<double> r;  // explicit r values; empty means use the range
    double r_min = 0.1, r_max = 0.2;
    int n_r = 100;
    int iters = 5000;
    int tail = 100;
    int burn_in = 1000;
    std::string grid = "default";  // default, random, or a CSV file with x,y,z columns
    int n_inits = 1;
    std::vector<double> init;  // explicit initial direction (x,y,z)
    std::string obs = "theta";
    bool log_theta = false;
    std::vector<std::string> overlay;
    int digits = 0;  // 0 picks the subcommand default
    int decimals = 12;
    int n_max = 100;
    int symbols = 200;
    int max_period = 200;
    int stripe_m = 120;
    std::string word;
    bool no_trig = false;
    int bins_w1 = 100, bins_w2 = 50;
    int svg_max_points = 200000;
    std::string out, svg;
    int threads = 1;
    std::uint64_t seed = 1;
};

// key=value lines that reproduce the config when fed back through --config.
std::vector<std::string> effective_config(const RunConfig& c);
// Comment block written at the top of every output file.
std::vector<std::string> header_comments(const RunConfig& c);

// Applies BBMAP_OUTDIR to relative paths.
std::string resolve_output(const std::string& path);

int cmd_simulate(const RunConfig& c, std::ostream& csv, std::ostream& log);
int cmd_bifurcate(const RunConfig& c, std::ostream& csv, std::ostream& log);
int cmd_windows(const RunConfig& c, std::ostream& csv, std::ostream& log);
int cmd_spectrum(const RunConfig& c, std::ostream& csv, std::ostream& log);
int cmd_pattern(const RunConfig& c, std::ostream& csv, std::ostream& log);
int cmd_validate(const RunConfig& c, std::ostream& csv, std::ostream& log);
int cmd_lyapunov(const RunConfig& c, std::ostream& csv, std::ostream& log);
int cmd_rotation(const RunConfig& c, std::ostream& csv, std::ostream& log);
int cmd_histogram(const RunConfig& c, std::ostream& csv, std::ostream& log);

// Parses, fills in subcommand defaults and dispatches. CSV goes to --out or to out.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bbmap::cli
