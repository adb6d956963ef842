#include "bbmap/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bbmap/analysis.hpp"
#include "bbmap/io.hpp"
#include "bbmap/map_core.hpp"
#include "bbmap/oracles.hpp"
#include "bbmap/spectral.hpp"
#include "bbmap/windows.hpp"

namespace bbmap::cli {

using io::num;

namespace {

std::string quote(const std::string& s) { return "\"" + s + "\""; }

// Shortest form that reads back to the same double.
std::string exact(double v) { return fmt::format("{}", v); }

std::string list(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + exact(v[i]);
    return s + "]";
}

std::string list(const std::vector<std::string>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + quote(v[i]);
    return s + "]";
}

std::string shell_word(const std::string& s) {
    if (!s.empty() && s.find_first_of(" \t\"'\\$`") == std::string::npos) return s;
    std::string q = "'";
    for (char ch : s) q += ch == '\'' ? std::string("'\\''") : std::string(1, ch);
    return q + "'";
}

std::vector<double> r_values(const RunConfig& c) {
    if (!c.r.empty()) return c.r;
    std::vector<double> v(static_cast<std::size_t>(std::max(c.n_r, 1)));
    for (int i = 0; i < c.n_r; ++i)
        v[static_cast<std::size_t>(i)] = c.n_r == 1 ? c.r_min : c.r_min + (c.r_max - c.r_min) * i / (c.n_r - 1);
    return v;
}

double single_r(const RunConfig& c) {
    if (c.r.size() > 1) throw std::invalid_argument(c.subcommand + " takes a single --r");
    return c.r.empty() ? 0.2 : c.r.front();
}

ProjectiveDirection explicit_init(const RunConfig& c) {
    if (c.init.size() != 3) throw std::invalid_argument("--init needs three numbers x,y,z");
    return ProjectiveDirection(c.init[0], c.init[1], c.init[2]).canonical();
}

std::vector<ProjectiveDirection> read_grid_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open grid file " + path);
    const io::CsvTable t = io::read_csv(in);
    const int ix = t.column("x"), iy = t.column("y"), iz = t.column("z");
    if (ix < 0 || iy < 0 || iz < 0) throw std::invalid_argument("grid file needs x,y,z columns");
    std::vector<ProjectiveDirection> g;
    for (const auto& row : t.rows)
        g.push_back(ProjectiveDirection(std::stod(row[ix]), std::stod(row[iy]), std::stod(row[iz])).canonical());
    if (g.empty()) throw std::invalid_argument("grid file has no rows");
    return g;
}

std::vector<ProjectiveDirection> inits_of(const RunConfig& c) {
    if (!c.init.empty()) return {explicit_init(c)};
    if (c.grid == "default") return default_grid();
    if (c.grid == "random") return random_inits(static_cast<std::size_t>(std::max(c.n_inits, 1)), c.seed);
    return read_grid_file(c.grid);
}

void write_svg(const RunConfig& c, const io::SvgPlot& plot, std::ostream& log) {
    const std::string path = resolve_output(c.svg);
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << plot.render();
    log << "svg: " << path << '\n';
}

std::string stability_name(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::undecided: return "undecided";
    }
    return "undecided";
}

int gcd_int(int a, int b) { return std::gcd(a, b); }

}  // namespace

std::vector<std::string> effective_config(const RunConfig& c) {
    std::vector<std::string> v;
    if (!c.r.empty()) v.push_back("r=" + list(c.r));
    v.push_back("r-min=" + exact(c.r_min));
    v.push_back("r-max=" + exact(c.r_max));
    v.push_back("nr=" + std::to_string(c.n_r));
    v.push_back("iters=" + std::to_string(c.iters));
    v.push_back("tail=" + std::to_string(c.tail));
    v.push_back("burn-in=" + std::to_string(c.burn_in));
    v.push_back("grid=" + quote(c.grid));
    v.push_back("n-inits=" + std::to_string(c.n_inits));
    if (!c.init.empty()) v.push_back("init=" + list(c.init));
    v.push_back("obs=" + quote(c.obs));
    v.push_back(std::string("log-theta=") + (c.log_theta ? "true" : "false"));
    if (!c.overlay.empty()) v.push_back("overlay=" + list(c.overlay));
    v.push_back("digits=" + std::to_string(c.digits));
    v.push_back("decimals=" + std::to_string(c.decimals));
    v.push_back("n-max=" + std::to_string(c.n_max));
    v.push_back("symbols=" + std::to_string(c.symbols));
    v.push_back("max-period=" + std::to_string(c.max_period));
    v.push_back("stripe-m=" + std::to_string(c.stripe_m));
    if (!c.word.empty()) v.push_back("word=" + quote(c.word));
    v.push_back(std::string("no-trig=") + (c.no_trig ? "true" : "false"));
    v.push_back("bins-w1=" + std::to_string(c.bins_w1));
    v.push_back("bins-w2=" + std::to_string(c.bins_w2));
    v.push_back("svg-max-points=" + std::to_string(c.svg_max_points));
    v.push_back("threads=" + std::to_string(c.threads));
    v.push_back("seed=" + std::to_string(c.seed));
    return v;
}

std::vector<std::string> header_comments(const RunConfig& c) {
    std::string inv = "invocation:";
    for (const auto& a : c.argv) inv += " " + shell_word(a);
    if (c.argv.empty()) inv += " bbmap " + c.subcommand;
    std::vector<std::string> h{inv, "subcommand=" + c.subcommand};
    for (auto& line : effective_config(c)) h.push_back(std::move(line));
    return h;
}

std::string resolve_output(const std::string& path) {
    if (path.empty()) return path;
    const char* dir = std::getenv("BBMAP_OUTDIR");
    if (dir == nullptr || *dir == '\0' || std::filesystem::path(path).is_absolute()) return path;
    return (std::filesystem::path(dir) / path).string();
}

int cmd_simulate(const RunConfig& c, std::ostream& csv, std::ostream& log) {
    if (c.iters < 1 || c.tail < 1 || c.tail > c.iters) throw std::invalid_argument("need 1 <= tail <= iters");
    const double rv = single_r(c);
    const Restitution r(rv);
    std::vector<ProjectiveDirection> inits;
    if (!c.init.empty())
        inits = {explicit_init(c)};
    else if (c.grid == "default" || c.grid == "random")
        inits = random_inits(static_cast<std::size_t>(std::max(c.n_inits, 1)), c.seed);
    else
        inits = read_grid_file(c.grid);

    io::CsvWriter w(csv, header_comments(c), {"init", "iter", "theta", "phi", "w1", "w2", "branch"});
    io::SvgSeries pts;
    std::vector<std::string> periods;
    const int first = c.iters - c.tail;
    for (std::size_t ii = 0; ii < inits.size(); ++ii) {
        ProjectiveDirection u = inits[ii];
        std::vector<int> branches;
        branches.reserve(static_cast<std::size_t>(c.iters));
        bool dead = false;
        for (int k = 0; k < c.iters; ++k) {
            int b = 0;
            double th = std::nan(""), ph = th, w1 = th, w2 = th;
            if (!dead) {
                try {
                    const StepResult s = step(u, r);
                    b = s.branch.id;
                    th = theta(u);
                    ph = phi(u);
                    std::tie(w1, w2) = strip_coords(u);
                    branches.push_back(b);
                    u = s.next;
                } catch (const DomainError&) {
                    dead = true;
                }
            }
            if (k < first) continue;
            w.row({std::to_string(ii), std::to_string(k), num(th), num(ph), num(w1), num(w2), std::to_string(b)});
            pts.x.push_back(w1);
            pts.y.push_back(w2);
        }
        const auto p = detect_period(branches, c.max_period);
        const std::string note = p ? fmt::format("init {} period {} word {} symbols {}", ii, p->period, p->word,
                                                 p->symbol_length)
                                   : fmt::format("init {} no period <= {}{}", ii, c.max_period,
                                                 dead ? " (degenerate state reached)" : "");
        periods.push_back(note);
        log << note << '\n';
    }
    for (const auto& p : periods) csv << "# " << p << '\n';

    if (!c.svg.empty()) {
        io::SvgPlot plot;
        plot.x_min = -2, plot.x_max = 2, plot.y_min = -1, plot.y_max = 1;
        plot.title = fmt::format("orbit tail, r = {}", num(rv));
        plot.x_label = "w1";
        plot.y_label = "w2";
        pts.radius = 1.2;
        plot.series.push_back(std::move(pts));
        write_svg(c, plot, log);
    }
    return 0;
}

int cmd_bifurcate(const RunConfig& c, std::ostream& csv, std::ostream& log) {
    ScanConfig sc;
    sc.r_min = c.r_min;
    sc.r_max = c.r_max;
    sc.n_r = c.n_r;
    sc.init_grid = inits_of(c);
    sc.n_iter = c.iters;
    sc.tail = c.tail;
    sc.observable = parse_observable(c.obs);
    sc.validate();

    io::CsvWriter w(csv, header_comments(c), {"r", "init", "iter", "theta", "phi", "w1", "w2", "branch"});
    const std::size_t per_r = sc.init_grid.size() * static_cast<std::size_t>(sc.tail);
    const std::size_t total = per_r * static_cast<std::size_t>(sc.n_r);
    const std::size_t stride =
        c.svg_max_points > 0 ? std::max<std::size_t>(1, (total + c.svg_max_points - 1) / c.svg_max_points) : 1;
    const int block = static_cast<int>(std::max<std::size_t>(1, 2000000 / std::max<std::size_t>(per_r, 1)));

    io::SvgSeries pts;
    std::size_t count = 0, degenerate = 0;
    for (int b0 = 0; b0 < sc.n_r; b0 += block) {
        const int b1 = std::min(sc.n_r, b0 + block);
        for (const auto& rec : bifurcation_scan_block(sc, b0, b1, c.threads)) {
            w.row({num(rec.r), std::to_string(rec.init_index), std::to_string(rec.iter_index), num(rec.theta),
                   num(rec.phi), num(rec.w1), num(rec.w2), std::to_string(rec.branch)});
            degenerate += rec.degenerate;
            if (!c.svg.empty() && count % stride == 0) {
                pts.x.push_back(rec.r);
                pts.y.push_back(sc.observable == Observable::theta ? rec.theta
                                : sc.observable == Observable::phi ? rec.phi
                                                                   : rec.w1);
            }
            ++count;
        }
    }
    log << "records: " << count << '\n';
    if (degenerate) log << "degenerate records: " << degenerate << '\n';

    if (!c.svg.empty()) {
        io::SvgPlot plot;
        plot.x_min = c.r_min, plot.x_max = c.r_max;
        plot.log_y = c.log_theta;
        plot.title = fmt::format("{} over r", c.obs);
        plot.x_label = "r";
        plot.y_label = c.log_theta ? "log " + c.obs : c.obs;
        plot.series.push_back(std::move(pts));
        plot.y_min = plot.y_max = 0;
        plot.autoscale();
        plot.x_min = c.r_min, plot.x_max = c.r_max;
        for (const auto& ov : c.overlay) {
            if (ov == "windows") {
                PrecisionBudget budget;
                if (c.digits > 0) budget.working_digits = c.digits;
                budget.target_decimals = c.decimals;
                for (const auto& win : window_table(c.n_max, budget, c.threads)) {
                    plot.vlines.push_back({std::stod(win.lower), "#1f4fd1"});
                    if (win.upper != "not defined") plot.vlines.push_back({std::stod(win.upper), "#d12f1f"});
                }
            } else if (ov == "stripes") {
                for (int m = 1; m <= c.stripe_m; ++m)
                    for (int l = 1; l < m; ++l) {
                        if (gcd_int(l, m) != 1 || 4 * l < m || 4 * l > 3 * m) continue;
                        try {
                            plot.vlines.push_back({thin_stripe_r(l, m), "#2e8b57"});
                        } catch (const DomainError&) {
                        }
                    }
            }
        }
        write_svg(c, plot, log);
    }
    return 0;
}

int cmd_windows(const RunConfig& c, std::ostream& csv, std::ostream& log) {
    if (c.n_max < 1) throw std::invalid_argument("n-max must be at least 1");
    PrecisionBudget budget;
    budget.working_digits = c.digits;
    budget.target_decimals = c.decimals;
    budget.validate();
    std::vector<StabilityWindow> table;
    try {
        table = window_table(c.n_max, budget, c.threads);
    } catch (const RootCountError& e) {
        log << "root isolation failed: " << e.what() << '\n';
        return 3;
    }
    auto comments = header_comments(c);
    comments.push_back(fmt::format("working_digits={} target_decimals={}", budget.working_digits,
                                   budget.target_decimals));
    io::CsvWriter w(csv, comments, {"n", "lower", "upper"});
    for (const auto& win : table) w.row({std::to_string(win.n), win.lower, win.upper});
    log << "windows: " << table.size() << '\n';
    return 0;
}

int cmd_spectrum(const RunConfig& c, std::ostream& csv, std::ostream&) {
    io::CsvWriter w(csv, header_comments(c),
                    {"r", "matrix", "index", "re", "im", "modulus", "dominant", "vx_re", "vx_im", "vy_re", "vy_im",
                     "vz_re", "vz_im", "discriminant"});
    for (double r : r_values(c)) {
        const std::pair<const char*, EigenSystem> systems[] = {
            {"P1", eigen_P1(r)}, {"P2", eigen_P2(r)}, {"P3", eigen_P3(r)}};
        for (const auto& [name, es] : systems) {
            const double disc = name[1] == '2' ? discriminant_P2(r) : discriminant_P1(r);
            for (int i = 0; i < 3; ++i) {
                const cplx l = es.values[static_cast<std::size_t>(i)];
                const CVec3& v = es.vectors[static_cast<std::size_t>(i)];
                w.row({num(r), name, std::to_string(i), num(l.real()), num(l.imag()), num(std::abs(l)),
                       es.dominant_index && *es.dominant_index == i ? "1" : "0", num(v[0].real()),
                       num(v[0].imag()), num(v[1].real()), num(v[1].imag()), num(v[2].real()), num(v[2].imag()),
                       num(disc)});
            }
        }
    }
    return 0;
}

int cmd_pattern(const RunConfig& c, std::ostream& csv, std::ostream& log) {
    if (c.word.empty()) throw std::invalid_argument("pattern needs --word");
    const PatternWord word = PatternWord::parse(expand_pattern(c.word));
    const std::vector<double> rs = r_values(c);
    std::vector<PeriodicOrbitCertificate> certs;
    certs.reserve(rs.size());
    for (double r : rs) certs.push_back(certify_pattern(word, r));

    std::vector<std::string> notes;
    std::size_t n_stable = 0, n_exists = 0, n_undecided = 0;
    for (const auto& ct : certs) {
        n_stable += ct.stability == Stability::stable;
        n_exists += ct.exists;
        n_undecided += ct.stability == Stability::undecided;
    }
    notes.push_back(fmt::format("word {} points {} exists {} stable {} undecided {}", word.letters, certs.size(),
                                n_exists, n_stable, n_undecided));
    if (c.r.empty()) {
        for (std::size_t i = 0; i + 1 < certs.size(); ++i) {
            if (certs[i].stable == certs[i + 1].stable) continue;
            if (certs[i].stability == Stability::undecided || certs[i + 1].stability == Stability::undecided) continue;
            const double b = stability_boundary(word, rs[i], rs[i + 1], 1e-15);
            notes.push_back(fmt::format("boundary {:.{}f} ({})", b, c.decimals, num(b)));
        }
    }

    io::CsvWriter w(csv, header_comments(c),
                    {"word", "r", "exists", "stability", "multiplier_re", "multiplier_im", "multiplier_abs", "dir_x",
                     "dir_y", "dir_z", "failed_step", "failed_inequality"});
    for (const auto& ct : certs) {
        const auto d = ct.direction;
        const auto& f = ct.failed_inequality;
        w.row({word.letters, num(ct.r), ct.exists ? "1" : "0", stability_name(ct.stability),
               num(ct.multiplier.real()), num(ct.multiplier.imag()), num(std::abs(ct.multiplier)),
               d ? num(d->x) : "nan", d ? num(d->y) : "nan", d ? num(d->z) : "nan",
               f ? std::to_string(f->step) : "0", f ? f->inequality : ""});
    }
    for (const auto& n : notes) {
        csv << "# " << n << '\n';
        log << n << '\n';
    }
    return 0;
}

int cmd_validate(const RunConfig& c, std::ostream& csv, std::ostream& log) {
    const std::vector<double> rs = c.r.empty() ? std::vector<double>{0.1, 0.2, 0.3} : c.r;
    if (c.symbols < 1) throw std::invalid_argument("symbols must be positive");
    const auto inits = c.init.empty() ? random_inits(static_cast<std::size_t>(std::max(c.n_inits, 1)), c.seed)
                                      : std::vector<ProjectiveDirection>{explicit_init(c)};
    std::vector<ValidationReport> reports;
    for (double r : rs)
        reports.push_back(triple_engine_validate(r, inits, static_cast<std::size_t>(c.symbols), !c.no_trig,
                                                 static_cast<unsigned>(c.digits)));

    io::CsvWriter w(csv, header_comments(c),
                    {"r", "digits", "inits", "symbols", "mismatches", "trig_excluded", "separated", "seconds_map",
                     "seconds_defn23", "seconds_particle", "seconds_trig"});
    bool ok = true;
    for (const auto& rep : reports) {
        w.row({num(rep.r), std::to_string(rep.digits), std::to_string(rep.n_inits), std::to_string(rep.n_symbols),
               std::to_string(rep.mismatches.size()), std::to_string(rep.trig_degenerate.size()),
               std::to_string(rep.separated.size()), num(rep.seconds_map), num(rep.seconds_defn23),
               num(rep.seconds_particle), num(rep.seconds_trig)});
        log << fmt::format("r={} mismatches={} time map={:.3f}s defn23={:.3f}s particle={:.3f}s trig={:.3f}s\n",
                           num(rep.r), rep.mismatches.size(), rep.seconds_map, rep.seconds_defn23,
                           rep.seconds_particle, rep.seconds_trig);
        if (!rep.trig_degenerate.empty())
            log << fmt::format("r={}: trig engine excluded on {} of {} inits (degeneracy flag)\n", num(rep.r),
                               rep.trig_degenerate.size(), rep.n_inits);
        ok = ok && rep.all_agree();
    }
    if (!ok) {
        log << "first divergences\nr,init,position,engine\n";
        for (const auto& rep : reports)
            for (const auto& m : rep.mismatches)
                log << fmt::format("{},{},{},{}\n", num(rep.r), m.init_index, m.first_bad_position, m.engine);
        return 1;
    }
    log << "all engines agree\n";
    return 0;
}

int cmd_lyapunov(const RunConfig& c, std::ostream& csv, std::ostream& log) {
    if (c.iters < 1) throw std::invalid_argument("iters must be positive");
    const std::vector<double> rs = r_values(c);
    const auto inits = inits_of(c);
    std::vector<std::optional<LyapunovEstimate>> est(rs.size() * inits.size());
    parallel_for(est.size(), c.threads, [&](std::size_t job) {
        try {
            est[job] = lyapunov_max(inits[job % inits.size()], rs[job / inits.size()],
                                    static_cast<std::size_t>(c.iters));
        } catch (const DomainError&) {
        }
    });
    io::CsvWriter w(csv, header_comments(c), {"r", "init", "n", "lambda_max"});
    std::size_t failed = 0;
    for (std::size_t job = 0; job < est.size(); ++job) {
        const auto& e = est[job];
        failed += !e;
        w.row({num(rs[job / inits.size()]), std::to_string(job % inits.size()),
               std::to_string(e ? e->n_steps : 0), e ? num(e->lambda_max) : "nan"});
    }
    if (failed) log << "degenerate runs: " << failed << '\n';
    return 0;
}

int cmd_rotation(const RunConfig& c, std::ostream& csv, std::ostream& log) {
    if (c.iters < 1) throw std::invalid_argument("iters must be positive");
    const std::vector<double> rs = r_values(c);
    const ProjectiveDirection u0 = c.init.empty() ? ProjectiveDirection(1, 0.05, -1).canonical() : explicit_init(c);
    io::CsvWriter w(csv, header_comments(c), {"r", "rho", "window", "exit_step", "rho_linear"});
    for (double r : rs) {
        const double lin = r > 3 - 2 * std::sqrt(2.0) ? std::acos(cos_beta(r)) / (2 * M_PI) : std::nan("");
        try {
            const RotationEstimate e = rotation_number(u0, r, static_cast<std::size_t>(c.iters));
            w.row({num(r), num(e.rho), std::to_string(e.window),
                   e.exit_step ? std::to_string(*e.exit_step) : "-1", num(lin)});
        } catch (const DomainError& ex) {
            w.row({num(r), "nan", "0", "-1", num(lin)});
            log << "r=" << num(r) << ": " << ex.what() << '\n';
        }
    }
    return 0;
}

int cmd_histogram(const RunConfig& c, std::ostream& csv, std::ostream&) {
    const double rv = single_r(c);
    const ProjectiveDirection u0 = c.init.empty() ? random_inits(1, c.seed).front() : explicit_init(c);
    const Histogram2D h = empirical_histogram(u0, rv, static_cast<std::size_t>(c.iters), c.bins_w1, c.bins_w2,
                                              static_cast<std::size_t>(std::max(c.burn_in, 0)));
    auto comments = header_comments(c);
    comments.push_back(fmt::format("w1 range [{}, {}], w2 range [{}, {}]", num(h.w1_min), num(h.w1_max),
                                   num(h.w2_min), num(h.w2_max)));
    io::CsvWriter w(csv, comments, {"w1_bin", "w2_bin", "mass"});
    for (int i = 0; i < h.bins_w1; ++i)
        for (int j = 0; j < h.bins_w2; ++j) w.row({std::to_string(i), std::to_string(j), num(h.at(i, j))});
    return 0;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig c;
    const unsigned hw = std::thread::hardware_concurrency();
    c.threads = hw == 0 ? 1 : static_cast<int>(hw);

    CLI::App app{"Collision map of four inelastic balls: simulation, windows, spectra and certificates", "bbmap"};
    app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");
    app.require_subcommand(1, 1);
    app.add_option("--r", c.r, "Restitution coefficient(s)")->delimiter(',');
    app.add_option("--r-min", c.r_min, "Lower end of the r range");
    app.add_option("--r-max", c.r_max, "Upper end of the r range");
    app.add_option("--nr", c.n_r, "Number of r values in the range")->check(CLI::PositiveNumber);
    app.add_option("--iters", c.iters, "Map iterations")->check(CLI::PositiveNumber);
    app.add_option("--tail", c.tail, "Iterations kept at the end of each orbit")->check(CLI::PositiveNumber);
    app.add_option("--burn-in", c.burn_in, "Iterations dropped before histogramming")->check(CLI::NonNegativeNumber);
    app.add_option("--grid", c.grid, "Initial data: default, random, or a CSV file with x,y,z columns");
    app.add_option("--n-inits", c.n_inits, "Number of random initial directions")->check(CLI::PositiveNumber);
    app.add_option("--init", c.init, "Initial direction x,y,z")->delimiter(',')->expected(3);
    app.add_option("--obs", c.obs, "Observable")->check(CLI::IsMember({"theta", "phi", "strip"}));
    app.add_flag("--log-theta", c.log_theta, "Logarithmic vertical axis in the SVG");
    app.add_option("--overlay", c.overlay, "SVG overlays")
        ->delimiter(',')
        ->check(CLI::IsMember({"windows", "stripes"}));
    app.add_option("--digits", c.digits, "Working precision in decimal digits (0: subcommand default)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--decimals", c.decimals, "Decimals reported for window bounds and boundaries")
        ->check(CLI::PositiveNumber);
    app.add_option("--n-max", c.n_max, "Largest window index")->check(CLI::PositiveNumber);
    app.add_option("--symbols", c.symbols, "Symbols compared per orbit in validate")->check(CLI::PositiveNumber);
    app.add_option("--max-period", c.max_period, "Longest period searched")->check(CLI::PositiveNumber);
    app.add_option("--stripe-m", c.stripe_m, "Largest denominator of the thin-stripe overlay")
        ->check(CLI::PositiveNumber);
    app.add_option("--word", c.word, "Collision pattern over {1,2,3}, exponents as 2^{67}");
    app.add_flag("--no-trig", c.no_trig, "Skip the arccos engine in validate");
    app.add_option("--bins-w1", c.bins_w1, "Histogram bins along w1")->check(CLI::PositiveNumber);
    app.add_option("--bins-w2", c.bins_w2, "Histogram bins along w2")->check(CLI::PositiveNumber);
    app.add_option("--svg-max-points", c.svg_max_points, "Decimate SVG scatter to at most this many points")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--out", c.out, "CSV output path (default stdout)");
    app.add_option("--svg", c.svg, "SVG output path");
    app.add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", c.seed, "Seed for random initial data");

    const std::map<std::string, std::string> subs = {
        {"simulate", "Single orbits: tail in strip coordinates and detected period"},
        {"bifurcate", "Bifurcation scan over an r range"},
        {"windows", "Stability window bounds"},
        {"spectrum", "Eigen-systems of P1, P2, P3 over an r grid"},
        {"pattern", "Periodic-orbit certificates and stability boundaries"},
        {"validate", "Cross-check of the map against the independent engines"},
        {"lyapunov", "Largest Lyapunov exponent"},
        {"rotation", "Rotation number on the complex-regime branch 2"},
        {"histogram", "Empirical density in strip coordinates"},
    };
    for (const auto& [name, desc] : subs) app.add_subcommand(name, desc)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }
    c.subcommand = app.get_subcommands().front()->get_name();
    c.argv.assign(argv, argv + argc);
    if (c.digits == 0) c.digits = c.subcommand == "validate" ? 100 : c.subcommand == "windows" ? 64 : 0;

    try {
        std::ofstream file;
        std::ostream* csv = &out;
        if (!c.out.empty()) {
            const std::string path = resolve_output(c.out);
            const auto parent = std::filesystem::path(path).parent_path();
            if (!parent.empty()) std::filesystem::create_directories(parent);
            file.open(path);
            if (!file) throw std::runtime_error("cannot write " + path);
            csv = &file;
        }
        const std::string& s = c.subcommand;
        if (s == "simulate") return cmd_simulate(c, *csv, err);
        if (s == "bifurcate") return cmd_bifurcate(c, *csv, err);
        if (s == "windows") return cmd_windows(c, *csv, err);
        if (s == "spectrum") return cmd_spectrum(c, *csv, err);
        if (s == "pattern") return cmd_pattern(c, *csv, err);
        if (s == "validate") return cmd_validate(c, *csv, err);
        if (s == "lyapunov") return cmd_lyapunov(c, *csv, err);
        if (s == "rotation") return cmd_rotation(c, *csv, err);
        if (s == "histogram") return cmd_histogram(c, *csv, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace bbmap::cli
