#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bbmap/cli.hpp"
#include "bbmap/io.hpp"

using namespace bbmap;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "bbmap");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

io::CsvTable parse(const std::string& text) {
    std::istringstream in(text);
    return io::read_csv(in);
}

std::filesystem::path scratch_dir() {
    auto d = std::filesystem::temp_directory_path() / "bbmap_cli_test";
    std::filesystem::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("csv round trip keeps every bit") {
    std::ostringstream out;
    {
        io::CsvWriter w(out, {"first", "second"}, {"a", "b"});
        w.row({io::num(0.1), io::num(1.0 / 3)});
        w.row({io::num(-2.5e-300), io::num(std::nan(""))});
    }
    const auto t = parse(out.str());
    CHECK(t.comments == std::vector<std::string>{"first", "second"});
    CHECK(t.header == std::vector<std::string>{"a", "b"});
    REQUIRE(t.rows.size() == 2);
    CHECK(std::stod(t.rows[0][0]) == 0.1);
    CHECK(std::stod(t.rows[0][1]) == 1.0 / 3);
    CHECK(std::stod(t.rows[1][0]) == -2.5e-300);
    CHECK(t.rows[1][1] == "nan");
    std::istringstream bad("a,b\n1,2,3\n");
    CHECK_THROWS(io::read_csv(bad));
}

TEST_CASE("svg is self-contained") {
    io::SvgPlot p;
    p.series.push_back({{0, 1}, {0, 1}});
    p.vlines.push_back({0.5});
    const std::string s = p.render();
    CHECK(s.find("<svg") == 0);
    CHECK(s.find("href") == std::string::npos);
    CHECK(s.find("<circle") != std::string::npos);
    CHECK(s.find("<line x1=\"") != std::string::npos);
}

TEST_CASE("simulate writes the tail and detects the period") {
    const auto r = run({"simulate", "--r", "0.2", "--iters", "5000", "--tail", "2000", "--grid", "random", "--seed", "3"});
    REQUIRE(r.code == 0);
    const auto t = parse(r.out);
    CHECK(t.rows.size() == 2000);
    CHECK(t.header == std::vector<std::string>{"init", "iter", "theta", "phi", "w1", "w2", "branch"});
    CHECK(r.err.find("init 0") != std::string::npos);
}

TEST_CASE("simulate finds 132^67 312^67 at r = 0.1717") {
    const auto r = run({"simulate", "--r", "0.1717", "--iters", "100000", "--tail", "1", "--grid", "random",
                        "--n-inits", "3", "--max-period", "200"});
    REQUIRE(r.code == 0);
    std::string half = "13" + std::string(67, '2');
    const std::string full = half + "31" + std::string(67, '2');
    std::string canon = full;
    for (std::size_t k = 1; k < full.size(); ++k) canon = std::min(canon, full.substr(k) + full.substr(0, k));
    CHECK(r.err.find("period 138 word " + canon) != std::string::npos);
}

TEST_CASE("config echo reconstructs the run") {
    const auto dir = scratch_dir();
    const auto a = run({"simulate", "--r", "0.3", "--iters", "60", "--tail", "7", "--init", "1,0.2,-1"});
    REQUIRE(a.code == 0);
    const auto t = parse(a.out);
    REQUIRE(t.comments.size() > 2);
    CHECK(t.comments[0].rfind("invocation: bbmap simulate --r 0.3", 0) == 0);
    CHECK(t.comments[1] == "subcommand=simulate");
    const auto cfg = dir / "echo.cfg";
    {
        std::ofstream f(cfg);
        for (std::size_t i = 2; i < t.comments.size() && t.comments[i].find('=') != std::string::npos; ++i)
            f << t.comments[i] << '\n';
    }
    const auto b = run({"simulate", "--config", cfg.string()});
    REQUIRE(b.code == 0);
    CHECK(parse(b.out).rows == t.rows);
    const auto c = run({"simulate", "--config", cfg.string(), "--r", "0.31"});
    CHECK(c.out.find("# r=[0.31]") != std::string::npos);
}

TEST_CASE("output directory override") {
    const auto dir = scratch_dir() / "outdir";
    std::filesystem::remove_all(dir);
    ::setenv("BBMAP_OUTDIR", dir.string().c_str(), 1);
    const auto r = run({"spectrum", "--r", "0.1,0.5", "--out", "spectrum.csv"});
    ::unsetenv("BBMAP_OUTDIR");
    REQUIRE(r.code == 0);
    std::ifstream f(dir / "spectrum.csv");
    REQUIRE(f);
    const auto t = io::read_csv(f);
    CHECK(t.rows.size() == 18);
    CHECK(t.column("dominant") >= 0);
}

TEST_CASE("bifurcate record count and determinism") {
    const std::vector<std::string> args = {"bifurcate", "--r-min", "0.12", "--r-max", "0.2", "--nr", "4", "--iters",
                                           "300", "--tail", "10"};
    auto a1 = args, a3 = args;
    a1.insert(a1.end(), {"--threads", "1"});
    a3.insert(a3.end(), {"--threads", "3"});
    const auto one = run(a1), three = run(a3);
    REQUIRE(one.code == 0);
    const auto t1 = parse(one.out), t3 = parse(three.out);
    CHECK(t1.rows.size() == 4u * 32u * 10u);
    CHECK(t1.rows == t3.rows);
    CHECK(t1.header == std::vector<std::string>{"r", "init", "iter", "theta", "phi", "w1", "w2", "branch"});
}

TEST_CASE("bifurcate svg with overlays") {
    const auto svg = scratch_dir() / "bif.svg";
    const auto r = run({"bifurcate", "--r-min", "0.191", "--r-max", "0.195", "--nr", "3", "--iters", "200", "--tail",
                        "5", "--log-theta", "--overlay", "stripes", "--svg", svg.string()});
    REQUIRE(r.code == 0);
    std::ifstream f(svg);
    std::stringstream s;
    s << f.rdbuf();
    CHECK(s.str().find("#2e8b57") != std::string::npos);
}

TEST_CASE("windows subcommand") {
    const auto r = run({"windows", "--n-max", "10"});
    REQUIRE(r.code == 0);
    const auto t = parse(r.out);
    REQUIRE(t.rows.size() == 10);
    CHECK(t.rows[1] == std::vector<std::string>{"2", "0.127544097592", "0.171572875254"});
    CHECK(t.rows[0][2] == "not defined");
    CHECK(r.out.find("working_digits=64") != std::string::npos);
}

TEST_CASE("pattern subcommand") {
    const auto a = run({"pattern", "--word", "132312", "--r-min", "0.19", "--r-max", "0.25", "--nr", "13"});
    REQUIRE(a.code == 0);
    CHECK(a.out.find("# boundary 0.220069786146 ") != std::string::npos);
    const auto b = run({"pattern", "--word", "1133", "--r", "0.15"});
    const auto tb = parse(b.out);
    REQUIRE(tb.rows.size() == 1);
    CHECK(tb.rows[0][tb.column("stability")] == "stable");
    const auto c = run({"pattern", "--word", "2", "--r", "0.5"});
    CHECK(parse(c.out).rows[0][3] == "undecided");
    const auto d = run({"pattern", "--word", "13223122", "--r-min", "0.01", "--r-max", "0.99", "--nr", "99"});
    for (const auto& row : parse(d.out).rows) CHECK(row[3] != "stable");
}

TEST_CASE("validate subcommand") {
    const auto ok = run({"validate", "--r", "0.2", "--n-inits", "10", "--symbols", "100", "--digits", "30"});
    CHECK(ok.code == 0);
    const auto t = parse(ok.out);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][t.column("mismatches")] == "0");
    CHECK(t.column("seconds_particle") >= 0);
    const auto deg = run({"validate", "--r", "0.075", "--n-inits", "5", "--symbols", "60", "--digits", "30"});
    CHECK(deg.err.find("trig engine excluded") != std::string::npos);
}

TEST_CASE("lyapunov, rotation and histogram subcommands") {
    const auto l = run({"lyapunov", "--r", "0.16", "--iters", "2000", "--grid", "random", "--n-inits", "3"});
    REQUIRE(l.code == 0);
    const auto tl = parse(l.out);
    CHECK(tl.header == std::vector<std::string>{"r", "init", "n", "lambda_max"});
    CHECK(tl.rows.size() == 3);
    const auto ro = run({"rotation", "--r", "0.2", "--iters", "5000"});
    REQUIRE(ro.code == 0);
    CHECK(parse(ro.out).rows.size() == 1);
    const auto h = run({"histogram", "--r", "0.2", "--iters", "2000", "--bins-w1", "4", "--bins-w2", "3"});
    REQUIRE(h.code == 0);
    const auto th = parse(h.out);
    CHECK(th.header == std::vector<std::string>{"w1_bin", "w2_bin", "mass"});
    CHECK(th.rows.size() == 12);
}

TEST_CASE("config errors exit nonzero") {
    CHECK(run({"simulate", "--bogus"}).code != 0);
    CHECK(run({}).code != 0);
    CHECK(run({"bifurcate", "--r-min", "0.3", "--r-max", "0.2"}).code != 0);
    CHECK(run({"pattern"}).code != 0);
    CHECK(run({"simulate", "--obs", "psi"}).code != 0);
}
