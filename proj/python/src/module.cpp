#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "bbmap/analysis.hpp"
#include "bbmap/cli.hpp"
#include "bbmap/oracles.hpp"
#include "bbmap/spectral.hpp"
#include "bbmap/spectral_exact.hpp"
#include "bbmap/windows.hpp"

namespace py = pybind11;
using namespace bbmap;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ProjectiveDirection to_dir(const Array& a) {
    if (a.ndim() != 1 || a.shape(0) != 3) throw py::value_error("expected a vector of length 3");
    const auto v = a.unchecked<1>();
    return {v(0), v(1), v(2)};
}

Array vec_array(const Vec3& v) {
    Array out(3);
    auto m = out.mutable_unchecked<1>();
    for (int i = 0; i < 3; ++i) m(i) = v[i];
    return out;
}

Array mat_array(const Mat3& M) {
    Array out({3, 3});
    auto m = out.mutable_unchecked<2>();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = M(i, j);
    return out;
}

Mat3 to_mat(const Array& a) {
    if (a.ndim() != 2 || a.shape(0) != 3 || a.shape(1) != 3) throw py::value_error("expected a 3x3 matrix");
    const auto v = a.unchecked<2>();
    Mat3 M;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M(i, j) = v(i, j);
    return M;
}

py::object fraction(const mpq_class& q) {
    static py::object Fraction = py::module_::import("fractions").attr("Fraction");
    return Fraction(q.get_str());
}

py::dict certificate_dict(const PeriodicOrbitCertificate& c) {
    py::dict d;
    d["word"] = c.word.letters;
    d["r"] = c.r;
    d["exists"] = c.exists;
    d["stable"] = c.stable;
    d["stability"] = c.stability == Stability::stable     ? "stable"
                     : c.stability == Stability::unstable ? "unstable"
                                                          : "undecided";
    d["multiplier"] = c.multiplier;
    d["direction"] = c.direction ? py::object(vec_array(c.direction->vec())) : py::none();
    if (c.failed_inequality) {
        d["failed_step"] = c.failed_inequality->step;
        d["failed_inequality"] = c.failed_inequality->inequality;
    } else {
        d["failed_step"] = py::none();
        d["failed_inequality"] = py::none();
    }
    return d;
}

std::vector<ProjectiveDirection> to_grid(const py::object& inits) {
    if (inits.is_none()) return default_grid();
    const Array a = inits.cast<Array>();
    if (a.ndim() != 2 || a.shape(1) != 3) throw py::value_error("inits must have shape (n, 3)");
    const auto v = a.unchecked<2>();
    std::vector<ProjectiveDirection> out;
    for (py::ssize_t i = 0; i < a.shape(0); ++i) out.emplace_back(v(i, 0), v(i, 1), v(i, 2));
    return out;
}

Array grid_array(const std::vector<ProjectiveDirection>& g) {
    Array out({static_cast<py::ssize_t>(g.size()), py::ssize_t{3}});
    auto m = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < g.size(); ++i) {
        m(i, 0) = g[i].x;
        m(i, 1) = g[i].y;
        m(i, 2) = g[i].z;
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_bbmap, m) {
    m.doc() = "Projective map of four inelastic balls on a line";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<BracketError>(m, "BracketError", PyExc_ValueError);

    m.def("canonical", [](const Array& u) { return vec_array(to_dir(u).canonical().vec()); }, py::arg("u"));
    m.def("classify", [](const Array& u, double r) { return classify(to_dir(u), r).id; }, py::arg("u"), py::arg("r"));
    m.def(
        "step",
        [](const Array& u, double r) {
            const StepResult s = step(to_dir(u), r);
            return py::make_tuple(vec_array(s.next.vec()), s.branch.id);
        },
        py::arg("u"), py::arg("r"), "One step of the map: (next canonical direction, branch).");
    m.def(
        "iterate",
        [](const Array& u, double r, std::size_t n) {
            const auto steps = iterate(to_dir(u), r, n);
            Array states({static_cast<py::ssize_t>(steps.size()), py::ssize_t{3}});
            py::array_t<int> branches(static_cast<py::ssize_t>(steps.size()));
            auto s = states.mutable_unchecked<2>();
            auto b = branches.mutable_unchecked<1>();
            for (std::size_t k = 0; k < steps.size(); ++k) {
                s(k, 0) = steps[k].next.x;
                s(k, 1) = steps[k].next.y;
                s(k, 2) = steps[k].next.z;
                b(k) = steps[k].branch.id;
            }
            return py::make_tuple(states, branches);
        },
        py::arg("u"), py::arg("r"), py::arg("n"));
    m.def("theta", [](const Array& u) { return theta(to_dir(u)); }, py::arg("u"));
    m.def("phi", [](const Array& u) { return phi(to_dir(u)); }, py::arg("u"));
    m.def("strip_coords", [](const Array& u) { return strip_coords(to_dir(u)); }, py::arg("u"));
    m.def("from_strip", [](double w1, double w2) { return vec_array(from_strip(w1, w2).vec()); }, py::arg("w1"),
          py::arg("w2"));
    m.def("mirror", [](const Array& u) { return vec_array(mirror(to_dir(u)).vec()); }, py::arg("u"));
    m.def("branch_matrix", [](int i, double r) { return mat_array(branch_matrix(i, r)); }, py::arg("i"), py::arg("r"));

    m.def("word_matrix", [](const std::string& w, double r) { return mat_array(word_matrix(PatternWord::parse(w), r)); },
          py::arg("word"), py::arg("r"));
    m.def("reduced_matrix", [](const std::string& half, double r) { return mat_array(reduced_matrix(half, r)); },
          py::arg("half"), py::arg("r"));
    m.def(
        "eigenvalues",
        [](const Array& M) {
            const auto e = eigen_numeric(to_mat(M));
            return std::vector<cplx>(e.values.begin(), e.values.end());
        },
        py::arg("matrix"));
    m.def(
        "char_poly_exact",
        [](const std::string& half, const std::string& r, bool reduced) {
            py::list out;
            for (const auto& c : char_poly_exact(half, mpq_class(r), reduced)) out.append(fraction(c));
            return out;
        },
        py::arg("word"), py::arg("r"), py::arg("reduced") = true,
        "Coefficients (c2, c1, c0) of the monic characteristic polynomial at a rational r given as \"p/q\".");
    m.def("expand_pattern", [](const std::string& s) { return expand_pattern(s); }, py::arg("pattern"));
    m.def("mirror_word", [](const std::string& s) { return mirror_word(s); }, py::arg("word"));
    m.def("certify_pattern", [](const std::string& w, double r) { return certificate_dict(certify_pattern(PatternWord::parse(w), r)); },
          py::arg("word"), py::arg("r"));
    m.def("stability_boundary",
          [](const std::string& w, double lo, double hi, double tol) {
              return stability_boundary(PatternWord::parse(w), lo, hi, tol);
          },
          py::arg("word"), py::arg("lo"), py::arg("hi"), py::arg("tol") = 1e-14);
    m.def("critical_r_132", &critical_r_132, py::arg("tol") = 1e-14);

    m.def(
        "q_poly",
        [](int n) {
            const RationalPoly q = q_poly(n);
            py::list out;
            for (const auto& c : q.coeffs()) out.append(fraction(c));
            return out;
        },
        py::arg("n"), "Ascending coefficients of the window polynomial as fractions.");
    m.def("lower_bound", [](int n, int digits) { return lower_bound(n, PrecisionBudget{digits, 12}); }, py::arg("n"),
          py::arg("digits") = 64);
    m.def("upper_bound", [](int n, int digits) { return upper_bound(n, PrecisionBudget{digits, 12}); }, py::arg("n"),
          py::arg("digits") = 64);
    m.def(
        "window_table",
        [](int n_max, int threads) {
            py::list out;
            for (const auto& w : window_table(n_max, {}, threads)) out.append(py::make_tuple(w.n, w.lower, w.upper));
            return out;
        },
        py::arg("n_max"), py::arg("threads") = 1);

    m.def("default_grid", [] { return grid_array(default_grid()); });
    m.def("random_inits", [](std::size_t n, std::uint64_t seed) { return grid_array(random_inits(n, seed)); },
          py::arg("n"), py::arg("seed"));
    m.def(
        "bifurcation_scan",
        [](double r_min, double r_max, int n_r, int n_iter, int tail, const py::object& inits, int threads) {
            ScanConfig c;
            c.r_min = r_min;
            c.r_max = r_max;
            c.n_r = n_r;
            c.n_iter = n_iter;
            c.tail = tail;
            c.init_grid = to_grid(inits);
            std::vector<BifurcationRecord> recs;
            {
                py::gil_scoped_release release;
                recs = bifurcation_scan(c, threads);
            }
            const auto n = static_cast<py::ssize_t>(recs.size());
            Array r(n), th(n), ph(n), w1(n), w2(n);
            py::array_t<int> init(n), iter(n), branch(n);
            for (py::ssize_t k = 0; k < n; ++k) {
                const auto& x = recs[k];
                r.mutable_at(k) = x.r;
                th.mutable_at(k) = x.theta;
                ph.mutable_at(k) = x.phi;
                w1.mutable_at(k) = x.w1;
                w2.mutable_at(k) = x.w2;
                init.mutable_at(k) = x.init_index;
                iter.mutable_at(k) = x.iter_index;
                branch.mutable_at(k) = x.branch;
            }
            py::dict d;
            d["r"] = r;
            d["init"] = init;
            d["iter"] = iter;
            d["theta"] = th;
            d["phi"] = ph;
            d["w1"] = w1;
            d["w2"] = w2;
            d["branch"] = branch;
            return d;
        },
        py::arg("r_min"), py::arg("r_max"), py::arg("n_r"), py::arg("n_iter") = 5000, py::arg("tail") = 100,
        py::arg("inits") = py::none(), py::arg("threads") = 1);
    m.def(
        "detect_period",
        [](const Array& u, double r, std::size_t n, int max_period) -> py::object {
            const auto p = detect_period(orbit_branches(to_dir(u), r, n), max_period);
            if (!p) return py::none();
            return py::make_tuple(p->period, p->word);
        },
        py::arg("u"), py::arg("r"), py::arg("n") = 5000, py::arg("max_period") = 64);
    m.def("thin_stripe_r", &thin_stripe_r, py::arg("l"), py::arg("m"));
    m.def("cos_beta", &cos_beta, py::arg("r"));
    m.def("lyapunov_max", [](const Array& u, double r, std::size_t n) { return lyapunov_max(to_dir(u), r, n).lambda_max; },
          py::arg("u"), py::arg("r"), py::arg("n"));
    m.def("rotation_number", [](const Array& u, double r, std::size_t n) { return rotation_number(to_dir(u), r, n).rho; },
          py::arg("u"), py::arg("r"), py::arg("n"));
    m.def(
        "histogram",
        [](const Array& u, double r, std::size_t n, int bins_w1, int bins_w2) {
            const auto h = empirical_histogram(to_dir(u), r, n, bins_w1, bins_w2);
            Array out({bins_w1, bins_w2});
            auto o = out.mutable_unchecked<2>();
            for (int i = 0; i < bins_w1; ++i)
                for (int j = 0; j < bins_w2; ++j) o(i, j) = h.at(i, j);
            return out;
        },
        py::arg("u"), py::arg("r"), py::arg("n"), py::arg("bins_w1") = 100, py::arg("bins_w2") = 50);

    m.def(
        "validate",
        [](double r, std::size_t n_inits, std::size_t symbols, unsigned digits, std::uint64_t seed) {
            const auto rep = triple_engine_validate(r, random_inits(n_inits, seed), symbols, true, digits);
            py::dict d;
            d["mismatches"] = rep.mismatches.size();
            d["trig_excluded"] = rep.trig_degenerate.size();
            d["separated"] = rep.separated.size();
            d["all_agree"] = rep.all_agree();
            return d;
        },
        py::arg("r"), py::arg("n_inits") = 10, py::arg("symbols") = 200, py::arg("digits") = 0, py::arg("seed") = 1);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<std::string> argv{"bbmap"};
            argv.insert(argv.end(), args.begin(), args.end());
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = cli::run(argv, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs a bbmap subcommand; returns (exit code, stdout, stderr).");
}
