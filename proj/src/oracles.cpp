#include "bbmap/oracles.hpp"

#include <boost/multiprecision/mpfr.hpp>
#include <chrono>
#include <cmath>
#include <mutex>

#include "bbmap/detail/kernels.hpp"

namespace bbmap {

namespace {

struct Clock {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

int checked_branch(const std::string& contacts) {
    const int b = kernel::branch_of_contacts(contacts);
    if (b == 0) throw OracleLogicError("unexpected collision group '" + contacts + "'");
    return b;
}

}  // namespace

ParticleState particle_state_from(const ProjectiveDirection& u) {
    const ProjectiveDirection c = u.canonical();
    const double s = c.x * c.x + c.z * c.z;
    if (!(s > 0)) throw DomainError("no particle state for x = z = 0");
    ParticleState st;
    st.p = normalized(Vec3{-c.z, 0, c.x});
    st.q = normalized(Vec3{-c.x * c.y, s, -c.y * c.z});
    return st;
}

ProjectiveDirection plane_normal(const ParticleState& s) {
    return ProjectiveDirection(cross(s.p, s.q)).canonical();
}

double relative_kinetic_energy(const Vec3& q) {
    const double d12 = q[0], d23 = q[1], d34 = q[2];
    const double d13 = d12 + d23, d24 = d23 + d34, d14 = d13 + d34;
    return (d12 * d12 + d23 * d23 + d34 * d34 + d13 * d13 + d24 * d24 + d14 * d14) / 8.0;
}

std::optional<EventResult> particle_next_event(const ParticleState& s, double r) {
    Vec3 p = s.p, q = s.q;
    const kernel::ParticleEvent<double> ev = kernel::particle_event(p, q, r);
    if (ev.status == kernel::EventStatus::separated) return std::nullopt;
    if (ev.status == kernel::EventStatus::triple)
        throw TripleCollisionError("adjacent simultaneous collisions");
    EventResult out;
    out.event.time = ev.time;
    out.event.symbols = ev.symbols;
    out.state = {p, q};
    out.q_norm_before = norm(s.q);
    out.q_norm_after = norm(ev.q_post);
    out.energy_before = relative_kinetic_energy(s.q);
    out.energy_after = relative_kinetic_energy(ev.q_post);
    return out;
}

SymbolRun particle_symbol_run(const ParticleState& s0, double r, std::size_t n) {
    SymbolRun run;
    ParticleState s = s0;
    while (run.symbols.size() < n) {
        auto ev = particle_next_event(s, r);
        if (!ev) {
            run.separated = true;
            break;
        }
        run.symbols += ev->event.symbols;
        s = ev->state;
    }
    if (run.symbols.size() > n) run.symbols.resize(n);
    return run;
}

std::vector<int> symbols_to_branches(const std::string& symbols) {
    std::vector<int> out;
    std::string group;
    for (char c : symbols) {
        group += c;
        if (c == 'b') {
            out.push_back(checked_branch(group));
            group.clear();
        }
    }
    return out;
}

Defn23Result defn23_step(const Vec3& u_in, double r) {
    Vec3 u = u_in;
    std::string contacts;
    const int b = kernel::defn23(u, r, contacts);
    if (b == 0) throw OracleLogicError("cross-product algorithm did not reach contact b");
    return {u, Branch{b}, contacts};
}

SphericalState spherical_from_angles(double theta0, double phi0) {
    SphericalState s;
    s.X = {std::sin(theta0), 0, std::cos(theta0)};
    s.V = scaled(Vec3{std::cos(theta0), 0, -std::sin(theta0)}, std::cos(phi0)) +
          scaled(Vec3{0, 1, 0}, std::sin(phi0));
    s.contact = 'b';
    return s;
}

SphericalState spherical_from(const ProjectiveDirection& u) {
    const ParticleState p = particle_state_from(u);
    return {p.p, p.q, 'b'};
}

TrigStepResult trig_step(const SphericalState& s, double r) {
    TrigStepResult out;
    out.state = s;
    const kernel::TrigOut<double> t = kernel::trig_step(out.state.X, out.state.V, out.state.contact, r);
    out.degenerate = t.degenerate;
    out.theta = t.theta;
    out.phi = t.phi;
    return out;
}

TrigBResult trig_b_step(const SphericalState& s, double r) {
    TrigBResult out;
    out.state = s;
    std::string contacts;
    for (int it = 0; it < 3; ++it) {
        const kernel::TrigOut<double> t =
            kernel::trig_step(out.state.X, out.state.V, out.state.contact, r);
        if (t.degenerate) break;
        contacts += t.contact;
        if (t.contact == 'b') {
            out.branch.id = kernel::branch_of_contacts(contacts);
            out.degenerate = out.branch.id == 0;
            return out;
        }
    }
    out.degenerate = true;
    return out;
}

namespace {

template <class T>
struct Engines {
    T r;
    std::size_t n;

    std::vector<int> map_word(const kernel::A3<T>& u0) const {
        std::vector<int> w;
        kernel::A3<T> u = u0;
        T raw;
        for (std::size_t k = 0; k < n; ++k) {
            const int b = kernel::step(u, r, raw);
            if (b == 0) break;
            w.push_back(b);
        }
        return w;
    }

    std::vector<int> defn23_word(const kernel::A3<T>& u0) const {
        std::vector<int> w;
        kernel::A3<T> u = u0;
        std::string contacts;
        for (std::size_t k = 0; k < n; ++k) {
            const int b = kernel::defn23(u, r, contacts);
            if (b == 0) break;
            w.push_back(b);
        }
        return w;
    }

    // Returns the branch word and whether the particles separated.
    std::pair<std::vector<int>, bool> particle_word(const kernel::A3<T>& u0) const {
        const T x = u0[0], y = u0[1], z = u0[2];
        kernel::A3<T> p = kernel::kunit(kernel::A3<T>{-z, T(0), x});
        kernel::A3<T> q = kernel::kunit(kernel::A3<T>{-x * y, x * x + z * z, -y * z});
        std::vector<int> w;
        std::string group;
        while (w.size() < n) {
            const kernel::ParticleEvent<T> ev = kernel::particle_event(p, q, r);
            if (ev.status == kernel::EventStatus::separated) return {w, true};
            if (ev.status == kernel::EventStatus::triple) break;
            for (char ch : ev.symbols) {
                group += ch;
                if (ch == 'b') {
                    const int b = kernel::branch_of_contacts(group);
                    if (b == 0) return {w, false};
                    w.push_back(b);
                    group.clear();
                }
            }
        }
        return {w, false};
    }

    // Empty optional when the degeneracy flag trips.
    std::optional<std::vector<int>> trig_word(const kernel::A3<T>& u0) const {
        const T x = u0[0], y = u0[1], z = u0[2];
        kernel::A3<T> X = kernel::kunit(kernel::A3<T>{-z, T(0), x});
        kernel::A3<T> V = kernel::kunit(kernel::A3<T>{-x * y, x * x + z * z, -y * z});
        char contact = 'b';
        std::vector<int> w;
        std::string group;
        while (w.size() < n) {
            const kernel::TrigOut<T> t = kernel::trig_step(X, V, contact, r);
            if (t.degenerate) return std::nullopt;
            group += t.contact;
            if (group.size() > 3) return std::nullopt;
            if (t.contact == 'b') {
                const int b = kernel::branch_of_contacts(group);
                if (b == 0) return std::nullopt;
                w.push_back(b);
                group.clear();
            }
        }
        return w;
    }
};

std::optional<std::size_t> first_mismatch(const std::vector<int>& ref, const std::vector<int>& other,
                                          std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        if (k >= ref.size() || k >= other.size()) return k;
        if (ref[k] != other[k]) return k;
    }
    return std::nullopt;
}

template <class T>
void run_validation(ValidationReport& rep, const std::vector<ProjectiveDirection>& inits, bool with_trig) {
    const Engines<T> eng{T(rep.r), rep.n_symbols};
    for (std::size_t i = 0; i < inits.size(); ++i) {
        const ProjectiveDirection c = inits[i].canonical();
        kernel::A3<T> u0{T(c.x), T(c.y), T(c.z)};
        kernel::canonicalize(u0);

        Clock c1;
        const std::vector<int> wm = eng.map_word(u0);
        rep.seconds_map += c1.seconds();

        Clock c2;
        const std::vector<int> wd = eng.defn23_word(u0);
        rep.seconds_defn23 += c2.seconds();

        Clock c3;
        const auto [wp, separated] = eng.particle_word(u0);
        rep.seconds_particle += c3.seconds();
        if (separated) rep.separated.push_back(i);

        if (auto k = first_mismatch(wm, wd, rep.n_symbols)) rep.mismatches.push_back({i, *k, "defn23"});
        if (auto k = first_mismatch(wm, wp, rep.n_symbols)) rep.mismatches.push_back({i, *k, "particle"});

        if (with_trig) {
            Clock c4;
            const auto wt = eng.trig_word(u0);
            rep.seconds_trig += c4.seconds();
            if (!wt) rep.trig_degenerate.push_back(i);
            else if (auto k = first_mismatch(wm, *wt, rep.n_symbols))
                rep.mismatches.push_back({i, *k, "trig"});
        }
    }
}

}  // namespace

ValidationReport triple_engine_validate(double r, const std::vector<ProjectiveDirection>& inits,
                                        std::size_t n_symbols, bool with_trig, unsigned digits) {
    Restitution{r};
    ValidationReport rep;
    rep.r = r;
    rep.digits = digits;
    rep.n_inits = inits.size();
    rep.n_symbols = n_symbols;
    if (digits == 0) {
        run_validation<double>(rep, inits, with_trig);
    } else {
        using boost::multiprecision::mpfr_float;
        // The MPFR default precision is process-global in this Boost version.
        static std::mutex precision_mutex;
        std::lock_guard<std::mutex> lock(precision_mutex);
        const unsigned saved = mpfr_float::default_precision();
        mpfr_float::default_precision(digits);
        run_validation<mpfr_float>(rep, inits, with_trig);
        mpfr_float::default_precision(saved);
    }
    return rep;
}

}  // namespace bbmap
