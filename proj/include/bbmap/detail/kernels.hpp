#pragma once

// Scalar-generic kernels shared by the double engine and the multiprecision
// validation path.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bbmap::kernel {

template <class T>
using A3 = std::array<T, 3>;
template <class T>
using A9 = std::array<T, 9>;

template <class T>
T kdot(const A3<T>& u, const A3<T>& v) {
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}

template <class T>
A3<T> kcross(const A3<T>& u, const A3<T>& v) {
    return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

template <class T>
T knorm(const A3<T>& v) {
    using std::sqrt;
    return sqrt(kdot(v, v));
}

template <class T>
A3<T> kscale(const A3<T>& v, const T& s) {
    return {v[0] * s, v[1] * s, v[2] * s};
}

template <class T>
A3<T> ksub(const A3<T>& u, const A3<T>& v) {
    return {u[0] - v[0], u[1] - v[1], u[2] - v[2]};
}

template <class T>
A3<T> kunit(const A3<T>& v) {
    return kscale(v, T(1) / knorm(v));
}

template <class T>
A3<T> kmul(const A9<T>& m, const A3<T>& v) {
    return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2], m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
            m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
}

template <class T>
A9<T> kmul(const A9<T>& m, const A9<T>& n) {
    A9<T> p;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            p[3 * i + j] = m[3 * i] * n[j] + m[3 * i + 1] * n[3 + j] + m[3 * i + 2] * n[6 + j];
    return p;
}

template <class T>
A9<T> branch_matrix(int i, const T& r) {
    const T a = (r + 1) / 2;
    const T z(0);
    switch (i) {
        case 1: return {-r, r * a, z, -a, a * a - r, r * a, z, z, r * r};
        case 2: return {r, -r * a, z, a, r - 2 * a * a, a, z, -r * a, r};
        case 3: return {r * r, z, z, r * a, a * a - r, -a, z, r * a, -r};
        default: throw std::invalid_argument("branch id must be 1, 2 or 3");
    }
}

template <class T>
A9<T> collision_matrix(char s, const T& r) {
    const T a = (r + 1) / 2;
    const T z(0), o(1);
    switch (s) {
        case 'a': return {-r, z, z, a, o, z, z, z, o};
        case 'b': return {o, a, z, z, -r, z, z, a, o};
        case 'c': return {o, z, z, z, o, a, z, z, -r};
        default: throw std::invalid_argument("collision symbol must be a, b or c");
    }
}

// Monic characteristic polynomial lambda^3 + c[0] lambda^2 + c[1] lambda + c[2].
template <class T>
A3<T> char_poly(const A9<T>& m) {
    A3<T> c;
    c[0] = -(m[0] + m[4] + m[8]);
    c[1] = m[0] * m[4] - m[1] * m[3] + m[0] * m[8] - m[2] * m[6] + m[4] * m[8] - m[5] * m[7];
    c[2] = -(m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
             m[2] * (m[3] * m[7] - m[4] * m[6]));
    return c;
}

template <class T>
A9<T> word_matrix(const std::string& letters, const T& r) {
    A9<T> m = {T(1), T(0), T(0), T(0), T(1), T(0), T(0), T(0), T(1)};
    for (char ch : letters) m = kmul(branch_matrix<T>(ch - '0', r), m);
    return m;
}

template <class T>
A9<T> apply_J(const A9<T>& m) {
    return {m[6], m[7], m[8], m[3], m[4], m[5], m[0], m[1], m[2]};
}

// Sign rule x >= 0, then z <= 0, then y > 0, and unit norm. Returns false on the zero vector.
template <class T>
bool canonicalize(A3<T>& u) {
    T n = knorm(u);
    if (!(n > 0)) return false;
    bool keep;
    if (u[0] != 0) keep = u[0] > 0;
    else if (u[2] != 0) keep = u[2] < 0;
    else keep = u[1] > 0;
    if (!keep) n = -n;
    u = kscale(u, T(1) / n);
    return true;
}

// Branch of a canonical direction; 0 when x*z > 0.
template <class T>
int classify(const A3<T>& c, const T& r) {
    if (c[0] * c[2] > 0) return 0;
    const T a = (r + 1) / 2;
    if (c[1] > 0 && a * c[1] - c[0] > 0) return 1;
    if (c[1] < 0 && a * c[1] - c[2] < 0) return 3;
    return 2;
}

// One map step on a direction; returns the branch (0 outside the domain).
template <class T>
int step(A3<T>& u, const T& r, T& raw_norm) {
    if (!canonicalize(u)) return 0;
    const int b = classify(u, r);
    if (b == 0) return 0;
    u = kmul(branch_matrix(b, r), u);
    raw_norm = knorm(u);
    canonicalize(u);
    return b;
}

inline int branch_of_contacts(const std::string& c) {
    if (c == "ab") return 1;
    if (c == "cb") return 3;
    if (c == "acb" || c == "cab") return 2;
    return 0;
}

template <class T>
A3<T> unit_basis(char c) {
    if (c == 'a') return {T(1), T(0), T(0)};
    if (c == 'b') return {T(0), T(1), T(0)};
    return {T(0), T(0), T(1)};
}

// One pass of the cross-product algorithm; contacts receives the symbols
// visited. Returns 0 if contact b is not reached within three collisions.
template <class T>
int defn23(A3<T>& u, const T& r, std::string& contacts) {
    if (kdot(u, unit_basis<T>('a')) < 0) u = kscale(u, T(-1));
    char contact = 'b';
    contacts.clear();
    for (int it = 0; it < 3; ++it) {
        const A3<T> e = unit_basis<T>(contact);
        const A3<T> p = kcross(u, e);
        const A3<T> q = kcross(p, u);
        const A3<T> v = ksub(u, kscale(e, kdot(u, e)));
        const bool pos = kdot(q, v) > 0;
        char next;
        if (contact == 'a') next = pos ? 'b' : 'c';
        else if (contact == 'b') next = pos ? 'c' : 'a';
        else next = pos ? 'a' : 'b';
        const A3<T> pp = kcross(unit_basis<T>(next), u);
        const A3<T> qq = kmul(collision_matrix(next, r), q);
        u = kcross(qq, pp);
        contact = next;
        contacts += next;
        if (contact == 'b') {
            u = kunit(u);
            return branch_of_contacts(contacts);
        }
    }
    return 0;
}

enum class EventStatus { ok, separated, triple };

template <class T>
struct ParticleEvent {
    EventStatus status = EventStatus::ok;
    std::string symbols;
    T time{};
    A3<T> q_post{};  // velocities after the collision, before renormalization
};

// Advance (p, q) to the next collision; p and q come back unit-normalized
// with q projected on the orthogonal complement of p.
template <class T>
ParticleEvent<T> particle_event(A3<T>& p, A3<T>& q, const T& r) {
    using std::abs;
    ParticleEvent<T> ev;
    bool any = false;
    T tmin(0);
    for (int i = 0; i < 3; ++i) {
        if (q[i] < 0) {
            const T t = -p[i] / q[i];
            if (!any || t < tmin) tmin = t;
            any = true;
        }
    }
    if (!any) {
        ev.status = EventStatus::separated;
        return ev;
    }
    bool hit[3] = {false, false, false};
    const T tol = T(1e-12) * (tmin > 0 ? tmin : T(1e-300));
    for (int i = 0; i < 3; ++i)
        if (q[i] < 0 && abs(-p[i] / q[i] - tmin) <= tol) hit[i] = true;
    if (hit[1] && (hit[0] || hit[2])) {
        ev.status = EventStatus::triple;
        return ev;
    }
    A9<T> M;
    if (hit[0] && hit[2]) {
        ev.symbols = "ac";
        M = kmul(collision_matrix('a', r), collision_matrix('c', r));
    } else {
        const char s = hit[0] ? 'a' : hit[1] ? 'b' : 'c';
        ev.symbols = std::string(1, s);
        M = collision_matrix(s, r);
    }
    ev.time = tmin;
    for (int i = 0; i < 3; ++i) {
        p[i] = p[i] + tmin * q[i];
        if (hit[i] || p[i] < 0) p[i] = T(0);
    }
    ev.q_post = kmul(M, q);
    p = kunit(p);
    q = kunit(ksub(ev.q_post, kscale(p, kdot(ev.q_post, p))));
    return ev;
}

template <class T>
struct TrigOut {
    bool degenerate = false;
    T theta{}, phi{};
    char contact = 'b';
};

// One collision of the arccos-based algorithm; X, V, contact updated in place.
template <class T>
TrigOut<T> trig_step(A3<T>& X, A3<T>& V, char& contact, const T& r) {
    using std::abs;
    using std::acos;
    using std::cos;
    using std::isfinite;
    using std::sin;
    TrigOut<T> out;
    const T half_pi = acos(T(0));
    const int ti = contact == 'a' ? 1 : contact == 'b' ? 2 : 0;
    const int pi_ = contact == 'a' ? 2 : contact == 'b' ? 0 : 1;
    const T th = acos(X[ti]);
    const T ct = cos(th);
    const T cphi = V[pi_] / ct;
    const T ph = acos(cphi);
    out.theta = th;
    out.phi = ph;
    if (abs(ct) >= 1 - T(1e-12) || abs(ct) <= T(1e-12) || abs(cphi) > 1 || ph == half_pi) {
        out.degenerate = true;
        out.contact = contact;
        return out;
    }
    const T st = sin(th), sp = sin(ph), cp = cos(ph);
    const bool lt = ph < half_pi;
    const T z(0);
    A3<T> Xn;
    char next;
    if (contact == 'a') {
        if (lt) Xn = {ct * sp, z, cp}, next = 'b';
        else Xn = {st * sp, -cp, z}, next = 'c';
    } else if (contact == 'b') {
        if (lt) Xn = {cp, ct * sp, z}, next = 'c';
        else Xn = {z, st * sp, -cp}, next = 'a';
    } else {
        if (lt) Xn = {z, cp, ct * sp}, next = 'a';
        else Xn = {-cp, z, st * sp}, next = 'b';
    }
    Xn = kunit(Xn);
    A3<T> Vn = kmul(collision_matrix(next, r), V);
    Vn = ksub(Vn, kscale(Xn, kdot(Vn, Xn)));
    V = kunit(Vn);
    X = Xn;
    contact = next;
    out.contact = next;
    return out;
}

}  // namespace bbmap::kernel
