#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bbmap/map_core.hpp"

namespace bbmap {

// Relative gaps p_i = x_{i+1} - x_i and relative velocities q_i = v_{i+1} - v_i.
struct ParticleState {
    Vec3 p{};
    Vec3 q{};
};

struct CollisionEvent {
    double time = 0;      // since the previous event
    std::string symbols;  // "a", "b", "c" or "ac"
};

class TripleCollisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OracleLogicError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Post-b particle state matching the direction u.
ParticleState particle_state_from(const ProjectiveDirection& u);
// Plane normal p x q, canonicalized.
ProjectiveDirection plane_normal(const ParticleState& s);

// Kinetic energy in the centre-of-mass frame, unit masses, as a function of q.
double relative_kinetic_energy(const Vec3& q);

struct EventResult {
    CollisionEvent event;
    ParticleState state;     // renormalized
    double q_norm_before = 0;  // |q| before the collision
    double q_norm_after = 0;   // |q| after the collision, before renormalization
    double energy_before = 0;
    double energy_after = 0;
};

std::optional<EventResult> particle_next_event(const ParticleState& s, double r);

struct SymbolRun {
    std::string symbols;   // flattened; a simultaneous {a,c} is written "ac"
    bool separated = false;
};

SymbolRun particle_symbol_run(const ParticleState& s0, double r, std::size_t n);

// Collision symbol string -> branch letters 1/2/3; a trailing incomplete group is dropped.
std::vector<int> symbols_to_branches(const std::string& symbols);

struct Defn23Result {
    Vec3 u;
    Branch branch;
    std::string contacts;  // collision symbols traversed, ending with 'b'
};

Defn23Result defn23_step(const Vec3& u, double r);

struct SphericalState {
    Vec3 X{};
    Vec3 V{};
    char contact = 'b';
};

struct TrigStepResult {
    SphericalState state;
    bool degenerate = false;
    double theta = 0;
    double phi = 0;
};

SphericalState spherical_from_angles(double theta0, double phi0);
SphericalState spherical_from(const ProjectiveDirection& u);
TrigStepResult trig_step(const SphericalState& s, double r);

struct TrigBResult {
    SphericalState state;
    Branch branch;
    bool degenerate = false;
};

// Composition of trig_steps up to the next contact b.
TrigBResult trig_b_step(const SphericalState& s, double r);

struct EngineMismatch {
    std::size_t init_index;
    std::size_t first_bad_position;
    std::string engine;
};

struct ValidationReport {
    double r = 0;
    unsigned digits = 0;  // 0: IEEE double, otherwise decimal digits of the MPFR run
    std::size_t n_inits = 0;
    std::size_t n_symbols = 0;
    std::vector<EngineMismatch> mismatches;
    std::vector<std::size_t> trig_degenerate;  // inits where the trig engine was excluded
    std::vector<std::size_t> separated;        // inits where the particles separated early
    double seconds_map = 0, seconds_defn23 = 0, seconds_particle = 0, seconds_trig = 0;
    bool all_agree() const { return mismatches.empty(); }
};

// Runs the linear map, the cross-product algorithm, the particle simulation
// and (optionally) the arccos algorithm from the same initial data and
// compares their branch words. digits > 0 runs every engine in MPFR
// arithmetic with that many decimal digits.
ValidationReport triple_engine_validate(double r, const std::vector<ProjectiveDirection>& inits,
                                        std::size_t n_symbols, bool with_trig = true,
                                        unsigned digits = 0);

}  // namespace bbmap
