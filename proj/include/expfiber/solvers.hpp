#pragma once

#include <vector>

#include "expfiber/characteristic.hpp"
#include "expfiber/rays.hpp"

namespace expfiber {

struct SolverOptions {
    double tol = 1e-10;              // Newton residual target
    double seed_potential = 0.05;    // parameter rays are followed this far for seeds
    double min_seed_potential = 1e-3; // rejected seeds are retried down to here
    double landing_potential = 1e-3; // traces used for landing checks stop here
    double landing_tol = 1e-2;
    // Preperiodic rays land fast, so their witnesses are held much tighter.
    double misiurewicz_landing_tol = 1e-6;
    double seed_gap = 0.5;           // largest allowed distance between paired seeds
    double multiplier_tol = 1e-6;
    int max_iterations = 200;
    // Seeds and landing checks do not need quad residuals.
    TraceOptions trace = [] {
        TraceOptions o;
        o.high_precision = false;
        return o;
    }();
};

struct PeriodicPoint {
    cplx c;
    cplx z;
    int period = 0;
    cplx multiplier;
    double residual = 0.0;
    RayTrace trace;
};

enum class SpecialKind { Misiurewicz, Parabolic };

struct SpecialParameter {
    SpecialKind kind = SpecialKind::Misiurewicz;
    cplx c;
    int preperiod = 0;   // Misiurewicz: k
    int period = 0;      // Misiurewicz: m; parabolic: period of the parabolic orbit
    double residual = 0.0;
    // Misiurewicz: multiplier of the postsingular cycle. Parabolic: (f^p)' at
    // the orbit point, p the period of the witness addresses.
    cplx multiplier;
    cplx orbit_point;    // parabolic only
    std::vector<ExternalAddress> witnesses;
    std::vector<RayTrace> traces;
};

// f_c^n(z) with first derivative in z.
struct OrbitJet {
    cplx value;
    cplx dz;
};
OrbitJet iterate(cplx c, cplx z, int n);

PeriodicPoint find_periodic_point(cplx c, const ExternalAddress& s,
                                  const SolverOptions& options = {});

SpecialParameter find_misiurewicz_parameter(const ExternalAddress& s, int preperiod, int period,
                                            const SolverOptions& options = {});

// Tries every orbit period m dividing the address period, smallest first,
// since the postsingular cycle may be shorter than the address cycle.
SpecialParameter solve_misiurewicz(const ExternalAddress& s, const SolverOptions& options = {});

// Rotation number r/q of the portrait at its characteristic point, as the
// numerator r in [0, q). q is address period / landing orbit period.
int rotation_numerator(const CharacteristicPair& pair);

SpecialParameter find_parabolic_root(const CharacteristicPair& pair,
                                     const SolverOptions& options = {});

} // namespace expfiber
