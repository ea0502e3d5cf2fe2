#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "expfiber/approximation.hpp"
#include "expfiber/solvers.hpp"

namespace expfiber {

// Closed polygon made of two parameter rays of a characteristic pair, their
// common parabolic root, and a short segment joining the rays at potential T.
struct SeparatingCurve {
    CharacteristicPair pair;
    std::vector<RayTrace> traces;   // lower, upper; both cut at potential T
    SpecialParameter landing;
    double truncation = 0.0;
    // Lower ray from T down to the root, then the upper ray back up to T.
    // The closing edge from the last vertex to the first is implicit.
    std::vector<cplx> polyline;
};

enum class Side { Inside, Outside, OnCurve };

struct CurveOptions {
    double margin = 1e-4;          // OnCurve width
    double asymptotic_tol = 0.1;   // |z(T) - (T + 2 pi i s_1)| bound at the cut
    SolverOptions solver = [] {
        SolverOptions o;
        o.landing_potential = 1e-5;
        o.landing_tol = 1e-4;
        return o;
    }();
};

SeparatingCurve build_curve(const CharacteristicPair& pair, double truncation,
                            const CurveOptions& options = {});

// Inside is the wake: the bounded side, which at height T contains the rays
// whose addresses lie between the pair's.
Side side_of(const SeparatingCurve& curve, cplx w, double margin = 1e-4);

double distance_to_curve(const SeparatingCurve& curve, cplx w);

std::string to_string(Side side);

struct SeparationOptions {
    CurveOptions curve;
    double truncation = 20.0;
    int first_depth = 2;            // epsilon runs over 2^-first_depth .. 2^-max_depth
    int max_depth = 10;
    double ray_potential = 0.05;    // rays of M are traced this far for the OnRay test
    ApproximationOptions approximation;
};

enum class Verdict { Separated, OnRay, Inconclusive };

struct SeparationCertificate {
    SpecialParameter c0;
    cplx c;
    Verdict verdict = Verdict::Inconclusive;
    std::optional<SeparatingCurve> curve;  // the separating curve when Separated
    std::optional<ExternalAddress> ray;    // the address hit when OnRay
    int depth = 0;                          // N of the separating pair
    Side side_c0 = Side::OnCurve;
    Side side_c = Side::OnCurve;
    double clearance_c0 = 0.0;              // distances to the polyline
    double clearance_c = 0.0;
    double margin = 0.0;
    std::vector<RayTrace> rays;             // parameter rays of M
    std::vector<std::string> diagnostics;
};

std::string to_string(Verdict verdict);

SeparationCertificate verify_fiber_separation(const MisiurewiczCombinatorics& m, cplx c,
                                              const SeparationOptions& options = {});

// Key: value lines. When trace_prefix is non-empty the curve's traces are
// saved next to it and referenced by path.
void write_certificate(std::ostream& out, const SeparationCertificate& cert,
                       const std::string& trace_prefix = "");

} // namespace expfiber
