#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "expfiber/address.hpp"
#include "expfiber/error.hpp"

namespace expfiber {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2 * kPi;

struct TraceSample {
    double t = 0.0;
    cplx z;
    // Low-order part of z when traced in extended precision (z + tail).
    cplx tail;
    double residual = 0.0;
};

enum class RayKind { Dynamic, Parameter };

struct RayTrace {
    RayKind kind = RayKind::Dynamic;
    cplx c;            // dynamical plane parameter; unused for parameter rays
    ExternalAddress address;
    int lifts = 0;     // sample potentials are F^lifts(t)
    std::vector<TraceSample> samples;
    bool complete = true;
    ErrorCode stop_reason = ErrorCode::Precondition;
    std::string note;

    double max_residual() const;
    const TraceSample& last() const { return samples.back(); }
};

struct TraceOptions {
    double tol = 1e-8;
    double big_potential = 1e12;
    // Samples per unit step: 1 means unit steps above t = 5 and ratio 0.9 below.
    double resolution = 1.0;
    // Tracing starts this high (unrecorded) so the strip rule is unambiguous.
    double warm_start = 40.0;
    // A branch decision further than this from its reference forces a smaller step.
    double max_jump = 1.0;
    int max_refinements = 30;
    double singular_radius = 1e-12;
    std::size_t max_depth = 5'000'000;
    bool high_precision = true;   // quad pullbacks; parameter rays get quad polishing
    int lifts = 0;                // dynamic rays only
    std::vector<double> potentials; // explicit decreasing grid, overrides the step rule
    // Ends the trace early (still complete) once it returns true for a sample.
    std::function<bool(const TraceSample&)> stop_when;
};

// Default sampling grid between t_hi and t_lo, both included.
std::vector<double> potential_grid(double t_lo, double t_hi, double resolution = 1.0);

RayTrace trace_dynamic_ray(cplx c, const ExternalAddress& s, double t_lo, double t_hi,
                           const TraceOptions& options = {});

RayTrace trace_parameter_ray(const ExternalAddress& s, double t_lo, double t_hi,
                             const TraceOptions& options = {});

// |f_c(z) - w| evaluated in extended precision from the head/tail samples.
double functional_residual(cplx c, const TraceSample& z, const TraceSample& w);

bool verify_landing(const RayTrace& trace, cplx p, double tol);

// Retraces with midpoint potentials inserted until each chord of the
// polyline stays within tol of the ray at its middle potential.
RayTrace refine_trace(const RayTrace& trace, double tol, const TraceOptions& options = {},
                      int max_rounds = 12);

// Distance from p to the sampled polyline of the trace.
double distance_to_trace(const RayTrace& trace, cplx p);

void write_trace(std::ostream& out, const RayTrace& trace);
RayTrace read_trace(std::istream& in);
void save_trace(const std::string& path, const RayTrace& trace);
RayTrace load_trace(const std::string& path);

std::string format_complex(cplx z);
cplx parse_complex(const std::string& text);

} // namespace expfiber
