#include "expfiber/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>

namespace expfiber {

namespace {

bool finite(cplx z)
{
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

std::vector<int> proper_divisors(int n)
{
    std::vector<int> out;
    for (int d = 1; d < n; ++d)
        if (n % d == 0)
            out.push_back(d);
    return out;
}

// Values and c-derivatives of the singular orbit z_0 = c, z_{j+1} = e^{z_j} + c.
struct SingularOrbit {
    std::vector<cplx> z;
    std::vector<cplx> dc;
};

SingularOrbit singular_orbit(cplx c, int length)
{
    SingularOrbit orbit;
    cplx z = c, d = 1.0;
    for (int j = 0; j <= length; ++j) {
        orbit.z.push_back(z);
        orbit.dc.push_back(d);
        const cplx e = std::exp(z);
        d = e * d + 1.0;
        z = e + c;
    }
    return orbit;
}

// f^n(z) - z and (f^n)'(z) - omega with their Jacobian in (z, c).
struct ParabolicSystem {
    cplx h1, h2;
    cplx h1_z, h1_c, h2_z, h2_c;
};

ParabolicSystem parabolic_system(cplx c, cplx z0, int n, cplx omega)
{
    cplx z = z0, a = 1.0, b = 0.0, A = 0.0, C = 0.0;
    for (int j = 0; j < n; ++j) {
        const cplx e = std::exp(z);
        A = e * (a * a + A);
        C = e * (b * a + C);
        a = e * a;
        b = e * b + 1.0;
        z = e + c;
    }
    return {z - z0, a - omega, a - 1.0, b, A, C};
}

struct ParabolicRoot {
    cplx c, z;
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;
};

ParabolicRoot solve_parabolic(cplx c, cplx z, int n, cplx omega, const SolverOptions& options)
{
    ParabolicRoot root;
    for (int it = 0; it < options.max_iterations; ++it) {
        const ParabolicSystem s = parabolic_system(c, z, n, omega);
        const double r = std::abs(s.h1) + std::abs(s.h2);
        if (!std::isfinite(r))
            return root;
        const cplx det = s.h1_z * s.h2_c - s.h1_c * s.h2_z;
        if (det == 0.0)
            return root;
        cplx dz = (s.h1 * s.h2_c - s.h1_c * s.h2) / det;
        cplx dc = (s.h1_z * s.h2 - s.h1 * s.h2_z) / det;
        const double step = std::max(std::abs(dz), std::abs(dc));
        if (step > 0.5) {
            dz *= 0.5 / step;
            dc *= 0.5 / step;
        }
        z -= dz;
        c -= dc;
        if (step < 1e-15 * (1 + std::abs(c) + std::abs(z)))
            break;
    }
    const ParabolicSystem s = parabolic_system(c, z, n, omega);
    root.c = c;
    root.z = z;
    root.residual = std::abs(s.h1) + std::abs(s.h2);
    root.converged = root.residual < options.tol;
    return root;
}

} // namespace

OrbitJet iterate(cplx c, cplx z, int n)
{
    cplx d = 1.0;
    for (int j = 0; j < n; ++j) {
        const cplx e = std::exp(z);
        d *= e;
        z = e + c;
    }
    return {z, d};
}

PeriodicPoint find_periodic_point(cplx c, const ExternalAddress& s, const SolverOptions& options)
{
    if (!s.is_periodic())
        throw Error(ErrorCode::NotPeriodic, s.str() + " is preperiodic");
    const int n = static_cast<int>(s.period_length());

    PeriodicPoint out;
    out.c = c;
    out.period = n;
    out.trace = trace_dynamic_ray(c, s, options.landing_potential, options.trace.warm_start,
                                  options.trace);
    cplx z = out.trace.last().z;

    for (int it = 0; it < options.max_iterations; ++it) {
        const OrbitJet j = iterate(c, z, n);
        const cplx step = (j.value - z) / (j.dz - 1.0);
        if (!finite(step))
            break;
        z -= step;
        if (std::abs(step) < 1e-16 * (1 + std::abs(z)))
            break;
    }
    // Near a multiple root Newton on f^n(z) - z stalls; the multiplier
    // equation has a simple root there.
    if (std::abs(iterate(c, z, n).dz - 1.0) < 1e-3) {
        cplx w = z;
        for (int it = 0; it < options.max_iterations; ++it) {
            cplx x = w, a = 1.0, A = 0.0;
            for (int k = 0; k < n; ++k) {
                const cplx e = std::exp(x);
                A = e * (a * a + A);
                a = e * a;
                x = e + c;
            }
            const cplx step = (a - 1.0) / A;
            if (!finite(step))
                break;
            w -= step;
            if (std::abs(step) < 1e-16 * (1 + std::abs(w)))
                break;
        }
        if (finite(w) && std::abs(iterate(c, w, n).value - w) <= std::abs(iterate(c, z, n).value - z))
            z = w;
    }

    const OrbitJet j = iterate(c, z, n);
    out.z = z;
    out.multiplier = j.dz;
    out.residual = std::abs(j.value - z);
    if (!(out.residual < std::max(options.tol, 1e-9)))
        throw Error(ErrorCode::NewtonDivergence,
                    "periodic point of " + s.str() + " did not converge (residual " +
                        std::to_string(out.residual) + ")");
    if (std::abs(out.multiplier) < 1 - options.multiplier_tol)
        throw Error(ErrorCode::AttractingContradiction,
                    "ray " + s.str() + " reached an attracting point");
    if (!verify_landing(out.trace, z, options.landing_tol))
        throw Error(ErrorCode::NewtonDivergence,
                    "ray " + s.str() + " does not land at " + format_complex(z));
    return out;
}

SpecialParameter find_misiurewicz_parameter(const ExternalAddress& s, int preperiod, int period,
                                            const SolverOptions& options)
{
    if (s.is_periodic())
        throw Error(ErrorCode::Precondition, s.str() + " is not strictly preperiodic");
    if (preperiod < 1 || period < 1 || static_cast<int>(s.preperiod_length()) != preperiod ||
        static_cast<int>(s.period_length()) % period != 0)
        throw Error(ErrorCode::Precondition,
                    "preperiod/period " + std::to_string(preperiod) + "/" + std::to_string(period) +
                        " do not match " + s.str());
    const int k = preperiod, m = period;

    auto solve_from = [&](cplx c) {
        for (int it = 0; it < options.max_iterations; ++it) {
            const SingularOrbit o = singular_orbit(c, k + m);
            cplx step = (o.z[k + m] - o.z[k]) / (o.dc[k + m] - o.dc[k]);
            if (!finite(step))
                throw Error(ErrorCode::NewtonDivergence, "Misiurewicz Newton left the plane");
            if (std::abs(step) > 0.25)
                step *= 0.25 / std::abs(step);
            c -= step;
            if (std::abs(step) < 1e-16 * (1 + std::abs(c)))
                break;
        }

        SpecialParameter out;
        out.kind = SpecialKind::Misiurewicz;
        out.c = c;
        out.preperiod = k;
        out.period = m;
        out.witnesses = {s};
        const SingularOrbit o = singular_orbit(c, k + m);
        out.residual = std::abs(o.z[k + m] - o.z[k]);
        // The equation amplifies errors in c by its derivative, so convergence is
        // judged by the size of the remaining Newton correction.
        const double correction = out.residual / std::abs(o.dc[k + m] - o.dc[k]);
        if (!(correction < options.tol))
            throw Error(ErrorCode::NewtonDivergence,
                        "Misiurewicz equation residual " + std::to_string(out.residual));

        // The relation must not hold with a shorter preperiod or period.
        const double separation = 1e-6;
        if (std::abs(o.z[k - 1 + m] - o.z[k - 1]) < separation)
            throw Error(ErrorCode::WrongBasin, "solved parameter has a shorter preperiod");
        for (int d : proper_divisors(m))
            if (std::abs(o.z[k + d] - o.z[k]) < separation)
                throw Error(ErrorCode::WrongBasin, "solved parameter has a shorter period");
        out.multiplier = iterate(c, o.z[k], m).dz;
        if (!(std::abs(out.multiplier) > 1))
            throw Error(ErrorCode::AttractingContradiction, "postsingular cycle is not repelling");

        // The dynamic ray of s at the solved parameter must land at the singular value.
        RayTrace witness = trace_dynamic_ray(c, s, options.landing_potential,
                                             options.trace.warm_start, options.trace);
        if (!verify_landing(witness, c, options.misiurewicz_landing_tol))
            throw Error(ErrorCode::WrongBasin,
                        "dynamic ray " + s.str() + " does not land at " + format_complex(c));
        out.traces.push_back(std::move(witness));
        return out;
    };

    // A seed outside the basin of the landing point is retried further down the ray.
    std::optional<Error> last;
    for (double t = options.seed_potential; t >= options.min_seed_potential; t /= 4) {
        const RayTrace seed_ray = trace_parameter_ray(s, t, options.trace.warm_start, options.trace);
        if (!seed_ray.complete)
            throw Error(ErrorCode::NewtonDivergence,
                        "parameter ray " + s.str() + " stopped early: " + seed_ray.note);
        try {
            return solve_from(seed_ray.last().z);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::AttractingContradiction)
                throw;
            last = e;
        }
    }
    if (!last)
        throw Error(ErrorCode::Precondition, "seed potential is below its floor");
    throw *last;
}

SpecialParameter solve_misiurewicz(const ExternalAddress& s, const SolverOptions& options)
{
    if (s.is_periodic())
        throw Error(ErrorCode::Precondition, s.str() + " is not strictly preperiodic");
    const int k = static_cast<int>(s.preperiod_length());
    const int n = static_cast<int>(s.period_length());
    std::optional<Error> last;
    for (int m = 1; m <= n; ++m) {
        if (n % m != 0)
            continue;
        try {
            return find_misiurewicz_parameter(s, k, m, options);
        } catch (const Error& e) {
            last = e;
        }
    }
    throw *last;
}

int rotation_numerator(const CharacteristicPair& pair)
{
    const int orbit = landing_orbit_period(pair);
    const int q = static_cast<int>(pair.lower.period_length()) / orbit;
    std::vector<ExternalAddress> rays;
    for (int j = 0; j < q; ++j)
        rays.push_back(shift(pair.lower, static_cast<std::size_t>(j * orbit)));
    std::vector<ExternalAddress> sorted = rays;
    std::sort(sorted.begin(), sorted.end(),
              [](const ExternalAddress& a, const ExternalAddress& b) { return less(a, b); });
    auto position = [&](const ExternalAddress& a) {
        return static_cast<int>(std::find(sorted.begin(), sorted.end(), a) - sorted.begin());
    };
    return ((position(rays[q > 1 ? 1 : 0]) - position(rays[0])) % q + q) % q;
}

SpecialParameter find_parabolic_root(const CharacteristicPair& pair, const SolverOptions& options)
{
    if (!is_characteristic_pair(pair.lower, pair.upper))
        throw Error(ErrorCode::Precondition, "(" + pair.lower.str() + ", " + pair.upper.str() +
                                                 ") is not a characteristic pair");
    const int orbit = landing_orbit_period(pair);
    const int q = static_cast<int>(pair.lower.period_length()) / orbit;
    const int r = rotation_numerator(pair);

    std::vector<RayTrace> traces;
    for (const auto* a : {&pair.lower, &pair.upper}) {
        traces.push_back(trace_parameter_ray(*a, options.seed_potential,
                                             options.trace.warm_start, options.trace));
        if (traces.back().samples.size() < 2)
            throw Error(ErrorCode::NewtonDivergence, "parameter ray " + a->str() + " is empty");
    }
    const cplx end_lo = traces[0].last().z, end_hi = traces[1].last().z;
    if (std::abs(end_lo - end_hi) > options.seed_gap)
        throw Error(ErrorCode::SeedDisagreement,
                    "ray endpoints " + format_complex(end_lo) + " and " + format_complex(end_hi) +
                        " are too far apart");
    const cplx c_seed = 0.5 * (end_lo + end_hi);

    // The singular orbit of a nearby escaping parameter lingers at the
    // parabolic cycle before escaping; its closest return seeds z.
    cplx z_seed = c_seed;
    double best = std::numeric_limits<double>::infinity();
    cplx w = c_seed;
    for (int j = 0; j < 2000 && w.real() < 50; ++j) {
        const double d = std::abs(iterate(c_seed, w, orbit).value - w);
        if (d < best) {
            best = d;
            z_seed = w;
        }
        w = std::exp(w) + c_seed;
    }

    std::vector<cplx> omegas{1.0};
    if (q > 1)
        omegas = {std::polar(1.0, kTwoPi * r / q), std::polar(1.0, -kTwoPi * r / q)};
    ParabolicRoot chosen;
    for (cplx omega : omegas) {
        const ParabolicRoot root = solve_parabolic(c_seed, z_seed, orbit, omega, options);
        if (root.converged &&
            (!chosen.converged || std::abs(root.c - c_seed) < std::abs(chosen.c - c_seed)))
            chosen = root;
    }
    if (!chosen.converged)
        throw Error(ErrorCode::NewtonDivergence, "parabolic system did not converge near " +
                                                     format_complex(c_seed));

    SpecialParameter out;
    out.kind = SpecialKind::Parabolic;
    out.c = chosen.c;
    out.orbit_point = chosen.z;
    out.period = orbit;
    out.residual = chosen.residual;
    out.multiplier = iterate(chosen.c, chosen.z, static_cast<int>(pair.lower.period_length())).dz;
    out.witnesses = {pair.lower, pair.upper};

    // Follow both rays further, but only until they are well inside the
    // landing tolerance of the root.
    const cplx root = out.c;
    const double close = 0.5 * options.landing_tol;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        if (verify_landing(traces[i], root, close) ||
            !(options.landing_potential < traces[i].last().t))
            continue;
        TraceOptions deep = options.trace;
        auto seen = std::make_shared<RayTrace>();
        deep.stop_when = [root, close, seen](const TraceSample& s) {
            seen->samples.push_back(s);
            return verify_landing(*seen, root, close);
        };
        traces[i] = trace_parameter_ray(out.witnesses[i], options.landing_potential,
                                        options.trace.warm_start, deep);
    }
    for (std::size_t i = 0; i < traces.size(); ++i)
        if (!verify_landing(traces[i], out.c, options.landing_tol))
            throw Error(ErrorCode::SeedDisagreement,
                        "parameter ray " + out.witnesses[i].str() + " does not land at " +
                            format_complex(out.c));
    out.traces = std::move(traces);
    return out;
}

} // namespace expfiber
