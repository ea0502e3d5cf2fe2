#include "expfiber/separation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace expfiber {

namespace {

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

double segment_distance(cplx p, cplx a, cplx b)
{
    const cplx d = b - a;
    const double len2 = std::norm(d);
    if (len2 == 0)
        return std::abs(p - a);
    const double u = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
    return std::abs(a + u * d - p);
}

// Proper crossing of two segments; shared endpoints do not count.
bool segments_cross(cplx a, cplx b, cplx c, cplx d)
{
    const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
           ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

// Two rays sharing a long prefix run together to within rounding for a
// while, and their chords may cross there. Segments lying within `coincide`
// of each other are treated as one piece of curve, not as a crossing.
bool is_simple(const std::vector<cplx>& poly, double coincide)
{
    auto together = [&](cplx a, cplx b, cplx c, cplx d) {
        return segment_distance(a, c, d) < coincide && segment_distance(b, c, d) < coincide &&
               segment_distance(c, a, b) < coincide && segment_distance(d, a, b) < coincide;
    };
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const cplx a = poly[i], b = poly[(i + 1) % n];
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1)
                continue;
            const cplx c = poly[j], d = poly[(j + 1) % n];
            if (segments_cross(a, b, c, d) && !together(a, b, c, d))
                return false;
        }
    }
    return true;
}

RayTrace cut_at(RayTrace trace, double truncation)
{
    auto& s = trace.samples;
    s.erase(std::remove_if(s.begin(), s.end(),
                           [&](const TraceSample& x) { return x.t > truncation * (1 + 1e-12); }),
            s.end());
    return trace;
}

} // namespace

std::string to_string(Side side)
{
    switch (side) {
    case Side::Inside: return "inside";
    case Side::Outside: return "outside";
    case Side::OnCurve: return "on-curve";
    }
    return "?";
}

std::string to_string(Verdict verdict)
{
    switch (verdict) {
    case Verdict::Separated: return "Separated";
    case Verdict::OnRay: return "OnRay";
    case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

SeparatingCurve build_curve(const CharacteristicPair& pair, double truncation,
                            const CurveOptions& options)
{
    if (!(truncation > 0) || truncation > options.solver.trace.warm_start)
        throw Error(ErrorCode::Precondition, "truncation potential must lie in (0, " +
                                                 std::to_string(options.solver.trace.warm_start) +
                                                 "]");
    SeparatingCurve curve;
    curve.pair = pair;
    curve.truncation = truncation;
    curve.landing = find_parabolic_root(pair, options.solver);

    for (std::size_t i = 0; i < 2; ++i) {
        // Chords of the polygon must follow the rays well inside the margin.
        RayTrace t = refine_trace(cut_at(curve.landing.traces[i], truncation), options.margin / 4,
                                  options.solver.trace);
        if (t.samples.size() < 2)
            throw Error(ErrorCode::Precondition, "truncation below the traced range");
        const TraceSample& top = t.samples.front();
        const ExternalAddress& a = curve.landing.witnesses[i];
        const cplx model(top.t, kTwoPi * a.symbol(0));
        if (!(std::abs(top.z - model) < options.asymptotic_tol))
            throw Error(ErrorCode::Precondition,
                        "ray " + a.str() + " is not yet asymptotic at potential " +
                            std::to_string(top.t));
        curve.traces.push_back(std::move(t));
    }

    auto push = [&](cplx z) {
        if (curve.polyline.empty() || curve.polyline.back() != z)
            curve.polyline.push_back(z);
    };
    for (const auto& s : curve.traces[0].samples)
        push(s.z);
    push(curve.landing.c);
    const auto& up = curve.traces[1].samples;
    for (auto it = up.rbegin(); it != up.rend(); ++it)
        push(it->z);
    if (!is_simple(curve.polyline, options.margin / 2))
        throw Error(ErrorCode::NotSimple, "curve of (" + pair.lower.str() + ", " +
                                              pair.upper.str() + ") intersects itself");
    return curve;
}

double distance_to_curve(const SeparatingCurve& curve, cplx w)
{
    const auto& p = curve.polyline;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i)
        best = std::min(best, segment_distance(w, p[i], p[(i + 1) % p.size()]));
    return best;
}

Side side_of(const SeparatingCurve& curve, cplx w, double margin)
{
    if (distance_to_curve(curve, w) < margin)
        return Side::OnCurve;
    const auto& p = curve.polyline;
    bool inside = false;
    for (std::size_t i = 0, j = p.size() - 1; i < p.size(); j = i++) {
        const cplx a = p[i], b = p[j];
        if ((a.imag() > w.imag()) != (b.imag() > w.imag())) {
            const double x = a.real() + (w.imag() - a.imag()) * (b.real() - a.real()) /
                                            (b.imag() - a.imag());
            if (w.real() < x)
                inside = !inside;
        }
    }
    return inside ? Side::Inside : Side::Outside;
}

SeparationCertificate verify_fiber_separation(const MisiurewiczCombinatorics& m, cplx c,
                                              const SeparationOptions& options)
{
    if (m.addresses.empty())
        throw Error(ErrorCode::Precondition, "empty Misiurewicz combinatorics");
    const double margin = options.curve.margin;
    SeparationCertificate cert;
    cert.c = c;
    cert.margin = margin;
    cert.c0 = solve_misiurewicz(m.addresses.front(), options.curve.solver);
    if (std::abs(c - cert.c0.c) < margin)
        throw Error(ErrorCode::Precondition,
                    format_complex(c) + " is the Misiurewicz parameter itself");

    const TraceOptions& trace = options.curve.solver.trace;
    for (const auto& s : m.addresses) {
        cert.rays.push_back(refine_trace(
            trace_parameter_ray(s, options.ray_potential, trace.warm_start, trace), margin / 4,
            trace));
        if (distance_to_trace(cert.rays.back(), c) < margin) {
            cert.verdict = Verdict::OnRay;
            cert.ray = s;
            return cert;
        }
    }

    for (int n = options.first_depth; n <= options.max_depth; ++n) {
        ApproximationResult approx;
        try {
            approx = approximate_misiurewicz(m, n, options.approximation);
        } catch (const Error& e) {
            cert.diagnostics.push_back("N=" + std::to_string(n) + " " + e.what());
            continue;
        }
        std::vector<CharacteristicPair> pairs{approx.external_pair};
        pairs.insert(pairs.end(), approx.internal_pairs.begin(), approx.internal_pairs.end());
        for (const auto& pair : pairs) {
            const std::string label =
                "N=" + std::to_string(n) + " (" + pair.lower.str() + ", " + pair.upper.str() + ")";
            try {
                SeparatingCurve curve = build_curve(pair, options.truncation, options.curve);
                const Side s0 = side_of(curve, cert.c0.c, margin);
                const Side s1 = side_of(curve, c, margin);
                cert.diagnostics.push_back(label + " c0 " + to_string(s0) + ", c " + to_string(s1));
                if (s0 == Side::OnCurve || s1 == Side::OnCurve || s0 == s1)
                    continue;
                cert.verdict = Verdict::Separated;
                cert.depth = n;
                cert.side_c0 = s0;
                cert.side_c = s1;
                cert.clearance_c0 = distance_to_curve(curve, cert.c0.c);
                cert.clearance_c = distance_to_curve(curve, c);
                cert.curve = std::move(curve);
                return cert;
            } catch (const Error& e) {
                cert.diagnostics.push_back(label + " " + e.what());
            }
        }
    }
    return cert;
}

void write_certificate(std::ostream& out, const SeparationCertificate& cert,
                       const std::string& trace_prefix)
{
    out << std::setprecision(17);
    out << "verdict: " << to_string(cert.verdict) << '\n';
    out << "c: " << format_complex(cert.c) << '\n';
    out << "c0: " << format_complex(cert.c0.c) << '\n';
    out << "c0_address: " << cert.c0.witnesses.front().str() << '\n';
    out << "c0_preperiod: " << cert.c0.preperiod << '\n';
    out << "c0_period: " << cert.c0.period << '\n';
    out << "c0_residual: " << cert.c0.residual << '\n';
    out << "margin: " << cert.margin << '\n';
    if (cert.ray)
        out << "on_ray: " << cert.ray->str() << '\n';
    if (cert.curve) {
        const SeparatingCurve& k = *cert.curve;
        out << "depth: " << cert.depth << '\n';
        out << "epsilon: 2^-" << cert.depth << '\n';
        out << "pair_lower: " << k.pair.lower.str() << '\n';
        out << "pair_upper: " << k.pair.upper.str() << '\n';
        out << "pair_period: " << k.pair.period << '\n';
        out << "root: " << format_complex(k.landing.c) << '\n';
        out << "root_multiplier: " << format_complex(k.landing.multiplier) << '\n';
        out << "root_residual: " << k.landing.residual << '\n';
        out << "truncation: " << k.truncation << '\n';
        out << "polyline_vertices: " << k.polyline.size() << '\n';
        out << "side_c0: " << to_string(cert.side_c0) << '\n';
        out << "side_c: " << to_string(cert.side_c) << '\n';
        out << "clearance_c0: " << cert.clearance_c0 << '\n';
        out << "clearance_c: " << cert.clearance_c << '\n';
        if (!trace_prefix.empty()) {
            const char* names[] = {"lower", "upper"};
            for (std::size_t i = 0; i < k.traces.size(); ++i) {
                const std::string path = trace_prefix + "." + names[i] + ".trace";
                save_trace(path, k.traces[i]);
                out << "trace_" << names[i] << ": " << path << '\n';
            }
        }
    }
    for (const auto& d : cert.diagnostics)
        out << "note: " << d << '\n';
}

} // namespace expfiber
