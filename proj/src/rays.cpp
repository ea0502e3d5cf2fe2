#include "expfiber/rays.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <regex>
#include <sstream>

#include "kernel.hpp"

namespace expfiber {

namespace {

using kernel::BranchReference;
using kernel::Ops;
using kernel::PullbackSettings;

PullbackSettings settings_from(const TraceOptions& options)
{
    PullbackSettings s;
    s.big_potential = options.big_potential;
    s.singular_radius = options.singular_radius;
    s.max_depth = options.max_depth;
    return s;
}

// The companion evaluation of the shifted ray starts from its own depth so
// the functional-equation residual also measures the asymptotic start.
constexpr double kCompanionPotential = 60.0;

void check_range(double t_lo, double t_hi)
{
    if (!(t_lo > 0) || !(t_lo <= t_hi) || !std::isfinite(t_hi))
        throw Error(ErrorCode::Precondition, "potential range needs 0 < t_lo <= t_hi");
}

double midpoint(double a, double b)
{
    return (a > 5 && b > 5) ? 0.5 * (a + b) : std::sqrt(a * b);
}

std::vector<double> grid_for(double t_lo, double t_hi, const TraceOptions& options)
{
    if (options.potentials.empty())
        return potential_grid(t_lo, t_hi, options.resolution);
    for (std::size_t i = 1; i < options.potentials.size(); ++i)
        if (!(options.potentials[i] < options.potentials[i - 1]))
            throw Error(ErrorCode::Precondition, "explicit potentials must decrease strictly");
    if (!(options.potentials.back() > 0))
        throw Error(ErrorCode::Precondition, "potentials must be positive");
    return options.potentials;
}

template <class R>
cplx to_cplx(const typename Ops<R>::cx& z)
{
    return {static_cast<double>(Ops<R>::re(z)), static_cast<double>(Ops<R>::im(z))};
}

template <class R>
typename Ops<R>::cx from_cplx(cplx z)
{
    return Ops<R>::make(static_cast<R>(z.real()), static_cast<R>(z.imag()));
}

// Walks potentials downward. `attempt` evaluates at a potential using the
// current reference and reports acceptance; failed steps are bisected.
class Marcher {
public:
    Marcher(const TraceOptions& options) : options_(options) {}

    template <class Attempt>
    bool advance(double from, double to, Attempt&& attempt)
    {
        budget_ = 64 * (options_.max_refinements + 1);
        return step(from, to, options_.max_refinements, attempt);
    }

    ErrorCode failure = ErrorCode::BranchCut;

private:
    template <class Attempt>
    bool step(double from, double to, int depth_left, Attempt& attempt)
    {
        if (--budget_ < 0)
            return false;
        const int verdict = attempt(to);
        if (verdict > 0)
            return true;
        if (verdict < 0 || depth_left == 0)
            return false;
        const double mid = midpoint(from, to);
        if (!(mid < from && mid > to))
            return false;
        return step(from, mid, depth_left - 1, attempt) && step(mid, to, depth_left - 1, attempt);
    }

    const TraceOptions& options_;
    long budget_ = 0;
};

template <class R>
RayTrace dynamic_trace(cplx c_in, const ExternalAddress& s, const std::vector<double>& grid,
                       const TraceOptions& options)
{
    using O = Ops<R>;
    using cx = typename O::cx;
    const cx c = from_cplx<R>(c_in);
    const PullbackSettings settings = settings_from(options);
    PullbackSettings companion = settings;
    companion.big_potential = kCompanionPotential;

    RayTrace trace;
    trace.kind = RayKind::Dynamic;
    trace.c = c_in;
    trace.address = s;
    trace.lifts = options.lifts;

    BranchReference reference, scratch;
    kernel::Pullback<R> latest;
    Marcher marcher(options);
    ErrorCode failure = ErrorCode::BranchCut;
    auto attempt = [&](double t) -> int {
        const bool have_ref = !reference.empty();
        auto p = kernel::pull_back<R>(c, s, static_cast<R>(t), options.lifts, 0,
                                      have_ref ? &reference : nullptr, &scratch, settings);
        if (p.too_deep) {
            failure = ErrorCode::ResourceBound;
            return -1;
        }
        if (p.closest_singular < options.singular_radius) {
            failure = ErrorCode::PostsingularCollision;
            return -1;
        }
        if (p.worst_jump > options.max_jump || (!have_ref && p.strip_cut)) {
            failure = ErrorCode::BranchCut;
            return 0;
        }
        if (!std::isfinite(static_cast<double>(O::re(p.z))) ||
            !std::isfinite(static_cast<double>(O::im(p.z)))) {
            failure = ErrorCode::Divergence;
            return -1;
        }
        std::swap(reference, scratch);
        latest = p;
        return 1;
    };

    double current = std::max(grid.front(), options.warm_start);
    if (attempt(current) <= 0)
        throw Error(failure, "cannot start the trace of " + s.str());
    for (double t : potential_grid(grid.front(), current, 1.0)) {
        if (t >= current)
            continue;
        if (!marcher.advance(current, t, attempt))
            throw Error(failure, "warm-up of " + s.str() + " failed near t=" + std::to_string(t));
        current = t;
    }

    for (double t : grid) {
        if (t < current && !marcher.advance(current, t, attempt)) {
            trace.complete = false;
            trace.stop_reason = failure;
            trace.note = "stopped before t=" + std::to_string(t);
            break;
        }
        current = t;
        const auto image = kernel::pull_back<R>(c, s, static_cast<R>(t), options.lifts + 1, 1,
                                                &reference, nullptr, companion);
        TraceSample sample;
        sample.t = t;
        sample.z = to_cplx<R>(latest.z);
        sample.tail = to_cplx<R>(latest.z - from_cplx<R>(sample.z));
        sample.residual = static_cast<double>(O::abs(O::exp(latest.z) + c - image.z));
        trace.samples.push_back(sample);
        if (options.stop_when && options.stop_when(sample))
            break;
    }
    if (trace.samples.size() < 2 && trace.complete == false)
        throw Error(trace.stop_reason, "trace of " + s.str() + " has fewer than two samples");
    return trace;
}

using qcx = Ops<__float128>::cx;

// Parameters are kept in quad: near a parabolic landing point the slope of
// c -> g_c(t) - c grows like 1/t^2, and double rounding of c alone would
// exceed the residual tolerance.
struct ParameterState {
    double t = 0.0;
    qcx c{};
    bool has_prev = false;
    double t_prev = 0.0;
    qcx c_prev{};
};

} // namespace

std::vector<double> potential_grid(double t_lo, double t_hi, double resolution)
{
    check_range(t_lo, t_hi);
    if (!(resolution > 0))
        throw Error(ErrorCode::Precondition, "resolution must be positive");
    const double ratio = std::pow(0.9, 1.0 / resolution);
    std::vector<double> grid{t_hi};
    double t = t_hi;
    while (t > t_lo) {
        t = t > 5 ? std::max(t - 1.0 / resolution, 5.0) : t * ratio;
        if (t <= t_lo * (1 + 1e-12))
            t = t_lo;
        grid.push_back(t);
    }
    return grid;
}

double RayTrace::max_residual() const
{
    double m = 0.0;
    for (const auto& s : samples)
        m = std::max(m, s.residual);
    return m;
}

RayTrace trace_dynamic_ray(cplx c, const ExternalAddress& s, double t_lo, double t_hi,
                           const TraceOptions& options)
{
    check_range(t_lo, t_hi);
    if (s.alphabet().cyclic())
        throw Error(ErrorCode::Precondition, "rays are traced for exponential addresses only");
    const auto grid = grid_for(t_lo, t_hi, options);
    return options.high_precision ? dynamic_trace<__float128>(c, s, grid, options)
                                  : dynamic_trace<double>(c, s, grid, options);
}

RayTrace trace_parameter_ray(const ExternalAddress& s, double t_lo, double t_hi,
                             const TraceOptions& options)
{
    check_range(t_lo, t_hi);
    if (s.alphabet().cyclic())
        throw Error(ErrorCode::Precondition, "rays are traced for exponential addresses only");
    const auto grid = grid_for(t_lo, t_hi, options);
    const PullbackSettings settings = settings_from(options);

    RayTrace trace;
    trace.kind = RayKind::Parameter;
    trace.address = s;

    BranchReference reference, scratch;
    ParameterState state;
    ErrorCode failure = ErrorCode::NewtonDivergence;
    double accepted_residual = 0.0;

    // Newton runs in double; deep pullbacks (small t) are then polished in
    // quad, where double rounding is comparable to the tolerance.
    constexpr std::size_t kQuadDepth = 1500;
    PullbackSettings with_slope = settings;
    with_slope.derivative = true;
    struct Eval {
        qcx h;
        cplx slope;
        std::size_t depth;
        double worst_jump;
        double closest_singular;
        bool too_deep;
    };
    auto eval_double = [&](const qcx& c, double t, const BranchReference* ref,
                           BranchReference* rec) {
        const cplx cd = to_cplx<__float128>(c);
        const auto p = kernel::pull_back<double>(cd, s, t, 0, 0, ref, rec, with_slope);
        return Eval{from_cplx<__float128>(p.z - cd), p.dz - 1.0, p.depth, p.worst_jump,
                    p.closest_singular, p.too_deep};
    };
    auto eval_quad = [&](const qcx& c, double t, const BranchReference* ref,
                         BranchReference* rec) {
        const auto q = kernel::pull_back<__float128>(c, s, static_cast<__float128>(t), 0, 0, ref,
                                                     rec, with_slope);
        return Eval{q.z - c, to_cplx<__float128>(q.dz) - 1.0, q.depth, q.worst_jump, q.closest_singular, q.too_deep};
    };
    auto finite = [](const qcx& z) {
        return std::isfinite(static_cast<double>(__real__ z)) &&
               std::isfinite(static_cast<double>(__imag__ z));
    };

    auto attempt = [&](double t) -> int {
        const bool have_ref = !reference.empty();
        const BranchReference* ref = have_ref ? &reference : nullptr;
        qcx c = state.c;
        if (state.has_prev && state.t_prev != state.t)
            c += (state.c - state.c_prev) *
                 static_cast<__float128>((t - state.t) / (state.t - state.t_prev));
        if (!have_ref)
            c = from_cplx<__float128>(cplx(t, kTwoPi * s.symbol(0)));
        bool deep = false;
        for (int it = 0; it < 60; ++it) {
            const Eval g = eval_double(c, t, ref, nullptr);
            if (g.too_deep) {
                failure = ErrorCode::ResourceBound;
                return -1;
            }
            if (!finite(g.h))
                break;
            deep = g.depth > kQuadDepth;
            cplx dc = -to_cplx<__float128>(g.h) / g.slope;
            const double scale = 1 + std::abs(to_cplx<__float128>(c));
            if (std::abs(dc) > 0.25 * scale)
                dc *= 0.25 * scale / std::abs(dc);
            c += from_cplx<__float128>(dc);
            if (std::abs(dc) < 1e-14 * scale)
                break;
        }
        // High-precision traces are also polished when shallow, so rays whose
        // addresses first differ in the second entry stay distinguishable.
        const bool quad = deep || options.high_precision;
        const double target = deep ? 1e-3 * options.tol
                                   : 1e-28 * (1 + std::abs(to_cplx<__float128>(c)));
        Eval final_eval = quad ? eval_quad(c, t, ref, nullptr) : eval_double(c, t, ref, nullptr);
        for (int it = 0; quad && it < 4 && finite(final_eval.h); ++it) {
            if (std::abs(to_cplx<__float128>(final_eval.h)) < target)
                break;
            c -= from_cplx<__float128>(to_cplx<__float128>(final_eval.h) / final_eval.slope);
            final_eval = eval_quad(c, t, ref, nullptr);
        }
        // Record the branch reference from the accepted evaluation.
        if (quad)
            kernel::pull_back<__float128>(c, s, static_cast<__float128>(t), 0, 0, ref, &scratch,
                                          settings);
        else
            kernel::pull_back<double>(to_cplx<__float128>(c), s, t, 0, 0, ref, &scratch,
                                      settings);
        const double residual = static_cast<double>(Ops<__float128>::abs(final_eval.h));
        if (!std::isfinite(residual) || residual > options.tol ||
            final_eval.worst_jump > options.max_jump) {
            failure = ErrorCode::NewtonDivergence;
            return 0;
        }
        std::swap(reference, scratch);
        state.has_prev = have_ref;
        state.t_prev = state.t;
        state.c_prev = state.c;
        state.t = t;
        state.c = c;
        accepted_residual = residual;
        return 1;
    };

    Marcher marcher(options);
    double current = std::max(grid.front(), options.warm_start);
    if (attempt(current) <= 0)
        throw Error(failure, "cannot start the parameter ray " + s.str());
    for (double t : potential_grid(grid.front(), current, 1.0)) {
        if (t >= current)
            continue;
        if (!marcher.advance(current, t, attempt))
            throw Error(failure, "warm-up of parameter ray " + s.str() + " failed near t=" +
                                     std::to_string(t));
        current = t;
    }
    for (double t : grid) {
        if (t < current && !marcher.advance(current, t, attempt)) {
            trace.complete = false;
            trace.stop_reason = failure;
            trace.note = "Newton continuation stopped before t=" + std::to_string(t);
            break;
        }
        current = t;
        TraceSample sample;
        sample.t = t;
        sample.z = to_cplx<__float128>(state.c);
        sample.tail = to_cplx<__float128>(state.c - from_cplx<__float128>(sample.z));
        sample.residual = accepted_residual;
        trace.samples.push_back(sample);
        if (options.stop_when && options.stop_when(sample))
            break;
    }
    if (trace.samples.size() < 2 && !trace.complete)
        throw Error(trace.stop_reason, "parameter ray " + s.str() + " has fewer than two samples");
    return trace;
}

double functional_residual(cplx c, const TraceSample& z, const TraceSample& w)
{
    using O = Ops<__float128>;
    const auto zq = from_cplx<__float128>(z.z) + from_cplx<__float128>(z.tail);
    const auto wq = from_cplx<__float128>(w.z) + from_cplx<__float128>(w.tail);
    return static_cast<double>(O::abs(O::exp(zq) + from_cplx<__float128>(c) - wq));
}

RayTrace refine_trace(const RayTrace& trace, double tol, const TraceOptions& options,
                      int max_rounds)
{
    auto chord_gap = [](cplx p, cplx a, cplx b) {
        const cplx d = b - a;
        const double len2 = std::norm(d);
        if (len2 == 0)
            return std::abs(p - a);
        const double u = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
        return std::abs(a + u * d - p);
    };
    RayTrace out = trace;
    if (out.samples.size() < 2)
        return out;
    std::vector<bool> settled(out.samples.size() - 1, false);
    for (int round = 0; round < max_rounds; ++round) {
        const auto& s = out.samples;
        std::vector<double> grid;
        std::vector<bool> split(settled.size(), false);
        for (std::size_t i = 0; i < s.size(); ++i) {
            grid.push_back(s[i].t);
            if (i + 1 < s.size() && !settled[i]) {
                const double mid = midpoint(s[i].t, s[i + 1].t);
                if (mid < s[i].t && mid > s[i + 1].t) {
                    grid.push_back(mid);
                    split[i] = true;
                }
            }
        }
        if (grid.size() == s.size())
            break;
        TraceOptions o = options;
        o.potentials = grid;
        o.stop_when = nullptr;
        o.lifts = trace.lifts;
        const RayTrace fine =
            trace.kind == RayKind::Dynamic
                ? trace_dynamic_ray(trace.c, trace.address, grid.back(), grid.front(), o)
                : trace_parameter_ray(trace.address, grid.back(), grid.front(), o);
        if (fine.samples.size() != grid.size())
            break;
        std::vector<bool> next;
        for (std::size_t i = 0, k = 0; i < settled.size(); ++i) {
            if (!split[i]) {
                next.push_back(true);
                k += 1;
                continue;
            }
            const auto& f = fine.samples;
            const bool flat = chord_gap(f[k + 1].z, f[k].z, f[k + 2].z) < tol;
            next.push_back(flat);
            next.push_back(flat);
            k += 2;
        }
        out.samples = fine.samples;
        settled = std::move(next);
    }
    return out;
}

bool verify_landing(const RayTrace& trace, cplx p, double tol)
{
    const std::size_t n = trace.samples.size();
    if (n < 4)
        return false;
    const std::size_t tail = std::max<std::size_t>(2, (n + 3) / 4);
    // Once converged the distance jitters at rounding level; that is not a retreat.
    const double noise = 64 * std::numeric_limits<double>::epsilon() * (1 + std::abs(p));
    double previous = std::abs(trace.samples[n - tail].z - p);
    for (std::size_t i = n - tail + 1; i < n; ++i) {
        const double d = std::abs(trace.samples[i].z - p);
        if (d > previous && d > noise)
            return false;
        previous = d;
    }
    return previous < tol;
}

double distance_to_trace(const RayTrace& trace, cplx p)
{
    double best = std::numeric_limits<double>::infinity();
    const auto& s = trace.samples;
    for (std::size_t i = 0; i < s.size(); ++i) {
        best = std::min(best, std::abs(s[i].z - p));
        if (i + 1 == s.size())
            break;
        const cplx a = s[i].z, d = s[i + 1].z - s[i].z;
        const double len2 = std::norm(d);
        if (len2 == 0)
            continue;
        const double u = ((p - a) * std::conj(d)).real() / len2;
        if (u > 0 && u < 1)
            best = std::min(best, std::abs(a + u * d - p));
    }
    return best;
}

std::string format_complex(cplx z)
{
    std::ostringstream out;
    out << std::setprecision(17) << z.real() << (std::signbit(z.imag()) ? "-" : "+")
        << std::abs(z.imag()) << 'i';
    return out.str();
}

cplx parse_complex(const std::string& text)
{
    static const std::regex pair_form(R"(^\s*([-+]?[0-9.eE+-]+?)\s*[, ]\s*([-+]?[0-9.eE+-]+)\s*$)");
    static const std::regex algebraic(
        R"(^\s*([-+]?(?:[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?))?\s*(?:([-+])\s*((?:[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)?)\s*[ij])?\s*$)");
    std::smatch m;
    try {
        if (std::regex_match(text, m, pair_form))
            return {std::stod(m[1]), std::stod(m[2])};
        if (std::regex_match(text, m, algebraic) && (m[1].matched || m[2].matched)) {
            const double re = m[1].matched ? std::stod(m[1]) : 0.0;
            double im = 0.0;
            if (m[2].matched) {
                im = m[3].length() ? std::stod(m[3]) : 1.0;
                if (m[2] == "-")
                    im = -im;
            }
            return {re, im};
        }
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::Parse, "cannot read complex number \"" + text + "\"");
}

void write_trace(std::ostream& out, const RayTrace& trace)
{
    out << "# kind: " << (trace.kind == RayKind::Dynamic ? "dynamic" : "parameter") << '\n';
    out << "# address: " << trace.address.str() << '\n';
    if (trace.kind == RayKind::Dynamic)
        out << "# parameter: " << format_complex(trace.c) << '\n';
    out << "# lifts: " << trace.lifts << '\n';
    out << "# complete: " << (trace.complete ? "yes" : "no") << '\n';
    if (!trace.complete)
        out << "# stop: " << to_string(trace.stop_reason) << '\n';
    if (!trace.note.empty())
        out << "# note: " << trace.note << '\n';
    out << "# columns: t re(z) im(z) residual\n";
    out << std::setprecision(17);
    for (const auto& s : trace.samples)
        out << s.t << ' ' << s.z.real() << ' ' << s.z.imag() << ' ' << s.residual << '\n';
}

RayTrace read_trace(std::istream& in)
{
    RayTrace trace;
    std::string line;
    bool have_address = false;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon == std::string::npos)
                continue;
            std::string key = line.substr(1, colon - 1);
            std::string value = line.substr(colon + 1);
            key.erase(0, key.find_first_not_of(' '));
            value.erase(0, value.find_first_not_of(' '));
            if (key == "kind")
                trace.kind = value == "parameter" ? RayKind::Parameter : RayKind::Dynamic;
            else if (key == "address") {
                trace.address = ExternalAddress::parse(value);
                have_address = true;
            } else if (key == "parameter")
                trace.c = parse_complex(value);
            else if (key == "lifts")
                trace.lifts = std::stoi(value);
            else if (key == "complete")
                trace.complete = value == "yes";
            else if (key == "note")
                trace.note = value;
            continue;
        }
        std::istringstream row(line);
        TraceSample s;
        double re = 0, im = 0;
        if (!(row >> s.t >> re >> im >> s.residual))
            throw Error(ErrorCode::Parse, "bad trace line: " + line);
        s.z = {re, im};
        trace.samples.push_back(s);
    }
    if (!have_address)
        throw Error(ErrorCode::Parse, "trace without address header");
    return trace;
}

void save_trace(const std::string& path, const RayTrace& trace)
{
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCode::IOFailure, "cannot write " + path);
    write_trace(out, trace);
    if (!out)
        throw Error(ErrorCode::IOFailure, "write to " + path + " failed");
}

RayTrace load_trace(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IOFailure, "cannot read " + path);
    return read_trace(in);
}

} // namespace expfiber
