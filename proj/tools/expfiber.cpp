#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "expfiber/approximation.hpp"
#include "expfiber/itinerary.hpp"
#include "expfiber/portrait.hpp"
#include "expfiber/render.hpp"
#include "expfiber/separation.hpp"

using namespace expfiber;

namespace {

constexpr int kExitPrecondition = 2;
constexpr int kExitSolver = 3;
constexpr int kExitInconclusive = 4;

int exit_code(ErrorCode code)
{
    switch (code) {
    case ErrorCode::SearchExhausted:
    case ErrorCode::BranchCut:
    case ErrorCode::Divergence:
    case ErrorCode::PostsingularCollision:
    case ErrorCode::NewtonDivergence:
    case ErrorCode::NotPeriodic:
    case ErrorCode::AttractingContradiction:
    case ErrorCode::WrongBasin:
    case ErrorCode::SeedDisagreement:
    case ErrorCode::NotSimple:
        return kExitSolver;
    default:
        return kExitPrecondition;
    }
}

std::string itinerary_str(const Itinerary& it)
{
    if (!it.defined || !it.entries)
        return "undefined";
    std::ostringstream out;
    for (int e : it.entries->head)
        out << e << ' ';
    out << '|';
    for (int e : it.entries->cycle)
        out << ' ' << e;
    return out.str();
}

// Settings shared by every numerical subcommand; they may also come from the
// config file as plain key=value lines.
struct Common {
    double tol = 1e-10;
    double trace_tol = 1e-8;
    double resolution = 1.0;
    double seed_potential = 0.05;
    double landing_potential = 1e-3;
    double landing_tol = 1e-2;
    double margin = 1e-4;

    SolverOptions solver() const
    {
        SolverOptions o;
        o.tol = tol;
        o.seed_potential = seed_potential;
        o.landing_potential = landing_potential;
        o.landing_tol = landing_tol;
        o.trace.tol = trace_tol;
        o.trace.resolution = resolution;
        return o;
    }

    TraceOptions trace() const
    {
        TraceOptions o;
        o.tol = trace_tol;
        o.resolution = resolution;
        return o;
    }
};

void emit_trace(const RayTrace& trace, const std::string& path)
{
    if (path.empty())
        write_trace(std::cout, trace);
    else
        save_trace(path, trace);
}

void print_special(const SpecialParameter& p)
{
    std::cout << "kind: " << (p.kind == SpecialKind::Misiurewicz ? "misiurewicz" : "parabolic")
              << '\n';
    std::cout << "c: " << format_complex(p.c) << '\n';
    if (p.kind == SpecialKind::Misiurewicz)
        std::cout << "preperiod: " << p.preperiod << '\n';
    else
        std::cout << "orbit_point: " << format_complex(p.orbit_point) << '\n';
    std::cout << "period: " << p.period << '\n';
    std::cout << "multiplier: " << format_complex(p.multiplier) << '\n';
    std::cout << "residual: " << p.residual << '\n';
    for (std::size_t i = 0; i < p.traces.size(); ++i)
        std::cout << "ray: " << p.witnesses[std::min(i, p.witnesses.size() - 1)].str()
                  << " ends " << format_complex(p.traces[i].last().z) << " at t="
                  << p.traces[i].last().t << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exponential parameter space: addresses, rays, and fiber separation"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value settings file; flags override it");
    app.allow_config_extras(CLI::config_extras_mode::ignore);

    Common common;
    app.add_option("--tol", common.tol, "Newton tolerance");
    app.add_option("--trace-tol", common.trace_tol, "ray tracing tolerance");
    app.add_option("--resolution", common.resolution, "trace samples per unit step");
    app.add_option("--seed-potential", common.seed_potential);
    app.add_option("--landing-potential", common.landing_potential);
    app.add_option("--landing-tol", common.landing_tol);
    app.add_option("--margin", common.margin, "on-curve and on-ray width");

    std::string address, other, base, lower, upper, output, c_text = "0";
    auto add_c = [&](CLI::App* sub) { sub->add_option("--c", c_text, "parameter, e.g. -1+0.5i"); };

    // addr
    auto* addr = app.add_subcommand("addr", "compare, dist, shift, itinerary, embed");
    std::string op = "compare";
    int times = 1, degree = 0;
    addr->add_option("--op", op)->check(
        CLI::IsMember({"compare", "dist", "shift", "itinerary", "embed", "project"}));
    addr->add_option("--address", address)->required();
    addr->add_option("--other", other);
    addr->add_option("--base", base);
    addr->add_option("--times", times);
    addr->add_option("--degree", degree);

    // portrait
    auto* portrait = app.add_subcommand("portrait", "orbit portraits by itinerary");
    int orbit_period = 1, bound = 1, max_period = 4;
    portrait->add_option("--base", base)->required();
    portrait->add_option("--orbit-period", orbit_period);
    portrait->add_option("--bound", bound);
    portrait->add_option("--max-period", max_period);

    // characteristic
    auto* characteristic = app.add_subcommand("characteristic", "test a pair or find a partner");
    characteristic->add_option("--lower", lower);
    characteristic->add_option("--upper", upper);
    characteristic->add_option("--address", address);

    // approx
    auto* approx = app.add_subcommand("approx", "approximating characteristic pairs");
    std::string epsilon = "2^-4";
    int classify_bound = 3;
    approx->add_option("--address", address, "any address of the Misiurewicz combinatorics")
        ->required();
    approx->add_option("--bound", classify_bound, "entry bound for the co-landing addresses");
    approx->add_option("--epsilon", epsilon);

    // rays
    auto* trace_ray = app.add_subcommand("trace-ray", "dynamic ray at a parameter");
    double t_lo = 0.5, t_hi = 40;
    add_c(trace_ray);
    trace_ray->add_option("--address", address)->required();
    trace_ray->add_option("--t-lo", t_lo);
    trace_ray->add_option("--t-hi", t_hi);
    trace_ray->add_option("--output", output);

    auto* trace_param = app.add_subcommand("trace-param-ray", "parameter ray");
    trace_param->add_option("--address", address)->required();
    trace_param->add_option("--t-lo", t_lo);
    trace_param->add_option("--t-hi", t_hi);
    trace_param->add_option("--output", output);

    // solvers
    auto* periodic = app.add_subcommand("periodic-point", "landing point of a periodic ray");
    add_c(periodic);
    periodic->add_option("--address", address)->required();
    periodic->add_option("--output", output, "trace file");

    auto* misiurewicz = app.add_subcommand("misiurewicz", "Misiurewicz parameter of an address");
    int preperiod = 0, period = 0;
    misiurewicz->add_option("--address", address)->required();
    misiurewicz->add_option("--preperiod", preperiod);
    misiurewicz->add_option("--period", period, "orbit period; all divisors are tried if omitted");

    auto* parabolic = app.add_subcommand("parabolic", "common root of a characteristic pair");
    parabolic->add_option("--lower", lower)->required();
    parabolic->add_option("--upper", upper)->required();

    // separate
    auto* separate = app.add_subcommand("separate", "separate c from a Misiurewicz parameter");
    SeparationOptions sep;
    std::string prefix;
    add_c(separate);
    separate->add_option("--address", address, "any address of the Misiurewicz combinatorics")
        ->required();
    separate->add_option("--bound", classify_bound);
    separate->add_option("--max-depth", sep.max_depth);
    separate->add_option("--first-depth", sep.first_depth);
    separate->add_option("--truncation", sep.truncation);
    separate->add_option("--trace-prefix", prefix, "save the curve's traces next to this path");

    // render
    auto* render_cmd = app.add_subcommand("render", "escape-time picture with ray overlays");
    std::string mode = "parameter", window_text;
    std::vector<std::string> overlays;
    RenderJob job;
    render_cmd->add_option("--mode", mode)->check(CLI::IsMember({"parameter", "dynamical"}));
    add_c(render_cmd);
    render_cmd->add_option("--window", window_text, "center_re,center_im,width,pixels_x,pixels_y")
        ->required();
    render_cmd->add_option("--max-iter", job.max_iter);
    render_cmd->add_option("--escape-real", job.escape_real);
    render_cmd->add_option("--overlay", overlays, "trace files to draw");
    render_cmd->add_option("--output", job.output)->required();

    for (auto* sub : app.get_subcommands({}))
        sub->configurable()->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitPrecondition;
    }

    std::cout << std::setprecision(17);
    try {
        const cplx c = parse_complex(c_text);
        const SolverOptions solver = common.solver();

        if (*addr) {
            const ExternalAddress a = ExternalAddress::parse(address);
            if (op == "compare") {
                std::cout << to_string(compare(a, ExternalAddress::parse(other))) << '\n';
            } else if (op == "dist") {
                std::cout << rational_str(dist(a, ExternalAddress::parse(other))) << '\n';
            } else if (op == "shift") {
                std::cout << shift(a, static_cast<std::size_t>(times)).str() << '\n';
            } else if (op == "itinerary") {
                std::cout << itinerary_str(itinerary(a, ExternalAddress::parse(base))) << '\n';
            } else if (op == "embed") {
                std::cout << embed(a, degree).str() << '\n';
            } else {
                std::cout << project(a).str() << '\n';
            }
        } else if (*portrait) {
            PortraitOptions o;
            o.max_address_period = max_period;
            const auto found =
                portrait_classes(orbit_period, bound, ExternalAddress::parse(base), o);
            for (const auto& p : found) {
                std::cout << "portrait orbit_period=" << p.orbit_period
                          << " rays_per_point=" << p.rays_per_point
                          << " address_period=" << p.address_period << '\n';
                for (const auto& cls : p.classes) {
                    std::cout << " ";
                    for (const auto& x : cls)
                        std::cout << " \"" << x.str() << '"';
                    std::cout << '\n';
                }
            }
        } else if (*characteristic) {
            if (!address.empty()) {
                const auto pair = find_partner(ExternalAddress::parse(address));
                if (!pair) {
                    std::cout << "partner: none\n";
                    return kExitSolver;
                }
                std::cout << "lower: " << pair->lower.str() << "\nupper: " << pair->upper.str()
                          << "\nperiod: " << pair->period << '\n';
            } else {
                const auto lo = ExternalAddress::parse(lower), hi = ExternalAddress::parse(upper);
                const bool ok = is_characteristic_pair(lo, hi);
                std::cout << "characteristic: " << (ok ? "yes" : "no") << '\n';
                if (ok) {
                    const CharacteristicPair p = make_characteristic_pair(lo, hi);
                    std::cout << "orbit_period: " << landing_orbit_period(p)
                              << "\nrotation: " << rotation_numerator(p) << '/'
                              << p.period / landing_orbit_period(p) << '\n';
                }
            }
        } else if (*approx) {
            const auto m = classify_misiurewicz(ExternalAddress::parse(address), classify_bound);
            for (const auto& s : m.addresses)
                std::cout << "misiurewicz \"" << s.str() << "\"\n";
            write_pairs(std::cout, approximate_misiurewicz(m, dyadic_depth(epsilon)));
        } else if (*trace_ray) {
            emit_trace(trace_dynamic_ray(c, ExternalAddress::parse(address), t_lo, t_hi,
                                         common.trace()),
                       output);
        } else if (*trace_param) {
            emit_trace(trace_parameter_ray(ExternalAddress::parse(address), t_lo, t_hi,
                                           common.trace()),
                       output);
        } else if (*periodic) {
            const PeriodicPoint p = find_periodic_point(c, ExternalAddress::parse(address), solver);
            std::cout << "z: " << format_complex(p.z) << "\nperiod: " << p.period
                      << "\nmultiplier: " << format_complex(p.multiplier)
                      << "\n|multiplier|: " << std::abs(p.multiplier)
                      << "\nresidual: " << p.residual << '\n';
            if (!output.empty())
                save_trace(output, p.trace);
        } else if (*misiurewicz) {
            const ExternalAddress s = ExternalAddress::parse(address);
            print_special(period > 0 ? find_misiurewicz_parameter(
                                           s, preperiod > 0 ? preperiod
                                                            : static_cast<int>(s.preperiod_length()),
                                           period, solver)
                                     : solve_misiurewicz(s, solver));
        } else if (*parabolic) {
            print_special(find_parabolic_root(
                make_characteristic_pair(ExternalAddress::parse(lower),
                                         ExternalAddress::parse(upper)),
                solver));
        } else if (*separate) {
            sep.curve.margin = common.margin;
            sep.curve.solver.tol = common.tol;
            sep.curve.solver.trace.tol = common.trace_tol;
            sep.curve.solver.trace.resolution = common.resolution;
            const auto m = classify_misiurewicz(ExternalAddress::parse(address), classify_bound);
            const SeparationCertificate cert = verify_fiber_separation(m, c, sep);
            write_certificate(std::cout, cert, prefix);
            if (cert.verdict == Verdict::Inconclusive)
                return kExitInconclusive;
        } else if (*render_cmd) {
            std::vector<std::string> parts;
            std::stringstream in(window_text);
            for (std::string part; std::getline(in, part, ',');)
                parts.push_back(part);
            if (parts.size() != 5)
                throw Error(ErrorCode::Parse, "window needs center_re,center_im,width,px,py");
            job.window = Window::with_width({std::stod(parts[0]), std::stod(parts[1])},
                                            std::stod(parts[2]), std::stoi(parts[3]),
                                            std::stoi(parts[4]));
            job.mode = mode == "parameter" ? RenderMode::Parameter : RenderMode::Dynamical;
            job.c = c;
            for (const auto& path : overlays) {
                job.overlays.push_back(load_trace(path));
                job.overlay_paths.push_back(path);
            }
            const RenderResult image = render(job);
            for (const auto& w : image.warnings)
                std::cerr << "warning: " << w << '\n';
            std::cout << "wrote " << job.output << " " << image.width << "x" << image.height
                      << '\n';
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: cannot parse a number: " << e.what() << '\n';
        return kExitPrecondition;
    }
    return 0;
}
