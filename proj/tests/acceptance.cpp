// Acceptance run: one PASS/FAIL line per criterion, with the measured numbers.
//
// Criterion 1 cannot be met (see README); its FAIL is reported but listed
// in kKnownFailures, so only a regression elsewhere makes the run fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "expfiber/approximation.hpp"
#include "expfiber/itinerary.hpp"
#include "expfiber/portrait.hpp"
#include "expfiber/separation.hpp"
#include "expfiber/solvers.hpp"
#include "naive_grouper.hpp"
#include "support.hpp"

using namespace expfiber;

namespace {

const std::set<int> kKnownFailures{1};

ExternalAddress A(const char* text) { return ExternalAddress::parse(text); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, format, x);
    return buf;
}

Rational two_to_minus(int n)
{
    Rational r = 1;
    for (int i = 0; i < n; ++i)
        r /= 2;
    return r;
}

const MisiurewiczCombinatorics& reference_combinatorics()
{
    static const MisiurewiczCombinatorics m = classify_misiurewicz(A("1 0 0 | 0 0 1"), 3);
    return m;
}

const SpecialParameter& reference_parameter()
{
    static const SpecialParameter p = solve_misiurewicz(reference_combinatorics().addresses.front());
    return p;
}

const std::vector<int> kDepths{4, 6, 8};

const std::vector<ApproximationResult>& approximations()
{
    static const std::vector<ApproximationResult> all = [] {
        std::vector<ApproximationResult> out;
        for (int n : kDepths)
            out.push_back(approximate_misiurewicz(reference_combinatorics(), n));
        return out;
    }();
    return all;
}

std::vector<CharacteristicPair> pairs_of(const ApproximationResult& r)
{
    std::vector<CharacteristicPair> out{r.external_pair};
    out.insert(out.end(), r.internal_pairs.begin(), r.internal_pairs.end());
    return out;
}

// Periodic addresses with entries in [-1, 1] and period at most 4.
std::vector<ExternalAddress> small_periodic()
{
    std::vector<ExternalAddress> out;
    for (int p = 1; p <= 4; ++p)
        for (const auto& a : periodic_addresses(p, -1, 1))
            out.push_back(a);
    return out;
}

// Addresses with distinct first two entries in [-2, 2]; later entries move a
// ray at potential 50 by about exp(-F(50)), far below any float resolution.
std::vector<ExternalAddress> vertical_sample()
{
    testing::Gen gen(404);
    std::vector<ExternalAddress> out;
    std::set<std::pair<int, int>> prefixes;
    while (out.size() < 20) {
        const auto s = gen.periodic(2, 4);
        if (prefixes.insert({s.symbol(0), s.symbol(1)}).second)
            out.push_back(s);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return less(a, b); });
    return out;
}

TraceSample at_potential(const RayTrace& trace, double t)
{
    for (const auto& s : trace.samples)
        if (std::abs(s.t - t) < 1e-12)
            return s;
    throw Error(ErrorCode::Precondition, "potential missing from trace");
}

Outcome reference_parameter_search()
{
    const cplx target(1.81507, 4.70945);
    double best = 1e300;
    ExternalAddress best_address;
    int solved = 0, failed = 0;
    for (int k = 1; k <= 3; ++k)
        for (int m = 1; m <= 3; ++m) {
            std::vector<int> w(static_cast<std::size_t>(k + m), 0);
            while (true) {
                const ExternalAddress a(std::vector<int>(w.begin(), w.begin() + k),
                                        std::vector<int>(w.begin() + k, w.end()));
                if (static_cast<int>(a.preperiod_length()) == k &&
                    static_cast<int>(a.period_length()) == m) {
                    try {
                        const double d = std::abs(solve_misiurewicz(a).c - target);
                        ++solved;
                        if (d < best) {
                            best = d;
                            best_address = a;
                        }
                    } catch (const Error&) {
                        ++failed;
                    }
                }
                int i = k + m - 1;
                while (i >= 0 && w[static_cast<std::size_t>(i)] == 2)
                    w[static_cast<std::size_t>(i--)] = 0;
                if (i < 0)
                    break;
                ++w[static_cast<std::size_t>(i)];
            }
        }
    const std::size_t q = classify_misiurewicz(best_address, 3).count();
    std::ostringstream d;
    d << "nearest " << best_address.str() << " at distance " << fmt("%.4g", best)
      << " (need < 1e-3), q = " << q << ", " << solved << " solved, " << failed << " unsolved";
    return {best < 1e-3 && q == 2, d.str()};
}

// An independent trace of the shifted address at potentials F(t), which the
// tracer evaluates itself so they are not rounded to double first.
double independent_residual(cplx c, const ExternalAddress& s, const std::vector<double>& ts)
{
    TraceOptions here, there;
    here.potentials = ts;
    there.potentials = ts;
    there.lifts = 1;
    const RayTrace a = trace_dynamic_ray(c, s, ts.back(), ts.front(), here);
    const RayTrace b = trace_dynamic_ray(c, shift(s), ts.back(), ts.front(), there);
    if (a.samples.size() != ts.size() || b.samples.size() != ts.size())
        return 1e300;
    double worst = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i)
        worst = std::max(worst, functional_residual(c, a.samples[i], b.samples[i]));
    return worst;
}

Outcome functional_equation()
{
    testing::Gen gen(202);
    const auto grid = potential_grid(0.5, 30.0);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i)
        worst = std::max(worst, independent_residual(-1.0, gen.periodic(1, 4), grid));
    return {worst < 1e-8, "max residual " + fmt("%.3g", worst) + " over 10 rays (need < 1e-8)"};
}

Outcome asymptotics()
{
    double worst = 0.0;
    std::vector<ExternalAddress> sample = vertical_sample();
    testing::Gen gen(202);
    for (int i = 0; i < 10; ++i)
        sample.push_back(gen.periodic(1, 4));
    for (const auto& s : sample) {
        const cplx model(50.0, kTwoPi * s.symbol(0));
        const RayTrace d = trace_dynamic_ray(-1.0, s, 1.0, 50.0);
        const RayTrace p = trace_parameter_ray(s, 1.0, 50.0);
        worst = std::max(worst, std::abs(at_potential(d, 50.0).z - model));
        worst = std::max(worst, std::abs(at_potential(p, 50.0).z - model));
    }
    return {worst < 1e-2, "max |z - (50 + 2 pi i s_1)| = " + fmt("%.3g", worst) + " over " +
                              std::to_string(2 * sample.size()) + " rays (need < 1e-2)"};
}

Outcome vertical_order()
{
    TraceOptions o;
    o.potentials = {50.0};
    using Height = std::pair<double, double>;
    Height dyn{-1e300, 0.0}, par{-1e300, 0.0};
    int dyn_bad = 0, par_bad = 0;
    for (const auto& s : vertical_sample()) {
        const TraceSample d = trace_dynamic_ray(-1.0, s, 50.0, 50.0, o).last();
        const TraceSample p = trace_parameter_ray(s, 50.0, 50.0, o).last();
        const Height hd{d.z.imag(), d.tail.imag()}, hp{p.z.imag(), p.tail.imag()};
        dyn_bad += !(hd > dyn);
        par_bad += !(hp > par);
        dyn = hd;
        par = hp;
    }
    return {dyn_bad == 0 && par_bad == 0, "20 addresses, order breaks: dynamic " +
                                              std::to_string(dyn_bad) + ", parameter " +
                                              std::to_string(par_bad)};
}

Outcome portrait_oracle()
{
    const ExternalAddress base = reference_combinatorics().addresses.back();
    int portraits = 0, law_breaks = 0, linked = 0, mismatches = 0;
    for (int n = 1; n <= 4; ++n) {
        std::set<testing::NaivePortrait> ours;
        for (const auto& p : portrait_classes(n, 1, base)) {
            ++portraits;
            law_breaks += !portrait_violations(p).empty();
            for (std::size_t i = 0; i < p.classes.size(); ++i)
                for (std::size_t j = i + 1; j < p.classes.size(); ++j)
                    linked += !unlinked(p.classes[i], p.classes[j]);
            testing::NaivePortrait named;
            for (const auto& cls : p.classes) {
                std::set<std::string> s;
                for (const auto& a : cls)
                    s.insert(a.str());
                named.insert(s);
            }
            ours.insert(named);
        }
        mismatches += ours != testing::naive_portraits(n, 1, base);
    }
    std::ostringstream d;
    d << portraits << " portraits against base " << base.str() << ": " << law_breaks
      << " law violations, " << linked << " linked class pairs, " << mismatches
      << " periods differing from the naive grouper";
    return {portraits > 0 && law_breaks == 0 && linked == 0 && mismatches == 0, d.str()};
}

Outcome landing_type()
{
    const std::vector<cplx> params{-1.0, -2.0, std::log(cplx(0.0, 0.5)) - cplx(0.0, 0.5)};
    double smallest = 1e300;
    int solves = 0, failures = 0;
    for (const cplx c : params)
        for (const auto& s : small_periodic()) {
            try {
                smallest = std::min(smallest, std::abs(find_periodic_point(c, s).multiplier));
                ++solves;
            } catch (const Error&) {
                ++failures;
            }
        }
    const PeriodicPoint zero = find_periodic_point(-1.0, A("| 0"));
    const double lambda_gap = std::abs(zero.multiplier - 1.0);
    std::ostringstream d;
    d << solves << " solves, " << failures << " failures, min |multiplier| "
      << fmt("%.6g", smallest) << " (need >= 1 - 1e-6); c = -1, ray 0: |z| = "
      << fmt("%.2g", std::abs(zero.z)) << ", |multiplier - 1| = " << fmt("%.2g", lambda_gap)
      << " (need < 1e-9)";
    return {failures == 0 && smallest >= 1 - 1e-6 && lambda_gap < 1e-9 && std::abs(zero.z) < 1e-9,
            d.str()};
}

Rational achieved(const ApproximationResult& r)
{
    Rational worst = std::max(r.external_distance.lower, r.external_distance.upper);
    for (const auto& d : r.internal_distances)
        worst = std::max({worst, d.lower, d.upper});
    return worst;
}

Outcome approximation()
{
    const auto& s = reference_combinatorics().addresses;
    int broken = 0;
    std::ostringstream d;
    d << "achieved dist";
    Rational previous = 2;
    bool monotone = true;
    for (std::size_t k = 0; k < kDepths.size(); ++k) {
        const auto& r = approximations()[k];
        const Rational eps = two_to_minus(kDepths[k]);
        const auto& ext = r.external_pair;
        broken += !(less(ext.lower, s.front()) && less(s.back(), ext.upper));
        broken += !(dist(ext.lower, s.front()) < eps && dist(ext.upper, s.back()) < eps);
        for (std::size_t i = 0; i < r.internal_pairs.size(); ++i) {
            const auto& p = r.internal_pairs[i];
            broken += !(less(s[i], p.lower) && less(p.lower, p.upper) && less(p.upper, s[i + 1]));
            broken += !(dist(p.lower, s[i]) < eps && dist(p.upper, s[i + 1]) < eps);
        }
        broken += r.internal_pairs.size() + 1 != s.size();
        for (const auto& p : pairs_of(r))
            broken += !is_characteristic_pair(p.lower, p.upper);
        const Rational a = achieved(r);
        monotone = monotone && a <= previous;
        previous = a;
        d << " " << a << " (2^-" << kDepths[k] << ")";
    }
    d << "; " << broken << " constraint violations";
    return {broken == 0 && monotone, d.str()};
}

Outcome co_landing()
{
    SolverOptions o;
    o.landing_potential = 1e-5;
    o.landing_tol = 1e-4;
    int roots = 0, failures = 0;
    double worst_multiplier = 0.0;
    std::ostringstream notes;
    for (const auto& r : approximations())
        for (const auto& p : pairs_of(r)) {
            try {
                const SpecialParameter root = find_parabolic_root(p, o);
                ++roots;
                bool lands = root.traces.size() == 2;
                for (const auto& t : root.traces)
                    lands = lands && verify_landing(t, root.c, 1e-4);
                failures += !lands;
                worst_multiplier = std::max(worst_multiplier, std::abs(root.multiplier - 1.0));
            } catch (const Error& e) {
                ++failures;
                notes << "; " << e.what();
            }
        }
    std::ostringstream d;
    d << roots << " roots, " << failures << " failures, max |multiplier - 1| "
      << fmt("%.2g", worst_multiplier) << " (need < 1e-6)" << notes.str();
    return {failures == 0 && roots > 0 && worst_multiplier < 1e-6, d.str()};
}

Outcome fiber_separation()
{
    const cplx c0 = reference_parameter().c;
    TraceOptions o;
    o.potentials = {3.0};
    const cplx on_ray = trace_parameter_ray(reference_combinatorics().addresses.front(), 3.0, 3.0, o).last().z;
    const std::vector<cplx> points{0.0, c0 + 0.005, c0 + cplx(0.0, 0.005), cplx(1.8323, 4.7150),
                                   -1.0};
    std::ostringstream d;
    bool ok = true;
    for (double resolution : {1.0, 2.0}) {
        SeparationOptions s;
        s.curve.solver.trace.resolution = resolution;
        d << (resolution == 1.0 ? "" : "; doubled:");
        for (const cplx c : points) {
            const auto cert = verify_fiber_separation(reference_combinatorics(), c, s);
            ok = ok && cert.verdict == Verdict::Separated;
            d << " " << to_string(cert.verdict) << "@N=" << cert.depth;
        }
        const auto cert = verify_fiber_separation(reference_combinatorics(), on_ray, s);
        ok = ok && cert.verdict == Verdict::OnRay;
        d << " " << to_string(cert.verdict);
    }
    return {ok, "five points then a ray point:" + d.str()};
}

Outcome embedding()
{
    testing::Gen gen(1010);
    int mismatches = 0;
    for (int i = 0; i < 50; ++i) {
        const int n = gen.integer(1, 2);
        const int degree = 2 * n + 3;
        const auto base = gen.preperiodic(n, 2, 3);
        const auto a = gen.address(n, 2, 3), b = gen.address(n, 2, 3);
        const auto ea = embed(a, degree), eb = embed(b, degree), ebase = embed(base, degree);
        for (const auto* pr : {&a, &b}) {
            const Itinerary plain = itinerary(*pr, base);
            const Itinerary lifted = itinerary(embed(*pr, degree), ebase);
            mismatches += plain.defined != lifted.defined || plain.entries != lifted.entries;
        }
        auto verdict = [](auto&& call) -> std::string {
            try {
                return call() ? "same" : "different";
            } catch (const Error& e) {
                return to_string(e.code());
            }
        };
        mismatches += verdict([&] { return same_landing_class(a, b, base); }) !=
                      verdict([&] { return same_landing_class(ea, eb, ebase); });
    }
    return {mismatches == 0, "50 pairs, " + std::to_string(mismatches) + " mismatches"};
}

Outcome dynamical_shadow()
{
    const SpecialParameter& m = reference_parameter();
    const int k = reference_combinatorics().preperiod;
    const cplx target = iterate(m.c, m.c, k).value;
    std::ostringstream d;
    d << "max distance to the postsingular point";
    double previous = 1e300;
    bool decreasing = true;
    for (std::size_t i = 0; i < kDepths.size(); ++i) {
        double worst = 0.0;
        for (const auto& p : pairs_of(approximations()[i]))
            for (const auto* a : {&p.lower, &p.upper})
                worst = std::max(worst,
                                 std::abs(find_periodic_point(m.c, shift(*a, k)).z - target));
        decreasing = decreasing && worst < previous;
        previous = worst;
        d << " " << fmt("%.3g", worst) << " (2^-" << kDepths[i] << ")";
    }
    return {decreasing, d.str()};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only;
    app.add_option("--only", only, "run just these criteria");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"reference parameter reproduction", reference_parameter_search},
        {"functional-equation residual", functional_equation},
        {"asymptotics at potential 50", asymptotics},
        {"vertical order", vertical_order},
        {"portrait oracle suite", portrait_oracle},
        {"landing type", landing_type},
        {"combinatorial approximation", approximation},
        {"co-landing of pairs", co_landing},
        {"fiber separation", fiber_separation},
        {"embedding consistency", embedding},
        {"dynamical-plane shadow", dynamical_shadow},
    };

    int unexpected = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end())
            continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome r;
        try {
            r = criteria[i].second();
        } catch (const std::exception& e) {
            r = {false, std::string("error: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool known = kKnownFailures.count(id) != 0;
        std::printf("criterion %2d %s%s: %s: %s [%.1fs]\n", id, r.pass ? "PASS" : "FAIL",
                    !r.pass && known ? " (known)" : "", criteria[i].first, r.detail.c_str(), secs);
        std::fflush(stdout);
        unexpected += !r.pass && !known;
    }
    return unexpected == 0 ? 0 : 1;
}
