#include <doctest.h>

#include <sstream>

#include "expfiber/separation.hpp"

using namespace expfiber;

namespace {

ExternalAddress A(const char* text) { return ExternalAddress::parse(text); }

ExternalAddress negated(const ExternalAddress& s)
{
    auto flip = [](std::vector<int> w) {
        for (auto& x : w)
            x = -x;
        return w;
    };
    return {flip(s.preperiod()), flip(s.period())};
}

const MisiurewiczCombinatorics& reference_combinatorics()
{
    static const MisiurewiczCombinatorics m = classify_misiurewicz(A("1 0 0 | 0 0 1"), 3);
    return m;
}

// The external pair found at depth 2 for the combinatorics above.
const CharacteristicPair kOuter{A("| 1 0 -1 1"), A("| 1 0 0 0"), 4};

const SeparatingCurve& outer_curve()
{
    static const SeparatingCurve curve = build_curve(kOuter, 20.0);
    return curve;
}

const cplx kReferenceParameter(1.8313068821179549989, 4.7156158912771295298);

} // namespace

TEST_CASE("separating curve geometry")
{
    const auto& curve = outer_curve();
    REQUIRE(curve.traces.size() == 2);
    CHECK(curve.truncation == 20.0);
    CHECK(curve.polyline.size() > 10);
    CHECK(curve.traces[0].samples.front().t == doctest::Approx(20.0));
    CHECK(side_of(curve, curve.landing.c) == Side::OnCurve);
    CHECK(distance_to_curve(curve, curve.landing.c) < 1e-12);
    // The Misiurewicz parameter sits in the wake, the origin does not.
    CHECK(side_of(curve, kReferenceParameter) == Side::Inside);
    CHECK(side_of(curve, 0.0) == Side::Outside);
    CHECK(side_of(curve, cplx(20.0, 5 * kTwoPi)) == Side::Outside);
}

TEST_CASE("rays between the pair enter the wake")
{
    // Rays agreeing with the pair on three entries only part at small potential.
    TraceOptions o;
    o.potentials = {1.0, 0.5, 0.2, 0.1};
    for (const char* a : {"| 1 0 -1 2", "| 1 0 -1 5", "| 1 0 0 -5"}) {
        CAPTURE(a);
        const RayTrace r = trace_parameter_ray(A(a), 0.1, 1.0, o);
        REQUIRE(r.samples.size() == 4);
        for (const auto& s : r.samples)
            CHECK(side_of(outer_curve(), s.z) == Side::Inside);
    }
    const RayTrace outside = trace_parameter_ray(A("| 1 0 1"), 0.1, 1.0, o);
    for (const auto& s : outside.samples)
        CHECK(side_of(outer_curve(), s.z) == Side::Outside);
}

TEST_CASE("conjugate pair gives the mirrored wake")
{
    const CharacteristicPair mirror{negated(kOuter.upper), negated(kOuter.lower), 4};
    REQUIRE(is_characteristic_pair(mirror.lower, mirror.upper));
    const SeparatingCurve curve = build_curve(mirror, 20.0);
    CHECK(std::abs(curve.landing.c - std::conj(outer_curve().landing.c)) < 1e-8);
    for (cplx w : {kReferenceParameter, cplx(0.0), cplx(1.84, 4.73), cplx(5.0, 6.0)})
        CHECK(side_of(curve, std::conj(w)) == side_of(outer_curve(), w));
}

TEST_CASE("curve preconditions")
{
    auto code = [](double t) {
        try {
            build_curve(kOuter, t);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Divergence;
    };
    // Too low for the cut to be near the asymptote, or above the warm start.
    CHECK(code(1.0) == ErrorCode::Precondition);
    CHECK(code(100.0) == ErrorCode::Precondition);
}

TEST_CASE("the origin is separated from the reference parameter")
{
    const SeparationCertificate cert = verify_fiber_separation(reference_combinatorics(), 0.0);
    REQUIRE(cert.verdict == Verdict::Separated);
    CHECK(std::abs(cert.c0.c - kReferenceParameter) < 1e-9);
    REQUIRE(cert.curve);
    CHECK(cert.side_c0 != cert.side_c);
    CHECK(cert.side_c0 != Side::OnCurve);
    CHECK(cert.side_c != Side::OnCurve);
    CHECK(cert.clearance_c0 > cert.margin);
    CHECK(cert.clearance_c > cert.margin);
    CHECK(side_of(*cert.curve, cert.c0.c) == cert.side_c0);

    std::ostringstream out;
    write_certificate(out, cert);
    CHECK(out.str().find("verdict: Separated") != std::string::npos);
}

TEST_CASE("a point on a ray of the reference parameter")
{
    TraceOptions o;
    o.potentials = {3.0};
    const cplx on_ray = trace_parameter_ray(reference_combinatorics().addresses[0], 3.0, 3.0, o).last().z;
    const SeparationCertificate cert = verify_fiber_separation(reference_combinatorics(), on_ray);
    CHECK(cert.verdict == Verdict::OnRay);
    REQUIRE(cert.ray);
    CHECK(*cert.ray == reference_combinatorics().addresses[0]);
}

TEST_CASE("the Misiurewicz parameter itself is rejected")
{
    try {
        verify_fiber_separation(reference_combinatorics(), kReferenceParameter);
        FAIL("expected Precondition");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Precondition);
    }
}

TEST_CASE("a nearby point needs a deeper pair")
{
    // The pair's rays run together above potential 1, which must not read as a self-crossing.
    const SeparationCertificate cert =
        verify_fiber_separation(reference_combinatorics(), kReferenceParameter + 0.005);
    CHECK(cert.verdict == Verdict::Separated);
    CHECK(cert.depth == 5);
}
