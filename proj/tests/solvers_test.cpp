#include <doctest.h>

#include "expfiber/solvers.hpp"
#include "support.hpp"

using namespace expfiber;

namespace {

ExternalAddress A(const char* text) { return ExternalAddress::parse(text); }

ErrorCode code_of(auto&& call)
{
    try {
        call();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::Precondition;
}

// Reference values from an independent 40-digit mpmath computation.
const cplx kReferenceParameter(1.8313068821179549989, 4.7156158912771295298);
const cplx kParabolicRoot(1.8308361180550780912, 4.7117336878009115559);
const cplx kParabolicPoint(1.8307711185808333773, 4.7120258313368762011);
// Fixed point z = -1 - W_{-2}(-1/e) of exp(z) - 1 on the ray of 1̄.
const cplx kFixedPointOne(2.088843015613043856, 7.4614892856542545569);

} // namespace

TEST_CASE("orbit jet")
{
    const OrbitJet j = iterate(-1.0, 0.0, 5);
    CHECK(std::abs(j.value) < 1e-15);
    CHECK(std::abs(j.dz - 1.0) < 1e-15);
}

TEST_CASE("parabolic fixed point at c = -1")
{
    const PeriodicPoint p = find_periodic_point(-1.0, A("| 0"));
    CHECK(p.period == 1);
    CHECK(std::abs(p.z) < 1e-6);
    CHECK(std::abs(p.multiplier - 1.0) < 1e-9);
}

TEST_CASE("repelling fixed point on the ray of 1̄")
{
    const PeriodicPoint p = find_periodic_point(-1.0, A("| 1"));
    CHECK(std::abs(p.z - kFixedPointOne) < 1e-9);
    CHECK(std::abs(p.multiplier) == doctest::Approx(8.075566453).epsilon(1e-8));
    CHECK(p.residual < 1e-10);
}

TEST_CASE("periodic point solver rejects preperiodic addresses")
{
    CHECK(code_of([] { find_periodic_point(-1.0, A("2 | 0 1")); }) == ErrorCode::NotPeriodic);
}

TEST_CASE("misiurewicz parameter of the two co-landing addresses")
{
    const SpecialParameter m = solve_misiurewicz(A("1 0 0 | 0 0 1"));
    CHECK(m.kind == SpecialKind::Misiurewicz);
    CHECK(std::abs(m.c - kReferenceParameter) < 1e-9);
    CHECK(m.preperiod == 3);
    CHECK(std::abs(m.multiplier) > 1.0);
    // The partner address lands at the same parameter.
    const SpecialParameter partner = solve_misiurewicz(A("1 0 0 | -1 1 1"));
    CHECK(std::abs(partner.c - m.c) < 1e-9);
}

TEST_CASE("misiurewicz solver checks the declared lengths")
{
    CHECK(code_of([] { find_misiurewicz_parameter(A("1 0 0 | 0 0 1"), 2, 3); }) ==
          ErrorCode::Precondition);
    CHECK(code_of([] { find_misiurewicz_parameter(A("| 0 1"), 0, 2); }) ==
          ErrorCode::Precondition);
}

TEST_CASE("misiurewicz solution does not depend on the seed potential")
{
    const auto s = A("1 0 0 | 0 0 1");
    for (double seed : {0.2, 0.5, 1.0}) {
        CAPTURE(seed);
        SolverOptions o;
        o.seed_potential = seed;
        CHECK(std::abs(solve_misiurewicz(s, o).c - kReferenceParameter) < 1e-9);
    }
}

TEST_CASE("parabolic root of an approximating pair")
{
    const CharacteristicPair pair{A("| 1 0 0 -1 1"), A("| 1 0 0 0 0")};
    const SpecialParameter r = find_parabolic_root(pair);
    CHECK(r.kind == SpecialKind::Parabolic);
    CHECK(std::abs(r.c - kParabolicRoot) < 1e-8);
    CHECK(std::abs(r.orbit_point - kParabolicPoint) < 1e-6);
    CHECK(std::abs(r.multiplier - 1.0) < 1e-6);
    REQUIRE(r.traces.size() == 2);
}

TEST_CASE("parabolic root needs a characteristic pair")
{
    const CharacteristicPair bogus{A("| 0 1"), A("| 0 2")};
    CHECK(code_of([&] { find_parabolic_root(bogus); }) == ErrorCode::Precondition);
}

TEST_CASE("rotation numerator")
{
    CHECK(rotation_numerator({A("| 0 1"), A("| 1 0")}) == 1);
    const int r = rotation_numerator({A("| 0 0 1"), A("| 0 1 0")});
    CHECK((r == 1 || r == 2));
}

TEST_CASE("property: landing points are repelling or parabolic")
{
    testing::Gen gen(41);
    for (int i = 0; i < 12; ++i) {
        const auto s = gen.periodic(1, 3);
        CAPTURE(s.str());
        const PeriodicPoint p = find_periodic_point(-1.0, s);
        CHECK(std::abs(p.multiplier) >= 1.0 - 1e-6);
        CHECK(std::abs(iterate(-1.0, p.z, p.period).value - p.z) < 1e-8 * (1 + std::abs(p.z)));
    }
}
