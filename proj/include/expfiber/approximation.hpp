#pragma once

#include <iosfwd>
#include <vector>

#include "expfiber/characteristic.hpp"

namespace expfiber {

// The q addresses s_1 < ... < s_q landing together at a Misiurewicz parameter.
struct MisiurewiczCombinatorics {
    std::vector<ExternalAddress> addresses;
    int preperiod = 0;
    int period = 0;     // common address period, m * q

    std::size_t count() const { return addresses.size(); }
};

struct PairDistance {
    Rational lower;   // dist from the pair's lower address to its left target
    Rational upper;
};

struct ApproximationResult {
    CharacteristicPair external_pair;
    std::vector<CharacteristicPair> internal_pairs;
    int depth = 0;                 // epsilon = 2^-depth
    Rational epsilon;
    PairDistance external_distance;
    std::vector<PairDistance> internal_distances;
};

struct ApproximationOptions {
    int max_period = 0;             // 0 means 4 * depth
    int entry_margin = 1;           // entries range over [min - margin, max + margin] of M
    std::size_t budget = 50'000'000; // characteristic tests per pair search
};

// All strictly preperiodic addresses with entries in [-bound, bound] and the
// preperiod and period of s whose itinerary with base s equals that of s.
MisiurewiczCombinatorics classify_misiurewicz(const ExternalAddress& s, int bound);

ApproximationResult approximate_misiurewicz(const MisiurewiczCombinatorics& m, int depth,
                                            const ApproximationOptions& options = {});

// Parses "2^-N" or a plain positive dyadic like "0.0625" into N.
int dyadic_depth(const std::string& text);

void write_pairs(std::ostream& out, const ApproximationResult& result);

} // namespace expfiber
