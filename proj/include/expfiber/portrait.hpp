#pragma once

#include <string>
#include <vector>

#include "expfiber/address.hpp"

namespace expfiber {

struct OrbitPortrait {
    // classes[i] holds the addresses whose rays land at the i-th orbit point;
    // shift carries classes[i] onto classes[i + 1 mod n].
    std::vector<std::vector<ExternalAddress>> classes;
    int orbit_period = 0;
    int rays_per_point = 0;
    int address_period = 0;
};

struct PortraitOptions {
    int max_address_period = 4;
    std::size_t max_addresses = 2'000'000;
};

// All periodic addresses with entries in [-bound, bound] whose exact period is
// a multiple of orbit_period (up to max_address_period), grouped by itinerary
// relative to base and assembled into shift cycles of length orbit_period.
std::vector<OrbitPortrait> portrait_classes(int orbit_period, int bound,
                                            const ExternalAddress& base,
                                            const PortraitOptions& options = {});

// Periodic words of exact length `period` over [lo, hi], in lexicographic order.
std::vector<ExternalAddress> periodic_addresses(int period, int lo, int hi,
                                                Alphabet alphabet = Alphabet::exponential(),
                                                std::size_t limit = 2'000'000);

// True when b sits inside a single complementary arc of a.
bool unlinked(const std::vector<ExternalAddress>& a, const std::vector<ExternalAddress>& b);

// Human-readable list of violated portrait laws; empty when all hold.
std::vector<std::string> portrait_violations(const OrbitPortrait& portrait);

} // namespace expfiber
