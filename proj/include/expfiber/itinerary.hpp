#pragma once

#include <optional>

#include "expfiber/address.hpp"

namespace expfiber {

// Sector labels of the shift orbit of an address relative to the partition
// cut out by the one-step preimages j*base of a strictly preperiodic base.
struct Itinerary {
    ExternalAddress base;
    bool defined = false;
    std::optional<EventualCycle> entries;

    bool operator==(const Itinerary& other) const
    {
        return base == other.base && defined == other.defined && entries == other.entries;
    }
};

// Label of the sector holding r. The sector of base is 0 and labels grow
// upward in the order of addresses.
int sector_index(const ExternalAddress& r, const ExternalAddress& base);

Itinerary itinerary(const ExternalAddress& r, const ExternalAddress& base);

bool same_landing_class(const ExternalAddress& r1, const ExternalAddress& r2,
                        const ExternalAddress& base);

} // namespace expfiber
