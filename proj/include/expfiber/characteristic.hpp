#pragma once

#include <optional>
#include <vector>

#include "expfiber/address.hpp"

namespace expfiber {

struct CharacteristicPair {
    ExternalAddress lower;
    ExternalAddress upper;
    int period = 0;

    bool operator==(const CharacteristicPair&) const = default;
};

// Position of an address relative to the preimages of the pair (a, a').
// Boundary(j): x is j*a' or (j+1)*a, the two rays meeting at one preimage
// of the common landing point. Between(j): strictly inside that component.
// Tongue: inside some (j*a, j*a'), i.e. mapped into the pair's own sector.
struct PairLabel {
    enum Kind { Between, Boundary, Tongue } kind = Tongue;
    int symbol = 0;

    bool operator==(const PairLabel&) const = default;
};

PairLabel pair_label(const ExternalAddress& x, const ExternalAddress& lower,
                     const ExternalAddress& upper);

// Decides whether two periodic addresses of equal exact period bound the
// characteristic sector of an orbit portrait.
bool is_characteristic_pair(const ExternalAddress& lower, const ExternalAddress& upper);

// Throws unless the pair passes is_characteristic_pair.
CharacteristicPair make_characteristic_pair(const ExternalAddress& lower,
                                            const ExternalAddress& upper);

// Period n of the orbit the pair lands on; the portrait then has
// address_period / n rays per point.
int landing_orbit_period(const CharacteristicPair& pair);

// Brute-force partner search among addresses of the same period whose entries
// differ from `address` by at most one.
std::optional<CharacteristicPair> find_partner(const ExternalAddress& address,
                                               std::size_t budget = 5'000'000);

} // namespace expfiber
