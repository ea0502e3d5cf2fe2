#include "expfiber/itinerary.hpp"

namespace expfiber {

namespace {

void require_base(const ExternalAddress& base)
{
    if (base.is_periodic())
        throw Error(ErrorCode::InvalidBase, "partition base " + base.str() +
                                                " must be strictly preperiodic");
}

// Index i of the interval (i*base, (i+1)*base) holding r; the cyclic
// alphabet closes the last interval around to the smallest symbol.
std::optional<int> raw_sector(const ExternalAddress& r, const ExternalAddress& base)
{
    const Order tail = compare(shift(r), base);
    if (tail == Order::Equal)
        return std::nullopt;
    int index = r.symbol(0) - (tail == Order::Less ? 1 : 0);
    if (r.alphabet().cyclic() && index < r.alphabet().min_symbol())
        index = r.alphabet().max_symbol();
    return index;
}

} // namespace

int sector_index(const ExternalAddress& r, const ExternalAddress& base)
{
    require_base(base);
    if (!(r.alphabet() == base.alphabet()))
        throw Error(ErrorCode::Precondition, "address and base use different alphabets");
    const auto index = raw_sector(r, base);
    if (!index)
        throw Error(ErrorCode::BoundaryHit,
                    r.str() + " is the boundary " + std::to_string(r.symbol(0)) + "*base");
    return *index - *raw_sector(base, base);
}

Itinerary itinerary(const ExternalAddress& r, const ExternalAddress& base)
{
    require_base(base);
    if (!(r.alphabet() == base.alphabet()))
        throw Error(ErrorCode::Precondition, "address and base use different alphabets");
    const int origin = *raw_sector(base, base);
    // The label of shift^k(r) depends only on shift^k(r) itself, so the
    // labels repeat with the same preperiod and period as r.
    std::vector<int> labels;
    const std::size_t states = r.preperiod_length() + r.period_length();
    ExternalAddress cur = r;
    for (std::size_t k = 0; k < states; ++k, cur = shift(cur)) {
        const auto index = raw_sector(cur, base);
        if (!index)
            return Itinerary{base, false, std::nullopt};
        labels.push_back(*index - origin);
    }
    std::vector<int> head(labels.begin(), labels.begin() + static_cast<long>(r.preperiod_length()));
    std::vector<int> cycle(labels.begin() + static_cast<long>(r.preperiod_length()), labels.end());
    return Itinerary{base, true, EventualCycle::normalized(std::move(head), std::move(cycle))};
}

bool same_landing_class(const ExternalAddress& r1, const ExternalAddress& r2,
                        const ExternalAddress& base)
{
    const Itinerary a = itinerary(r1, base);
    const Itinerary b = itinerary(r2, base);
    if (!a.defined || !b.defined)
        throw Error(ErrorCode::BoundaryOrbit,
                    (a.defined ? r2 : r1).str() + " meets a partition boundary");
    return a.entries == b.entries;
}

} // namespace expfiber
