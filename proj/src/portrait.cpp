#include "expfiber/portrait.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "expfiber/itinerary.hpp"

namespace expfiber {

namespace {

struct AddressLess {
    bool operator()(const ExternalAddress& a, const ExternalAddress& b) const { return less(a, b); }
};

bool is_primitive(const std::vector<int>& word)
{
    return ExternalAddress::periodic(word).period_length() == word.size();
}

} // namespace

std::vector<ExternalAddress> periodic_addresses(int period, int lo, int hi, Alphabet alphabet,
                                                std::size_t limit)
{
    if (period < 1 || lo > hi)
        throw Error(ErrorCode::Precondition, "empty enumeration range");
    std::vector<ExternalAddress> out;
    std::vector<int> word(static_cast<std::size_t>(period), lo);
    while (true) {
        if (is_primitive(word)) {
            if (out.size() >= limit)
                throw Error(ErrorCode::ResourceBound,
                            "more than " + std::to_string(limit) + " addresses");
            out.push_back(ExternalAddress::periodic(word, alphabet));
        }
        int pos = period - 1;
        while (pos >= 0 && word[static_cast<std::size_t>(pos)] == hi)
            word[static_cast<std::size_t>(pos--)] = lo;
        if (pos < 0)
            break;
        ++word[static_cast<std::size_t>(pos)];
    }
    return out;
}

std::vector<OrbitPortrait> portrait_classes(int orbit_period, int bound,
                                            const ExternalAddress& base,
                                            const PortraitOptions& options)
{
    if (orbit_period < 1 || bound < 0)
        throw Error(ErrorCode::Precondition, "orbit period must be >= 1 and bound >= 0");
    if (base.is_periodic())
        throw Error(ErrorCode::InvalidBase, "partition base must be strictly preperiodic");

    // Group every candidate by its itinerary; equal itineraries land together.
    std::map<std::pair<std::vector<int>, std::vector<int>>, std::vector<ExternalAddress>> groups;
    std::size_t total = 0;
    for (int p = orbit_period; p <= options.max_address_period; p += orbit_period) {
        auto batch = periodic_addresses(p, -bound, bound, base.alphabet(),
                                        options.max_addresses - total);
        total += batch.size();
        for (auto& a : batch) {
            const Itinerary it = itinerary(a, base);
            if (!it.defined)
                continue; // periodic addresses never reach a strictly preperiodic boundary
            groups[{it.entries->head, it.entries->cycle}].push_back(std::move(a));
        }
    }

    std::map<ExternalAddress, std::size_t, AddressLess> owner;
    std::vector<std::vector<ExternalAddress>> classes;
    for (auto& [key, members] : groups) {
        std::sort(members.begin(), members.end(), AddressLess{});
        for (const auto& a : members)
            owner[a] = classes.size();
        classes.push_back(members);
    }

    std::vector<OrbitPortrait> out;
    std::set<std::size_t> used;
    for (std::size_t start = 0; start < classes.size(); ++start) {
        if (used.count(start))
            continue;
        std::vector<std::size_t> cycle{start};
        bool closed = false;
        while (true) {
            const auto next = owner.find(shift(classes[cycle.back()].front()));
            if (next == owner.end())
                break;
            if (next->second == start) {
                closed = true;
                break;
            }
            if (std::find(cycle.begin(), cycle.end(), next->second) != cycle.end())
                break;
            cycle.push_back(next->second);
        }
        for (auto idx : cycle)
            used.insert(idx);
        if (!closed || static_cast<int>(cycle.size()) != orbit_period)
            continue;
        OrbitPortrait portrait;
        for (auto idx : cycle)
            portrait.classes.push_back(classes[idx]);
        portrait.orbit_period = orbit_period;
        portrait.rays_per_point = static_cast<int>(classes[start].size());
        portrait.address_period = static_cast<int>(classes[start].front().period_length());
        out.push_back(std::move(portrait));
    }
    return out;
}

bool unlinked(const std::vector<ExternalAddress>& a, const std::vector<ExternalAddress>& b)
{
    std::vector<ExternalAddress> sorted = a;
    std::sort(sorted.begin(), sorted.end(), AddressLess{});
    auto gap = [&](const ExternalAddress& x) {
        const auto below = std::lower_bound(sorted.begin(), sorted.end(), x, AddressLess{});
        return static_cast<std::size_t>(below - sorted.begin()) % sorted.size();
    };
    for (const auto& x : b)
        for (const auto& y : a)
            if (x == y)
                return false;
    for (const auto& x : b)
        if (gap(x) != gap(b.front()))
            return false;
    return true;
}

std::vector<std::string> portrait_violations(const OrbitPortrait& portrait)
{
    std::vector<std::string> issues;
    const auto& classes = portrait.classes;
    const std::size_t n = classes.size();
    if (static_cast<int>(n) != portrait.orbit_period)
        issues.push_back("class count differs from orbit period");
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<ExternalAddress> image;
        for (const auto& a : classes[i])
            image.push_back(shift(a));
        std::sort(image.begin(), image.end(), AddressLess{});
        if (image != classes[(i + 1) % n])
            issues.push_back("shift is not a bijection from class " + std::to_string(i));
        for (const auto& a : classes[i])
            if (static_cast<int>(a.period_length()) != portrait.address_period || !a.is_periodic())
                issues.push_back("address " + a.str() + " breaks the common period");
    }
    if (portrait.address_period % portrait.orbit_period != 0)
        issues.push_back("address period is not a multiple of the orbit period");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (!unlinked(classes[i], classes[j]))
                issues.push_back("classes " + std::to_string(i) + " and " + std::to_string(j) +
                                 " are linked");
    return issues;
}

} // namespace expfiber
