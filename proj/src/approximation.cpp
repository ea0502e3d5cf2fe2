#include "expfiber/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <regex>

#include "expfiber/itinerary.hpp"

namespace expfiber {

namespace {

bool is_primitive(const std::vector<int>& w)
{
    const std::size_t n = w.size();
    for (std::size_t d = 1; d < n; ++d) {
        if (n % d != 0)
            continue;
        bool same = true;
        for (std::size_t i = 0; i < n && same; ++i)
            same = w[i] == w[(i + d) % n];
        if (same)
            return false;
    }
    return true;
}

// Advances `word` to the next word in lex order with word[i] in [lo[i], hi[i]]
// for i >= from. Returns false after the last one.
bool next_word(std::vector<int>& word, const std::vector<int>& lo, const std::vector<int>& hi,
               std::size_t from)
{
    for (std::size_t i = word.size(); i-- > from;) {
        if (word[i] < hi[i]) {
            ++word[i];
            for (std::size_t j = i + 1; j < word.size(); ++j)
                word[j] = lo[j];
            return true;
        }
    }
    return false;
}

// Given agreement on the first n symbols, dist(a, b) < 2^-n exactly when the
// sequences agree again somewhere later.
bool agree_later(const ExternalAddress& a, const ExternalAddress& b, std::size_t n)
{
    const std::size_t horizon =
        n + std::max(a.preperiod_length(), b.preperiod_length()) +
        std::lcm(a.period_length(), b.period_length());
    for (std::size_t k = n; k < horizon; ++k)
        if (a.symbol(k) == b.symbol(k))
            return true;
    return false;
}

struct PairSearch {
    const ExternalAddress& left;   // lower address approximates this one
    const ExternalAddress& right;  // upper address approximates this one
    bool outside;                  // true: lower < left and right < upper
    std::size_t depth;
    int lo, hi;
    int max_period;
    std::size_t budget;
    std::size_t tested = 0;

    bool placed(const ExternalAddress& lower, const ExternalAddress& upper) const
    {
        return outside ? less(lower, left) && less(right, upper)
                       : less(left, lower) && less(upper, right) && less(lower, upper);
    }

    std::optional<CharacteristicPair> run()
    {
        for (int p = static_cast<int>(depth) + 1; p <= max_period; ++p)
            if (auto found = at_period(static_cast<std::size_t>(p)))
                return found;
        return std::nullopt;
    }

    std::optional<CharacteristicPair> at_period(std::size_t p)
    {
        std::vector<int> a(p), a_lo(p, lo), a_hi(p, hi);
        for (std::size_t i = 0; i < depth; ++i)
            a[i] = a_lo[i] = a_hi[i] = left.symbol(i);
        for (std::size_t i = depth; i < p; ++i)
            a[i] = lo;
        for (std::size_t i = 0; i < depth; ++i)
            if (std::abs(left.symbol(i) - right.symbol(i)) > 1)
                return std::nullopt;

        do {
            if (!is_primitive(a))
                continue;
            const ExternalAddress lower = ExternalAddress::periodic(a, left.alphabet());
            if (!agree_later(lower, left, depth))
                continue;
            if (outside ? !less(lower, left) : !less(left, lower))
                continue;

            // Co-landing images share a symbol j and use only j and j + 1,
            // so the partner differs by at most one in every entry.
            std::vector<int> b(p), b_lo(p), b_hi(p);
            bool possible = true;
            for (std::size_t i = 0; i < p; ++i) {
                if (i < depth) {
                    b_lo[i] = b_hi[i] = right.symbol(i);
                    possible = possible && std::abs(b_lo[i] - a[i]) <= 1;
                } else {
                    b_lo[i] = std::max(lo, a[i] - 1);
                    b_hi[i] = std::min(hi, a[i] + 1);
                }
                b[i] = b_lo[i];
            }
            if (!possible)
                continue;
            do {
                if (!is_primitive(b))
                    continue;
                const ExternalAddress upper = ExternalAddress::periodic(b, left.alphabet());
                if (!placed(lower, upper) || !agree_later(upper, right, depth))
                    continue;
                if (++tested > budget)
                    throw Error(ErrorCode::SearchExhausted,
                                "pair search at depth " + std::to_string(depth) +
                                    " exceeded its budget of " + std::to_string(budget));
                if (is_characteristic_pair(lower, upper))
                    return CharacteristicPair{lower, upper, static_cast<int>(p)};
            } while (next_word(b, b_lo, b_hi, depth));
        } while (next_word(a, a_lo, a_hi, depth));
        return std::nullopt;
    }
};

Rational power_of_two(int exponent)
{
    Rational r = 1;
    for (int i = 0; i < exponent; ++i)
        r /= 2;
    return r;
}

} // namespace

MisiurewiczCombinatorics classify_misiurewicz(const ExternalAddress& s, int bound)
{
    if (s.is_periodic())
        throw Error(ErrorCode::Precondition, s.str() + " is not strictly preperiodic");
    if (bound < s.max_abs_entry())
        throw Error(ErrorCode::Precondition, "entry bound smaller than the entries of " + s.str());
    const std::size_t k = s.preperiod_length(), m = s.period_length();
    const Itinerary target = itinerary(s, s);

    const double count = std::pow(2.0 * bound + 1, static_cast<double>(k + m));
    if (count > 5e7)
        throw Error(ErrorCode::ResourceBound, "classification would enumerate " +
                                                  std::to_string(count) + " addresses");

    MisiurewiczCombinatorics out;
    out.preperiod = static_cast<int>(k);
    out.period = static_cast<int>(m);
    std::vector<int> word(k + m, -bound), lo(k + m, -bound), hi(k + m, bound);
    do {
        std::vector<int> head(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(k));
        std::vector<int> cycle(word.begin() + static_cast<std::ptrdiff_t>(k), word.end());
        const ExternalAddress a(head, cycle, s.alphabet());
        if (a.preperiod_length() != k || a.period_length() != m)
            continue;
        try {
            if (itinerary(a, s) == target)
                out.addresses.push_back(a);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::BoundaryHit)
                throw;
        }
    } while (next_word(word, lo, hi, 0));
    std::sort(out.addresses.begin(), out.addresses.end(),
              [](const ExternalAddress& a, const ExternalAddress& b) { return less(a, b); });
    return out;
}

ApproximationResult approximate_misiurewicz(const MisiurewiczCombinatorics& m, int depth,
                                            const ApproximationOptions& options)
{
    if (depth < 1)
        throw Error(ErrorCode::Precondition, "epsilon must be 2^-N with N >= 1");
    if (m.addresses.empty())
        throw Error(ErrorCode::Precondition, "empty Misiurewicz combinatorics");
    int lo = m.addresses.front().min_entry(), hi = m.addresses.front().max_entry();
    for (const auto& a : m.addresses) {
        lo = std::min(lo, a.min_entry());
        hi = std::max(hi, a.max_entry());
    }
    lo -= options.entry_margin;
    hi += options.entry_margin;
    const int max_period = options.max_period > 0 ? options.max_period : 4 * depth;

    ApproximationResult out;
    out.depth = depth;
    out.epsilon = power_of_two(depth);
    auto search = [&](const ExternalAddress& left, const ExternalAddress& right, bool outside,
                      const std::string& what) {
        PairSearch s{left, right, outside, static_cast<std::size_t>(depth), lo, hi, max_period,
                     options.budget};
        auto found = s.run();
        if (!found)
            throw Error(ErrorCode::SearchExhausted,
                        "no " + what + " pair at depth " + std::to_string(depth) +
                            " up to period " + std::to_string(max_period));
        return std::make_pair(*found, PairDistance{dist(found->lower, left),
                                                   dist(found->upper, right)});
    };

    const auto& s = m.addresses;
    std::tie(out.external_pair, out.external_distance) =
        search(s.front(), s.back(), true, "external");
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        auto [pair, d] = search(s[i], s[i + 1], false, "internal");
        out.internal_pairs.push_back(pair);
        out.internal_distances.push_back(d);
    }
    return out;
}

int dyadic_depth(const std::string& text)
{
    static const std::regex power(R"(\s*2\s*\^\s*(?:\{\s*)?-\s*(\d+)\s*\}?\s*)");
    std::smatch match;
    if (std::regex_match(text, match, power))
        return std::stoi(match[1]);
    double value = 0;
    try {
        value = std::stod(text);
    } catch (const std::exception&) {
        throw Error(ErrorCode::Parse, "cannot read epsilon '" + text + "'");
    }
    for (int n = 1; n < 64; ++n)
        if (std::ldexp(1.0, -n) == value)
            return n;
    throw Error(ErrorCode::Precondition, "epsilon " + text + " is not 2^-N");
}

void write_pairs(std::ostream& out, const ApproximationResult& result)
{
    auto line = [&](const CharacteristicPair& p, const PairDistance& d) {
        out << "pair \"" << p.lower.str() << "\" \"" << p.upper.str()
            << "\" dist_lo=" << rational_str(d.lower) << " dist_hi=" << rational_str(d.upper)
            << " period=" << p.period << '\n';
    };
    line(result.external_pair, result.external_distance);
    for (std::size_t i = 0; i < result.internal_pairs.size(); ++i)
        line(result.internal_pairs[i], result.internal_distances[i]);
}

} // namespace expfiber
