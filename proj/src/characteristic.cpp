#include "expfiber/characteristic.hpp"

#include <numeric>

namespace expfiber {

namespace {

int successor(const Alphabet& alphabet, int j)
{
    if (alphabet.cyclic() && j == alphabet.max_symbol())
        return alphabet.min_symbol();
    return j + 1;
}

int predecessor(const Alphabet& alphabet, int j)
{
    if (alphabet.cyclic() && j == alphabet.min_symbol())
        return alphabet.max_symbol();
    return j - 1;
}

void check_pair_shape(const ExternalAddress& lower, const ExternalAddress& upper)
{
    if (!lower.is_periodic() || !upper.is_periodic())
        throw Error(ErrorCode::PeriodMismatch, "characteristic addresses must be periodic");
    if (lower.period_length() != upper.period_length())
        throw Error(ErrorCode::PeriodMismatch,
                    lower.str() + " and " + upper.str() + " have different periods");
    if (!less(lower, upper))
        throw Error(ErrorCode::Precondition, "pair must satisfy lower < upper");
}

} // namespace

PairLabel pair_label(const ExternalAddress& x, const ExternalAddress& lower,
                     const ExternalAddress& upper)
{
    const Alphabet& alphabet = x.alphabet();
    const int first = x.symbol(0);
    for (int j : {predecessor(alphabet, first), first}) {
        if (!alphabet.contains(j))
            continue;
        const ExternalAddress left = prepend(j, upper);
        const ExternalAddress right = prepend(successor(alphabet, j), lower);
        if (x == left || x == right)
            return {PairLabel::Boundary, j};
        if (between(left, x, right))
            return {PairLabel::Between, j};
    }
    return {PairLabel::Tongue, first};
}

bool is_characteristic_pair(const ExternalAddress& lower, const ExternalAddress& upper)
{
    check_pair_shape(lower, upper);
    const std::size_t period = lower.period_length();
    ExternalAddress a = lower, b = upper;
    for (std::size_t k = 0; k < period; ++k) {
        if (k > 0) {
            // No forward image may enter the open sector (lower, upper).
            if (less(lower, a) && less(a, upper))
                return false;
            if (less(lower, b) && less(b, upper))
                return false;
        }
        // Images that land together stay in one complementary component of
        // the preimage of the sector.
        const PairLabel la = pair_label(a, lower, upper);
        const PairLabel lb = pair_label(b, lower, upper);
        if (la.kind == PairLabel::Tongue || lb.kind == PairLabel::Tongue || la.symbol != lb.symbol)
            return false;
        a = shift(a);
        b = shift(b);
    }
    return true;
}

CharacteristicPair make_characteristic_pair(const ExternalAddress& lower,
                                            const ExternalAddress& upper)
{
    if (!is_characteristic_pair(lower, upper))
        throw Error(ErrorCode::Precondition,
                    "(" + lower.str() + ", " + upper.str() + ") is not characteristic");
    return {lower, upper, static_cast<int>(lower.period_length())};
}

int landing_orbit_period(const CharacteristicPair& pair)
{
    // A satellite pair lies on one cycle: upper = shift^m(lower) and the q
    // rays at the characteristic point are the shifts by multiples of
    // gcd(m, p). A primitive pair joins two cycles, one ray each per point.
    const std::size_t period = pair.lower.period_length();
    ExternalAddress cur = shift(pair.lower);
    for (std::size_t m = 1; m < period; ++m, cur = shift(cur))
        if (cur == pair.upper)
            return static_cast<int>(std::gcd(m, period));
    return static_cast<int>(period);
}

std::optional<CharacteristicPair> find_partner(const ExternalAddress& address, std::size_t budget)
{
    if (!address.is_periodic())
        throw Error(ErrorCode::NotPeriodic, address.str() + " is not periodic");
    const std::vector<int>& base = address.period();
    const std::size_t n = base.size();
    std::vector<int> offset(n, -1);
    std::size_t tried = 0;
    while (true) {
        std::vector<int> word(n);
        bool valid = true;
        for (std::size_t i = 0; i < n; ++i) {
            word[i] = base[i] + offset[i];
            valid = valid && address.alphabet().contains(word[i]);
        }
        if (valid) {
            const ExternalAddress other = ExternalAddress::periodic(word, address.alphabet());
            if (other.period_length() == n && !(other == address)) {
                if (++tried > budget)
                    throw Error(ErrorCode::ResourceBound, "partner search budget exhausted");
                const bool below = less(other, address);
                const ExternalAddress& lo = below ? other : address;
                const ExternalAddress& hi = below ? address : other;
                if (is_characteristic_pair(lo, hi))
                    return CharacteristicPair{lo, hi, static_cast<int>(n)};
            }
        }
        std::size_t pos = 0;
        while (pos < n && offset[pos] == 1)
            offset[pos++] = -1;
        if (pos == n)
            break;
        ++offset[pos];
    }
    return std::nullopt;
}

} // namespace expfiber
