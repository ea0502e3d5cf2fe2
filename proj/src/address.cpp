#include "expfiber/address.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace expfiber {

namespace {

std::vector<int> primitive_root(const std::vector<int>& word)
{
    const std::size_t n = word.size();
    for (std::size_t d = 1; d < n; ++d) {
        if (n % d != 0)
            continue;
        bool repeats = true;
        for (std::size_t i = d; i < n && repeats; ++i)
            repeats = word[i] == word[i - d];
        if (repeats)
            return {word.begin(), word.begin() + static_cast<long>(d)};
    }
    return word;
}

std::size_t compare_horizon(const EventualCycle& a, const EventualCycle& b)
{
    return std::max(a.head.size(), b.head.size()) + std::lcm(a.cycle.size(), b.cycle.size());
}

void require_same_alphabet(const ExternalAddress& a, const ExternalAddress& b)
{
    if (!(a.alphabet() == b.alphabet()))
        throw Error(ErrorCode::Precondition, "addresses over different alphabets");
}

} // namespace

EventualCycle EventualCycle::normalized(std::vector<int> head, std::vector<int> cycle)
{
    if (cycle.empty())
        throw Error(ErrorCode::Precondition, "empty period word");
    cycle = primitive_root(cycle);
    while (!head.empty() && head.back() == cycle.back()) {
        std::rotate(cycle.rbegin(), cycle.rbegin() + 1, cycle.rend());
        head.pop_back();
    }
    return {std::move(head), std::move(cycle)};
}

Alphabet Alphabet::polynomial(int degree)
{
    if (degree < 2)
        throw Error(ErrorCode::Precondition, "polynomial alphabet needs degree >= 2");
    return {AlphabetKind::PolynomialCyclic, degree};
}

int Alphabet::min_symbol() const
{
    if (!cyclic())
        throw Error(ErrorCode::Precondition, "exponential alphabet is unbounded");
    return degree % 2 == 1 ? (1 - degree) / 2 : (2 - degree) / 2;
}

int Alphabet::max_symbol() const
{
    if (!cyclic())
        throw Error(ErrorCode::Precondition, "exponential alphabet is unbounded");
    return degree % 2 == 1 ? (degree - 1) / 2 : degree / 2;
}

bool Alphabet::contains(int symbol) const
{
    return !cyclic() || (symbol >= min_symbol() && symbol <= max_symbol());
}

ExternalAddress::ExternalAddress(std::vector<int> preperiod, std::vector<int> period,
                                 Alphabet alphabet)
    : alphabet_(alphabet)
{
    for (const auto* word : {&preperiod, &period})
        for (int s : *word)
            if (!alphabet.contains(s))
                throw Error(ErrorCode::Precondition,
                            "symbol " + std::to_string(s) + " outside the alphabet");
    seq_ = EventualCycle::normalized(std::move(preperiod), std::move(period));
}

ExternalAddress ExternalAddress::parse(const std::string& text, Alphabet alphabet)
{
    const auto bar = text.find('|');
    if (bar == std::string::npos || text.find('|', bar + 1) != std::string::npos)
        throw Error(ErrorCode::Parse, "expected exactly one '|' in \"" + text + "\"");
    auto read = [&](const std::string& part) {
        std::istringstream in(part);
        std::vector<int> out;
        std::string token;
        while (in >> token) {
            char* end = nullptr;
            const long v = std::strtol(token.c_str(), &end, 10);
            if (*end != '\0' || token.empty())
                throw Error(ErrorCode::Parse, "bad symbol '" + token + "'");
            out.push_back(static_cast<int>(v));
        }
        return out;
    };
    auto period = read(text.substr(bar + 1));
    if (period.empty())
        throw Error(ErrorCode::Parse, "empty period word in \"" + text + "\"");
    return ExternalAddress(read(text.substr(0, bar)), std::move(period), alphabet);
}

std::string ExternalAddress::str() const
{
    std::ostringstream out;
    for (int s : seq_.head)
        out << s << ' ';
    out << '|';
    for (int s : seq_.cycle)
        out << ' ' << s;
    return out.str();
}

int ExternalAddress::max_abs_entry() const
{
    int m = 0;
    for (const auto* word : {&seq_.head, &seq_.cycle})
        for (int s : *word)
            m = std::max(m, std::abs(s));
    return m;
}

int ExternalAddress::min_entry() const
{
    int m = *std::min_element(seq_.cycle.begin(), seq_.cycle.end());
    for (int s : seq_.head)
        m = std::min(m, s);
    return m;
}

int ExternalAddress::max_entry() const
{
    int m = *std::max_element(seq_.cycle.begin(), seq_.cycle.end());
    for (int s : seq_.head)
        m = std::max(m, s);
    return m;
}

ExternalAddress shift(const ExternalAddress& a)
{
    if (!a.is_periodic())
        return ExternalAddress({a.preperiod().begin() + 1, a.preperiod().end()}, a.period(),
                               a.alphabet());
    std::vector<int> rotated = a.period();
    std::rotate(rotated.begin(), rotated.begin() + 1, rotated.end());
    return ExternalAddress({}, std::move(rotated), a.alphabet());
}

ExternalAddress shift(const ExternalAddress& a, std::size_t times)
{
    ExternalAddress out = a;
    if (times > a.preperiod_length()) {
        // Skip whole turns of the period word.
        const std::size_t excess = times - a.preperiod_length();
        times = a.preperiod_length() + excess % a.period_length();
    }
    for (std::size_t i = 0; i < times; ++i)
        out = shift(out);
    return out;
}

ExternalAddress prepend(int symbol, const ExternalAddress& a)
{
    std::vector<int> head{symbol};
    head.insert(head.end(), a.preperiod().begin(), a.preperiod().end());
    return ExternalAddress(std::move(head), a.period(), a.alphabet());
}

Order compare(const ExternalAddress& a, const ExternalAddress& b)
{
    require_same_alphabet(a, b);
    const std::size_t horizon = compare_horizon(a.sequence(), b.sequence());
    for (std::size_t k = 0; k < horizon; ++k) {
        const int x = a.symbol(k), y = b.symbol(k);
        if (x != y)
            return x < y ? Order::Less : Order::Greater;
    }
    return Order::Equal;
}

bool between(const ExternalAddress& a, const ExternalAddress& x, const ExternalAddress& b)
{
    const bool ax = less(a, x), xb = less(x, b), ab = less(a, b);
    if (ab)
        return ax && xb;
    if (compare(a, b) == Order::Equal)
        return !(compare(a, x) == Order::Equal);
    // The arc wraps past the cut.
    return ax || xb;
}

Rational dist(const ExternalAddress& a, const ExternalAddress& b)
{
    require_same_alphabet(a, b);
    const std::size_t lead = std::max(a.preperiod_length(), b.preperiod_length());
    const std::size_t block = std::lcm(a.period_length(), b.period_length());
    Rational sum = 0;
    Rational weight(1, 2);
    for (std::size_t k = 0; k < lead; ++k, weight /= 2)
        if (a.symbol(k) != b.symbol(k))
            sum += weight;
    Rational repeating = 0;
    const Rational block_start = weight;
    for (std::size_t k = lead; k < lead + block; ++k, weight /= 2)
        if (a.symbol(k) != b.symbol(k))
            repeating += weight;
    if (repeating != 0) {
        // weight is now 2^-(lead+block); the block recurs with ratio 2^-block.
        const Rational ratio = weight / block_start;
        sum += repeating / (1 - ratio);
    }
    return sum;
}

double minimal_potential(const ExternalAddress&)
{
    // Bounded entries: |s_k| / F^k(t) -> 0 for every t > 0.
    return 0.0;
}

ExternalAddress embed(const ExternalAddress& a, int degree)
{
    if (a.alphabet().cyclic())
        throw Error(ErrorCode::Precondition, "embed expects an exponential address");
    const int bound = a.max_abs_entry();
    if (degree <= 2 * bound + 2)
        throw Error(ErrorCode::DegreeTooSmall,
                    "degree " + std::to_string(degree) + " needs to exceed " +
                        std::to_string(2 * bound + 2));
    return ExternalAddress(a.preperiod(), a.period(), Alphabet::polynomial(degree));
}

ExternalAddress project(const ExternalAddress& a)
{
    return ExternalAddress(a.preperiod(), a.period(), Alphabet::exponential());
}

std::string to_string(Order order)
{
    switch (order) {
    case Order::Less: return "Less";
    case Order::Equal: return "Equal";
    case Order::Greater: return "Greater";
    }
    return "?";
}

std::string rational_str(const Rational& value)
{
    std::ostringstream out;
    out << boost::multiprecision::numerator(value);
    if (boost::multiprecision::denominator(value) != 1)
        out << '/' << boost::multiprecision::denominator(value);
    return out.str();
}

} // namespace expfiber
