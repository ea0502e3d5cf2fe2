#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <string>
#include <vector>

#include "expfiber/error.hpp"

namespace expfiber {

using Rational = boost::multiprecision::cpp_rational;

// An eventually periodic integer sequence kept in canonical form: the period
// word is primitive and the preperiod is as short as possible.
struct EventualCycle {
    std::vector<int> head;
    std::vector<int> cycle;

    static EventualCycle normalized(std::vector<int> head, std::vector<int> cycle);

    // Zero-based entry.
    int at(std::size_t k) const
    {
        return k < head.size() ? head[k] : cycle[(k - head.size()) % cycle.size()];
    }

    bool operator==(const EventualCycle&) const = default;
};

enum class AlphabetKind { ExponentialIntegers, PolynomialCyclic };

struct Alphabet {
    AlphabetKind kind = AlphabetKind::ExponentialIntegers;
    int degree = 0;

    static Alphabet exponential() { return {}; }
    static Alphabet polynomial(int degree);

    bool cyclic() const { return kind == AlphabetKind::PolynomialCyclic; }
    // Symmetric residues: {(1-D)/2..(D-1)/2} for odd D, {(2-D)/2..D/2} for even D.
    int min_symbol() const;
    int max_symbol() const;
    bool contains(int symbol) const;

    bool operator==(const Alphabet&) const = default;
};

enum class Order { Less, Equal, Greater };

class ExternalAddress {
public:
    ExternalAddress() = default;
    ExternalAddress(std::vector<int> preperiod, std::vector<int> period,
                    Alphabet alphabet = Alphabet::exponential());

    static ExternalAddress periodic(std::vector<int> period,
                                    Alphabet alphabet = Alphabet::exponential())
    {
        return ExternalAddress({}, std::move(period), alphabet);
    }

    // Accepts "p1 p2 ... | q1 q2 ...".
    static ExternalAddress parse(const std::string& text,
                                 Alphabet alphabet = Alphabet::exponential());
    std::string str() const;

    const Alphabet& alphabet() const { return alphabet_; }
    const std::vector<int>& preperiod() const { return seq_.head; }
    const std::vector<int>& period() const { return seq_.cycle; }
    const EventualCycle& sequence() const { return seq_; }
    std::size_t preperiod_length() const { return seq_.head.size(); }
    std::size_t period_length() const { return seq_.cycle.size(); }
    bool is_periodic() const { return seq_.head.empty(); }

    // Zero-based: symbol(0) is the first entry of the address.
    int symbol(std::size_t k) const { return seq_.at(k); }
    int max_abs_entry() const;
    int min_entry() const;
    int max_entry() const;

    bool operator==(const ExternalAddress& other) const
    {
        return alphabet_ == other.alphabet_ && seq_ == other.seq_;
    }

private:
    Alphabet alphabet_;
    EventualCycle seq_;
};

ExternalAddress shift(const ExternalAddress& a);
ExternalAddress shift(const ExternalAddress& a, std::size_t times);
// The address j a (one-step preimage with first symbol j).
ExternalAddress prepend(int symbol, const ExternalAddress& a);

Order compare(const ExternalAddress& a, const ExternalAddress& b);
inline bool less(const ExternalAddress& a, const ExternalAddress& b)
{
    return compare(a, b) == Order::Less;
}
// Strict cyclic betweenness: walking upward from a, x is met before b.
// For the exponential alphabet the line is closed up at infinity.
bool between(const ExternalAddress& a, const ExternalAddress& x, const ExternalAddress& b);

// Sum of 2^-k over the (one-based) positions k where the sequences differ.
Rational dist(const ExternalAddress& a, const ExternalAddress& b);
double minimal_potential(const ExternalAddress& a);

ExternalAddress embed(const ExternalAddress& a, int degree);
ExternalAddress project(const ExternalAddress& a);

std::string to_string(Order order);
std::string rational_str(const Rational& value);

} // namespace expfiber
