#pragma once

#include <random>
#include <vector>

#include "expfiber/address.hpp"

namespace testing {

// Small deterministic generators for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    std::vector<int> word(std::size_t length, int lo, int hi)
    {
        std::vector<int> w(length);
        for (auto& x : w)
            x = integer(lo, hi);
        return w;
    }

    expfiber::ExternalAddress periodic(int bound, int max_period)
    {
        return expfiber::ExternalAddress::periodic(
            word(static_cast<std::size_t>(integer(1, max_period)), -bound, bound));
    }

    expfiber::ExternalAddress address(int bound, int max_preperiod, int max_period)
    {
        return {word(static_cast<std::size_t>(integer(0, max_preperiod)), -bound, bound),
                word(static_cast<std::size_t>(integer(1, max_period)), -bound, bound)};
    }

    // A strictly preperiodic address, the kind that can serve as a partition base.
    expfiber::ExternalAddress preperiodic(int bound, int max_preperiod, int max_period)
    {
        while (true) {
            auto a = address(bound, max_preperiod, max_period);
            if (!a.is_periodic())
                return a;
        }
    }

private:
    std::mt19937_64 rng_;
};

} // namespace testing
