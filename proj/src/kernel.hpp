#pragma once

// Backward-iteration kernel shared by the dynamic and parameter ray tracers.
// Instantiated for double and for __float128; the quad version exists
// because f_c multiplies absolute errors by |e^z|, about 1e13 at
// potential 30, which leaves double with no accurate digits there.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

extern "C" {
#include <quadmath.h>
}

#include "expfiber/address.hpp"

namespace expfiber::kernel {

template <class R>
struct Ops;

template <>
struct Ops<double> {
    using real = double;
    using cx = std::complex<double>;
    static cx make(real a, real b) { return {a, b}; }
    static real re(cx z) { return z.real(); }
    static real im(cx z) { return z.imag(); }
    static cx log(cx z) { return std::log(z); }
    static cx exp(cx z) { return std::exp(z); }
    static real expm1(real x) { return std::expm1(x); }
    static real exp(real x) { return std::exp(x); }
    static real log(real x) { return std::log(x); }
    static real abs(cx z) { return std::abs(z); }
    static real round(real x) { return std::nearbyint(x); }
    static real pi() { return 3.14159265358979323846; }
};

template <>
struct Ops<__float128> {
    using real = __float128;
    using cx = __complex128;
    static cx make(real a, real b)
    {
        cx z;
        __real__ z = a;
        __imag__ z = b;
        return z;
    }
    static real re(cx z) { return __real__ z; }
    static real im(cx z) { return __imag__ z; }
    static cx log(cx z) { return clogq(z); }
    static cx exp(cx z) { return cexpq(z); }
    static real expm1(real x) { return expm1q(x); }
    static real exp(real x) { return expq(x); }
    static real log(real x) { return logq(x); }
    static real abs(cx z) { return cabsq(z); }
    static real round(real x) { return nearbyintq(x); }
    static real pi() { return acosq(static_cast<real>(-1)); }
};

// Level k of a ray with address s lies on the ray of shift^k(s). Shifts of an
// eventually periodic address repeat, so levels are grouped by ray identity.
inline std::size_t ray_id(const ExternalAddress& s, std::size_t level)
{
    const std::size_t pre = s.preperiod_length();
    return level < pre ? level : pre + (level - pre) % s.period_length();
}

// Imaginary parts of an accepted evaluation, keyed by ray and log-potential.
// Branches of the logarithm are chosen to stay close to these.
struct BranchReference {
    std::vector<std::vector<std::pair<double, double>>> by_ray;

    bool empty() const { return by_ray.empty(); }

    void reset(std::size_t rays)
    {
        by_ray.assign(rays, {});
    }

    void add(std::size_t ray, double log_potential, double imag)
    {
        by_ray[ray].emplace_back(log_potential, imag);
    }

    void finish()
    {
        for (auto& v : by_ray)
            std::sort(v.begin(), v.end());
    }

    // Imaginary part on `ray` at the given log-potential, interpolated
    // linearly between the bracketing entries.
    std::optional<double> at(std::size_t ray, double log_potential) const
    {
        if (ray >= by_ray.size() || by_ray[ray].empty())
            return std::nullopt;
        const auto& v = by_ray[ray];
        auto it = std::lower_bound(v.begin(), v.end(), std::make_pair(log_potential, -1e308));
        if (it == v.end())
            return v.back().second;
        if (it == v.begin() || it->first == log_potential)
            return it->second;
        const auto& [x0, y0] = *std::prev(it);
        const auto& [x1, y1] = *it;
        return y0 + (y1 - y0) * (log_potential - x0) / (x1 - x0);
    }
};

struct PullbackSettings {
    double big_potential = 1e12;
    double singular_radius = 1e-12;
    std::size_t max_depth = 5'000'000;
    bool derivative = false;     // also carry dz/dc for fixed branch choices
};

template <class R>
struct Pullback {
    typename Ops<R>::cx z{};
    typename Ops<R>::cx dz{};    // dz/dc, when requested
    std::size_t depth = 0;
    double worst_jump = 0.0;     // largest |Im z - reference| over levels with a reference
    double closest_singular = std::numeric_limits<double>::infinity();
    bool strip_cut = false;      // strip rule used on a point sitting on the cut
    bool too_deep = false;
};

// Evaluates the ray of s (entries read from `offset` on) at potential
// F^lifts(t). With `reference` set, each logarithm takes the branch nearest
// the reference; otherwise the strip of the address symbol is used.
template <class R>
Pullback<R> pull_back(const typename Ops<R>::cx& c, const ExternalAddress& s, R t, int lifts,
                      std::size_t offset, const BranchReference* reference,
                      BranchReference* record, const PullbackSettings& settings)
{
    using O = Ops<R>;
    using cx = typename O::cx;
    const R two_pi = 2 * O::pi();
    Pullback<R> out;

    R base = t;
    for (int i = 0; i < lifts; ++i)
        base = O::expm1(base);
    std::vector<R> potentials{base};
    const R cap = std::min<R>(static_cast<R>(settings.big_potential), static_cast<R>(200));
    while (potentials.back() < cap) {
        if (potentials.size() > settings.max_depth) {
            out.too_deep = true;
            return out;
        }
        potentials.push_back(O::expm1(potentials.back()));
    }
    const std::size_t depth = potentials.size() - 1;
    out.depth = depth;

    auto symbol = [&](std::size_t level) { return static_cast<R>(s.symbol(level + offset)); };
    const R top = potentials[depth];
    cx z = O::make(top, two_pi * symbol(depth));
    if (top < 1000) {
        const cx next = O::make(-1, two_pi * symbol(depth + 1)) - c;
        z = z + next * O::exp(-top);
    }
    cx dz = O::make(0, 0);
    if (settings.derivative && top < 1000)
        dz = O::make(-O::exp(-top), 0);
    if (record) {
        record->reset(s.preperiod_length() + s.period_length());
        record->add(ray_id(s, depth + offset), std::log(static_cast<double>(top)),
                    static_cast<double>(O::im(z)));
    }

    for (std::size_t k = depth; k > 0; --k) {
        const cx w = z - c;
        const R wabs = O::abs(w);
        out.closest_singular = std::min(out.closest_singular, static_cast<double>(wabs));
        const cx L = O::log(w);
        R imag = O::im(L) + two_pi * symbol(k - 1);
        const std::size_t id = ray_id(s, k - 1 + offset);
        const double log_pot = std::log(static_cast<double>(potentials[k - 1]));
        const auto ref = reference ? reference->at(id, log_pot) : std::nullopt;
        if (ref) {
            const R turns = O::round((static_cast<R>(*ref) - imag) / two_pi);
            imag += turns * two_pi;
            out.worst_jump = std::max(out.worst_jump, std::abs(static_cast<double>(imag) - *ref));
        } else if (O::re(w) < 0 && O::im(w) * O::im(w) < static_cast<R>(1e-24) * wabs * wabs) {
            out.strip_cut = true;
        }
        z = O::make(O::re(L), imag);
        if (settings.derivative)
            dz = (dz - O::make(1, 0)) / w;
        if (record)
            record->add(id, log_pot, static_cast<double>(imag));
    }
    if (record)
        record->finish();
    out.z = z;
    out.dz = dz;
    return out;
}

} // namespace expfiber::kernel
