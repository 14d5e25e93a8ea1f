#pragma once

#include "pwlnet/rat.hpp"

#include <optional>
#include <stdexcept>

namespace pwlnet {

/// Closed rational interval [lo, hi].
struct Interval {
    Rat lo, hi;

    Interval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo > hi) throw std::invalid_argument("Interval: lo > hi");
    }

    bool contains(const Rat& x) const { return lo <= x && x <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
    Rat length() const { return hi - lo; }
    Rat midpoint() const { return (lo + hi) / 2; }

    bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
};

using Domain = std::optional<Interval>;

inline bool same_domain(const Domain& a, const Domain& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || *a == *b;
}

} // namespace pwlnet
