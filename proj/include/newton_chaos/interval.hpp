#pragma once

#include <iosfwd>

#include "newton_chaos/errors.hpp"
#include "newton_chaos/real.hpp"

namespace newton_chaos {

/// Nonempty compact interval [lo, hi] with finite endpoints.
template <class T>
class BasicInterval {
public:
    BasicInterval(T lo, T hi) : lo_(lo), hi_(hi) {
        if (!finite(lo) || !finite(hi)) throw InvalidInput("interval endpoints must be finite");
        if (lo > hi) throw InvalidInput("interval requires lo <= hi");
    }

    /// Degenerate interval [x, x].
    static BasicInterval point(T x) { return {x, x}; }

    T lo() const noexcept { return lo_; }
    T hi() const noexcept { return hi_; }
    T width() const noexcept { return hi_ - lo_; }
    T midpoint() const noexcept { return lo_ + (hi_ - lo_) / 2; }
    bool nondegenerate() const noexcept { return lo_ < hi_; }

    bool contains(T x, T slack = 0) const noexcept { return x >= lo_ - slack && x <= hi_ + slack; }
    bool contains(const BasicInterval& other, T slack = 0) const noexcept {
        return other.lo_ >= lo_ - slack && other.hi_ <= hi_ + slack;
    }
    bool intersects(const BasicInterval& other) const noexcept { return lo_ <= other.hi_ && other.lo_ <= hi_; }

    /// Point at fraction t in [0, 1] of the way from lo to hi.
    T lerp(T t) const noexcept { return lo_ + t * (hi_ - lo_); }

    template <class U>
    explicit operator BasicInterval<U>() const {
        return {static_cast<U>(lo_), static_cast<U>(hi_)};
    }

    friend bool operator==(const BasicInterval&, const BasicInterval&) = default;

private:
    static bool finite(T x) noexcept { return x == x && (x - x) == 0; }

    T lo_;
    T hi_;
};

using Interval = BasicInterval<double>;
using ExtInterval = BasicInterval<Real>;

inline ExtInterval widen(const Interval& iv) { return static_cast<ExtInterval>(iv); }
inline Interval narrow(const ExtInterval& iv) { return static_cast<Interval>(iv); }

std::ostream& operator<<(std::ostream& os, const Interval& iv);
std::ostream& operator<<(std::ostream& os, const ExtInterval& iv);

}  // namespace newton_chaos
