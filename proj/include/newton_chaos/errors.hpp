#pragma once

#include <stdexcept>
#include <string>

namespace newton_chaos {

/// Caller passed something outside an operation's contract.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// |f'(x)| fell to the derivative floor while evaluating an iteration map.
class DerivativeBlowup : public std::runtime_error {
public:
    explicit DerivativeBlowup(double at)
        : std::runtime_error("derivative vanishes at x = " + std::to_string(at)), at_(at) {}

    double at() const noexcept { return at_; }

private:
    double at_;
};

}  // namespace newton_chaos
