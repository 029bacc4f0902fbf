#pragma once

namespace cbx {

/// Dual-threshold decision rule on [0, 1] scores: positive at s >= upper,
/// negative at s < lower, rejected in between. lower == upper is a plain
/// binary threshold with an empty rejection band.
struct OperatingPoint {
    double lower = 0.5;
    double upper = 0.5;

    /// Validating constructor; throws cbx::Error(InvalidArgument) unless
    /// 0 <= lower <= upper <= 1.
    static OperatingPoint make(double lower, double upper);

    /// Band of half-width `bandwidth` around `center`, clamped to [0, 1].
    static OperatingPoint band(double center, double bandwidth);

    double bandwidth() const noexcept { return (upper - lower) / 2.0; }
    double center() const noexcept { return (upper + lower) / 2.0; }
    bool is_binary() const noexcept { return lower == upper; }

    bool operator==(const OperatingPoint&) const = default;
};

} // namespace cbx
