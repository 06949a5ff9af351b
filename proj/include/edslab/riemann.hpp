#pragma once

#include "edslab/scalar.hpp"

#include <optional>
#include <string>

namespace edslab {

/// Canonical storage of a curvature-component index R_{abcd}: pairs sorted
/// ascending, pairs exchanged into lexicographic order, with the sign
/// absorbing the antisymmetries.  First-Bianchi reduction is a separate,
/// opt-in context flag.
struct RiemannIndex {
    int a = 1, b = 2, c = 3, d = 4;
    int sign = 1; // 0 when the component vanishes identically (a==b or c==d)

    static RiemannIndex canonical(int a, int b, int c, int d);

    std::string symbol_name() const; // e.g. "R1234"; requires sign != 0
    /// Signed canonical Scalar for R_{abcd} (zero when degenerate).
    static Scalar component(int a, int b, int c, int d);
    /// Parse "R1234" style names; nullopt when the name is not of that shape.
    static std::optional<RiemannIndex> parse(const std::string& name);
};

/// Rewrites R_{1423} -> R_{1324} - R_{1234}, the only first-Bianchi relation
/// in four dimensions that is independent of the pair symmetries.
Scalar reduce_first_bianchi(const Scalar& s);

} // namespace edslab
