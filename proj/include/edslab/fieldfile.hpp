#pragma once

#include "edslab/numeric.hpp"

#include <optional>
#include <string>

namespace edslab {

/// Line-oriented description of the numeric inputs: sections [coordinates],
/// [metric], [coframe], [fields], and optionally [np].  Expressions use the
/// ExprField grammar over the declared coordinates.
///
///   [coordinates]   t x y z
///   [metric]        signature riemannian      (optional, the default)
///                   g t t = 1 + x^2           (lower triangle; symmetric)
///   [coframe]       e1 dt = 1 + x^2           (component of eps^1 along dt)
///   [fields]        f = x^2 + y^2
///   [np]            rho = 0.25 -0.5           (real and imaginary part)
struct FieldFile {
    std::vector<std::string> coordinates;
    std::optional<MetricField> metric;
    std::optional<NumericCoframe> coframe;
    std::map<std::string, ExprField> fields;
    std::optional<NPScalars> np;

    int dim() const { return static_cast<int>(coordinates.size()); }
    const ExprField& field(const std::string& name) const; // throws if absent
    /// The metric if given, else derived from the coframe, else euclidean.
    MetricField metric_or_default() const;
};

FieldFile parse_field_file(const std::string& text);
std::string print_field_file(const FieldFile& f);

} // namespace edslab
