#pragma once

#include "pwlnet/net.hpp"
#include "pwlnet/rat.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pwlnet {

enum class LinkMode { feedforward, pairwise, all_linked, resnet, dense };

std::string link_mode_name(LinkMode m);
LinkMode link_mode_from_name(std::string_view s);

/// Architecture silhouette: hidden-layer widths, one link mode per layer, and
/// the input dimension.
struct ArchShape {
    std::vector<long> widths;
    std::vector<LinkMode> modes;
    long input_dim = 1;

    static ArchShape uniform(std::vector<long> widths, LinkMode mode, long input_dim = 1);
    bool uniform_mode(LinkMode m) const;
};

/// Shape of a concrete network spec (partition chains map to feedforward /
/// pairwise / all_linked per layer).
ArchShape shape_of(const NetworkSpec& net);

struct BoundReport {
    Int upper;
    std::optional<Int> construction_lower; // best catalog-guaranteed piece count
    std::string formula_id;
};

/// Maximum piece count of the univariate network function for this shape.
/// Exact big integers throughout. Throws validation_error on a mode/width
/// mismatch (pairwise linking assumes even widths) and unsupported_error for
/// shapes without a closed-form bound (dense links, input_dim > 1).
BoundReport piece_upper_bound(const ArchShape& shape);

/// Maximum number of linear regions for an input_dim-dimensional input: the
/// product over layers of Zaslavsky sums. With input_dim == 1 this returns the
/// (tighter) piece bound, which the hyperplane count collapses to.
Int region_upper_bound(const ArchShape& shape);

/// sum_{j=0}^{n} C(m, j): regions cut by m hyperplanes in R^n.
Int zaslavsky_sum(long m, long n);

/// Piece count guaranteed by the dense-link construction: 1 + prod(2^w - 1).
Int dense_lower_bound(const std::vector<long>& widths);

} // namespace pwlnet
