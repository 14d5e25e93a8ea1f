#pragma once

#include "pwlnet/net.hpp"
#include "pwlnet/rat.hpp"

#include <array>
#include <string>
#include <vector>

namespace pwlnet {

/// Affine map (cx, cy, c0): (x, y) -> cx*x + cy*y + c0.
using AffineMap2 = std::array<Rat, 3>;

struct Box2 {
    Interval x{Rat(0), Rat(0)};
    Interval y{Rat(0), Rat(0)};
};

/// Convex cell of the final decomposition: CCW rational vertices, the affine
/// map the network realizes on it, and the merged region it belongs to.
struct CellInfo {
    std::vector<std::array<Rat, 2>> verts;
    AffineMap2 output_map;
    long region_id = -1;
};

struct RegionDecomposition {
    std::vector<CellInfo> cells;
    long activation_cell_count = 0;
    long merged_region_count = 0;
    Box2 box;

    std::string to_json() const;
    std::string to_svg() const;
};

/// Exact convex-cell subdivision of the box for a 2-input layered net:
/// neurons are processed in layer-and-link order, each zero line splits the
/// cells it crosses via exact rational clipping, and edge-adjacent cells with
/// identical output maps are merged into linear regions.
RegionDecomposition enumerate_regions(const NetworkSpec& net, const Box2& box);

struct RegionBoundCheck {
    Int bound;
    long activation_cells = 0;
    long merged_regions = 0;
    bool ok = false;
    std::string to_json() const;
};

/// Asserts merged_region_count <= region_upper_bound for the net's shape;
/// a violation is reported with both numbers (ok = false).
RegionBoundCheck check_region_bound(const NetworkSpec& net, const Box2& box);

} // namespace pwlnet
