#include "pwlnet/arrangement2d.hpp"

#include "pwlnet/bounds.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace pwlnet {

using ordered_json = nlohmann::ordered_json;

namespace {

using Point = std::array<Rat, 2>;

struct Cell {
    std::vector<Point> verts;
    std::vector<AffineMap2> maps; // previous-layer outputs, then this layer's finished neurons
};

Rat eval_map(const AffineMap2& m, const Point& p) { return Rat(m[0] * p[0] + m[1] * p[1] + m[2]); }

Rat twice_area(const std::vector<Point>& v) {
    Rat a(0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& p = v[i];
        const Point& q = v[(i + 1) % v.size()];
        a += p[0] * q[1] - q[0] * p[1];
    }
    return a;
}

void drop_duplicate_vertices(std::vector<Point>& v) {
    std::vector<Point> out;
    for (auto& p : v)
        if (out.empty() || !(out.back() == p)) out.push_back(std::move(p));
    while (out.size() > 1 && out.front() == out.back()) out.pop_back();
    v = std::move(out);
}

/// Split a convex cell by the zero line of g. Returns true when both sides
/// have positive area; pos/neg receive the vertex rings.
bool split_cell(const std::vector<Point>& verts, const AffineMap2& g, std::vector<Point>& pos,
                std::vector<Point>& neg) {
    std::vector<Rat> vals;
    vals.reserve(verts.size());
    bool any_pos = false, any_neg = false;
    for (const auto& p : verts) {
        vals.push_back(eval_map(g, p));
        if (vals.back() > 0) any_pos = true;
        if (vals.back() < 0) any_neg = true;
    }
    if (!any_pos || !any_neg) return false;

    pos.clear();
    neg.clear();
    for (std::size_t i = 0; i < verts.size(); ++i) {
        std::size_t j = (i + 1) % verts.size();
        const Rat& vp = vals[i];
        const Rat& vq = vals[j];
        if (vp >= 0) pos.push_back(verts[i]);
        if (vp <= 0) neg.push_back(verts[i]);
        if ((vp > 0 && vq < 0) || (vp < 0 && vq > 0)) {
            Rat t = Rat(vp / (vp - vq));
            Point cut{Rat(verts[i][0] + t * (verts[j][0] - verts[i][0])),
                      Rat(verts[i][1] + t * (verts[j][1] - verts[i][1]))};
            pos.push_back(cut);
            neg.push_back(std::move(cut));
        }
    }
    drop_duplicate_vertices(pos);
    drop_duplicate_vertices(neg);
    return pos.size() >= 3 && neg.size() >= 3 && twice_area(pos) > 0 && twice_area(neg) > 0;
}

/// Process one neuron: splits every crossing cell and appends the neuron's
/// post-activation map to each cell.
void apply_neuron(std::vector<Cell>& cells, const std::vector<AffineMap2>& pre_per_cell) {
    std::vector<Cell> next;
    next.reserve(cells.size());
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        Cell& cell = cells[ci];
        const AffineMap2& g = pre_per_cell[ci];
        std::vector<Point> pos, neg;
        if (split_cell(cell.verts, g, pos, neg)) {
            Cell cp{std::move(pos), cell.maps};
            cp.maps.push_back(g);
            Cell cn{std::move(neg), std::move(cell.maps)};
            cn.maps.push_back({rat(0), rat(0), rat(0)});
            next.push_back(std::move(cp));
            next.push_back(std::move(cn));
        } else {
            // sign is uniform on the cell; probe the vertex average
            Rat sx(0), sy(0);
            for (const auto& p : cell.verts) {
                sx += p[0];
                sy += p[1];
            }
            Point c{Rat(sx / static_cast<long>(cell.verts.size())), Rat(sy / static_cast<long>(cell.verts.size()))};
            bool active = eval_map(g, c) > 0;
            cell.maps.push_back(active ? g : AffineMap2{rat(0), rat(0), rat(0)});
            next.push_back(std::move(cell));
        }
    }
    cells = std::move(next);
}

struct DSU {
    std::vector<long> parent;
    explicit DSU(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    long find(long a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    }
    void unite(long a, long b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(b)] = a;
    }
};

/// Canonical primitive integer form of the line through two rational points.
std::string line_key(const Point& p, const Point& q) {
    Rat a = Rat(q[1] - p[1]);
    Rat b = Rat(p[0] - q[0]);
    Rat c = Rat(-(a * p[0] + b * p[1]));
    Int la = a.get_num() * b.get_den() * c.get_den();
    Int lb = b.get_num() * a.get_den() * c.get_den();
    Int lc = c.get_num() * a.get_den() * b.get_den();
    Int g = gcd(gcd(abs(la), abs(lb)), abs(lc));
    if (g != 0) {
        la /= g;
        lb /= g;
        lc /= g;
    }
    if (la < 0 || (la == 0 && lb < 0) || (la == 0 && lb == 0 && lc < 0)) {
        la = -la;
        lb = -lb;
        lc = -lc;
    }
    return la.get_str() + ":" + lb.get_str() + ":" + lc.get_str();
}

ordered_json map_json(const AffineMap2& m) {
    return ordered_json::array({rat_str(m[0]), rat_str(m[1]), rat_str(m[2])});
}

} // namespace

RegionDecomposition enumerate_regions(const NetworkSpec& net, const Box2& box) {
    require_valid(net);
    if (net.input_dim != 2) throw unsupported_error("enumerate_regions: input_dim must be 2");
    if (net.arch != Arch::layered) throw unsupported_error("enumerate_regions: layered nets only");
    if (!(box.x.lo < box.x.hi) || !(box.y.lo < box.y.hi))
        throw std::invalid_argument("enumerate_regions: degenerate box");

    std::vector<Cell> cells(1);
    cells[0].verts = {{box.x.lo, box.y.lo}, {box.x.hi, box.y.lo}, {box.x.hi, box.y.hi}, {box.x.lo, box.y.hi}};
    cells[0].maps = {{rat(1), rat(0), rat(0)}, {rat(0), rat(1), rat(0)}};

    for (const auto& l : net.layers) {
        std::size_t prev_count = cells[0].maps.size();
        std::size_t j = 0;
        for (int gsize : l.partition()) {
            for (int t = 0; t < gsize; ++t, ++j) {
                std::vector<AffineMap2> pre(cells.size());
                for (std::size_t ci = 0; ci < cells.size(); ++ci) {
                    AffineMap2 g{rat(0), rat(0), l.biases[j]};
                    for (std::size_t m = 0; m < prev_count; ++m) {
                        const Rat& w = l.weights[j][m];
                        if (w == 0) continue;
                        for (int s = 0; s < 3; ++s) g[static_cast<std::size_t>(s)] += w * cells[ci].maps[m][static_cast<std::size_t>(s)];
                    }
                    if (t > 0) {
                        const AffineMap2& chain = cells[ci].maps[prev_count + j - 1];
                        for (int s = 0; s < 3; ++s) g[static_cast<std::size_t>(s)] -= chain[static_cast<std::size_t>(s)];
                    }
                    pre[ci] = std::move(g);
                }
                apply_neuron(cells, pre);
            }
        }
        for (auto& cell : cells) cell.maps.erase(cell.maps.begin(), cell.maps.begin() + static_cast<long>(prev_count));
    }

    RegionDecomposition dec;
    dec.box = box;
    dec.activation_cell_count = static_cast<long>(cells.size());

    std::vector<AffineMap2> out_maps(cells.size());
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        AffineMap2 o{rat(0), rat(0), net.output.bias};
        for (std::size_t m = 0; m < cells[ci].maps.size(); ++m)
            for (int s = 0; s < 3; ++s)
                o[static_cast<std::size_t>(s)] += net.output.coeffs[m] * cells[ci].maps[m][static_cast<std::size_t>(s)];
        out_maps[ci] = std::move(o);
    }

    // adjacency: edges sharing a line with overlapping interiors
    struct EdgeRef {
        long cell;
        Rat lo, hi; // parameter interval along the line
    };
    std::map<std::string, std::vector<EdgeRef>> by_line;
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const auto& v = cells[ci].verts;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const Point& p = v[i];
            const Point& q = v[(i + 1) % v.size()];
            std::string key = line_key(p, q);
            bool by_x = p[0] != q[0];
            Rat a = by_x ? p[0] : p[1];
            Rat b = by_x ? q[0] : q[1];
            if (a > b) std::swap(a, b);
            by_line[key].push_back({static_cast<long>(ci), std::move(a), std::move(b)});
        }
    }
    DSU dsu(cells.size());
    for (const auto& [key, edges] : by_line) {
        for (std::size_t i = 0; i < edges.size(); ++i)
            for (std::size_t j = i + 1; j < edges.size(); ++j) {
                const EdgeRef& e = edges[i];
                const EdgeRef& f = edges[j];
                if (e.cell == f.cell) continue;
                Rat lo = std::max(e.lo, f.lo), hi = std::min(e.hi, f.hi);
                if (lo < hi && out_maps[static_cast<std::size_t>(e.cell)] == out_maps[static_cast<std::size_t>(f.cell)])
                    dsu.unite(e.cell, f.cell);
            }
    }

    std::map<long, long> root_to_region;
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        long root = dsu.find(static_cast<long>(ci));
        auto [it, fresh] = root_to_region.try_emplace(root, static_cast<long>(root_to_region.size()));
        dec.cells.push_back({std::move(cells[ci].verts), out_maps[ci], it->second});
    }
    dec.merged_region_count = static_cast<long>(root_to_region.size());
    return dec;
}

std::string RegionDecomposition::to_json() const {
    ordered_json j;
    j["box"] = ordered_json::array(
        {rat_str(box.x.lo), rat_str(box.y.lo), rat_str(box.x.hi), rat_str(box.y.hi)});
    j["activation_cells"] = activation_cell_count;
    j["merged_regions"] = merged_region_count;
    j["cells"] = ordered_json::array();
    for (const auto& c : cells) {
        ordered_json cj;
        cj["region"] = c.region_id;
        cj["map"] = map_json(c.output_map);
        cj["verts"] = ordered_json::array();
        for (const auto& p : c.verts) cj["verts"].push_back(ordered_json::array({rat_str(p[0]), rat_str(p[1])}));
        j["cells"].push_back(std::move(cj));
    }
    return j.dump(2) + "\n";
}

std::string RegionDecomposition::to_svg() const {
    double x0 = rat_double(box.x.lo), x1 = rat_double(box.x.hi);
    double y0 = rat_double(box.y.lo), y1 = rat_double(box.y.hi);
    double w = x1 - x0, h = y1 - y0;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << x0 << " " << -y1 << " " << w << " " << h
       << "\" width=\"640\" height=\"" << 640.0 * h / w << "\">\n";
    for (const auto& c : cells) {
        int hue = static_cast<int>((c.region_id * 47) % 360);
        os << "  <polygon points=\"";
        for (const auto& p : c.verts) os << rat_double(p[0]) << "," << -rat_double(p[1]) << " ";
        os << "\" fill=\"hsl(" << hue << ",65%,72%)\" stroke=\"#333\" stroke-width=\"" << w / 640.0 << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string RegionBoundCheck::to_json() const {
    ordered_json j;
    j["region_bound"] = bound.get_str();
    j["activation_cells"] = activation_cells;
    j["merged_regions"] = merged_regions;
    j["ok"] = ok;
    return j.dump(2) + "\n";
}

RegionBoundCheck check_region_bound(const NetworkSpec& net, const Box2& box) {
    RegionDecomposition dec = enumerate_regions(net, box);
    ArchShape shape = shape_of(net);
    RegionBoundCheck chk;
    chk.bound = region_upper_bound(shape);
    chk.activation_cells = dec.activation_cell_count;
    chk.merged_regions = dec.merged_region_count;
    chk.ok = Int(chk.merged_regions) <= chk.bound;
    return chk;
}

} // namespace pwlnet
