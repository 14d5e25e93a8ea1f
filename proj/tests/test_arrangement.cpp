#include "pwlnet/arrangement2d.hpp"

#include "pwlnet/bounds.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace pwlnet;
using testutil::Rng;

namespace {

Box2 unit_box() { return Box2{Interval(rat(-1), rat(1)), Interval(rat(-1), rat(1))}; }

NetworkSpec single_layer_net2(std::vector<std::vector<Rat>> weights, std::vector<Rat> biases,
                              std::vector<Rat> coeffs, int link_group = 1) {
    NetworkSpec net;
    net.input_dim = 2;
    LayerSpec l;
    l.width = static_cast<int>(weights.size());
    l.link_group = link_group;
    l.weights = std::move(weights);
    l.biases = std::move(biases);
    net.layers.push_back(std::move(l));
    net.output.coeffs = std::move(coeffs);
    return net;
}

NetworkSpec rand_net2(Rng& rng, int max_width, int max_depth, bool pairwise) {
    NetworkSpec net;
    net.input_dim = 2;
    int depth = static_cast<int>(testutil::rand_long(rng, 1, max_depth));
    int prev = 2;
    for (int i = 0; i < depth; ++i) {
        LayerSpec l;
        if (pairwise) {
            l.width = 2 * static_cast<int>(testutil::rand_long(rng, 1, max_width / 2));
            l.link_group = 2;
        } else {
            l.width = static_cast<int>(testutil::rand_long(rng, 1, max_width));
            l.link_group = 1;
        }
        for (int j = 0; j < l.width; ++j) {
            std::vector<Rat> row;
            for (int m = 0; m < prev; ++m) row.push_back(testutil::rand_rat(rng, 3));
            l.weights.push_back(std::move(row));
            l.biases.push_back(testutil::rand_rat(rng, 3));
        }
        prev = l.width;
        net.layers.push_back(std::move(l));
    }
    for (int m = 0; m < prev; ++m) net.output.coeffs.push_back(testutil::rand_rat(rng, 3));
    net.output.bias = testutil::rand_rat(rng, 3);
    return net;
}

Rat cell_area2(const CellInfo& c) {
    Rat a(0);
    for (std::size_t i = 0; i < c.verts.size(); ++i) {
        const auto& p = c.verts[i];
        const auto& q = c.verts[(i + 1) % c.verts.size()];
        a += p[0] * q[1] - q[0] * p[1];
    }
    return a;
}

} // namespace

TEST_CASE("single neuron splits the box into two regions") {
    NetworkSpec net = single_layer_net2({{rat(1), rat(0)}}, {rat(0)}, {rat(1)});
    RegionDecomposition dec = enumerate_regions(net, unit_box());
    CHECK(dec.activation_cell_count == 2);
    CHECK(dec.merged_region_count == 2);
}

TEST_CASE("four generic lines cut eleven regions") {
    NetworkSpec net = single_layer_net2(
        {{rat(1), rat(0)}, {rat(0), rat(1)}, {rat(1), rat(1)}, {rat(1), rat(-1)}},
        {rat(0), rat(0), rat(-1, 2), rat(1, 4)}, {rat(1), rat(1, 2), rat(1, 4), rat(1, 8)});
    RegionDecomposition dec = enumerate_regions(net, unit_box());
    CHECK(dec.merged_region_count == 11);
    CHECK(dec.merged_region_count <= dec.activation_cell_count);
    CHECK(Int(dec.merged_region_count) <= region_upper_bound(shape_of(net)));
}

TEST_CASE("pairwise-linked single layer stays within its region bound") {
    NetworkSpec net = single_layer_net2(
        {{rat(1), rat(1, 3)}, {rat(1, 2), rat(-1)}, {rat(-2, 3), rat(1)}, {rat(1), rat(2)}},
        {rat(1, 4), rat(-1, 3), rat(1, 2), rat(-1, 5)}, {rat(1), rat(1, 2), rat(-1), rat(2)}, 2);
    RegionBoundCheck chk = check_region_bound(net, unit_box());
    CHECK(chk.bound == 29);
    CHECK(chk.ok);
}

TEST_CASE("cell areas tile the box exactly and centroid maps match the network") {
    Rng rng(909);
    for (int it = 0; it < 12; ++it) {
        NetworkSpec net = rand_net2(rng, 4, 2, it % 2 == 0);
        Box2 box = unit_box();
        RegionDecomposition dec = enumerate_regions(net, box);
        Rat twice_total(0);
        for (const auto& c : dec.cells) twice_total += cell_area2(c);
        CHECK(twice_total == rat(8)); // 2 * area of [-1,1]^2

        for (const auto& c : dec.cells) {
            Rat sx(0), sy(0);
            for (const auto& p : c.verts) {
                sx += p[0];
                sy += p[1];
            }
            Rat cx = Rat(sx / static_cast<long>(c.verts.size()));
            Rat cy = Rat(sy / static_cast<long>(c.verts.size()));
            std::array<Rat, 2> pt{cx, cy};
            Rat via_map = Rat(c.output_map[0] * cx + c.output_map[1] * cy + c.output_map[2]);
            CHECK(via_map == forward_point(net, std::span<const Rat>(pt.data(), 2)));
        }
    }
}

TEST_CASE("random 2-input nets never exceed the region bound") {
    Rng rng(910);
    for (int it = 0; it < 30; ++it) {
        NetworkSpec net = rand_net2(rng, 4, 2, it % 2 == 0);
        RegionBoundCheck chk = check_region_bound(net, unit_box());
        CHECK(chk.ok);
        CHECK(chk.merged_regions <= chk.activation_cells);
    }
}

TEST_CASE("lifting a univariate net matches the 1-D piece count") {
    Rng rng(911);
    for (int it = 0; it < 25; ++it) {
        NetworkSpec net1 = testutil::rand_net(rng, 4, 2, it % 2 == 0);
        NetworkSpec net2 = net1;
        net2.input_dim = 2;
        for (auto& l : net2.layers) l.weights.clear();
        for (std::size_t li = 0; li < net1.layers.size(); ++li) {
            for (const auto& row : net1.layers[li].weights) {
                std::vector<Rat> r2 = row;
                if (li == 0) r2.push_back(rat(0)); // y gets weight zero
                net2.layers[li].weights.push_back(std::move(r2));
            }
        }

        Pwl f = forward_symbolic(net1);
        Rat bound(2);
        for (const auto& b : f.breakpoints()) {
            Rat a = abs(b.x);
            if (a >= bound) bound = Rat(a + 1);
        }
        Box2 box{Interval(Rat(-bound), bound), Interval(rat(-1), rat(1))};
        RegionDecomposition dec = enumerate_regions(net2, box);
        CHECK(dec.merged_region_count == analyze(f).pieces);
    }
}

TEST_CASE("degenerate boxes are rejected") {
    NetworkSpec net = single_layer_net2({{rat(1), rat(0)}}, {rat(0)}, {rat(1)});
    CHECK_THROWS_AS(enumerate_regions(net, Box2{Interval(rat(0), rat(0)), Interval(rat(0), rat(1))}),
                    std::invalid_argument);
}

TEST_CASE("decomposition exports are well-formed") {
    NetworkSpec net = single_layer_net2({{rat(1), rat(1)}}, {rat(0)}, {rat(1)});
    RegionDecomposition dec = enumerate_regions(net, unit_box());
    std::string j = dec.to_json();
    CHECK(j.find("\"merged_regions\": 2") != std::string::npos);
    std::string svg = dec.to_svg();
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polygon") != std::string::npos);
}
