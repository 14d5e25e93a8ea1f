#include "pwlnet/bounds.hpp"

#include <doctest.h>

using namespace pwlnet;

TEST_CASE("piece_upper_bound closed forms") {
    CHECK(piece_upper_bound(ArchShape::uniform({3, 2}, LinkMode::feedforward)).upper == 12);
    CHECK(piece_upper_bound(ArchShape::uniform({6, 4}, LinkMode::pairwise)).upper == 70);
    CHECK(piece_upper_bound(ArchShape::uniform({2, 2, 2}, LinkMode::feedforward)).upper == 21);
    CHECK(piece_upper_bound(ArchShape::uniform({2, 2}, LinkMode::feedforward)).upper == 7);
    CHECK(piece_upper_bound(ArchShape::uniform({4}, LinkMode::all_linked)).upper == 11);
    CHECK(piece_upper_bound(ArchShape::uniform({1, 1, 1}, LinkMode::resnet)).upper == 8);

    CHECK_THROWS_AS(piece_upper_bound(ArchShape::uniform({3, 4}, LinkMode::pairwise)), validation_error);
    CHECK_THROWS_AS(piece_upper_bound(ArchShape::uniform({3}, LinkMode::dense)), unsupported_error);
}

TEST_CASE("piece_upper_bound formula ids and catalog lower bounds") {
    auto ff = piece_upper_bound(ArchShape::uniform({3, 2}, LinkMode::feedforward));
    CHECK(ff.formula_id == "feedforward_product");
    REQUIRE(ff.construction_lower.has_value());
    CHECK(*ff.construction_lower == 12); // tight

    auto w2 = piece_upper_bound(ArchShape::uniform({2, 2, 2}, LinkMode::feedforward));
    CHECK(w2.formula_id == "width2_feedforward");
    REQUIRE(w2.construction_lower.has_value());
    CHECK(*w2.construction_lower == 8); // mirror-map composition

    auto p2 = piece_upper_bound(ArchShape::uniform({2, 2, 2}, LinkMode::pairwise));
    REQUIRE(p2.construction_lower.has_value());
    CHECK(*p2.construction_lower == 27); // wave-gadget composition beats the width-2 chain (23)
}

TEST_CASE("zaslavsky sums") {
    CHECK(zaslavsky_sum(0, 5) == 1);
    CHECK(zaslavsky_sum(7, 2) == 29);
    CHECK(zaslavsky_sum(3, 3) == 8);
    CHECK(zaslavsky_sum(3, 9) == 8);
    CHECK(zaslavsky_sum(4, 2) == 11);
}

TEST_CASE("region_upper_bound") {
    ArchShape ff = ArchShape::uniform({4}, LinkMode::feedforward, 2);
    CHECK(region_upper_bound(ff) == 11);

    ArchShape in = ArchShape::uniform({4}, LinkMode::pairwise, 2);
    CHECK(region_upper_bound(in) == 29);

    // input_dim 1 collapses to the piece bound
    ArchShape ff1 = ArchShape::uniform({3, 2}, LinkMode::feedforward, 1);
    CHECK(region_upper_bound(ff1) == piece_upper_bound(ff1).upper);
    ArchShape in1 = ArchShape::uniform({6, 4}, LinkMode::pairwise, 1);
    CHECK(region_upper_bound(in1) == piece_upper_bound(in1).upper);
}

TEST_CASE("dense_lower_bound") {
    CHECK(dense_lower_bound({3}) == 8);
    CHECK(dense_lower_bound({3, 3}) == 50);
    CHECK(dense_lower_bound({1}) == 2);
}

TEST_CASE("piece_upper_bound is monotone in widths and depth") {
    for (LinkMode mode : {LinkMode::feedforward, LinkMode::pairwise, LinkMode::all_linked}) {
        long step = mode == LinkMode::pairwise ? 2 : 1;
        long wmin = step;
        for (long w1 = wmin; w1 <= 6; w1 += step) {
            for (long w2 = wmin; w2 <= 6; w2 += step) {
                Int b2 = piece_upper_bound(ArchShape::uniform({w1, w2}, mode)).upper;
                CHECK(b2 >= piece_upper_bound(ArchShape::uniform({w1}, mode)).upper);
                if (w2 + step <= 6) {
                    Int b2w = piece_upper_bound(ArchShape::uniform({w1, w2 + step}, mode)).upper;
                    CHECK(b2w >= b2);
                }
                Int b3 = piece_upper_bound(ArchShape::uniform({w1, w2, wmin}, mode)).upper;
                CHECK(b3 >= b2);
            }
        }
    }
}

TEST_CASE("pairwise linking strictly beats the feedforward bound at widths >= 2") {
    for (long w1 = 2; w1 <= 8; w1 += 2)
        for (long w2 = 2; w2 <= 8; w2 += 2) {
            Int linked = piece_upper_bound(ArchShape::uniform({w1, w2}, LinkMode::pairwise)).upper;
            Int plain = piece_upper_bound(ArchShape::uniform({w1, w2}, LinkMode::feedforward)).upper;
            CHECK(linked > plain);
        }
}

TEST_CASE("catalog lower bounds never exceed the upper bound") {
    for (LinkMode mode : {LinkMode::feedforward, LinkMode::pairwise, LinkMode::all_linked}) {
        long step = mode == LinkMode::pairwise ? 2 : 1;
        for (long w1 = step; w1 <= 8; w1 += step)
            for (long w2 = step; w2 <= 8; w2 += step)
                for (int depth = 1; depth <= 3; ++depth) {
                    std::vector<long> ws{w1};
                    if (depth >= 2) ws.push_back(w2);
                    if (depth >= 3) ws.push_back(w1);
                    auto rep = piece_upper_bound(ArchShape::uniform(ws, mode));
                    if (rep.construction_lower) CHECK(*rep.construction_lower <= rep.upper);
                }
    }
}
