#include "pwlnet/constructions.hpp"

#include "pwlnet/bounds.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace pwlnet;

namespace {

void check_catalog_invariants(const ConstructionResult& r) {
    CHECK(validate(r.net).empty());
    // round-trips through the wire format
    NetworkSpec back = parse_network(serialize(r.net));
    CHECK(serialize(back) == serialize(r.net));
    // engine count respects the claim and, where defined, the closed-form bound
    long pieces = exact_pieces(r);
    CHECK(Int(pieces) >= r.guaranteed_pieces);
    if (r.tight) CHECK(Int(pieces) == r.guaranteed_pieces);
    std::optional<Int> upper;
    try {
        ArchShape shape = shape_of(r.net);
        if (shape.input_dim == 1) upper = piece_upper_bound(shape).upper;
    } catch (const unsupported_error&) {
        // dense shapes have no closed-form upper bound
    }
    if (upper) CHECK(Int(pieces) <= *upper);
}

} // namespace

TEST_CASE("two-layer feedforward product construction") {
    for (auto [w1, w2, want] : {std::tuple<long, long, long>{3, 2, 12}, {4, 2, 15}, {3, 3, 16}, {5, 4, 30}}) {
        ConstructionResult r = gen_twoproduct(w1, w2);
        CHECK(exact_pieces(r) == want);
        check_catalog_invariants(r);
    }
    CHECK_THROWS_AS(gen_twoproduct(2, 2), validation_error);
}

TEST_CASE("deep feedforward product construction") {
    for (auto [w, k, want] : {std::tuple<long, long, long>{3, 2, 16}, {3, 3, 64}, {5, 2, 24}}) {
        ConstructionResult r = gen_width3_4k(w, k);
        CHECK(exact_pieces(r) == want);
        check_catalog_invariants(r);
    }
}

TEST_CASE("two-layer pairwise-linked tight construction") {
    ConstructionResult r64 = gen_intra_twolayer(6, 4);
    CHECK(exact_pieces(r64) == 70);
    CHECK(Int(70) == piece_upper_bound(ArchShape::uniform({6, 4}, LinkMode::pairwise)).upper);
    check_catalog_invariants(r64);

    ConstructionResult r66 = gen_intra_twolayer(6, 6);
    CHECK(exact_pieces(r66) == 100);
    check_catalog_invariants(r66);

    ConstructionResult r84 = gen_intra_twolayer(8, 4);
    CHECK(exact_pieces(r84) == 13 * 7);
    check_catalog_invariants(r84);

    ConstructionResult r10 = gen_intra_twolayer(10, 8);
    CHECK(exact_pieces(r10) == 16 * 13);
    check_catalog_invariants(r10);

    CHECK_THROWS_AS(gen_intra_twolayer(5, 4), validation_error);
    CHECK_THROWS_AS(gen_intra_twolayer(6, 2), validation_error);
}

TEST_CASE("pairwise-linked sawtooth construction") {
    ConstructionResult r2 = gen_intra_sawtooth({2});
    CHECK(exact_pieces(r2) == 3);

    ConstructionResult r4 = gen_intra_sawtooth({4});
    CHECK(exact_pieces(r4) == 6);
    check_catalog_invariants(r4);

    ConstructionResult r44 = gen_intra_sawtooth({4, 4});
    CHECK(exact_pieces(r44) == 36);
    check_catalog_invariants(r44);

    ConstructionResult r22 = gen_intra_sawtooth({2, 2});
    CHECK(exact_pieces(r22) == 9); // the composed wave squares the per-layer count

    ConstructionResult r24 = gen_intra_sawtooth({2, 4, 2});
    CHECK(exact_pieces(r24) == 3 * 6 * 3);

    // alternating slope signs on consecutive pieces over [0,1]
    Pwl f = forward_symbolic(r44.net);
    CHECK(is_sawtooth(f, 36, Interval(rat(0), rat(1))));
}

TEST_CASE("width-2 linked chain construction") {
    for (auto [k, want] : {std::pair<long, long>{2, 9}, {3, 23}, {5, 191}}) {
        ConstructionResult r = gen_width2_intra(k);
        CHECK(exact_pieces(r) == want);
        check_catalog_invariants(r);
    }
    CHECK_THROWS_AS(gen_width2_intra(1), validation_error);
}

TEST_CASE("one-layer all-linked construction") {
    for (auto [w, want] : {std::pair<long, long>{1, 2}, {2, 4}, {4, 11}, {6, 22}, {8, 37}}) {
        ConstructionResult r = gen_all_linked_onelayer(w);
        CHECK(exact_pieces(r) == want);
        check_catalog_invariants(r);
    }
}

TEST_CASE("deep all-linked width-3 chain") {
    ConstructionResult r1 = gen_all_linked_5k(1);
    CHECK(exact_pieces(r1) >= 5);
    check_catalog_invariants(r1);

    ConstructionResult r2 = gen_all_linked_5k(2);
    CHECK(exact_pieces(r2) >= 25);

    ConstructionResult r3 = gen_all_linked_5k(3);
    CHECK(exact_pieces(r3) >= 125);
    check_catalog_invariants(r3);
}

TEST_CASE("deep all-linked width-4 chain") {
    ConstructionResult r1 = gen_all_linked_9k(1);
    CHECK(exact_pieces(r1) >= 9);
    check_catalog_invariants(r1);

    ConstructionResult r2 = gen_all_linked_9k(2);
    CHECK(exact_pieces(r2) >= 81);
    check_catalog_invariants(r2);
}

TEST_CASE("resnet sawtooth construction") {
    ConstructionResult r1 = gen_resnet_sawtooth(1);
    CHECK(exact_pieces(r1) == 2);

    ConstructionResult r3 = gen_resnet_sawtooth(3);
    CHECK(exact_pieces(r3) == 8);
    check_catalog_invariants(r3);

    ConstructionResult r10 = gen_resnet_sawtooth(10);
    CHECK(exact_pieces(r10) == 1024);
    REQUIRE(r10.sawtooth.has_value());
    CHECK(is_sawtooth(forward_symbolic(r10.net), r10.sawtooth->pieces, r10.sawtooth->interval));
    check_catalog_invariants(r10);
}

TEST_CASE("dense-linked construction") {
    ConstructionResult r1 = gen_densenet({3});
    CHECK(exact_pieces(r1) >= 8);
    check_catalog_invariants(r1);

    ConstructionResult r2 = gen_densenet({3, 3});
    CHECK(exact_pieces(r2) >= 50);
    check_catalog_invariants(r2);

    CHECK_THROWS_AS(gen_densenet({4}), unsupported_error);
}

TEST_CASE("mirror composition sawtooth") {
    ConstructionResult r = gen_telgarsky(2, 4);
    CHECK(exact_pieces(r) == 16);
    check_catalog_invariants(r);

    ConstructionResult m1 = gen_telgarsky(5, 1);
    CHECK(exact_pieces(m1) == 5);

    ConstructionResult deep = gen_telgarsky(6, 4);
    CHECK(exact_pieces(deep) == 1296);
    REQUIRE(deep.sawtooth.has_value());
    CHECK(deep.sawtooth->pieces == 1296);

    // the dense-sampling oracle agrees on a small instance
    Pwl f = forward_symbolic(r.net);
    CHECK(testutil::count_pieces_sampled(f, rat(0), rat(1), 16 * 12) == 16);
}
