#include "pwlnet/net.hpp"

#include "test_util.hpp"

#include <doctest.h>

using namespace pwlnet;
using testutil::Rng;

namespace {

NetworkSpec resnet_sawtooth_spec(int k) {
    NetworkSpec net;
    net.arch = Arch::resnet_scalar;
    for (int i = 1; i <= k; ++i) {
        LayerSpec l;
        l.width = 1;
        l.weights = {{rat(1)}};
        l.biases = {i == 1 ? rat(0) : rat(2) - rat(4) / rat(1 << i)}; // 2 - 2^(2-i)
        l.residual_coeff = rat(-2);
        net.layers.push_back(std::move(l));
    }
    net.output.coeffs = {rat(-2)};
    net.output.bias = rat(0);
    return net;
}

} // namespace

TEST_CASE("forward_symbolic: single relu") {
    NetworkSpec net;
    net.layers.push_back({1, 1, {}, {{rat(1)}}, {rat(0)}});
    net.output.coeffs = {rat(1)};
    Pwl f = forward_symbolic(net);
    CHECK(f == relu(Pwl::identity()));
}

TEST_CASE("forward_symbolic: one-layer linked wave gadget has 3 pieces") {
    // width 2, cap 1, step 1/3
    Rat delta = rat(1, 3);
    NetworkSpec net;
    net.domain = Interval(rat(0), rat(1));
    LayerSpec l;
    l.width = 2;
    l.link_group = 2;
    l.weights = {{rat(3)}, {rat(1)}};
    l.biases = {-3 * delta, delta};
    net.layers.push_back(std::move(l));
    net.output.coeffs = {rat(1, 3), rat(1)};
    net.output.bias = -delta;
    Pwl f = forward_symbolic(net);
    CHECK(analyze(f).pieces == 3);
    CHECK(is_sawtooth(f, 3, Interval(rat(0), rat(1))));
}

TEST_CASE("forward_symbolic: scalar resnet doubles pieces per layer") {
    NetworkSpec net = resnet_sawtooth_spec(3);
    REQUIRE(validate(net).empty());
    Pwl f = forward_symbolic(net);
    CHECK(analyze(f).pieces == 8);
}

TEST_CASE("validate flags violations as data") {
    NetworkSpec ok = resnet_sawtooth_spec(2);
    CHECK(validate(ok).empty());

    NetworkSpec bad;
    LayerSpec l;
    l.width = 3;
    l.link_group = 2;
    l.weights = {{rat(1)}, {rat(1)}, {rat(1)}};
    l.biases = {rat(0), rat(0), rat(0)};
    bad.layers.push_back(std::move(l));
    bad.output.coeffs = {rat(1), rat(1), rat(1)};
    auto v = validate(bad);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("link_group must divide") != std::string::npos);

    NetworkSpec rn = resnet_sawtooth_spec(2);
    rn.layers[1].width = 2;
    rn.layers[1].weights = {{rat(1)}, {rat(1)}};
    rn.layers[1].biases = {rat(0), rat(0)};
    auto v2 = validate(rn);
    CHECK(!v2.empty());
}

TEST_CASE("forward_symbolic agrees with pointwise forward evaluation") {
    Rng rng(42);
    for (int it = 0; it < 60; ++it) {
        NetworkSpec net = testutil::rand_net(rng, 4, 3, it % 2 == 1);
        Pwl f = forward_symbolic(net);
        for (int p = 0; p < 16; ++p) {
            Rat x = testutil::rand_rat(rng, 16);
            CHECK(f(x) == forward_point(net, std::span<const Rat>(&x, 1)));
        }
    }
}

TEST_CASE("trace shapes match and the traced output is the network function") {
    Rng rng(43);
    NetworkSpec net = testutil::rand_net(rng, 4, 3, true);
    ForwardTrace tr;
    Pwl f = forward_symbolic(net, &tr);
    REQUIRE(tr.pre.size() == net.layers.size());
    REQUIRE(tr.post.size() == net.layers.size());
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        CHECK(tr.pre[i].size() == static_cast<std::size_t>(net.layers[i].width));
        CHECK(tr.post[i].size() == static_cast<std::size_t>(net.layers[i].width));
    }
    CHECK(equals(tr.output, f));
    for (int p = 0; p < 100; ++p) {
        Rat x = testutil::rand_rat(rng, 20);
        CHECK(f(x) == forward_point(net, std::span<const Rat>(&x, 1)));
    }
}

TEST_CASE("serialize/parse round-trips random specs") {
    Rng rng(44);
    for (int it = 0; it < 100; ++it) {
        NetworkSpec net = testutil::rand_net(rng, 4, 3, it % 2 == 0);
        if (it % 3 == 0) net.domain = Interval(rat(-1), rat(2));
        std::string text = serialize(net);
        NetworkSpec back = parse_network(text);
        CHECK(serialize(back) == text);
        CHECK(equals(forward_symbolic(back), forward_symbolic(net)));
    }
}

TEST_CASE("parse rejects malformed documents with diagnostics") {
    CHECK_THROWS_AS(parse_network("{"), parse_error);
    CHECK_THROWS_AS(parse_network(R"({"input_dim":1})"), parse_error);

    std::string zero_den = R"({
      "input_dim": 1, "arch": "layered",
      "layers": [{"width": 1, "link_group": 1, "weights": [["1/0"]], "biases": ["0/1"]}],
      "output": {"coeffs": ["1/1"], "bias": "0/1"},
      "domain": null
    })";
    CHECK_THROWS_AS(parse_network(zero_den), parse_error);
    try {
        parse_network(zero_den);
    } catch (const parse_error& e) {
        CHECK(std::string(e.what()).find("layers[0].weights[0][0]") != std::string::npos);
    }
}

TEST_CASE("hand-written scalar-resnet document evaluates to 4 pieces") {
    std::string text = R"({
      "input_dim": 1,
      "arch": "resnet_scalar",
      "layers": [
        {"width": 1, "link_group": 1, "weights": [["1/1"]], "biases": ["0/1"], "residual_coeff": "-2/1"},
        {"width": 1, "link_group": 1, "weights": [["1/1"]], "biases": ["1/1"], "residual_coeff": "-2/1"}
      ],
      "output": {"coeffs": ["-2/1"], "bias": "0/1"},
      "domain": null
    })";
    NetworkSpec net = parse_network(text);
    REQUIRE(validate(net).empty());
    CHECK(analyze(forward_symbolic(net)).pieces == 4);
}

TEST_CASE("permuting feedforward neurons preserves the function") {
    Rng rng(45);
    for (int it = 0; it < 40; ++it) {
        NetworkSpec net = testutil::rand_net(rng, 4, 2, false);
        std::size_t li = static_cast<std::size_t>(testutil::rand_long(rng, 0, net.depth() - 1));
        std::vector<int> perm(static_cast<std::size_t>(net.layers[li].width));
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
        for (std::size_t i = perm.size(); i > 1; --i)
            std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng() % i)]);
        NetworkSpec p = permute_layer_neurons(net, li, perm);
        CHECK(equals(forward_symbolic(net), forward_symbolic(p)));
    }
}

TEST_CASE("silencing the even chain neurons reduces to the odd subnetwork") {
    // pairwise-linked layer whose even neurons never activate on the domain
    NetworkSpec net;
    net.domain = Interval(rat(0), rat(1));
    LayerSpec l;
    l.width = 4;
    l.link_group = 2;
    l.weights = {{rat(2)}, {rat(1)}, {rat(-1)}, {rat(3)}};
    l.biases = {rat(1, 2), rat(-100), rat(1), rat(-100)};
    net.layers.push_back(l);
    net.output.coeffs = {rat(1), rat(5), rat(-2), rat(7)};
    net.output.bias = rat(1, 3);

    NetworkSpec odd;
    odd.domain = net.domain;
    LayerSpec ol;
    ol.width = 2;
    ol.link_group = 1;
    ol.weights = {{rat(2)}, {rat(-1)}};
    ol.biases = {rat(1, 2), rat(1)};
    odd.layers.push_back(ol);
    odd.output.coeffs = {rat(1), rat(-2)};
    odd.output.bias = rat(1, 3);

    CHECK(equals(forward_symbolic(net), forward_symbolic(odd)));
}

TEST_CASE("rewrite_first_layer_linked: two-relu example") {
    // sigma(x) + sigma(2x - 1)
    NetworkSpec net;
    LayerSpec l;
    l.width = 2;
    l.link_group = 1;
    l.weights = {{rat(1)}, {rat(2)}};
    l.biases = {rat(0), rat(-1)};
    net.layers.push_back(l);
    net.output.coeffs = {rat(1), rat(1)};

    NetworkSpec linked = rewrite_first_layer_linked(net);
    CHECK(linked.layers[0].partition() == std::vector<int>{2});
    CHECK(linked.layers[0].weights[0][0] == rat(1));
    CHECK(linked.layers[0].weights[1][0] == rat(2));
    CHECK(equals(forward_symbolic(net), forward_symbolic(linked)));
}

TEST_CASE("rewrite_first_layer_linked: opposite signs are not applicable") {
    NetworkSpec net;
    LayerSpec l;
    l.width = 2;
    l.link_group = 1;
    l.weights = {{rat(1)}, {rat(-2)}};
    l.biases = {rat(0), rat(-1)};
    net.layers.push_back(l);
    net.output.coeffs = {rat(1), rat(1)};
    CHECK_THROWS_AS(rewrite_first_layer_linked(net), not_applicable_error);
}

TEST_CASE("rewrite_first_layer_linked: fuzz preserves the function exactly") {
    Rng rng(46);
    int done = 0;
    while (done < 60) {
        NetworkSpec net = testutil::rand_net(rng, 4, 2, false);
        if (net.layers[0].width < 2) continue;
        try {
            NetworkSpec linked = rewrite_first_layer_linked(net);
            CHECK(equals(forward_symbolic(net), forward_symbolic(linked)));
            ++done;
        } catch (const not_applicable_error&) {
            continue;
        }
    }
}
