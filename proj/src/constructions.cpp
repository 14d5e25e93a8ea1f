#include "pwlnet/constructions.hpp"

#include "pwlnet/bounds.hpp"

#include <algorithm>
#include <stdexcept>

namespace pwlnet {

namespace {

/// Affine functional over the outputs of the layer built so far.
struct Combo {
    std::vector<Rat> coeffs;
    Rat bias{0};
};

/// Append a layer whose neuron j computes sigma(alpha_j * u + beta_j [- chain]),
/// where u is the functional `in` over the previous layer. Returns the rows.
LayerSpec layer_from_scalar(const Combo& in, const std::vector<std::pair<Rat, Rat>>& neurons, int link_group) {
    LayerSpec l;
    l.width = static_cast<int>(neurons.size());
    l.link_group = link_group;
    for (const auto& [alpha, beta] : neurons) {
        std::vector<Rat> row;
        row.reserve(in.coeffs.size());
        for (const auto& c : in.coeffs) row.push_back(Rat(alpha * c));
        l.weights.push_back(std::move(row));
        l.biases.push_back(Rat(alpha * in.bias + beta));
    }
    return l;
}

Combo input_combo() { return Combo{{Rat(1)}, Rat(0)}; }

void set_output(NetworkSpec& net, const Combo& c) {
    net.output.coeffs = c.coeffs;
    net.output.bias = c.bias;
}

void check(bool ok, const char* what) {
    if (!ok) throw validation_error(std::string("construction hypothesis violated: ") + what);
}

void audit(const ConstructionResult& r) {
    long pieces = exact_pieces(r);
    bool ok = r.tight ? Int(pieces) == r.guaranteed_pieces : Int(pieces) >= r.guaranteed_pieces;
    if (!ok)
        throw std::logic_error("construction audit failed: " + r.claim_ref + " produced " +
                               std::to_string(pieces) + " pieces, guaranteed " + r.guaranteed_pieces.get_str());
    if (r.sawtooth) {
        Pwl f = forward_symbolic(r.net);
        if (!is_sawtooth(f, r.sawtooth->pieces, r.sawtooth->interval))
            throw std::logic_error("construction audit failed: " + r.claim_ref + " is not the claimed sawtooth");
    }
}

/// First feedforward layer shared by the product constructions: w relu ramps
/// whose weighted sum is a unit zigzag (breakpoint values alternating 0 and 1,
/// slopes alternating in sign, tails unbounded).
LayerSpec zigzag_layer(long w, Combo& out) {
    LayerSpec l;
    l.width = static_cast<int>(w);
    l.link_group = 1;
    auto add = [&](long num, long den, long bnum, long bden, const Rat& coef) {
        l.weights.push_back({rat(num, den)});
        l.biases.push_back(rat(bnum, bden));
        out.coeffs.push_back(coef);
    };
    add(3, 1, 0, 1, rat(2, 3));
    add(-1, 1, 3, 1, rat(1));
    add(3, 2, -3, 2, rat(-1));
    for (long j = 4; j <= w; ++j) add(-2, 1, -2 * (j - 3), 1, rat(j % 2 == 0 ? -1 : 1));
    out.bias = rat(-3);
    return l;
}

} // namespace

long exact_pieces(const ConstructionResult& r) { return analyze(forward_symbolic(r.net)).pieces; }

ConstructionResult gen_twoproduct(long w1, long w2) {
    check(w1 >= 3, "two-layer product construction needs w1 >= 3");
    check(w2 >= 2, "two-layer product construction needs w2 >= 2");

    ConstructionResult r;
    r.claim_ref = "feedforward_two_layer_tight";
    r.tight = true;
    r.guaranteed_pieces = Int(w1 + 1) * Int(w2 + 1);

    Combo s;
    r.net.layers.push_back(zigzag_layer(w1, s));

    // thresholds j/(w2+1) sit strictly inside the zigzag band (0,1); the first
    // neuron is flipped so the zigzag's value-0 breakpoints survive downstream
    LayerSpec l2;
    l2.width = static_cast<int>(w2);
    l2.link_group = 1;
    for (long j = 1; j <= w2; ++j) {
        Rat t = rat(j, w2 + 1);
        std::vector<Rat> row;
        for (const auto& c : s.coeffs) row.push_back(j == 1 ? Rat(-c) : c);
        l2.weights.push_back(std::move(row));
        l2.biases.push_back(j == 1 ? Rat(t - s.bias) : Rat(s.bias - t));
    }
    r.net.layers.push_back(std::move(l2));
    r.net.output.coeffs.assign(static_cast<std::size_t>(w2), rat(1));
    r.net.output.bias = rat(0);

    audit(r);
    return r;
}

ConstructionResult gen_width3_4k(long w, long k) {
    check(w >= 3, "deep product construction needs first width >= 3");
    check(k >= 2, "deep product construction needs depth >= 2");

    ConstructionResult r;
    r.claim_ref = "feedforward_deep_tight";
    r.tight = true;
    r.guaranteed_pieces = Int(w + 1);
    for (long i = 1; i < k; ++i) r.guaranteed_pieces *= 4;

    Combo u;
    r.net.layers.push_back(zigzag_layer(w, u));

    // each further layer folds the per-piece range [0, cap] four ways
    Rat cap(1);
    for (long i = 2; i <= k; ++i) {
        std::vector<std::pair<Rat, Rat>> neurons{
            {rat(2), Rat(-cap / 3)},
            {rat(-1), Rat(2 * cap / 3)},
            {rat(3, 2), Rat(-cap / 2)},
        };
        r.net.layers.push_back(layer_from_scalar(u, neurons, 1));
        u = Combo{{rat(1), rat(1), rat(-1)}, Rat(-cap / 2)};
        cap /= 6;
    }
    set_output(r.net, u);

    audit(r);
    return r;
}

ConstructionResult gen_intra_twolayer(long w1, long w2) {
    check(w1 >= 6 && w1 % 2 == 0, "two-layer linked construction needs even w1 >= 6");
    check(w2 >= 4 && w2 % 2 == 0, "two-layer linked construction needs even w2 >= 4");

    ConstructionResult r;
    r.claim_ref = "pairwise_linked_two_layer_tight";
    r.tight = true;
    r.guaranteed_pieces = Int(3 * w1 / 2 + 1) * Int(3 * w2 / 2 + 1);

    // First layer: three base pairs plus local triangle pairs marching left.
    LayerSpec l1;
    l1.width = static_cast<int>(w1);
    l1.link_group = 2;
    Combo g;
    auto add = [&](const Rat& a, const Rat& b, const Rat& coef) {
        l1.weights.push_back({a});
        l1.biases.push_back(b);
        g.coeffs.push_back(coef);
    };
    add(rat(9, 2), rat(-27), rat(-2, 3));
    add(rat(3, 2), rat(0), rat(-4, 3));
    add(rat(-2), rat(2), rat(5, 6));
    add(rat(-1), rat(7, 4), rat(2));
    add(rat(-7, 2), rat(-7, 4), rat(-16, 21));
    add(rat(-2), rat(8), rat(-4, 3));
    for (long p = 0; p < (w1 - 6) / 2; ++p) {
        long q = p / 2;
        bool type_a = p % 2 == 0;
        Rat a = type_a ? rat(-13 - 16 * q) : rat(-21 - 16 * q);
        Rat co = type_a ? rat(2, 5) : rat(-2, 5);
        Rat ce = type_a ? rat(1) : rat(-1);
        add(rat(-5), Rat(5 * a - 15), co);
        add(rat(-2), Rat(2 * a), ce);
    }
    g.bias = rat(0);
    r.net.layers.push_back(l1);

    // audit the first-layer zigzag and measure its level band exactly
    NetworkSpec probe;
    probe.layers.push_back(l1);
    probe.output.coeffs = g.coeffs;
    probe.output.bias = g.bias;
    Pwl gw = forward_symbolic(probe);
    const auto& bps = gw.breakpoints();
    if (static_cast<long>(bps.size()) != 3 * w1 / 2)
        throw std::logic_error("linked first layer: wrong zigzag breakpoint count");
    std::optional<Rat> minima_max, maxima_min;
    {
        std::vector<Rat> slopes;
        slopes.push_back(gw.left_slope());
        for (std::size_t i = 0; i + 1 < bps.size(); ++i)
            slopes.push_back(Rat((bps[i + 1].y - bps[i].y) / (bps[i + 1].x - bps[i].x)));
        slopes.push_back(gw.right_slope());
        for (std::size_t i = 0; i + 1 < slopes.size(); ++i) {
            if (slopes[i] * slopes[i + 1] >= 0)
                throw std::logic_error("linked first layer: zigzag slopes do not alternate");
            if (slopes[i] > 0) { // local maximum at breakpoint i
                if (!maxima_min || bps[i].y < *maxima_min) maxima_min = bps[i].y;
            } else {
                if (!minima_max || bps[i].y > *minima_max) minima_max = bps[i].y;
            }
        }
        if (!minima_max || !maxima_min || !(*minima_max < *maxima_min))
            throw std::logic_error("linked first layer: no common level band");
    }

    // Second layer: per linked pair, one threshold neuron and one chained
    // neuron slicing two more levels, alternating the orientation of g.
    long slots = 3 * w2 / 2;
    auto level = [&](long idx) -> Rat { // idx in 1..slots
        return Rat(*minima_max + (*maxima_min - *minima_max) * rat(idx, slots + 1));
    };
    LayerSpec l2;
    l2.width = static_cast<int>(w2);
    l2.link_group = 2;
    auto add2 = [&](const Rat& scale, const Rat& bias) {
        std::vector<Rat> row;
        for (const auto& c : g.coeffs) row.push_back(Rat(scale * c));
        l2.weights.push_back(std::move(row));
        l2.biases.push_back(Rat(scale * g.bias + bias));
    };
    for (long q = 0; q < w2 / 2; ++q) {
        Rat u1 = level(3 * q + 1), mid = level(3 * q + 2), u2 = level(3 * q + 3);
        if (q % 2 == 0) {
            Rat a = Rat((u2 - mid) / (u2 - u1));
            add2(rat(1), Rat(-mid));
            add2(a, Rat(-a * u1));
        } else {
            Rat v1 = Rat(-u2), vmid = Rat(-mid), v2 = Rat(-u1);
            Rat a = Rat((v2 - vmid) / (v2 - v1));
            add2(rat(-1), Rat(-vmid));
            add2(Rat(-a), Rat(-a * v1));
        }
    }
    r.net.layers.push_back(std::move(l2));
    for (long j = 0; j < w2; ++j) r.net.output.coeffs.push_back(rat(j % 2 == 0 ? 2 : 1));
    r.net.output.bias = rat(0);

    audit(r);
    return r;
}

ConstructionResult gen_intra_sawtooth(const std::vector<long>& widths) {
    check(!widths.empty(), "sawtooth construction needs at least one layer");
    for (long w : widths) check(w >= 2 && w % 2 == 0, "sawtooth construction needs even widths >= 2");

    ConstructionResult r;
    r.claim_ref = "pairwise_linked_sawtooth";
    r.tight = true;
    r.guaranteed_pieces = 1;
    for (long w : widths) r.guaranteed_pieces *= Int(3 * w / 2);

    r.net.domain = Interval(rat(0), rat(1));
    Combo u = input_combo();
    Rat cap(1);
    for (long w : widths) {
        Rat delta = Rat(2 * cap / (3 * w));
        std::vector<std::pair<Rat, Rat>> neurons;
        neurons.emplace_back(rat(3), Rat(-3 * delta));
        neurons.emplace_back(rat(1), delta);
        for (long j = 1; j <= w / 2 - 1; ++j) {
            neurons.emplace_back(rat(4), Rat(-4 * (3 * j + 1) * delta));
            neurons.emplace_back(rat(2), Rat(-6 * j * delta));
        }
        r.net.layers.push_back(layer_from_scalar(u, neurons, 2));

        Combo next;
        next.coeffs.push_back(rat(1, 3));
        next.coeffs.push_back(rat(1));
        for (long j = 1; j <= w / 2 - 1; ++j) {
            Rat sign = rat(j % 2 == 0 ? 1 : -1);
            next.coeffs.push_back(Rat(sign / 2));
            next.coeffs.push_back(sign);
        }
        next.bias = Rat(-delta);
        u = std::move(next);
        cap = delta;
    }
    set_output(r.net, u);

    long n = 1;
    for (long w : widths) n *= 3 * w / 2;
    r.sawtooth = SawtoothClaim{n, Interval(rat(0), rat(1))};

    audit(r);
    return r;
}

ConstructionResult gen_width2_intra(long k) {
    check(k >= 2, "width-2 linked chain needs depth >= 2");

    ConstructionResult r;
    r.claim_ref = "width2_linked_chain";
    r.tight = true;
    r.guaranteed_pieces = 7;
    for (long i = 2; i < k; ++i) r.guaranteed_pieces *= 3;
    r.guaranteed_pieces += 2;

    // layer 1: unit triangle on [-1, 1]
    LayerSpec l1;
    l1.width = 2;
    l1.link_group = 2;
    l1.weights = {{rat(2)}, {rat(1)}};
    l1.biases = {rat(0), rat(1)};
    r.net.layers.push_back(std::move(l1));

    // layer 2: triangle -> first flat-bottomed wave (constant c = 1/8)
    LayerSpec l2;
    l2.width = 2;
    l2.link_group = 2;
    l2.weights = {{rat(0), rat(-4)}, {rat(0), rat(-2)}};
    l2.biases = {rat(2), rat(3, 2)};
    r.net.layers.push_back(std::move(l2));

    Combo u{{rat(1, 4), rat(1)}, rat(-3, 8)};
    Rat c = rat(1, 8);

    // each further layer folds every wave unit into three, shrinking c by 8
    for (long i = 3; i <= k; ++i) {
        std::vector<std::pair<Rat, Rat>> neurons{{rat(2), rat(0)}, {rat(1), Rat(c / 2)}};
        r.net.layers.push_back(layer_from_scalar(u, neurons, 2));
        u = Combo{{rat(1, 4), rat(1)}, Rat(-3 * c / 8)};
        c /= 8;
    }
    set_output(r.net, u);

    audit(r);
    return r;
}

ConstructionResult gen_all_linked_onelayer(long w) {
    check(w >= 1, "one-layer all-linked construction needs w >= 1");

    ConstructionResult r;
    r.claim_ref = "all_linked_one_layer_tight";
    r.tight = true;
    r.guaranteed_pieces = Int(w + 1) * Int(w) / 2 + 1;

    LayerSpec l;
    l.width = static_cast<int>(w);
    l.link_group = static_cast<int>(w);

    std::vector<Pwl> fs;
    Pwl x = Pwl::identity();
    auto add_neuron = [&](const Rat& slope, const Rat& bias) {
        l.weights.push_back({slope});
        l.biases.push_back(bias);
        if (fs.empty())
            fs.push_back(relu(linear_combination({{slope, x}}, bias)));
        else
            fs.push_back(relu(linear_combination({{slope, x}, {rat(-1), fs.back()}}, bias)));
    };

    add_neuron(rat(1), rat(1));
    if (w >= 2) add_neuron(rat(1, 2), rat(1));
    for (long j = 2; j < w; ++j) {
        // lowest positive peak of the previous neuron
        const Pwl& f = fs.back();
        std::optional<Breakpoint> low;
        for (const auto& b : f.breakpoints())
            if (b.y > 0 && (!low || b.y < low->y)) low = b;
        if (!low) throw std::logic_error("all-linked chain lost its peaks");
        Rat denom = Rat(low->x + j + 1);
        if (!(denom > 0)) throw std::logic_error("all-linked chain peak left of the pivot");
        Rat slope = Rat(low->y / (2 * denom)); // half the strict crossing bound
        add_neuron(slope, Rat(slope * (j + 1)));
    }
    r.net.layers.push_back(std::move(l));

    // generic geometric output coefficients; audited choice
    for (long t : {2, 3, 5, 7, 11, 13}) {
        r.net.output.coeffs.clear();
        Rat c(1);
        for (long j = 0; j < w; ++j) {
            r.net.output.coeffs.push_back(c);
            c *= t;
        }
        r.net.output.bias = rat(0);
        if (Int(exact_pieces(r)) == r.guaranteed_pieces) {
            audit(r);
            return r;
        }
    }
    throw std::logic_error("all-linked one-layer construction: no output combination kept all breakpoints");
}

namespace {

/// Shared chassis of the deep all-linked chains: per layer the same neuron
/// menu over the running functional, rescaled so the wave band covers the
/// next layer's working window.
ConstructionResult gen_all_linked_chain(long k, long width, const std::vector<std::pair<Rat, Rat>>& menu,
                                        const Combo& wave, const Rat& stretch, const Rat& shift, long base,
                                        const char* claim) {
    ConstructionResult r;
    r.claim_ref = claim;
    r.guaranteed_pieces = 1;
    for (long i = 0; i < k; ++i) r.guaranteed_pieces *= base;

    Combo u = input_combo();
    for (long i = 0; i < k; ++i) {
        r.net.layers.push_back(layer_from_scalar(u, menu, static_cast<int>(width)));
        u.coeffs.clear();
        for (const auto& c : wave.coeffs) u.coeffs.push_back(Rat(stretch * c));
        u.bias = Rat(stretch * wave.bias - shift);
    }
    set_output(r.net, u);
    audit(r);
    return r;
}

} // namespace

ConstructionResult gen_all_linked_5k(long k) {
    check(k >= 1, "all-linked width-3 chain needs k >= 1");
    std::vector<std::pair<Rat, Rat>> menu{{rat(2), rat(0)}, {rat(1), rat(1)}, {rat(1, 3), rat(2, 3)}};
    Combo wave{{rat(0), rat(1, 3), rat(1)}, rat(0)};
    return gen_all_linked_chain(k, 3, menu, wave, rat(60), rat(18), 5, "all_linked_width3_chain");
}

ConstructionResult gen_all_linked_9k(long k) {
    check(k >= 1, "all-linked width-4 chain needs k >= 1");
    std::vector<std::pair<Rat, Rat>> menu{
        {rat(2), rat(0)}, {rat(1), rat(1)}, {rat(1, 3), rat(2, 3)}, {rat(1, 9), rat(1, 3)}};
    Combo wave{{rat(0), rat(-1, 3), rat(5, 84), rat(1)}, rat(0)};
    return gen_all_linked_chain(k, 4, menu, wave, rat(1008), rat(14), 9, "all_linked_width4_chain");
}

ConstructionResult gen_resnet_sawtooth(long k) {
    check(k >= 1, "resnet sawtooth needs k >= 1");

    ConstructionResult r;
    r.claim_ref = "resnet_sawtooth_tight";
    r.tight = true;
    Int two_k(1);
    for (long i = 0; i < k; ++i) two_k *= 2;
    r.guaranteed_pieces = two_k;

    r.net.arch = Arch::resnet_scalar;
    Rat pow2(1);
    for (long i = 1; i <= k; ++i) {
        pow2 *= 2; // 2^i
        LayerSpec l;
        l.width = 1;
        l.weights = {{rat(1)}};
        l.biases = {i == 1 ? rat(0) : Rat(2 - 4 / pow2)};
        l.residual_coeff = rat(-2);
        r.net.layers.push_back(std::move(l));
    }
    r.net.output.coeffs = {rat(-2)};
    r.net.output.bias = rat(0);

    if (k >= 2) {
        Rat span = Rat(2 - 4 / pow2); // 2 - 2^(2-k)
        r.sawtooth = SawtoothClaim{static_cast<long>(two_k.get_si()) - 2, Interval(Rat(-span), span)};
    }

    audit(r);
    return r;
}

ConstructionResult gen_densenet(const std::vector<long>& widths) {
    check(!widths.empty(), "dense construction needs at least one layer");
    for (long w : widths)
        if (w != 3) throw unsupported_error("dense construction is built out for width 3 only");

    ConstructionResult r;
    r.claim_ref = "dense_linked_chain";
    r.guaranteed_pieces = dense_lower_bound(widths);
    r.net.arch = Arch::dense_intra;

    Combo u = input_combo();
    for (std::size_t i = 0; i < widths.size(); ++i) {
        std::vector<std::pair<Rat, Rat>> menu{{rat(3), rat(0)}, {rat(3, 2), rat(3)}, {rat(1, 2), rat(2)}};
        LayerSpec l = layer_from_scalar(u, menu, 3);
        l.link_weights = {{}, {rat(1)}, {rat(1, 3), rat(1)}};
        r.net.layers.push_back(std::move(l));
        // coefficients solved from the displayed double bump; stretch the band
        // (1/2, 3/4) over the working window [-4, 4]
        Combo wave{{rat(1, 24), rat(1, 4), rat(1)}, rat(0)};
        u.coeffs.clear();
        for (const auto& c : wave.coeffs) u.coeffs.push_back(Rat(64 * c));
        u.bias = Rat(64 * wave.bias - 40);
    }
    set_output(r.net, u);

    audit(r);
    return r;
}

ConstructionResult gen_telgarsky(long base, long depth) {
    check(base >= 2, "mirror composition needs base >= 2");
    check(depth >= 1, "mirror composition needs depth >= 1");

    ConstructionResult r;
    r.claim_ref = "mirror_composition_sawtooth";
    r.tight = true;
    r.guaranteed_pieces = 1;
    for (long i = 0; i < depth; ++i) r.guaranteed_pieces *= base;

    r.net.domain = Interval(rat(0), rat(1));
    Combo u = input_combo();
    for (long d = 0; d < depth; ++d) {
        std::vector<std::pair<Rat, Rat>> neurons;
        Combo next;
        for (long j = 1; j <= base; ++j) {
            neurons.emplace_back(rat(base), rat(1 - j));
            next.coeffs.push_back(j == 1 ? rat(1) : rat(j % 2 == 1 ? 2 : -2));
        }
        next.bias = rat(0);
        r.net.layers.push_back(layer_from_scalar(u, neurons, 1));
        u = std::move(next);
    }
    set_output(r.net, u);

    long n = 1;
    for (long i = 0; i < depth; ++i) n *= base;
    r.sawtooth = SawtoothClaim{n, Interval(rat(0), rat(1))};

    audit(r);
    return r;
}

} // namespace pwlnet
