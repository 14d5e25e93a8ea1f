#include "pwlnet/bounds.hpp"

#include <algorithm>

namespace pwlnet {

std::string link_mode_name(LinkMode m) {
    switch (m) {
        case LinkMode::feedforward: return "ff";
        case LinkMode::pairwise: return "intra2";
        case LinkMode::all_linked: return "intra_all";
        case LinkMode::resnet: return "resnet";
        case LinkMode::dense: return "dense";
    }
    return "ff";
}

LinkMode link_mode_from_name(std::string_view s) {
    if (s == "ff" || s == "feedforward" || s == "1") return LinkMode::feedforward;
    if (s == "intra2" || s == "pairwise" || s == "2") return LinkMode::pairwise;
    if (s == "intra_all" || s == "all") return LinkMode::all_linked;
    if (s == "resnet" || s == "resnet_scalar") return LinkMode::resnet;
    if (s == "dense" || s == "dense_intra") return LinkMode::dense;
    throw std::invalid_argument("unknown link mode '" + std::string(s) + "'");
}

ArchShape ArchShape::uniform(std::vector<long> widths, LinkMode mode, long input_dim) {
    ArchShape s;
    s.modes.assign(widths.size(), mode);
    s.widths = std::move(widths);
    s.input_dim = input_dim;
    return s;
}

bool ArchShape::uniform_mode(LinkMode m) const {
    return std::all_of(modes.begin(), modes.end(), [m](LinkMode x) { return x == m; });
}

ArchShape shape_of(const NetworkSpec& net) {
    ArchShape s;
    s.input_dim = net.input_dim;
    for (const auto& l : net.layers) {
        s.widths.push_back(l.width);
        if (net.arch == Arch::resnet_scalar) {
            s.modes.push_back(LinkMode::resnet);
        } else if (net.arch == Arch::dense_intra) {
            s.modes.push_back(LinkMode::dense);
        } else {
            auto part = l.partition();
            bool all1 = std::all_of(part.begin(), part.end(), [](int g) { return g == 1; });
            bool all2 = std::all_of(part.begin(), part.end(), [](int g) { return g == 2; });
            if (all1)
                s.modes.push_back(LinkMode::feedforward);
            else if (all2)
                s.modes.push_back(LinkMode::pairwise);
            else if (part.size() == 1)
                s.modes.push_back(LinkMode::all_linked);
            else
                throw unsupported_error("shape_of: no closed-form mode for mixed link partitions");
        }
    }
    return s;
}

namespace {

void check_shape(const ArchShape& shape) {
    if (shape.widths.empty()) throw validation_error("shape: needs at least one layer");
    if (shape.widths.size() != shape.modes.size()) throw validation_error("shape: widths/modes size mismatch");
    for (std::size_t i = 0; i < shape.widths.size(); ++i) {
        if (shape.widths[i] < 1) throw validation_error("shape: widths must be >= 1");
        if (shape.modes[i] == LinkMode::pairwise && shape.widths[i] % 2 != 0)
            throw validation_error("shape: pairwise linking assumes even widths");
        if (shape.modes[i] == LinkMode::resnet && shape.widths[i] != 1)
            throw validation_error("shape: resnet layers have width 1");
    }
}

Int pow_int(long base, long exp) {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(exp));
    return r;
}

} // namespace

BoundReport piece_upper_bound(const ArchShape& shape) {
    check_shape(shape);
    if (shape.input_dim != 1)
        throw unsupported_error("piece_upper_bound: univariate only; use region_upper_bound for n >= 2");

    const long k = static_cast<long>(shape.widths.size());
    BoundReport rep;

    bool all_width2_ff = shape.uniform_mode(LinkMode::feedforward) &&
                         std::all_of(shape.widths.begin(), shape.widths.end(), [](long w) { return w == 2; });

    if (all_width2_ff) {
        // sqrt(7)^k for even depth, 3*sqrt(7)^(k-1) for odd
        rep.upper = (k % 2 == 0) ? pow_int(7, k / 2) : 3 * pow_int(7, (k - 1) / 2);
        rep.formula_id = "width2_feedforward";
    } else {
        Int prod(1);
        bool any_resnet = false, any_linked = false;
        for (std::size_t i = 0; i < shape.widths.size(); ++i) {
            long w = shape.widths[i];
            switch (shape.modes[i]) {
                case LinkMode::feedforward: prod *= Int(w + 1); break;
                case LinkMode::pairwise:
                    prod *= Int(3 * w / 2 + 1);
                    any_linked = true;
                    break;
                case LinkMode::all_linked:
                    prod *= Int((w + 1) * w / 2 + 1);
                    any_linked = true;
                    break;
                case LinkMode::resnet:
                    prod *= 2;
                    any_resnet = true;
                    break;
                case LinkMode::dense:
                    throw unsupported_error("piece_upper_bound: no closed-form upper bound for dense links");
            }
        }
        rep.upper = prod;
        if (any_resnet)
            rep.formula_id = "resnet_doubling";
        else if (any_linked)
            rep.formula_id = shape.uniform_mode(LinkMode::pairwise)  ? "pairwise_linked_product"
                             : shape.uniform_mode(LinkMode::all_linked) ? "all_linked_product"
                                                                        : "linked_product";
        else
            rep.formula_id = "feedforward_product";
    }

    // best piece count the construction catalog guarantees for this shape
    std::optional<Int> lower;
    auto consider = [&](const Int& v) {
        if (!lower || v > *lower) lower = v;
    };
    const auto& w = shape.widths;
    if (shape.uniform_mode(LinkMode::feedforward)) {
        if (k == 2 && w[0] >= 3 && w[1] >= 2) consider(Int((w[0] + 1) * (w[1] + 1)));
        if (k >= 2 && w[0] >= 3 && std::all_of(w.begin() + 1, w.end(), [](long x) { return x == 3; }))
            consider(Int(w[0] + 1) * pow_int(4, k - 1));
        if (std::all_of(w.begin(), w.end(), [&](long x) { return x == w[0]; }) && w[0] >= 2)
            consider(pow_int(w[0], k)); // mirror-map composition
    } else if (shape.uniform_mode(LinkMode::pairwise)) {
        if (k == 2 && w[0] >= 6 && w[1] >= 4) consider(Int(3 * w[0] / 2 + 1) * Int(3 * w[1] / 2 + 1));
        if (std::all_of(w.begin(), w.end(), [](long x) { return x >= 2 && x % 2 == 0; })) {
            Int p(1);
            for (long x : w) p *= Int(3 * x / 2);
            consider(p);
        }
        if (k >= 2 && std::all_of(w.begin(), w.end(), [](long x) { return x == 2; }))
            consider(7 * pow_int(3, k - 2) + 2);
    } else if (shape.uniform_mode(LinkMode::all_linked)) {
        if (k == 1) consider(Int((w[0] + 1) * w[0] / 2 + 1));
        if (std::all_of(w.begin(), w.end(), [](long x) { return x == 3; })) consider(pow_int(5, k));
        if (std::all_of(w.begin(), w.end(), [](long x) { return x == 4; })) consider(pow_int(9, k));
    } else if (shape.uniform_mode(LinkMode::resnet)) {
        consider(pow_int(2, k));
    } else if (shape.uniform_mode(LinkMode::dense)) {
        consider(dense_lower_bound(w));
    }
    rep.construction_lower = lower;
    return rep;
}

Int zaslavsky_sum(long m, long n) {
    if (m < 0 || n < 0) throw std::invalid_argument("zaslavsky_sum: m, n must be >= 0");
    Int total(0);
    for (long j = 0; j <= n && j <= m; ++j) {
        Int c;
        mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(m), static_cast<unsigned long>(j));
        total += c;
    }
    return total;
}

Int region_upper_bound(const ArchShape& shape) {
    check_shape(shape);
    if (shape.input_dim < 1) throw validation_error("region_upper_bound: input_dim must be >= 1");
    if (shape.input_dim == 1) return piece_upper_bound(shape).upper;

    Int prod(1);
    for (std::size_t i = 0; i < shape.widths.size(); ++i) {
        long w = shape.widths[i];
        long m = 0;
        switch (shape.modes[i]) {
            case LinkMode::feedforward: m = w; break;
            case LinkMode::pairwise: m = 3 * w / 2 + 1; break;
            default:
                throw unsupported_error("region_upper_bound: closed forms cover feedforward and pairwise layers");
        }
        prod *= zaslavsky_sum(m, shape.input_dim);
    }
    return prod;
}

Int dense_lower_bound(const std::vector<long>& widths) {
    if (widths.empty()) throw std::invalid_argument("dense_lower_bound: widths nonempty");
    Int prod(1);
    for (long w : widths) prod *= pow_int(2, w) - 1;
    return 1 + prod;
}

} // namespace pwlnet
