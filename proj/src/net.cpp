#include "pwlnet/net.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace pwlnet {

using ordered_json = nlohmann::ordered_json;

std::string arch_name(Arch a) {
    switch (a) {
        case Arch::layered: return "layered";
        case Arch::resnet_scalar: return "resnet_scalar";
        case Arch::dense_intra: return "dense_intra";
    }
    return "layered";
}

Arch arch_from_name(std::string_view s) {
    if (s == "layered") return Arch::layered;
    if (s == "resnet_scalar") return Arch::resnet_scalar;
    if (s == "dense_intra") return Arch::dense_intra;
    throw parse_error("unknown arch '" + std::string(s) + "'");
}

std::vector<int> LayerSpec::partition() const {
    if (!link_groups.empty()) return link_groups;
    std::vector<int> part;
    if (link_group >= 1 && width >= 1 && width % link_group == 0)
        part.assign(static_cast<std::size_t>(width / link_group), link_group);
    return part;
}

int NetworkSpec::max_width() const {
    int w = 0;
    for (const auto& l : layers) w = std::max(w, l.width);
    return w;
}

std::vector<std::string> validate(const NetworkSpec& net) {
    std::vector<std::string> v;
    auto add = [&](const std::string& m) { v.push_back(m); };

    if (net.input_dim < 1) add("input_dim must be >= 1");
    if (net.layers.empty()) add("network needs at least one hidden layer");
    if (net.domain && net.domain->lo >= net.domain->hi) add("domain must have lo < hi");

    int prev = net.input_dim;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const LayerSpec& l = net.layers[i];
        std::string at = "layers[" + std::to_string(i) + "]";
        if (l.width < 1) add(at + ": width must be >= 1");
        if (!l.link_groups.empty()) {
            int sum = 0;
            for (int g : l.link_groups) {
                if (g < 1) add(at + ": link group sizes must be >= 1");
                sum += g;
            }
            if (sum != l.width) add(at + ": link group sizes must sum to the width");
        } else if (l.link_group < 1) {
            add(at + ": link_group must be >= 1");
        } else if (l.width >= 1 && l.width % l.link_group != 0) {
            add(at + ": link_group must divide the width");
        }
        if (static_cast<int>(l.weights.size()) != l.width) add(at + ": weight row count != width");
        for (std::size_t j = 0; j < l.weights.size(); ++j)
            if (static_cast<int>(l.weights[j].size()) != prev)
                add(at + ".weights[" + std::to_string(j) + "]: expected " + std::to_string(prev) + " entries");
        if (static_cast<int>(l.biases.size()) != l.width) add(at + ": bias count != width");
        if (!l.link_weights.empty()) {
            if (net.arch != Arch::dense_intra) add(at + ": link_weights only allowed for dense_intra");
            if (static_cast<int>(l.link_weights.size()) != l.width)
                add(at + ": link_weights row count != width");
            for (std::size_t j = 0; j < l.link_weights.size(); ++j)
                if (l.link_weights[j].size() != j)
                    add(at + ".link_weights[" + std::to_string(j) + "]: expected " + std::to_string(j) +
                        " entries");
        }
        if (net.arch == Arch::resnet_scalar && l.width != 1) add(at + ": resnet_scalar layers must have width 1");
        if (net.arch == Arch::dense_intra && l.partition() != std::vector<int>{l.width})
            add(at + ": dense_intra layers must link the whole layer (link_group == width)");
        prev = l.width;
    }

    if (net.arch == Arch::resnet_scalar && net.input_dim != 1) add("resnet_scalar requires input_dim == 1");
    if (!net.layers.empty() && static_cast<int>(net.output.coeffs.size()) != net.layers.back().width)
        add("output.coeffs size != width of last layer");
    return v;
}

void require_valid(const NetworkSpec& net) {
    auto v = validate(net);
    if (v.empty()) return;
    std::string msg = "invalid network spec:";
    for (const auto& s : v) msg += "\n  - " + s;
    throw validation_error(msg);
}

namespace {

Pwl combine(const std::vector<std::pair<Rat, Pwl>>& terms, const Rat& bias) {
    return linear_combination(std::span<const std::pair<Rat, Pwl>>(terms.data(), terms.size()), bias);
}

/// Pre-activation terms of neuron j given the previous layer's outputs,
/// skipping zero weights.
std::vector<std::pair<Rat, Pwl>> row_terms(const LayerSpec& l, std::size_t j, const std::vector<Pwl>& prev) {
    std::vector<std::pair<Rat, Pwl>> terms;
    for (std::size_t m = 0; m < prev.size(); ++m)
        if (l.weights[j][m] != 0) terms.emplace_back(l.weights[j][m], prev[m]);
    return terms;
}

} // namespace

Pwl forward_symbolic(const NetworkSpec& net, ForwardTrace* trace) {
    require_valid(net);
    if (net.input_dim != 1)
        throw unsupported_error("forward_symbolic handles input_dim == 1; use the arrangement module for 2-D");

    // an all-zero weight row must still produce a constant on the right domain
    auto combine_dom = [&](const std::vector<std::pair<Rat, Pwl>>& terms, const Rat& bias) {
        if (terms.empty()) return Pwl::constant(bias, net.domain);
        return combine(terms, bias);
    };

    if (trace) {
        trace->pre.assign(net.layers.size(), {});
        trace->post.assign(net.layers.size(), {});
    }

    Pwl x = Pwl::identity(net.domain);

    if (net.arch == Arch::resnet_scalar) {
        // output is c_out * f_k + g_k, with g_k the state the last layer read
        Pwl g = x;
        Pwl f;
        for (std::size_t i = 0; i < net.layers.size(); ++i) {
            const LayerSpec& l = net.layers[i];
            Pwl pre = combine_dom({{l.weights[0][0], g}}, l.biases[0]);
            f = relu(pre);
            if (trace) {
                trace->pre[i].push_back(pre);
                trace->post[i].push_back(f);
            }
            if (i + 1 < net.layers.size()) g = combine({{l.residual_coeff, f}, {Rat(1), g}}, Rat(0));
        }
        Pwl out = combine({{net.output.coeffs[0], f}, {Rat(1), g}}, net.output.bias);
        if (trace) trace->output = out;
        return out;
    }

    std::vector<Pwl> prev{x};
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const LayerSpec& l = net.layers[i];
        std::vector<Pwl> cur;
        cur.reserve(static_cast<std::size_t>(l.width));

        if (net.arch == Arch::dense_intra) {
            for (std::size_t j = 0; j < static_cast<std::size_t>(l.width); ++j) {
                auto terms = row_terms(l, j, prev);
                for (std::size_t m = 0; m < j; ++m) {
                    Rat c = l.link_weights.empty() ? Rat(1) : l.link_weights[j][m];
                    if (c != 0) terms.emplace_back(-c, cur[m]);
                }
                Pwl pre = combine_dom(terms, l.biases[j]);
                cur.push_back(relu(pre));
                if (trace) {
                    trace->pre[i].push_back(pre);
                    trace->post[i].push_back(cur.back());
                }
            }
        } else {
            std::size_t j = 0;
            for (int gsize : l.partition()) {
                for (int t = 0; t < gsize; ++t, ++j) {
                    auto terms = row_terms(l, j, prev);
                    if (t > 0) terms.emplace_back(Rat(-1), cur[j - 1]);
                    Pwl pre = combine_dom(terms, l.biases[j]);
                    cur.push_back(relu(pre));
                    if (trace) {
                        trace->pre[i].push_back(pre);
                        trace->post[i].push_back(cur.back());
                    }
                }
            }
        }
        prev = std::move(cur);
    }

    std::vector<std::pair<Rat, Pwl>> out_terms;
    for (std::size_t m = 0; m < prev.size(); ++m)
        if (net.output.coeffs[m] != 0) out_terms.emplace_back(net.output.coeffs[m], prev[m]);
    Pwl out = combine_dom(out_terms, net.output.bias);
    if (trace) trace->output = out;
    return out;
}

Rat forward_point(const NetworkSpec& net, std::span<const Rat> x) {
    require_valid(net);
    if (static_cast<int>(x.size()) != net.input_dim)
        throw std::invalid_argument("forward_point: input size != input_dim");
    if (net.domain && net.input_dim == 1 && !net.domain->contains(x[0]))
        throw std::domain_error("forward_point: input outside domain");

    auto sigma = [](const Rat& v) { return v > 0 ? v : Rat(0); };

    if (net.arch == Arch::resnet_scalar) {
        Rat g = x[0], f(0);
        for (std::size_t i = 0; i < net.layers.size(); ++i) {
            const auto& l = net.layers[i];
            f = sigma(l.weights[0][0] * g + l.biases[0]);
            if (i + 1 < net.layers.size()) g = l.residual_coeff * f + g;
        }
        return net.output.coeffs[0] * f + g + net.output.bias;
    }

    std::vector<Rat> prev(x.begin(), x.end());
    for (const auto& l : net.layers) {
        std::vector<Rat> cur;
        cur.reserve(static_cast<std::size_t>(l.width));
        if (net.arch == Arch::dense_intra) {
            for (std::size_t j = 0; j < static_cast<std::size_t>(l.width); ++j) {
                Rat v = l.biases[j];
                for (std::size_t m = 0; m < prev.size(); ++m) v += l.weights[j][m] * prev[m];
                for (std::size_t m = 0; m < j; ++m)
                    v -= (l.link_weights.empty() ? Rat(1) : l.link_weights[j][m]) * cur[m];
                cur.push_back(sigma(v));
            }
        } else {
            std::size_t j = 0;
            for (int gsize : l.partition()) {
                for (int t = 0; t < gsize; ++t, ++j) {
                    Rat v = l.biases[j];
                    for (std::size_t m = 0; m < prev.size(); ++m) v += l.weights[j][m] * prev[m];
                    if (t > 0) v -= cur[j - 1];
                    cur.push_back(sigma(v));
                }
            }
        }
        prev = std::move(cur);
    }
    Rat out = net.output.bias;
    for (std::size_t m = 0; m < prev.size(); ++m) out += net.output.coeffs[m] * prev[m];
    return out;
}

namespace {

ordered_json rat_json(const Rat& r) { return rat_str(r); }

Rat rat_from_json(const ordered_json& j, const std::string& at) {
    if (!j.is_string()) throw parse_error(at + ": expected rational string \"p/q\"");
    try {
        return rat_parse(j.get<std::string>());
    } catch (const std::exception& e) {
        throw parse_error(at + ": " + e.what());
    }
}

int int_from_json(const ordered_json& j, const std::string& at) {
    if (!j.is_number_integer()) throw parse_error(at + ": expected integer");
    return j.get<int>();
}

const ordered_json& field(const ordered_json& j, const char* key, const std::string& at) {
    auto it = j.find(key);
    if (it == j.end()) throw parse_error(at + ": missing field '" + key + "'");
    return *it;
}

} // namespace

std::string serialize(const NetworkSpec& net) {
    ordered_json j;
    j["input_dim"] = net.input_dim;
    j["arch"] = arch_name(net.arch);
    j["layers"] = ordered_json::array();
    for (const auto& l : net.layers) {
        ordered_json lj;
        lj["width"] = l.width;
        if (!l.link_groups.empty())
            lj["link_group"] = l.link_groups;
        else
            lj["link_group"] = l.link_group;
        ordered_json w = ordered_json::array();
        for (const auto& row : l.weights) {
            ordered_json rj = ordered_json::array();
            for (const auto& c : row) rj.push_back(rat_json(c));
            w.push_back(std::move(rj));
        }
        lj["weights"] = std::move(w);
        ordered_json b = ordered_json::array();
        for (const auto& c : l.biases) b.push_back(rat_json(c));
        lj["biases"] = std::move(b);
        if (net.arch == Arch::resnet_scalar) lj["residual_coeff"] = rat_json(l.residual_coeff);
        if (!l.link_weights.empty()) {
            ordered_json lw = ordered_json::array();
            for (const auto& row : l.link_weights) {
                ordered_json rj = ordered_json::array();
                for (const auto& c : row) rj.push_back(rat_json(c));
                lw.push_back(std::move(rj));
            }
            lj["link_weights"] = std::move(lw);
        }
        j["layers"].push_back(std::move(lj));
    }
    j["output"]["coeffs"] = ordered_json::array();
    for (const auto& c : net.output.coeffs) j["output"]["coeffs"].push_back(rat_json(c));
    j["output"]["bias"] = rat_json(net.output.bias);
    if (net.domain)
        j["domain"] = ordered_json::array({rat_json(net.domain->lo), rat_json(net.domain->hi)});
    else
        j["domain"] = nullptr;
    return j.dump(2) + "\n";
}

NetworkSpec parse_network(std::string_view text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw parse_error(std::string("network spec: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw parse_error("network spec: expected a JSON object");

    NetworkSpec net;
    net.input_dim = int_from_json(field(j, "input_dim", "spec"), "input_dim");
    const auto& aj = field(j, "arch", "spec");
    if (!aj.is_string()) throw parse_error("arch: expected string");
    net.arch = arch_from_name(aj.get<std::string>());

    const auto& layers = field(j, "layers", "spec");
    if (!layers.is_array()) throw parse_error("layers: expected array");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        std::string at = "layers[" + std::to_string(i) + "]";
        const auto& lj = layers[i];
        if (!lj.is_object()) throw parse_error(at + ": expected object");
        LayerSpec l;
        l.width = int_from_json(field(lj, "width", at), at + ".width");
        const auto& gj = field(lj, "link_group", at);
        if (gj.is_number_integer()) {
            l.link_group = gj.get<int>();
        } else if (gj.is_array()) {
            for (const auto& g : gj) l.link_groups.push_back(int_from_json(g, at + ".link_group[]"));
        } else {
            throw parse_error(at + ".link_group: expected integer or array of integers");
        }
        const auto& wj = field(lj, "weights", at);
        if (!wj.is_array()) throw parse_error(at + ".weights: expected array");
        for (std::size_t r = 0; r < wj.size(); ++r) {
            std::string wat = at + ".weights[" + std::to_string(r) + "]";
            if (!wj[r].is_array()) throw parse_error(wat + ": expected array");
            std::vector<Rat> row;
            for (std::size_t c = 0; c < wj[r].size(); ++c)
                row.push_back(rat_from_json(wj[r][c], wat + "[" + std::to_string(c) + "]"));
            l.weights.push_back(std::move(row));
        }
        const auto& bj = field(lj, "biases", at);
        if (!bj.is_array()) throw parse_error(at + ".biases: expected array");
        for (std::size_t r = 0; r < bj.size(); ++r)
            l.biases.push_back(rat_from_json(bj[r], at + ".biases[" + std::to_string(r) + "]"));
        if (lj.contains("residual_coeff"))
            l.residual_coeff = rat_from_json(lj["residual_coeff"], at + ".residual_coeff");
        if (lj.contains("link_weights")) {
            const auto& lwj = lj["link_weights"];
            if (!lwj.is_array()) throw parse_error(at + ".link_weights: expected array");
            for (std::size_t r = 0; r < lwj.size(); ++r) {
                std::string wat = at + ".link_weights[" + std::to_string(r) + "]";
                if (!lwj[r].is_array()) throw parse_error(wat + ": expected array");
                std::vector<Rat> row;
                for (std::size_t c = 0; c < lwj[r].size(); ++c)
                    row.push_back(rat_from_json(lwj[r][c], wat + "[" + std::to_string(c) + "]"));
                l.link_weights.push_back(std::move(row));
            }
        }
        net.layers.push_back(std::move(l));
    }

    const auto& oj = field(j, "output", "spec");
    if (!oj.is_object()) throw parse_error("output: expected object");
    const auto& cj = field(oj, "coeffs", "output");
    if (!cj.is_array()) throw parse_error("output.coeffs: expected array");
    for (std::size_t r = 0; r < cj.size(); ++r)
        net.output.coeffs.push_back(rat_from_json(cj[r], "output.coeffs[" + std::to_string(r) + "]"));
    net.output.bias = rat_from_json(field(oj, "bias", "output"), "output.bias");

    const auto& dj = field(j, "domain", "spec");
    if (dj.is_null()) {
        net.domain = std::nullopt;
    } else if (dj.is_array() && dj.size() == 2) {
        Rat lo = rat_from_json(dj[0], "domain[0]");
        Rat hi = rat_from_json(dj[1], "domain[1]");
        if (lo > hi) throw parse_error("domain: lo > hi");
        net.domain = Interval(lo, hi);
    } else {
        throw parse_error("domain: expected null or [lo, hi]");
    }
    return net;
}

NetworkSpec permute_layer_neurons(const NetworkSpec& net, std::size_t layer, std::span<const int> perm) {
    if (layer >= net.layers.size()) throw std::invalid_argument("permute_layer_neurons: layer out of range");
    const LayerSpec& l = net.layers[layer];
    auto part = l.partition();
    if (std::any_of(part.begin(), part.end(), [](int g) { return g != 1; }))
        throw unsupported_error("permute_layer_neurons: layer must be feedforward (all groups of size 1)");
    if (static_cast<int>(perm.size()) != l.width)
        throw std::invalid_argument("permute_layer_neurons: permutation size != width");

    NetworkSpec out = net;
    LayerSpec& nl = out.layers[layer];
    for (int i = 0; i < l.width; ++i) {
        nl.weights[static_cast<std::size_t>(i)] = l.weights[static_cast<std::size_t>(perm[i])];
        nl.biases[static_cast<std::size_t>(i)] = l.biases[static_cast<std::size_t>(perm[i])];
    }
    if (layer + 1 < net.layers.size()) {
        const LayerSpec& c = net.layers[layer + 1];
        LayerSpec& nc = out.layers[layer + 1];
        for (std::size_t r = 0; r < c.weights.size(); ++r)
            for (int i = 0; i < l.width; ++i)
                nc.weights[r][static_cast<std::size_t>(i)] = c.weights[r][static_cast<std::size_t>(perm[i])];
    } else {
        for (int i = 0; i < l.width; ++i)
            out.output.coeffs[static_cast<std::size_t>(i)] = net.output.coeffs[static_cast<std::size_t>(perm[i])];
    }
    return out;
}

NetworkSpec rewrite_first_layer_linked(const NetworkSpec& net) {
    require_valid(net);
    if (net.arch != Arch::layered) throw unsupported_error("rewrite_first_layer_linked: layered nets only");
    if (net.input_dim != 1) throw unsupported_error("rewrite_first_layer_linked: univariate nets only");
    const LayerSpec& l0 = net.layers.front();
    auto part = l0.partition();
    if (std::any_of(part.begin(), part.end(), [](int g) { return g != 1; }))
        throw not_applicable_error("rewrite_first_layer_linked: first layer is already linked");
    if (l0.width < 2) throw not_applicable_error("rewrite_first_layer_linked: first layer too narrow");

    int pi = -1, pj = -1;
    for (int i = 0; i < l0.width && pi < 0; ++i)
        for (int j = i + 1; j < l0.width; ++j)
            if (l0.weights[static_cast<std::size_t>(i)][0] * l0.weights[static_cast<std::size_t>(j)][0] > 0) {
                pi = i;
                pj = j;
                break;
            }
    if (pi < 0) throw not_applicable_error("rewrite_first_layer_linked: no same-sign first-layer pair");

    // Put the later-activating neuron of the pair first: its active halfline is
    // contained in the other's, which is what the transported coefficients assume.
    auto kink = [&](int i) -> Rat {
        return Rat(-l0.biases[static_cast<std::size_t>(i)] / l0.weights[static_cast<std::size_t>(i)][0]);
    };
    bool positive = l0.weights[static_cast<std::size_t>(pi)][0] > 0;
    int first = pi, second = pj;
    if ((positive && kink(pj) > kink(pi)) || (!positive && kink(pj) < kink(pi))) std::swap(first, second);

    std::vector<int> perm{first, second};
    for (int i = 0; i < l0.width; ++i)
        if (i != first && i != second) perm.push_back(i);
    NetworkSpec out = permute_layer_neurons(net, 0, perm);

    LayerSpec& nl = out.layers.front();
    Rat a1 = nl.weights[0][0], b1 = nl.biases[0];
    Rat a2 = nl.weights[1][0], b2 = nl.biases[1];
    Rat s = positive ? Rat(1) : Rat(-1);
    Rat ta1 = s, ta2 = 2 * s;
    nl.weights[0][0] = ta1;
    nl.biases[0] = (b1 / a1) * ta1;
    nl.weights[1][0] = ta2;
    nl.biases[1] = (b2 / a2) * ta2;

    auto transport = [&](Rat& c1, Rat& c2) {
        Rat tc2 = c2 * a2 / ta2;
        Rat tc1 = (c1 * a1 + c2 * a2 - tc2 * (ta2 - ta1)) / ta1;
        c1 = tc1;
        c2 = tc2;
    };
    if (out.layers.size() > 1) {
        LayerSpec& c = out.layers[1];
        for (auto& row : c.weights) transport(row[0], row[1]);
    } else {
        transport(out.output.coeffs[0], out.output.coeffs[1]);
    }

    if (nl.width == 2) {
        nl.link_group = 2;
        nl.link_groups.clear();
    } else {
        nl.link_groups.assign(static_cast<std::size_t>(nl.width - 2), 1);
        nl.link_groups.insert(nl.link_groups.begin(), 2);
    }

    if (!equals(forward_symbolic(net), forward_symbolic(out)))
        throw std::logic_error("rewrite_first_layer_linked: transported network is not equal");
    return out;
}

} // namespace pwlnet
