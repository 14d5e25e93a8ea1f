#pragma once

#include "pwlnet/pwl.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pwlnet {

struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct unsupported_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct not_applicable_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Arch { layered, resnet_scalar, dense_intra };

std::string arch_name(Arch a);
Arch arch_from_name(std::string_view s);

/// One hidden layer. Within a chain group of size n the neurons are evaluated
/// in stored order and each subtracts its predecessor's post-activation from
/// its own pre-activation; link_group 1 is plain feedforward, link_group ==
/// width chains the whole layer.
struct LayerSpec {
    int width = 0;
    int link_group = 1;
    /// Explicit group-size partition (sums to width). Overrides link_group;
    /// needed when a single pair is linked inside a wider layer.
    std::vector<int> link_groups;
    std::vector<std::vector<Rat>> weights; // width x prev_width
    std::vector<Rat> biases;               // width
    /// resnet_scalar: coefficient c of the residual update g <- c*f + g.
    Rat residual_coeff{0};
    /// dense_intra: lower-triangular link coefficients; row j holds the
    /// multipliers applied to the post-activations of neurons 0..j-1. Empty
    /// means all-ones.
    std::vector<std::vector<Rat>> link_weights;

    std::vector<int> partition() const;
};

struct OutputSpec {
    std::vector<Rat> coeffs;
    Rat bias{0};
};

struct NetworkSpec {
    int input_dim = 1;
    Arch arch = Arch::layered;
    std::vector<LayerSpec> layers;
    OutputSpec output;
    Domain domain;

    int depth() const { return static_cast<int>(layers.size()); }
    int max_width() const;
};

struct ForwardTrace {
    std::vector<std::vector<Pwl>> pre;  // per layer, per neuron pre-activation
    std::vector<std::vector<Pwl>> post; // per layer, per neuron output
    Pwl output;
};

/// All invariant violations as data; empty means the spec is well-formed.
std::vector<std::string> validate(const NetworkSpec& net);
/// Throws validation_error listing every violation.
void require_valid(const NetworkSpec& net);

/// Exact symbolic evaluation of the network function as a Pwl. Requires
/// input_dim == 1 (2-D inputs are handled by the arrangement module).
Pwl forward_symbolic(const NetworkSpec& net, ForwardTrace* trace = nullptr);

/// Exact pointwise evaluation via the per-neuron recurrences; any input_dim.
Rat forward_point(const NetworkSpec& net, std::span<const Rat> x);

/// Canonical JSON text; parse(serialize(net)) round-trips exactly.
std::string serialize(const NetworkSpec& net);
NetworkSpec parse_network(std::string_view json_text);

/// Reorder neurons inside a feedforward layer, permuting the consumer weight
/// columns to match; the network function is unchanged.
NetworkSpec permute_layer_neurons(const NetworkSpec& net, std::size_t layer, std::span<const int> perm);

/// Link one same-sign first-layer pair, transporting the pair's biases and the
/// consumers' coefficients so the network function is exactly preserved
/// (verified internally via equals). Throws not_applicable_error when no pair
/// of first-layer neurons has input slopes of equal sign.
NetworkSpec rewrite_first_layer_linked(const NetworkSpec& net);

} // namespace pwlnet
