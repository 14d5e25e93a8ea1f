#pragma once

#include "pwlnet/net.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pwlnet {

struct SawtoothClaim {
    long pieces;
    Interval interval;
};

/// A generated network together with the piece count it guarantees. Every
/// generator audits itself with the exact engine before returning: tight
/// constructions must hit guaranteed_pieces exactly, the others must reach at
/// least that many; a sawtooth claim is re-checked structurally.
struct ConstructionResult {
    NetworkSpec net;
    Int guaranteed_pieces;
    std::string claim_ref;
    bool tight = false;
    std::optional<SawtoothClaim> sawtooth;
};

/// Exact engine count for a generated net (the audit the generators run).
long exact_pieces(const ConstructionResult& r);

/// Two feedforward hidden layers reaching (w1+1)(w2+1) pieces. w1 >= 3, w2 >= 2.
ConstructionResult gen_twoproduct(long w1, long w2);

/// Feedforward, first layer w >= 3 wide and k-1 further layers of width 3,
/// reaching (w+1)*4^(k-1) pieces. k >= 2.
ConstructionResult gen_width3_4k(long w, long k);

/// Two pairwise-linked hidden layers reaching (3w1/2+1)(3w2/2+1) pieces.
/// Even w1 >= 6, even w2 >= 4.
ConstructionResult gen_intra_twolayer(long w1, long w2);

/// Pairwise-linked sawtooth on [0,1] with prod(3w_i/2) equal pieces.
/// All widths even and >= 2.
ConstructionResult gen_intra_sawtooth(const std::vector<long>& widths);

/// Width-2 pairwise-linked chain with 7*3^(k-2)+2 pieces. k >= 2.
ConstructionResult gen_width2_intra(long k);

/// One all-linked hidden layer with (w+1)w/2+1 pieces. w >= 1.
ConstructionResult gen_all_linked_onelayer(long w);

/// Depth-k all-linked width-3 chain with at least 5^k pieces. k >= 1.
ConstructionResult gen_all_linked_5k(long k);

/// Depth-k all-linked width-4 chain with at least 9^k pieces. k >= 1.
ConstructionResult gen_all_linked_9k(long k);

/// Scalar resnet whose output is a 2^k-piece wave, sawtooth on the central
/// interval for k >= 2.
ConstructionResult gen_resnet_sawtooth(long k);

/// Dense intra-linked net, widths all 3, with at least 1 + 7^k pieces.
ConstructionResult gen_densenet(const std::vector<long>& widths);

/// d-fold composition of the base-m mirror map: feedforward width m, depth d,
/// an m^d-piece sawtooth on [0,1].
ConstructionResult gen_telgarsky(long base, long depth);

} // namespace pwlnet
