#pragma once

#include "pwlnet/net.hpp"
#include "pwlnet/pwl.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace pwlnet::testutil {

using Rng = std::mt19937_64;

inline long rand_long(Rng& rng, long lo, long hi) {
    return lo + static_cast<long>(rng() % static_cast<unsigned long>(hi - lo + 1));
}

inline Rat rand_rat(Rng& rng, long mag, long max_den = 8) {
    long den = rand_long(rng, 1, max_den);
    long num = rand_long(rng, -mag * den, mag * den);
    return rat(num, den);
}

/// Random canonical Pwl: up to max_bps raw points on a rational grid.
inline Pwl rand_pwl(Rng& rng, int max_bps = 6, long mag = 8) {
    int n = static_cast<int>(rand_long(rng, 0, max_bps));
    if (n == 0) return Pwl::affine(rand_rat(rng, mag), rand_rat(rng, mag));
    std::vector<Rat> xs;
    while (static_cast<int>(xs.size()) < n) {
        Rat x = rand_rat(rng, mag);
        if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
    }
    std::sort(xs.begin(), xs.end());
    std::vector<Breakpoint> pts;
    for (auto& x : xs) pts.push_back({x, rand_rat(rng, mag)});
    return Pwl::from_points(std::move(pts), rand_rat(rng, 4), rand_rat(rng, 4));
}

/// Random layered net (uniform link group 1 or 2), exact rational weights.
inline NetworkSpec rand_net(Rng& rng, int max_width, int max_depth, bool pairwise, long mag = 4,
                            long max_den = 8) {
    NetworkSpec net;
    net.input_dim = 1;
    net.arch = Arch::layered;
    int depth = static_cast<int>(rand_long(rng, 1, max_depth));
    int prev = 1;
    for (int i = 0; i < depth; ++i) {
        LayerSpec l;
        if (pairwise) {
            l.width = 2 * static_cast<int>(rand_long(rng, 1, max_width / 2));
            l.link_group = 2;
        } else {
            l.width = static_cast<int>(rand_long(rng, 1, max_width));
            l.link_group = 1;
        }
        for (int j = 0; j < l.width; ++j) {
            std::vector<Rat> row;
            for (int m = 0; m < prev; ++m) row.push_back(rand_rat(rng, mag, max_den));
            l.weights.push_back(std::move(row));
            l.biases.push_back(rand_rat(rng, mag, max_den));
        }
        prev = l.width;
        net.layers.push_back(std::move(l));
    }
    for (int m = 0; m < prev; ++m) net.output.coeffs.push_back(rand_rat(rng, mag, max_den));
    net.output.bias = rand_rat(rng, mag, max_den);
    return net;
}

/// Independent piece-count oracle: dense-grid slope scan on [lo, hi]. Each
/// piece must receive at least three grid points for the count to be exact;
/// transition slopes spanning an off-grid kink occupy a single grid cell and
/// are discarded.
inline long count_pieces_sampled(const Pwl& f, const Rat& lo, const Rat& hi, long steps) {
    Rat h = (hi - lo) / steps;
    std::vector<Rat> slopes;
    Rat prev_y = f(lo);
    for (long i = 1; i <= steps; ++i) {
        Rat x = lo + h * i;
        Rat y = f(x);
        slopes.push_back((y - prev_y) / h);
        prev_y = y;
    }
    std::vector<std::pair<Rat, long>> runs;
    for (const auto& s : slopes) {
        if (!runs.empty() && runs.back().first == s)
            ++runs.back().second;
        else
            runs.emplace_back(s, 1);
    }
    long pieces = 0;
    for (const auto& [s, len] : runs)
        if (len >= 2) ++pieces;
    return pieces;
}

} // namespace pwlnet::testutil
