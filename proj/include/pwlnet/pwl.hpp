#pragma once

#include "pwlnet/interval.hpp"
#include "pwlnet/rat.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace pwlnet {

struct Breakpoint {
    Rat x, y;
    bool operator==(const Breakpoint& o) const { return x == o.x && y == o.y; }
};

/// Exact value range of a PWL function; `lo`/`hi` are meaningful only when the
/// corresponding side is bounded.
struct RangeInfo {
    bool lo_unbounded = false;
    bool hi_unbounded = false;
    Rat lo, hi;
};

struct PieceReport {
    long pieces = 0;
    long breakpoints = 0;
    long crossing_zeros = 0;
    long distinct_zeros = 0;
};

/// Continuous univariate piecewise-linear function over exact rationals.
///
/// Canonical representation: a strictly increasing list of genuine breakpoints
/// (left and right derivative differ at each), the slopes of the two outermost
/// pieces, and an optional closed domain. Values between breakpoints are the
/// linear interpolants, so continuity holds by construction. With no
/// breakpoints the function is affine and `left_slope`/`right_slope` coincide.
class Pwl {
public:
    /// The zero function on all of R.
    Pwl() = default;

    /// Canonicalizing constructor from raw data. Points must be sorted by x;
    /// duplicate abscissae are allowed only with equal ordinates (anything
    /// else would denote a discontinuity and throws std::invalid_argument).
    /// Spurious points where the two adjacent slopes agree are removed.
    ///
    /// With a restricted domain, `left_slope`/`right_slope` are the slopes of
    /// the first and last piece inside it. Raw points sitting exactly on the
    /// domain boundary only anchor values and are dropped from the breakpoint
    /// list; if the first/last raw point is interior the boundary slope
    /// parameters apply between it and the domain edge.
    static Pwl from_points(std::vector<Breakpoint> pts, const Rat& left_slope, const Rat& right_slope,
                           Domain domain = {});

    /// f(x) = slope*x + intercept.
    static Pwl affine(const Rat& slope, const Rat& intercept, Domain domain = {});
    static Pwl constant(const Rat& value, Domain domain = {}) { return affine(Rat(0), value, std::move(domain)); }
    static Pwl identity(Domain domain = {}) { return affine(Rat(1), Rat(0), std::move(domain)); }

    const std::vector<Breakpoint>& breakpoints() const { return bps_; }
    const Rat& left_slope() const { return left_slope_; }
    const Rat& right_slope() const { return right_slope_; }
    const Domain& domain() const { return domain_; }

    /// Exact evaluation. Throws std::domain_error outside a restricted domain.
    Rat operator()(const Rat& x) const;

    /// Slope of the piece containing x, taking the right-hand piece at a breakpoint
    /// (left-hand piece at the right domain endpoint).
    Rat slope_at(const Rat& x) const;

    /// Exact value range from piece extrema; never sampled.
    RangeInfo range() const;

    bool operator==(const Pwl& o) const {
        return same_domain(domain_, o.domain_) && bps_ == o.bps_ && left_slope_ == o.left_slope_ &&
               right_slope_ == o.right_slope_ && (!bps_.empty() || intercept_ == o.intercept_);
    }

private:
    std::vector<Breakpoint> bps_;
    Rat left_slope_{0};
    Rat right_slope_{0};
    Rat intercept_{0}; // value at x = 0 when bps_ is empty; unused otherwise
    Domain domain_;

    friend Pwl linear_combination(std::span<const std::pair<Rat, Pwl>> terms, const Rat& bias);
    friend Pwl relu(const Pwl& g);
    friend Pwl compose(const Pwl& outer, const Pwl& inner);
    friend Pwl restrict_to(const Pwl& f, const Interval& iv);
};

/// Exact affine combination sum(coef_i * f_i) + bias. All terms must share one
/// domain (or all be unrestricted); mixing throws std::domain_error.
Pwl linear_combination(std::span<const std::pair<Rat, Pwl>> terms, const Rat& bias);
Pwl linear_combination(std::initializer_list<std::pair<Rat, Pwl>> terms, const Rat& bias);

/// Pointwise max(g, 0). New breakpoints appear exactly at the crossing zeros of g.
Pwl relu(const Pwl& g);

/// outer(inner(x)). The range of inner must lie inside outer's domain (checked
/// exactly via piece extrema); otherwise throws std::domain_error.
Pwl compose(const Pwl& outer, const Pwl& inner);

/// Restriction to a subinterval of the current domain.
Pwl restrict_to(const Pwl& f, const Interval& iv);

/// Exact piece/breakpoint/zero census.
///
/// crossing_zeros counts sign-change zeros in the interior of pieces (the only
/// zeros that mint new breakpoints under relu); distinct_zeros counts maximal
/// connected zero loci, each isolated zero or zero segment once.
PieceReport analyze(const Pwl& f);

/// True iff f restricted to [a,b] consists of exactly N pieces of equal width
/// with slopes alternating between +s and -s for a single magnitude s > 0.
bool is_sawtooth(const Pwl& f, long n_pieces, const Interval& iv);

/// Structural equality after canonicalization; sound and complete for
/// continuous PWL functions on equal domains.
inline bool equals(const Pwl& f, const Pwl& g) { return f == g; }

} // namespace pwlnet
