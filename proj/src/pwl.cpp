#include "pwlnet/pwl.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace pwlnet {

namespace {

Rat interp_slope(const Breakpoint& a, const Breakpoint& b) {
    return (b.y - a.y) / (b.x - a.x);
}

} // namespace

Pwl Pwl::affine(const Rat& slope, const Rat& intercept, Domain domain) {
    Pwl f;
    f.left_slope_ = slope;
    f.right_slope_ = slope;
    f.intercept_ = intercept;
    f.domain_ = std::move(domain);
    return f;
}

Pwl Pwl::from_points(std::vector<Breakpoint> pts, const Rat& left_slope, const Rat& right_slope, Domain domain) {
    if (pts.empty()) throw std::invalid_argument("Pwl::from_points: need at least one point");

    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        if (pts[i].x > pts[i + 1].x) throw std::invalid_argument("Pwl::from_points: abscissae not sorted");

    // Duplicate abscissae are legal only when the ordinates agree.
    std::vector<Breakpoint> uniq;
    uniq.reserve(pts.size());
    for (auto& p : pts) {
        if (!uniq.empty() && uniq.back().x == p.x) {
            if (uniq.back().y != p.y)
                throw std::invalid_argument("Pwl::from_points: duplicate abscissa with unequal ordinates");
            continue;
        }
        uniq.push_back(std::move(p));
    }
    pts = std::move(uniq);

    Rat ls = left_slope, rs = right_slope;
    if (domain) {
        if (pts.front().x < domain->lo || pts.back().x > domain->hi)
            throw std::invalid_argument("Pwl::from_points: point outside domain");
        // Points sitting exactly on the boundary anchor values only.
        bool at_lo = pts.front().x == domain->lo;
        bool at_hi = pts.back().x == domain->hi;
        if (pts.size() == 1 && (at_lo || at_hi)) {
            if (ls != rs)
                throw std::invalid_argument("Pwl::from_points: inconsistent slopes for single boundary anchor");
            return affine(ls, pts[0].y - ls * pts[0].x, std::move(domain));
        }
        if (pts.size() == 2 && at_lo && at_hi) {
            Rat s = interp_slope(pts[0], pts[1]);
            return affine(s, pts[0].y - s * pts[0].x, std::move(domain));
        }
        if (at_lo) {
            ls = interp_slope(pts[0], pts[1]);
            pts.erase(pts.begin());
        }
        if (at_hi) {
            rs = interp_slope(pts[pts.size() - 2], pts.back());
            pts.pop_back();
        }
    }

    // Drop points where the incoming and outgoing slopes agree.
    std::vector<Breakpoint> kinks;
    kinks.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Rat sl = kinks.empty() ? ls : interp_slope(kinks.back(), pts[i]);
        Rat sr = (i + 1 < pts.size()) ? interp_slope(pts[i], pts[i + 1]) : rs;
        if (sl != sr) kinks.push_back(pts[i]);
    }

    if (kinks.empty()) {
        const Breakpoint& p = pts.front();
        return affine(ls, p.y - ls * p.x, std::move(domain));
    }

    Pwl f;
    f.left_slope_ = std::move(ls);
    f.right_slope_ = std::move(rs);
    f.bps_ = std::move(kinks);
    f.domain_ = std::move(domain);
    return f;
}

Rat Pwl::operator()(const Rat& x) const {
    if (domain_ && !domain_->contains(x)) throw std::domain_error("Pwl: evaluation outside domain");
    if (bps_.empty()) return left_slope_ * x + intercept_;
    if (x <= bps_.front().x) return bps_.front().y + left_slope_ * (x - bps_.front().x);
    if (x >= bps_.back().x) return bps_.back().y + right_slope_ * (x - bps_.back().x);
    auto it = std::upper_bound(bps_.begin(), bps_.end(), x,
                               [](const Rat& v, const Breakpoint& b) { return v < b.x; });
    const Breakpoint& hi = *it;
    const Breakpoint& lo = *(it - 1);
    return lo.y + interp_slope(lo, hi) * (x - lo.x);
}

Rat Pwl::slope_at(const Rat& x) const {
    if (domain_ && !domain_->contains(x)) throw std::domain_error("Pwl: slope outside domain");
    if (bps_.empty()) return left_slope_;
    if (x < bps_.front().x) return left_slope_;
    if (x >= bps_.back().x) return right_slope_;
    auto it = std::upper_bound(bps_.begin(), bps_.end(), x,
                               [](const Rat& v, const Breakpoint& b) { return v < b.x; });
    return interp_slope(*(it - 1), *it);
}

RangeInfo Pwl::range() const {
    RangeInfo r;
    if (bps_.empty()) {
        if (domain_) {
            Rat a = (*this)(domain_->lo), b = (*this)(domain_->hi);
            r.lo = std::min(a, b);
            r.hi = std::max(a, b);
        } else if (left_slope_ == 0) {
            r.lo = r.hi = intercept_;
        } else {
            r.lo_unbounded = r.hi_unbounded = true;
        }
        return r;
    }
    r.lo = bps_.front().y;
    r.hi = bps_.front().y;
    for (const auto& b : bps_) {
        r.lo = std::min(r.lo, b.y);
        r.hi = std::max(r.hi, b.y);
    }
    if (domain_) {
        for (Rat v : {(*this)(domain_->lo), (*this)(domain_->hi)}) {
            r.lo = std::min(r.lo, v);
            r.hi = std::max(r.hi, v);
        }
    } else {
        if (left_slope_ > 0) r.lo_unbounded = true;
        if (left_slope_ < 0) r.hi_unbounded = true;
        if (right_slope_ > 0) r.hi_unbounded = true;
        if (right_slope_ < 0) r.lo_unbounded = true;
    }
    return r;
}

Pwl linear_combination(std::span<const std::pair<Rat, Pwl>> terms, const Rat& bias) {
    if (terms.empty()) return Pwl::constant(bias);

    const Domain& dom = terms.front().second.domain();
    for (const auto& [c, f] : terms)
        if (!same_domain(dom, f.domain()))
            throw std::domain_error("linear_combination: mixed incompatible domains");

    std::vector<Rat> xs;
    for (const auto& [c, f] : terms)
        for (const auto& b : f.breakpoints()) xs.push_back(b.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    Rat ls(0), rs(0);
    for (const auto& [c, f] : terms) {
        ls += c * f.left_slope();
        rs += c * f.right_slope();
    }

    if (xs.empty()) {
        Rat probe = dom ? dom->midpoint() : Rat(0);
        Rat v = bias;
        for (const auto& [c, f] : terms) v += c * f(probe);
        return Pwl::affine(ls, v - ls * probe, dom);
    }

    std::vector<Breakpoint> pts;
    pts.reserve(xs.size());
    for (auto& x : xs) {
        Rat v = bias;
        for (const auto& [c, f] : terms) v += c * f(x);
        pts.push_back({std::move(x), std::move(v)});
    }
    return Pwl::from_points(std::move(pts), ls, rs, dom);
}

Pwl linear_combination(std::initializer_list<std::pair<Rat, Pwl>> terms, const Rat& bias) {
    return linear_combination(std::span<const std::pair<Rat, Pwl>>(terms.begin(), terms.size()), bias);
}

Pwl relu(const Pwl& g) {
    const Domain& dom = g.domain();
    const auto& bps = g.breakpoints();

    if (bps.empty()) {
        if (g.left_slope_ == 0) {
            return Pwl::constant(g.intercept_ > 0 ? g.intercept_ : Rat(0), dom);
        }
        Rat x0 = -g.intercept_ / g.left_slope_;
        if (dom && !(dom->lo < x0 && x0 < dom->hi)) {
            Rat v = g(dom->midpoint());
            return v > 0 ? g : Pwl::constant(Rat(0), dom);
        }
        std::vector<Breakpoint> pts{{x0, Rat(0)}};
        Rat ls = g.left_slope_ < 0 ? g.left_slope_ : Rat(0);
        Rat rs = g.left_slope_ > 0 ? g.left_slope_ : Rat(0);
        return Pwl::from_points(std::move(pts), ls, rs, dom);
    }

    std::vector<Breakpoint> pts;
    pts.reserve(2 * bps.size() + 2);
    auto push_zero = [&](Rat x) { pts.push_back({std::move(x), Rat(0)}); };

    if (g.left_slope() != 0) {
        Rat x0 = bps.front().x - bps.front().y / g.left_slope();
        if (x0 < bps.front().x && (!dom || dom->lo < x0)) push_zero(std::move(x0));
    }
    for (std::size_t i = 0; i < bps.size(); ++i) {
        if (i > 0) {
            Rat s = interp_slope(bps[i - 1], bps[i]);
            if (s != 0) {
                Rat x0 = bps[i - 1].x - bps[i - 1].y / s;
                if (bps[i - 1].x < x0 && x0 < bps[i].x) push_zero(std::move(x0));
            }
        }
        pts.push_back({bps[i].x, bps[i].y > 0 ? bps[i].y : Rat(0)});
    }
    if (g.right_slope() != 0) {
        Rat x0 = bps.back().x - bps.back().y / g.right_slope();
        if (x0 > bps.back().x && (!dom || x0 < dom->hi)) push_zero(std::move(x0));
    }
    std::sort(pts.begin(), pts.end(), [](const Breakpoint& a, const Breakpoint& b) { return a.x < b.x; });

    Rat lprobe = dom ? Rat((dom->lo + pts.front().x) / 2) : Rat(pts.front().x - 1);
    Rat rprobe = dom ? Rat((dom->hi + pts.back().x) / 2) : Rat(pts.back().x + 1);
    Rat ls = g(lprobe) > 0 ? g.left_slope() : Rat(0);
    Rat rs = g(rprobe) > 0 ? g.right_slope() : Rat(0);
    return Pwl::from_points(std::move(pts), ls, rs, dom);
}

Pwl compose(const Pwl& outer, const Pwl& inner) {
    const Domain& dom = inner.domain();

    if (outer.domain()) {
        RangeInfo rng = inner.range();
        if (rng.lo_unbounded || rng.hi_unbounded || !outer.domain()->contains(Interval(rng.lo, rng.hi)))
            throw std::domain_error("compose: range of inner exceeds domain of outer");
    }

    const auto& ibps = inner.breakpoints();
    const auto& obps = outer.breakpoints();

    std::vector<Rat> xs;
    for (const auto& b : ibps) xs.push_back(b.x);

    // preimages of outer breakpoints, walked piece by piece of inner
    auto add_preimages = [&](const Rat& slope, const Breakpoint& anchor, const Rat* lo, const Rat* hi) {
        if (slope == 0 || obps.empty()) return;
        for (const auto& ob : obps) {
            Rat x0 = anchor.x + (ob.x - anchor.y) / slope;
            if ((lo == nullptr || *lo < x0) && (hi == nullptr || x0 < *hi)) xs.push_back(std::move(x0));
        }
    };

    const Rat* dlo = dom ? &dom->lo : nullptr;
    const Rat* dhi = dom ? &dom->hi : nullptr;
    if (ibps.empty()) {
        Rat probe = dom ? dom->midpoint() : Rat(0);
        Breakpoint anchor{probe, inner(probe)};
        add_preimages(inner.left_slope(), anchor, dlo, dhi);
    } else {
        add_preimages(inner.left_slope(), ibps.front(), dlo, &ibps.front().x);
        for (std::size_t i = 0; i + 1 < ibps.size(); ++i)
            add_preimages(interp_slope(ibps[i], ibps[i + 1]), ibps[i], &ibps[i].x, &ibps[i + 1].x);
        add_preimages(inner.right_slope(), ibps.back(), &ibps.back().x, dhi);
    }

    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    if (xs.empty()) {
        Rat probe = dom ? dom->midpoint() : Rat(0);
        Rat s = inner.slope_at(probe) * outer.slope_at(inner(probe));
        Rat v = outer(inner(probe));
        return Pwl::affine(s, v - s * probe, dom);
    }

    std::vector<Breakpoint> pts;
    pts.reserve(xs.size());
    for (auto& x : xs) {
        Rat v = outer(inner(x));
        pts.push_back({std::move(x), std::move(v)});
    }

    Rat ls, rs;
    if (dom) {
        Rat lp = (dom->lo + pts.front().x) / 2;
        Rat rp = (dom->hi + pts.back().x) / 2;
        ls = inner.slope_at(lp) * outer.slope_at(inner(lp));
        rs = inner.slope_at(rp) * outer.slope_at(inner(rp));
    } else {
        if (inner.left_slope() == 0)
            ls = 0;
        else
            ls = inner.left_slope() * (inner.left_slope() > 0 ? outer.left_slope() : outer.right_slope());
        if (inner.right_slope() == 0)
            rs = 0;
        else
            rs = inner.right_slope() * (inner.right_slope() > 0 ? outer.right_slope() : outer.left_slope());
    }
    return Pwl::from_points(std::move(pts), ls, rs, dom);
}

Pwl restrict_to(const Pwl& f, const Interval& iv) {
    if (f.domain() && !f.domain()->contains(iv)) throw std::domain_error("restrict_to: interval outside domain");

    std::vector<Breakpoint> pts;
    for (const auto& b : f.breakpoints())
        if (iv.lo < b.x && b.x < iv.hi) pts.push_back(b);

    if (pts.empty()) {
        Rat m = iv.midpoint();
        Rat s = f.slope_at(m);
        return Pwl::affine(s, f(m) - s * m, iv);
    }
    Rat ls = f.slope_at((iv.lo + pts.front().x) / 2);
    Rat rs = f.slope_at((iv.hi + pts.back().x) / 2);
    return Pwl::from_points(std::move(pts), ls, rs, iv);
}

PieceReport analyze(const Pwl& f) {
    const auto& bps = f.breakpoints();
    PieceReport rep;
    rep.breakpoints = static_cast<long>(bps.size());
    rep.pieces = rep.breakpoints + 1;

    const Domain& dom = f.domain();

    if (bps.empty()) {
        Rat anchor_x = dom ? dom->lo : Rat(0);
        Rat v = f(anchor_x);
        if (f.left_slope() == 0) {
            if (v == 0) rep.distinct_zeros = 1;
        } else {
            Rat x0 = anchor_x - v / f.left_slope();
            if (!dom || (dom->lo < x0 && x0 < dom->hi)) {
                rep.distinct_zeros = 1;
                rep.crossing_zeros = 1;
            } else if (x0 == dom->lo || x0 == dom->hi) {
                rep.distinct_zeros = 1; // boundary zero; no sign change inside the domain
            }
        }
        return rep;
    }

    bool run_open = false;

    // leftmost piece
    if (f.left_slope() == 0) {
        if (bps.front().y == 0) {
            ++rep.distinct_zeros;
            run_open = true;
        }
    } else {
        Rat x0 = bps.front().x - bps.front().y / f.left_slope();
        if (x0 < bps.front().x) {
            if (!dom || dom->lo < x0) {
                ++rep.distinct_zeros;
                ++rep.crossing_zeros;
            } else if (x0 == dom->lo) {
                ++rep.distinct_zeros;
            }
        }
    }

    for (std::size_t i = 0; i < bps.size(); ++i) {
        if (bps[i].y == 0) {
            if (!run_open) ++rep.distinct_zeros;
            // the component may extend through a flat zero piece to the right
            if (i + 1 < bps.size())
                run_open = bps[i + 1].y == 0 && interp_slope(bps[i], bps[i + 1]) == 0;
            else
                run_open = f.right_slope() == 0;
        } else {
            run_open = false;
        }
        if (i + 1 < bps.size()) {
            Rat s = interp_slope(bps[i], bps[i + 1]);
            if (s != 0) {
                Rat x0 = bps[i].x - bps[i].y / s;
                if (bps[i].x < x0 && x0 < bps[i + 1].x) {
                    ++rep.distinct_zeros;
                    ++rep.crossing_zeros;
                }
            }
        }
    }

    // rightmost piece; a flat zero tail was already merged via run_open
    if (f.right_slope() != 0) {
        Rat x0 = bps.back().x - bps.back().y / f.right_slope();
        if (x0 > bps.back().x) {
            if (!dom || x0 < dom->hi) {
                ++rep.distinct_zeros;
                ++rep.crossing_zeros;
            } else if (x0 == dom->hi) {
                ++rep.distinct_zeros;
            }
        }
    }

    return rep;
}

bool is_sawtooth(const Pwl& f, long n_pieces, const Interval& iv) {
    if (n_pieces < 1 || iv.lo >= iv.hi) return false;
    Pwl r = restrict_to(f, iv);
    const auto& bps = r.breakpoints();
    if (static_cast<long>(bps.size()) != n_pieces - 1) return false;

    Rat width = iv.length() / n_pieces;
    for (long i = 0; i + 1 < n_pieces; ++i)
        if (bps[static_cast<std::size_t>(i)].x != iv.lo + width * (i + 1)) return false;

    std::vector<Rat> slopes;
    slopes.push_back(r.left_slope());
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) slopes.push_back(interp_slope(bps[i], bps[i + 1]));
    if (n_pieces > 1) slopes.push_back(r.right_slope());

    if (slopes.front() == 0) return false;
    for (std::size_t i = 0; i + 1 < slopes.size(); ++i)
        if (slopes[i + 1] != -slopes[i]) return false;
    return true;
}

} // namespace pwlnet
