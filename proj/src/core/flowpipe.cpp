#include "flowpipe.hpp"

#include <cmath>
#include <map>

namespace hyreach {

std::size_t segment_cap(double delta, double horizon) {
    const double q = horizon / delta;
    const double c = std::ceil(q - 1e-9 * std::max(1.0, q));
    return static_cast<std::size_t>(std::max(1.0, c));
}

LazyFlowpipe::LazyFlowpipe(const StateSet& entry, std::vector<double> rates, Condition invariant, double delta,
                           std::size_t max_segments, bool zero_dwell, double slack)
    : entry_(intersect(entry, invariant)),
      rates_(std::move(rates)),
      invariant_(std::move(invariant)),
      delta_(delta),
      cap_(std::max<std::size_t>(1, max_segments)),
      zero_dwell_(zero_dwell),
      slack_(slack) {
    if (entry_.is_empty()) return;
    if (zero_dwell_) {
        length_ = 1;
        return;
    }
    Interval tau;
    if (feasible_time(Condition{}, tau)) {
        std::size_t k = cap_;
        if (tau.hi < kInf) k = static_cast<std::size_t>(std::min<double>(static_cast<double>(cap_), std::floor(tau.hi / delta_) + 1));
        k = std::max<std::size_t>(k, 1);
        while (k > 1 && segment(k - 1).is_empty()) --k;
        while (k < cap_ && !segment(k).is_empty()) ++k;
        length_ = k;
    } else {
        std::size_t k = 0;
        while (k < cap_ && !segment(k).is_empty()) ++k;
        length_ = k;
    }
}

Interval LazyFlowpipe::segment_time(std::size_t k) const {
    if (zero_dwell_) return {0.0, 0.0};
    return {static_cast<double>(k) * delta_, static_cast<double>(k + 1) * delta_};
}

StateSet LazyFlowpipe::segment(std::size_t k) const {
    if (zero_dwell_) return k == 0 ? entry_ : empty_like(entry_);
    return intersect(elapse(entry_, rates_, segment_time(k), slack_), invariant_);
}

StateSet LazyFlowpipe::hull(SegmentRange r) const {
    r = r.meet(all());
    if (r.empty()) return empty_like(entry_);
    if (zero_dwell_) return entry_;
    const Interval dt{static_cast<double>(r.first) * delta_, static_cast<double>(r.last) * delta_};
    return intersect(elapse(entry_, rates_, dt, slack_), invariant_);
}

bool LazyFlowpipe::nonempty_with(std::size_t k, const Condition& guard) const {
    return !intersect(segment(k), guard).is_empty();
}

bool LazyFlowpipe::feasible_time(const Condition& cond, Interval& tau) const {
    std::map<VarIndex, Interval> limits;
    auto tighten = [&](const std::vector<LinearConstraint>& cs) {
        for (const LinearConstraint& c : cs) {
            if (c.is_trivial()) continue;
            if (c.terms.size() != 1) return false;
            const Term& t = c.terms.front();
            Interval& lim = limits.try_emplace(t.var, Interval::all()).first->second;
            const double v = c.bound / t.coeff;
            const bool upper = (t.coeff > 0) == (c.rel == Relation::le || c.rel == Relation::lt);
            if (c.rel == Relation::eq) {
                lim.lo = std::max(lim.lo, v);
                lim.hi = std::min(lim.hi, v);
            } else if (upper) {
                lim.hi = std::min(lim.hi, v);
            } else {
                lim.lo = std::max(lim.lo, v);
            }
        }
        return true;
    };
    for (const auto* cs : {&invariant_.constraints, &cond.constraints}) {
        for (const LinearConstraint& c : *cs) {
            if (c.is_trivial() && intersect(entry_, Condition{{c}}).is_empty()) {
                tau = Interval::empty();
                return true;
            }
        }
    }
    if (!tighten(invariant_.constraints) || !tighten(cond.constraints)) return false;
    if (entry_.is_octagon() && limits.size() > 1) return false;

    tau = {0.0, kInf};
    for (const auto& [v, lim] : limits) {
        const Interval p = entry_.bounds(v);
        const double c = v < rates_.size() ? rates_[v] : 0.0;
        // p.lo + c*tau <= lim.hi and p.hi + c*tau >= lim.lo
        auto upto = [&](double a, double b) {  // a*tau <= b
            if (a > 0) {
                tau.hi = std::min(tau.hi, b / a);
            } else if (a < 0) {
                tau.lo = std::max(tau.lo, b / a);
            } else if (b < 0) {
                tau = Interval::empty();
            }
        };
        if (lim.hi < kInf) upto(c, lim.hi - p.lo);
        if (lim.lo > -kInf) upto(-c, p.hi - lim.lo);
        if (tau.is_empty()) break;
    }
    return true;
}

SegmentRange LazyFlowpipe::enabling(const Condition& guard, SegmentRange within) const {
    within = within.meet(all());
    if (within.empty()) return {0, 0};
    if (guard.is_true()) return within;
    if (zero_dwell_) return nonempty_with(0, guard) ? within : SegmentRange{0, 0};

    Interval tau;
    if (feasible_time(guard, tau)) {
        if (tau.is_empty()) return {0, 0};
        const double lo = std::ceil(tau.lo / delta_) - 1.0;
        const double hi = tau.hi == kInf ? static_cast<double>(within.last) : std::floor(tau.hi / delta_) + 1.0;
        SegmentRange r{static_cast<std::size_t>(std::max(0.0, lo)),
                       static_cast<std::size_t>(std::max(0.0, std::min(hi, static_cast<double>(within.last))))};
        r = r.meet(within);
        if (r.empty()) {
            // rounding may put a single boundary segment just outside
            const std::size_t k = std::min(r.first, within.last - 1);
            if (k >= within.first && nonempty_with(k, guard)) r = {k, k + 1};
            else return {0, 0};
        }
        while (!r.empty() && !nonempty_with(r.first, guard)) ++r.first;
        while (!r.empty() && !nonempty_with(r.last - 1, guard)) --r.last;
        if (r.empty()) return {0, 0};
        while (r.first > within.first && nonempty_with(r.first - 1, guard)) --r.first;
        while (r.last < within.last && nonempty_with(r.last, guard)) ++r.last;
        return r;
    }
    SegmentRange r{0, 0};
    for (std::size_t k = within.first; k < within.last; ++k) {
        if (nonempty_with(k, guard)) {
            if (r.empty()) r.first = k;
            r.last = k + 1;
        } else if (!r.empty()) {
            break;
        }
    }
    return r;
}

std::vector<StateSet> flowpipe(const StateSet& entry, const std::vector<double>& rates, const Condition& invariant,
                               double delta, double horizon, bool zero_dwell, double slack) {
    LazyFlowpipe fp(entry, rates, invariant, delta, segment_cap(delta, horizon), zero_dwell, slack);
    std::vector<StateSet> out;
    out.reserve(fp.length());
    for (std::size_t k = 0; k < fp.length(); ++k) out.push_back(fp.segment(k));
    return out;
}

StateSet jump_successor(const std::vector<StateSet>& segments, const Condition& guard, const AffineReset& reset,
                        const Condition& target_invariant, double slack) {
    if (segments.empty()) return {};
    StateSet acc = empty_like(segments.front());
    for (const StateSet& s : segments) {
        const StateSet enabled = intersect(s, guard);
        if (enabled.is_empty()) continue;
        acc = hull(acc, transform(enabled, reset, slack));
    }
    if (acc.is_empty()) return acc;
    return intersect(acc, target_invariant);
}

}  // namespace hyreach
