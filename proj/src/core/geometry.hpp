#pragma once

// State-set representations for flowpipe construction: n-dimensional boxes
// and octagons over a two-variable subspace {x, t}.

#include "model.hpp"

#include <array>
#include <limits>
#include <variant>
#include <vector>

namespace hyreach {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
    double lo = 0.0;
    double hi = -1.0;

    static Interval empty() { return {0.0, -1.0}; }
    static Interval all() { return {-kInf, kInf}; }
    static Interval point(double v) { return {v, v}; }

    bool is_empty() const { return !(lo <= hi); }
    bool contains(double v, double tol = 0.0) const { return !is_empty() && v >= lo - tol && v <= hi + tol; }
    bool contains(const Interval& o, double tol = 0.0) const {
        return o.is_empty() || (!is_empty() && o.lo >= lo - tol && o.hi <= hi + tol);
    }
    bool overlaps(const Interval& o) const { return !is_empty() && !o.is_empty() && lo <= o.hi && o.lo <= hi; }
    Interval meet(const Interval& o) const;
    Interval join(const Interval& o) const;

    friend bool operator==(const Interval&, const Interval&) = default;
};

class Box {
public:
    Box() = default;
    explicit Box(std::vector<Interval> dims);

    static Box universe(std::size_t dim) { return Box(std::vector<Interval>(dim, Interval::all())); }
    static Box empty(std::size_t dim);
    static Box point(const std::vector<double>& values);

    std::size_t dimension() const { return dims_.size(); }
    bool is_empty() const { return empty_; }
    const Interval& operator[](std::size_t i) const { return dims_[i]; }
    const std::vector<Interval>& intervals() const { return dims_; }

    bool contains(const Box& other, double tol = 0.0) const;
    bool contains(const std::vector<double>& p, double tol = 0.0) const;

    friend bool operator==(const Box&, const Box&) = default;

private:
    std::vector<Interval> dims_;
    bool empty_ = false;
};

Box elapse(const Box& s, const std::vector<double>& rates, Interval dt, double slack = 0.0);
/// Exact for single-variable constraints; one round of interval propagation otherwise.
Box intersect(const Box& s, const Condition& c);
Box intersect(const Box& a, const Box& b);
Box transform(const Box& s, const AffineReset& r, double slack = 0.0);
Box hull(const Box& a, const Box& b);

/// Octagon over the subspace (x, t): d_k . (x, t) <= offset_k for the eight
/// directions +x, x+t, +t, -x+t, -x, -x-t, -t, x-t (counter-clockwise).
class Octagon2D {
public:
    using Offsets = std::array<double, 8>;
    static constexpr std::array<std::array<double, 2>, 8> kDirections{{
        {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

    Octagon2D() : Octagon2D(0, 1) {}
    Octagon2D(VarIndex x, VarIndex t);  // universe
    /// Normalizes the given offsets.
    Octagon2D(VarIndex x, VarIndex t, const Offsets& offsets);

    static Octagon2D from_box(VarIndex x, VarIndex t, Interval xr, Interval tr);
    static Octagon2D empty(VarIndex x, VarIndex t);
    /// Tightest octagon containing the given points.
    static Octagon2D from_points(VarIndex x, VarIndex t, const std::vector<std::array<double, 2>>& pts);

    VarIndex x_var() const { return x_; }
    VarIndex t_var() const { return t_; }
    const Offsets& offsets() const { return b_; }
    bool is_empty() const { return empty_; }
    bool is_bounded() const;
    Interval x_range() const;
    Interval t_range() const;
    /// Vertices in counter-clockwise order (duplicates removed). Requires a bounded octagon.
    std::vector<std::array<double, 2>> vertices() const;

    bool contains(const Octagon2D& other, double tol = 0.0) const;
    bool contains(double x, double t, double tol = 0.0) const;

    friend bool operator==(const Octagon2D&, const Octagon2D&) = default;

private:
    void normalize();

    VarIndex x_ = 0, t_ = 1;
    Offsets b_{};
    bool empty_ = false;
};

Octagon2D elapse(const Octagon2D& s, double rate_x, double rate_t, Interval dt, double slack = 0.0);
Octagon2D intersect(const Octagon2D& s, const Condition& c);
Octagon2D intersect(const Octagon2D& a, const Octagon2D& b);
Octagon2D transform(const Octagon2D& s, const AffineReset& r, double slack = 0.0);
Octagon2D hull(const Octagon2D& a, const Octagon2D& b);
/// Exact projection on the time axis; the empty interval for an empty octagon.
Interval project_time(const Octagon2D& s);

/// Either representation, addressed through variable indices of a common scope.
class StateSet {
public:
    StateSet() = default;
    StateSet(Box b) : v_(std::move(b)) {}
    StateSet(Octagon2D o) : v_(std::move(o)) {}

    bool is_box() const { return std::holds_alternative<Box>(v_); }
    bool is_octagon() const { return std::holds_alternative<Octagon2D>(v_); }
    const Box& box() const { return std::get<Box>(v_); }
    const Octagon2D& octagon() const { return std::get<Octagon2D>(v_); }

    bool is_empty() const;
    /// Projection on one variable.
    Interval bounds(VarIndex v) const;
    bool contains(const StateSet& other, double tol = 0.0) const;
    /// p is indexed by variable.
    bool contains(const std::vector<double>& p, double tol = 0.0) const;

    friend bool operator==(const StateSet&, const StateSet&) = default;

private:
    std::variant<Box, Octagon2D> v_;
};

StateSet elapse(const StateSet& s, const std::vector<double>& rates, Interval dt, double slack = 0.0);
StateSet intersect(const StateSet& s, const Condition& c);
StateSet intersect(const StateSet& a, const StateSet& b);
StateSet transform(const StateSet& s, const AffineReset& r, double slack = 0.0);
StateSet hull(const StateSet& a, const StateSet& b);
StateSet restrict_time(const StateSet& s, VarIndex t, Interval window);
/// Empty copy of s with the same scope.
StateSet empty_like(const StateSet& s);

}  // namespace hyreach
