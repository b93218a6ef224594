#include "geometry.hpp"

#include <algorithm>
#include <cmath>

namespace hyreach {

Interval Interval::meet(const Interval& o) const {
    if (is_empty() || o.is_empty()) return empty();
    Interval r{std::max(lo, o.lo), std::min(hi, o.hi)};
    return r.is_empty() ? empty() : r;
}

Interval Interval::join(const Interval& o) const {
    if (is_empty()) return o;
    if (o.is_empty()) return *this;
    return {std::min(lo, o.lo), std::max(hi, o.hi)};
}

// ---------------------------------------------------------------- Box

Box::Box(std::vector<Interval> dims) : dims_(std::move(dims)) {
    empty_ = std::any_of(dims_.begin(), dims_.end(), [](const Interval& i) { return i.is_empty(); });
    if (empty_) std::fill(dims_.begin(), dims_.end(), Interval::empty());
}

Box Box::empty(std::size_t dim) {
    Box b;
    b.dims_.assign(dim, Interval::empty());
    b.empty_ = true;
    return b;
}

Box Box::point(const std::vector<double>& values) {
    std::vector<Interval> dims;
    dims.reserve(values.size());
    for (double v : values) dims.push_back(Interval::point(v));
    return Box(std::move(dims));
}

bool Box::contains(const Box& other, double tol) const {
    if (other.empty_) return true;
    if (empty_ || other.dimension() != dimension()) return false;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (!dims_[i].contains(other.dims_[i], tol)) return false;
    }
    return true;
}

bool Box::contains(const std::vector<double>& p, double tol) const {
    if (empty_ || p.size() < dims_.size()) return false;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (!dims_[i].contains(p[i], tol)) return false;
    }
    return true;
}

namespace {

void check_scope(const Box& s, VarIndex v) {
    if (v >= s.dimension()) throw ScopeError("variable index " + std::to_string(v) + " outside box scope");
}

// Lower bound of a*[lo,hi].
double scaled_min(double a, const Interval& i) { return a > 0 ? a * i.lo : a * i.hi; }

bool trivial_holds(const LinearConstraint& c) {
    switch (c.rel) {
        case Relation::le:
        case Relation::lt: return 0.0 <= c.bound;
        case Relation::ge:
        case Relation::gt: return 0.0 >= c.bound;
        case Relation::eq: return c.bound == 0.0;
    }
    return true;
}

// Half-planes sum(terms) <= bound equivalent (after closing strict relations) to c.
std::vector<std::pair<std::vector<Term>, double>> as_upper_bounds(const LinearConstraint& c) {
    std::vector<Term> neg = c.terms;
    for (Term& t : neg) t.coeff = -t.coeff;
    switch (c.rel) {
        case Relation::le:
        case Relation::lt: return {{c.terms, c.bound}};
        case Relation::ge:
        case Relation::gt: return {{neg, -c.bound}};
        case Relation::eq: return {{c.terms, c.bound}, {neg, -c.bound}};
    }
    return {};
}

}  // namespace

Box elapse(const Box& s, const std::vector<double>& rates, Interval dt, double slack) {
    if (s.is_empty() || dt.is_empty()) return Box::empty(s.dimension());
    std::vector<Interval> dims = s.intervals();
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const double c = i < rates.size() ? rates[i] : 0.0;
        if (c == 0.0) continue;
        dims[i].lo += std::min(c * dt.lo, c * dt.hi) - slack;
        dims[i].hi += std::max(c * dt.lo, c * dt.hi) + slack;
    }
    return Box(std::move(dims));
}

Box intersect(const Box& s, const Condition& cond) {
    if (s.is_empty()) return s;
    std::vector<Interval> dims = s.intervals();
    for (const LinearConstraint& c : cond.constraints) {
        if (c.is_trivial()) {
            if (!trivial_holds(c)) return Box::empty(s.dimension());
            continue;
        }
        for (const Term& t : c.terms) check_scope(s, t.var);
        for (const auto& [terms, bound] : as_upper_bounds(c)) {
            for (std::size_t i = 0; i < terms.size(); ++i) {
                double rest = 0.0;
                for (std::size_t j = 0; j < terms.size() && rest > -kInf; ++j) {
                    if (j != i) rest += scaled_min(terms[j].coeff, dims[terms[j].var]);
                }
                if (rest == -kInf) continue;
                const double a = terms[i].coeff;
                const double lim = (bound - rest) / a;
                Interval& d = dims[terms[i].var];
                if (a > 0) {
                    d.hi = std::min(d.hi, lim);
                } else {
                    d.lo = std::max(d.lo, lim);
                }
                if (d.is_empty()) return Box::empty(s.dimension());
            }
        }
    }
    return Box(std::move(dims));
}

Box intersect(const Box& a, const Box& b) {
    if (a.dimension() != b.dimension()) throw ScopeError("box dimension mismatch");
    std::vector<Interval> dims;
    for (std::size_t i = 0; i < a.dimension(); ++i) dims.push_back(a[i].meet(b[i]));
    return Box(std::move(dims));
}

Box transform(const Box& s, const AffineReset& r, double slack) {
    if (s.is_empty()) return s;
    std::vector<Interval> dims = s.intervals();
    for (const Assignment& as : r.assignments()) {
        check_scope(s, as.var);
        Interval& d = dims[as.var];
        if (as.scale == 0.0) {
            d = Interval::point(as.offset);
            continue;
        }
        const double lo = as.scale * d.lo + as.offset;
        const double hi = as.scale * d.hi + as.offset;
        d = {std::min(lo, hi), std::max(lo, hi)};
        if (!as.is_identity()) {
            d.lo -= slack;
            d.hi += slack;
        }
    }
    return Box(std::move(dims));
}

Box hull(const Box& a, const Box& b) {
    if (a.is_empty()) return b;
    if (b.is_empty()) return a;
    if (a.dimension() != b.dimension()) throw ScopeError("box dimension mismatch");
    std::vector<Interval> dims;
    for (std::size_t i = 0; i < a.dimension(); ++i) dims.push_back(a[i].join(b[i]));
    return Box(std::move(dims));
}

// ---------------------------------------------------------------- Octagon2D

namespace {

using Point = std::array<double, 2>;

double dot(const std::array<double, 2>& d, const Point& p) { return d[0] * p[0] + d[1] * p[1]; }

// Direction index of the half-plane a.p <= c when (a0, a1) is a positive multiple of a template normal.
bool template_direction(double a0, double a1, int& k, double& scale) {
    if (a1 == 0.0 && a0 != 0.0) {
        k = a0 > 0 ? 0 : 4;
        scale = std::abs(a0);
    } else if (a0 == 0.0 && a1 != 0.0) {
        k = a1 > 0 ? 2 : 6;
        scale = std::abs(a1);
    } else if (a0 == a1 && a0 != 0.0) {
        k = a0 > 0 ? 1 : 5;
        scale = std::abs(a0);
    } else if (a0 == -a1 && a0 != 0.0) {
        k = a0 > 0 ? 7 : 3;
        scale = std::abs(a0);
    } else {
        return false;
    }
    return true;
}

std::vector<Point> clip(const std::vector<Point>& poly, const std::array<double, 2>& a, double c) {
    std::vector<Point> out;
    const double scale = std::max({1.0, std::abs(c)});
    const double tol = 1e-12 * scale;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % poly.size()];
        const double vp = dot(a, p) - c;
        const double vq = dot(a, q) - c;
        const bool pin = vp <= tol;
        const bool qin = vq <= tol;
        if (pin) out.push_back(p);
        if (pin != qin) {
            const double s = vp / (vp - vq);
            out.push_back({p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])});
        }
    }
    return out;
}

}  // namespace

Octagon2D::Octagon2D(VarIndex x, VarIndex t) : x_(x), t_(t) { b_.fill(kInf); }

Octagon2D::Octagon2D(VarIndex x, VarIndex t, const Offsets& offsets) : x_(x), t_(t), b_(offsets) { normalize(); }

Octagon2D Octagon2D::from_box(VarIndex x, VarIndex t, Interval xr, Interval tr) {
    if (xr.is_empty() || tr.is_empty()) return empty(x, t);
    return Octagon2D(x, t, {xr.hi, xr.hi + tr.hi, tr.hi, tr.hi - xr.lo, -xr.lo, -xr.lo - tr.lo, -tr.lo, xr.hi - tr.lo});
}

Octagon2D Octagon2D::empty(VarIndex x, VarIndex t) {
    Octagon2D o(x, t);
    o.b_.fill(-kInf);
    o.empty_ = true;
    return o;
}

Octagon2D Octagon2D::from_points(VarIndex x, VarIndex t, const std::vector<Point>& pts) {
    if (pts.empty()) return empty(x, t);
    Offsets b;
    b.fill(-kInf);
    for (const Point& p : pts) {
        for (std::size_t k = 0; k < 8; ++k) b[k] = std::max(b[k], dot(kDirections[k], p));
    }
    return Octagon2D(x, t, b);
}

void Octagon2D::normalize() {
    if (empty_) return;
    // Difference-bound matrix over the signed nodes +x, -x, +t, -t: m[i][j] bounds node_j - node_i.
    auto build = [](const Offsets& b, double extra) {
        std::array<std::array<double, 4>, 4> m;
        for (auto& row : m) row.fill(kInf);
        for (int i = 0; i < 4; ++i) m[i][i] = 0.0;
        auto set = [&](int i, int j, double v) { m[i][j] = std::min(m[i][j], v + extra); };
        set(1, 0, 2 * b[0]);
        set(0, 1, 2 * b[4]);
        set(3, 2, 2 * b[2]);
        set(2, 3, 2 * b[6]);
        set(3, 0, b[1]);
        set(1, 2, b[1]);
        set(0, 2, b[3]);
        set(3, 1, b[3]);
        set(2, 1, b[5]);
        set(0, 3, b[5]);
        set(2, 0, b[7]);
        set(1, 3, b[7]);
        return m;
    };
    auto close = [](std::array<std::array<double, 4>, 4>& m) {
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) m[i][j] = std::min(m[i][j], m[i][k] + m[k][j]);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) m[i][j] = std::min(m[i][j], (m[i][i ^ 1] + m[j ^ 1][j]) / 2);
        double worst = 0.0;
        for (int i = 0; i < 4; ++i) worst = std::min(worst, m[i][i]);
        return worst;
    };
    for (double v : b_) {
        if (std::isnan(v) || v == -kInf) {
            *this = empty(x_, t_);
            return;
        }
    }
    double magnitude = 1.0;
    for (double v : b_)
        if (std::isfinite(v)) magnitude = std::max(magnitude, std::abs(v));

    auto m = build(b_, 0.0);
    double worst = close(m);
    if (worst < -1e-12 * magnitude) {
        *this = empty(x_, t_);
        return;
    }
    if (worst < 0.0) {
        // Rounding-level inconsistency: widen outward instead of declaring emptiness.
        m = build(b_, -worst);
        close(m);
    }
    b_[0] = m[1][0] / 2;
    b_[4] = m[0][1] / 2;
    b_[2] = m[3][2] / 2;
    b_[6] = m[2][3] / 2;
    b_[1] = std::min(m[3][0], m[1][2]);
    b_[3] = std::min(m[0][2], m[3][1]);
    b_[5] = std::min(m[2][1], m[0][3]);
    b_[7] = std::min(m[2][0], m[1][3]);
    for (double& v : b_)
        if (v == 0.0) v = 0.0;  // no negative zero
}

bool Octagon2D::is_bounded() const {
    return empty_ || std::all_of(b_.begin(), b_.end(), [](double v) { return std::isfinite(v); });
}

Interval Octagon2D::x_range() const { return empty_ ? Interval::empty() : Interval{-b_[4], b_[0]}; }

Interval Octagon2D::t_range() const { return empty_ ? Interval::empty() : Interval{-b_[6], b_[2]}; }

std::vector<Point> Octagon2D::vertices() const {
    if (empty_) return {};
    if (!is_bounded()) throw std::logic_error("vertices of an unbounded octagon");
    const double xl = -b_[4], xh = b_[0], tl = -b_[6], th = b_[2];
    std::vector<Point> poly{{xl, tl}, {xh, tl}, {xh, th}, {xl, th}};
    for (int k : {1, 3, 5, 7}) poly = clip(poly, kDirections[k], b_[k]);
    std::vector<Point> out;
    for (const Point& p : poly) {
        if (out.empty() || out.back() != p) out.push_back(p);
    }
    while (out.size() > 1 && out.front() == out.back()) out.pop_back();
    if (out.empty()) out.push_back({xl, tl});
    return out;
}

bool Octagon2D::contains(const Octagon2D& other, double tol) const {
    if (other.empty_) return true;
    if (empty_) return false;
    for (std::size_t k = 0; k < 8; ++k) {
        if (other.b_[k] > b_[k] + tol) return false;
    }
    return true;
}

bool Octagon2D::contains(double x, double t, double tol) const {
    if (empty_) return false;
    for (std::size_t k = 0; k < 8; ++k) {
        if (dot(kDirections[k], {x, t}) > b_[k] + tol) return false;
    }
    return true;
}

Octagon2D elapse(const Octagon2D& s, double rate_x, double rate_t, Interval dt, double slack) {
    if (s.is_empty() || dt.is_empty()) return Octagon2D::empty(s.x_var(), s.t_var());
    Octagon2D::Offsets b = s.offsets();
    const bool moving = rate_x != 0.0 || rate_t != 0.0;
    for (std::size_t k = 0; k < 8; ++k) {
        const double dc = Octagon2D::kDirections[k][0] * rate_x + Octagon2D::kDirections[k][1] * rate_t;
        b[k] += std::max(dc * dt.lo, dc * dt.hi);
        if (moving) b[k] += slack;
    }
    return Octagon2D(s.x_var(), s.t_var(), b);
}

Octagon2D intersect(const Octagon2D& s, const Condition& cond) {
    if (s.is_empty()) return s;
    Octagon2D::Offsets b = s.offsets();
    std::vector<std::pair<std::array<double, 2>, double>> general;
    for (const LinearConstraint& c : cond.constraints) {
        if (c.is_trivial()) {
            if (!trivial_holds(c)) return Octagon2D::empty(s.x_var(), s.t_var());
            continue;
        }
        for (const auto& [terms, bound] : as_upper_bounds(c)) {
            std::array<double, 2> a{0.0, 0.0};
            for (const Term& t : terms) {
                if (t.var == s.x_var()) {
                    a[0] += t.coeff;
                } else if (t.var == s.t_var()) {
                    a[1] += t.coeff;
                } else {
                    throw ScopeError("variable index " + std::to_string(t.var) + " outside octagon scope");
                }
            }
            int k = 0;
            double scale = 1.0;
            if (template_direction(a[0], a[1], k, scale)) {
                b[k] = std::min(b[k], bound / scale);
            } else {
                general.push_back({a, bound});
            }
        }
    }
    Octagon2D r(s.x_var(), s.t_var(), b);
    if (general.empty() || r.is_empty() || !r.is_bounded()) return r;
    std::vector<Point> poly = r.vertices();
    for (const auto& [a, c] : general) {
        poly = clip(poly, a, c);
        if (poly.empty()) return Octagon2D::empty(s.x_var(), s.t_var());
    }
    return intersect(r, Octagon2D::from_points(s.x_var(), s.t_var(), poly));
}

Octagon2D intersect(const Octagon2D& a, const Octagon2D& b) {
    if (a.x_var() != b.x_var() || a.t_var() != b.t_var()) throw ScopeError("octagon scope mismatch");
    if (a.is_empty()) return a;
    if (b.is_empty()) return b;
    Octagon2D::Offsets o;
    for (std::size_t k = 0; k < 8; ++k) o[k] = std::min(a.offsets()[k], b.offsets()[k]);
    return Octagon2D(a.x_var(), a.t_var(), o);
}

Octagon2D transform(const Octagon2D& s, const AffineReset& r, double slack) {
    if (s.is_empty()) return s;
    double scale = 1.0, offset = 0.0;
    for (const Assignment& as : r.assignments()) {
        if (as.var == s.x_var()) {
            scale = as.scale;
            offset = as.offset;
        } else if (as.var == s.t_var()) {
            if (!as.is_identity()) throw ScopeError("time variable cannot be reset");
        } else {
            throw ScopeError("variable index " + std::to_string(as.var) + " outside octagon scope");
        }
    }
    if (scale == 1.0 && offset == 0.0) return s;
    Octagon2D out;
    if (scale == 0.0) {
        out = Octagon2D::from_box(s.x_var(), s.t_var(), Interval::point(offset), s.t_range());
    } else if (s.is_bounded()) {
        std::vector<Point> pts = s.vertices();
        for (Point& p : pts) p[0] = scale * p[0] + offset;
        out = Octagon2D::from_points(s.x_var(), s.t_var(), pts);
    } else if (scale == 1.0) {
        Octagon2D::Offsets b = s.offsets();
        for (std::size_t k = 0; k < 8; ++k) b[k] += Octagon2D::kDirections[k][0] * offset;
        out = Octagon2D(s.x_var(), s.t_var(), b);
    } else {
        const Interval xr = s.x_range();
        const double lo = scale * xr.lo + offset, hi = scale * xr.hi + offset;
        out = Octagon2D::from_box(s.x_var(), s.t_var(), {std::min(lo, hi), std::max(lo, hi)}, s.t_range());
    }
    if (slack > 0.0 && scale != 0.0) {
        Octagon2D::Offsets b = out.offsets();
        for (double& v : b) v += slack;
        out = Octagon2D(s.x_var(), s.t_var(), b);
    }
    return out;
}

Octagon2D hull(const Octagon2D& a, const Octagon2D& b) {
    if (a.x_var() != b.x_var() || a.t_var() != b.t_var()) throw ScopeError("octagon scope mismatch");
    if (a.is_empty()) return b;
    if (b.is_empty()) return a;
    Octagon2D::Offsets o;
    for (std::size_t k = 0; k < 8; ++k) o[k] = std::max(a.offsets()[k], b.offsets()[k]);
    return Octagon2D(a.x_var(), a.t_var(), o);
}

Interval project_time(const Octagon2D& s) { return s.t_range(); }

// ---------------------------------------------------------------- StateSet

bool StateSet::is_empty() const {
    return std::visit([](const auto& s) { return s.is_empty(); }, v_);
}

Interval StateSet::bounds(VarIndex v) const {
    if (is_box()) {
        const Box& b = box();
        if (v >= b.dimension()) throw ScopeError("variable index outside box scope");
        return b.is_empty() ? Interval::empty() : b[v];
    }
    const Octagon2D& o = octagon();
    if (v == o.x_var()) return o.x_range();
    if (v == o.t_var()) return o.t_range();
    throw ScopeError("variable index outside octagon scope");
}

bool StateSet::contains(const StateSet& other, double tol) const {
    if (other.is_empty()) return true;
    if (is_box() && other.is_box()) return box().contains(other.box(), tol);
    if (is_octagon() && other.is_octagon()) return octagon().contains(other.octagon(), tol);
    throw ScopeError("containment between different representations");
}

bool StateSet::contains(const std::vector<double>& p, double tol) const {
    if (is_box()) return box().contains(p, tol);
    const Octagon2D& o = octagon();
    if (std::max(o.x_var(), o.t_var()) >= p.size()) return false;
    return o.contains(p[o.x_var()], p[o.t_var()], tol);
}

namespace {

double rate_at(const std::vector<double>& rates, VarIndex v) { return v < rates.size() ? rates[v] : 0.0; }

void same_kind(const StateSet& a, const StateSet& b) {
    if (a.is_box() != b.is_box()) throw ScopeError("mixed state-set representations");
}

}  // namespace

StateSet elapse(const StateSet& s, const std::vector<double>& rates, Interval dt, double slack) {
    if (s.is_box()) return elapse(s.box(), rates, dt, slack);
    const Octagon2D& o = s.octagon();
    return elapse(o, rate_at(rates, o.x_var()), rate_at(rates, o.t_var()), dt, slack);
}

StateSet intersect(const StateSet& s, const Condition& c) {
    if (c.is_true()) return s;
    if (s.is_box()) return intersect(s.box(), c);
    return intersect(s.octagon(), c);
}

StateSet intersect(const StateSet& a, const StateSet& b) {
    same_kind(a, b);
    if (a.is_box()) return intersect(a.box(), b.box());
    return intersect(a.octagon(), b.octagon());
}

StateSet transform(const StateSet& s, const AffineReset& r, double slack) {
    if (s.is_box()) return transform(s.box(), r, slack);
    return transform(s.octagon(), r, slack);
}

StateSet hull(const StateSet& a, const StateSet& b) {
    same_kind(a, b);
    if (a.is_box()) return hull(a.box(), b.box());
    return hull(a.octagon(), b.octagon());
}

StateSet restrict_time(const StateSet& s, VarIndex t, Interval window) {
    if (window.is_empty()) return empty_like(s);
    Condition c;
    if (window.lo > -kInf) c.add(LinearConstraint({{t, 1.0}}, Relation::ge, window.lo));
    if (window.hi < kInf) c.add(LinearConstraint({{t, 1.0}}, Relation::le, window.hi));
    return intersect(s, c);
}

StateSet empty_like(const StateSet& s) {
    if (s.is_box()) return Box::empty(s.box().dimension());
    return Octagon2D::empty(s.octagon().x_var(), s.octagon().t_var());
}

}  // namespace hyreach
