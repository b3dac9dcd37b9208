#include "sfflab/curve.hpp"

#include "sfflab/error.hpp"
#include "sfflab/numeric.hpp"

namespace sfflab {

TimeGrid TimeGrid::extrema_default() { return linear(0.0, 4.0 * kPi, 2000); }
TimeGrid TimeGrid::display_default() { return logarithmic(1e-2, 1e3, 600); }

void TimeGrid::validate() const {
    require(n_points >= 2, "TimeGrid: need at least two points");
    require(t_min >= 0.0, "TimeGrid: t_min must be >= 0");
    require(t_max > t_min, "TimeGrid: t_max must exceed t_min");
    if (kind == Kind::Logarithmic) require(t_min > 0.0, "TimeGrid: logarithmic grid needs t_min > 0");
}

std::vector<double> TimeGrid::times() const {
    validate();
    return kind == Kind::Linear ? linspace(t_min, t_max, n_points) : logspace(t_min, t_max, n_points);
}

Curve::Curve(const TimeGrid& g, std::string label_) : grid(g), t(g.times()), values(t.size(), 0.0), label(std::move(label_)) {}

Curve::Curve(const TimeGrid& g, std::vector<double> vals, std::string label_)
    : grid(g), t(g.times()), values(std::move(vals)), label(std::move(label_)) {
    check();
}

void Curve::check() const {
    if (t.size() != values.size()) fail(ErrorCode::Mismatch, "Curve: time and value lengths differ");
}

namespace {
void same_grid(const Curve& a, const Curve& b) {
    if (a.t != b.t) fail(ErrorCode::Mismatch, "curves live on different grids");
}
}  // namespace

Curve add(const Curve& a, const Curve& b, std::string label) {
    same_grid(a, b);
    Curve out = a;
    out.label = std::move(label);
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += b.values[i];
    return out;
}

Curve scale(const Curve& a, double c, std::string label) {
    Curve out = a;
    out.label = std::move(label);
    for (auto& v : out.values) v *= c;
    return out;
}

Curve add_constant(const Curve& a, double c, std::string label) {
    Curve out = a;
    out.label = std::move(label);
    for (auto& v : out.values) v += c;
    return out;
}

}  // namespace sfflab
