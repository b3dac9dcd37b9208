#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sfflab {

struct TimeGrid {
    enum class Kind { Linear, Logarithmic };
    Kind kind = Kind::Linear;
    double t_min = 0.0;
    double t_max = 1.0;
    std::size_t n_points = 2;

    static TimeGrid linear(double t_min, double t_max, std::size_t n) { return {Kind::Linear, t_min, t_max, n}; }
    static TimeGrid logarithmic(double t_min, double t_max, std::size_t n) { return {Kind::Logarithmic, t_min, t_max, n}; }

    /// Linear 2000 points on [0, 4 pi], used for extrema.
    static TimeGrid extrema_default();
    /// Logarithmic 600 points on [1e-2, 1e3], used for full-SFF displays.
    static TimeGrid display_default();

    void validate() const;
    std::vector<double> times() const;
};

/// Sampled series on a time grid. Undefined samples are stored as NaN.
struct Curve {
    TimeGrid grid;
    std::vector<double> t;
    std::vector<double> values;
    std::string label;

    Curve() = default;
    Curve(const TimeGrid& g, std::string label_);
    Curve(const TimeGrid& g, std::vector<double> vals, std::string label_);

    std::size_t size() const noexcept { return t.size(); }
    void check() const;
};

/// Pointwise a + b on identical grids.
Curve add(const Curve& a, const Curve& b, std::string label = {});
Curve scale(const Curve& a, double c, std::string label = {});
Curve add_constant(const Curve& a, double c, std::string label = {});

}  // namespace sfflab
