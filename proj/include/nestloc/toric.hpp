#ifndef NESTLOC_TORIC_HPP
#define NESTLOC_TORIC_HPP

#include <cstddef>
#include <string>
#include <vector>

#include <nestloc/characters.hpp>
#include <nestloc/combinatorics.hpp>
#include <nestloc/errors.hpp>

namespace nestloc
{

// Torus-fixed point of a smooth toric surface. w1, w2 are the tangent
// weights; the local coordinate functions carry the opposite weights -w1, -w2,
// so the chart variables u1, u2 of the vertex calculus map to t^{-w1}, t^{-w2}.
struct fixed_chart {
    exponent w1;
    exponent w2;
    // Vertex of the unit moment polytope sitting over this fixed point; line
    // bundle weights are read off dilations of it.
    exponent corner;

    long determinant() const
    {
        return w1.a * w2.b - w1.b * w2.a;
    }
};

enum class surface_family { p2, p1xp1 };

class toric_surface
{
public:
    toric_surface(std::string name, surface_family family, std::vector<fixed_chart> charts)
        : name_(std::move(name)), family_(family), charts_(std::move(charts))
    {
        if (charts_.empty()) {
            throw invalid_argument_error("toric surface needs at least one fixed point");
        }
        for (const auto &c : charts_) {
            const long d = c.determinant();
            if (d != 1 && d != -1) {
                throw invalid_argument_error("tangent weights at a fixed point must form a lattice basis");
            }
        }
    }

    const std::string &name() const
    {
        return name_;
    }
    surface_family family() const
    {
        return family_;
    }
    const std::vector<fixed_chart> &charts() const
    {
        return charts_;
    }
    std::size_t fixed_points() const
    {
        return charts_.size();
    }

    // Chart character (in u1, u2) at fixed point p, rewritten in t1, t2.
    laurent_poly to_global(const laurent_poly &local, std::size_t p) const
    {
        const auto &c = charts_.at(p);
        return substitute_monomials(local, -c.w1, -c.w2);
    }

private:
    std::string name_;
    surface_family family_;
    std::vector<fixed_chart> charts_;
};

// Fixed points over the vertices 0, e1, e2 of the standard simplex. The
// tangent weights are minus the polytope edge directions at each vertex.
inline toric_surface p2()
{
    return toric_surface("p2", surface_family::p2,
                         {
                             {{-1, 0}, {0, -1}, {0, 0}},
                             {{1, 0}, {1, -1}, {1, 0}},
                             {{0, 1}, {-1, 1}, {0, 1}},
                         });
}

inline toric_surface p1xp1()
{
    return toric_surface("p1xp1", surface_family::p1xp1,
                         {
                             {{-1, 0}, {0, -1}, {0, 0}},
                             {{1, 0}, {0, -1}, {1, 0}},
                             {{-1, 0}, {0, 1}, {0, 1}},
                             {{1, 0}, {0, 1}, {1, 1}},
                         });
}

inline toric_surface surface_by_name(const std::string &name)
{
    if (name == "p2") {
        return p2();
    }
    if (name == "p1xp1") {
        return p1xp1();
    }
    throw invalid_argument_error("unknown surface '" + name + "' (expected p2 or p1xp1)");
}

// Equivariant line bundle: the character of its fibre at each fixed point.
struct eq_line_bundle {
    std::vector<exponent> weights;
    std::string label;

    bool is_trivial() const
    {
        for (const auto &w : weights) {
            if (!w.is_zero()) {
                return false;
            }
        }
        return true;
    }

    friend bool operator==(const eq_line_bundle &, const eq_line_bundle &) = default;
};

// O(d) on P^2 takes one parameter; O(a,b) on P^1 x P^1 takes two.
inline eq_line_bundle line_bundle(const toric_surface &s, const std::vector<long> &params)
{
    eq_line_bundle L;
    switch (s.family()) {
    case surface_family::p2:
        if (params.size() != 1) {
            throw invalid_argument_error("O(d) on p2 takes one degree");
        }
        for (const auto &c : s.charts()) {
            L.weights.push_back(c.corner * params[0]);
        }
        L.label = "O(" + std::to_string(params[0]) + ")";
        return L;
    case surface_family::p1xp1:
        if (params.size() != 2) {
            throw invalid_argument_error("O(a,b) on p1xp1 takes two degrees");
        }
        for (const auto &c : s.charts()) {
            L.weights.push_back({c.corner.a * params[0], c.corner.b * params[1]});
        }
        L.label = "O(" + std::to_string(params[0]) + "," + std::to_string(params[1]) + ")";
        return L;
    }
    throw invalid_argument_error("unknown surface family");
}

inline eq_line_bundle trivial_bundle(const toric_surface &s)
{
    return s.family() == surface_family::p2 ? line_bundle(s, {0}) : line_bundle(s, {0, 0});
}

// Parses "O", "O(d)" or "O(a,b)" for the given surface.
inline eq_line_bundle parse_line_bundle(const toric_surface &s, const std::string &text)
{
    if (text == "O") {
        return trivial_bundle(s);
    }
    if (text.size() < 4 || text.rfind("O(", 0) != 0 || text.back() != ')') {
        throw invalid_argument_error("malformed line bundle '" + text + "'");
    }
    std::vector<long> params;
    std::string inner = text.substr(2, text.size() - 3);
    std::size_t start = 0;
    while (true) {
        const auto comma = inner.find(',', start);
        const auto tok = inner.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        try {
            std::size_t used = 0;
            params.push_back(std::stol(tok, &used));
            if (used != tok.size()) {
                throw std::invalid_argument(tok);
            }
        } catch (const std::exception &) {
            throw invalid_argument_error("malformed line bundle '" + text + "'");
        }
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return line_bundle(s, params);
}

// Line bundles used for tautological insertions.
inline std::vector<eq_line_bundle> default_battery(const toric_surface &s)
{
    if (s.family() == surface_family::p2) {
        return {line_bundle(s, {0}), line_bundle(s, {1}), line_bundle(s, {2})};
    }
    return {line_bundle(s, {0, 0}), line_bundle(s, {1, 0}), line_bundle(s, {0, 1})};
}

// Nontrivial twists for the twisted vanishing.
inline std::vector<eq_line_bundle> default_twists(const toric_surface &s)
{
    if (s.family() == surface_family::p2) {
        return {line_bundle(s, {1}), line_bundle(s, {2})};
    }
    return {line_bundle(s, {1, 0}), line_bundle(s, {0, 1})};
}

inline std::vector<multi_partition> multipartitions(const toric_surface &s, int n)
{
    return multipartitions(s.fixed_points(), n);
}

inline std::vector<nested_chain> nested_chains(const toric_surface &s, const std::vector<int> &sizes)
{
    return nested_chains(s.fixed_points(), sizes);
}

} // namespace nestloc

#endif
