#ifndef NESTLOC_VERTEX_HPP
#define NESTLOC_VERTEX_HPP

#include <cstddef>
#include <string>

#include <nestloc/characters.hpp>
#include <nestloc/combinatorics.hpp>
#include <nestloc/toric.hpp>

namespace nestloc
{

enum class provenance { tangent, co_class, taut, vtangent, other };

inline const char *to_string(provenance p)
{
    switch (p) {
    case provenance::tangent:
        return "tangent";
    case provenance::co_class:
        return "co_class";
    case provenance::taut:
        return "taut";
    case provenance::vtangent:
        return "vtangent";
    case provenance::other:
        return "other";
    }
    return "?";
}

// Virtual T-character at a fixed point in the global variables t1, t2, with
// its rank cached.
class global_character
{
public:
    global_character() = default;
    global_character(laurent_poly value, provenance tag)
        : value_(std::move(value)), rank_(rank_eval(value_)), tag_(tag)
    {
    }

    const laurent_poly &value() const
    {
        return value_;
    }
    const integer &rank() const
    {
        return rank_;
    }
    provenance tag() const
    {
        return tag_;
    }

private:
    laurent_poly value_;
    integer rank_ = 0;
    provenance tag_ = provenance::other;
};

// chi(O) - chi(I_1, I_2) on C^2 for monomial ideals with box characters q1, q2:
//   V = Q2 + bar(Q1)/(u1 u2) - Q2 bar(Q1) (1 - u1)(1 - u2)/(u1 u2).
inline laurent_poly vertex_V(const laurent_poly &q1, const laurent_poly &q2)
{
    const auto inv_u1u2 = laurent_poly::monomial({-1, -1});
    const auto q1_bar = bar(q1);
    const auto one_minus_u1 = laurent_poly::constant(1) - laurent_poly::monomial({1, 0});
    const auto one_minus_u2 = laurent_poly::constant(1) - laurent_poly::monomial({0, 1});
    return q2 + q1_bar * inv_u1u2 - q2 * q1_bar * one_minus_u1 * one_minus_u2 * inv_u1u2;
}

namespace detail
{

inline void check_indexing(const toric_surface &s, const multi_partition &mp)
{
    if (mp.points() != s.fixed_points()) {
        throw index_mismatch_error("multi-partition has " + std::to_string(mp.points()) + " entries but " +
                                   s.name() + " has " + std::to_string(s.fixed_points()) + " fixed points");
    }
}

inline void check_indexing(const toric_surface &s, const eq_line_bundle &L)
{
    if (L.weights.size() != s.fixed_points()) {
        throw index_mismatch_error("line bundle " + L.label + " is not indexed by the fixed points of " + s.name());
    }
}

inline laurent_poly co_class_value(const toric_surface &s, const multi_partition &mp1, const multi_partition &mp2,
                                   const eq_line_bundle *L)
{
    laurent_poly total;
    for (std::size_t p = 0; p < s.fixed_points(); ++p) {
        if (mp1[p].empty() && mp2[p].empty()) {
            continue;
        }
        auto local = s.to_global(vertex_V(box_character(mp1[p]), box_character(mp2[p])), p);
        if (L != nullptr && !L->weights[p].is_zero()) {
            local *= laurent_poly::monomial(L->weights[p]);
        }
        total += local;
    }
    return total;
}

} // namespace detail

// Class of R pi_* L - RHom_pi(I_1, I_2 (x) L) at the fixed point (mp1, mp2).
// For trivial L it is RHom_pi(I_1, I_2)[1] plus one weight-zero line, which
// leaves all Chern classes unchanged.
inline global_character co_class(const toric_surface &s, const multi_partition &mp1, const multi_partition &mp2,
                                 const eq_line_bundle &L)
{
    detail::check_indexing(s, mp1);
    detail::check_indexing(s, mp2);
    detail::check_indexing(s, L);
    return {detail::co_class_value(s, mp1, mp2, &L), provenance::co_class};
}

inline global_character co_class(const toric_surface &s, const multi_partition &mp1, const multi_partition &mp2)
{
    detail::check_indexing(s, mp1);
    detail::check_indexing(s, mp2);
    return {detail::co_class_value(s, mp1, mp2, nullptr), provenance::co_class};
}

// Tangent space of S^[n] at mp.
inline global_character tangent_char(const toric_surface &s, const multi_partition &mp)
{
    detail::check_indexing(s, mp);
    return {detail::co_class_value(s, mp, mp, nullptr), provenance::tangent};
}

// Virtual tangent space of the nested Hilbert scheme at a fixed chain:
//   sum_i T(mu_i) - sum_{i<k} co_class(mu_i, mu_{i+1}).
inline global_character virtual_tangent_char(const toric_surface &s, const nested_chain &chain)
{
    laurent_poly total;
    for (std::size_t i = 0; i < chain.length(); ++i) {
        total += tangent_char(s, chain[i]).value();
        if (i + 1 < chain.length()) {
            total -= co_class(s, chain[i], chain[i + 1]).value();
        }
    }
    return {std::move(total), provenance::vtangent};
}

// Fibre of the tautological bundle L^[n] at mp.
inline global_character taut_char(const toric_surface &s, const eq_line_bundle &L, const multi_partition &mp)
{
    detail::check_indexing(s, mp);
    detail::check_indexing(s, L);
    laurent_poly total;
    for (std::size_t p = 0; p < s.fixed_points(); ++p) {
        if (mp[p].empty()) {
            continue;
        }
        total += s.to_global(box_character(mp[p]), p) * laurent_poly::monomial(L.weights[p]);
    }
    return {std::move(total), provenance::taut};
}

} // namespace nestloc

#endif
