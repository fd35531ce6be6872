#ifndef NESTLOC_CHARACTERS_HPP
#define NESTLOC_CHARACTERS_HPP

#include <compare>
#include <cstddef>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

#include <nestloc/errors.hpp>
#include <nestloc/rational.hpp>

namespace nestloc
{

// Character of the two-dimensional torus: t1^a t2^b.
struct exponent {
    long a = 0;
    long b = 0;

    friend auto operator<=>(const exponent &, const exponent &) = default;
    friend bool operator==(const exponent &, const exponent &) = default;

    exponent operator+(const exponent &o) const
    {
        return {a + o.a, b + o.b};
    }
    exponent operator-(const exponent &o) const
    {
        return {a - o.a, b - o.b};
    }
    exponent operator-() const
    {
        return {-a, -b};
    }
    exponent operator*(long k) const
    {
        return {a * k, b * k};
    }
    bool is_zero() const
    {
        return a == 0 && b == 0;
    }
};

// Sparse Laurent polynomial in two variables with arbitrary-precision integer
// coefficients. Terms are kept sorted by exponent and no stored coefficient is
// zero, so equal polynomials have identical term maps.
class laurent_poly
{
public:
    using term_map = std::map<exponent, integer>;

    laurent_poly() = default;

    static laurent_poly monomial(exponent e, integer c = 1)
    {
        laurent_poly p;
        p.add_term(e, c);
        return p;
    }
    static laurent_poly constant(integer c)
    {
        return monomial({0, 0}, std::move(c));
    }

    const term_map &terms() const
    {
        return terms_;
    }
    bool is_zero() const
    {
        return terms_.empty();
    }
    std::size_t size() const
    {
        return terms_.size();
    }

    // Coefficient at e (zero when absent).
    integer coefficient(exponent e) const
    {
        auto it = terms_.find(e);
        return it == terms_.end() ? integer(0) : it->second;
    }

    void add_term(exponent e, const integer &c)
    {
        if (c == 0) {
            return;
        }
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) {
                terms_.erase(it);
            }
        }
    }

    laurent_poly &operator+=(const laurent_poly &q)
    {
        for (const auto &[e, c] : q.terms_) {
            add_term(e, c);
        }
        return *this;
    }
    laurent_poly &operator-=(const laurent_poly &q)
    {
        for (const auto &[e, c] : q.terms_) {
            add_term(e, -c);
        }
        return *this;
    }
    laurent_poly operator-() const
    {
        laurent_poly r;
        for (const auto &[e, c] : terms_) {
            r.terms_.emplace(e, -c);
        }
        return r;
    }

    friend laurent_poly operator+(laurent_poly p, const laurent_poly &q)
    {
        p += q;
        return p;
    }
    friend laurent_poly operator-(laurent_poly p, const laurent_poly &q)
    {
        p -= q;
        return p;
    }
    friend laurent_poly operator*(const laurent_poly &p, const laurent_poly &q)
    {
        laurent_poly r;
        for (const auto &[e1, c1] : p.terms_) {
            for (const auto &[e2, c2] : q.terms_) {
                r.add_term(e1 + e2, c1 * c2);
            }
        }
        return r;
    }
    laurent_poly &operator*=(const laurent_poly &q)
    {
        *this = *this * q;
        return *this;
    }

    friend bool operator==(const laurent_poly &, const laurent_poly &) = default;

private:
    term_map terms_;
};

inline laurent_poly add(const laurent_poly &p, const laurent_poly &q)
{
    return p + q;
}

inline laurent_poly mul(const laurent_poly &p, const laurent_poly &q)
{
    return p * q;
}

// t -> t^{-1}
inline laurent_poly bar(const laurent_poly &p)
{
    laurent_poly r;
    for (const auto &[e, c] : p.terms()) {
        r.add_term(-e, c);
    }
    return r;
}

// Virtual rank: value at t1 = t2 = 1.
inline integer rank_eval(const laurent_poly &p)
{
    integer s = 0;
    for (const auto &[e, c] : p.terms()) {
        s += c;
    }
    return s;
}

// u1^a u2^b -> t^(a*img1 + b*img2)
inline laurent_poly substitute_monomials(const laurent_poly &p, exponent img1, exponent img2)
{
    laurent_poly r;
    for (const auto &[e, c] : p.terms()) {
        r.add_term(img1 * e.a + img2 * e.b, c);
    }
    return r;
}

// Text form: `c*t1^a*t2^b` terms joined by `+`, in exponent order; zero is `0`.
inline std::string to_string(const laurent_poly &p)
{
    if (p.is_zero()) {
        return "0";
    }
    std::string out;
    for (const auto &[e, c] : p.terms()) {
        if (!out.empty()) {
            out += '+';
        }
        out += c.get_str();
        out += "*t1^" + std::to_string(e.a) + "*t2^" + std::to_string(e.b);
    }
    return out;
}

inline std::ostream &operator<<(std::ostream &os, const laurent_poly &p)
{
    return os << to_string(p);
}

namespace detail
{

inline long parse_long(std::string_view s, std::string_view whole)
{
    if (s.empty()) {
        throw invalid_argument_error("malformed Laurent polynomial '" + std::string(whole) + "'");
    }
    std::size_t pos = 0;
    bool neg = false;
    if (s[0] == '-' || s[0] == '+') {
        neg = s[0] == '-';
        pos = 1;
    }
    if (pos == s.size()) {
        throw invalid_argument_error("malformed Laurent polynomial '" + std::string(whole) + "'");
    }
    long v = 0;
    for (; pos < s.size(); ++pos) {
        if (s[pos] < '0' || s[pos] > '9') {
            throw invalid_argument_error("malformed Laurent polynomial '" + std::string(whole) + "'");
        }
        v = v * 10 + (s[pos] - '0');
    }
    return neg ? -v : v;
}

} // namespace detail

// Inverse of to_string. Accepts exactly the serialized grammar.
inline laurent_poly parse_laurent_poly(std::string_view text)
{
    laurent_poly p;
    if (text == "0") {
        return p;
    }
    // Terms are separated by '+' that is not part of a coefficient sign; a
    // negative coefficient appears as "+-c" after the first term.
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('+', start);
        while (end != std::string_view::npos && end == start) {
            end = text.find('+', end + 1);
        }
        const auto term = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        const auto s1 = term.find("*t1^");
        const auto s2 = term.find("*t2^");
        if (s1 == std::string_view::npos || s2 == std::string_view::npos || s2 < s1) {
            throw invalid_argument_error("malformed Laurent polynomial '" + std::string(text) + "'");
        }
        integer c;
        if (c.set_str(std::string(term.substr(0, s1)), 10) != 0 || c == 0) {
            throw invalid_argument_error("malformed Laurent polynomial '" + std::string(text) + "'");
        }
        const exponent e{detail::parse_long(term.substr(s1 + 4, s2 - s1 - 4), text),
                         detail::parse_long(term.substr(s2 + 4), text)};
        p.add_term(e, c);
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
    }
    return p;
}

} // namespace nestloc

#endif
