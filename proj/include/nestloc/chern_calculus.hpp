#ifndef NESTLOC_CHERN_CALCULUS_HPP
#define NESTLOC_CHERN_CALCULUS_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nestloc/errors.hpp>
#include <nestloc/rational.hpp>

namespace nestloc
{

namespace detail
{

struct ring_data {
    int truncation = 0;
    std::vector<std::string> names;
    std::vector<std::string> latex_names;
    std::vector<int> degrees;
};

} // namespace detail

// Sorted (generator index, exponent) pairs with positive exponents.
using formal_monomial = std::vector<std::pair<int, int>>;

class graded_element;

// Graded polynomial ring over Q in named generators of positive degree,
// truncated above total degree N. Copies share the same generator table, so
// generators added through one handle are visible through all of them.
class formal_ring
{
public:
    explicit formal_ring(int truncation) : data_(std::make_shared<detail::ring_data>())
    {
        if (truncation < 0) {
            throw invalid_argument_error("formal_ring: negative truncation");
        }
        data_->truncation = truncation;
    }

    int truncation() const
    {
        return data_->truncation;
    }
    std::size_t generator_count() const
    {
        return data_->names.size();
    }
    const std::string &name(int g) const
    {
        return data_->names.at(static_cast<std::size_t>(g));
    }
    int degree(int g) const
    {
        return data_->degrees.at(static_cast<std::size_t>(g));
    }

    // Returns the index of the new generator.
    int add_generator(std::string name, int degree, std::string latex = {})
    {
        if (degree <= 0) {
            throw invalid_argument_error("generator degree must be positive");
        }
        data_->latex_names.push_back(latex.empty() ? name : std::move(latex));
        data_->names.push_back(std::move(name));
        data_->degrees.push_back(degree);
        return static_cast<int>(data_->names.size()) - 1;
    }

    graded_element zero() const;
    graded_element one() const;
    graded_element constant(const rational &c) const;
    graded_element generator(int g) const;

    friend bool operator==(const formal_ring &a, const formal_ring &b)
    {
        return a.data_ == b.data_;
    }

private:
    friend class graded_element;
    std::shared_ptr<detail::ring_data> data_;
};

// Element of a formal_ring, stored as one term table per total degree.
class graded_element
{
public:
    using component_map = std::map<formal_monomial, rational>;

    explicit graded_element(const formal_ring &ring)
        : ring_(ring), by_degree_(static_cast<std::size_t>(ring.truncation()) + 1)
    {
    }

    const formal_ring &ring() const
    {
        return ring_;
    }
    int truncation() const
    {
        return ring_.truncation();
    }
    const component_map &terms(int k) const
    {
        return by_degree_.at(static_cast<std::size_t>(k));
    }

    bool is_zero() const
    {
        for (const auto &c : by_degree_) {
            if (!c.empty()) {
                return false;
            }
        }
        return true;
    }

    // Homogeneous part of degree k; zero for k outside [0, N].
    graded_element component(int k) const
    {
        graded_element r(ring_);
        if (k >= 0 && k <= truncation()) {
            r.by_degree_[static_cast<std::size_t>(k)] = by_degree_[static_cast<std::size_t>(k)];
        }
        return r;
    }

    bool is_homogeneous(int k) const
    {
        for (int d = 0; d <= truncation(); ++d) {
            if (d != k && !by_degree_[static_cast<std::size_t>(d)].empty()) {
                return false;
            }
        }
        return true;
    }

    rational constant_term() const
    {
        const auto &c0 = by_degree_[0];
        auto it = c0.find({});
        return it == c0.end() ? rational(0) : it->second;
    }

    void add_term(const formal_monomial &m, const rational &c)
    {
        if (c == 0) {
            return;
        }
        const int d = monomial_degree(m);
        if (d > truncation()) {
            return;
        }
        auto &comp = by_degree_[static_cast<std::size_t>(d)];
        auto [it, inserted] = comp.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) {
                comp.erase(it);
            }
        }
    }

    graded_element &operator+=(const graded_element &o)
    {
        check_ring(o);
        for (std::size_t d = 0; d < by_degree_.size(); ++d) {
            for (const auto &[m, c] : o.by_degree_[d]) {
                add_term(m, c);
            }
        }
        return *this;
    }
    graded_element &operator-=(const graded_element &o)
    {
        check_ring(o);
        for (std::size_t d = 0; d < by_degree_.size(); ++d) {
            for (const auto &[m, c] : o.by_degree_[d]) {
                add_term(m, -c);
            }
        }
        return *this;
    }
    graded_element operator-() const
    {
        graded_element r(ring_);
        r -= *this;
        return r;
    }
    friend graded_element operator+(graded_element a, const graded_element &b)
    {
        a += b;
        return a;
    }
    friend graded_element operator-(graded_element a, const graded_element &b)
    {
        a -= b;
        return a;
    }
    friend graded_element operator*(const graded_element &a, const graded_element &b)
    {
        a.check_ring(b);
        graded_element r(a.ring_);
        const int N = a.truncation();
        for (int da = 0; da <= N; ++da) {
            for (const auto &[ma, ca] : a.by_degree_[static_cast<std::size_t>(da)]) {
                for (int db = 0; da + db <= N; ++db) {
                    for (const auto &[mb, cb] : b.by_degree_[static_cast<std::size_t>(db)]) {
                        r.add_term(multiply(ma, mb), ca * cb);
                    }
                }
            }
        }
        return r;
    }
    graded_element &operator*=(const graded_element &o)
    {
        *this = *this * o;
        return *this;
    }
    friend graded_element operator*(const rational &c, graded_element a)
    {
        for (auto &comp : a.by_degree_) {
            if (c == 0) {
                comp.clear();
                continue;
            }
            for (auto &[m, v] : comp) {
                v *= c;
            }
        }
        return a;
    }

    graded_element pow(int e) const
    {
        if (e < 0) {
            return inverse().pow(-e);
        }
        graded_element r = ring_.one();
        for (int i = 0; i < e; ++i) {
            r *= *this;
        }
        return r;
    }

    // Inverse of an element with nonzero constant term: c0^{-1} sum_k (-x)^k
    // with x = c/c0 - 1 nilpotent in the truncated ring.
    graded_element inverse() const
    {
        const rational c0 = constant_term();
        if (c0 == 0) {
            throw invalid_argument_error("element with zero constant term is not invertible");
        }
        const graded_element x = (1 / c0) * *this - ring_.one();
        graded_element result = ring_.one();
        graded_element power = ring_.one();
        for (int k = 1; k <= truncation(); ++k) {
            power = -(power * x);
            if (power.is_zero()) {
                break;
            }
            result += power;
        }
        return (1 / c0) * result;
    }

    friend bool operator==(const graded_element &a, const graded_element &b)
    {
        return a.ring_ == b.ring_ && a.by_degree_ == b.by_degree_;
    }

    // Sum of each homogeneous part with generator g bound to values[g].
    std::vector<rational> evaluate(const std::vector<rational> &values) const
    {
        std::vector<rational> out(by_degree_.size());
        for (std::size_t d = 0; d < by_degree_.size(); ++d) {
            for (const auto &[m, c] : by_degree_[d]) {
                rational v = c;
                for (const auto &[g, e] : m) {
                    for (int i = 0; i < e; ++i) {
                        v *= values.at(static_cast<std::size_t>(g));
                    }
                }
                out[d] += v;
            }
        }
        return out;
    }

    std::string to_string(bool latex = false) const
    {
        std::string s;
        for (std::size_t d = 0; d < by_degree_.size(); ++d) {
            for (const auto &[m, c] : by_degree_[d]) {
                const bool neg = c < 0;
                const rational mag = neg ? rational(-c) : c;
                if (s.empty()) {
                    s += neg ? "-" : "";
                } else {
                    s += neg ? " - " : " + ";
                }
                std::string mono;
                for (const auto &[g, e] : m) {
                    const auto &n = latex ? ring_.data_->latex_names[static_cast<std::size_t>(g)]
                                          : ring_.data_->names[static_cast<std::size_t>(g)];
                    if (!mono.empty()) {
                        mono += latex ? " " : "*";
                    }
                    mono += n;
                    if (e > 1) {
                        mono += latex ? "^{" + std::to_string(e) + "}" : "^" + std::to_string(e);
                    }
                }
                if (mono.empty()) {
                    s += latex_rational(mag, latex);
                } else if (mag == 1) {
                    s += mono;
                } else {
                    s += latex_rational(mag, latex) + (latex ? " " : "*") + mono;
                }
            }
        }
        return s.empty() ? "0" : s;
    }

private:
    friend class formal_ring;

    void check_ring(const graded_element &o) const
    {
        if (!(ring_ == o.ring_)) {
            throw invalid_argument_error("graded elements belong to different rings");
        }
    }

    int monomial_degree(const formal_monomial &m) const
    {
        int d = 0;
        for (const auto &[g, e] : m) {
            d += ring_.degree(g) * e;
        }
        return d;
    }

    static formal_monomial multiply(const formal_monomial &a, const formal_monomial &b)
    {
        formal_monomial r;
        std::size_t i = 0;
        std::size_t j = 0;
        while (i < a.size() || j < b.size()) {
            if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
                r.push_back(a[i++]);
            } else if (i == a.size() || b[j].first < a[i].first) {
                r.push_back(b[j++]);
            } else {
                r.emplace_back(a[i].first, a[i].second + b[j].second);
                ++i;
                ++j;
            }
        }
        return r;
    }

    static std::string latex_rational(const rational &q, bool latex)
    {
        if (!latex || q.get_den() == 1) {
            return q.get_str();
        }
        return "\\frac{" + q.get_num().get_str() + "}{" + q.get_den().get_str() + "}";
    }

    formal_ring ring_;
    std::vector<component_map> by_degree_;
};

inline graded_element formal_ring::zero() const
{
    return graded_element(*this);
}

inline graded_element formal_ring::one() const
{
    return constant(1);
}

inline graded_element formal_ring::constant(const rational &c) const
{
    graded_element r(*this);
    r.add_term({}, c);
    return r;
}

inline graded_element formal_ring::generator(int g) const
{
    graded_element r(*this);
    r.add_term({{g, 1}}, 1);
    return r;
}

inline std::string to_string(const graded_element &x)
{
    return x.to_string(false);
}

inline std::string to_latex(const graded_element &x)
{
    return x.to_string(true);
}

// Virtual bundle: rank plus total Chern class (constant term 1).
class formal_bundle
{
public:
    formal_bundle(long rank, graded_element total) : rank_(rank), total_(std::move(total))
    {
        if (total_.component(0) != total_.ring().one()) {
            throw invalid_argument_error("total Chern class must have constant term 1");
        }
    }

    long rank() const
    {
        return rank_;
    }
    const graded_element &total() const
    {
        return total_;
    }
    const formal_ring &ring() const
    {
        return total_.ring();
    }

    // c_j, with c_0 = 1 and c_{j<0} = 0.
    graded_element c(int j) const
    {
        if (j > total_.truncation()) {
            throw truncation_overflow_error("c_" + std::to_string(j) + " exceeds truncation " +
                                            std::to_string(total_.truncation()));
        }
        return total_.component(j);
    }

private:
    long rank_;
    graded_element total_;
};

// Fresh generators c_1(name), ..., c_top(name) with top = min(r, N) for r > 0
// and N for virtual classes of negative rank. Rank 0 is the trivial class.
inline formal_bundle generic_bundle(formal_ring &ring, const std::string &name, long rank)
{
    graded_element total = ring.one();
    const long top = rank > 0 ? std::min<long>(rank, ring.truncation()) : (rank < 0 ? ring.truncation() : 0);
    for (long j = 1; j <= top; ++j) {
        const int g = ring.add_generator("c" + std::to_string(j) + "(" + name + ")", static_cast<int>(j),
                                         "c_{" + std::to_string(j) + "}(" + name + ")");
        total += ring.generator(g);
    }
    return {rank, std::move(total)};
}

inline formal_bundle whitney_sum(const formal_bundle &a, const formal_bundle &b)
{
    return {a.rank() + b.rank(), a.total() * b.total()};
}

// c(A - B) = c(A) / c(B).
inline formal_bundle whitney_difference(const formal_bundle &a, const formal_bundle &b)
{
    return {a.rank() - b.rank(), a.total() * b.total().inverse()};
}

// Shift by k in the derived category: odd shifts negate the K-class.
inline formal_bundle shift(const formal_bundle &f, int k)
{
    if (k % 2 == 0) {
        return f;
    }
    return {-f.rank(), f.total().inverse()};
}

// Total Segre class s(E) = 1/c(E).
inline graded_element segre(const formal_bundle &e)
{
    return e.total().inverse();
}

inline graded_element segre_class(const formal_bundle &e, int i)
{
    if (i < 0) {
        return e.ring().zero();
    }
    if (i > e.total().truncation()) {
        throw truncation_overflow_error("s_" + std::to_string(i) + " exceeds truncation");
    }
    return segre(e).component(i);
}

// Determinant of a square matrix over the (commutative) formal ring, by
// expansion over subsets of columns.
inline graded_element determinant(const std::vector<std::vector<graded_element>> &m, const formal_ring &ring)
{
    const std::size_t a = m.size();
    if (a == 0) {
        return ring.one();
    }
    std::vector<std::optional<graded_element>> partial(std::size_t{1} << a);
    partial[0] = ring.one();
    for (std::size_t mask = 0; mask < partial.size(); ++mask) {
        if (!partial[mask] || partial[mask]->is_zero()) {
            continue;
        }
        const auto row = static_cast<std::size_t>(__builtin_popcountll(mask));
        if (row == a) {
            continue;
        }
        for (std::size_t col = 0; col < a; ++col) {
            if (mask & (std::size_t{1} << col)) {
                continue;
            }
            const graded_element &entry = m[row][col];
            if (entry.is_zero()) {
                continue;
            }
            // Inversions added by placing `col` after the columns in `mask`.
            const auto higher = __builtin_popcountll(mask >> (col + 1));
            graded_element term = *partial[mask] * entry;
            if (higher % 2) {
                term = -term;
            }
            const std::size_t next = mask | (std::size_t{1} << col);
            if (partial[next]) {
                *partial[next] += term;
            } else {
                partial[next] = std::move(term);
            }
        }
    }
    return partial.back() ? *partial.back() : ring.zero();
}

// Delta^a_b(c) = det(c_{b+j-i})_{1<=i,j<=a}, with c_0 = 1 and c_{<0} = 0.
inline graded_element thom_porteous(int a, int b, const graded_element &c)
{
    if (a < 1 || b < 0) {
        throw invalid_argument_error("thom_porteous needs a >= 1 and b >= 0");
    }
    const formal_ring &ring = c.ring();
    if (static_cast<long>(a) * b > ring.truncation()) {
        throw truncation_overflow_error("Delta^" + std::to_string(a) + "_" + std::to_string(b) + " has degree " +
                                        std::to_string(a * b) + " beyond truncation " +
                                        std::to_string(ring.truncation()));
    }
    const auto chern = [&](int k) {
        if (k < 0 || k > ring.truncation()) {
            return ring.zero();
        }
        if (k == 0) {
            return ring.one();
        }
        return c.component(k);
    };
    std::vector<std::vector<graded_element>> m(static_cast<std::size_t>(a));
    for (int i = 0; i < a; ++i) {
        for (int j = 0; j < a; ++j) {
            m[static_cast<std::size_t>(i)].push_back(chern(b + j - i));
        }
    }
    return determinant(m, ring);
}

// c_k(F (x) M) = sum_{j=0}^{k} binom(rk F - j, k - j) c_j(F) m^{k-j}, with m = c_1(M).
inline graded_element twist_by_line(const formal_bundle &f, const graded_element &m, int k)
{
    if (!m.is_homogeneous(1)) {
        throw invalid_argument_error("twist_by_line: c_1(M) must be homogeneous of degree 1");
    }
    if (k > f.total().truncation()) {
        throw truncation_overflow_error("c_" + std::to_string(k) + " exceeds truncation");
    }
    graded_element r = f.ring().zero();
    if (k < 0) {
        return r;
    }
    for (int j = 0; j <= k; ++j) {
        const integer coeff = binomial(integer(f.rank() - j), k - j);
        if (coeff == 0) {
            continue;
        }
        r += rational(coeff) * (f.c(j) * m.pow(k - j));
    }
    return r;
}

// Polynomial in the hyperplane class zeta = c_1(O_{P(E)}(1)) with
// coefficients pulled back from the base; coeffs[k] multiplies zeta^k.
struct zeta_polynomial {
    std::vector<graded_element> coeffs;

    void add(int power, const graded_element &coeff)
    {
        while (static_cast<int>(coeffs.size()) <= power) {
            coeffs.push_back(coeff.ring().zero());
        }
        coeffs[static_cast<std::size_t>(power)] += coeff;
    }
};

// q_*(zeta^k alpha) = s_{k - r0 + 1}(E0) alpha for q: P(E0) -> base.
inline graded_element proj_pushforward(const zeta_polynomial &expr, const formal_bundle &e0)
{
    if (e0.rank() < 1) {
        throw invalid_argument_error("proj_pushforward needs rank E0 >= 1");
    }
    graded_element r = e0.ring().zero();
    const graded_element s = segre(e0);
    for (std::size_t k = 0; k < expr.coeffs.size(); ++k) {
        const int idx = static_cast<int>(k) - static_cast<int>(e0.rank()) + 1;
        if (idx < 0 || expr.coeffs[k].is_zero()) {
            continue;
        }
        if (idx > e0.total().truncation()) {
            throw truncation_overflow_error("s_" + std::to_string(idx) + " exceeds truncation");
        }
        r += s.component(idx) * expr.coeffs[k];
    }
    return r;
}

struct higher_tp_sides {
    graded_element pushforward;
    graded_element chern;
};

// Both sides of q_*(zeta^i sum_j c_j(E1) zeta^{r1-j}) = c_{r1-r0+1+i}(E1 - E0)
// for generic E0, E1 of ranks r0, r1.
inline higher_tp_sides higher_tp(long r0, long r1, int i, int truncation)
{
    if (r0 < 1 || r1 < 0 || i < 0) {
        throw invalid_argument_error("higher Thom-Porteous needs r0 >= 1, r1 >= 0, i >= 0");
    }
    const long degree = r1 - r0 + 1 + i;
    if (degree > truncation) {
        throw truncation_overflow_error("c_" + std::to_string(degree) + " exceeds truncation " +
                                        std::to_string(truncation));
    }
    formal_ring ring(truncation);
    const auto e0 = generic_bundle(ring, "E0", r0);
    const auto e1 = generic_bundle(ring, "E1", r1);
    zeta_polynomial expr;
    for (long j = 0; j <= r1; ++j) {
        if (j > truncation) {
            break;
        }
        expr.add(static_cast<int>(i + r1 - j), e1.c(static_cast<int>(j)));
    }
    auto lhs = proj_pushforward(expr, e0);
    auto rhs = degree < 0 ? ring.zero() : whitney_difference(e1, e0).c(static_cast<int>(degree));
    return {std::move(lhs), std::move(rhs)};
}

inline bool verify_higher_tp(long r0, long r1, int i, int truncation)
{
    const auto sides = higher_tp(r0, r1, i, truncation);
    return sides.pushforward == sides.chern;
}

// Class of the maximal jumping locus: Delta^a_b applied to c(F[shift]).
inline graded_element jumping_locus_class(int a, int b, const formal_bundle &f, int shift_by = 1)
{
    return thom_porteous(a, b, shift(f, shift_by).total());
}

} // namespace nestloc

#endif
