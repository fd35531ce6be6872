#ifndef NESTLOC_INTEGRALS_HPP
#define NESTLOC_INTEGRALS_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nestloc/characters.hpp>
#include <nestloc/combinatorics.hpp>
#include <nestloc/errors.hpp>
#include <nestloc/rational.hpp>
#include <nestloc/toric.hpp>
#include <nestloc/vertex.hpp>

namespace nestloc
{

// Specialization of the equivariant parameters: t1^a t2^b -> a*s1 + b*s2.
struct weight_spec {
    rational s1;
    rational s2;

    rational eval(exponent e) const
    {
        return s1 * e.a + s2 * e.b;
    }

    friend bool operator==(const weight_spec &, const weight_spec &) = default;
};

inline std::string to_string(const weight_spec &s)
{
    return "(" + to_string(s.s1) + "," + to_string(s.s2) + ")";
}

// Series in an auxiliary variable tau, truncated above degree D.
class truncated_series
{
public:
    explicit truncated_series(int degree, rational constant = 1)
        : c_(static_cast<std::size_t>(std::max(degree, 0)) + 1)
    {
        c_[0] = std::move(constant);
    }

    int degree() const
    {
        return static_cast<int>(c_.size()) - 1;
    }
    // Coefficient of tau^k, zero outside [0, D].
    rational operator[](int k) const
    {
        return (k < 0 || k > degree()) ? rational(0) : c_[static_cast<std::size_t>(k)];
    }
    rational &at(int k)
    {
        return c_.at(static_cast<std::size_t>(k));
    }
    const std::vector<rational> &coefficients() const
    {
        return c_;
    }

    truncated_series &operator*=(const truncated_series &o)
    {
        const int D = degree();
        std::vector<rational> r(c_.size());
        for (int i = 0; i <= D; ++i) {
            if (c_[static_cast<std::size_t>(i)] == 0) {
                continue;
            }
            for (int j = 0; i + j <= D; ++j) {
                r[static_cast<std::size_t>(i + j)] += c_[static_cast<std::size_t>(i)] * o[j];
            }
        }
        c_ = std::move(r);
        return *this;
    }
    friend truncated_series operator*(truncated_series a, const truncated_series &b)
    {
        a *= b;
        return a;
    }

    // Inverse of a series with invertible constant term.
    truncated_series inverse() const
    {
        if (c_[0] == 0) {
            throw invalid_argument_error("truncated series with zero constant term is not invertible");
        }
        truncated_series r(degree(), 1 / c_[0]);
        for (int k = 1; k <= degree(); ++k) {
            rational acc = 0;
            for (int j = 1; j <= k; ++j) {
                acc += c_[static_cast<std::size_t>(j)] * r[k - j];
            }
            r.at(k) = -acc / c_[0];
        }
        return r;
    }

    friend bool operator==(const truncated_series &, const truncated_series &) = default;

private:
    std::vector<rational> c_;
};

// prod_w (1 + <w,s> tau)^{m_w} truncated at tau^{D+1}. Negative multiplicities
// go through the generalized binomial series; weight-zero terms are unity.
inline truncated_series chern_series(const laurent_poly &chr, const weight_spec &spec, int D)
{
    if (D < 0) {
        throw invalid_argument_error("chern_series: negative truncation");
    }
    truncated_series total(D);
    for (const auto &[e, m] : chr.terms()) {
        const rational x = spec.eval(e);
        if (x == 0 || D == 0) {
            continue;
        }
        truncated_series factor(D);
        rational xk = 1;
        for (int k = 1; k <= D; ++k) {
            xk *= x;
            factor.at(k) = rational(binomial(m, k)) * xk;
        }
        total *= factor;
    }
    return total;
}

inline truncated_series chern_series(const global_character &chr, const weight_spec &spec, int D)
{
    return chern_series(chr.value(), spec, D);
}

// Equivariant Euler class prod_w <w,s>^{m_w}.
inline rational euler_class(const laurent_poly &chr, const weight_spec &spec, const std::string &context = {})
{
    rational num = 1;
    rational den = 1;
    for (const auto &[e, m] : chr.terms()) {
        if (e.is_zero()) {
            throw zero_weight_error("net weight-zero multiplicity " + m.get_str() + " in Euler class" +
                                    (context.empty() ? std::string() : " at " + context));
        }
        const rational x = spec.eval(e);
        if (x == 0) {
            throw non_generic_spec_error("weight t1^" + std::to_string(e.a) + " t2^" + std::to_string(e.b) +
                                         " vanishes at s = " + to_string(spec));
        }
        mpz_class power = abs(m);
        rational xp;
        mpz_pow_ui(xp.get_num_mpz_t(), x.get_num_mpz_t(), power.get_ui());
        mpz_pow_ui(xp.get_den_mpz_t(), x.get_den_mpz_t(), power.get_ui());
        xp.canonicalize();
        if (m > 0) {
            num *= xp;
        } else {
            den *= xp;
        }
    }
    return num / den;
}

inline rational euler_class(const global_character &chr, const weight_spec &spec, const std::string &context = {})
{
    return euler_class(chr.value(), spec, context);
}

// Which bundle a Chern factor is taken of.
enum class class_kind { taut, co_class, tangent };

struct class_source {
    class_kind kind = class_kind::taut;
    // taut/tangent: factor index; co_class: the pair (factor, factor2).
    int factor = 0;
    int factor2 = 0;
    // taut: the line bundle L of L^[n]; co_class: the twist.
    eq_line_bundle bundle;

    friend bool operator==(const class_source &, const class_source &) = default;
};

inline std::string to_string(const class_source &src)
{
    switch (src.kind) {
    case class_kind::taut:
        return "taut(" + src.bundle.label + ")@" + std::to_string(src.factor + 1);
    case class_kind::tangent:
        return "T@" + std::to_string(src.factor + 1);
    case class_kind::co_class:
        return "E" + std::to_string(src.factor + 1) + std::to_string(src.factor2 + 1) +
               (src.bundle.is_trivial() ? std::string() : "(" + src.bundle.label + ")");
    }
    return "?";
}

struct chern_factor {
    class_source source;
    int degree = 0;

    friend bool operator==(const chern_factor &, const chern_factor &) = default;
};

// Monomial in Chern classes of tautological and co-class characters.
struct insertion {
    std::vector<chern_factor> factors;

    int total_degree() const
    {
        int d = 0;
        for (const auto &f : factors) {
            d += f.degree;
        }
        return d;
    }

    insertion times(const insertion &o) const
    {
        insertion r = *this;
        r.factors.insert(r.factors.end(), o.factors.begin(), o.factors.end());
        return r;
    }

    friend bool operator==(const insertion &, const insertion &) = default;
};

inline std::string to_string(const insertion &ins)
{
    if (ins.factors.empty()) {
        return "1";
    }
    std::string s;
    for (const auto &f : ins.factors) {
        if (!s.empty()) {
            s += '*';
        }
        s += "c" + std::to_string(f.degree) + "(" + to_string(f.source) + ")";
    }
    return s;
}

inline insertion taut_class(const eq_line_bundle &L, int factor, int degree)
{
    return {{{{class_kind::taut, factor, 0, L}, degree}}};
}

inline insertion co_chern_class(const eq_line_bundle &twist, int factor, int factor2, int degree)
{
    return {{{{class_kind::co_class, factor, factor2, twist}, degree}}};
}

inline insertion tangent_class(int factor, int degree)
{
    return {{{{class_kind::tangent, factor, 0, {}}, degree}}};
}

struct integration_options {
    // Reject integrands whose degree differs from the (virtual) dimension.
    bool check_degree = true;
    // Worker threads for the fixed-point sum; results do not depend on it.
    unsigned jobs = 1;
};

namespace detail
{

struct source_table {
    std::vector<class_source> sources;
    std::vector<int> max_degree;

    std::size_t index_of(const class_source &src, int degree)
    {
        for (std::size_t i = 0; i < sources.size(); ++i) {
            if (sources[i] == src) {
                max_degree[i] = std::max(max_degree[i], degree);
                return i;
            }
        }
        sources.push_back(src);
        max_degree.push_back(degree);
        return sources.size() - 1;
    }
};

// Insertion compiled against a source table: (source index, degree) pairs.
using compiled_insertion = std::vector<std::pair<std::size_t, int>>;

inline compiled_insertion compile(source_table &table, const insertion &ins)
{
    compiled_insertion out;
    for (const auto &f : ins.factors) {
        if (f.degree < 0) {
            throw invalid_argument_error("negative Chern degree in insertion");
        }
        out.emplace_back(table.index_of(f.source, f.degree), f.degree);
    }
    return out;
}

inline void validate_sources(const toric_surface &s, const source_table &table, std::size_t factors)
{
    for (const auto &src : table.sources) {
        const auto in_range = [&](int f) { return f >= 0 && static_cast<std::size_t>(f) < factors; };
        if (!in_range(src.factor) || (src.kind == class_kind::co_class && !in_range(src.factor2))) {
            throw index_mismatch_error("insertion refers to factor outside 1.." + std::to_string(factors) + ": " +
                                       to_string(src));
        }
        if (src.kind != class_kind::tangent && src.bundle.weights.size() != s.fixed_points()) {
            throw index_mismatch_error("line bundle " + src.bundle.label + " is not indexed by " + s.name());
        }
    }
}

// Character of a source at a fixed point given as one multi-partition per factor.
inline laurent_poly source_character(const toric_surface &s, const class_source &src,
                                     const std::vector<const multi_partition *> &point)
{
    switch (src.kind) {
    case class_kind::taut:
        return taut_char(s, src.bundle, *point[static_cast<std::size_t>(src.factor)]).value();
    case class_kind::tangent:
        return tangent_char(s, *point[static_cast<std::size_t>(src.factor)]).value();
    case class_kind::co_class:
        return co_class(s, *point[static_cast<std::size_t>(src.factor)], *point[static_cast<std::size_t>(src.factor2)],
                        src.bundle)
            .value();
    }
    return {};
}

// Sums `contribution(index, partial)` over [0, count) in `jobs` contiguous
// chunks and reduces the per-chunk partials in chunk order. An exception from
// the earliest failing chunk is rethrown.
inline std::vector<rational> chunked_sum(std::size_t count, std::size_t width, unsigned jobs,
                                         const std::function<void(std::size_t, std::vector<rational> &)> &contribution)
{
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(jobs == 0 ? 1 : jobs, count));
    std::vector<std::vector<rational>> partial(chunks, std::vector<rational>(width));
    std::vector<std::exception_ptr> failure(chunks);
    const auto run = [&](std::size_t c) {
        const std::size_t lo = count * c / chunks;
        const std::size_t hi = count * (c + 1) / chunks;
        try {
            for (std::size_t i = lo; i < hi; ++i) {
                contribution(i, partial[c]);
            }
        } catch (...) {
            failure[c] = std::current_exception();
        }
    };
    if (chunks == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(chunks);
        for (std::size_t c = 0; c < chunks; ++c) {
            pool.emplace_back(run, c);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    for (const auto &f : failure) {
        if (f) {
            std::rethrow_exception(f);
        }
    }
    std::vector<rational> total(width);
    for (const auto &p : partial) {
        for (std::size_t j = 0; j < width; ++j) {
            total[j] += p[j];
        }
    }
    return total;
}

inline std::string describe_point(const std::vector<const multi_partition *> &point)
{
    std::string s = "(";
    for (std::size_t i = 0; i < point.size(); ++i) {
        if (i) {
            s += ", ";
        }
        s += to_string(*point[i]);
    }
    return s + ")";
}

// Evaluates weight(point) * prod(prefix) * prod(phi) for every phi, where all
// per-source Chern series are computed once per point.
template <typename PointWeight>
std::vector<rational> evaluate_batch(const toric_surface &s, std::size_t count,
                                     const std::function<std::vector<const multi_partition *>(std::size_t)> &point_at,
                                     const PointWeight &weight, const insertion &prefix,
                                     const std::vector<insertion> &phis, std::size_t factors, const weight_spec &spec,
                                     unsigned jobs)
{
    source_table table;
    const auto pre = compile(table, prefix);
    std::vector<compiled_insertion> compiled;
    compiled.reserve(phis.size());
    for (const auto &phi : phis) {
        compiled.push_back(compile(table, phi));
    }
    validate_sources(s, table, factors);
    return chunked_sum(count, phis.size(), jobs, [&](std::size_t idx, std::vector<rational> &acc) {
        const auto point = point_at(idx);
        rational w = weight(point);
        if (w == 0) {
            return;
        }
        std::vector<std::optional<truncated_series>> series(table.sources.size());
        const auto value = [&](std::size_t src, int k) -> rational {
            if (k == 0) {
                return 1;
            }
            if (!series[src]) {
                series[src] = chern_series(source_character(s, table.sources[src], point), spec, table.max_degree[src]);
            }
            return (*series[src])[k];
        };
        for (const auto &[src, k] : pre) {
            w *= value(src, k);
            if (w == 0) {
                return;
            }
        }
        for (std::size_t j = 0; j < compiled.size(); ++j) {
            rational v = w;
            for (const auto &[src, k] : compiled[j]) {
                v *= value(src, k);
                if (v == 0) {
                    break;
                }
            }
            acc[j] += v;
        }
    });
}

} // namespace detail

inline int ambient_dimension(const std::vector<int> &sizes)
{
    int d = 0;
    for (int n : sizes) {
        d += 2 * n;
    }
    return d;
}

inline int virtual_dimension(const std::vector<int> &sizes)
{
    return sizes.empty() ? 0 : sizes.front() + sizes.back();
}

// Localization on S^[n_1] x ... x S^[n_k]: for each phi, the sum over fixed
// points of prefix * phi / prod_i e(T_{mu_i}).
inline std::vector<rational> integrate_ambient_batch(const toric_surface &s, const std::vector<int> &sizes,
                                                     const insertion &prefix, const std::vector<insertion> &phis,
                                                     const weight_spec &spec, const integration_options &opt = {})
{
    if (sizes.empty()) {
        throw invalid_argument_error("integrate_ambient: empty size list");
    }
    for (int n : sizes) {
        if (n < 0) {
            throw invalid_argument_error("integrate_ambient: negative size");
        }
    }
    if (opt.check_degree) {
        const int dim = ambient_dimension(sizes);
        for (const auto &phi : phis) {
            const int d = prefix.total_degree() + phi.total_degree();
            if (d != dim) {
                throw degree_mismatch_error("integrand " + to_string(prefix.times(phi)) + " has degree " +
                                            std::to_string(d) + " but the ambient dimension is " +
                                            std::to_string(dim));
            }
        }
    }
    const std::size_t k = sizes.size();
    std::vector<std::vector<multi_partition>> lists(k);
    std::vector<std::vector<rational>> inv_euler(k);
    std::size_t count = 1;
    for (std::size_t i = 0; i < k; ++i) {
        lists[i] = multipartitions(s, sizes[i]);
        count *= lists[i].size();
        inv_euler[i].reserve(lists[i].size());
        for (const auto &mp : lists[i]) {
            inv_euler[i].push_back(1 / euler_class(tangent_char(s, mp), spec, to_string(mp)));
        }
    }
    // Mixed radix over the factor lists, last factor fastest.
    const auto decode = [&](std::size_t idx) {
        std::vector<std::size_t> digits(k);
        for (std::size_t i = k; i-- > 0;) {
            digits[i] = idx % lists[i].size();
            idx /= lists[i].size();
        }
        return digits;
    };
    const auto point_at = [&](std::size_t idx) {
        const auto digits = decode(idx);
        std::vector<const multi_partition *> point(k);
        for (std::size_t i = 0; i < k; ++i) {
            point[i] = &lists[i][digits[i]];
        }
        return point;
    };
    const auto weight = [&](const std::vector<const multi_partition *> &point) -> rational {
        rational w = 1;
        for (std::size_t i = 0; i < k; ++i) {
            const auto pos = static_cast<std::size_t>(point[i] - lists[i].data());
            w *= inv_euler[i][pos];
        }
        return w;
    };
    return detail::evaluate_batch(s, count, point_at, weight, prefix, phis, k, spec, opt.jobs);
}

inline rational integrate_ambient(const toric_surface &s, const std::vector<int> &sizes, const insertion &integrand,
                                  const weight_spec &spec, const integration_options &opt = {})
{
    return integrate_ambient_batch(s, sizes, {}, {integrand}, spec, opt).front();
}

// Virtual localization on S^[n_1,...,n_k]: for each phi, the sum over nested
// chains of prefix * phi / e(T^vir).
inline std::vector<rational> integrate_virtual_batch(const toric_surface &s, const std::vector<int> &sizes,
                                                     const insertion &prefix, const std::vector<insertion> &phis,
                                                     const weight_spec &spec, const integration_options &opt = {})
{
    validate_nested_sizes(sizes);
    if (opt.check_degree) {
        const int vd = virtual_dimension(sizes);
        for (const auto &phi : phis) {
            const int d = prefix.total_degree() + phi.total_degree();
            if (d != vd) {
                throw degree_mismatch_error("insertion " + to_string(prefix.times(phi)) + " has degree " +
                                            std::to_string(d) + " but the virtual dimension is " +
                                            std::to_string(vd));
            }
        }
    }
    const auto chains = nested_chains(s, sizes);
    const std::size_t k = sizes.size();
    const auto point_at = [&](std::size_t idx) {
        std::vector<const multi_partition *> point(k);
        for (std::size_t i = 0; i < k; ++i) {
            point[i] = &chains[idx][i];
        }
        return point;
    };
    const auto weight = [&](const std::vector<const multi_partition *> &point) -> rational {
        std::vector<multi_partition> steps;
        for (const auto *mp : point) {
            steps.push_back(*mp);
        }
        const nested_chain chain(std::move(steps));
        return 1 / euler_class(virtual_tangent_char(s, chain), spec, "chain " + to_string(chain));
    };
    return detail::evaluate_batch(s, chains.size(), point_at, weight, prefix, phis, k, spec, opt.jobs);
}

inline rational integrate_virtual(const toric_surface &s, const std::vector<int> &sizes, const insertion &ins,
                                  const weight_spec &spec, const integration_options &opt = {})
{
    return integrate_virtual_batch(s, sizes, {}, {ins}, spec, opt).front();
}

// Monomials of the given total degree in c_j(L^[n_m]) on factor m, for L in
// the battery and 1 <= j <= n_m (the rank; higher classes vanish). Generators
// are ordered by factor, then battery entry, then j; monomials are multisets
// listed with nondecreasing generator index.
inline std::vector<insertion> insertion_basis(const std::vector<int> &sizes, int degree,
                                              const std::vector<eq_line_bundle> &battery)
{
    if (degree < 0) {
        throw invalid_argument_error("insertion_basis: negative degree");
    }
    std::vector<chern_factor> gens;
    for (std::size_t m = 0; m < sizes.size(); ++m) {
        for (const auto &L : battery) {
            for (int j = 1; j <= sizes[m]; ++j) {
                gens.push_back({{class_kind::taut, static_cast<int>(m), 0, L}, j});
            }
        }
    }
    std::vector<insertion> out;
    insertion cur;
    std::function<void(std::size_t, int)> rec = [&](std::size_t from, int remaining) {
        if (remaining == 0) {
            out.push_back(cur);
            return;
        }
        for (std::size_t g = from; g < gens.size(); ++g) {
            if (gens[g].degree <= remaining) {
                cur.factors.push_back(gens[g]);
                rec(g, remaining - gens[g].degree);
                cur.factors.pop_back();
            }
        }
    };
    rec(0, degree);
    return out;
}

inline std::vector<insertion> insertion_basis(const toric_surface &s, const std::vector<int> &sizes, int degree)
{
    return insertion_basis(sizes, degree, default_battery(s));
}

// Seeded source of generic weight specializations. Uses the raw 64-bit
// Mersenne twister stream so samples are identical on every platform.
class spec_sampler
{
public:
    explicit spec_sampler(std::uint64_t seed) : rng_(seed)
    {
    }

    weight_spec next()
    {
        return {draw(), draw()};
    }

private:
    rational draw()
    {
        const auto num = static_cast<long>(rng_() % 1000003ULL) + 1;
        const auto den = static_cast<long>(rng_() % 997ULL) + 1;
        const bool neg = (rng_() & 1ULL) != 0;
        rational q(neg ? -num : num, den);
        q.canonicalize();
        return q;
    }

    std::mt19937_64 rng_;
};

// Runs a degree-0 computation at every spec and returns the common value.
inline rational consistency_run(const std::function<rational(const weight_spec &)> &computation,
                                const std::vector<weight_spec> &specs)
{
    if (specs.size() < 2) {
        throw invalid_argument_error("consistency_run needs at least two specs");
    }
    std::optional<rational> common;
    for (const auto &s : specs) {
        const rational v = computation(s);
        if (!common) {
            common = v;
        } else if (*common != v) {
            throw spec_dependence_error("value " + to_string(v) + " at s = " + to_string(s) + " differs from " +
                                        to_string(*common) + " at s = " + to_string(specs.front()));
        }
    }
    return *common;
}

// Vector-valued samples of a batch computation at a sequence of specs.
struct sampled_values {
    std::vector<weight_spec> specs;
    std::vector<std::vector<rational>> values; // values[sample][case]
};

// Draws `count` specs from the sampler, evaluating the computation at each.
// A spec that hits NonGenericSpec is discarded and redrawn, at most
// `max_retries` times in total.
inline sampled_values sample_batch(const std::function<std::vector<rational>(const weight_spec &)> &computation,
                                   spec_sampler &sampler, int count, int max_retries = 16)
{
    sampled_values out;
    int retries = 0;
    while (static_cast<int>(out.specs.size()) < count) {
        const auto spec = sampler.next();
        try {
            out.values.push_back(computation(spec));
            out.specs.push_back(spec);
        } catch (const non_generic_spec_error &e) {
            if (++retries > max_retries) {
                throw non_generic_spec_error(std::string(e.what()) + " (gave up after " +
                                             std::to_string(max_retries) + " resamples)");
            }
        }
    }
    return out;
}

// Cohomological Hirzebruch-Riemann-Roch by localization:
//   chi(L) = sum_p [tau^2] e^{<mu_p,s> tau} td(<w1,s> tau) td(<w2,s> tau) / (<w1,s><w2,s>).
inline rational hrr_check(const toric_surface &s, const eq_line_bundle &L, const weight_spec &spec)
{
    detail::check_indexing(s, L);
    constexpr int D = 2;
    const auto exp_series = [](const rational &x) {
        truncated_series e(D);
        rational term = 1;
        for (int k = 1; k <= D; ++k) {
            term *= x;
            term /= k;
            e.at(k) = term;
        }
        return e;
    };
    // td(x tau) = x tau / (1 - e^{-x tau}) = 1 / sum_k (-x)^k tau^k / (k+1)!
    const auto todd_series = [](const rational &x) {
        truncated_series g(D);
        rational term = 1;
        for (int k = 1; k <= D; ++k) {
            term *= -x;
            term /= k + 1;
            g.at(k) = term;
        }
        return g.inverse();
    };
    rational total = 0;
    for (std::size_t p = 0; p < s.fixed_points(); ++p) {
        const auto &c = s.charts()[p];
        const rational x1 = spec.eval(c.w1);
        const rational x2 = spec.eval(c.w2);
        if (x1 == 0 || x2 == 0) {
            throw non_generic_spec_error("tangent weight vanishes at s = " + to_string(spec));
        }
        const auto series = exp_series(spec.eval(L.weights[p])) * todd_series(x1) * todd_series(x2);
        total += series[D] / (x1 * x2);
    }
    return total;
}

namespace detail
{

// Dense univariate Laurent polynomial: coeff[i] multiplies z^(low + i).
struct upoly {
    long low = 0;
    std::vector<integer> coeff;

    static upoly from(const laurent_poly &p)
    {
        upoly u;
        if (p.is_zero()) {
            return u;
        }
        u.low = p.terms().begin()->first.a;
        const long high = p.terms().rbegin()->first.a;
        u.coeff.assign(static_cast<std::size_t>(high - u.low + 1), 0);
        for (const auto &[e, c] : p.terms()) {
            u.coeff[static_cast<std::size_t>(e.a - u.low)] += c;
        }
        return u;
    }
};

// Exact quotient n / d of univariate Laurent polynomials (second exponent 0).
inline laurent_poly exact_divide(const laurent_poly &n, const laurent_poly &d)
{
    if (d.is_zero()) {
        throw invalid_argument_error("division by zero polynomial");
    }
    if (n.is_zero()) {
        return {};
    }
    const auto N = upoly::from(n);
    const auto Dv = upoly::from(d);
    const long qlow = N.low - Dv.low;
    const long qlen = static_cast<long>(N.coeff.size()) - static_cast<long>(Dv.coeff.size()) + 1;
    if (qlen <= 0) {
        throw error("K-theoretic localization sum is not a Laurent polynomial");
    }
    std::vector<integer> rem = N.coeff;
    std::vector<integer> q(static_cast<std::size_t>(qlen));
    const integer &lead = Dv.coeff.front();
    for (long i = 0; i < qlen; ++i) {
        const auto &r = rem[static_cast<std::size_t>(i)];
        if (r == 0) {
            continue;
        }
        if (r % lead != 0) {
            throw error("K-theoretic localization sum has non-integral quotient");
        }
        const integer c = r / lead;
        q[static_cast<std::size_t>(i)] = c;
        for (std::size_t j = 0; j < Dv.coeff.size(); ++j) {
            rem[static_cast<std::size_t>(i) + j] -= c * Dv.coeff[j];
        }
    }
    for (const auto &r : rem) {
        if (r != 0) {
            throw error("K-theoretic localization sum leaves a remainder");
        }
    }
    laurent_poly out;
    for (long i = 0; i < qlen; ++i) {
        out.add_term({qlow + i, 0}, q[static_cast<std::size_t>(i)]);
    }
    return out;
}

} // namespace detail

// K-theoretic localization chi(L) = sum_p t^{mu_p} / ((1 - t^{-w1})(1 - t^{-w2}))
// restricted to the one-parameter subgroup t = z^sigma, summed exactly as a
// rational function in z and evaluated at z = 1. Returns the equivariant
// character in z through `character` when requested.
inline integer hrr_k_theoretic(const toric_surface &s, const eq_line_bundle &L, exponent sigma,
                               laurent_poly *character = nullptr)
{
    detail::check_indexing(s, L);
    const auto pair = [&](exponent e) { return e.a * sigma.a + e.b * sigma.b; };
    const auto z = [](long k) { return laurent_poly::monomial({k, 0}); };
    const auto one = laurent_poly::constant(1);
    // Each term as numerator / prod (1 - z^g) with g > 0.
    std::vector<laurent_poly> numerators;
    std::vector<std::vector<long>> dens;
    for (std::size_t p = 0; p < s.fixed_points(); ++p) {
        const auto &c = s.charts()[p];
        laurent_poly num = z(pair(L.weights[p]));
        std::vector<long> g;
        for (const auto &w : {c.w1, c.w2}) {
            const long f = -pair(w);
            if (f == 0) {
                throw non_generic_spec_error("cocharacter (" + std::to_string(sigma.a) + "," +
                                             std::to_string(sigma.b) + ") is orthogonal to a tangent weight");
            }
            if (f > 0) {
                g.push_back(f);
            } else {
                // 1/(1 - z^f) = -z^{-f}/(1 - z^{-f})
                num *= -z(-f);
                g.push_back(-f);
            }
        }
        numerators.push_back(std::move(num));
        dens.push_back(std::move(g));
    }
    laurent_poly common = one;
    for (const auto &g : dens) {
        for (long e : g) {
            common *= one - z(e);
        }
    }
    laurent_poly total;
    for (std::size_t p = 0; p < numerators.size(); ++p) {
        laurent_poly term = numerators[p];
        for (std::size_t q = 0; q < dens.size(); ++q) {
            if (q == p) {
                continue;
            }
            for (long e : dens[q]) {
                term *= one - z(e);
            }
        }
        total += term;
    }
    auto chi = detail::exact_divide(total, common);
    if (character != nullptr) {
        *character = chi;
    }
    return rank_eval(chi);
}

} // namespace nestloc

#endif
