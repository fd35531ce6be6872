#ifndef NESTLOC_COMBINATORICS_HPP
#define NESTLOC_COMBINATORICS_HPP

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include <nestloc/characters.hpp>
#include <nestloc/errors.hpp>

namespace nestloc
{

// Integer partition, parts weakly decreasing and strictly positive.
// Indexes the monomial ideal whose Young diagram has row i of length parts[i].
class partition
{
public:
    partition() = default;
    explicit partition(std::vector<int> parts) : parts_(std::move(parts))
    {
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (parts_[i] <= 0 || (i > 0 && parts_[i] > parts_[i - 1])) {
                throw invalid_argument_error("partition parts must be positive and weakly decreasing");
            }
        }
        size_ = std::accumulate(parts_.begin(), parts_.end(), 0);
    }

    const std::vector<int> &parts() const
    {
        return parts_;
    }
    int size() const
    {
        return size_;
    }
    bool empty() const
    {
        return parts_.empty();
    }
    int length() const
    {
        return static_cast<int>(parts_.size());
    }
    // Row length with missing parts read as 0.
    int part(std::size_t i) const
    {
        return i < parts_.size() ? parts_[i] : 0;
    }

    partition conjugate() const
    {
        std::vector<int> c;
        for (int j = 0; j < part(0); ++j) {
            int len = 0;
            while (part(static_cast<std::size_t>(len)) > j) {
                ++len;
            }
            c.push_back(len);
        }
        return partition(std::move(c));
    }

    friend bool operator==(const partition &, const partition &) = default;
    friend auto operator<=>(const partition &a, const partition &b)
    {
        return a.parts_ <=> b.parts_;
    }

private:
    std::vector<int> parts_;
    int size_ = 0;
};

inline std::string to_string(const partition &p)
{
    std::string s = "[";
    for (std::size_t i = 0; i < p.parts().size(); ++i) {
        if (i) {
            s += ',';
        }
        s += std::to_string(p.parts()[i]);
    }
    return s + "]";
}

inline std::ostream &operator<<(std::ostream &os, const partition &p)
{
    return os << to_string(p);
}

namespace detail
{

inline void partitions_rec(int remaining, int max_part, std::vector<int> &cur, std::vector<partition> &out)
{
    if (remaining == 0) {
        out.emplace_back(cur);
        return;
    }
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
        cur.push_back(p);
        partitions_rec(remaining - p, p, cur, out);
        cur.pop_back();
    }
}

} // namespace detail

// All partitions of n in reverse-lexicographic order: [n], [n-1,1], ...
inline std::vector<partition> partitions_of(int n)
{
    if (n < 0) {
        throw invalid_argument_error("partitions_of: negative size");
    }
    std::vector<partition> out;
    std::vector<int> cur;
    detail::partitions_rec(n, n, cur, out);
    return out;
}

// Diagram containment mu <= lambda.
inline bool contains(const partition &lambda, const partition &mu)
{
    for (std::size_t i = 0; i < mu.parts().size(); ++i) {
        if (mu.parts()[i] > lambda.part(i)) {
            return false;
        }
    }
    return true;
}

// All sub-diagrams of lambda of the given size, reverse-lexicographic.
inline std::vector<partition> sub_partitions(const partition &lambda, int size)
{
    std::vector<partition> out;
    std::vector<int> cur;
    std::function<void(std::size_t, int, int)> rec = [&](std::size_t row, int remaining, int cap) {
        if (remaining == 0) {
            out.emplace_back(cur);
            return;
        }
        const int bound = std::min({cap, remaining, lambda.part(row)});
        for (int p = bound; p >= 1; --p) {
            cur.push_back(p);
            rec(row + 1, remaining - p, p);
            cur.pop_back();
        }
    };
    if (size >= 0 && size <= lambda.size()) {
        rec(0, size, lambda.part(0));
    }
    return out;
}

// Boxes (i, j) with i the part index and j < parts[i]; box (i, j) is u1^i u2^j.
inline laurent_poly box_character(const partition &lambda)
{
    laurent_poly q;
    for (std::size_t i = 0; i < lambda.parts().size(); ++i) {
        for (int j = 0; j < lambda.parts()[i]; ++j) {
            q.add_term({static_cast<long>(i), j}, 1);
        }
    }
    return q;
}

// One partition per fixed point, in the surface's fixed-point order.
class multi_partition
{
public:
    multi_partition() = default;
    explicit multi_partition(std::vector<partition> parts) : parts_(std::move(parts))
    {
        for (const auto &p : parts_) {
            total_ += p.size();
        }
    }

    const std::vector<partition> &at() const
    {
        return parts_;
    }
    const partition &operator[](std::size_t p) const
    {
        return parts_[p];
    }
    std::size_t points() const
    {
        return parts_.size();
    }
    int total() const
    {
        return total_;
    }

    friend bool operator==(const multi_partition &, const multi_partition &) = default;

private:
    std::vector<partition> parts_;
    int total_ = 0;
};

inline std::string to_string(const multi_partition &mp)
{
    std::string s = "[";
    for (std::size_t i = 0; i < mp.points(); ++i) {
        if (i) {
            s += ',';
        }
        s += to_string(mp[i]);
    }
    return s + "]";
}

// Pointwise diagram containment: mu <= lambda at every fixed point.
inline bool contains(const multi_partition &lambda, const multi_partition &mu)
{
    if (lambda.points() != mu.points()) {
        throw index_mismatch_error("multi-partitions indexed by different fixed-point sets");
    }
    for (std::size_t p = 0; p < lambda.points(); ++p) {
        if (!contains(lambda[p], mu[p])) {
            return false;
        }
    }
    return true;
}

// All assignments of partitions to `points` fixed points with total size n.
// Order: size compositions with the first point's share decreasing, then
// partitions of each share in reverse-lexicographic order.
inline std::vector<multi_partition> multipartitions(std::size_t points, int n)
{
    if (n < 0) {
        throw invalid_argument_error("multipartitions: negative size");
    }
    if (points == 0) {
        throw invalid_argument_error("multipartitions: no fixed points");
    }
    std::vector<std::vector<partition>> by_size(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        by_size[static_cast<std::size_t>(k)] = partitions_of(k);
    }
    std::vector<multi_partition> out;
    std::vector<partition> cur(points);
    std::function<void(std::size_t, int)> rec = [&](std::size_t p, int remaining) {
        if (p + 1 == points) {
            for (const auto &lam : by_size[static_cast<std::size_t>(remaining)]) {
                cur[p] = lam;
                out.emplace_back(cur);
            }
            return;
        }
        for (int k = remaining; k >= 0; --k) {
            for (const auto &lam : by_size[static_cast<std::size_t>(k)]) {
                cur[p] = lam;
                rec(p + 1, remaining - k);
            }
        }
    };
    rec(0, n);
    return out;
}

// All multi-partitions of the given total contained pointwise in `outer`.
inline std::vector<multi_partition> sub_multipartitions(const multi_partition &outer, int size)
{
    std::vector<multi_partition> out;
    std::vector<partition> cur(outer.points());
    std::function<void(std::size_t, int)> rec = [&](std::size_t p, int remaining) {
        if (p == outer.points()) {
            if (remaining == 0) {
                out.emplace_back(cur);
            }
            return;
        }
        int tail = 0;
        for (std::size_t q = p + 1; q < outer.points(); ++q) {
            tail += outer[q].size();
        }
        for (int k = std::min(remaining, outer[p].size()); k >= 0 && k + tail >= remaining; --k) {
            for (auto &mu : sub_partitions(outer[p], k)) {
                cur[p] = std::move(mu);
                rec(p + 1, remaining - k);
            }
        }
    };
    rec(0, size);
    return out;
}

// Chain of multi-partitions with sizes n_1 >= ... >= n_k, each diagram
// containing the next one pointwise (I_1 in I_2 in ... in I_k).
class nested_chain
{
public:
    nested_chain() = default;
    explicit nested_chain(std::vector<multi_partition> chain) : chain_(std::move(chain))
    {
        for (std::size_t i = 1; i < chain_.size(); ++i) {
            if (!contains(chain_[i - 1], chain_[i])) {
                throw invalid_argument_error("nested_chain: diagrams not nested at step " + std::to_string(i));
            }
        }
    }
    const std::vector<multi_partition> &steps() const
    {
        return chain_;
    }
    const multi_partition &operator[](std::size_t i) const
    {
        return chain_[i];
    }
    std::size_t length() const
    {
        return chain_.size();
    }

    friend bool operator==(const nested_chain &, const nested_chain &) = default;

private:
    std::vector<multi_partition> chain_;
};

inline std::string to_string(const nested_chain &c)
{
    std::string s = "(";
    for (std::size_t i = 0; i < c.length(); ++i) {
        if (i) {
            s += " > ";
        }
        s += to_string(c[i]);
    }
    return s + ")";
}

inline void validate_nested_sizes(const std::vector<int> &sizes)
{
    if (sizes.empty()) {
        throw invalid_argument_error("size list is empty");
    }
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] < 0) {
            throw invalid_argument_error("sizes must be nonnegative");
        }
        if (i > 0 && sizes[i] > sizes[i - 1]) {
            throw invalid_argument_error("sizes must be weakly decreasing (n_1 >= ... >= n_k)");
        }
    }
}

inline std::vector<nested_chain> nested_chains(std::size_t points, const std::vector<int> &sizes)
{
    validate_nested_sizes(sizes);
    std::vector<nested_chain> out;
    std::vector<multi_partition> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t step) {
        if (step == sizes.size()) {
            out.emplace_back(cur);
            return;
        }
        for (auto &mp : sub_multipartitions(cur.back(), sizes[step])) {
            cur.push_back(std::move(mp));
            rec(step + 1);
            cur.pop_back();
        }
    };
    for (auto &first : multipartitions(points, sizes[0])) {
        cur.assign(1, std::move(first));
        rec(1);
    }
    return out;
}

} // namespace nestloc

#endif
