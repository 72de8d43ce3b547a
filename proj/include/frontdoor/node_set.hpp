#ifndef FRONTDOOR_NODE_SET_HPP
#define FRONTDOOR_NODE_SET_HPP

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace frontdoor {

using NodeId = std::size_t;

// Fixed-capacity set of small indices backed by a 64-bit mask. Used for graph
// nodes and for data-table variables alike.
class NodeSet {
public:
    static constexpr std::size_t capacity = 64;

    constexpr NodeSet() = default;
    constexpr explicit NodeSet(std::uint64_t bits) : bits_(bits) {}
    NodeSet(std::initializer_list<NodeId> ids) {
        for (auto id : ids) insert(id);
    }

    static NodeSet from_vector(const std::vector<NodeId>& ids) {
        NodeSet s;
        for (auto id : ids) s.insert(id);
        return s;
    }

    // {0, ..., n-1}
    static constexpr NodeSet range(std::size_t n) {
        return NodeSet(n >= capacity ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
    }

    static constexpr NodeSet singleton(NodeId id) { return NodeSet(std::uint64_t{1} << id); }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
    constexpr bool contains(NodeId id) const { return id < capacity && ((bits_ >> id) & 1U) != 0; }

    void insert(NodeId id) {
        if (id >= capacity) throw std::out_of_range("node index exceeds NodeSet capacity");
        bits_ |= std::uint64_t{1} << id;
    }
    void erase(NodeId id) {
        if (id < capacity) bits_ &= ~(std::uint64_t{1} << id);
    }

    constexpr bool intersects(NodeSet o) const { return (bits_ & o.bits_) != 0; }
    constexpr bool is_subset_of(NodeSet o) const { return (bits_ & ~o.bits_) == 0; }

    // Smallest element; set must be non-empty.
    constexpr NodeId front() const { return static_cast<NodeId>(std::countr_zero(bits_)); }

    std::vector<NodeId> to_vector() const {
        std::vector<NodeId> out;
        out.reserve(size());
        for (auto id : *this) out.push_back(id);
        return out;
    }

    class iterator {
    public:
        using iterator_category = std::forward_iterator_tag;
        using value_type = NodeId;
        using difference_type = std::ptrdiff_t;
        using pointer = const NodeId*;
        using reference = NodeId;

        constexpr iterator() = default;
        constexpr explicit iterator(std::uint64_t rest) : rest_(rest) {}
        constexpr NodeId operator*() const { return static_cast<NodeId>(std::countr_zero(rest_)); }
        constexpr iterator& operator++() {
            rest_ &= rest_ - 1;
            return *this;
        }
        constexpr iterator operator++(int) {
            auto tmp = *this;
            ++*this;
            return tmp;
        }
        constexpr bool operator==(const iterator&) const = default;

    private:
        std::uint64_t rest_ = 0;
    };

    constexpr iterator begin() const { return iterator(bits_); }
    constexpr iterator end() const { return iterator(0); }

    constexpr NodeSet operator|(NodeSet o) const { return NodeSet(bits_ | o.bits_); }
    constexpr NodeSet operator&(NodeSet o) const { return NodeSet(bits_ & o.bits_); }
    constexpr NodeSet operator-(NodeSet o) const { return NodeSet(bits_ & ~o.bits_); }
    NodeSet& operator|=(NodeSet o) {
        bits_ |= o.bits_;
        return *this;
    }
    NodeSet& operator&=(NodeSet o) {
        bits_ &= o.bits_;
        return *this;
    }
    NodeSet& operator-=(NodeSet o) {
        bits_ &= ~o.bits_;
        return *this;
    }
    constexpr bool operator==(const NodeSet&) const = default;

private:
    std::uint64_t bits_ = 0;
};

// "{0,3,5}"
std::string to_string(NodeSet s);

// Lexicographic comparison of the sorted element lists; the canonical
// tie-break order among sets of equal size.
bool lexicographic_less(NodeSet a, NodeSet b);

// Every subset of `pool` with at most `max_size` elements, ordered by size and
// then lexicographically. `fn` returns false to stop early.
template <typename Fn>
void for_each_subset_by_size(NodeSet pool, std::optional<std::size_t> max_size, Fn&& fn) {
    const auto elems = pool.to_vector();
    const std::size_t n = elems.size();
    const std::size_t top = max_size ? std::min(*max_size, n) : n;
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k <= top; ++k) {
        idx.resize(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        while (true) {
            NodeSet s;
            for (auto i : idx) s.insert(elems[i]);
            if (!fn(s)) return;
            // advance to the next k-combination
            std::size_t pos = k;
            while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
            if (pos == 0) break;
            ++idx[pos - 1];
            for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
}

}  // namespace frontdoor

#endif  // FRONTDOOR_NODE_SET_HPP
