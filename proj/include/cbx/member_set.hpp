#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace cbx {

/// A set of instance indices drawn from a fixed universe [0, universe).
/// Indices refer to positions in Dataset::instances(), which are sorted by id,
/// so ascending index order is also ascending id order.
class MemberSet {
public:
    MemberSet() = default;
    explicit MemberSet(std::size_t universe, bool full = false);

    static MemberSet all(std::size_t universe) { return MemberSet(universe, true); }
    static MemberSet from_indices(std::size_t universe, const std::vector<std::uint32_t>& indices);

    std::size_t universe() const noexcept { return universe_; }
    std::size_t count() const noexcept;
    bool empty() const noexcept { return count() == 0; }

    bool contains(std::size_t index) const noexcept {
        return index < universe_ && ((words_[index >> 6] >> (index & 63)) & 1u) != 0;
    }
    void insert(std::size_t index);
    void erase(std::size_t index);

    MemberSet& operator|=(const MemberSet& other);
    MemberSet& operator&=(const MemberSet& other);
    MemberSet& operator-=(const MemberSet& other);
    MemberSet complement() const;

    friend MemberSet operator|(MemberSet a, const MemberSet& b) { return a |= b; }
    friend MemberSet operator&(MemberSet a, const MemberSet& b) { return a &= b; }
    friend MemberSet operator-(MemberSet a, const MemberSet& b) { return a -= b; }

    bool operator==(const MemberSet& other) const = default;

    /// Ascending member indices.
    std::vector<std::uint32_t> indices() const;

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits != 0) {
                const int bit = __builtin_ctzll(bits);
                fn(static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(bit)));
                bits &= bits - 1;
            }
        }
    }

private:
    void check_universe(const MemberSet& other) const;
    void trim() noexcept;

    std::size_t universe_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace cbx
