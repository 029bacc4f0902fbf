#include "cbx/member_set.hpp"

#include "cbx/error.hpp"

#include <bit>

namespace cbx {

MemberSet::MemberSet(std::size_t universe, bool full)
    : universe_(universe), words_((universe + 63) / 64, full ? ~std::uint64_t{0} : 0) {
    trim();
}

MemberSet MemberSet::from_indices(std::size_t universe, const std::vector<std::uint32_t>& indices) {
    MemberSet out(universe);
    for (auto i : indices) out.insert(i);
    return out;
}

std::size_t MemberSet::count() const noexcept {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

void MemberSet::insert(std::size_t index) {
    if (index >= universe_) throw Error(ErrorCode::InvalidArgument, "member index out of range");
    words_[index >> 6] |= std::uint64_t{1} << (index & 63);
}

void MemberSet::erase(std::size_t index) {
    if (index >= universe_) return;
    words_[index >> 6] &= ~(std::uint64_t{1} << (index & 63));
}

MemberSet& MemberSet::operator|=(const MemberSet& other) {
    check_universe(other);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    return *this;
}

MemberSet& MemberSet::operator&=(const MemberSet& other) {
    check_universe(other);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
    return *this;
}

MemberSet& MemberSet::operator-=(const MemberSet& other) {
    check_universe(other);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
    return *this;
}

MemberSet MemberSet::complement() const {
    MemberSet out = *this;
    for (auto& w : out.words_) w = ~w;
    out.trim();
    return out;
}

std::vector<std::uint32_t> MemberSet::indices() const {
    std::vector<std::uint32_t> out;
    out.reserve(count());
    for_each([&](std::uint32_t i) { out.push_back(i); });
    return out;
}

void MemberSet::check_universe(const MemberSet& other) const {
    if (other.universe_ != universe_)
        throw Error(ErrorCode::InvalidArgument, "member sets drawn from different universes");
}

void MemberSet::trim() noexcept {
    const std::size_t tail = universe_ & 63;
    if (tail != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << tail) - 1;
}

} // namespace cbx
