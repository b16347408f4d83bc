#pragma once

#include <compare>
#include <cstdint>
#include <functional>

namespace ssn {

// Dense index of a member within one network. Stable for the lifetime of the
// MemberDirectory that issued it.
struct MemberId {
    std::uint32_t value = 0;

    constexpr auto operator<=>(const MemberId&) const = default;
};

// Dense index into a TopicLexicon, contiguous over [0, |C|).
struct TopicId {
    std::uint32_t value = 0;

    constexpr auto operator<=>(const TopicId&) const = default;
};

}  // namespace ssn

template <>
struct std::hash<ssn::MemberId> {
    std::size_t operator()(ssn::MemberId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};

template <>
struct std::hash<ssn::TopicId> {
    std::size_t operator()(ssn::TopicId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
