#include "ssn/core/members.hpp"

namespace ssn {

MemberId MemberDirectory::intern(std::string_view display_name) {
    std::string key(display_name);
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    MemberId id{static_cast<std::uint32_t>(names_.size())};
    names_.push_back(key);
    index_.emplace(std::move(key), id);
    return id;
}

std::optional<MemberId> MemberDirectory::find(std::string_view display_name) const {
    if (auto it = index_.find(std::string(display_name)); it != index_.end()) return it->second;
    return std::nullopt;
}

}  // namespace ssn
