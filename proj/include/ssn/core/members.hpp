#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ssn/core/ids.hpp"

namespace ssn {

// Maps display names to dense member ids. Identity is the exact display-name
// string; homonyms collapse into one member.
class MemberDirectory {
public:
    MemberId intern(std::string_view display_name);
    std::optional<MemberId> find(std::string_view display_name) const;
    const std::string& display_name(MemberId id) const { return names_.at(id.value); }
    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, MemberId> index_;
};

}  // namespace ssn
