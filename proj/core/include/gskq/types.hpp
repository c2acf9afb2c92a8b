#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gskq/geometry.hpp"

namespace gskq {

using KeywordId = uint32_t;

/// Sorted, duplicate-free list of interned keyword ids.
using KeywordSet = std::vector<KeywordId>;

/// Bidirectional keyword token <-> id map. Ids are assigned in first-seen
/// order, so interning the same token stream always yields the same ids.
class Vocabulary {
public:
    KeywordId intern(std::string_view token) {
        auto it = ids_.find(std::string(token));
        if (it != ids_.end()) return it->second;
        const KeywordId id = static_cast<KeywordId>(tokens_.size());
        tokens_.emplace_back(token);
        ids_.emplace(tokens_.back(), id);
        return id;
    }

    std::optional<KeywordId> find(std::string_view token) const {
        auto it = ids_.find(std::string(token));
        if (it == ids_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& token(KeywordId id) const { return tokens_.at(id); }

    size_t size() const { return tokens_.size(); }

    const std::vector<std::string>& tokens() const { return tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, KeywordId> ids_;
};

/// One element of the dataset: (id, location, keyword set).
struct SpatioTextualObject {
    uint32_t id = 0;
    Point location;
    KeywordSet keywords;
};

/// One query user: location, non-empty keyword set, optional priority.
struct QueryPoint {
    Point location;
    KeywordSet keywords;
    double priority = 1.0;
};

/// Ordered group of query users.
struct QueryGroup {
    std::vector<QueryPoint> members;

    size_t size() const { return members.size(); }
};

inline void sort_unique(KeywordSet& kws) {
    std::sort(kws.begin(), kws.end());
    kws.erase(std::unique(kws.begin(), kws.end()), kws.end());
}

}  // namespace gskq
