#pragma once

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "lll/error.hpp"

namespace lll {

/// Buckets of integer items with O(1) insert and erase. An item may sit in
/// several buckets; erase swaps the last item into the vacated slot.
class IndexedBucketList {
public:
    explicit IndexedBucketList(std::size_t buckets = 0) : items_(buckets) {}

    std::size_t buckets() const { return items_.size(); }
    const std::vector<int>& items(std::size_t b) const { return items_[b]; }

    bool contains(std::size_t b, int item) const { return pos_.count(key(b, item)) != 0; }

    void insert(std::size_t b, int item) {
        auto [it, fresh] = pos_.emplace(key(b, item), items_[b].size());
        require(fresh, ErrorKind::InvariantViolation, "item already in bucket");
        items_[b].push_back(item);
    }

    void erase(std::size_t b, int item) {
        auto it = pos_.find(key(b, item));
        require(it != pos_.end(), ErrorKind::InvariantViolation, "item not in bucket");
        const std::size_t p = it->second;
        pos_.erase(it);
        auto& l = items_[b];
        if (p + 1 != l.size()) {
            l[p] = l.back();
            pos_[key(b, l[p])] = p;
        }
        l.pop_back();
    }

    std::size_t total() const { return pos_.size(); }

private:
    static std::uint64_t key(std::size_t b, int item) {
        return (static_cast<std::uint64_t>(b) << 32) | static_cast<std::uint32_t>(item);
    }

    std::vector<std::vector<int>> items_;
    std::unordered_map<std::uint64_t, std::size_t> pos_;
};

}  // namespace lll
