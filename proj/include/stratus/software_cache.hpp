// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <set>
#include <string>

#include "stratus/types.hpp"

namespace stratus {

struct StageinCost {
    Seconds cold = 300;
    Seconds warm = 0;
};

/// Per-instance software stage-in model: the first job started on an
/// instance pays the cold cost for its image type, every later job on the
/// same instance hits a warm cache. One cache per instance, so a whole-node
/// instance pays the cold cost once for all of its slots.
class SoftwareCache {
public:
    SoftwareCache() = default;
    explicit SoftwareCache(StageinCost defaults) : defaults_(defaults) {}

    void set_cost(const std::string& vm_type, StageinCost cost) {
        per_type_[vm_type] = cost;
    }

    StageinCost cost_for(const std::string& vm_type) const {
        auto it = per_type_.find(vm_type);
        return it == per_type_.end() ? defaults_ : it->second;
    }

    /// Stage-in seconds charged to the next job starting on `vm_id`, and
    /// marks the instance cache warm. The cold cost is consumed at most once
    /// per instance.
    Seconds consume(const std::string& vm_id, const std::string& vm_type);

    bool warm(const std::string& vm_id) const { return warmed_.count(vm_id) > 0; }

private:
    StageinCost defaults_;
    std::map<std::string, StageinCost> per_type_;
    std::set<std::string> warmed_;
};

}  // namespace stratus
