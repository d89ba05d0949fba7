// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#include "stratus/software_cache.hpp"

namespace stratus {

Seconds SoftwareCache::consume(const std::string& vm_id, const std::string& vm_type) {
    const StageinCost cost = cost_for(vm_type);
    if (warmed_.insert(vm_id).second) return cost.cold;
    return cost.warm;
}

}  // namespace stratus
