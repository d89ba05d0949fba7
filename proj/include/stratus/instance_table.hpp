// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "stratus/model.hpp"

namespace stratus {

/// All instances ever created in a run, in global creation order. Terminated
/// instances stay in the table so event logs and metrics can be reconciled.
class InstanceTable {
public:
    VMInstance& create(VMInstance vm);

    VMInstance* find(const std::string& vm_id);
    const VMInstance* find(const std::string& vm_id) const;

    VMInstance& at(const std::string& vm_id);
    const VMInstance& at(const std::string& vm_id) const;

    /// Iteration in creation order; matchmaking and tie-breaks rely on this
    /// being deterministic.
    const std::vector<std::string>& creation_order() const { return order_; }

    std::size_t size() const { return order_.size(); }

    template <typename Fn>
    void for_each(Fn&& fn) {
        for (const auto& id : order_) fn(table_.at(id));
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (const auto& id : order_) fn(table_.at(id));
    }

    int count_non_terminated() const;
    int count_for_owner(const std::string& owner) const;
    int count_for_cloud(const std::string& cloud) const;

private:
    std::map<std::string, VMInstance> table_;
    std::vector<std::string> order_;
};

}  // namespace stratus
