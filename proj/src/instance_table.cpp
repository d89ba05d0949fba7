// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#include "stratus/instance_table.hpp"

#include "stratus/errors.hpp"

namespace stratus {

VMInstance& InstanceTable::create(VMInstance vm) {
    if (table_.count(vm.vm_id) > 0) throw DuplicateId(vm.vm_id);
    vm.created_seq = order_.size();
    order_.push_back(vm.vm_id);
    auto [it, _] = table_.emplace(vm.vm_id, std::move(vm));
    return it->second;
}

VMInstance* InstanceTable::find(const std::string& vm_id) {
    auto it = table_.find(vm_id);
    return it == table_.end() ? nullptr : &it->second;
}

const VMInstance* InstanceTable::find(const std::string& vm_id) const {
    auto it = table_.find(vm_id);
    return it == table_.end() ? nullptr : &it->second;
}

VMInstance& InstanceTable::at(const std::string& vm_id) {
    VMInstance* vm = find(vm_id);
    if (vm == nullptr) throw UnknownInstance(vm_id);
    return *vm;
}

const VMInstance& InstanceTable::at(const std::string& vm_id) const {
    const VMInstance* vm = find(vm_id);
    if (vm == nullptr) throw UnknownInstance(vm_id);
    return *vm;
}

int InstanceTable::count_non_terminated() const {
    int n = 0;
    for_each([&](const VMInstance& vm) {
        if (!vm.terminated()) ++n;
    });
    return n;
}

int InstanceTable::count_for_owner(const std::string& owner) const {
    int n = 0;
    for_each([&](const VMInstance& vm) {
        if (!vm.terminated() && vm.owner == owner) ++n;
    });
    return n;
}

int InstanceTable::count_for_cloud(const std::string& cloud) const {
    int n = 0;
    for_each([&](const VMInstance& vm) {
        if (!vm.terminated() && vm.cloud == cloud) ++n;
    });
    return n;
}

}  // namespace stratus
