// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#include "stratus/connectors.hpp"

#include "stratus/errors.hpp"

namespace stratus {

CloudConnector::BootOutcome CloudConnector::boot(const BootRequest& req,
                                                 const ImageRepository& repo,
                                                 const Credential& cred, SimTime now,
                                                 InstanceTable& instances) {
    if (in_maintenance()) throw MaintenanceMode(site_.name);
    if (req.request.cores > free_cores()) {
        throw NoCapacity("cores: need " + std::to_string(req.request.cores) + ", free " +
                         std::to_string(free_cores()));
    }
    if (req.request.memory_mb > free_memory_mb()) {
        throw NoCapacity("memory: need " + std::to_string(req.request.memory_mb) +
                         " MB, free " + std::to_string(free_memory_mb()) + " MB");
    }

    int scratch = 0;
    if (site_.family == CloudFamily::NimbusLike) {
        scratch = req.request.blank_space_gb;
        if (site_.scratch_safeguard && scratch > free_scratch_gb()) {
            throw ScratchExhausted();
        }
        // Without the safeguard the request is accepted even when the pool
        // is exceeded; the over-commit is visible via over_committed_scratch.
    }

    const Seconds transfer = repo.transfer_time(req.image, site_, now);

    VMInstance vm;
    vm.vm_id = site_.name + "-" + std::to_string(++boot_counter_);
    vm.owner = req.owner;
    vm.image = req.image;
    vm.cloud = site_.name;
    vm.hypervisor = site_.hypervisor;
    vm.slots = req.request.cores;
    vm.memory_mb = req.request.memory_mb;
    vm.slot_occupancy.assign(static_cast<std::size_t>(req.request.cores), std::nullopt);
    vm.booted_at = now;
    if (site_.family == CloudFamily::NimbusLike) {
        vm.lifetime_limit = kNimbusDefaultLifetime;
    }
    vm.credential_owner = cred.owner;
    vm.credential_kind = cred.kind;
    vm.state = VmState::Requested;
    vm.blank_space_gb = scratch;

    committed_cores_ += req.request.cores;
    committed_memory_mb_ += req.request.memory_mb;
    committed_scratch_gb_ += scratch;
    total_booted_ += 1;

    VMInstance& created = instances.create(std::move(vm));
    created.state = VmState::Booting;

    return {created.vm_id, now + site_.boot_fixed_delay + transfer, transfer};
}

void CloudConnector::terminate(const std::string& vm_id, InstanceTable& instances) {
    VMInstance* vm = instances.find(vm_id);
    if (vm == nullptr || vm->terminated()) throw UnknownInstance(vm_id);
    if (vm->cloud != site_.name) throw UnknownInstance(vm_id + " (wrong cloud)");

    vm->state = VmState::Terminated;
    committed_cores_ -= vm->slots;
    committed_memory_mb_ -= vm->memory_mb;
    committed_scratch_gb_ -= vm->blank_space_gb;
}

nlohmann::ordered_json CloudConnector::dump(const InstanceTable& instances) const {
    nlohmann::ordered_json j;
    j["name"] = site_.name;
    j["family"] = to_string(site_.family);
    j["hypervisor"] = to_string(site_.hypervisor);
    j["status"] = to_string(site_.status);
    j["total_cores"] = site_.total_cores;
    j["committed_cores"] = committed_cores_;
    j["scratch_pool_gb"] = site_.scratch_pool_gb;
    j["committed_scratch_gb"] = committed_scratch_gb_;
    j["over_committed_scratch"] = over_committed_scratch();
    j["total_booted"] = total_booted_;
    nlohmann::ordered_json live = nlohmann::ordered_json::array();
    instances.for_each([&](const VMInstance& vm) {
        if (!vm.terminated() && vm.cloud == site_.name) {
            live.push_back(vm.vm_id);
        }
    });
    j["instances"] = live;
    return j;
}

}  // namespace stratus
