// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <json.hpp>

#include "stratus/image_repo.hpp"
#include "stratus/instance_table.hpp"
#include "stratus/model.hpp"

namespace stratus {

/// One simulated IaaS endpoint. Enforces the site's boot contract and keeps
/// the committed-capacity books: cores and scratch are committed when a boot
/// request is accepted and released when the instance terminates, so the
/// scheduler can never double-book capacity during long boots.
class CloudConnector {
public:
    explicit CloudConnector(CloudSite site) : site_(std::move(site)) {}

    const CloudSite& site() const { return site_; }
    const std::string& name() const { return site_.name; }

    int committed_cores() const { return committed_cores_; }
    int committed_scratch_gb() const { return committed_scratch_gb_; }
    long committed_memory_mb() const { return committed_memory_mb_; }
    int free_cores() const { return site_.total_cores - committed_cores_; }
    long free_memory_mb() const { return site_.total_memory_mb - committed_memory_mb_; }
    int free_scratch_gb() const { return site_.scratch_pool_gb - committed_scratch_gb_; }

    bool in_maintenance() const { return site_.status == CloudStatus::Maintenance; }

    /// True while accepted scratch exceeds the pool. Only possible with the
    /// safeguard off; every job running on the site is fault-eligible then.
    bool over_committed_scratch() const {
        return committed_scratch_gb_ > site_.scratch_pool_gb;
    }

    struct BootOutcome {
        std::string vm_id;
        SimTime running_at = 0;     // boot_fixed_delay + image transfer
        Seconds transfer_time = 0;
    };

    /// Accepts a boot request: creates the instance in Requested state and
    /// moves it to Booting at once, committing cores, memory and scratch.
    /// Throws MaintenanceMode, NoCapacity or ScratchExhausted.
    BootOutcome boot(const BootRequest& req, const ImageRepository& repo,
                     const Credential& cred, SimTime now, InstanceTable& instances);

    /// Terminates a live instance and releases its capacity. Slot occupants
    /// become orphans; rescheduling them is the caller's job. Throws
    /// UnknownInstance when the id does not exist or is already terminated.
    void terminate(const std::string& vm_id, InstanceTable& instances);

    void set_maintenance(bool on) {
        site_.status = on ? CloudStatus::Maintenance : CloudStatus::Active;
    }

    /// Connector state for the status surface.
    nlohmann::ordered_json dump(const InstanceTable& instances) const;

private:
    CloudSite site_;
    int committed_cores_ = 0;
    int committed_scratch_gb_ = 0;
    long committed_memory_mb_ = 0;
    int boot_counter_ = 0;
    int total_booted_ = 0;
};

}  // namespace stratus
