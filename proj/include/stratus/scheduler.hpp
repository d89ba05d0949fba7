// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stratus/connectors.hpp"
#include "stratus/credential_store.hpp"
#include "stratus/image_repo.hpp"
#include "stratus/instance_table.hpp"
#include "stratus/matchmaker.hpp"
#include "stratus/model.hpp"

namespace stratus {

enum class PartitionPolicy { Off, SeparateSingleCoreAndWholeNode };

struct SchedulerConfig {
    Seconds cycle_period = 60;
    Seconds match_period = 10;
    Seconds proxy_expiry_margin = 900;
    Seconds lifetime_margin = 3600;
    bool rebalance_enabled = true;
    PartitionPolicy partition_policy = PartitionPolicy::Off;
    double partition_whole_node_fraction = 0.5;
};

/// Read-only snapshot the scheduler decides from. Decisions are a pure
/// function of this view; applying them is the engine's job.
struct SystemView {
    SimTime now = 0;
    const Matchmaker* queue = nullptr;
    const InstanceTable* instances = nullptr;
    const std::vector<CloudConnector>* clouds = nullptr;
    const ImageRepository* images = nullptr;
    const CredentialStore* credentials = nullptr;
    const std::vector<BootRequest>* deferred_boots = nullptr;
    const SchedulerConfig* config = nullptr;
};

/// Capacity committed by decisions made earlier in the same cycle, layered
/// over the connector snapshots so one cycle never double-books a cloud.
struct PlacementOverlay {
    std::map<std::string, int> cores;
    std::map<std::string, long long> memory_mb;
    std::map<std::string, int> scratch_gb;
    std::map<std::string, int> single_core_slots;
    std::map<std::string, int> whole_node_slots;

    /// `scratch` is the pool draw on the target site — the request's
    /// blank_space_gb on nimbus-like sites, zero elsewhere.
    void commit(const BootRequest& req, int scratch) {
        cores[req.target_cloud] += req.request.cores;
        memory_mb[req.target_cloud] += req.request.memory_mb;
        scratch_gb[req.target_cloud] += scratch;
        if (req.whole_node)
            whole_node_slots[req.target_cloud] += req.request.cores;
        else
            single_core_slots[req.target_cloud] += req.request.cores;
    }
};

struct CloudSelection {
    std::optional<std::string> cloud;
    /// Clouds that passed validation and admission gates but lacked room;
    /// freeing capacity there would make the job placeable.
    std::vector<std::string> capacity_blocked;
};

/// Pick the boot target for `job`: among clouds where the boot parameters
/// validate, the owner's credential outlasts the sweep margin, and the
/// request fits, the highest-priority site wins, free cores then name
/// breaking ties.
CloudSelection select_cloud(const Job& job, const SystemView& view, const PlacementOverlay& overlay);

struct RebalanceDecision {
    std::string victim_vm;
    std::string victim_owner;
    std::string starved_user;
    BootRequest deferred_boot;
};

struct CycleDecision {
    std::vector<BootRequest> boots;
    std::optional<RebalanceDecision> rebalance;
    std::vector<std::string> starved_users;
};

/// One fair-share pass: users ordered by their earliest idle job, at most
/// one boot granted per user, same-user fallback across VM types when the
/// preferred type cannot be placed. When everyone with unmet demand is
/// blocked purely by capacity, plans at most one rebalance.
CycleDecision run_scheduling_cycle(const SystemView& view);

enum class SweepAction { Kill, Drain };

struct SweepItem {
    std::string vm_id;
    SweepAction action;
    std::string reason;
};

/// Periodic health pass. Kills error-state instances and instances whose
/// managing proxy is inside the expiry margin; drains instances near their
/// lifetime limit and instances whose owner has no queued work left for
/// that VM type. Kill wins when both apply; one action per instance.
std::vector<SweepItem> lifecycle_sweep(const SystemView& view);

}  // namespace stratus
