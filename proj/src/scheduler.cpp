// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#include "stratus/scheduler.hpp"

#include <cmath>
#include <set>

namespace stratus {

namespace {

int overlay_at(const std::map<std::string, int>& m, const std::string& key) {
    auto it = m.find(key);
    return it == m.end() ? 0 : it->second;
}

long long overlay_at(const std::map<std::string, long long>& m, const std::string& key) {
    auto it = m.find(key);
    return it == m.end() ? 0 : it->second;
}

/// Cores committed per packing class (single-core vs whole-node) on one
/// cloud, counting every non-terminated instance like the connector does.
struct ClassLoad {
    int single = 0;
    int whole = 0;
};

/// Scratch a request would draw from the site's pool. Blank-space partitions
/// exist only on nimbus-like sites; elsewhere the demand is zero.
int scratch_demand(const ResourceRequest& req, const CloudSite& site) {
    return site.family == CloudFamily::NimbusLike ? req.blank_space_gb : 0;
}

ClassLoad class_load(const SystemView& view, const std::string& cloud,
                     const PlacementOverlay& overlay) {
    ClassLoad load;
    view.instances->for_each([&](const VMInstance& vm) {
        if (vm.cloud != cloud || vm.terminated()) return;
        if (vm.slots > 1)
            load.whole += vm.slots;
        else
            load.single += vm.slots;
    });
    load.single += overlay_at(overlay.single_core_slots, cloud);
    load.whole += overlay_at(overlay.whole_node_slots, cloud);
    return load;
}

}  // namespace

CloudSelection select_cloud(const Job& job, const SystemView& view,
                            const PlacementOverlay& overlay) {
    CloudSelection result;
    const CloudConnector* best = nullptr;
    int best_free = 0;

    const VMImage* image = view.images->lookup(job.vm_type, view.now);

    for (const CloudConnector& conn : *view.clouds) {
        const CloudSite& site = conn.site();
        if (site.status != CloudStatus::Active) continue;
        if (!job.allows_cloud(site.name)) continue;
        if (image == nullptr) continue;
        const Credential* cred = view.credentials->credential_for(site, job.owner);
        if (cred == nullptr) continue;
        // A proxy already inside the sweep margin cannot anchor a new
        // instance; the site is unusable for this user, not capacity-blocked.
        if (site.auth_mode == AuthKind::PerUserProxy &&
            cred->expiry() - view.now <= view.config->proxy_expiry_margin)
            continue;
        if (!validate_boot_parameters(job, site, *image, *cred, view.now).ok()) continue;

        const int free_cores =
            conn.free_cores() - overlay_at(overlay.cores, site.name);
        const long long free_memory =
            conn.free_memory_mb() - overlay_at(overlay.memory_mb, site.name);
        bool fits = job.request.cores <= free_cores &&
                    job.request.memory_mb <= free_memory;
        if (fits && site.scratch_safeguard) {
            const int free_scratch =
                conn.free_scratch_gb() - overlay_at(overlay.scratch_gb, site.name);
            fits = scratch_demand(job.request, site) <= free_scratch;
        }
        if (fits && view.config->partition_policy ==
                        PartitionPolicy::SeparateSingleCoreAndWholeNode) {
            const ClassLoad load = class_load(view, site.name, overlay);
            const int whole_pool = static_cast<int>(
                std::floor(site.total_cores * view.config->partition_whole_node_fraction));
            const int single_pool = site.total_cores - whole_pool;
            if (job.request.whole_node())
                fits = load.whole + job.request.cores <= whole_pool;
            else
                fits = load.single + job.request.cores <= single_pool;
        }
        if (!fits) {
            result.capacity_blocked.push_back(site.name);
            continue;
        }

        const bool wins =
            best == nullptr || site.priority > best->site().priority ||
            (site.priority == best->site().priority &&
             (free_cores > best_free ||
              (free_cores == best_free && site.name < best->site().name)));
        if (wins) {
            best = &conn;
            best_free = free_cores;
        }
    }

    if (best != nullptr) result.cloud = best->site().name;
    return result;
}

namespace {

/// A bucket of equivalent slots a user's idle jobs could land on without any
/// new boot: free slots on running instances, plus every slot of instances
/// still booting, plus boots already decided (this cycle or deferred).
struct SupplyPool {
    std::string vm_type;
    std::string cloud;
    int units = 0;
};

std::vector<SupplyPool> build_supply(const SystemView& view, const std::string& user,
                                     const std::vector<BootRequest>& cycle_boots) {
    std::vector<SupplyPool> pools;
    view.instances->for_each([&](const VMInstance& vm) {
        if (vm.owner != user) return;
        int units = 0;
        if (vm.state == VmState::Running)
            units = vm.free_slots();
        else if (vm.state == VmState::Requested || vm.state == VmState::Booting)
            units = vm.slots;
        if (units > 0) pools.push_back({vm.image, vm.cloud, units});
    });
    if (view.deferred_boots != nullptr) {
        for (const BootRequest& req : *view.deferred_boots)
            if (req.owner == user)
                pools.push_back({req.image, req.target_cloud, req.request.cores});
    }
    for (const BootRequest& req : cycle_boots)
        if (req.owner == user)
            pools.push_back({req.image, req.target_cloud, req.request.cores});
    return pools;
}

bool consume_supply(std::vector<SupplyPool>& pools, const Job& job) {
    for (SupplyPool& pool : pools) {
        if (pool.units <= 0) continue;
        if (pool.vm_type != job.vm_type) continue;
        if (!job.allows_cloud(pool.cloud)) continue;
        --pool.units;
        return true;
    }
    return false;
}

/// Instances that count against a user in rebalance arithmetic: everything
/// on its way up or serving jobs. Retiring instances are already leaving and
/// counting them would drain the same user once per cycle while the first
/// drain completes.
bool counts_for_balance(const VMInstance& vm) {
    return vm.state == VmState::Requested || vm.state == VmState::Booting ||
           vm.state == VmState::Running;
}

struct StarvedInfo {
    std::string user;
    const Job* job = nullptr;                  // earliest capacity-blocked job
    std::vector<std::string> blocked_clouds;   // valid targets that lacked room
};

std::optional<RebalanceDecision> plan_rebalance(const SystemView& view,
                                                const StarvedInfo& starved,
                                                const std::vector<BootRequest>& cycle_boots) {
    // Effective per-user instance counts, including boots not yet applied.
    std::map<std::string, int> count;
    view.instances->for_each([&](const VMInstance& vm) {
        if (counts_for_balance(vm)) ++count[vm.owner];
    });
    if (view.deferred_boots != nullptr)
        for (const BootRequest& req : *view.deferred_boots) ++count[req.owner];
    for (const BootRequest& req : cycle_boots) ++count[req.owner];

    // Oldest boot per user for the tie-break.
    std::map<std::string, SimTime> oldest;
    view.instances->for_each([&](const VMInstance& vm) {
        if (!counts_for_balance(vm)) return;
        auto it = oldest.find(vm.owner);
        if (it == oldest.end() || vm.booted_at < it->second) oldest[vm.owner] = vm.booted_at;
    });

    std::string heavy;
    int heavy_count = 0;
    for (const auto& [user, n] : count) {
        if (n == 0) continue;
        if (heavy.empty()) {
            heavy = user;
            heavy_count = n;
            continue;
        }
        bool wins = n > heavy_count;
        if (n == heavy_count) {
            const SimTime a = oldest.count(user) ? oldest[user] : kMaxSimTime;
            const SimTime b = oldest.count(heavy) ? oldest[heavy] : kMaxSimTime;
            wins = a < b || (a == b && user < heavy);
        }
        if (wins) {
            heavy = user;
            heavy_count = n;
        }
    }

    if (heavy.empty() || heavy == starved.user) return std::nullopt;
    const int starved_count = count.count(starved.user) ? count[starved.user] : 0;
    if (heavy_count - starved_count < 2) return std::nullopt;

    // Victim: the heavy user's most recently booted running instance on a
    // cloud where freeing it makes the starved job placeable.
    const std::set<std::string> viable(starved.blocked_clouds.begin(),
                                       starved.blocked_clouds.end());
    const Job& job = *starved.job;
    const VMInstance* victim = nullptr;
    view.instances->for_each([&](const VMInstance& vm) {
        if (vm.owner != heavy || vm.state != VmState::Running) return;
        if (viable.count(vm.cloud) == 0) return;
        const CloudConnector* conn = nullptr;
        for (const CloudConnector& c : *view.clouds)
            if (c.name() == vm.cloud) conn = &c;
        if (conn == nullptr) return;
        if (conn->free_cores() + vm.slots < job.request.cores) return;
        if (conn->free_memory_mb() + vm.memory_mb < job.request.memory_mb) return;
        if (conn->site().scratch_safeguard &&
            conn->free_scratch_gb() + vm.blank_space_gb <
                scratch_demand(job.request, conn->site()))
            return;
        if (victim == nullptr || vm.booted_at > victim->booted_at ||
            (vm.booted_at == victim->booted_at && vm.created_seq > victim->created_seq))
            victim = &vm;
    });
    if (victim == nullptr) return std::nullopt;

    RebalanceDecision decision;
    decision.victim_vm = victim->vm_id;
    decision.victim_owner = heavy;
    decision.starved_user = starved.user;
    decision.deferred_boot = BootRequest{job.owner, job.vm_type, job.request,
                                         victim->cloud, job.request.whole_node()};
    return decision;
}

}  // namespace

CycleDecision run_scheduling_cycle(const SystemView& view) {
    CycleDecision out;
    PlacementOverlay overlay;

    // Users in FIFO order of their earliest idle job.
    std::vector<std::string> users;
    {
        std::set<std::string> seen;
        view.queue->for_each_fifo([&](const Job& job) {
            if (job.state == JobState::Idle && seen.insert(job.owner).second)
                users.push_back(job.owner);
        });
    }

    std::vector<StarvedInfo> starved;
    for (const std::string& user : users) {
        std::vector<SupplyPool> pools = build_supply(view, user, out.boots);
        std::vector<const Job*> unmet;
        view.queue->for_each_fifo([&](const Job& job) {
            if (job.owner != user || job.state != JobState::Idle) return;
            if (!consume_supply(pools, job)) unmet.push_back(&job);
        });
        if (unmet.empty()) continue;

        bool booted = false;
        StarvedInfo info;
        std::set<std::string> tried;
        for (const Job* job : unmet) {
            if (!tried.insert(job->vm_type).second) continue;
            CloudSelection sel = select_cloud(*job, view, overlay);
            if (sel.cloud) {
                BootRequest req{user, job->vm_type, job->request, *sel.cloud,
                                job->request.whole_node()};
                for (const CloudConnector& conn : *view.clouds)
                    if (conn.name() == *sel.cloud)
                        overlay.commit(req, scratch_demand(req.request, conn.site()));
                out.boots.push_back(std::move(req));
                booted = true;
                break;
            }
            if (!sel.capacity_blocked.empty() && info.job == nullptr) {
                info.user = user;
                info.job = job;
                info.blocked_clouds = std::move(sel.capacity_blocked);
            }
        }
        if (!booted) {
            out.starved_users.push_back(user);
            if (info.job != nullptr) starved.push_back(std::move(info));
        }
    }

    if (view.config->rebalance_enabled) {
        for (const StarvedInfo& info : starved) {
            out.rebalance = plan_rebalance(view, info, out.boots);
            if (out.rebalance) break;
        }
    }

    return out;
}

std::vector<SweepItem> lifecycle_sweep(const SystemView& view) {
    std::vector<SweepItem> items;
    const SchedulerConfig& cfg = *view.config;

    view.instances->for_each([&](const VMInstance& vm) {
        if (vm.terminated()) return;

        if (vm.state == VmState::Error) {
            items.push_back({vm.vm_id, SweepAction::Kill, "error"});
            return;
        }
        if (vm.credential_kind == AuthKind::PerUserProxy) {
            const Credential* cred = view.credentials->proxy(vm.credential_owner);
            if (cred == nullptr || cred->expiry() - view.now <= cfg.proxy_expiry_margin) {
                items.push_back({vm.vm_id, SweepAction::Kill, "proxy-expiry"});
                return;
            }
        }
        if (vm.state != VmState::Running) return;  // drains need a running host
        if (vm.lifetime_limit &&
            vm.booted_at + *vm.lifetime_limit - view.now <= cfg.lifetime_margin) {
            items.push_back({vm.vm_id, SweepAction::Drain, "lifetime"});
            return;
        }
        // No queued work left that this instance could ever serve: retire it.
        bool wanted = false;
        view.queue->for_each_fifo([&](const Job& job) {
            if (wanted || job.owner != vm.owner || job.vm_type != vm.image) return;
            if (job.state != JobState::Idle && job.state != JobState::Held) return;
            if (job.allows_cloud(vm.cloud)) wanted = true;
        });
        if (!wanted) items.push_back({vm.vm_id, SweepAction::Drain, "idle"});
    });

    return items;
}

}  // namespace stratus
