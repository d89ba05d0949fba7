// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stratus/matchmaker.hpp"
#include "stratus/model.hpp"
#include "stratus/rng.hpp"
#include "stratus/scheduler.hpp"
#include "stratus/software_cache.hpp"

namespace stratus {

/// Compact workload generator: `count` jobs every `interarrival` seconds
/// starting at `start`, cpu time fixed or drawn uniformly from a range.
struct GeneratorSpec {
    std::string owner;
    std::string vm_type;
    int count = 0;
    SimTime start = 0;
    Seconds interarrival = 0;
    Seconds runtime_cpu_min = 0;
    Seconds runtime_cpu_max = 0;
    Seconds io_cost = 0;
    ResourceRequest request;
    std::optional<std::set<std::string>> cloud_constraint;
};

struct UserSpec {
    std::string user_id;
    Credential credential;  // always a per-user proxy
};

/// A scripted disturbance applied at a fixed sim-time.
struct FaultSpec {
    enum class Kind { VmFail, CloudMaintenance, CredentialRenewal };
    Kind kind = Kind::VmFail;
    SimTime time = 0;
    std::string vm_id;           // vm_fail
    std::string mode = "error";  // vm_fail: "error" (cloud-reported) or "stop" (admin)
    std::string cloud;           // cloud_maintenance
    bool on = true;              // cloud_maintenance
    std::string user;            // credential_renewal
    Seconds lifetime = 43200;    // credential_renewal
};

struct ScenarioImage {
    VMImage image;
    /// When set, the image save starts here and the catalog entry appears
    /// after the save-time model's delay; otherwise available from t = 0.
    std::optional<SimTime> save_at;
};

struct SoftwareCacheConfig {
    Seconds default_cold = 300;
    Seconds default_warm = 0;
    std::map<std::string, StageinCost> per_vm_type;
};

/// A full declarative run description. Everything a run needs — sites,
/// images, users, workload, faults, knobs — lives here, so a (scenario,
/// seed) pair fully determines the event log.
struct Scenario {
    std::string name = "scenario";
    SimTime horizon = 0;
    std::uint64_t seed = 1;
    Seconds sample_period = 300;
    double io_fault_rate_per_hour = 0.1;
    SchedulerConfig scheduler;
    std::vector<CloudSite> clouds;
    std::vector<ScenarioImage> images;
    std::vector<UserSpec> users;
    std::vector<JobSpec> jobs;  // depends_on refers to 1-based list positions
    std::vector<GeneratorSpec> generators;
    std::vector<FaultSpec> faults;
    SoftwareCacheConfig software_cache;

    /// Strict parse; unknown keys and bad values raise InvalidScenario with
    /// a field-path diagnostic. Cross-reference validation included.
    static Scenario from_json(const nlohmann::json& doc);
    static Scenario load_file(const std::string& path);

    nlohmann::ordered_json to_json() const;
    void save_file(const std::string& path) const;

    /// Re-checks structural and cross-reference rules; throws InvalidScenario.
    void validate() const;

    /// Explicit plus generated jobs, sorted by (submit_time, listing order),
    /// dependencies rewritten to final 1-based job ids. Consumes generator
    /// runtime draws from `rng` in listing order.
    std::vector<JobSpec> expand_workload(Rng& rng) const;
};

}  // namespace stratus
