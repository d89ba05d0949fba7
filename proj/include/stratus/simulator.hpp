// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stratus/connectors.hpp"
#include "stratus/credential_store.hpp"
#include "stratus/event_log.hpp"
#include "stratus/image_repo.hpp"
#include "stratus/instance_table.hpp"
#include "stratus/matchmaker.hpp"
#include "stratus/metrics.hpp"
#include "stratus/rng.hpp"
#include "stratus/scenario.hpp"
#include "stratus/scheduler.hpp"
#include "stratus/software_cache.hpp"

namespace stratus {

enum class EventKind {
    JobArrival,
    SchedulerTick,
    MatchTick,
    VMBootComplete,
    JobComplete,
    VMFail,
    IOFault,
    CloudMaintenance,
    CredentialRenewal,
    ScenarioEnd,
};

/// One queued occurrence. Dequeue order is (time asc, seq asc); seq is the
/// global insertion counter, so the whole run is a deterministic total order.
struct Event {
    SimTime time = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::ScenarioEnd;

    // Kind-specific payload; unused fields stay defaulted.
    std::size_t arrival_index = 0;      // JobArrival
    JobId job = 0;                      // JobComplete, IOFault
    int attempt = 0;                    // JobComplete, IOFault
    std::string vm;                     // VMBootComplete, VMFail
    std::string mode;                   // VMFail: error | stop | reclaim
    std::string cloud;                  // CloudMaintenance
    bool flag = false;                  // CloudMaintenance: on
    std::string user;                   // CredentialRenewal
    Seconds lifetime = 0;               // CredentialRenewal
    Seconds boot_delay = 0;             // VMBootComplete (for the log)
    Seconds transfer = 0;               // VMBootComplete (for the log)

    bool operator<(const Event& other) const {
        if (time != other.time) return time < other.time;
        return seq < other.seq;
    }
};

/// The deterministic discrete-event engine. Owns the clock, the event queue
/// and all domain state; applies scheduler and matchmaker decisions; writes
/// the event log. Identical (scenario, seed) pairs produce byte-identical
/// logs.
class Engine {
public:
    explicit Engine(Scenario scenario,
                    std::optional<std::uint64_t> seed_override = std::nullopt);

    struct RunResult {
        SimTime end_time = 0;
        bool quiesced = false;
    };

    /// Executes until the horizon or quiescence (all jobs completed, no live
    /// instances, nothing pending but ticks). Callable once.
    RunResult run();

    // Scripted-disturbance injection; time must not precede the clock.
    void inject_vm_fail(SimTime time, const std::string& vm_id,
                        const std::string& mode = "stop");
    void inject_maintenance(SimTime time, const std::string& cloud, bool on);
    void inject_renewal(SimTime time, const std::string& user, Seconds lifetime = 43200);

    const EventLog& log() const { return log_; }
    const MetricsRecorder& metrics() const { return metrics_; }
    const Matchmaker& queue() const { return matchmaker_; }
    const InstanceTable& instances() const { return instances_; }
    const std::vector<CloudConnector>& clouds() const { return connectors_; }
    const ImageRepository& images() const { return images_; }
    const CredentialStore& credentials() const { return credentials_; }
    const Scenario& scenario() const { return scenario_; }
    SimTime now() const { return clock_; }
    std::uint64_t seed() const { return seed_; }

    /// Post-run summary document (counts, waits, efficiency, cloud dumps).
    nlohmann::ordered_json summary() const;

private:
    void schedule(Event ev);
    void dispatch(const Event& ev);

    void on_arrival(const Event& ev);
    void on_scheduler_tick(const Event& ev);
    void on_match_tick(const Event& ev);
    void on_boot_complete(const Event& ev);
    void on_job_complete(const Event& ev);
    void on_vm_fail(const Event& ev);
    void on_io_fault(const Event& ev);

    CloudConnector& connector(const std::string& name);
    void set_vm_state(VMInstance& vm, VmState to,
                      std::vector<EventLog::Field> extra = {});
    bool issue_boot(const BootRequest& req, bool deferred);
    void finalize_termination(const std::string& vm_id, const std::string& reason);
    void arm_io_fault(Job& job);
    void expose_cloud_jobs(const std::string& cloud);
    bool quiescent() const;
    void flush_samples_until(SimTime exclusive_end);

    Scenario scenario_;
    std::uint64_t seed_;
    Rng rng_;
    EventLog log_;
    Matchmaker matchmaker_;
    InstanceTable instances_;
    std::vector<CloudConnector> connectors_;
    ImageRepository images_;
    SoftwareCache software_;
    CredentialStore credentials_;
    MetricsRecorder metrics_;
    std::vector<JobSpec> workload_;
    std::map<std::string, BootRequest> deferred_;  // victim vm -> boot to issue

    std::set<Event> events_;
    std::uint64_t next_seq_ = 1;
    SimTime clock_ = 0;
    SimTime next_sample_ = 0;
    int cycle_ = 0;
    int arrivals_pending_ = 0;
    int faults_pending_ = 0;
    int live_instances_ = 0;
    int completed_jobs_ = 0;
    bool ran_ = false;
    RunResult result_;
};

}  // namespace stratus
