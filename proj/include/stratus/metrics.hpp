// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "stratus/connectors.hpp"
#include "stratus/instance_table.hpp"
#include "stratus/matchmaker.hpp"
#include "stratus/types.hpp"

namespace stratus {

/// One time-series point: global job counts plus per-cloud and per-user
/// instance counts, aligned with the name vectors the recorder was built
/// with.
struct Sample {
    SimTime time = 0;
    int running_jobs = 0;
    int idle_jobs = 0;
    std::vector<int> cloud_instances;
    std::vector<int> user_instances;
};

struct CompletionRecord {
    JobId job = 0;
    std::string owner;
    std::string cloud;
    Seconds cpu = 0;
    Seconds io = 0;
    Seconds stagein = 0;  // final attempt's stage-in
    Seconds wasted = 0;
    Seconds wait = 0;  // submission to first start
};

/// Append-only run recorder: periodic samples for the time-series CSV plus
/// per-completion records for efficiency and wait statistics.
class MetricsRecorder {
public:
    MetricsRecorder() = default;
    MetricsRecorder(std::vector<std::string> cloud_names,
                    std::vector<std::string> user_ids);

    void take_sample(SimTime now, const Matchmaker& queue, const InstanceTable& instances);
    void record_completion(const Job& job);
    void record_failed_attempt() { ++failed_attempts_; }

    /// cpu / (cpu + io + stage-in + wasted); 1.0 exactly when overheads are 0.
    static double efficiency(Seconds cpu, Seconds io, Seconds stagein, Seconds wasted);

    /// Σcpu over Σ(cpu + overheads) across completed jobs; 0 when none.
    double aggregate_efficiency() const;

    double mean_wait() const;
    Seconds p95_wait() const;

    const std::vector<Sample>& samples() const { return samples_; }
    const std::vector<CompletionRecord>& completions() const { return completions_; }
    int completed() const { return static_cast<int>(completions_.size()); }
    int failed_attempts() const { return failed_attempts_; }

    /// CSV: time,running_jobs,idle_jobs, one column per cloud, one per user.
    std::string samples_csv() const;
    void write_csv(const std::string& path) const;

    /// Run summary: counts, wait stats, aggregate efficiency, per-cloud
    /// completed-job shares, final job states and connector dumps.
    nlohmann::ordered_json summary(const Matchmaker& queue,
                                   const std::vector<CloudConnector>& clouds,
                                   const InstanceTable& instances) const;

private:
    std::vector<std::string> cloud_names_;
    std::vector<std::string> user_ids_;
    std::vector<Sample> samples_;
    std::vector<CompletionRecord> completions_;
    int failed_attempts_ = 0;
};

}  // namespace stratus
