// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#include "stratus/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "stratus/errors.hpp"

namespace stratus {

MetricsRecorder::MetricsRecorder(std::vector<std::string> cloud_names,
                                 std::vector<std::string> user_ids)
    : cloud_names_(std::move(cloud_names)), user_ids_(std::move(user_ids)) {}

void MetricsRecorder::take_sample(SimTime now, const Matchmaker& queue,
                                  const InstanceTable& instances) {
    Sample s;
    s.time = now;
    const auto counts = queue.counts_by_state();
    if (auto it = counts.find(JobState::Running); it != counts.end())
        s.running_jobs = it->second;
    if (auto it = counts.find(JobState::Idle); it != counts.end())
        s.idle_jobs = it->second;

    s.cloud_instances.assign(cloud_names_.size(), 0);
    s.user_instances.assign(user_ids_.size(), 0);
    instances.for_each([&](const VMInstance& vm) {
        if (vm.terminated()) return;
        for (std::size_t i = 0; i < cloud_names_.size(); ++i)
            if (cloud_names_[i] == vm.cloud) ++s.cloud_instances[i];
        for (std::size_t i = 0; i < user_ids_.size(); ++i)
            if (user_ids_[i] == vm.owner) ++s.user_instances[i];
    });
    samples_.push_back(std::move(s));
}

void MetricsRecorder::record_completion(const Job& job) {
    CompletionRecord rec;
    rec.job = job.job_id;
    rec.owner = job.owner;
    rec.cloud = job.completed_on_cloud;
    rec.cpu = job.runtime_cpu;
    rec.io = job.io_cost;
    rec.stagein = job.attempt_stagein;
    rec.wasted = job.wasted;
    rec.wait = job.first_start - job.submit_time;
    completions_.push_back(std::move(rec));
}

double MetricsRecorder::efficiency(Seconds cpu, Seconds io, Seconds stagein,
                                   Seconds wasted) {
    const Seconds denom = cpu + io + stagein + wasted;
    if (denom <= 0) return 0.0;
    return static_cast<double>(cpu) / static_cast<double>(denom);
}

double MetricsRecorder::aggregate_efficiency() const {
    long double cpu = 0, denom = 0;
    for (const CompletionRecord& rec : completions_) {
        cpu += static_cast<long double>(rec.cpu);
        denom += static_cast<long double>(rec.cpu + rec.io + rec.stagein + rec.wasted);
    }
    if (denom <= 0) return 0.0;
    return static_cast<double>(cpu / denom);
}

double MetricsRecorder::mean_wait() const {
    if (completions_.empty()) return 0.0;
    long double sum = 0;
    for (const CompletionRecord& rec : completions_) sum += rec.wait;
    return static_cast<double>(sum / completions_.size());
}

Seconds MetricsRecorder::p95_wait() const {
    if (completions_.empty()) return 0;
    std::vector<Seconds> waits;
    waits.reserve(completions_.size());
    for (const CompletionRecord& rec : completions_) waits.push_back(rec.wait);
    std::sort(waits.begin(), waits.end());
    const std::size_t n = waits.size();
    const std::size_t rank =
        static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
    return waits[rank == 0 ? 0 : rank - 1];
}

std::string MetricsRecorder::samples_csv() const {
    std::string out = "time,running_jobs,idle_jobs";
    for (const std::string& name : cloud_names_) out += ",cloud_" + name;
    for (const std::string& id : user_ids_) out += ",user_" + id;
    out += '\n';
    for (const Sample& s : samples_) {
        out += std::to_string(s.time);
        out += ',' + std::to_string(s.running_jobs);
        out += ',' + std::to_string(s.idle_jobs);
        for (int n : s.cloud_instances) out += ',' + std::to_string(n);
        for (int n : s.user_instances) out += ',' + std::to_string(n);
        out += '\n';
    }
    return out;
}

void MetricsRecorder::write_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << samples_csv();
    if (!out) throw IoError("short write to " + path);
}

nlohmann::ordered_json MetricsRecorder::summary(
    const Matchmaker& queue, const std::vector<CloudConnector>& clouds,
    const InstanceTable& instances) const {
    nlohmann::ordered_json doc;
    doc["completed"] = completed();
    doc["failed"] = failed_attempts_;
    doc["mean_queue_wait"] = mean_wait();
    doc["p95_queue_wait"] = p95_wait();
    doc["aggregate_efficiency"] = aggregate_efficiency();

    nlohmann::ordered_json per_cloud = nlohmann::ordered_json::object();
    for (const std::string& name : cloud_names_) {
        int n = 0;
        for (const CompletionRecord& rec : completions_)
            if (rec.cloud == name) ++n;
        per_cloud[name] = n;
    }
    doc["per_cloud_completed"] = std::move(per_cloud);

    nlohmann::ordered_json by_state = nlohmann::ordered_json::object();
    const auto counts = queue.counts_by_state();
    for (JobState st : {JobState::Idle, JobState::Running, JobState::Completed,
                        JobState::Held}) {
        auto it = counts.find(st);
        by_state[to_string(st)] = it == counts.end() ? 0 : it->second;
    }
    doc["jobs_by_state"] = std::move(by_state);

    doc["clouds"] = nlohmann::ordered_json::array();
    for (const CloudConnector& conn : clouds) doc["clouds"].push_back(conn.dump(instances));

    return doc;
}

}  // namespace stratus
