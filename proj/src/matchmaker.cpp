// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#include "stratus/matchmaker.hpp"

#include <cassert>
#include <ostream>

#include <json.hpp>

#include "stratus/errors.hpp"

namespace stratus {

JobId Matchmaker::submit(const JobSpec& spec, const ImageRepository& repo, SimTime now) {
    if (repo.lookup(spec.vm_type, now) == nullptr) throw UnknownImage(spec.vm_type);
    for (JobId dep : spec.depends_on) {
        if (jobs_.count(dep) == 0) throw UnknownDependency("job " + std::to_string(dep));
    }

    Job job;
    job.job_id = next_id_++;
    job.owner = spec.owner;
    job.vm_type = spec.vm_type;
    job.request = spec.request;
    job.submit_time = spec.submit_time;
    job.runtime_cpu = spec.runtime_cpu;
    job.io_cost = spec.io_cost;
    job.depends_on = spec.depends_on;
    job.cloud_constraint = spec.cloud_constraint;
    job.state = parents_completed(job) ? JobState::Idle : JobState::Held;

    fifo_.emplace(job.submit_time, job.job_id);
    const JobId id = job.job_id;
    jobs_.emplace(id, std::move(job));
    return id;
}

std::vector<Matchmaker::Assignment> Matchmaker::match_cycle(InstanceTable& instances,
                                                            SimTime now) {
    std::vector<Assignment> out;
    for (const auto& [submit, id] : fifo_) {
        Job& job = jobs_.at(id);
        if (job.state != JobState::Idle) continue;

        // First fit over instances in creation order.
        for (const auto& vm_id : instances.creation_order()) {
            VMInstance& vm = instances.at(vm_id);
            if (!vm.accepts_jobs()) continue;
            if (vm.owner != job.owner || vm.image != job.vm_type) continue;
            if (!job.allows_cloud(vm.cloud)) continue;
            auto slot = vm.first_free_slot();
            if (!slot) continue;

            vm.slot_occupancy[*slot] = job.job_id;
            assert(job_transition_allowed(job.state, JobState::Running));
            job.state = JobState::Running;
            job.attempt += 1;
            job.attempt_start = now;
            job.attempt_vm = vm.vm_id;
            job.attempt_slot = *slot;
            job.interrupted_at = -1;
            if (job.first_start < 0) job.first_start = now;
            out.push_back({job.job_id, vm.vm_id, *slot});
            break;
        }
    }
    return out;
}

Matchmaker::DrainResult Matchmaker::drain(const std::string& vm_id,
                                          InstanceTable& instances) {
    VMInstance& vm = instances.at(vm_id);
    if (vm.state != VmState::Running) {
        throw InvalidState("drain: " + vm_id + " is " + to_string(vm.state));
    }
    vm.state = VmState::Retiring;
    return {vm.occupied_slots() == 0};
}

std::vector<JobId> Matchmaker::reschedule_orphans(const std::string& lost_vm,
                                                  InstanceTable& instances, SimTime now) {
    VMInstance& vm = instances.at(lost_vm);
    std::vector<JobId> orphans;
    for (auto& slot : vm.slot_occupancy) {
        if (!slot) continue;
        Job& job = jobs_.at(*slot);
        slot.reset();
        if (job.state != JobState::Running || job.attempt_vm != lost_vm) continue;
        requeue_interrupted(job, now);
        orphans.push_back(job.job_id);
    }
    return orphans;
}

void Matchmaker::interrupt(JobId id, InstanceTable& instances, SimTime now) {
    Job& job = at(id);
    if (job.state != JobState::Running) {
        throw InvalidState("interrupt: job " + std::to_string(id) + " not running");
    }
    VMInstance& vm = instances.at(job.attempt_vm);
    vm.slot_occupancy[job.attempt_slot].reset();
    requeue_interrupted(job, now);
}

void Matchmaker::requeue_interrupted(Job& job, SimTime now) {
    // Progress stopped when the host errored, otherwise now.
    const SimTime stop = job.interrupted_at >= 0 ? job.interrupted_at : now;
    const Seconds elapsed = stop - job.attempt_start;
    if (job.attempt_wall > 0 && elapsed > 0) {
        job.wasted += elapsed * job.runtime_cpu / job.attempt_wall;
    }
    job.state = JobState::Idle;  // original submit_time keeps its queue slot
    job.attempt_vm.clear();
    job.attempt_slot = -1;
    job.interrupted_at = -1;
}

std::vector<JobId> Matchmaker::release_dag_children(JobId completed, SimTime now) {
    const Job& done = at(completed);
    if (done.state != JobState::Completed) {
        throw InvalidState("release_dag_children: job " + std::to_string(completed) +
                           " not completed");
    }
    std::vector<JobId> released;
    // Snapshot the scan order: releasing mutates the index.
    std::vector<JobId> held;
    for (const auto& [submit, id] : fifo_) {
        if (jobs_.at(id).state == JobState::Held) held.push_back(id);
    }
    for (JobId id : held) {
        Job& job = jobs_.at(id);
        if (!parents_completed(job)) continue;
        const SimTime old_submit = job.submit_time;
        job.state = JobState::Idle;
        job.submit_time = now;
        reindex(id, old_submit, now);
        released.push_back(id);
    }
    return released;
}

void Matchmaker::complete(JobId id, InstanceTable& instances, SimTime now) {
    Job& job = at(id);
    if (job.state != JobState::Running) {
        throw InvalidState("complete: job " + std::to_string(id) + " not running");
    }
    VMInstance& vm = instances.at(job.attempt_vm);
    vm.slot_occupancy[job.attempt_slot].reset();
    job.state = JobState::Completed;
    job.completed_at = now;
    job.completed_on_cloud = vm.cloud;
    job.attempt_slot = -1;
}

Job* Matchmaker::find(JobId id) {
    auto it = jobs_.find(id);
    return it == jobs_.end() ? nullptr : &it->second;
}

const Job* Matchmaker::find(JobId id) const {
    auto it = jobs_.find(id);
    return it == jobs_.end() ? nullptr : &it->second;
}

Job& Matchmaker::at(JobId id) {
    Job* j = find(id);
    if (j == nullptr) throw Error("unknown job: " + std::to_string(id));
    return *j;
}

const Job& Matchmaker::at(JobId id) const {
    const Job* j = find(id);
    if (j == nullptr) throw Error("unknown job: " + std::to_string(id));
    return *j;
}

void Matchmaker::for_each_fifo(const std::function<void(const Job&)>& fn) const {
    for (const auto& [submit, id] : fifo_) fn(jobs_.at(id));
}

std::map<JobState, int> Matchmaker::counts_by_state() const {
    std::map<JobState, int> counts;
    for (const auto& [id, job] : jobs_) counts[job.state] += 1;
    return counts;
}

bool Matchmaker::all_completed() const {
    for (const auto& [id, job] : jobs_) {
        if (job.state != JobState::Completed) return false;
    }
    return true;
}

void Matchmaker::dump_jsonl(std::ostream& out) const {
    for_each_fifo([&](const Job& job) {
        nlohmann::ordered_json j;
        j["job_id"] = job.job_id;
        j["owner"] = job.owner;
        j["vm_type"] = job.vm_type;
        nlohmann::ordered_json req;
        req["cores"] = job.request.cores;
        req["memory_mb"] = job.request.memory_mb;
        req["arch"] = job.request.arch;
        req["blank_space_gb"] = job.request.blank_space_gb;
        if (job.request.instance_type) req["instance_type"] = *job.request.instance_type;
        j["request"] = req;
        j["submit_time"] = job.submit_time;
        j["runtime_cpu"] = job.runtime_cpu;
        j["io_cost"] = job.io_cost;
        j["state"] = to_string(job.state);
        j["depends_on"] = job.depends_on;
        if (job.cloud_constraint) j["cloud_constraint"] = *job.cloud_constraint;
        out << j.dump() << '\n';
    });
}

void Matchmaker::reindex(JobId id, SimTime old_submit, SimTime new_submit) {
    fifo_.erase({old_submit, id});
    fifo_.emplace(new_submit, id);
}

bool Matchmaker::parents_completed(const Job& job) const {
    for (JobId dep : job.depends_on) {
        auto it = jobs_.find(dep);
        if (it == jobs_.end() || it->second.state != JobState::Completed) return false;
    }
    return true;
}

}  // namespace stratus
