// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "stratus/image_repo.hpp"
#include "stratus/instance_table.hpp"
#include "stratus/model.hpp"

namespace stratus {

/// Job fields supplied at submission; the queue assigns the id and state.
struct JobSpec {
    std::string owner;
    std::string vm_type;
    ResourceRequest request;
    SimTime submit_time = 0;
    Seconds runtime_cpu = 0;
    Seconds io_cost = 0;
    std::vector<JobId> depends_on;
    std::optional<std::set<std::string>> cloud_constraint;
};

/// The job queue and matchmaking engine. Jobs are kept strictly FIFO by
/// (submit_time, job_id); matching walks the queue in that order and places
/// each idle job on the first free slot of a running instance owned by the
/// same user with the same image type.
class Matchmaker {
public:
    struct Assignment {
        JobId job = 0;
        std::string vm_id;
        int slot = -1;
    };

    /// Adds a job to the queue. The job enters Idle, or Held when any parent
    /// has not completed yet. Throws UnknownImage when the image is not in
    /// the catalog at `now`, UnknownDependency for dangling parents.
    JobId submit(const JobSpec& spec, const ImageRepository& repo, SimTime now);

    /// One matchmaking pass. Assigned jobs move to Running and occupy their
    /// slot; the caller finishes the attempt bookkeeping (stage-in, planned
    /// wallclock). Retiring, error and terminated instances never receive
    /// assignments.
    std::vector<Assignment> match_cycle(InstanceTable& instances, SimTime now);

    struct DrainResult {
        bool terminated_now = false;  // no occupants, retire completed at once
    };

    /// Stops new jobs from starting on the instance and lets current ones
    /// finish. Throws InvalidState unless the instance is Running.
    DrainResult drain(const std::string& vm_id, InstanceTable& instances);

    /// Returns every job that was running on the lost instance to Idle at its
    /// original queue position, charging the interrupted attempt's accrued
    /// cpu-time to the job's wasted total. Slots are cleared.
    std::vector<JobId> reschedule_orphans(const std::string& lost_vm,
                                          InstanceTable& instances, SimTime now);

    /// Interrupts one running job (an I/O fault, for example): its slot
    /// frees, the accrued cpu-time is charged as wasted, and the job requeues
    /// at its original position. The instance keeps running.
    void interrupt(JobId id, InstanceTable& instances, SimTime now);

    /// Releases every Held job whose parents have all completed; released
    /// jobs become Idle with submit_time = now.
    std::vector<JobId> release_dag_children(JobId completed, SimTime now);

    /// Marks a running job completed and frees its slot.
    void complete(JobId job, InstanceTable& instances, SimTime now);

    Job* find(JobId id);
    const Job* find(JobId id) const;
    Job& at(JobId id);
    const Job& at(JobId id) const;

    /// FIFO iteration over all jobs (every state).
    void for_each_fifo(const std::function<void(const Job&)>& fn) const;

    std::map<JobState, int> counts_by_state() const;
    std::size_t total_submitted() const { return jobs_.size(); }
    bool all_completed() const;

    /// One JSON object per job, FIFO order.
    void dump_jsonl(std::ostream& out) const;

private:
    void reindex(JobId id, SimTime old_submit, SimTime new_submit);
    bool parents_completed(const Job& job) const;
    void requeue_interrupted(Job& job, SimTime now);

    std::map<JobId, Job> jobs_;
    std::set<std::pair<SimTime, JobId>> fifo_;
    JobId next_id_ = 1;
};

}  // namespace stratus
