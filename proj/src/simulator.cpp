// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#include "stratus/simulator.hpp"

#include "stratus/errors.hpp"

namespace stratus {

namespace {

EventLog::Field f(const char* key, const std::string& value) { return {key, value}; }
EventLog::Field f(const char* key, const char* value) { return {key, value}; }
EventLog::Field f(const char* key, std::int64_t value) {
    return {key, std::to_string(value)};
}
EventLog::Field f(const char* key, int value) { return {key, std::to_string(value)}; }
EventLog::Field f(const char* key, std::uint64_t value) {
    return {key, std::to_string(value)};
}
EventLog::Field f(const char* key, bool value) { return {key, value ? "1" : "0"}; }

}  // namespace

Engine::Engine(Scenario scenario, std::optional<std::uint64_t> seed_override)
    : scenario_(std::move(scenario)),
      seed_(seed_override.value_or(scenario_.seed)),
      rng_(seed_) {
    scenario_.validate();
    scenario_.seed = seed_;

    for (const ScenarioImage& entry : scenario_.images) images_.add(entry.image);
    for (const CloudSite& site : scenario_.clouds) connectors_.emplace_back(site);

    for (const UserSpec& user : scenario_.users) credentials_.set_proxy(user.credential);
    for (const CloudSite& site : scenario_.clouds) {
        if (site.auth_mode == AuthKind::SharedGroupKey) {
            Credential key;
            key.owner = "shared-group";
            key.issued_at = 0;
            key.lifetime = kMaxSimTime / 4;
            key.kind = AuthKind::SharedGroupKey;
            credentials_.set_group_key(key);
            break;
        }
    }

    software_ = SoftwareCache(
        {scenario_.software_cache.default_cold, scenario_.software_cache.default_warm});
    for (const auto& [vm_type, cost] : scenario_.software_cache.per_vm_type)
        software_.set_cost(vm_type, cost);

    std::vector<std::string> cloud_names, user_ids;
    for (const CloudSite& site : scenario_.clouds) cloud_names.push_back(site.name);
    for (const UserSpec& user : scenario_.users) user_ids.push_back(user.user_id);
    metrics_ = MetricsRecorder(std::move(cloud_names), std::move(user_ids));

    workload_ = scenario_.expand_workload(rng_);
    arrivals_pending_ = static_cast<int>(workload_.size());
    for (std::size_t i = 0; i < workload_.size(); ++i) {
        Event ev;
        ev.time = workload_[i].submit_time;
        ev.kind = EventKind::JobArrival;
        ev.arrival_index = i;
        schedule(std::move(ev));
    }

    for (SimTime t = 0; t <= scenario_.horizon; t += scenario_.scheduler.cycle_period) {
        Event ev;
        ev.time = t;
        ev.kind = EventKind::SchedulerTick;
        schedule(std::move(ev));
    }
    for (SimTime t = 0; t <= scenario_.horizon; t += scenario_.scheduler.match_period) {
        Event ev;
        ev.time = t;
        ev.kind = EventKind::MatchTick;
        schedule(std::move(ev));
    }

    for (const FaultSpec& fault : scenario_.faults) {
        Event ev;
        ev.time = fault.time;
        switch (fault.kind) {
            case FaultSpec::Kind::VmFail:
                ev.kind = EventKind::VMFail;
                ev.vm = fault.vm_id;
                ev.mode = fault.mode;
                break;
            case FaultSpec::Kind::CloudMaintenance:
                ev.kind = EventKind::CloudMaintenance;
                ev.cloud = fault.cloud;
                ev.flag = fault.on;
                break;
            case FaultSpec::Kind::CredentialRenewal:
                ev.kind = EventKind::CredentialRenewal;
                ev.user = fault.user;
                ev.lifetime = fault.lifetime;
                break;
        }
        ++faults_pending_;
        schedule(std::move(ev));
    }

    // The end marker sorts after every other horizon-time event, so work
    // landing exactly on the horizon still gets processed.
    Event end;
    end.time = scenario_.horizon;
    end.seq = UINT64_MAX;
    end.kind = EventKind::ScenarioEnd;
    events_.insert(std::move(end));
}

void Engine::schedule(Event ev) {
    ev.seq = next_seq_++;
    events_.insert(std::move(ev));
}

void Engine::inject_vm_fail(SimTime time, const std::string& vm_id,
                            const std::string& mode) {
    if (time < clock_) throw TimeInPast("vm_fail at " + std::to_string(time));
    Event ev;
    ev.time = time;
    ev.kind = EventKind::VMFail;
    ev.vm = vm_id;
    ev.mode = mode;
    ++faults_pending_;
    schedule(std::move(ev));
}

void Engine::inject_maintenance(SimTime time, const std::string& cloud, bool on) {
    if (time < clock_) throw TimeInPast("cloud_maintenance at " + std::to_string(time));
    Event ev;
    ev.time = time;
    ev.kind = EventKind::CloudMaintenance;
    ev.cloud = cloud;
    ev.flag = on;
    ++faults_pending_;
    schedule(std::move(ev));
}

void Engine::inject_renewal(SimTime time, const std::string& user, Seconds lifetime) {
    if (time < clock_) throw TimeInPast("credential_renewal at " + std::to_string(time));
    Event ev;
    ev.time = time;
    ev.kind = EventKind::CredentialRenewal;
    ev.user = user;
    ev.lifetime = lifetime;
    ++faults_pending_;
    schedule(std::move(ev));
}

Engine::RunResult Engine::run() {
    if (ran_) throw InvalidState("run() already executed");
    ran_ = true;

    log_.append(0, "RunStart", {f("scenario", scenario_.name), f("seed", seed_)});

    RunResult res;
    res.end_time = scenario_.horizon;
    while (!events_.empty()) {
        const Event ev = *events_.begin();
        events_.erase(events_.begin());
        flush_samples_until(ev.time);
        clock_ = ev.time;

        if (ev.kind == EventKind::ScenarioEnd) {
            res.end_time = clock_;
            log_.append(clock_, "ScenarioEnd",
                        {f("completed", completed_jobs_), f("quiesced", false)});
            break;
        }
        dispatch(ev);
        if (quiescent()) {
            res.end_time = clock_;
            res.quiesced = true;
            log_.append(clock_, "ScenarioEnd",
                        {f("completed", completed_jobs_), f("quiesced", true)});
            break;
        }
    }
    // Keep sampling through the horizon so the series always spans the
    // configured window, even after an early quiescence.
    flush_samples_until(scenario_.horizon + 1);
    result_ = res;
    return res;
}

void Engine::flush_samples_until(SimTime exclusive_end) {
    while (next_sample_ < exclusive_end && next_sample_ <= scenario_.horizon) {
        metrics_.take_sample(next_sample_, matchmaker_, instances_);
        next_sample_ += scenario_.sample_period;
    }
}

bool Engine::quiescent() const {
    return arrivals_pending_ == 0 && faults_pending_ == 0 &&
           completed_jobs_ == static_cast<int>(workload_.size()) && live_instances_ == 0;
}

void Engine::dispatch(const Event& ev) {
    switch (ev.kind) {
        case EventKind::JobArrival:
            on_arrival(ev);
            break;
        case EventKind::SchedulerTick:
            on_scheduler_tick(ev);
            break;
        case EventKind::MatchTick:
            on_match_tick(ev);
            break;
        case EventKind::VMBootComplete:
            on_boot_complete(ev);
            break;
        case EventKind::JobComplete:
            on_job_complete(ev);
            break;
        case EventKind::VMFail:
            if (ev.mode != "reclaim") --faults_pending_;
            on_vm_fail(ev);
            break;
        case EventKind::IOFault:
            on_io_fault(ev);
            break;
        case EventKind::CloudMaintenance:
            --faults_pending_;
            connector(ev.cloud).set_maintenance(ev.flag);
            log_.append(clock_, "CloudMaintenance", {f("cloud", ev.cloud), f("on", ev.flag)});
            break;
        case EventKind::CredentialRenewal: {
            --faults_pending_;
            credentials_.renew_proxy(ev.user, clock_, ev.lifetime);
            const Credential* cred = credentials_.proxy(ev.user);
            log_.append(clock_, "CredentialRenewed",
                        {f("user", ev.user), f("expiry", cred->expiry())});
            break;
        }
        case EventKind::ScenarioEnd:
            break;  // handled in run()
    }
}

CloudConnector& Engine::connector(const std::string& name) {
    for (CloudConnector& conn : connectors_)
        if (conn.name() == name) return conn;
    throw Error("unknown cloud: " + name);
}

void Engine::set_vm_state(VMInstance& vm, VmState to, std::vector<EventLog::Field> extra) {
    if (!vm_transition_allowed(vm.state, to)) {
        throw InvalidState("illegal transition " + to_string(vm.state) + " -> " +
                           to_string(to) + " on " + vm.vm_id);
    }
    std::vector<EventLog::Field> fields = {f("vm", vm.vm_id), f("from", to_string(vm.state)),
                                           f("to", to_string(to))};
    fields.insert(fields.end(), extra.begin(), extra.end());
    vm.state = to;
    log_.append(clock_, "VMState", fields);
}

void Engine::on_arrival(const Event& ev) {
    const JobSpec& spec = workload_[ev.arrival_index];
    const JobId id = matchmaker_.submit(spec, images_, clock_);
    --arrivals_pending_;
    log_.append(clock_, "JobSubmitted",
                {f("job", id), f("user", spec.owner), f("vm_type", spec.vm_type),
                 f("state", to_string(matchmaker_.at(id).state))});
}

void Engine::on_scheduler_tick(const Event&) {
    ++cycle_;
    log_.append(clock_, "SchedulerTick", {f("cycle", cycle_)});

    std::vector<BootRequest> deferred_view;
    for (const auto& [vm, req] : deferred_) deferred_view.push_back(req);
    SystemView view;
    view.now = clock_;
    view.queue = &matchmaker_;
    view.instances = &instances_;
    view.clouds = &connectors_;
    view.images = &images_;
    view.credentials = &credentials_;
    view.deferred_boots = &deferred_view;
    view.config = &scenario_.scheduler;

    for (const SweepItem& item : lifecycle_sweep(view)) {
        VMInstance* vm = instances_.find(item.vm_id);
        if (vm == nullptr || vm->terminated()) continue;
        if (item.action == SweepAction::Kill) {
            finalize_termination(item.vm_id, item.reason);
        } else if (vm->state == VmState::Running) {
            const Matchmaker::DrainResult drained = matchmaker_.drain(item.vm_id, instances_);
            log_.append(clock_, "VMState",
                        {f("vm", item.vm_id), f("from", to_string(VmState::Running)),
                         f("to", to_string(VmState::Retiring)), f("reason", item.reason)});
            if (drained.terminated_now) finalize_termination(item.vm_id, "drained");
        }
    }

    deferred_view.clear();
    for (const auto& [vm, req] : deferred_) deferred_view.push_back(req);
    const CycleDecision decision = run_scheduling_cycle(view);
    for (const BootRequest& req : decision.boots) issue_boot(req, false);

    if (decision.rebalance) {
        const RebalanceDecision& rb = *decision.rebalance;
        VMInstance* victim = instances_.find(rb.victim_vm);
        if (victim != nullptr && victim->state == VmState::Running) {
            log_.append(clock_, "Rebalance",
                        {f("cycle", cycle_), f("heavy", rb.victim_owner),
                         f("victim", rb.victim_vm), f("starved", rb.starved_user)});
            const Matchmaker::DrainResult drained = matchmaker_.drain(rb.victim_vm, instances_);
            log_.append(clock_, "VMState",
                        {f("vm", rb.victim_vm), f("from", to_string(VmState::Running)),
                         f("to", to_string(VmState::Retiring)), f("reason", "rebalance")});
            deferred_[rb.victim_vm] = rb.deferred_boot;
            if (drained.terminated_now) finalize_termination(rb.victim_vm, "drained");
        }
    }
}

bool Engine::issue_boot(const BootRequest& req, bool deferred) {
    CloudConnector& conn = connector(req.target_cloud);
    std::vector<EventLog::Field> fields = {
        f("cycle", cycle_),        f("user", req.owner),
        f("image", req.image),     f("cloud", req.target_cloud),
        f("cores", req.request.cores), f("deferred", deferred)};
    try {
        const Credential* cred = credentials_.credential_for(conn.site(), req.owner);
        const VMImage* image = images_.lookup(req.image, clock_);
        if (cred == nullptr || image == nullptr) throw BootError("boot precondition lost");
        if (conn.site().auth_mode == AuthKind::PerUserProxy &&
            cred->expiry() - clock_ <= scenario_.scheduler.proxy_expiry_margin)
            throw BootError("proxy inside the expiry margin");
        Job probe;
        probe.owner = req.owner;
        probe.vm_type = req.image;
        probe.request = req.request;
        const Validation check =
            validate_boot_parameters(probe, conn.site(), *image, *cred, clock_);
        if (!check.ok()) throw BootError(check.describe());

        const bool was_over = conn.over_committed_scratch();
        const CloudConnector::BootOutcome outcome =
            conn.boot(req, images_, *cred, clock_, instances_);
        ++live_instances_;

        log_.append(clock_, "BootRequested", fields);
        VMInstance& vm = instances_.at(outcome.vm_id);
        log_.append(clock_, "VMState",
                    {f("vm", vm.vm_id), f("to", to_string(VmState::Requested)),
                     f("owner", vm.owner), f("image", vm.image), f("cloud", vm.cloud),
                     f("cores", vm.slots), f("scratch", vm.blank_space_gb)});
        log_.append(clock_, "VMState",
                    {f("vm", vm.vm_id), f("from", to_string(VmState::Requested)),
                     f("to", to_string(VmState::Booting))});

        Event boot_done;
        boot_done.time = outcome.running_at;
        boot_done.kind = EventKind::VMBootComplete;
        boot_done.vm = outcome.vm_id;
        boot_done.boot_delay = conn.site().boot_fixed_delay;
        boot_done.transfer = outcome.transfer_time;
        schedule(std::move(boot_done));

        if (vm.lifetime_limit) {
            Event reclaim;
            reclaim.time = vm.booted_at + *vm.lifetime_limit;
            reclaim.kind = EventKind::VMFail;
            reclaim.vm = vm.vm_id;
            reclaim.mode = "reclaim";
            schedule(std::move(reclaim));
        }

        if (!was_over && conn.over_committed_scratch()) expose_cloud_jobs(req.target_cloud);
        return true;
    } catch (const Error&) {
        if (!deferred) throw;  // cycle boots were validated against a live snapshot
        fields.push_back(f("result", "rejected"));
        log_.append(clock_, "BootRequested", fields);
        return false;
    }
}

void Engine::finalize_termination(const std::string& vm_id, const std::string& reason) {
    VMInstance& vm = instances_.at(vm_id);
    const VmState prior = vm.state;
    connector(vm.cloud).terminate(vm_id, instances_);
    --live_instances_;
    log_.append(clock_, "VMState",
                {f("vm", vm_id), f("from", to_string(prior)),
                 f("to", to_string(VmState::Terminated)), f("reason", reason)});

    for (JobId id : matchmaker_.reschedule_orphans(vm_id, instances_, clock_)) {
        const Job& job = matchmaker_.at(id);
        log_.append(clock_, "JobState",
                    {f("job", id), f("from", to_string(JobState::Running)),
                     f("to", to_string(JobState::Idle)), f("reason", "orphaned"),
                     f("wasted", job.wasted)});
        metrics_.record_failed_attempt();
    }

    auto it = deferred_.find(vm_id);
    if (it != deferred_.end()) {
        const BootRequest req = it->second;
        deferred_.erase(it);
        bool wanted = false;
        matchmaker_.for_each_fifo([&](const Job& job) {
            if (wanted || job.owner != req.owner || job.vm_type != req.image) return;
            if (job.state == JobState::Idle && job.allows_cloud(req.target_cloud))
                wanted = true;
        });
        if (wanted) issue_boot(req, true);
    }
}

void Engine::on_match_tick(const Event&) {
    const auto assignments = matchmaker_.match_cycle(instances_, clock_);
    if (assignments.empty()) return;
    log_.append(clock_, "MatchTick", {f("assigned", static_cast<int>(assignments.size()))});

    for (const Matchmaker::Assignment& a : assignments) {
        Job& job = matchmaker_.at(a.job);
        job.attempt_stagein = software_.consume(a.vm_id, job.vm_type);
        job.attempt_wall = job.attempt_stagein + job.runtime_cpu + job.io_cost;

        Event done;
        done.time = clock_ + job.attempt_wall;
        done.kind = EventKind::JobComplete;
        done.job = a.job;
        done.attempt = job.attempt;
        schedule(std::move(done));

        log_.append(clock_, "JobState",
                    {f("job", a.job), f("from", to_string(JobState::Idle)),
                     f("to", to_string(JobState::Running)), f("vm", a.vm_id),
                     f("slot", a.slot), f("stagein", job.attempt_stagein)});

        const VMInstance& vm = instances_.at(a.vm_id);
        if (connector(vm.cloud).over_committed_scratch()) arm_io_fault(job);
    }
}

void Engine::arm_io_fault(Job& job) {
    const double rate = scenario_.io_fault_rate_per_hour;
    if (rate <= 0.0) return;
    if (job.exposure_epoch == job.attempt) return;  // already drawn for this attempt
    job.exposure_epoch = job.attempt;
    const std::int64_t hours = rng_.geometric_periods(rate);
    if (hours > scenario_.horizon) return;  // cannot land inside the run
    Event ev;
    ev.time = clock_ + hours * 3600;
    ev.kind = EventKind::IOFault;
    ev.job = job.job_id;
    ev.attempt = job.attempt;
    schedule(std::move(ev));
}

void Engine::expose_cloud_jobs(const std::string& cloud) {
    instances_.for_each([&](const VMInstance& vm) {
        if (vm.cloud != cloud) return;
        if (vm.state != VmState::Running && vm.state != VmState::Retiring) return;
        for (const auto& slot : vm.slot_occupancy) {
            if (!slot) continue;
            Job* job = matchmaker_.find(*slot);
            if (job != nullptr && job->state == JobState::Running) arm_io_fault(*job);
        }
    });
}

void Engine::on_boot_complete(const Event& ev) {
    VMInstance* vm = instances_.find(ev.vm);
    if (vm == nullptr || vm->state != VmState::Booting) return;  // killed during boot
    set_vm_state(*vm, VmState::Running,
                 {f("boot_delay", ev.boot_delay), f("transfer", ev.transfer)});
    images_.mark_cached(vm->image, vm->cloud);
}

void Engine::on_job_complete(const Event& ev) {
    Job* job = matchmaker_.find(ev.job);
    if (job == nullptr || job->state != JobState::Running || job->attempt != ev.attempt)
        return;  // superseded attempt
    VMInstance& vm = instances_.at(job->attempt_vm);
    if (vm.state != VmState::Running && vm.state != VmState::Retiring)
        return;  // host is gone; the kill path will requeue the job

    const std::string vm_id = job->attempt_vm;
    matchmaker_.complete(ev.job, instances_, clock_);
    ++completed_jobs_;
    metrics_.record_completion(*job);
    log_.append(clock_, "JobState",
                {f("job", ev.job), f("from", to_string(JobState::Running)),
                 f("to", to_string(JobState::Completed)), f("cloud", vm.cloud)});

    for (JobId released : matchmaker_.release_dag_children(ev.job, clock_)) {
        log_.append(clock_, "JobState",
                    {f("job", released), f("from", to_string(JobState::Held)),
                     f("to", to_string(JobState::Idle)), f("reason", "released")});
    }

    if (vm.state == VmState::Retiring && vm.occupied_slots() == 0)
        finalize_termination(vm_id, "drained");
}

void Engine::on_vm_fail(const Event& ev) {
    VMInstance* vm = instances_.find(ev.vm);
    if (vm == nullptr || vm->terminated()) return;

    if (ev.mode == "stop") {
        finalize_termination(ev.vm, "admin-stop");
        return;
    }
    if (ev.mode == "reclaim") {
        finalize_termination(ev.vm, "lifetime-reclaim");
        return;
    }

    // Cloud-reported error. Progress stops now; the next lifecycle sweep
    // kills the instance and requeues its jobs.
    for (const auto& slot : vm->slot_occupancy) {
        if (!slot) continue;
        Job* job = matchmaker_.find(*slot);
        if (job != nullptr && job->state == JobState::Running) job->interrupted_at = clock_;
    }
    if (vm->state == VmState::Retiring) {
        // The lifecycle has no Retiring -> Error edge; a dying drain goes
        // straight to Terminated.
        finalize_termination(ev.vm, "error");
        return;
    }
    set_vm_state(*vm, VmState::Error, {f("reason", "cloud-error")});
}

void Engine::on_io_fault(const Event& ev) {
    Job* job = matchmaker_.find(ev.job);
    if (job == nullptr || job->state != JobState::Running || job->attempt != ev.attempt)
        return;
    VMInstance* vm = instances_.find(job->attempt_vm);
    if (vm == nullptr ||
        (vm->state != VmState::Running && vm->state != VmState::Retiring))
        return;
    if (!connector(vm->cloud).over_committed_scratch()) return;  // hazard passed

    const std::string vm_id = vm->vm_id;
    const std::string cloud = vm->cloud;
    matchmaker_.interrupt(ev.job, instances_, clock_);
    log_.append(clock_, "IOFault", {f("job", ev.job), f("vm", vm_id), f("cloud", cloud)});
    log_.append(clock_, "JobState",
                {f("job", ev.job), f("from", to_string(JobState::Running)),
                 f("to", to_string(JobState::Idle)), f("reason", "io-fault"),
                 f("wasted", job->wasted)});
    metrics_.record_failed_attempt();

    if (vm->state == VmState::Retiring && vm->occupied_slots() == 0)
        finalize_termination(vm_id, "drained");
}

nlohmann::ordered_json Engine::summary() const {
    nlohmann::ordered_json doc;
    doc["scenario"] = scenario_.name;
    doc["seed"] = seed_;
    doc["end_time"] = result_.end_time;
    doc["quiesced"] = result_.quiesced;
    const nlohmann::ordered_json stats = metrics_.summary(matchmaker_, connectors_, instances_);
    for (const auto& [key, value] : stats.items()) doc[key] = value;
    return doc;
}

}  // namespace stratus
