// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#include "stratus/matchmaker.hpp"

#include <sstream>
#include <vector>

#include <json.hpp>

#include "doctest.h"
#include "stratus/errors.hpp"
#include "stratus/rng.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace stratus;
using namespace stratus::testing;

namespace {

World small_world() {
    World w;
    w.add_cloud(make_site("east", CloudFamily::NimbusLike, Hypervisor::Kvm, 64));
    w.add_cloud(make_site("west", CloudFamily::NimbusLike, Hypervisor::Kvm, 64));
    w.add_image("img");
    w.add_image("alt");
    w.add_proxy("alice");
    w.add_proxy("bob");
    return w;
}

std::vector<Job> snapshot_jobs(const Matchmaker& queue) {
    std::vector<Job> jobs;
    queue.for_each_fifo([&](const Job& job) { jobs.push_back(job); });
    return jobs;
}

std::vector<VMInstance> snapshot_instances(const InstanceTable& table) {
    std::vector<VMInstance> out;
    table.for_each([&](const VMInstance& vm) { out.push_back(vm); });
    return out;
}

}  // namespace

TEST_CASE("submission validates image and dependencies") {
    World w = small_world();
    CHECK_THROWS_AS(w.submit(make_job("alice", "ghost")), UnknownImage);

    JobSpec child = make_job("alice", "img");
    child.depends_on = {42};
    CHECK_THROWS_AS(w.submit(child), UnknownDependency);

    const JobId parent = w.submit(make_job("alice", "img"));
    child.depends_on = {parent};
    const JobId id = w.submit(child);
    CHECK(w.queue.at(id).state == JobState::Held);
}

TEST_CASE("matching is FIFO by submit time then id") {
    World w = small_world();
    const JobId late = w.submit(make_job("alice", "img", 100));
    const JobId early = w.submit(make_job("alice", "img", 50));
    w.boot("alice", "img", "east", 1);

    const auto assigned = w.queue.match_cycle(w.instances, 200);
    REQUIRE(assigned.size() == 1);
    CHECK(assigned[0].job == early);
    CHECK(w.queue.at(late).state == JobState::Idle);
}

TEST_CASE("first fit walks instances in creation order") {
    World w = small_world();
    const std::string first = w.boot("alice", "img", "west", 2);
    const std::string second = w.boot("alice", "img", "east", 2);
    w.submit(make_job("alice", "img"));
    w.submit(make_job("alice", "img"));
    w.submit(make_job("alice", "img"));

    const auto assigned = w.queue.match_cycle(w.instances, 0);
    REQUIRE(assigned.size() == 3);
    CHECK(assigned[0].vm_id == first);
    CHECK(assigned[0].slot == 0);
    CHECK(assigned[1].vm_id == first);
    CHECK(assigned[1].slot == 1);
    CHECK(assigned[2].vm_id == second);
}

TEST_CASE("owner, image and constraint must all match") {
    World w = small_world();
    w.boot("bob", "img", "east", 1);    // wrong owner
    w.boot("alice", "alt", "east", 1);  // wrong image
    const std::string east = w.boot("alice", "img", "east", 1);
    w.boot("alice", "img", "west", 1);  // taken out by the constraint below

    JobSpec spec = make_job("alice", "img");
    spec.cloud_constraint = std::set<std::string>{"east"};
    const JobId id = w.submit(spec);

    const auto assigned = w.queue.match_cycle(w.instances, 0);
    REQUIRE(assigned.size() == 1);
    CHECK(assigned[0].job == id);
    CHECK(assigned[0].vm_id == east);
}

TEST_CASE("only running instances receive jobs") {
    World w = small_world();
    w.boot("alice", "img", "east", 1, VmState::Booting);
    w.boot("alice", "img", "east", 1, VmState::Retiring);
    w.boot("alice", "img", "east", 1, VmState::Error);
    w.submit(make_job("alice", "img"));
    CHECK(w.queue.match_cycle(w.instances, 0).empty());

    const std::string ok = w.boot("alice", "img", "east", 1, VmState::Running);
    const auto assigned = w.queue.match_cycle(w.instances, 0);
    REQUIRE(assigned.size() == 1);
    CHECK(assigned[0].vm_id == ok);
}

TEST_CASE("matching agrees with the brute-force oracle on random fixtures") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        CAPTURE(seed);
        Rng rng(seed);
        World w = small_world();

        const std::vector<std::string> owners = {"alice", "bob"};
        const std::vector<std::string> types = {"img", "alt"};
        const std::vector<VmState> states = {VmState::Running, VmState::Running,
                                             VmState::Booting, VmState::Retiring};

        const int vm_count = static_cast<int>(rng.uniform_int(1, 6));
        for (int i = 0; i < vm_count; ++i) {
            const std::string id = w.boot(
                owners[rng.uniform_int(0, 1)], types[rng.uniform_int(0, 1)],
                rng.uniform_int(0, 1) ? "east" : "west",
                static_cast<int>(rng.uniform_int(1, 3)),
                states[static_cast<std::size_t>(rng.uniform_int(0, 3))]);
            // Pre-occupy a random prefix of the slots with fake job ids.
            VMInstance& vm = w.instances.at(id);
            const int busy = static_cast<int>(rng.uniform_int(0, vm.slots));
            for (int s = 0; s < busy; ++s) vm.slot_occupancy[s] = 1000 + s;
        }
        const int job_count = static_cast<int>(rng.uniform_int(0, 10));
        for (int i = 0; i < job_count; ++i) {
            JobSpec spec = make_job(owners[rng.uniform_int(0, 1)],
                                    types[rng.uniform_int(0, 1)],
                                    rng.uniform_int(0, 500));
            if (rng.uniform_int(0, 3) == 0)
                spec.cloud_constraint = std::set<std::string>{"east"};
            w.submit(spec);
        }

        const auto expected = oracle_match(snapshot_jobs(w.queue),
                                           snapshot_instances(w.instances));
        const auto actual = w.queue.match_cycle(w.instances, 600);
        REQUIRE(actual.size() == expected.size());
        for (std::size_t i = 0; i < actual.size(); ++i) {
            CHECK(actual[i].job == expected[i].job);
            CHECK(actual[i].vm_id == expected[i].vm_id);
            CHECK(actual[i].slot == expected[i].slot);
        }
    }
}

TEST_CASE("assignment fills attempt bookkeeping") {
    World w = small_world();
    const std::string vm = w.boot("alice", "img", "east", 1);
    const JobId id = w.submit(make_job("alice", "img", 0));
    w.queue.match_cycle(w.instances, 120);

    const Job& job = w.queue.at(id);
    CHECK(job.state == JobState::Running);
    CHECK(job.attempt == 1);
    CHECK(job.attempt_start == 120);
    CHECK(job.attempt_vm == vm);
    CHECK(job.attempt_slot == 0);
    CHECK(job.first_start == 120);
}

TEST_CASE("drain retires an instance and reports immediate termination") {
    World w = small_world();
    const std::string busy = w.boot("alice", "img", "east", 1);
    w.submit(make_job("alice", "img"));
    w.queue.match_cycle(w.instances, 0);

    CHECK(!w.queue.drain(busy, w.instances).terminated_now);
    CHECK(w.instances.at(busy).state == VmState::Retiring);
    CHECK_THROWS_AS(w.queue.drain(busy, w.instances), InvalidState);  // not Running

    const std::string idle = w.boot("alice", "img", "east", 1);
    CHECK(w.queue.drain(idle, w.instances).terminated_now);
}

TEST_CASE("interrupt requeues at the original position and charges cpu share") {
    World w = small_world();
    w.boot("alice", "img", "east", 1);
    const JobId id = w.submit(make_job("alice", "img", 0, 3600, 100));
    const JobId later = w.submit(make_job("alice", "img", 10));

    w.queue.match_cycle(w.instances, 0);
    Job& job = w.queue.at(id);
    job.attempt_stagein = 300;
    job.attempt_wall = 300 + 3600 + 100;  // stage-in + cpu + io

    w.queue.interrupt(id, w.instances, 1000);
    CHECK(job.state == JobState::Idle);
    CHECK(job.attempt_vm.empty());
    // 1000 elapsed of 4000 planned: a quarter of the cpu time is lost.
    CHECK(job.wasted == 900);
    CHECK(job.submit_time == 0);  // keeps its queue slot

    // Next cycle the interrupted job goes first again.
    const auto assigned = w.queue.match_cycle(w.instances, 1000);
    REQUIRE(assigned.size() == 1);
    CHECK(assigned[0].job == id);
    CHECK(w.queue.at(id).attempt == 2);
    CHECK(w.queue.at(later).state == JobState::Idle);
}

TEST_CASE("orphans from a lost host use the frozen progress time") {
    World w = small_world();
    const std::string vm = w.boot("alice", "img", "east", 2);
    const JobId a = w.submit(make_job("alice", "img", 0, 1000));
    const JobId b = w.submit(make_job("alice", "img", 0, 1000));
    w.queue.match_cycle(w.instances, 0);
    for (JobId id : {a, b}) w.queue.at(id).attempt_wall = 1000;

    // The host errored at t=600; the kill lands at t=900.
    w.queue.at(a).interrupted_at = 600;
    w.queue.at(b).interrupted_at = 600;
    w.instances.at(vm).state = VmState::Error;

    const auto orphans = w.queue.reschedule_orphans(vm, w.instances, 900);
    CHECK(orphans == std::vector<JobId>{a, b});
    CHECK(w.queue.at(a).wasted == 600);  // progress stopped at the error
    CHECK(w.queue.at(a).state == JobState::Idle);
    CHECK(w.instances.at(vm).occupied_slots() == 0);
}

TEST_CASE("repeated failures accumulate wasted time across attempts") {
    World w = small_world();
    w.boot("alice", "img", "east", 1);
    const JobId id = w.submit(make_job("alice", "img", 0, 1000));

    for (SimTime start : {0, 2000}) {
        w.queue.match_cycle(w.instances, start);
        w.queue.at(id).attempt_wall = 1000;
        w.queue.interrupt(id, w.instances, start + 500);
    }
    CHECK(w.queue.at(id).attempt == 2);
    CHECK(w.queue.at(id).wasted == 1000);  // 500 cpu lost per attempt

    w.queue.match_cycle(w.instances, 5000);
    w.queue.complete(id, w.instances, 6000);
    CHECK(w.queue.at(id).state == JobState::Completed);
    CHECK(w.queue.at(id).completed_at == 6000);
    CHECK(w.queue.at(id).completed_on_cloud == "east");
    CHECK(w.queue.all_completed());
}

TEST_CASE("held children release when all parents complete") {
    World w = small_world();
    w.boot("alice", "img", "east", 2);
    const JobId p1 = w.submit(make_job("alice", "img", 0, 100));
    const JobId p2 = w.submit(make_job("alice", "img", 0, 100));
    JobSpec child_spec = make_job("alice", "img", 0);
    child_spec.depends_on = {p1, p2};
    const JobId child = w.submit(child_spec);
    CHECK(w.queue.at(child).state == JobState::Held);

    w.queue.match_cycle(w.instances, 0);
    w.queue.complete(p1, w.instances, 100);
    CHECK(w.queue.release_dag_children(p1, 100).empty());  // p2 still running

    w.queue.complete(p2, w.instances, 150);
    const auto released = w.queue.release_dag_children(p2, 150);
    CHECK(released == std::vector<JobId>{child});
    CHECK(w.queue.at(child).state == JobState::Idle);
    CHECK(w.queue.at(child).submit_time == 150);  // re-enters at the back

    w.queue.match_cycle(w.instances, 200);
    w.queue.complete(child, w.instances, 400);
    CHECK(w.queue.all_completed());
    CHECK(oracle_respects_dag(snapshot_jobs(w.queue)));
}

TEST_CASE("state counts and jsonl dump") {
    World w = small_world();
    w.boot("alice", "img", "east", 1);
    w.submit(make_job("alice", "img"));
    const JobId running = w.submit(make_job("alice", "img"));
    JobSpec dep = make_job("bob", "img");
    dep.depends_on = {running};
    w.submit(dep);
    w.queue.match_cycle(w.instances, 0);

    const auto counts = w.queue.counts_by_state();
    CHECK(counts.at(JobState::Running) == 1);
    CHECK(counts.at(JobState::Idle) == 1);
    CHECK(counts.at(JobState::Held) == 1);
    CHECK(w.queue.total_submitted() == 3);

    std::ostringstream out;
    w.queue.dump_jsonl(out);
    std::istringstream in(out.str());
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.contains("job_id"));
        CHECK(j.contains("state"));
        CHECK(j["request"].contains("cores"));
        ++lines;
    }
    CHECK(lines == 3);
}
