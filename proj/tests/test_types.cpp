// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#include "stratus/types.hpp"

#include <set>
#include <utility>
#include <vector>

#include "doctest.h"

using namespace stratus;

TEST_CASE("enum names round-trip through to_string and parse") {
    for (Hypervisor v : {Hypervisor::Kvm, Hypervisor::Xen})
        CHECK(parse_hypervisor(to_string(v)) == v);
    for (CloudFamily v : {CloudFamily::NimbusLike, CloudFamily::OpenstackLike})
        CHECK(parse_cloud_family(to_string(v)) == v);
    for (AuthKind v : {AuthKind::PerUserProxy, AuthKind::SharedGroupKey})
        CHECK(parse_auth_kind(to_string(v)) == v);
    for (CloudStatus v : {CloudStatus::Active, CloudStatus::Maintenance})
        CHECK(parse_cloud_status(to_string(v)) == v);

    CHECK(!parse_hypervisor("vmware"));
    CHECK(!parse_cloud_family(""));
    CHECK(!parse_auth_kind("Kvm"));
    CHECK(!parse_cloud_status("active"));  // case-sensitive
}

TEST_CASE("vm lifecycle edge set is closed") {
    const std::vector<VmState> all = {VmState::Requested, VmState::Booting,
                                      VmState::Running,   VmState::Retiring,
                                      VmState::Error,     VmState::Terminated};
    const std::set<std::pair<VmState, VmState>> legal = {
        {VmState::Requested, VmState::Booting},
        {VmState::Booting, VmState::Running},
        {VmState::Booting, VmState::Error},
        {VmState::Booting, VmState::Terminated},
        {VmState::Running, VmState::Retiring},
        {VmState::Running, VmState::Error},
        {VmState::Running, VmState::Terminated},
        {VmState::Retiring, VmState::Terminated},
        {VmState::Error, VmState::Terminated},
    };
    for (VmState from : all)
        for (VmState to : all) {
            CAPTURE(to_string(from));
            CAPTURE(to_string(to));
            CHECK(vm_transition_allowed(from, to) == (legal.count({from, to}) > 0));
        }
}

TEST_CASE("job state edge set is closed") {
    const std::vector<JobState> all = {JobState::Idle, JobState::Running,
                                       JobState::Completed, JobState::Held};
    const std::set<std::pair<JobState, JobState>> legal = {
        {JobState::Idle, JobState::Running},
        {JobState::Running, JobState::Completed},
        {JobState::Running, JobState::Idle},  // interrupted attempt requeues
        {JobState::Held, JobState::Idle},
    };
    for (JobState from : all)
        for (JobState to : all) {
            CAPTURE(to_string(from));
            CAPTURE(to_string(to));
            CHECK(job_transition_allowed(from, to) == (legal.count({from, to}) > 0));
        }
}

TEST_CASE("terminal states have no outgoing edges") {
    for (VmState to : {VmState::Requested, VmState::Booting, VmState::Running,
                       VmState::Retiring, VmState::Error, VmState::Terminated})
        CHECK(!vm_transition_allowed(VmState::Terminated, to));
    for (JobState to :
         {JobState::Idle, JobState::Running, JobState::Completed, JobState::Held})
        CHECK(!job_transition_allowed(JobState::Completed, to));
}
