// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#include "stratus/connectors.hpp"

#include "doctest.h"
#include "stratus/errors.hpp"
#include "support/builders.hpp"

using namespace stratus;
using namespace stratus::testing;

namespace {

BootRequest request(const std::string& owner, const std::string& image, int cores,
                    int scratch = 0) {
    BootRequest req;
    req.owner = owner;
    req.image = image;
    req.request.cores = cores;
    req.request.memory_mb = 1024;
    req.request.blank_space_gb = scratch;
    req.request.instance_type = "m1";
    req.whole_node = cores > 1;
    return req;
}

Credential proxy(const std::string& user) {
    return {user, 0, 43200, AuthKind::PerUserProxy};
}

}  // namespace

TEST_CASE("boot commits capacity and terminate releases it") {
    CloudConnector conn(make_site("east", CloudFamily::NimbusLike, Hypervisor::Kvm, 8,
                                  16384, 100));
    ImageRepository repo;
    repo.add(make_image("img", 2.0));
    InstanceTable table;

    const auto a = conn.boot(request("alice", "img", 8, 30), repo, proxy("alice"), 0, table);
    CHECK(conn.committed_cores() == 8);
    CHECK(conn.committed_memory_mb() == 1024);
    CHECK(conn.committed_scratch_gb() == 30);
    CHECK(conn.free_cores() == 0);

    conn.terminate(a.vm_id, table);
    CHECK(conn.committed_cores() == 0);
    CHECK(conn.committed_scratch_gb() == 0);
    CHECK(table.at(a.vm_id).state == VmState::Terminated);
    CHECK_THROWS_AS(conn.terminate(a.vm_id, table), UnknownInstance);
    CHECK_THROWS_AS(conn.terminate("ghost", table), UnknownInstance);
}

TEST_CASE("capacity refusals") {
    CloudConnector conn(make_site("east", CloudFamily::NimbusLike, Hypervisor::Kvm, 8,
                                  2048, 100));
    ImageRepository repo;
    repo.add(make_image("img"));
    InstanceTable table;

    CHECK_THROWS_AS(conn.boot(request("a", "img", 9), repo, proxy("a"), 0, table),
                    NoCapacity);
    BootRequest big_mem = request("a", "img", 1);
    big_mem.request.memory_mb = 4096;
    CHECK_THROWS_AS(conn.boot(big_mem, repo, proxy("a"), 0, table), NoCapacity);
    CHECK_THROWS_AS(conn.boot(request("a", "img", 1, 101), repo, proxy("a"), 0, table),
                    ScratchExhausted);

    conn.set_maintenance(true);
    CHECK(conn.in_maintenance());
    CHECK_THROWS_AS(conn.boot(request("a", "img", 1), repo, proxy("a"), 0, table),
                    MaintenanceMode);
    conn.set_maintenance(false);
    CHECK(conn.boot(request("a", "img", 1), repo, proxy("a"), 0, table).vm_id == "east-1");
}

TEST_CASE("scratch is a nimbus concept") {
    ImageRepository repo;
    repo.add(make_image("img"));
    InstanceTable table;

    SUBCASE("openstack sites ignore blank space entirely") {
        CloudConnector conn(make_site("o1", CloudFamily::OpenstackLike, Hypervisor::Kvm,
                                      8, 16384, 0));
        Credential key{"grid", 0, kMaxSimTime / 4, AuthKind::SharedGroupKey};
        const auto out = conn.boot(request("a", "img", 1, 500), repo, key, 0, table);
        CHECK(conn.committed_scratch_gb() == 0);
        CHECK(!conn.over_committed_scratch());
        CHECK(table.at(out.vm_id).blank_space_gb == 0);
        CHECK(!table.at(out.vm_id).lifetime_limit);  // no hard lifetime either
    }
    SUBCASE("the safeguard rejects pool overdrafts") {
        CloudConnector conn(make_site("n1", CloudFamily::NimbusLike, Hypervisor::Kvm, 8,
                                      16384, 100, true));
        conn.boot(request("a", "img", 1, 60), repo, proxy("a"), 0, table);
        CHECK_THROWS_AS(conn.boot(request("a", "img", 1, 60), repo, proxy("a"), 0, table),
                        ScratchExhausted);
        CHECK(!conn.over_committed_scratch());
    }
    SUBCASE("without the safeguard the pool over-commits visibly") {
        CloudConnector conn(make_site("n1", CloudFamily::NimbusLike, Hypervisor::Kvm, 8,
                                      16384, 100, false));
        conn.boot(request("a", "img", 1, 60), repo, proxy("a"), 0, table);
        CHECK(!conn.over_committed_scratch());
        conn.boot(request("a", "img", 1, 60), repo, proxy("a"), 0, table);
        CHECK(conn.over_committed_scratch());
        CHECK(conn.committed_scratch_gb() == 120);
    }
}

TEST_CASE("boot latency decomposes into fixed delay plus transfer") {
    CloudSite site = make_site("east", CloudFamily::NimbusLike, Hypervisor::Kvm, 8);
    site.boot_fixed_delay = 300;
    site.image_bandwidth_gb_per_s = 0.1;
    CloudConnector conn(site);
    ImageRepository repo;
    repo.add(make_image("img", 2.0));  // 20s transfer at 0.1 GB/s
    InstanceTable table;

    const auto first = conn.boot(request("a", "img", 1), repo, proxy("a"), 1000, table);
    CHECK(first.transfer_time == 20);
    CHECK(first.running_at == 1320);

    // A completed boot caches the image on the cloud; repeats skip transfer.
    repo.mark_cached("img", "east");
    const auto second = conn.boot(request("a", "img", 1), repo, proxy("a"), 2000, table);
    CHECK(second.transfer_time == 0);
    CHECK(second.running_at == 2300);
}

TEST_CASE("instances carry their boot context") {
    CloudConnector conn(make_site("east", CloudFamily::NimbusLike, Hypervisor::Xen, 8));
    ImageRepository repo;
    repo.add(make_image("img", 1.0, true, true));
    InstanceTable table;

    const auto out = conn.boot(request("alice", "img", 4, 10), repo, proxy("alice"), 77,
                               table);
    const VMInstance& vm = table.at(out.vm_id);
    CHECK(vm.vm_id == "east-1");
    CHECK(vm.owner == "alice");
    CHECK(vm.image == "img");
    CHECK(vm.cloud == "east");
    CHECK(vm.hypervisor == Hypervisor::Xen);
    CHECK(vm.slots == 4);
    CHECK(vm.free_slots() == 4);
    CHECK(vm.booted_at == 77);
    CHECK(vm.state == VmState::Booting);  // Requested -> Booting at acceptance
    CHECK(vm.lifetime_limit == kNimbusDefaultLifetime);
    CHECK(vm.credential_owner == "alice");
    CHECK(vm.credential_kind == AuthKind::PerUserProxy);

    const auto next = conn.boot(request("bob", "img", 1), repo, proxy("bob"), 78, table);
    CHECK(next.vm_id == "east-2");
    CHECK(table.at(next.vm_id).created_seq == 1);
}

TEST_CASE("dump reports the committed books") {
    CloudConnector conn(make_site("east", CloudFamily::NimbusLike, Hypervisor::Kvm, 8,
                                  16384, 100));
    ImageRepository repo;
    repo.add(make_image("img"));
    InstanceTable table;
    conn.boot(request("a", "img", 2, 10), repo, proxy("a"), 0, table);

    const auto j = conn.dump(table);
    CHECK(j["name"] == "east");
    CHECK(j["family"] == "nimbus-like");
    CHECK(j["status"] == "Active");
    CHECK(j["total_cores"] == 8);
    CHECK(j["committed_cores"] == 2);
    CHECK(j["committed_scratch_gb"] == 10);
    CHECK(j["over_committed_scratch"] == false);
    CHECK(j["total_booted"] == 1);
    CHECK(j["instances"].size() == 1);
}
