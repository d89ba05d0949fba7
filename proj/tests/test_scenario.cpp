// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#include "stratus/scenario.hpp"

#include <string>

#include <json.hpp>

#include "doctest.h"
#include "stratus/errors.hpp"

using namespace stratus;
using nlohmann::json;

namespace {

json base_scenario() {
    return json::parse(R"({
        "name": "t",
        "horizon": 3600,
        "seed": 3,
        "clouds": [
            {"name": "east", "family": "nimbus-like", "hypervisor": "kvm",
             "total_cores": 8, "total_memory_mb": 16384, "scratch_pool_gb": 100},
            {"name": "o1", "family": "openstack-like", "hypervisor": "xen",
             "total_cores": 4, "total_memory_mb": 8192}
        ],
        "images": [
            {"image_id": "img", "owner": "alice", "size_gb": 2.0,
             "variants": [{"hypervisor": "kvm", "location": "repo/img.kvm"},
                          {"hypervisor": "xen", "location": "repo/img.xen"}]}
        ],
        "users": [
            {"user_id": "alice", "credential": {"issued_at": 0, "lifetime": 43200}}
        ],
        "workload": {
            "jobs": [
                {"owner": "alice", "vm_type": "img", "runtime_cpu": 600,
                 "request": {"cores": 1, "memory_mb": 1024, "instance_type": "m1"}}
            ]
        }
    })");
}

std::string error_of(const json& doc) {
    try {
        Scenario::from_json(doc);
    } catch (const InvalidScenario& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("a minimal scenario parses") {
    const Scenario sc = Scenario::from_json(base_scenario());
    CHECK(sc.name == "t");
    CHECK(sc.horizon == 3600);
    CHECK(sc.seed == 3);
    CHECK(sc.sample_period == 300);  // default
    CHECK(sc.clouds.size() == 2);
    CHECK(sc.clouds[0].auth_mode == AuthKind::PerUserProxy);
    CHECK(sc.clouds[1].auth_mode == AuthKind::SharedGroupKey);
    CHECK(sc.jobs.size() == 1);
    CHECK(sc.scheduler.cycle_period == 60);
}

TEST_CASE("diagnostics name the offending field path") {
    SUBCASE("missing required field") {
        json doc = base_scenario();
        doc.erase("horizon");
        CHECK(error_of(doc).find("$.horizon") != std::string::npos);
    }
    SUBCASE("unknown top-level key") {
        json doc = base_scenario();
        doc["bogus"] = 1;
        CHECK(error_of(doc).find("$.bogus") != std::string::npos);
    }
    SUBCASE("unknown nested key") {
        json doc = base_scenario();
        doc["clouds"][0]["color"] = "blue";
        CHECK(error_of(doc).find("$.clouds[0].color") != std::string::npos);
    }
    SUBCASE("wrong type") {
        json doc = base_scenario();
        doc["horizon"] = "soon";
        const std::string err = error_of(doc);
        CHECK(err.find("$.horizon") != std::string::npos);
        CHECK(err.find("integer") != std::string::npos);
    }
    SUBCASE("bad enum value") {
        json doc = base_scenario();
        doc["clouds"][0]["family"] = "azure";
        CHECK(error_of(doc).find("$.clouds[0].family") != std::string::npos);
    }
    SUBCASE("job field paths thread through the workload object") {
        json doc = base_scenario();
        doc["workload"]["jobs"][0]["runtime_cpu"] = -5;
        CHECK(error_of(doc).find("$.workload.jobs[0].runtime_cpu") != std::string::npos);
    }
}

TEST_CASE("cross-reference validation") {
    SUBCASE("duplicate cloud names") {
        json doc = base_scenario();
        doc["clouds"][1] = doc["clouds"][0];
        CHECK(error_of(doc).find("duplicate cloud") != std::string::npos);
    }
    SUBCASE("duplicate users") {
        json doc = base_scenario();
        doc["users"].push_back(doc["users"][0]);
        CHECK(error_of(doc).find("duplicate user") != std::string::npos);
    }
    SUBCASE("jobs must name a known user and image") {
        json doc = base_scenario();
        doc["workload"]["jobs"][0]["owner"] = "mallory";
        CHECK(error_of(doc).find("unknown user mallory") != std::string::npos);

        doc = base_scenario();
        doc["workload"]["jobs"][0]["vm_type"] = "ghost";
        CHECK(error_of(doc).find("unknown image ghost") != std::string::npos);
    }
    SUBCASE("image owners must exist") {
        json doc = base_scenario();
        doc["images"][0]["owner"] = "mallory";
        CHECK(error_of(doc).find("$.images[0].owner") != std::string::npos);
    }
    SUBCASE("constraints must reference known clouds") {
        json doc = base_scenario();
        doc["workload"]["jobs"][0]["cloud_constraint"] = {"atlantis"};
        CHECK(error_of(doc).find("unknown cloud atlantis") != std::string::npos);
    }
    SUBCASE("auth mode must agree with the family") {
        json doc = base_scenario();
        doc["clouds"][0]["auth_mode"] = "shared-group-key";
        CHECK(error_of(doc).find("$.clouds[0].auth_mode") != std::string::npos);
    }
    SUBCASE("jobs cannot be submitted before their image exists") {
        json doc = base_scenario();
        doc["images"][0]["save_at"] = 0;  // 2 GB: available at t=120
        doc["workload"]["jobs"][0]["submit_time"] = 119;
        CHECK(error_of(doc).find("before its image") != std::string::npos);
        doc["workload"]["jobs"][0]["submit_time"] = 120;
        CHECK(error_of(doc).empty());
    }
    SUBCASE("fault targets are checked") {
        json doc = base_scenario();
        doc["faults"] = json::array(
            {{{"kind", "cloud_maintenance"}, {"time", 10}, {"cloud", "atlantis"}}});
        CHECK(error_of(doc).find("unknown cloud atlantis") != std::string::npos);

        doc["faults"] = json::array(
            {{{"kind", "credential_renewal"}, {"time", 10}, {"user", "nobody"}}});
        CHECK(error_of(doc).find("unknown user nobody") != std::string::npos);

        doc["faults"] = json::array({{{"kind", "credential_renewal"},
                                      {"time", 10},
                                      {"user", "alice"},
                                      {"lifetime", 900}}});
        CHECK(error_of(doc).find("expiry margin") != std::string::npos);
    }
}

TEST_CASE("dependency declarations are positional and acyclic by construction") {
    json doc = base_scenario();
    doc["workload"]["jobs"] = json::array({
        {{"owner", "alice"}, {"vm_type", "img"}, {"runtime_cpu", 60}, {"submit_time", 0}},
        {{"owner", "alice"},
         {"vm_type", "img"},
         {"runtime_cpu", 60},
         {"submit_time", 10},
         {"depends_on", {1}}},
    });
    CHECK(error_of(doc).empty());

    SUBCASE("positions must be in range") {
        doc["workload"]["jobs"][1]["depends_on"] = {7};
        CHECK(error_of(doc).find("out of range") != std::string::npos);
    }
    SUBCASE("self-dependencies are rejected") {
        doc["workload"]["jobs"][0]["depends_on"] = {1};
        CHECK(error_of(doc).find("depends on itself") != std::string::npos);
    }
    SUBCASE("parents must not be submitted after children") {
        doc["workload"]["jobs"][0]["submit_time"] = 50;
        CHECK(error_of(doc).find("no later than child") != std::string::npos);
    }
}

TEST_CASE("scheduler margins must cover a cycle") {
    json doc = base_scenario();
    doc["scheduler"] = {{"cycle_period", 600}, {"proxy_expiry_margin", 300}};
    CHECK(error_of(doc).find("$.scheduler.proxy_expiry_margin") != std::string::npos);
}

TEST_CASE("scenarios round-trip through json losslessly") {
    json doc = base_scenario();
    doc["io_fault_rate_per_hour"] = 0.25;
    doc["scheduler"] = {{"cycle_period", 120},
                        {"match_period", 30},
                        {"rebalance_enabled", false},
                        {"partition_policy", "separate-single-core-and-whole-node"},
                        {"partition_whole_node_fraction", 0.75},
                        {"proxy_expiry_margin", 900},
                        {"lifetime_margin", 3600}};
    doc["images"][0]["save_at"] = 60;
    doc["workload"]["jobs"][0]["submit_time"] = 300;
    doc["workload"]["jobs"][0]["io_cost"] = 17;
    doc["workload"]["jobs"][0]["cloud_constraint"] = {"east"};
    doc["workload"]["generators"] = json::array({{{"owner", "alice"},
                                                  {"vm_type", "img"},
                                                  {"count", 3},
                                                  {"start", 200},
                                                  {"interarrival", 100},
                                                  {"runtime_cpu", {{"min", 60}, {"max", 600}}},
                                                  {"io_cost", 5}}});
    doc["faults"] = json::array(
        {{{"kind", "vm_fail"}, {"time", 500}, {"vm_id", "east-1"}, {"mode", "stop"}},
         {{"kind", "cloud_maintenance"}, {"time", 600}, {"cloud", "east"}, {"on", true}},
         {{"kind", "credential_renewal"}, {"time", 700}, {"user", "alice"},
          {"lifetime", 7200}}});
    doc["software_cache"] = {{"default_cold_stagein", 240},
                             {"per_vm_type", {{"img", {{"cold_stagein", 900}}}}}};

    const Scenario first = Scenario::from_json(doc);
    const Scenario second = Scenario::from_json(first.to_json());
    CHECK(first.to_json() == second.to_json());

    CHECK(second.scheduler.partition_policy ==
          PartitionPolicy::SeparateSingleCoreAndWholeNode);
    CHECK(second.images[0].save_at == 60);
    CHECK(second.images[0].image.available_at == 180);  // 2 GB after t=60
    CHECK(second.faults.size() == 3);
    CHECK(second.software_cache.per_vm_type.at("img").cold == 900);
    CHECK(second.software_cache.per_vm_type.at("img").warm == 0);
}

TEST_CASE("workload expansion") {
    json doc = base_scenario();
    doc["workload"]["jobs"] = json::array({
        {{"owner", "alice"}, {"vm_type", "img"}, {"runtime_cpu", 60}, {"submit_time", 150}},
        {{"owner", "alice"},
         {"vm_type", "img"},
         {"runtime_cpu", 61},
         {"submit_time", 300},
         {"depends_on", {1}}},
    });
    doc["workload"]["generators"] = json::array({{{"owner", "alice"},
                                                  {"vm_type", "img"},
                                                  {"count", 3},
                                                  {"start", 100},
                                                  {"interarrival", 70},
                                                  {"runtime_cpu", {{"min", 10}, {"max", 1000}}}}});
    const Scenario sc = Scenario::from_json(doc);

    Rng rng(42);
    const auto jobs = sc.expand_workload(rng);
    REQUIRE(jobs.size() == 5);

    SUBCASE("merged ordering is by submit time, listing position on ties") {
        CHECK(jobs[0].submit_time == 100);  // generator k=0
        CHECK(jobs[1].submit_time == 150);  // explicit job 1
        CHECK(jobs[2].submit_time == 170);  // generator k=1
        CHECK(jobs[3].submit_time == 240);  // generator k=2
        CHECK(jobs[4].submit_time == 300);  // explicit job 2
    }
    SUBCASE("dependencies are rewritten to final ids") {
        REQUIRE(jobs[4].depends_on.size() == 1);
        CHECK(jobs[4].depends_on[0] == 2);  // its parent landed in slot 2
    }
    SUBCASE("generated runtimes stay inside the configured range") {
        for (int i : {0, 2, 3}) {
            CHECK(jobs[static_cast<std::size_t>(i)].runtime_cpu >= 10);
            CHECK(jobs[static_cast<std::size_t>(i)].runtime_cpu <= 1000);
        }
    }
    SUBCASE("expansion is a pure function of the seed") {
        Rng again(42);
        const auto repeat = sc.expand_workload(again);
        REQUIRE(repeat.size() == jobs.size());
        for (std::size_t i = 0; i < jobs.size(); ++i)
            CHECK(repeat[i].runtime_cpu == jobs[i].runtime_cpu);

        Rng other(43);
        const auto different = sc.expand_workload(other);
        bool any_differs = false;
        for (std::size_t i = 0; i < jobs.size(); ++i)
            any_differs = any_differs || different[i].runtime_cpu != jobs[i].runtime_cpu;
        CHECK(any_differs);
    }
    SUBCASE("fixed runtimes draw nothing from the stream") {
        json fixed = base_scenario();
        fixed["workload"]["generators"] = json::array({{{"owner", "alice"},
                                                        {"vm_type", "img"},
                                                        {"count", 2},
                                                        {"runtime_cpu", 777}}});
        const Scenario sf = Scenario::from_json(fixed);
        Rng r1(1);
        const auto expanded = sf.expand_workload(r1);
        REQUIRE(expanded.size() == 3);
        CHECK(expanded[0].runtime_cpu == 600);  // the explicit job listed first
        CHECK(expanded[1].runtime_cpu == 777);
        CHECK(expanded[2].runtime_cpu == 777);
        Rng r2(1);
        Rng untouched(1);
        sf.expand_workload(r2);
        CHECK(r2.next_u64() == untouched.next_u64());
    }
}

TEST_CASE("load_file reports parse failures with the path") {
    CHECK_THROWS_AS(Scenario::load_file("/nonexistent/sc.json"), InvalidScenario);
}
