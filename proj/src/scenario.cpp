// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#include "stratus/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "stratus/errors.hpp"
#include "stratus/image_repo.hpp"

namespace stratus {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw InvalidScenario(path + ": " + why);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed)
            if (it.key() == key) known = true;
        if (!known) fail(path + "." + it.key(), "unknown field");
    }
}

const json& require(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "required field missing");
    return *it;
}

const json* maybe(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

std::int64_t as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<std::int64_t>();
}

double as_double(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) fail(path, "expected a boolean");
    return v.get<bool>();
}

std::int64_t opt_int(const json& obj, const std::string& path, const char* key,
                     std::int64_t fallback) {
    const json* v = maybe(obj, key);
    return v ? as_int(*v, path + "." + key) : fallback;
}

double opt_double(const json& obj, const std::string& path, const char* key,
                  double fallback) {
    const json* v = maybe(obj, key);
    return v ? as_double(*v, path + "." + key) : fallback;
}

std::string opt_string(const json& obj, const std::string& path, const char* key,
                       const std::string& fallback) {
    const json* v = maybe(obj, key);
    return v ? as_string(*v, path + "." + key) : fallback;
}

bool opt_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
    const json* v = maybe(obj, key);
    return v ? as_bool(*v, path + "." + key) : fallback;
}

SchedulerConfig parse_scheduler(const json& obj, const std::string& path) {
    check_keys(obj, path,
               {"cycle_period", "match_period", "proxy_expiry_margin", "lifetime_margin",
                "rebalance_enabled", "partition_policy", "partition_whole_node_fraction"});
    SchedulerConfig cfg;
    cfg.cycle_period = opt_int(obj, path, "cycle_period", cfg.cycle_period);
    cfg.match_period = opt_int(obj, path, "match_period", cfg.match_period);
    cfg.proxy_expiry_margin = opt_int(obj, path, "proxy_expiry_margin", cfg.proxy_expiry_margin);
    cfg.lifetime_margin = opt_int(obj, path, "lifetime_margin", cfg.lifetime_margin);
    cfg.rebalance_enabled = opt_bool(obj, path, "rebalance_enabled", cfg.rebalance_enabled);
    const std::string policy = opt_string(obj, path, "partition_policy", "off");
    if (policy == "off")
        cfg.partition_policy = PartitionPolicy::Off;
    else if (policy == "separate-single-core-and-whole-node")
        cfg.partition_policy = PartitionPolicy::SeparateSingleCoreAndWholeNode;
    else
        fail(path + ".partition_policy",
             "expected \"off\" or \"separate-single-core-and-whole-node\"");
    cfg.partition_whole_node_fraction =
        opt_double(obj, path, "partition_whole_node_fraction", cfg.partition_whole_node_fraction);
    return cfg;
}

CloudSite parse_cloud(const json& obj, const std::string& path) {
    check_keys(obj, path,
               {"name", "family", "hypervisor", "total_cores", "total_memory_mb",
                "scratch_pool_gb", "scratch_safeguard", "status", "auth_mode",
                "boot_fixed_delay", "image_bandwidth_gb_per_s", "priority"});
    CloudSite site;
    site.name = as_string(require(obj, path, "name"), path + ".name");

    const std::string family = as_string(require(obj, path, "family"), path + ".family");
    auto fam = parse_cloud_family(family);
    if (!fam) fail(path + ".family", "expected \"nimbus-like\" or \"openstack-like\"");
    site.family = *fam;

    const std::string hv = as_string(require(obj, path, "hypervisor"), path + ".hypervisor");
    auto hyp = parse_hypervisor(hv);
    if (!hyp) fail(path + ".hypervisor", "expected \"kvm\" or \"xen\"");
    site.hypervisor = *hyp;

    site.total_cores = static_cast<int>(as_int(require(obj, path, "total_cores"),
                                               path + ".total_cores"));
    site.total_memory_mb = as_int(require(obj, path, "total_memory_mb"),
                                  path + ".total_memory_mb");
    site.scratch_pool_gb = static_cast<int>(opt_int(obj, path, "scratch_pool_gb", 0));
    site.scratch_safeguard = opt_bool(obj, path, "scratch_safeguard", true);

    const std::string status = opt_string(obj, path, "status", "Active");
    auto st = parse_cloud_status(status);
    if (!st) fail(path + ".status", "expected \"Active\" or \"Maintenance\"");
    site.status = *st;

    // auth_mode follows the family; stating it explicitly is allowed but it
    // must agree.
    const AuthKind implied = site.family == CloudFamily::NimbusLike
                                 ? AuthKind::PerUserProxy
                                 : AuthKind::SharedGroupKey;
    if (const json* v = maybe(obj, "auth_mode")) {
        auto mode = parse_auth_kind(as_string(*v, path + ".auth_mode"));
        if (!mode) fail(path + ".auth_mode",
                        "expected \"per-user-proxy\" or \"shared-group-key\"");
        if (*mode != implied)
            fail(path + ".auth_mode", "inconsistent with family " + family);
    }
    site.auth_mode = implied;

    site.boot_fixed_delay = opt_int(obj, path, "boot_fixed_delay", 0);
    site.image_bandwidth_gb_per_s = opt_double(obj, path, "image_bandwidth_gb_per_s", 0.1);
    site.priority = static_cast<int>(opt_int(obj, path, "priority", 0));
    return site;
}

ScenarioImage parse_image(const json& obj, const std::string& path) {
    check_keys(obj, path, {"image_id", "owner", "size_gb", "variants", "save_at"});
    ScenarioImage entry;
    entry.image.image_id = as_string(require(obj, path, "image_id"), path + ".image_id");
    entry.image.owner = as_string(require(obj, path, "owner"), path + ".owner");
    entry.image.size_gb = as_double(require(obj, path, "size_gb"), path + ".size_gb");

    const json& variants = require(obj, path, "variants");
    if (!variants.is_array() || variants.empty())
        fail(path + ".variants", "expected a non-empty array");
    for (std::size_t i = 0; i < variants.size(); ++i) {
        const std::string vpath = path + ".variants[" + std::to_string(i) + "]";
        const json& v = variants[i];
        if (!v.is_object()) fail(vpath, "expected an object");
        check_keys(v, vpath, {"hypervisor", "location"});
        ImageVariant variant;
        auto hv = parse_hypervisor(as_string(require(v, vpath, "hypervisor"),
                                             vpath + ".hypervisor"));
        if (!hv) fail(vpath + ".hypervisor", "expected \"kvm\" or \"xen\"");
        variant.hypervisor = *hv;
        variant.location = as_string(require(v, vpath, "location"), vpath + ".location");
        entry.image.variants.push_back(std::move(variant));
    }

    if (const json* v = maybe(obj, "save_at")) {
        entry.save_at = as_int(*v, path + ".save_at");
        entry.image.available_at =
            *entry.save_at + ImageRepository::save_duration(entry.image.size_gb);
    }
    return entry;
}

UserSpec parse_user(const json& obj, const std::string& path) {
    check_keys(obj, path, {"user_id", "credential"});
    UserSpec user;
    user.user_id = as_string(require(obj, path, "user_id"), path + ".user_id");
    user.credential.owner = user.user_id;
    if (const json* cred = maybe(obj, "credential")) {
        const std::string cpath = path + ".credential";
        if (!cred->is_object()) fail(cpath, "expected an object");
        check_keys(*cred, cpath, {"kind", "issued_at", "lifetime"});
        const std::string kind = opt_string(*cred, cpath, "kind", "per-user-proxy");
        if (kind != "per-user-proxy")
            fail(cpath + ".kind", "users hold per-user-proxy credentials");
        user.credential.issued_at = opt_int(*cred, cpath, "issued_at", 0);
        user.credential.lifetime = opt_int(*cred, cpath, "lifetime", 43200);
    }
    user.credential.kind = AuthKind::PerUserProxy;
    return user;
}

ResourceRequest parse_request(const json& obj, const std::string& path) {
    check_keys(obj, path, {"cores", "memory_mb", "arch", "blank_space_gb", "instance_type"});
    ResourceRequest req;
    req.cores = static_cast<int>(opt_int(obj, path, "cores", req.cores));
    req.memory_mb = static_cast<int>(opt_int(obj, path, "memory_mb", req.memory_mb));
    req.arch = opt_string(obj, path, "arch", req.arch);
    req.blank_space_gb = static_cast<int>(opt_int(obj, path, "blank_space_gb", 0));
    if (const json* v = maybe(obj, "instance_type"))
        req.instance_type = as_string(*v, path + ".instance_type");
    return req;
}

std::optional<std::set<std::string>> parse_constraint(const json& obj,
                                                      const std::string& path) {
    const json* v = maybe(obj, "cloud_constraint");
    if (v == nullptr) return std::nullopt;
    if (!v->is_array()) fail(path + ".cloud_constraint", "expected an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < v->size(); ++i)
        names.insert(as_string((*v)[i],
                               path + ".cloud_constraint[" + std::to_string(i) + "]"));
    if (names.empty()) fail(path + ".cloud_constraint", "must not be empty");
    return names;
}

JobSpec parse_job(const json& obj, const std::string& path) {
    check_keys(obj, path,
               {"owner", "vm_type", "submit_time", "runtime_cpu", "io_cost", "request",
                "depends_on", "cloud_constraint"});
    JobSpec spec;
    spec.owner = as_string(require(obj, path, "owner"), path + ".owner");
    spec.vm_type = as_string(require(obj, path, "vm_type"), path + ".vm_type");
    spec.submit_time = opt_int(obj, path, "submit_time", 0);
    spec.runtime_cpu = as_int(require(obj, path, "runtime_cpu"), path + ".runtime_cpu");
    spec.io_cost = opt_int(obj, path, "io_cost", 0);
    if (const json* req = maybe(obj, "request")) {
        if (!req->is_object()) fail(path + ".request", "expected an object");
        spec.request = parse_request(*req, path + ".request");
    }
    if (const json* deps = maybe(obj, "depends_on")) {
        if (!deps->is_array()) fail(path + ".depends_on", "expected an array");
        for (std::size_t i = 0; i < deps->size(); ++i)
            spec.depends_on.push_back(
                as_int((*deps)[i], path + ".depends_on[" + std::to_string(i) + "]"));
    }
    spec.cloud_constraint = parse_constraint(obj, path);
    return spec;
}

GeneratorSpec parse_generator(const json& obj, const std::string& path) {
    check_keys(obj, path,
               {"owner", "vm_type", "count", "start", "interarrival", "runtime_cpu",
                "io_cost", "request", "cloud_constraint"});
    GeneratorSpec gen;
    gen.owner = as_string(require(obj, path, "owner"), path + ".owner");
    gen.vm_type = as_string(require(obj, path, "vm_type"), path + ".vm_type");
    gen.count = static_cast<int>(as_int(require(obj, path, "count"), path + ".count"));
    gen.start = opt_int(obj, path, "start", 0);
    gen.interarrival = opt_int(obj, path, "interarrival", 0);
    const json& runtime = require(obj, path, "runtime_cpu");
    if (runtime.is_object()) {
        check_keys(runtime, path + ".runtime_cpu", {"min", "max"});
        gen.runtime_cpu_min = as_int(require(runtime, path + ".runtime_cpu", "min"),
                                     path + ".runtime_cpu.min");
        gen.runtime_cpu_max = as_int(require(runtime, path + ".runtime_cpu", "max"),
                                     path + ".runtime_cpu.max");
    } else {
        gen.runtime_cpu_min = gen.runtime_cpu_max = as_int(runtime, path + ".runtime_cpu");
    }
    gen.io_cost = opt_int(obj, path, "io_cost", 0);
    if (const json* req = maybe(obj, "request")) {
        if (!req->is_object()) fail(path + ".request", "expected an object");
        gen.request = parse_request(*req, path + ".request");
    }
    gen.cloud_constraint = parse_constraint(obj, path);
    return gen;
}

FaultSpec parse_fault(const json& obj, const std::string& path) {
    FaultSpec fault;
    const std::string kind = as_string(require(obj, path, "kind"), path + ".kind");
    fault.time = as_int(require(obj, path, "time"), path + ".time");
    if (kind == "vm_fail") {
        check_keys(obj, path, {"kind", "time", "vm_id", "mode"});
        fault.kind = FaultSpec::Kind::VmFail;
        fault.vm_id = as_string(require(obj, path, "vm_id"), path + ".vm_id");
        fault.mode = opt_string(obj, path, "mode", "error");
        if (fault.mode != "error" && fault.mode != "stop")
            fail(path + ".mode", "expected \"error\" or \"stop\"");
    } else if (kind == "cloud_maintenance") {
        check_keys(obj, path, {"kind", "time", "cloud", "on"});
        fault.kind = FaultSpec::Kind::CloudMaintenance;
        fault.cloud = as_string(require(obj, path, "cloud"), path + ".cloud");
        fault.on = opt_bool(obj, path, "on", true);
    } else if (kind == "credential_renewal") {
        check_keys(obj, path, {"kind", "time", "user", "lifetime"});
        fault.kind = FaultSpec::Kind::CredentialRenewal;
        fault.user = as_string(require(obj, path, "user"), path + ".user");
        fault.lifetime = opt_int(obj, path, "lifetime", 43200);
    } else {
        fail(path + ".kind",
             "expected \"vm_fail\", \"cloud_maintenance\" or \"credential_renewal\"");
    }
    return fault;
}

SoftwareCacheConfig parse_software_cache(const json& obj, const std::string& path) {
    check_keys(obj, path, {"default_cold_stagein", "default_warm_stagein", "per_vm_type"});
    SoftwareCacheConfig cfg;
    cfg.default_cold = opt_int(obj, path, "default_cold_stagein", cfg.default_cold);
    cfg.default_warm = opt_int(obj, path, "default_warm_stagein", cfg.default_warm);
    if (const json* per = maybe(obj, "per_vm_type")) {
        if (!per->is_object()) fail(path + ".per_vm_type", "expected an object");
        for (auto it = per->begin(); it != per->end(); ++it) {
            const std::string epath = path + ".per_vm_type." + it.key();
            if (!it.value().is_object()) fail(epath, "expected an object");
            check_keys(it.value(), epath, {"cold_stagein", "warm_stagein"});
            StageinCost cost;
            cost.cold = opt_int(it.value(), epath, "cold_stagein", cfg.default_cold);
            cost.warm = opt_int(it.value(), epath, "warm_stagein", cfg.default_warm);
            cfg.per_vm_type[it.key()] = cost;
        }
    }
    return cfg;
}

}  // namespace

Scenario Scenario::from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) fail("$", "scenario must be a JSON object");
    check_keys(doc, "$",
               {"name", "horizon", "seed", "sample_period", "io_fault_rate_per_hour",
                "scheduler", "clouds", "images", "users", "workload", "faults",
                "software_cache"});

    Scenario sc;
    sc.name = opt_string(doc, "$", "name", sc.name);
    sc.horizon = as_int(require(doc, "$", "horizon"), "$.horizon");
    sc.seed = static_cast<std::uint64_t>(opt_int(doc, "$", "seed", 1));
    sc.sample_period = opt_int(doc, "$", "sample_period", sc.sample_period);
    sc.io_fault_rate_per_hour =
        opt_double(doc, "$", "io_fault_rate_per_hour", sc.io_fault_rate_per_hour);

    if (const json* v = maybe(doc, "scheduler")) {
        if (!v->is_object()) fail("$.scheduler", "expected an object");
        sc.scheduler = parse_scheduler(*v, "$.scheduler");
    }

    if (const json* v = maybe(doc, "clouds")) {
        if (!v->is_array()) fail("$.clouds", "expected an array");
        for (std::size_t i = 0; i < v->size(); ++i) {
            const std::string path = "$.clouds[" + std::to_string(i) + "]";
            if (!(*v)[i].is_object()) fail(path, "expected an object");
            sc.clouds.push_back(parse_cloud((*v)[i], path));
        }
    }

    if (const json* v = maybe(doc, "images")) {
        if (!v->is_array()) fail("$.images", "expected an array");
        for (std::size_t i = 0; i < v->size(); ++i) {
            const std::string path = "$.images[" + std::to_string(i) + "]";
            if (!(*v)[i].is_object()) fail(path, "expected an object");
            sc.images.push_back(parse_image((*v)[i], path));
        }
    }

    if (const json* v = maybe(doc, "users")) {
        if (!v->is_array()) fail("$.users", "expected an array");
        for (std::size_t i = 0; i < v->size(); ++i) {
            const std::string path = "$.users[" + std::to_string(i) + "]";
            if (!(*v)[i].is_object()) fail(path, "expected an object");
            sc.users.push_back(parse_user((*v)[i], path));
        }
    }

    if (const json* v = maybe(doc, "workload")) {
        if (!v->is_object()) fail("$.workload", "expected an object");
        check_keys(*v, "$.workload", {"jobs", "generators"});
        if (const json* jobs = maybe(*v, "jobs")) {
            if (!jobs->is_array()) fail("$.workload.jobs", "expected an array");
            for (std::size_t i = 0; i < jobs->size(); ++i) {
                const std::string path = "$.workload.jobs[" + std::to_string(i) + "]";
                if (!(*jobs)[i].is_object()) fail(path, "expected an object");
                sc.jobs.push_back(parse_job((*jobs)[i], path));
            }
        }
        if (const json* gens = maybe(*v, "generators")) {
            if (!gens->is_array()) fail("$.workload.generators", "expected an array");
            for (std::size_t i = 0; i < gens->size(); ++i) {
                const std::string path = "$.workload.generators[" + std::to_string(i) + "]";
                if (!(*gens)[i].is_object()) fail(path, "expected an object");
                sc.generators.push_back(parse_generator((*gens)[i], path));
            }
        }
    }

    if (const json* v = maybe(doc, "faults")) {
        if (!v->is_array()) fail("$.faults", "expected an array");
        for (std::size_t i = 0; i < v->size(); ++i) {
            const std::string path = "$.faults[" + std::to_string(i) + "]";
            if (!(*v)[i].is_object()) fail(path, "expected an object");
            sc.faults.push_back(parse_fault((*v)[i], path));
        }
    }

    if (const json* v = maybe(doc, "software_cache")) {
        if (!v->is_object()) fail("$.software_cache", "expected an object");
        sc.software_cache = parse_software_cache(*v, "$.software_cache");
    }

    sc.validate();
    return sc;
}

Scenario Scenario::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidScenario("cannot open scenario file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidScenario(path + ": " + e.what());
    }
    return from_json(doc);
}

void Scenario::validate() const {
    if (horizon <= 0) fail("$.horizon", "must be positive");
    if (sample_period <= 0) fail("$.sample_period", "must be positive");
    if (io_fault_rate_per_hour < 0.0 || io_fault_rate_per_hour > 1.0)
        fail("$.io_fault_rate_per_hour", "must be a probability in [0, 1]");

    if (scheduler.cycle_period <= 0) fail("$.scheduler.cycle_period", "must be positive");
    if (scheduler.match_period <= 0) fail("$.scheduler.match_period", "must be positive");
    if (scheduler.proxy_expiry_margin < scheduler.cycle_period)
        fail("$.scheduler.proxy_expiry_margin",
             "must be at least cycle_period or the sweep can miss an expiry");
    if (scheduler.lifetime_margin < scheduler.cycle_period)
        fail("$.scheduler.lifetime_margin", "must be at least cycle_period");
    if (scheduler.partition_whole_node_fraction < 0.0 ||
        scheduler.partition_whole_node_fraction > 1.0)
        fail("$.scheduler.partition_whole_node_fraction", "must be in [0, 1]");

    std::set<std::string> cloud_names;
    for (std::size_t i = 0; i < clouds.size(); ++i) {
        const std::string path = "$.clouds[" + std::to_string(i) + "]";
        const CloudSite& site = clouds[i];
        if (site.name.empty()) fail(path + ".name", "must not be empty");
        if (!cloud_names.insert(site.name).second) fail(path + ".name", "duplicate cloud");
        if (site.total_cores <= 0) fail(path + ".total_cores", "must be positive");
        if (site.total_memory_mb <= 0) fail(path + ".total_memory_mb", "must be positive");
        if (site.scratch_pool_gb < 0) fail(path + ".scratch_pool_gb", "must be >= 0");
        if (site.boot_fixed_delay < 0) fail(path + ".boot_fixed_delay", "must be >= 0");
        if (site.image_bandwidth_gb_per_s <= 0.0)
            fail(path + ".image_bandwidth_gb_per_s", "must be positive");
    }

    std::set<std::string> user_ids;
    for (std::size_t i = 0; i < users.size(); ++i) {
        const std::string path = "$.users[" + std::to_string(i) + "]";
        const UserSpec& user = users[i];
        if (user.user_id.empty()) fail(path + ".user_id", "must not be empty");
        if (!user_ids.insert(user.user_id).second) fail(path + ".user_id", "duplicate user");
        if (user.credential.lifetime <= scheduler.proxy_expiry_margin)
            fail(path + ".credential.lifetime",
                 "must exceed the proxy expiry margin or instances die at boot");
    }

    std::map<std::string, SimTime> image_available;
    for (std::size_t i = 0; i < images.size(); ++i) {
        const std::string path = "$.images[" + std::to_string(i) + "]";
        const ScenarioImage& entry = images[i];
        if (entry.image.image_id.empty()) fail(path + ".image_id", "must not be empty");
        if (image_available.count(entry.image.image_id))
            fail(path + ".image_id", "duplicate image");
        if (entry.image.size_gb <= 0.0) fail(path + ".size_gb", "must be positive");
        if (entry.save_at && *entry.save_at < 0) fail(path + ".save_at", "must be >= 0");
        if (!user_ids.count(entry.image.owner))
            fail(path + ".owner", "unknown user " + entry.image.owner);
        std::set<Hypervisor> seen;
        for (std::size_t k = 0; k < entry.image.variants.size(); ++k) {
            const ImageVariant& v = entry.image.variants[k];
            const std::string vpath = path + ".variants[" + std::to_string(k) + "]";
            if (v.location.empty()) fail(vpath + ".location", "must not be empty");
            if (!seen.insert(v.hypervisor).second)
                fail(vpath + ".hypervisor", "duplicate hypervisor variant");
        }
        image_available[entry.image.image_id] = entry.image.available_at;
    }

    auto check_common = [&](const std::string& path, const std::string& owner,
                            const std::string& vm_type, SimTime submit,
                            Seconds runtime_lo, Seconds runtime_hi, Seconds io,
                            const ResourceRequest& req,
                            const std::optional<std::set<std::string>>& constraint) {
        if (!user_ids.count(owner)) fail(path + ".owner", "unknown user " + owner);
        auto img = image_available.find(vm_type);
        if (img == image_available.end())
            fail(path + ".vm_type", "unknown image " + vm_type);
        if (submit < 0) fail(path + ".submit_time", "must be >= 0");
        if (submit < img->second)
            fail(path + ".submit_time", "job submitted before its image is available");
        if (runtime_lo < 0) fail(path + ".runtime_cpu", "must be >= 0");
        if (runtime_hi < runtime_lo) fail(path + ".runtime_cpu", "min must not exceed max");
        if (io < 0) fail(path + ".io_cost", "must be >= 0");
        if (req.cores < 1) fail(path + ".request.cores", "must be >= 1");
        if (req.memory_mb < 1) fail(path + ".request.memory_mb", "must be >= 1");
        if (req.blank_space_gb < 0) fail(path + ".request.blank_space_gb", "must be >= 0");
        if (constraint)
            for (const std::string& name : *constraint)
                if (!cloud_names.count(name))
                    fail(path + ".cloud_constraint", "unknown cloud " + name);
    };

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const std::string path = "$.workload.jobs[" + std::to_string(i) + "]";
        const JobSpec& job = jobs[i];
        check_common(path, job.owner, job.vm_type, job.submit_time, job.runtime_cpu,
                     job.runtime_cpu, job.io_cost, job.request, job.cloud_constraint);
        for (JobId dep : job.depends_on) {
            if (dep < 1 || static_cast<std::size_t>(dep) > jobs.size())
                fail(path + ".depends_on", "position out of range");
            const std::size_t parent = static_cast<std::size_t>(dep) - 1;
            if (parent == i) fail(path + ".depends_on", "job depends on itself");
            const bool parent_first =
                jobs[parent].submit_time < job.submit_time ||
                (jobs[parent].submit_time == job.submit_time && parent < i);
            if (!parent_first)
                fail(path + ".depends_on", "parent must be submitted no later than child");
        }
    }

    for (std::size_t i = 0; i < generators.size(); ++i) {
        const std::string path = "$.workload.generators[" + std::to_string(i) + "]";
        const GeneratorSpec& gen = generators[i];
        if (gen.count < 1) fail(path + ".count", "must be >= 1");
        if (gen.interarrival < 0) fail(path + ".interarrival", "must be >= 0");
        check_common(path, gen.owner, gen.vm_type, gen.start, gen.runtime_cpu_min,
                     gen.runtime_cpu_max, gen.io_cost, gen.request, gen.cloud_constraint);
    }

    for (std::size_t i = 0; i < faults.size(); ++i) {
        const std::string path = "$.faults[" + std::to_string(i) + "]";
        const FaultSpec& fault = faults[i];
        if (fault.time < 0) fail(path + ".time", "must be >= 0");
        switch (fault.kind) {
            case FaultSpec::Kind::VmFail:
                if (fault.vm_id.empty()) fail(path + ".vm_id", "must not be empty");
                break;
            case FaultSpec::Kind::CloudMaintenance:
                if (!cloud_names.count(fault.cloud))
                    fail(path + ".cloud", "unknown cloud " + fault.cloud);
                break;
            case FaultSpec::Kind::CredentialRenewal:
                if (!user_ids.count(fault.user)) fail(path + ".user", "unknown user " + fault.user);
                if (fault.lifetime <= scheduler.proxy_expiry_margin)
                    fail(path + ".lifetime", "must exceed the proxy expiry margin");
                break;
        }
    }

    if (software_cache.default_cold < 0 || software_cache.default_warm < 0)
        fail("$.software_cache", "stage-in costs must be >= 0");
    for (const auto& [vm_type, cost] : software_cache.per_vm_type) {
        if (cost.cold < 0 || cost.warm < 0)
            fail("$.software_cache.per_vm_type." + vm_type, "stage-in costs must be >= 0");
        if (!image_available.count(vm_type))
            fail("$.software_cache.per_vm_type." + vm_type, "unknown image");
    }
}

std::vector<JobSpec> Scenario::expand_workload(Rng& rng) const {
    struct Pending {
        JobSpec spec;
        std::size_t pos;
    };
    std::vector<Pending> all;
    for (std::size_t i = 0; i < jobs.size(); ++i) all.push_back({jobs[i], i});

    std::size_t pos = jobs.size();
    for (const GeneratorSpec& gen : generators) {
        for (int k = 0; k < gen.count; ++k) {
            JobSpec spec;
            spec.owner = gen.owner;
            spec.vm_type = gen.vm_type;
            spec.submit_time = gen.start + static_cast<SimTime>(k) * gen.interarrival;
            spec.runtime_cpu = gen.runtime_cpu_min == gen.runtime_cpu_max
                                   ? gen.runtime_cpu_min
                                   : rng.uniform_int(gen.runtime_cpu_min, gen.runtime_cpu_max);
            spec.io_cost = gen.io_cost;
            spec.request = gen.request;
            spec.cloud_constraint = gen.cloud_constraint;
            all.push_back({std::move(spec), pos++});
        }
    }

    std::sort(all.begin(), all.end(), [](const Pending& a, const Pending& b) {
        if (a.spec.submit_time != b.spec.submit_time)
            return a.spec.submit_time < b.spec.submit_time;
        return a.pos < b.pos;
    });

    // Listing position -> final 1-based job id, then rewrite dependencies.
    std::vector<JobId> id_of_pos(all.size(), 0);
    for (std::size_t i = 0; i < all.size(); ++i)
        id_of_pos[all[i].pos] = static_cast<JobId>(i) + 1;

    std::vector<JobSpec> out;
    out.reserve(all.size());
    for (Pending& p : all) {
        for (JobId& dep : p.spec.depends_on)
            dep = id_of_pos[static_cast<std::size_t>(dep) - 1];
        out.push_back(std::move(p.spec));
    }
    return out;
}

namespace {

nlohmann::ordered_json request_to_json(const ResourceRequest& req) {
    nlohmann::ordered_json out;
    out["cores"] = req.cores;
    out["memory_mb"] = req.memory_mb;
    out["arch"] = req.arch;
    out["blank_space_gb"] = req.blank_space_gb;
    if (req.instance_type) out["instance_type"] = *req.instance_type;
    return out;
}

}  // namespace

nlohmann::ordered_json Scenario::to_json() const {
    nlohmann::ordered_json doc;
    doc["name"] = name;
    doc["horizon"] = horizon;
    doc["seed"] = seed;
    doc["sample_period"] = sample_period;
    doc["io_fault_rate_per_hour"] = io_fault_rate_per_hour;

    nlohmann::ordered_json sched;
    sched["cycle_period"] = scheduler.cycle_period;
    sched["match_period"] = scheduler.match_period;
    sched["proxy_expiry_margin"] = scheduler.proxy_expiry_margin;
    sched["lifetime_margin"] = scheduler.lifetime_margin;
    sched["rebalance_enabled"] = scheduler.rebalance_enabled;
    sched["partition_policy"] =
        scheduler.partition_policy == PartitionPolicy::Off
            ? "off"
            : "separate-single-core-and-whole-node";
    sched["partition_whole_node_fraction"] = scheduler.partition_whole_node_fraction;
    doc["scheduler"] = std::move(sched);

    doc["clouds"] = nlohmann::ordered_json::array();
    for (const CloudSite& site : clouds) {
        nlohmann::ordered_json c;
        c["name"] = site.name;
        c["family"] = to_string(site.family);
        c["hypervisor"] = to_string(site.hypervisor);
        c["total_cores"] = site.total_cores;
        c["total_memory_mb"] = site.total_memory_mb;
        c["scratch_pool_gb"] = site.scratch_pool_gb;
        c["scratch_safeguard"] = site.scratch_safeguard;
        c["status"] = to_string(site.status);
        c["boot_fixed_delay"] = site.boot_fixed_delay;
        c["image_bandwidth_gb_per_s"] = site.image_bandwidth_gb_per_s;
        c["priority"] = site.priority;
        doc["clouds"].push_back(std::move(c));
    }

    doc["images"] = nlohmann::ordered_json::array();
    for (const ScenarioImage& entry : images) {
        nlohmann::ordered_json im;
        im["image_id"] = entry.image.image_id;
        im["owner"] = entry.image.owner;
        im["size_gb"] = entry.image.size_gb;
        im["variants"] = nlohmann::ordered_json::array();
        for (const ImageVariant& v : entry.image.variants) {
            nlohmann::ordered_json var;
            var["hypervisor"] = to_string(v.hypervisor);
            var["location"] = v.location;
            im["variants"].push_back(std::move(var));
        }
        if (entry.save_at) im["save_at"] = *entry.save_at;
        doc["images"].push_back(std::move(im));
    }

    doc["users"] = nlohmann::ordered_json::array();
    for (const UserSpec& user : users) {
        nlohmann::ordered_json u;
        u["user_id"] = user.user_id;
        nlohmann::ordered_json cred;
        cred["kind"] = to_string(user.credential.kind);
        cred["issued_at"] = user.credential.issued_at;
        cred["lifetime"] = user.credential.lifetime;
        u["credential"] = std::move(cred);
        doc["users"].push_back(std::move(u));
    }

    nlohmann::ordered_json workload;
    workload["jobs"] = nlohmann::ordered_json::array();
    for (const JobSpec& job : jobs) {
        nlohmann::ordered_json j;
        j["owner"] = job.owner;
        j["vm_type"] = job.vm_type;
        j["submit_time"] = job.submit_time;
        j["runtime_cpu"] = job.runtime_cpu;
        j["io_cost"] = job.io_cost;
        j["request"] = request_to_json(job.request);
        if (!job.depends_on.empty()) j["depends_on"] = job.depends_on;
        if (job.cloud_constraint)
            j["cloud_constraint"] = std::vector<std::string>(job.cloud_constraint->begin(),
                                                             job.cloud_constraint->end());
        workload["jobs"].push_back(std::move(j));
    }
    workload["generators"] = nlohmann::ordered_json::array();
    for (const GeneratorSpec& gen : generators) {
        nlohmann::ordered_json g;
        g["owner"] = gen.owner;
        g["vm_type"] = gen.vm_type;
        g["count"] = gen.count;
        g["start"] = gen.start;
        g["interarrival"] = gen.interarrival;
        if (gen.runtime_cpu_min == gen.runtime_cpu_max) {
            g["runtime_cpu"] = gen.runtime_cpu_min;
        } else {
            g["runtime_cpu"] = {{"min", gen.runtime_cpu_min}, {"max", gen.runtime_cpu_max}};
        }
        g["io_cost"] = gen.io_cost;
        g["request"] = request_to_json(gen.request);
        if (gen.cloud_constraint)
            g["cloud_constraint"] = std::vector<std::string>(gen.cloud_constraint->begin(),
                                                             gen.cloud_constraint->end());
        workload["generators"].push_back(std::move(g));
    }
    doc["workload"] = std::move(workload);

    doc["faults"] = nlohmann::ordered_json::array();
    for (const FaultSpec& fault : faults) {
        nlohmann::ordered_json f;
        switch (fault.kind) {
            case FaultSpec::Kind::VmFail:
                f["kind"] = "vm_fail";
                f["time"] = fault.time;
                f["vm_id"] = fault.vm_id;
                f["mode"] = fault.mode;
                break;
            case FaultSpec::Kind::CloudMaintenance:
                f["kind"] = "cloud_maintenance";
                f["time"] = fault.time;
                f["cloud"] = fault.cloud;
                f["on"] = fault.on;
                break;
            case FaultSpec::Kind::CredentialRenewal:
                f["kind"] = "credential_renewal";
                f["time"] = fault.time;
                f["user"] = fault.user;
                f["lifetime"] = fault.lifetime;
                break;
        }
        doc["faults"].push_back(std::move(f));
    }

    nlohmann::ordered_json cache;
    cache["default_cold_stagein"] = software_cache.default_cold;
    cache["default_warm_stagein"] = software_cache.default_warm;
    cache["per_vm_type"] = nlohmann::ordered_json::object();
    for (const auto& [vm_type, cost] : software_cache.per_vm_type) {
        nlohmann::ordered_json c;
        c["cold_stagein"] = cost.cold;
        c["warm_stagein"] = cost.warm;
        cache["per_vm_type"][vm_type] = std::move(c);
    }
    doc["software_cache"] = std::move(cache);

    return doc;
}

void Scenario::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << to_json().dump(2) << '\n';
    if (!out) throw IoError("short write to " + path);
}

}  // namespace stratus
