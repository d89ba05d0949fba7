// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stratus/types.hpp"

namespace stratus {

/// A delegated credential: either a short-lived per-user proxy (default
/// 12 hours) or a long-lived shared group key. Only per-user proxies are
/// subject to expiry-driven instance shutdown.
struct Credential {
    std::string owner;
    SimTime issued_at = 0;
    Seconds lifetime = 43200;
    AuthKind kind = AuthKind::PerUserProxy;

    SimTime expiry() const { return issued_at + lifetime; }
    bool expired(SimTime now) const { return expiry() <= now; }
};

struct ImageVariant {
    Hypervisor hypervisor = Hypervisor::Kvm;
    std::string location;
};

/// A catalog entry grouping per-hypervisor variants of one logical image.
/// An image with both a kvm and a xen variant boots on any site regardless
/// of hypervisor type.
struct VMImage {
    std::string image_id;
    std::string owner;
    double size_gb = 0.0;
    std::vector<ImageVariant> variants;
    /// First sim-time at which catalog lookups see this image.
    SimTime available_at = 0;

    const ImageVariant* variant_for(Hypervisor h) const;
    bool dual_hypervisor() const;
};

/// What a job needs from the instance that will run it. `cores` sizes the
/// instance to boot (8 for a whole-node request); the job itself occupies a
/// single slot once the instance is up.
struct ResourceRequest {
    int cores = 1;
    int memory_mb = 2048;
    std::string arch = "x86_64";
    /// Scratch block device attached at boot, nimbus-like sites only.
    int blank_space_gb = 0;
    /// Flavor name, required by openstack-like sites.
    std::optional<std::string> instance_type;

    bool whole_node() const { return cores > 1; }
};

struct Job {
    JobId job_id = 0;
    std::string owner;
    /// Image the job must run on; matches VMInstance::image.
    std::string vm_type;
    ResourceRequest request;
    SimTime submit_time = 0;
    Seconds runtime_cpu = 0;
    /// Data-access seconds added to the wallclock of every attempt.
    Seconds io_cost = 0;
    JobState state = JobState::Idle;
    std::vector<JobId> depends_on;
    /// When present, restricts both slot matching and boot targeting.
    std::optional<std::set<std::string>> cloud_constraint;

    // Attempt bookkeeping, maintained by the engine.
    int attempt = 0;              // current attempt number, 0 = never started
    int exposure_epoch = 0;       // bumps when the attempt gains io-fault exposure
    SimTime attempt_start = -1;
    Seconds attempt_wall = 0;     // planned wallclock of the current attempt
    Seconds attempt_stagein = 0;
    std::string attempt_vm;
    int attempt_slot = -1;
    SimTime interrupted_at = -1;  // progress stop time when the host errored
    Seconds wasted = 0;           // accumulated cpu-seconds lost to failed attempts
    SimTime first_start = -1;
    SimTime completed_at = -1;
    std::string completed_on_cloud;

    bool allows_cloud(const std::string& cloud) const {
        return !cloud_constraint || cloud_constraint->count(cloud) > 0;
    }
};

struct VMInstance {
    std::string vm_id;
    std::string owner;
    std::string image;
    std::string cloud;
    Hypervisor hypervisor = Hypervisor::Kvm;
    int slots = 1;
    int memory_mb = 0;
    std::vector<std::optional<JobId>> slot_occupancy;
    /// Time the boot request was accepted; lifetime counts from here.
    SimTime booted_at = 0;
    std::optional<Seconds> lifetime_limit;
    /// Owner of the credential that manages this instance; the current
    /// credential is looked up at sweep time so renewals take effect.
    std::string credential_owner;
    AuthKind credential_kind = AuthKind::PerUserProxy;
    VmState state = VmState::Requested;
    int blank_space_gb = 0;
    std::uint64_t created_seq = 0;  // global creation order

    int occupied_slots() const;
    int free_slots() const;
    std::optional<int> first_free_slot() const;
    bool accepts_jobs() const { return state == VmState::Running; }
    bool terminated() const { return state == VmState::Terminated; }
};

struct CloudSite {
    std::string name;
    CloudFamily family = CloudFamily::NimbusLike;
    Hypervisor hypervisor = Hypervisor::Kvm;
    int total_cores = 0;
    long total_memory_mb = 0;
    int scratch_pool_gb = 0;
    /// When false the site accepts scratch requests beyond the pool, which
    /// exposes every job on the site to I/O faults while over-committed.
    bool scratch_safeguard = true;
    CloudStatus status = CloudStatus::Active;
    AuthKind auth_mode = AuthKind::PerUserProxy;
    Seconds boot_fixed_delay = 0;
    double image_bandwidth_gb_per_s = 0.1;
    int priority = 0;
};

/// Default instance lifetime on nimbus-like sites: seven days. Openstack-like
/// instances have no lifetime limit.
inline constexpr Seconds kNimbusDefaultLifetime = 604800;

/// A decision to boot one user-specific instance on a chosen site.
struct BootRequest {
    std::string owner;
    std::string image;
    ResourceRequest request;
    std::string target_cloud;
    bool whole_node = false;
};

/// Outcome of validating the boot contract of one (job, cloud, image,
/// credential) combination.
enum class ValidationCode { Ok, MissingField, HypervisorMismatch, ExpiredCredential };

struct Validation {
    ValidationCode code = ValidationCode::Ok;
    std::string field;  // set for MissingField

    bool ok() const { return code == ValidationCode::Ok; }
    std::string describe() const;

    static Validation good() { return {}; }
    static Validation missing(std::string f) {
        return {ValidationCode::MissingField, std::move(f)};
    }
};

/// Checks the family-specific boot contract: nimbus-like sites need an image
/// location, a fresh per-user proxy, and explicit arch/cores/memory;
/// openstack-like sites need an image identifier, an instance type and the
/// shared group key. Both need an image variant for the site's hypervisor.
Validation validate_boot_parameters(const Job& job, const CloudSite& cloud,
                                    const VMImage& image, const Credential& cred,
                                    SimTime now);

}  // namespace stratus
