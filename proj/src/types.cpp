// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#include "stratus/types.hpp"

namespace stratus {

std::string to_string(Hypervisor v) {
    return v == Hypervisor::Kvm ? "kvm" : "xen";
}

std::string to_string(CloudFamily v) {
    return v == CloudFamily::NimbusLike ? "nimbus-like" : "openstack-like";
}

std::string to_string(AuthKind v) {
    return v == AuthKind::PerUserProxy ? "per-user-proxy" : "shared-group-key";
}

std::string to_string(CloudStatus v) {
    return v == CloudStatus::Active ? "Active" : "Maintenance";
}

std::string to_string(JobState v) {
    switch (v) {
        case JobState::Idle: return "Idle";
        case JobState::Running: return "Running";
        case JobState::Completed: return "Completed";
        case JobState::Held: return "Held";
    }
    return "?";
}

std::string to_string(VmState v) {
    switch (v) {
        case VmState::Requested: return "Requested";
        case VmState::Booting: return "Booting";
        case VmState::Running: return "Running";
        case VmState::Retiring: return "Retiring";
        case VmState::Error: return "Error";
        case VmState::Terminated: return "Terminated";
    }
    return "?";
}

std::optional<Hypervisor> parse_hypervisor(const std::string& s) {
    if (s == "kvm") return Hypervisor::Kvm;
    if (s == "xen") return Hypervisor::Xen;
    return std::nullopt;
}

std::optional<CloudFamily> parse_cloud_family(const std::string& s) {
    if (s == "nimbus-like") return CloudFamily::NimbusLike;
    if (s == "openstack-like") return CloudFamily::OpenstackLike;
    return std::nullopt;
}

std::optional<AuthKind> parse_auth_kind(const std::string& s) {
    if (s == "per-user-proxy") return AuthKind::PerUserProxy;
    if (s == "shared-group-key") return AuthKind::SharedGroupKey;
    return std::nullopt;
}

std::optional<CloudStatus> parse_cloud_status(const std::string& s) {
    if (s == "Active") return CloudStatus::Active;
    if (s == "Maintenance") return CloudStatus::Maintenance;
    return std::nullopt;
}

bool vm_transition_allowed(VmState from, VmState to) {
    switch (from) {
        case VmState::Requested:
            return to == VmState::Booting;
        case VmState::Booting:
            // Terminated covers admin stops and expiry kills during boot.
            return to == VmState::Running || to == VmState::Error ||
                   to == VmState::Terminated;
        case VmState::Running:
            return to == VmState::Retiring || to == VmState::Error ||
                   to == VmState::Terminated;
        case VmState::Retiring:
            return to == VmState::Terminated;
        case VmState::Error:
            return to == VmState::Terminated;
        case VmState::Terminated:
            return false;
    }
    return false;
}

bool job_transition_allowed(JobState from, JobState to) {
    switch (from) {
        case JobState::Idle:
            return to == JobState::Running;
        case JobState::Running:
            // Back to Idle means the attempt was interrupted and the job
            // requeues at its original position.
            return to == JobState::Completed || to == JobState::Idle;
        case JobState::Held:
            return to == JobState::Idle;
        case JobState::Completed:
            return false;
    }
    return false;
}

}  // namespace stratus
