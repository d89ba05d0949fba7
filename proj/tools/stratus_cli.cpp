// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line surface over the engine. Every admin action is an offline
// scenario-file edit, so any run stays fully replayable from its inputs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stratus/errors.hpp"
#include "stratus/image_repo.hpp"
#include "stratus/scenario.hpp"
#include "stratus/simulator.hpp"

namespace fs = std::filesystem;
using stratus::Scenario;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitInvalid = 2;

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed,
            const std::string& out_dir) {
    Scenario scenario = Scenario::load_file(path);
    stratus::Engine engine(std::move(scenario), seed);
    const stratus::Engine::RunResult result = engine.run();

    fs::create_directories(out_dir);
    engine.log().write((fs::path(out_dir) / "events.log").string());
    engine.metrics().write_csv((fs::path(out_dir) / "samples.csv").string());
    {
        std::ofstream out(fs::path(out_dir) / "summary.json");
        if (!out) throw stratus::IoError("cannot write summary.json in " + out_dir);
        out << engine.summary().dump(2) << '\n';
    }
    {
        std::ofstream out(fs::path(out_dir) / "queue.jsonl");
        if (!out) throw stratus::IoError("cannot write queue.jsonl in " + out_dir);
        engine.queue().dump_jsonl(out);
    }

    std::cout << "run: scenario=" << engine.scenario().name << " seed=" << engine.seed()
              << " end_time=" << result.end_time
              << " quiesced=" << (result.quiesced ? "yes" : "no")
              << " completed=" << engine.metrics().completed()
              << " efficiency=" << engine.metrics().aggregate_efficiency() << '\n'
              << "wrote " << out_dir << "/{events.log, samples.csv, summary.json, queue.jsonl}"
              << '\n';
    return kExitOk;
}

int cmd_submit(const std::string& path, const std::string& inline_spec) {
    Scenario scenario = Scenario::load_file(path);
    nlohmann::json job;
    try {
        job = nlohmann::json::parse(inline_spec);
    } catch (const nlohmann::json::parse_error& e) {
        throw stratus::InvalidScenario(std::string("--inline is not valid JSON: ") + e.what());
    }
    nlohmann::json doc = scenario.to_json();
    doc["workload"]["jobs"].push_back(job);
    Scenario updated = Scenario::from_json(doc);  // revalidates the whole file
    updated.validate();
    updated.save_file(path);
    std::cout << "submit: appended 1 job to " << path << " ("
              << updated.jobs.size() << " explicit jobs)" << '\n';
    return kExitOk;
}

int cmd_status(const std::string& run_dir) {
    const fs::path summary_path = fs::path(run_dir) / "summary.json";
    std::ifstream in(summary_path);
    if (!in) throw stratus::IoError("cannot open " + summary_path.string());
    nlohmann::json doc = nlohmann::json::parse(in);

    std::cout << "scenario: " << doc.value("scenario", std::string("?")) << " (seed "
              << doc.value("seed", 0) << ")\n"
              << "end_time: " << doc.value("end_time", 0)
              << "  quiesced: " << (doc.value("quiesced", false) ? "yes" : "no") << '\n';

    std::cout << "jobs:";
    for (const auto& [state, n] : doc.at("jobs_by_state").items())
        std::cout << ' ' << state << '=' << n.get<int>();
    std::cout << "  (failed attempts: " << doc.value("failed", 0) << ")\n";

    std::cout << "completed per cloud:";
    for (const auto& [cloud, n] : doc.at("per_cloud_completed").items())
        std::cout << ' ' << cloud << '=' << n.get<int>();
    std::cout << '\n';

    std::cout << "queue wait: mean=" << doc.value("mean_queue_wait", 0.0)
              << "s p95=" << doc.value("p95_queue_wait", 0) << "s\n"
              << "aggregate efficiency: " << doc.value("aggregate_efficiency", 0.0) << '\n';

    for (const auto& cloud : doc.at("clouds")) {
        std::cout << "cloud " << cloud.at("name").get<std::string>() << ": "
                  << cloud.at("status").get<std::string>() << ", cores "
                  << cloud.at("committed_cores").get<int>() << '/'
                  << cloud.at("total_cores").get<int>() << ", instances "
                  << cloud.at("instances").size() << " live, " << cloud.at("total_booted")
                  << " booted total\n";
    }
    return kExitOk;
}

stratus::CloudSite make_site(const std::string& name, const std::string& family,
                             const std::string& hypervisor, int cores, long memory_mb,
                             int scratch_gb, bool safeguard, stratus::Seconds boot_delay,
                             double bandwidth, int priority) {
    stratus::CloudSite site;
    site.name = name;
    if (auto f = stratus::parse_cloud_family(family))
        site.family = *f;
    else
        throw stratus::InvalidScenario("--family: expected \"nimbus-like\" or \"openstack-like\"");
    if (auto h = stratus::parse_hypervisor(hypervisor))
        site.hypervisor = *h;
    else
        throw stratus::InvalidScenario("--hypervisor: expected \"kvm\" or \"xen\"");
    site.auth_mode = site.family == stratus::CloudFamily::NimbusLike
                         ? stratus::AuthKind::PerUserProxy
                         : stratus::AuthKind::SharedGroupKey;
    site.total_cores = cores;
    site.total_memory_mb = memory_mb;
    site.scratch_pool_gb = scratch_gb;
    site.scratch_safeguard = safeguard;
    site.boot_fixed_delay = boot_delay;
    site.image_bandwidth_gb_per_s = bandwidth;
    site.priority = priority;
    return site;
}

void save_checked(Scenario& scenario, const std::string& path) {
    scenario.validate();
    scenario.save_file(path);
}

int cmd_image_list(const std::string& path) {
    Scenario scenario = Scenario::load_file(path);
    for (const stratus::ScenarioImage& entry : scenario.images) {
        const stratus::VMImage& image = entry.image;
        std::cout << image.image_id << ": owner=" << image.owner
                  << " size_gb=" << image.size_gb << " variants=";
        for (std::size_t i = 0; i < image.variants.size(); ++i)
            std::cout << (i ? "," : "") << stratus::to_string(image.variants[i].hypervisor);
        if (entry.save_at) {
            std::cout << " save_at=" << *entry.save_at << " available_at="
                      << *entry.save_at +
                             stratus::ImageRepository::save_duration(image.size_gb);
        } else {
            std::cout << " available_at=0";
        }
        std::cout << '\n';
    }
    return kExitOk;
}

std::vector<stratus::ImageVariant> parse_variants(const std::vector<std::string>& specs) {
    std::vector<stratus::ImageVariant> variants;
    for (const std::string& spec : specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw stratus::InvalidScenario("--variant: expected <hypervisor>=<location>");
        const auto hv = stratus::parse_hypervisor(spec.substr(0, eq));
        if (!hv)
            throw stratus::InvalidScenario("--variant: expected \"kvm\" or \"xen\" before '='");
        variants.push_back({*hv, spec.substr(eq + 1)});
    }
    return variants;
}

int cmd_replay(const std::string& path_a, const std::string& path_b) {
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw stratus::IoError("cannot open " + p);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    const std::string a = slurp(path_a);
    const std::string b = slurp(path_b);
    if (a == b) {
        std::cout << "identical (" << a.size() << " bytes)\n";
        return kExitOk;
    }
    std::istringstream sa(a), sb(b);
    std::string la, lb;
    for (int line = 1;; ++line) {
        const bool more_a = static_cast<bool>(std::getline(sa, la));
        const bool more_b = static_cast<bool>(std::getline(sb, lb));
        if (!more_a && !more_b) break;
        if (la != lb || more_a != more_b) {
            std::cout << "logs differ at line " << line << ":\n  a: "
                      << (more_a ? la : std::string("<eof>")) << "\n  b: "
                      << (more_b ? lb : std::string("<eof>")) << '\n';
            break;
        }
    }
    return kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stratus: deterministic multi-cloud batch scheduling simulator"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "execute a scenario and write its outputs");
    std::string run_scenario, run_out = "run-out";
    std::optional<std::uint64_t> run_seed;
    run->add_option("scenario", run_scenario, "scenario file")->required();
    run->add_option("--seed", run_seed, "override the scenario seed");
    run->add_option("--out", run_out, "output directory (default run-out)");

    // submit
    auto* submit = app.add_subcommand("submit", "append a job to a scenario file");
    std::string submit_scenario, submit_inline;
    submit->add_option("scenario", submit_scenario, "scenario file")->required();
    submit->add_option("--inline", submit_inline, "job spec as a JSON object")->required();

    // status
    auto* status = app.add_subcommand("status", "print the summary of a finished run");
    std::string status_dir;
    status->add_option("run_dir", status_dir, "directory written by `run`")->required();

    // cloud add|remove|maintain
    auto* cloud = app.add_subcommand("cloud", "edit the cloud list of a scenario file");
    cloud->require_subcommand(1);
    std::string cloud_file, cloud_name;
    std::string add_family = "nimbus-like", add_hypervisor = "kvm";
    int add_cores = 8;
    long add_memory = 16384;
    int add_scratch = 0, add_priority = 0;
    stratus::Seconds add_boot_delay = 300;
    double add_bandwidth = 0.1;
    bool add_no_safeguard = false, maintain_off = false;

    auto* cloud_add = cloud->add_subcommand("add", "append a cloud");
    cloud_add->add_option("name", cloud_name)->required();
    cloud_add->add_option("--file", cloud_file, "scenario file")->required();
    cloud_add->add_option("--family", add_family, "nimbus-like | openstack-like");
    cloud_add->add_option("--hypervisor", add_hypervisor, "kvm | xen");
    cloud_add->add_option("--cores", add_cores, "total cores");
    cloud_add->add_option("--memory-mb", add_memory, "total memory");
    cloud_add->add_option("--scratch-gb", add_scratch, "scratch pool");
    cloud_add->add_flag("--no-scratch-safeguard", add_no_safeguard,
                        "accept scratch requests beyond the pool");
    cloud_add->add_option("--boot-delay", add_boot_delay, "fixed boot delay, seconds");
    cloud_add->add_option("--bandwidth", add_bandwidth, "image transfer GB/s");
    cloud_add->add_option("--priority", add_priority, "placement priority");

    auto* cloud_remove = cloud->add_subcommand("remove", "delete a cloud by name");
    cloud_remove->add_option("name", cloud_name)->required();
    cloud_remove->add_option("--file", cloud_file, "scenario file")->required();

    auto* cloud_maintain = cloud->add_subcommand("maintain", "set maintenance status");
    cloud_maintain->add_option("name", cloud_name)->required();
    cloud_maintain->add_option("--file", cloud_file, "scenario file")->required();
    cloud_maintain->add_flag("--off", maintain_off, "back to Active instead");

    // vm stop
    auto* vm = app.add_subcommand("vm", "instance admin actions (scenario-edit)");
    vm->require_subcommand(1);
    auto* vm_stop = vm->add_subcommand("stop", "schedule an admin terminate");
    std::string vm_file, vm_id;
    stratus::SimTime vm_at = 0;
    vm_stop->add_option("vm_id", vm_id)->required();
    vm_stop->add_option("--at", vm_at, "sim-time of the stop")->required();
    vm_stop->add_option("--file", vm_file, "scenario file")->required();

    // image save|list
    auto* image = app.add_subcommand("image", "edit the image catalog of a scenario file");
    image->require_subcommand(1);
    std::string image_file, image_id, image_owner;
    double image_size = 0.0;
    stratus::SimTime image_at = 0;
    std::vector<std::string> image_variants;
    auto* image_save = image->add_subcommand("save", "register an image save");
    image_save->add_option("image_id", image_id)->required();
    image_save->add_option("--file", image_file, "scenario file")->required();
    image_save->add_option("--owner", image_owner, "image owner")->required();
    image_save->add_option("--size-gb", image_size, "image size")->required();
    image_save->add_option("--at", image_at, "sim-time the save starts");
    image_save->add_option("--variant", image_variants, "<hypervisor>=<location>")
        ->required();
    auto* image_list = image->add_subcommand("list", "print the catalog");
    image_list->add_option("--file", image_file, "scenario file")->required();

    // replay
    auto* replay = app.add_subcommand("replay", "byte-compare two event logs");
    std::string replay_a, replay_b;
    replay->add_option("log_a", replay_a)->required();
    replay->add_option("log_b", replay_b)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*run) return cmd_run(run_scenario, run_seed, run_out);
        if (*submit) return cmd_submit(submit_scenario, submit_inline);
        if (*status) return cmd_status(status_dir);
        if (*cloud_add) {
            Scenario scenario = Scenario::load_file(cloud_file);
            scenario.clouds.push_back(make_site(cloud_name, add_family, add_hypervisor,
                                                add_cores, add_memory, add_scratch,
                                                !add_no_safeguard, add_boot_delay,
                                                add_bandwidth, add_priority));
            save_checked(scenario, cloud_file);
            std::cout << "cloud add: " << cloud_name << " -> " << cloud_file << '\n';
            return kExitOk;
        }
        if (*cloud_remove) {
            Scenario scenario = Scenario::load_file(cloud_file);
            const auto before = scenario.clouds.size();
            std::erase_if(scenario.clouds,
                          [&](const stratus::CloudSite& s) { return s.name == cloud_name; });
            if (scenario.clouds.size() == before)
                throw stratus::InvalidScenario("no cloud named \"" + cloud_name + "\"");
            save_checked(scenario, cloud_file);
            std::cout << "cloud remove: " << cloud_name << " -> " << cloud_file << '\n';
            return kExitOk;
        }
        if (*cloud_maintain) {
            Scenario scenario = Scenario::load_file(cloud_file);
            bool found = false;
            for (stratus::CloudSite& site : scenario.clouds)
                if (site.name == cloud_name) {
                    site.status = maintain_off ? stratus::CloudStatus::Active
                                               : stratus::CloudStatus::Maintenance;
                    found = true;
                }
            if (!found) throw stratus::InvalidScenario("no cloud named \"" + cloud_name + "\"");
            save_checked(scenario, cloud_file);
            std::cout << "cloud maintain: " << cloud_name << " -> "
                      << (maintain_off ? "Active" : "Maintenance") << '\n';
            return kExitOk;
        }
        if (*vm_stop) {
            Scenario scenario = Scenario::load_file(vm_file);
            stratus::FaultSpec fault;
            fault.kind = stratus::FaultSpec::Kind::VmFail;
            fault.time = vm_at;
            fault.vm_id = vm_id;
            fault.mode = "stop";
            scenario.faults.push_back(std::move(fault));
            save_checked(scenario, vm_file);
            std::cout << "vm stop: " << vm_id << " at " << vm_at << " -> " << vm_file << '\n';
            return kExitOk;
        }
        if (*image_save) {
            Scenario scenario = Scenario::load_file(image_file);
            stratus::ScenarioImage entry;
            entry.image.image_id = image_id;
            entry.image.owner = image_owner;
            entry.image.size_gb = image_size;
            entry.image.variants = parse_variants(image_variants);
            entry.save_at = image_at;
            scenario.images.push_back(std::move(entry));
            save_checked(scenario, image_file);
            std::cout << "image save: " << image_id << " available_at="
                      << image_at + stratus::ImageRepository::save_duration(image_size)
                      << " -> " << image_file << '\n';
            return kExitOk;
        }
        if (*image_list) return cmd_image_list(image_file);
        if (*replay) return cmd_replay(replay_a, replay_b);
    } catch (const stratus::InvalidScenario& e) {
        std::cerr << "invalid scenario: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const stratus::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitInvalid;
}
