#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nfsched/core_model.hpp"
#include "nfsched/oracle.hpp"
#include "nfsched/scheduler.hpp"
#include "nfsched/verifier.hpp"

namespace nfsched {

/// Contents of an instance file, before normalization.
struct InstanceDocument {
  std::vector<Packet> packets;
  double noise_power = 1.0;
};

/// Parses `{"noise_power": x, "packets": [{"id", "bits", "arrival", "deadline"}, ...]}`.
/// Throws ParseError on bad JSON or missing fields.
InstanceDocument parse_instance(const std::string& text);
nlohmann::json instance_to_json(const Instance& instance, double noise_power = 1.0);
std::string dump_instance(const Instance& instance, double noise_power = 1.0);

nlohmann::json schedule_to_json(const Schedule& schedule);
/// Oracle output: rates, energy and the tau table; no segments or iterations.
nlohmann::json oracle_to_json(const Instance& instance, const OracleSolution& solution);

/// Reads a schedule document back against its instance. Tau comes from the "tau" array
/// when present, otherwise from the segments. Iteration rates and packet sets become a
/// trace when "iterations" is present.
Schedule parse_schedule(const std::string& text, const Instance& instance);

nlohmann::json certificate_to_json(const KKTCertificate& certificate);

/// `packet,epoch,start,end,tau` rows for every packet and each epoch of its life time.
std::string tau_csv(const Instance& instance, const Schedule& schedule);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace nfsched
