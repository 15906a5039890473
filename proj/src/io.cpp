#include "nfsched/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "nfsched/error.hpp"

namespace nfsched {

using nlohmann::json;

namespace {

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw Error(ErrorCode::ParseError, std::string("missing numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

int integer(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw Error(ErrorCode::ParseError, std::string("missing integer field '") + key + "'");
  }
  return j.at(key).get<int>();
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

}  // namespace

InstanceDocument parse_instance(const std::string& text) {
  const json j = parse_json(text);
  if (!j.is_object() || !j.contains("packets") || !j.at("packets").is_array()) {
    throw Error(ErrorCode::ParseError, "expected an object with a 'packets' array");
  }
  InstanceDocument doc;
  if (j.contains("noise_power")) doc.noise_power = number(j, "noise_power");
  for (const json& p : j.at("packets")) {
    doc.packets.push_back({integer(p, "id"), number(p, "bits"), number(p, "arrival"), number(p, "deadline")});
  }
  return doc;
}

json instance_to_json(const Instance& instance, double noise_power) {
  json packets = json::array();
  for (const Packet& p : instance.packets()) {
    packets.push_back({{"id", p.id}, {"bits", p.bits}, {"arrival", p.arrival}, {"deadline", p.deadline}});
  }
  return {{"noise_power", noise_power}, {"packets", packets}};
}

std::string dump_instance(const Instance& instance, double noise_power) {
  return instance_to_json(instance, noise_power).dump(2) + "\n";
}

json schedule_to_json(const Schedule& schedule) {
  json out;
  out["energy"] = schedule.energy;
  json rates = json::array();
  for (std::size_t i = 0; i < schedule.rates.size(); ++i) {
    rates.push_back({{"id", static_cast<int>(i + 1)}, {"rate", schedule.rates[i]}});
  }
  out["rates"] = rates;
  json segments = json::array();
  for (const Segment& s : schedule.segments) {
    segments.push_back({{"id", s.packet}, {"start", s.start}, {"end", s.end}, {"rate", s.rate}});
  }
  out["segments"] = segments;
  json iterations = json::array();
  if (schedule.trace) {
    for (const auto& it : schedule.trace->iterations) {
      json pieces = json::array();
      for (const auto& p : it.pieces) pieces.push_back({p.start, p.end});
      iterations.push_back({{"rate", it.chosen.rate}, {"packets", it.chosen.contained}, {"pieces", pieces}});
    }
  }
  out["iterations"] = iterations;
  return out;
}

json oracle_to_json(const Instance& instance, const OracleSolution& solution) {
  json out;
  out["energy"] = solution.energy;
  json rates = json::array();
  for (std::size_t i = 0; i < solution.rates.size(); ++i) {
    rates.push_back({{"id", static_cast<int>(i + 1)}, {"rate", solution.rates[i]}});
  }
  out["rates"] = rates;
  json tau = json::array();
  const auto d = decompose(instance);
  for (std::size_t i = 0; i < instance.size(); ++i) {
    for (std::size_t j : d.epochs_of_packet[i]) {
      tau.push_back({{"id", static_cast<int>(i + 1)}, {"epoch", static_cast<int>(j + 1)},
                     {"tau", solution.tau(i, j)}});
    }
  }
  out["tau"] = tau;
  out["iterations"] = json::array();
  out["oracle"] = {{"iterations", solution.iterations},
                   {"residual", solution.residual},
                   {"converged", solution.converged}};
  return out;
}

Schedule parse_schedule(const std::string& text, const Instance& instance) {
  const json j = parse_json(text);
  if (!j.is_object() || !j.contains("rates") || !j.at("rates").is_array()) {
    throw Error(ErrorCode::ParseError, "expected an object with a 'rates' array");
  }
  const auto d = decompose(instance);
  Schedule s;
  s.energy = j.contains("energy") ? number(j, "energy") : 0.0;
  s.rates.assign(instance.size(), 0.0);
  for (const json& r : j.at("rates")) {
    const int id = integer(r, "id");
    if (id < 1 || static_cast<std::size_t>(id) > instance.size()) {
      throw Error(ErrorCode::DimensionMismatch, "rate for unknown packet " + std::to_string(id));
    }
    s.rates[static_cast<std::size_t>(id - 1)] = number(r, "rate");
  }
  if (j.contains("segments")) {
    for (const json& seg : j.at("segments")) {
      s.segments.push_back({integer(seg, "id"), number(seg, "start"), number(seg, "end"), number(seg, "rate")});
    }
  }
  if (j.contains("tau")) {
    s.tau = AllocationTable(instance.size(), d.epoch_count());
    for (const json& t : j.at("tau")) {
      const int id = integer(t, "id");
      const int epoch = integer(t, "epoch");
      if (id < 1 || static_cast<std::size_t>(id) > instance.size() || epoch < 1 ||
          static_cast<std::size_t>(epoch) > d.epoch_count()) {
        throw Error(ErrorCode::DimensionMismatch, "tau entry out of range");
      }
      s.tau(static_cast<std::size_t>(id - 1), static_cast<std::size_t>(epoch - 1)) = number(t, "tau");
    }
  } else {
    s.tau = tau_from_segments(d, s.segments);
  }
  if (j.contains("iterations") && !j.at("iterations").empty()) {
    IterationTrace trace;
    for (const json& it : j.at("iterations")) {
      IterationRecord rec;
      rec.chosen.rate = number(it, "rate");
      if (it.contains("packets")) rec.chosen.contained = it.at("packets").get<std::vector<int>>();
      if (it.contains("pieces")) {
        for (const json& p : it.at("pieces")) rec.pieces.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      }
      trace.iterations.push_back(std::move(rec));
    }
    s.trace = std::move(trace);
  }
  return s;
}

json certificate_to_json(const KKTCertificate& c) {
  json gamma = json::array();
  for (const auto& g : c.gamma) gamma.push_back({{"id", g.packet}, {"epoch", g.epoch}, {"value", g.value}});
  return {{"beta", c.beta},
          {"lambda", c.lambda},
          {"eta", c.eta},
          {"gamma", gamma},
          {"max_rate_residual", c.max_rate_residual},
          {"max_stationarity_residual", c.max_stationarity_residual},
          {"max_slackness_residual", c.max_slackness_residual}};
}

std::string tau_csv(const Instance& instance, const Schedule& schedule) {
  const auto d = decompose(instance);
  std::ostringstream os;
  os << std::setprecision(17);
  os << "packet,epoch,start,end,tau\n";
  for (std::size_t i = 0; i < instance.size(); ++i) {
    for (std::size_t j : d.epochs_of_packet[i]) {
      os << i + 1 << ',' << j + 1 << ',' << d.epochs[j].start << ',' << d.epochs[j].end << ','
         << schedule.tau(i, j) << '\n';
    }
  }
  return os.str();
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  out << text;
}

}  // namespace nfsched
