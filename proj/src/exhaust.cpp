#include "cappedigw/exhaust.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "cappedigw/csv.hpp"

namespace cigw {

using nlohmann::json;

std::string encode_exhaust(const ExhaustRecord& r) {
  json j = json::object();
  j["round"] = r.round;
  j["context"] = r.context.features;
  j["action"] = r.action;
  j["propensity"] = r.propensity;
  j["loss"] = r.loss;
  j["is_greedy"] = r.is_greedy;
  j["algorithm"] = std::string(to_string(r.algorithm));
  j["beta"] = r.beta;
  j["tau"] = r.tau;
  j["gamma"] = r.gamma;
  j["kappa_inf"] = r.kappa_inf;
  return j.dump();
}

namespace {

template <typename T>
T field(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(line, std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ParseError(line, std::string("bad field '") + key + "': " + e.what());
  }
}

}  // namespace

ExhaustRecord decode_exhaust(const std::string& line, std::size_t line_number) {
  if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ParseError(line_number, "empty line");
  }
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(line_number, e.what());
  }
  if (!j.is_object()) throw ParseError(line_number, "expected a JSON object");

  ExhaustRecord r;
  r.round = field<std::int64_t>(j, "round", line_number);
  r.context.features = field<std::vector<double>>(j, "context", line_number);
  r.action = field<double>(j, "action", line_number);
  r.propensity = field<double>(j, "propensity", line_number);
  r.loss = field<double>(j, "loss", line_number);
  r.is_greedy = field<bool>(j, "is_greedy", line_number);
  try {
    r.algorithm = parse_algorithm(field<std::string>(j, "algorithm", line_number));
  } catch (const InvalidConfig& e) {
    throw ParseError(line_number, e.what());
  }
  r.beta = field<double>(j, "beta", line_number);
  r.tau = field<double>(j, "tau", line_number);
  r.gamma = field<double>(j, "gamma", line_number);
  r.kappa_inf = field<double>(j, "kappa_inf", line_number);
  return r;
}

std::vector<std::string> check_invariants(const ExhaustRecord& r) {
  std::vector<std::string> problems;
  if (!(r.action >= 0.0 && r.action <= 1.0)) problems.push_back("action outside [0, 1]");
  if (!(r.loss >= 0.0 && r.loss <= 1.0)) problems.push_back("loss outside [0, 1]");
  if (!(r.propensity >= 0.0)) problems.push_back("negative propensity");
  if (!r.is_greedy && !(r.propensity > 0.0)) {
    problems.push_back("non-greedy record without positive propensity");
  }
  if (r.is_greedy && r.algorithm != Algorithm::kSmoothIgw) {
    problems.push_back("greedy flag is only valid for smooth_igw records");
  }
  for (double v : r.context.features) {
    if (!std::isfinite(v)) {
      problems.push_back("non-finite context feature");
      break;
    }
  }
  return problems;
}

void write_exhaust(std::ostream& out, const std::vector<ExhaustRecord>& records) {
  for (const auto& r : records) out << encode_exhaust(r) << '\n';
}

std::vector<ExhaustRecord> read_exhaust(std::istream& in) {
  std::vector<ExhaustRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    records.push_back(decode_exhaust(line, line_number));
  }
  return records;
}

std::vector<ExhaustRecord> read_exhaust_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open exhaust file: " + path);
  return read_exhaust(in);
}

void write_metrics_csv(std::ostream& out, const std::vector<RoundMetrics>& metrics) {
  out << "round,loss,pv_loss,beta,normcs_samples,rejection_draws,greedy_mass,kappa_hat\n";
  for (const auto& m : metrics) {
    out << m.round << ',' << csv::num(m.loss) << ',' << csv::num(m.pv_loss) << ','
        << csv::num(m.beta) << ',' << m.normcs_samples << ',' << m.rejection_draws << ','
        << csv::num(m.greedy_mass) << ',' << csv::num(m.kappa_hat) << '\n';
  }
}

}  // namespace cigw
