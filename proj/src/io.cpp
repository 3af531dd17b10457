#include "pufkey/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace pufkey {

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw invalid_input("malformed JSON in '" + path + "': " + e.what());
  }
  return j;
}

const json& field(const json& j, const char* name, const std::string& path) {
  if (!j.contains(name))
    throw invalid_input("missing field '" + std::string(name) + "' in '" +
                        path + "'");
  return j.at(name);
}

std::vector<double> as_vector(const json& j, const char* name) {
  if (!j.is_array())
    throw invalid_input("field '" + std::string(name) + "' must be an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number())
      throw invalid_input("field '" + std::string(name) +
                          "' must contain numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::vector<double>> as_matrix(const json& j, const char* name) {
  if (!j.is_array())
    throw invalid_input("field '" + std::string(name) + "' must be an array");
  std::vector<std::vector<double>> out;
  for (const auto& row : j) out.push_back(as_vector(row, name));
  return out;
}

std::string fmt(double v, const char* format = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

}  // namespace

CompoundGaussianModel load_gaussian_model(const std::string& path) {
  const json j = load_json(path);
  const json& s = field(j, "sigma_x2", path);
  if (!s.is_number()) throw invalid_input("'sigma_x2' must be a number");
  auto dec = as_matrix(field(j, "decoder_gains", path), "decoder_gains");
  auto eve = as_matrix(field(j, "eve_gains", path), "eve_gains");
  return CompoundGaussianModel(s.get<double>(), std::move(dec),
                               std::move(eve));
}

DiscreteCompoundModel load_discrete_model(const std::string& path) {
  const json j = load_json(path);
  FiniteDist px(as_vector(field(j, "p_x", path), "p_x"));
  CondDist enr(as_matrix(field(j, "enrollment", path), "enrollment"));
  auto states = [&](const char* name) {
    const json& arr = field(j, name, path);
    if (!arr.is_array() || arr.empty())
      throw invalid_input("field '" + std::string(name) +
                          "' must be a non-empty array of matrices");
    std::vector<CondDist> out;
    for (const auto& mtx : arr) out.emplace_back(as_matrix(mtx, name));
    return out;
  };
  return DiscreteCompoundModel(std::move(px), std::move(enr),
                               states("decoder_states"), states("eve_states"));
}

TestChannelPair load_test_channels(const std::string& path) {
  const json j = load_json(path);
  return TestChannelPair{
      CondDist(as_matrix(field(j, "u_given_xt", path), "u_given_xt")),
      CondDist(as_matrix(field(j, "v_given_u", path), "v_given_u"))};
}

SimConfig load_sim_config(const std::string& path) {
  const json j = load_json(path);
  SimConfig cfg;
  cfg.n = field(j, "n", path).get<std::size_t>();
  cfg.delta = field(j, "delta", path).get<double>();
  const json& r = field(j, "rates", path);
  cfg.rates.r_v = field(r, "r_v", path).get<double>();
  cfg.rates.r_jv1 = field(r, "r_jv1", path).get<double>();
  cfg.rates.r_ju1 = field(r, "r_ju1", path).get<double>();
  cfg.rates.r_s = field(r, "r_s", path).get<double>();
  cfg.rates.r_u3 = field(r, "r_u3", path).get<double>();
  cfg.seed = field(j, "seed", path).get<std::uint64_t>();
  const std::string mode = field(j, "mode", path).get<std::string>();
  if (mode == "exact") {
    cfg.mode = SimMode::exact;
    cfg.trials = j.value("trials", std::size_t{0});
  } else if (mode == "monte_carlo") {
    cfg.mode = SimMode::monte_carlo;
    cfg.trials = field(j, "trials", path).get<std::size_t>();
  } else {
    throw invalid_input("'mode' must be \"exact\" or \"monte_carlo\"");
  }
  cfg.max_codebook_cells = j.value("max_codebook_cells", cfg.max_codebook_cells);
  cfg.max_enum_states = j.value("max_enum_states", cfg.max_enum_states);
  cfg.validate();
  return cfg;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw invalid_input("cannot write '" + tmp.string() + "'");
    out << content;
  }
  fs::rename(tmp, target);
}

std::string curve_csv(const AlphaCurve& curve) {
  std::ostringstream out;
  out << "alpha,r_s,r_j,r_l\n";
  for (const auto& [alpha, t] : curve.samples)
    out << fmt(alpha, "%.6g") << ',' << fmt(t.r_s, "%.6g") << ','
        << fmt(t.r_j, "%.6g") << ',' << fmt(t.r_l, "%.6g") << '\n';
  return out.str();
}

std::string pareto_csv(const std::vector<ParetoEntry>& front) {
  std::ostringstream out;
  out << "r_s,r_j,r_l";
  if (!front.empty())
    for (const auto& [name, value] : front[0].point.terms) out << ',' << name;
  out << '\n';
  for (const auto& e : front) {
    out << fmt(e.point.triple.r_s) << ',' << fmt(e.point.triple.r_j) << ','
        << fmt(e.point.triple.r_l);
    for (const auto& [name, value] : e.point.terms) out << ',' << fmt(value);
    out << '\n';
  }
  return out.str();
}

std::string support_csv(const SupportTable& table) {
  std::ostringstream out;
  out << "w_s,w_j,w_l,support";
  const std::size_t n_states =
      table.per_state.empty() ? 0 : table.per_state[0].size();
  for (std::size_t kl = 0; kl < n_states; ++kl) out << ",state" << kl;
  out << '\n';
  for (std::size_t d = 0; d < table.directions.size(); ++d) {
    const auto& dir = table.directions[d];
    out << fmt(dir.w_s) << ',' << fmt(dir.w_j) << ',' << fmt(dir.w_l) << ','
        << fmt(table.value[d]);
    for (double v : table.per_state[d]) out << ',' << fmt(v);
    out << '\n';
  }
  return out.str();
}

std::string gap_report_json(const GapReport& rep) {
  json j;
  j["max_gap"] = rep.max_gap;
  json dirs = json::array();
  for (std::size_t d = 0; d < rep.directions.size(); ++d) {
    json e;
    e["w_s"] = rep.directions[d].w_s;
    e["w_j"] = rep.directions[d].w_j;
    e["w_l"] = rep.directions[d].w_l;
    e["inner"] = rep.inner_support[d];
    e["outer"] = rep.outer_support[d];
    e["gap"] = rep.gap[d];
    dirs.push_back(e);
  }
  j["directions"] = dirs;
  return j.dump(2) + "\n";
}

std::string sim_report_json(const SimReport& rep) {
  json j;
  j["mode"] = rep.mode;
  j["n"] = rep.n;
  j["trials_run"] = rep.trials_run;
  j["storage_bits"] = rep.storage_bits;
  j["key_bits"] = rep.key_bits;
  j["error_prob_per_k"] = rep.error_prob_per_k;
  if (!rep.error_lo_per_k.empty()) {
    j["error_wilson_lo_per_k"] = rep.error_lo_per_k;
    j["error_wilson_hi_per_k"] = rep.error_hi_per_k;
  }
  j["key_tv_uniform"] = rep.key_tv_uniform;
  j["secrecy_leak_per_l"] = rep.secrecy_leak_per_l;
  j["privacy_leak_per_l"] = rep.privacy_leak_per_l;
  // worst-case views: the guarantees quantify over the unknown state
  auto vec_max = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
  };
  if (!rep.error_prob_per_k.empty())
    j["error_prob_max"] = vec_max(rep.error_prob_per_k);
  if (!rep.secrecy_leak_per_l.empty()) {
    j["secrecy_leak_max"] = vec_max(rep.secrecy_leak_per_l);
    j["privacy_leak_max"] = vec_max(rep.privacy_leak_per_l);
  }
  json ev;
  ev["e1"] = rep.e1;
  ev["e2"] = rep.e2;
  json per_k = json::array();
  for (const auto& e : rep.e345_per_k) {
    json x;
    x["e3"] = e[0];
    x["e4"] = e[1];
    x["e5"] = e[2];
    per_k.push_back(x);
  }
  ev["per_k"] = per_k;
  j["error_events"] = ev;
  if (rep.mode == "monte_carlo" && rep.trials_run > 0) {
    const double t = static_cast<double>(rep.trials_run);
    json cnt;
    cnt["e1"] = static_cast<std::uint64_t>(std::llround(rep.e1 * t));
    cnt["e2"] = static_cast<std::uint64_t>(std::llround(rep.e2 * t));
    json cper_k = json::array();
    for (const auto& e : rep.e345_per_k) {
      json x;
      x["e3"] = static_cast<std::uint64_t>(std::llround(e[0] * t));
      x["e4"] = static_cast<std::uint64_t>(std::llround(e[1] * t));
      x["e5"] = static_cast<std::uint64_t>(std::llround(e[2] * t));
      cper_k.push_back(x);
    }
    cnt["per_k"] = cper_k;
    j["error_event_counts"] = cnt;
  }
  return j.dump(2) + "\n";
}

std::string trial_trace_csv(const TrialTrace& trace) {
  std::ostringstream out;
  out << "trial,key,j_v1,j_u1,encoder_event";
  for (std::size_t k = 0; k < trace.n_decoder_states; ++k)
    out << ",key_error_k" << k;
  out << '\n';
  for (std::size_t i = 0; i < trace.key.size(); ++i) {
    out << i << ',' << trace.key[i] << ',' << trace.j_v1[i] << ','
        << trace.j_u1[i] << ',' << static_cast<int>(trace.encoder_event[i]);
    for (std::size_t k = 0; k < trace.n_decoder_states; ++k)
      out << ','
          << static_cast<int>(trace.key_error[i * trace.n_decoder_states + k]);
    out << '\n';
  }
  return out.str();
}

std::string manifest_json(const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["inputs"] = m.inputs;
  j["seed"] = m.seed;
  j["outputs"] = m.outputs;
  j["tool_version"] = m.tool_version;
  j["duration_ms"] = m.duration_ms;
  return j.dump(2) + "\n";
}

}  // namespace pufkey
