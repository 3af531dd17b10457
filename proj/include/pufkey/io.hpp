#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pufkey/binning.hpp"
#include "pufkey/gaussian.hpp"
#include "pufkey/search.hpp"

namespace pufkey {

// schema: { "sigma_x2": number,
//           "decoder_gains": [[number,...],...],
//           "eve_gains": [[number,...],...] }
CompoundGaussianModel load_gaussian_model(const std::string& path);

// schema: { "p_x": [...], "enrollment": [[...]],
//           "decoder_states": [[[...]]], "eve_states": [[[...]]] }
DiscreteCompoundModel load_discrete_model(const std::string& path);

// schema: { "u_given_xt": [[...]], "v_given_u": [[...]] }
TestChannelPair load_test_channels(const std::string& path);

// schema: { "n":, "delta":, "rates": {"r_v":, "r_jv1":, "r_ju1":, "r_s":,
//           "r_u3":}, "seed":, "trials":, "mode": "exact"|"monte_carlo",
//           optional "max_codebook_cells":, "max_enum_states": }
SimConfig load_sim_config(const std::string& path);

// temp file in the same directory plus rename, so outputs are atomic
void write_text_atomic(const std::string& path, const std::string& content);

std::string curve_csv(const AlphaCurve& curve);
std::string pareto_csv(const std::vector<ParetoEntry>& front);
std::string support_csv(const SupportTable& table);
std::string gap_report_json(const GapReport& rep);
std::string sim_report_json(const SimReport& rep);
std::string trial_trace_csv(const TrialTrace& trace);

struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  std::string tool_version = kVersion;
  double duration_ms = 0.0;
};

std::string manifest_json(const RunManifest& m);

}  // namespace pufkey
