// JSON (de)serialization for states and channels, plus the small formatting
// helpers the CLI needs for reproducible reports.
//
// State formats:
//   {"kind":"prob",    "dims":[...], "weights":[...]}
//   {"kind":"density", "dim":n, "re":[[...]], "im":[[...]]}
// Channel formats:
//   {"kind":"stochastic", "in_dim":m, "out_dim":n, "matrix":[[row],...]}
//   {"kind":"kraus", "in_dim":m, "out_dim":n, "ops":[{"re":[[...]],"im":[[...]]},...]}

#pragma once

#include <json.hpp>

#include <string>
#include <variant>
#include <vector>

#include "selfrep/classical.hpp"
#include "selfrep/quantum.hpp"

namespace selfrep {

using Json = nlohmann::json;

// Malformed content (bad JSON, schema violations, invariant failures at load).
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json to_json(const ProbVec& p);
Json to_json(const JointProb& p);
Json to_json(const DensityMatrix& rho);
Json to_json(const StochasticChannel& m);
Json to_json(const KrausChannel& k);

// A parsed state file: classical states carry their subsystem split.
struct LoadedState {
  std::variant<JointProb, DensityMatrix> value;

  bool classical() const { return value.index() == 0; }
  const JointProb& prob() const { return std::get<JointProb>(value); }
  const DensityMatrix& density() const { return std::get<DensityMatrix>(value); }
};

using LoadedChannel = std::variant<StochasticChannel, KrausChannel>;

LoadedState state_from_json(const Json& j);
LoadedChannel channel_from_json(const Json& j);

LoadedState load_state(const std::string& path);
LoadedChannel load_channel(const std::string& path);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// FNV-1a 64-bit digest of a file's bytes, as 16 hex characters. Used to stamp
// report files with the identity of their inputs.
std::string file_digest(const std::string& path);

// Round-trip-exact decimal rendering: 17 significant digits, '.' decimal
// point, no locale dependence.
std::string format_double(double v);

}  // namespace selfrep
