#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wpc/asymptotics.hpp"
#include "wpc/enumeration.hpp"
#include "wpc/local_analysis.hpp"
#include "wpc/morphism.hpp"
#include "wpc/volume.hpp"

namespace wpc {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";

/// x rounded to 12 significant digits, so dumps are stable across platforms.
double round12(long double x);
std::string format12(long double x);

std::uint64_t fnv1a64(std::string_view bytes);
std::string digest_hex(std::string_view bytes);

Json to_json(const MorphismSpec& spec);
Json to_json(const CommonZeroVerdict& v);
Json to_json(const GlobalAnalysis& a);
Json to_json(const AsymptoticPrediction& p);
Json to_json(const VolumeEstimate& v);
Json to_json(const CountResult& c, const Rational& T);
Json to_json(const CountReport& r);
Json to_json(const MoebiusReport& r);

/// Columns T, mass_num, mass_den, fitted, predicted, rel_gap.
std::string to_csv(const CountReport& r);

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string config_digest;
  std::string subcommand;
  std::map<std::string, std::string> flags;
  std::vector<std::uint64_t> seeds;
  double seconds = 0;
  std::map<std::string, std::string> output_digests;  ///< file name -> digest

  Json to_json() const;
};

}  // namespace wpc
