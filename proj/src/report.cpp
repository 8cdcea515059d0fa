#include "wpc/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace wpc {

double round12(long double x) { return std::strtod(format12(x).c_str(), nullptr); }

std::string format12(long double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12Lg", x);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string digest_hex(std::string_view bytes) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

namespace {

Json rationals(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const auto& q : v) out.push_back(to_string(q));
  return out;
}

}  // namespace

Json to_json(const MorphismSpec& spec) {
  Json j;
  j["name"] = spec.name;
  j["source_weights"] = spec.source.values();
  j["target_weights"] = spec.target.values();
  Json polys = Json::array();
  for (const auto& f : spec.polys) polys.push_back(f.to_string());
  j["polynomials"] = polys;
  j["e"] = spec.e;
  Json degs = Json::array();
  for (const auto& f : spec.polys) degs.push_back(f.degree());
  j["weighted_degrees"] = degs;
  return j;
}

Json to_json(const CommonZeroVerdict& v) {
  Json j;
  j["pass"] = v.pass;
  j["witness"] = v.witness;
  return j;
}

Json to_json(const GlobalAnalysis& a) {
  Json j;
  j["candidate_primes"] = a.candidates;
  j["discrepancy_set"] = rationals(a.discrepancy_set);
  j["bad_primes"] = a.bad_primes;
  Json profs = Json::array();
  for (const auto& [p, prof] : a.profiles) {
    Json pj;
    pj["p"] = p;
    pj["modulus_exponents"] = prof.modulus_exponents;
    pj["realized"] = std::vector<long>(prof.realized.begin(), prof.realized.end());
    pj["class_count"] = prof.class_count();
    profs.push_back(pj);
  }
  j["profiles"] = profs;
  Json census = Json::array();
  for (const auto& [key, count] : a.census) {
    Json cj;
    cj["d"] = to_string(key.first);
    cj["c1"] = key.second.get_str();
    cj["count"] = count.get_str();
    census.push_back(cj);
  }
  j["census"] = census;
  Json index = Json::object();
  for (const auto& [c1, idx] : a.modulus_index) index[c1.get_str()] = idx.get_str();
  j["modulus_index"] = index;
  j["c_phi"] = to_string(a.c_phi);
  return j;
}

Json to_json(const AsymptoticPrediction& p) {
  Json j;
  j["c_phi"] = to_string(p.c_phi);
  j["volume"] = round12(p.volume);
  j["leading_constant"] = round12(p.leading_constant);
  j["exponent"] = to_string(p.exponent);
  j["error_exponent"] = to_string(p.error_exponent);
  j["special_log"] = p.special_log;
  return j;
}

Json to_json(const VolumeEstimate& v) {
  Json j;
  j["method"] = v.method;
  j["value"] = round12(v.value);
  j["error"] = round12(v.error);
  if (v.method == "monte_carlo") {
    j["samples"] = v.samples;
    j["seed"] = v.seed;
    j["box_volume"] = round12(v.box_volume);
  } else {
    j["grid"] = v.grid;
    Json corners = Json::array();
    for (auto c : v.corners) corners.push_back(round12(c));
    j["corners"] = corners;
    j["panels"] = v.panels.size();
  }
  return j;
}

Json to_json(const CountResult& c, const Rational& T) {
  Json j;
  j["T"] = to_string(T);
  j["mass"] = to_string(c.mass);
  j["primitive_vectors"] = c.vectors;
  Json by = Json::object();
  for (const auto& [d, m] : c.by_discrepancy) by[to_string(d)] = to_string(m);
  j["by_discrepancy"] = by;
  j["x1_bound"] = c.x1_bound;
  j["slabs"] = c.slabs;
  return j;
}

Json to_json(const CountReport& r) {
  Json j;
  j["prediction"] = to_json(r.prediction);
  Json rungs = Json::array();
  for (std::size_t i = 0; i < r.ladder.size(); ++i) {
    Json rj;
    rj["T"] = to_string(r.ladder[i]);
    rj["mass"] = to_string(r.masses[i]);
    rj["fitted"] = round12(r.fitted[i]);
    rj["relative_gap"] = round12(r.relative_gaps[i]);
    rungs.push_back(rj);
  }
  j["rungs"] = rungs;
  j["expected_gap_rate"] = round12(r.expected_rate);
  j["shrinking"] = r.shrinking;
  return j;
}

Json to_json(const MoebiusReport& r) {
  Json j;
  j["pass"] = r.pass;
  j["tail_certified"] = r.tail_certified;
  j["largest_scaling_ideal"] = r.largest_scaling_ideal;
  Json by = Json::object();
  for (const auto& [d, lr] : r.by_discrepancy) by[to_string(d)] = {lr.first.get_str(), lr.second.get_str()};
  j["by_discrepancy"] = by;
  j["lhs_mass"] = to_string(r.lhs_mass);
  j["witness"] = r.witness;
  return j;
}

std::string to_csv(const CountReport& r) {
  std::ostringstream out;
  out << "T,mass_num,mass_den,fitted,predicted,rel_gap\n";
  for (std::size_t i = 0; i < r.ladder.size(); ++i)
    out << to_string(r.ladder[i]) << "," << r.masses[i].get_num().get_str() << ","
        << r.masses[i].get_den().get_str() << "," << format12(r.fitted[i]) << ","
        << format12(r.prediction.leading_constant) << "," << format12(r.relative_gaps[i]) << "\n";
  return out.str();
}

Json RunManifest::to_json() const {
  Json j;
  j["tool_version"] = tool_version;
  j["config_digest"] = config_digest;
  j["subcommand"] = subcommand;
  Json f = Json::object();
  for (const auto& [k, v] : flags) f[k] = v;
  j["flags"] = f;
  j["seeds"] = seeds;
  j["seconds"] = round12(seconds);
  Json d = Json::object();
  for (const auto& [k, v] : output_digests) d[k] = v;
  j["output_digests"] = d;
  return j;
}

}  // namespace wpc
