#ifndef HDTORUS_REPORT_IO_HPP
#define HDTORUS_REPORT_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "hdtorus/bootstrap.hpp"
#include "hdtorus/diagrams.hpp"
#include "hdtorus/oracle.hpp"
#include "hdtorus/percolation.hpp"
#include "hdtorus/spectral.hpp"
#include "hdtorus/threshold.hpp"
#include "hdtorus/torus.hpp"

namespace hdtorus {

inline constexpr const char* kToolVersion = "hdtorus 1.0.0";

nlohmann::json spec_to_json(const TorusSpec& spec);
TorusSpec spec_from_json(const nlohmann::json& j);

std::uint64_t fnv1a64(const std::string& data);
// {"tool", "config_hash", "seed", "config"} block embedded in every output
nlohmann::json make_meta(const nlohmann::json& config, std::uint64_t seed);

nlohmann::json to_json(const RwTriangleSums& sums);
nlohmann::json to_json(const InfraredReport& report);
nlohmann::json to_json(const ExactReport& report);
nlohmann::json to_json(const DiagramReport& report);
nlohmann::json to_json(const BootstrapReport& report);
nlohmann::json to_json(const ThresholdResult& result);
nlohmann::json to_json(const ClusterStats& stats);

// mc CSV: '#'-prefixed header block, then x_index,tau,tau_stderr,pi0,pi0_stderr
std::string mc_csv(const McResult& mc, const nlohmann::json& meta);
std::string window_csv(const std::vector<WindowRow>& rows, const nlohmann::json& meta);

struct TauCsv {
    std::vector<double> tau, tau_se, pi0, pi0_se;
};

TauCsv read_tau_csv(const std::string& path, index_t volume);

void write_text_file(const std::string& path, const std::string& content);

} // namespace hdtorus

#endif
