#include "hdtorus/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hdtorus/errors.hpp"

namespace hdtorus {

using nlohmann::json;

json spec_to_json(const TorusSpec& spec) {
    json j{{"family", family_name(spec.family)}, {"r", spec.r}, {"n", spec.n}};
    if (spec.family == Family::SpreadOut) j["L"] = spec.L;
    return j;
}

TorusSpec spec_from_json(const json& j) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "family" && key != "r" && key != "n" && key != "L")
            throw ConfigError("unknown key '" + key + "' in torus spec");
    }
    if (!j.contains("family") || !j.contains("r") || !j.contains("n"))
        throw ConfigError("torus spec needs family, r and n");
    Family family = family_from_name(j.at("family").get<std::string>());
    int L = j.value("L", 0);
    if (family != Family::SpreadOut && j.contains("L"))
        throw ConfigError("key 'L' only applies to the spread_out family");
    return TorusSpec::make(family, j.at("r").get<int>(), j.at("n").get<int>(), L);
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

json make_meta(const json& config, std::uint64_t seed) {
    char hex[20];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config.dump())));
    return json{{"tool", kToolVersion}, {"config_hash", hex}, {"seed", seed}, {"config", config}};
}

json to_json(const RwTriangleSums& sums) {
    return json{{"beta_sup", sums.beta_sup},
                {"beta_triangle", sums.beta_triangle},
                {"open_triangle", sums.open_triangle},
                {"open_triangle_bound", 1.0 + 6.0 * sums.beta_triangle}};
}

json to_json(const InfraredReport& report) {
    return json{{"margin", report.margin}, {"argmin_k", report.argmin}};
}

json to_json(const ExactReport& report) {
    return json{{"p", report.p},           {"tau", report.tau},
                {"chi", report.chi},       {"pi0", report.pi0},
                {"nabla0", report.nabla0}, {"tail", report.tail},
                {"cmax_mean", report.cmax_mean}};
}

json to_json(const DiagramReport& report) {
    json j{{"p", report.p},
           {"mu", report.mu},
           {"chi", report.chi},
           {"nabla_max_offdiag", report.nabla_max_offdiag.value},
           {"nabla_argmax", report.nabla_max_offdiag.arg},
           {"nabla0", report.nabla.empty() ? 0.0 : report.nabla[0]},
           {"T", report.t.value},
           {"T_argmax", report.t.arg},
           {"T_prime", report.t_prime.value},
           {"T_prime_argmax", report.t_prime.arg},
           {"T2", report.t2},
           {"S0", report.s0},
           {"S32", report.s32},
           {"S2", report.s2},
           {"tau_hat_negative_count", report.tau_hat_negative_count},
           {"tau_hat_min", report.tau_hat_min},
           {"reference_k", report.reference_k}};
    if (!report.w_all.empty()) {
        j["W"] = report.w_all;
        j["W0"] = report.w0_all;
        j["H_bound"] = report.h_bound_all;
    }
    json bounds = json::array();
    for (const auto& b : report.pi_bounds)
        bounds.push_back(json{{"N", b.order}, {"sum_bound", b.sum_bound}, {"cos_bound", b.cos_bound}});
    j["pi_bounds"] = bounds;
    return j;
}

json to_json(const BootstrapReport& report) {
    return json{{"p", report.p},
                {"lambda", report.lambda},
                {"pi_hat0", report.pi_hat0},
                {"mu", report.mu},
                {"mu_omega", report.mu_omega},
                {"capped_ceiling", report.capped_ceiling},
                {"capped_floor", report.capped_floor},
                {"f1", report.f1},
                {"f2", report.f2.value},
                {"f2_argmax_k", report.f2.arg},
                {"f3", report.f3},
                {"f3_argmax_k", report.f3_k},
                {"f3_argmax_l", report.f3_l},
                {"f3_sampled", report.f3_sampled},
                {"f", report.f}};
}

json to_json(const ThresholdResult& result) {
    json evals = json::array();
    for (const auto& e : result.evaluations)
        evals.push_back(json{{"p", e.p}, {"chi", e.chi}, {"stderr", e.se}});
    return json{{"pc", result.pc},
                {"interval", {result.lo, result.hi}},
                {"chi_at_pc", result.chi_at_pc},
                {"chi_stderr", result.chi_se},
                {"lambda", result.lambda},
                {"target", result.target},
                {"evaluations", evals}};
}

json to_json(const ClusterStats& stats) {
    json tail = json::array();
    for (size_t g = 0; g < stats.tail_k.size(); ++g)
        tail.push_back(json{{"k", stats.tail_k[g]}, {"p", stats.tail[g]}, {"stderr", stats.tail_se[g]}});
    json j{{"chi", stats.chi},
           {"chi_stderr", stats.chi_se},
           {"cmax_mean", stats.cmax_mean},
           {"cmax_stderr", stats.cmax_se},
           {"tail", tail}};
    if (!stats.cmax_samples.empty()) j["cmax_samples"] = stats.cmax_samples;
    return j;
}

namespace {

void append_meta_comments(std::ostringstream& out, const json& meta) {
    out << "# tool: " << meta.at("tool").get<std::string>() << "\n";
    out << "# config_hash: " << meta.at("config_hash").get<std::string>() << "\n";
    out << "# seed: " << meta.at("seed") << "\n";
    out << "# config: " << meta.at("config").dump() << "\n";
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

std::string mc_csv(const McResult& mc, const json& meta) {
    std::ostringstream out;
    append_meta_comments(out, meta);
    out << "x_index,tau,tau_stderr,pi0,pi0_stderr\n";
    const size_t v = mc.two_point.tau.size();
    for (size_t x = 0; x < v; ++x) {
        out << x << ',' << format_double(mc.two_point.tau[x]) << ','
            << format_double(mc.two_point.stderr_[x]) << ','
            << format_double(x < mc.pi0.size() ? mc.pi0[x] : 0.0) << ','
            << format_double(x < mc.pi0_se.size() ? mc.pi0_se[x] : 0.0) << "\n";
    }
    return out.str();
}

std::string window_csv(const std::vector<WindowRow>& rows, const json& meta) {
    std::ostringstream out;
    append_meta_comments(out, meta);
    out << "epsilon,p,chi,chi_se,cmax,cmax_se,tail_k,tail,tail_se,clamped\n";
    for (const auto& r : rows) {
        out << format_double(r.epsilon) << ',' << format_double(r.p) << ',' << format_double(r.chi)
            << ',' << format_double(r.chi_se) << ',' << format_double(r.cmax) << ','
            << format_double(r.cmax_se) << ',' << r.tail_k << ',' << format_double(r.tail) << ','
            << format_double(r.tail_se) << ',' << (r.clamped ? 1 : 0) << "\n";
    }
    return out.str();
}

TauCsv read_tau_csv(const std::string& path, index_t volume) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open tau CSV file '" + path + "'");
    TauCsv out;
    out.tau.assign(static_cast<size_t>(volume), 0.0);
    out.tau_se.assign(static_cast<size_t>(volume), 0.0);
    out.pi0.assign(static_cast<size_t>(volume), 0.0);
    out.pi0_se.assign(static_cast<size_t>(volume), 0.0);
    std::string line;
    std::vector<bool> seen(static_cast<size_t>(volume), false);
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("x_index", 0) == 0) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() < 3) throw ConfigError("malformed tau CSV row: '" + line + "'");
        const long long x = std::stoll(cells[0]);
        if (x < 0 || x >= volume)
            throw ConfigError("tau CSV index " + std::to_string(x) + " outside [0, " +
                              std::to_string(volume) + ")");
        seen[static_cast<size_t>(x)] = true;
        out.tau[static_cast<size_t>(x)] = std::stod(cells[1]);
        out.tau_se[static_cast<size_t>(x)] = std::stod(cells[2]);
        if (cells.size() >= 5) {
            out.pi0[static_cast<size_t>(x)] = std::stod(cells[3]);
            out.pi0_se[static_cast<size_t>(x)] = std::stod(cells[4]);
        }
    }
    for (index_t x = 0; x < volume; ++x)
        if (!seen[static_cast<size_t>(x)])
            throw ConfigError("tau CSV misses index " + std::to_string(x));
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file '" + path + "'");
    out << content;
}

} // namespace hdtorus
