#include "cfmrx/sim_config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace cfmrx {

using nlohmann::json;

ChannelProfile ProfileSpec::build() const {
    double rho = time_corr;
    if (rho < 0.0) rho = ChannelProfile::jakes_time_corr(3.0, 3.5e9, 1e-3 / 14.0);
    return ChannelProfile::exponential(n_taps, tap_step_s, tau_rms_s, subcarrier_spacing_hz, rho);
}

PilotConfig PilotSpec::build(const FrameConfig& f) const {
    return scheme == PilotScheme::SIP ? PilotConfig::sip(f, data_power)
                                      : PilotConfig::op(f, op_pilot_symbol);
}

SamplerConfig SamplerSpec::build(double noise_var, uint64_t seed) const {
    SamplerConfig cfg;
    cfg.steps = steps;
    cfg.corrector_iters = corrector_iters;
    cfg.corrector_scale = corrector_scale;
    if (corrector_mode == "normalized")
        cfg.corrector_mode = CorrectorMode::kNormalized;
    else if (corrector_mode == "kappa")
        cfg.corrector_mode = CorrectorMode::kKappaScore;
    else if (corrector_mode == "bare")
        cfg.corrector_mode = CorrectorMode::kBareScore;
    else
        throw std::invalid_argument("config: unknown corrector mode: " + corrector_mode);
    cfg.corrector_printed_sign = corrector_printed_sign;
    cfg.noise_var = noise_var;
    cfg.seed = seed;
    return cfg;
}

double SweepSpec::corrector_scale_at(double snr, double fallback) const {
    for (const auto& [s, c] : corrector_scale_by_snr)
        if (s == snr) return c;
    return fallback;
}

namespace {

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

PilotScheme parse_scheme(const std::string& s) {
    if (s == "SIP" || s == "sip") return PilotScheme::SIP;
    if (s == "OP" || s == "op") return PilotScheme::OP;
    throw std::invalid_argument("config: unknown pilot scheme: " + s);
}

ModFamily parse_family(const std::string& s) {
    if (s == "QAM" || s == "qam") return ModFamily::QAM;
    if (s == "PSK" || s == "psk") return ModFamily::PSK;
    throw std::invalid_argument("config: unknown modulation family: " + s);
}

}  // namespace

std::string SimConfig::to_json() const {
    json j;
    j["frame"] = {{"n_subcarriers", frame.n_subcarriers},
                  {"n_symbols", frame.n_symbols},
                  {"n_rx", frame.n_rx},
                  {"n_layers", frame.n_layers}};
    j["profile"] = {{"n_taps", profile.n_taps},
                    {"tap_step_s", profile.tap_step_s},
                    {"tau_rms_s", profile.tau_rms_s},
                    {"subcarrier_spacing_hz", profile.subcarrier_spacing_hz},
                    {"time_corr", profile.time_corr}};
    j["pilot"] = {{"scheme", pilot.scheme == PilotScheme::SIP ? "SIP" : "OP"},
                  {"data_power", pilot.data_power},
                  {"op_pilot_symbol", pilot.op_pilot_symbol}};
    j["modulation"] = {{"order", modulation.order},
                       {"family", modulation.family == ModFamily::QAM ? "QAM" : "PSK"}};
    j["sampler"] = {{"steps", sampler.steps},
                    {"corrector_iters", sampler.corrector_iters},
                    {"corrector_scale", sampler.corrector_scale},
                    {"corrector_mode", sampler.corrector_mode},
                    {"corrector_printed_sign", sampler.corrector_printed_sign}};
    j["training"] = {{"dataset_samples", training.dataset_samples},
                     {"hidden", training.net.hidden},
                     {"time_embed_dim", training.net.time_embed_dim},
                     {"epochs", training.train.epochs},
                     {"batch_size", training.train.batch_size},
                     {"learning_rate", training.train.learning_rate},
                     {"train_fraction", training.train.train_fraction}};
    json scale_table = json::array();
    for (const auto& [s, c] : sweep.corrector_scale_by_snr) scale_table.push_back({s, c});
    j["sweep"] = {{"snr_db", sweep.snr_db},
                  {"frames_per_node", sweep.frames_per_node},
                  {"covariance_snapshots", sweep.covariance_snapshots},
                  {"schemes", sweep.schemes},
                  {"receivers", sweep.receivers},
                  {"prior", sweep.prior},
                  {"weights_path", sweep.weights_path},
                  {"slots_per_second", sweep.slots_per_second},
                  {"code_rate", sweep.code_rate},
                  {"threads", sweep.threads},
                  {"corrector_scale_by_snr", scale_table}};
    return j.dump(2) + "\n";
}

SimConfig SimConfig::from_json(const std::string& text) {
    json j = json::parse(text);
    SimConfig c;
    if (j.contains("frame")) {
        const json& f = j["frame"];
        maybe(f, "n_subcarriers", c.frame.n_subcarriers);
        maybe(f, "n_symbols", c.frame.n_symbols);
        maybe(f, "n_rx", c.frame.n_rx);
        maybe(f, "n_layers", c.frame.n_layers);
    }
    if (j.contains("profile")) {
        const json& p = j["profile"];
        maybe(p, "n_taps", c.profile.n_taps);
        maybe(p, "tap_step_s", c.profile.tap_step_s);
        maybe(p, "tau_rms_s", c.profile.tau_rms_s);
        maybe(p, "subcarrier_spacing_hz", c.profile.subcarrier_spacing_hz);
        maybe(p, "time_corr", c.profile.time_corr);
    }
    if (j.contains("pilot")) {
        const json& p = j["pilot"];
        if (p.contains("scheme")) c.pilot.scheme = parse_scheme(p["scheme"].get<std::string>());
        maybe(p, "data_power", c.pilot.data_power);
        maybe(p, "op_pilot_symbol", c.pilot.op_pilot_symbol);
    }
    if (j.contains("modulation")) {
        const json& m = j["modulation"];
        maybe(m, "order", c.modulation.order);
        if (m.contains("family")) c.modulation.family = parse_family(m["family"].get<std::string>());
    }
    if (j.contains("sampler")) {
        const json& s = j["sampler"];
        maybe(s, "steps", c.sampler.steps);
        maybe(s, "corrector_iters", c.sampler.corrector_iters);
        maybe(s, "corrector_scale", c.sampler.corrector_scale);
        maybe(s, "corrector_mode", c.sampler.corrector_mode);
        maybe(s, "corrector_printed_sign", c.sampler.corrector_printed_sign);
    }
    if (j.contains("training")) {
        const json& t = j["training"];
        maybe(t, "dataset_samples", c.training.dataset_samples);
        maybe(t, "hidden", c.training.net.hidden);
        maybe(t, "time_embed_dim", c.training.net.time_embed_dim);
        maybe(t, "epochs", c.training.train.epochs);
        maybe(t, "batch_size", c.training.train.batch_size);
        maybe(t, "learning_rate", c.training.train.learning_rate);
        maybe(t, "train_fraction", c.training.train.train_fraction);
    }
    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        maybe(s, "snr_db", c.sweep.snr_db);
        maybe(s, "frames_per_node", c.sweep.frames_per_node);
        maybe(s, "covariance_snapshots", c.sweep.covariance_snapshots);
        maybe(s, "schemes", c.sweep.schemes);
        maybe(s, "receivers", c.sweep.receivers);
        maybe(s, "prior", c.sweep.prior);
        maybe(s, "weights_path", c.sweep.weights_path);
        maybe(s, "slots_per_second", c.sweep.slots_per_second);
        maybe(s, "code_rate", c.sweep.code_rate);
        maybe(s, "threads", c.sweep.threads);
        if (s.contains("corrector_scale_by_snr")) {
            c.sweep.corrector_scale_by_snr.clear();
            for (const auto& row : s["corrector_scale_by_snr"])
                c.sweep.corrector_scale_by_snr.emplace_back(row.at(0).get<double>(),
                                                            row.at(1).get<double>());
        }
    }
    c.frame.validate();
    return c;
}

SimConfig SimConfig::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open: " + path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    try {
        return from_json(text);
    } catch (const json::exception& e) {
        throw std::runtime_error("config: parse error in " + path + ": " + e.what());
    }
}

void SimConfig::save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("config: cannot open for writing: " + path);
    os << to_json();
}

}  // namespace cfmrx
