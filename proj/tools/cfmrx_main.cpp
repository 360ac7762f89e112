// Command line front end: channel dataset generation, prior training, SNR
// sweeps, the CFM-Rx vs CFM-TEQ ablation, and the invariant self-checks.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <string>

#include "cfmrx/baselines.hpp"
#include "cfmrx/dataset.hpp"
#include "cfmrx/rng.hpp"
#include "cfmrx/sim_config.hpp"
#include "cfmrx/sweep.hpp"
#include "cfmrx/validation.hpp"
#include "cfmrx/velocity_net.hpp"

namespace {

cfmrx::SimConfig load_config(const std::string& path) {
    if (path.empty()) return cfmrx::SimConfig{};
    return cfmrx::SimConfig::load(path);
}

int cmd_gen_channels(const std::string& config_path, uint64_t seed, const std::string& out,
                     int count) {
    cfmrx::SimConfig cfg = load_config(config_path);
    if (count <= 0) count = cfg.training.dataset_samples;
    cfmrx::ChannelProfile profile = cfg.profile.build();
    cfmrx::ChannelDataset ds;
    ds.frame = cfg.frame;
    ds.profile_hash = profile.hash();
    ds.seed = seed;
    ds.samples.reserve(count);
    for (int k = 0; k < count; ++k)
        ds.samples.push_back(cfmrx::generate_channel(
            profile, cfg.frame, cfmrx::mix_seed(cfmrx::mix_seed(seed, cfmrx::tag::kChannel), k)));
    cfmrx::write_dataset(out, ds);
    std::printf("wrote %d channel samples to %s\n", count, out.c_str());
    return 0;
}

int cmd_train_prior(const std::string& config_path, uint64_t seed, const std::string& dataset_path,
                    const std::string& out) {
    cfmrx::SimConfig cfg = load_config(config_path);
    cfmrx::ChannelDataset ds = cfmrx::read_dataset(dataset_path);
    cfmrx::TrainReport report;
    cfmrx::VelocityNet net =
        cfmrx::train_velocity_net(ds, cfg.training.net, cfg.training.train, seed, &report);
    net.save(out, cfg.training.train.hash());
    std::printf("trained %zu-parameter velocity net for %d epochs\n", net.parameter_count(),
                cfg.training.train.epochs);
    for (size_t e = 0; e < report.train_loss.size(); ++e) {
        if (e % 10 == 0 || e + 1 == report.train_loss.size())
            std::printf("epoch %3zu  train %.4f  val %.4f\n", e, report.train_loss[e],
                        report.val_loss[e]);
    }
    std::printf("test loss %.4f\nwrote weights to %s\n", report.test_loss, out.c_str());
    return 0;
}

int run_sweep_to_dir(const cfmrx::SimConfig& cfg, uint64_t seed, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    cfmrx::SweepResult res = cfmrx::run_sweep(cfg, seed);
    cfmrx::write_metrics_csv(out_dir + "/metrics.csv", res.records);
    cfmrx::write_series_csv(out_dir, res.records);
    cfmrx::write_summary(out_dir + "/summary.txt", res.records);
    std::printf("wrote %zu records to %s/metrics.csv\n", res.records.size(), out_dir.c_str());
    return 0;
}

int cmd_sweep(const std::string& config_path, uint64_t seed, const std::string& out_dir) {
    return run_sweep_to_dir(load_config(config_path), seed, out_dir);
}

int cmd_ablation(const std::string& config_path, uint64_t seed, const std::string& out_dir) {
    cfmrx::SimConfig cfg = load_config(config_path);
    cfg.sweep.receivers = {"CFM-Rx", "CFM-TEQ"};
    int rc = run_sweep_to_dir(cfg, seed, out_dir);
    return rc;
}

int cmd_validate(uint64_t seed) {
    std::vector<cfmrx::CheckResult> checks = cfmrx::run_validation(seed);
    int failed = 0;
    for (const auto& c : checks) {
        std::printf("[%s] %s (%s)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        if (!c.pass) ++failed;
    }
    std::printf("%zu checks, %d failed\n", checks.size(), failed);
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MIMO-OFDM link-level simulator with a conditional flow-matching receiver"};
    app.require_subcommand(1);

    std::string config_path, out, dataset_path;
    uint64_t seed = 1;
    int count = 0;

    auto* gen = app.add_subcommand("gen-channels", "Generate a channel dataset");
    gen->add_option("--config", config_path, "Config file (JSON)");
    gen->add_option("--seed", seed, "Master seed");
    gen->add_option("--out", out, "Output dataset path")->required();
    gen->add_option("--count", count, "Sample count (default from config)");

    auto* train = app.add_subcommand("train-prior", "Train the velocity net channel prior");
    train->add_option("--config", config_path, "Config file (JSON)");
    train->add_option("--seed", seed, "Master seed");
    train->add_option("--dataset", dataset_path, "Channel dataset path")->required();
    train->add_option("--out", out, "Output weights path")->required();

    auto* sweep = app.add_subcommand("sweep", "Run the SNR sweep and write CSV results");
    sweep->add_option("--config", config_path, "Config file (JSON)");
    sweep->add_option("--seed", seed, "Master seed");
    sweep->add_option("--out", out, "Output directory")->required();

    auto* ablation = app.add_subcommand("ablation", "CFM-Rx vs CFM-TEQ comparison sweep");
    ablation->add_option("--config", config_path, "Config file (JSON)");
    ablation->add_option("--seed", seed, "Master seed");
    ablation->add_option("--out", out, "Output directory")->required();

    auto* validate = app.add_subcommand("validate", "Run the invariant self-checks");
    validate->add_option("--seed", seed, "Master seed");

    auto* config = app.add_subcommand("write-config", "Write the default config to a file");
    config->add_option("--out", out, "Output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_channels(config_path, seed, out, count);
        if (train->parsed()) return cmd_train_prior(config_path, seed, dataset_path, out);
        if (sweep->parsed()) return cmd_sweep(config_path, seed, out);
        if (ablation->parsed()) return cmd_ablation(config_path, seed, out);
        if (validate->parsed()) return cmd_validate(seed);
        if (config->parsed()) {
            cfmrx::SimConfig{}.save(out);
            std::printf("wrote default config to %s\n", out.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
