// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

// Command-line driver for the soil-strength study pipeline.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "subgrade/config.hpp"
#include "subgrade/error.hpp"
#include "subgrade/experiment.hpp"
#include "subgrade/format.hpp"
#include "subgrade/report.hpp"

namespace {

using namespace subgrade;

enum Exit { kOk = 0, kConfig = 1, kData = 2, kNonConvergence = 3 };

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string target = "all";
    std::string model = "all";
    std::optional<std::size_t> repeats;
};

void add_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--seed", f.seed, "Base seed (generator seed for synth)");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--target", f.target, "cbr, ucs, r or all")->check(CLI::IsMember({"cbr", "ucs", "r", "all"}, CLI::ignore_case));
    cmd->add_option("--model", f.model, "svr, xgb, oblivious or all")
        ->check(CLI::IsMember({"svr", "xgb", "oblivious", "all"}, CLI::ignore_case));
    cmd->add_option("--repeats", f.repeats, "Number of repeated splits")->check(CLI::PositiveNumber);
}

RunConfig resolve(const Flags& f) {
    RunConfig cfg = f.config.empty() ? default_config() : load_config(f.config);
    if (f.seed) cfg.base_seed = *f.seed;
    if (!f.out.empty()) cfg.output_dir = f.out;
    if (f.repeats) cfg.repeats = *f.repeats;
    if (f.target != "all") {
        const auto t = parse_target(f.target);
        if (!t) throw Error(ErrorCode::ConfigError, "unknown target " + f.target);
        cfg.targets = {*t};
    }
    if (f.model != "all") {
        const auto m = parse_model(f.model);
        if (!m) throw Error(ErrorCode::ConfigError, "unknown model " + f.model);
        cfg.models = {*m};
    }
    cfg.validate();
    return cfg;
}

int exit_code(ErrorCode c) {
    switch (c) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::BadFoldCount:
    case ErrorCode::UnknownFeature: return kConfig;
    case ErrorCode::DidNotConverge:
    case ErrorCode::AllCandidatesInfeasible: return kNonConvergence;
    default: return kData;
    }
}

void progress(const TaskResult& t) {
    std::fprintf(stderr, "%-9s %-3s seed %llu  cv_mse %s  test r2 %s  rmse %s%s\n", std::string(to_string(t.model)).c_str(),
                 std::string(to_string(t.target)).c_str(), static_cast<unsigned long long>(t.seed),
                 format_double(t.tuning.best_cv_mse).c_str(), format_fixed(t.test_report.r2, 4).c_str(),
                 format_fixed(t.test_report.rmse, 4).c_str(), t.converged ? "" : "  (not converged)");
}

int cmd_stats(const RunConfig& cfg, bool write) {
    const auto stats = summarize(load_data(cfg));
    std::printf("%-6s %5s %10s %10s %10s %10s %10s %10s %10s\n", "column", "count", "mean", "std", "min", "q25",
                "median", "q75", "max");
    for (std::size_t i = 0; i < stats.names.size(); ++i) {
        const auto& c = stats.columns[i];
        std::printf("%-6s %5zu %10.4f %10.4f %10.4f %10.4f %10.4f %10.4f %10.4f\n", stats.names[i].c_str(), c.count,
                    c.mean, c.std, c.min, c.q25, c.median, c.q75, c.max);
    }
    if (write) {
        write_text(cfg.output_dir / "stats.csv", stats_csv(stats));
        write_text(cfg.output_dir / "stats.json", dump(to_json(stats)));
    }
    return kOk;
}

int cmd_synth(RunConfig cfg, const Flags& f) {
    if (f.seed) cfg.data.synthesize.seed = *f.seed;
    cfg.data.csv.reset();
    const auto path = cfg.output_dir / "synthetic.csv";
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    write_csv(synthesize(cfg.data.synthesize), path);
    std::printf("%s\n", path.string().c_str());
    return kOk;
}

int cmd_split(const RunConfig& cfg) {
    const auto [train, test] = split(load_data(cfg), SplitSpec{cfg.train_fraction, cfg.base_seed});
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir / "split", ec);
    write_csv(train, cfg.output_dir / "split" / "train.csv");
    write_csv(test, cfg.output_dir / "split" / "test.csv");
    std::printf("train %zu  test %zu\n", train.size(), test.size());
    return kOk;
}

enum class Stage { Tune, Train, Evaluate, Pdp };

int cmd_tasks(const RunConfig& cfg, Stage stage) {
    const auto data = load_data(cfg);
    TaskOptions opts;
    opts.tune_only = stage == Stage::Tune;
    opts.pdp = stage == Stage::Pdp;
    bool converged = true;
    std::vector<TaskResult> tasks;
    for (auto m : cfg.models) {
        for (auto t : cfg.targets) {
            auto r = run_task(data, cfg, m, t, cfg.base_seed, opts);
            write_tuning(r, cfg.output_dir);
            if (stage == Stage::Tune) {
                std::printf("%s %s %s\n", std::string(to_string(m)).c_str(), std::string(to_string(t)).c_str(),
                            to_json(r.tuning.best_candidate).dump().c_str());
                continue;
            }
            progress(r);
            converged = converged && r.converged;
            write_model(r, cfg.output_dir);
            if (stage == Stage::Evaluate) write_plot_data(r, cfg.output_dir);
            if (stage == Stage::Pdp) write_pdp(r, cfg.output_dir);
            tasks.push_back(std::move(r));
        }
    }
    if (stage == Stage::Evaluate) write_text(cfg.output_dir / "metrics.csv", metrics_csv(tasks));
    return converged ? kOk : kNonConvergence;
}

int cmd_repeat(const RunConfig& cfg) {
    const auto data = load_data(cfg);
    std::vector<RepeatSummary> out;
    Json all = Json::array();
    bool converged = true;
    for (auto m : cfg.models) {
        for (auto t : cfg.targets) {
            auto r = repeat_study(data, cfg, m, t, cfg.repeats);
            std::printf("%-9s %-3s r2 %s  rmse %s  mae %s  mape %s\n", std::string(to_string(m)).c_str(),
                        std::string(to_string(t)).c_str(), r.r2.formatted().c_str(), r.rmse.formatted().c_str(),
                        r.mae.formatted().c_str(), r.mape.formatted().c_str());
            for (const auto& run : r.runs) converged = converged && run.converged;
            all.push_back(to_json(r));
            out.push_back(std::move(r));
        }
    }
    write_text(cfg.output_dir / "repeat.csv", repeat_csv(out));
    write_text(cfg.output_dir / "repeat.json", dump(all));
    return converged ? kOk : kNonConvergence;
}

int cmd_report(const RunConfig& cfg, bool with_repeats) {
    const auto study = run_study(load_data(cfg), cfg, with_repeats);
    for (const auto& t : study.tasks) progress(t);
    emit_report(study, cfg.output_dir);
    std::printf("%s\n", cfg.output_dir.string().c_str());
    return study.converged() ? kOk : kNonConvergence;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Soil strength regression study: SVR and boosted trees with CV tuning"};
    app.require_subcommand(1);
    Flags flags;
    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {"stats", "Summary statistics of the configured data"},
        {"synth", "Write a synthetic dataset as CSV"},
        {"split", "Write the train/test partitions"},
        {"tune", "Cross-validated grid search"},
        {"train", "Tune, then refit the winner on the training partition"},
        {"evaluate", "Train and evaluate on both partitions"},
        {"pdp", "Train and compute partial dependence curves"},
        {"repeat", "Repeated-split study with mean and std of test metrics"},
        {"report", "Full report for the primary split"},
        {"all", "Full report plus the repeated-split study"},
    };
    std::vector<CLI::App*> cmds;
    for (const auto& s : subs) {
        auto* c = app.add_subcommand(s.name, s.help);
        add_flags(c, flags);
        cmds.push_back(c);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        const RunConfig cfg = resolve(flags);
        if (name == "stats") return cmd_stats(cfg, !flags.out.empty());
        if (name == "synth") return cmd_synth(cfg, flags);
        if (name == "split") return cmd_split(cfg);
        if (name == "tune") return cmd_tasks(cfg, Stage::Tune);
        if (name == "train") return cmd_tasks(cfg, Stage::Train);
        if (name == "evaluate") return cmd_tasks(cfg, Stage::Evaluate);
        if (name == "pdp") return cmd_tasks(cfg, Stage::Pdp);
        if (name == "repeat") return cmd_repeat(cfg);
        if (name == "report") return cmd_report(cfg, false);
        return cmd_report(cfg, true);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    }
}
