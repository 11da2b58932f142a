// Command-line front end: trace accuracy/disparate-impact fronts, solve the
// max-ratio predictor, evaluate stored models, generate synthetic fixtures.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fairsharpe/json_io.hpp"
#include "fairsharpe/runner.hpp"

namespace {

struct CommonFlags {
    std::string config;
    std::string data;
    std::string schema;
    std::string out;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config, "run configuration JSON");
    cmd->add_option("--data", flags.data, "dataset CSV path");
    cmd->add_option("--schema", flags.schema, "feature schema JSON path");
    cmd->add_option("--out", flags.out, "output directory");
    cmd->add_option("--seed", flags.seed, "override split and SGD seeds");
}

fairsharpe::RunConfig build_config(const CommonFlags& flags) {
    fairsharpe::RunConfig cfg;
    if (!flags.config.empty()) cfg = fairsharpe::load_run_config(flags.config);
    if (!flags.data.empty()) cfg.data = flags.data;
    if (!flags.schema.empty()) cfg.schema = flags.schema;
    if (!flags.out.empty()) cfg.out = flags.out;
    if (flags.seed) {
        cfg.sgd.seed = *flags.seed;
        if (cfg.split) cfg.split->seed = *flags.seed;
    }
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fair linear classifiers: accuracy/disparate-impact Pareto fronts "
                 "and the maximum return-to-risk predictor"};
    app.require_subcommand(1);

    CommonFlags front_flags, sharpe_flags, eval_flags, synth_flags;

    CLI::App* front = app.add_subcommand("front", "trace the accuracy/fairness Pareto front");
    add_common(front, front_flags);

    CLI::App* sharpe = app.add_subcommand("sharpe", "solve the max-ratio predictor");
    add_common(sharpe, sharpe_flags);
    std::optional<double> ff, delta;
    std::string front_file;
    sharpe->add_option("--ff", ff, "benchmark loss");
    sharpe->add_option("--delta", delta, "benchmark offset below the front's max f1");
    sharpe->add_option("--front", front_file, "front JSON for warm start and verification");

    CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate a stored model on a dataset");
    add_common(evaluate, eval_flags);
    std::string model_file;
    evaluate->add_option("--model", model_file, "model JSON path")->required();

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    add_common(synth, synth_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    using fairsharpe::run_guarded;

    if (front->parsed()) {
        return run_guarded([&] { fairsharpe::cmd_front(build_config(front_flags)); });
    }
    if (sharpe->parsed()) {
        return run_guarded([&] {
            fairsharpe::RunConfig cfg = build_config(sharpe_flags);
            if (ff) cfg.ff = *ff;
            if (delta) cfg.delta = *delta;
            if (!front_file.empty()) cfg.front_file = front_file;
            fairsharpe::cmd_sharpe(cfg);
        });
    }
    if (evaluate->parsed()) {
        return run_guarded([&] {
            fairsharpe::RunConfig cfg = build_config(eval_flags);
            cfg.model_file = model_file;
            fairsharpe::cmd_evaluate(cfg);
        });
    }
    if (synth->parsed()) {
        return run_guarded([&] {
            if (synth_flags.config.empty())
                fairsharpe::raise(fairsharpe::errc::config_error,
                                  "synth requires --config with a generator spec");
            const auto spec =
                fairsharpe::synth_spec_from_json(fairsharpe::read_json_file(synth_flags.config));
            fairsharpe::cmd_synth(spec, synth_flags.seed.value_or(0),
                                  synth_flags.out.empty() ? "." : synth_flags.out);
        });
    }
    return 2;
}
