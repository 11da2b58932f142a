#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "fairsharpe/dataset.hpp"
#include "fairsharpe/errors.hpp"
#include "fairsharpe/json_io.hpp"
#include "fairsharpe/pareto.hpp"
#include "fairsharpe/sgd.hpp"
#include "fairsharpe/sharpe.hpp"

namespace fairsharpe {

/// One experiment: where the data lives, how to split and train, what to
/// trace and solve. Loaded from a JSON file; command-line flags override
/// individual fields. All randomness flows from the two seeds here.
struct RunConfig {
    std::filesystem::path data;
    std::filesystem::path schema;
    std::filesystem::path out = ".";
    std::optional<SplitSpec> split;
    LossConfig loss;
    SGDConfig sgd;
    FrontConfig front;
    std::optional<double> ff;
    std::optional<double> delta; // ff = front max f1 - delta when ff not given
    double epsilon_f2 = 1e-12;
    std::optional<std::filesystem::path> front_file;
    std::optional<std::filesystem::path> model_file;
};

inline RunConfig run_config_from_json(const json& j) {
    RunConfig cfg;
    try {
        if (j.contains("data")) cfg.data = j["data"].get<std::string>();
        if (j.contains("schema")) cfg.schema = j["schema"].get<std::string>();
        if (j.contains("out")) cfg.out = j["out"].get<std::string>();
        if (j.contains("split")) {
            SplitSpec s;
            s.n_train = j["split"].at("n_train").get<std::size_t>();
            s.seed = j["split"].value("seed", 0ULL);
            cfg.split = s;
        }
        if (j.contains("loss")) cfg.loss.lambda = j["loss"].value("lambda", 0.0);
        if (j.contains("sgd")) {
            const auto& s = j["sgd"];
            cfg.sgd.step_size = s.value("step_size", cfg.sgd.step_size);
            cfg.sgd.iterations = s.value("iterations", cfg.sgd.iterations);
            cfg.sgd.batch0 = s.value("batch0", cfg.sgd.batch0);
            cfg.sgd.growth = s.value("growth", cfg.sgd.growth);
            cfg.sgd.seed = s.value("seed", cfg.sgd.seed);
            cfg.sgd.checkpoint_every = s.value("checkpoint_every", cfg.sgd.checkpoint_every);
        }
        if (j.contains("front")) {
            const auto& f = j["front"];
            cfg.front.grid = f.value("grid", cfg.front.grid);
            if (f.contains("weights")) cfg.front.weights = f["weights"].get<std::vector<double>>();
            cfg.front.parallel = f.value("parallel", false);
        }
        if (j.contains("sharpe")) {
            const auto& s = j["sharpe"];
            if (s.contains("ff")) cfg.ff = s["ff"].get<double>();
            if (s.contains("delta")) cfg.delta = s["delta"].get<double>();
            cfg.epsilon_f2 = s.value("epsilon_f2", cfg.epsilon_f2);
            if (s.contains("front")) cfg.front_file = s["front"].get<std::string>();
        }
    } catch (const json::exception& e) {
        raise(errc::config_error, std::string("run config: ") + e.what());
    }
    return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    return run_config_from_json(read_json_file(path));
}

struct PreparedData {
    Dataset train;
    Dataset test;
};

/// Shared ingestion pipeline: load under the schema, split, fit scaling on
/// the training part only, and transform the test part with the fitted
/// parameters.
inline PreparedData prepare_data(const RunConfig& cfg) {
    if (cfg.data.empty()) raise(errc::config_error, "data path required");
    if (cfg.schema.empty()) raise(errc::config_error, "schema path required");
    if (!cfg.split) raise(errc::config_error, "split.n_train required");
    const FeatureSchema schema = schema_from_json(read_json_file(cfg.schema));
    const Dataset full = load_csv(cfg.data, schema);
    auto [train_raw, test_raw] = split(full, *cfg.split);
    auto [train, params] = standardize(train_raw);
    Dataset test = apply_scaling(test_raw, params);
    return {std::move(train), std::move(test)};
}

inline void cmd_front(const RunConfig& cfg, std::ostream& log = std::cout) {
    const PreparedData data = prepare_data(cfg);
    const ParetoFront front = trace_front(data.train, data.test, cfg.front, cfg.sgd, cfg.loss);
    if (front.empty()) raise(errc::empty_front, "front sweep produced no points");
    std::filesystem::create_directories(cfg.out);
    export_front_csv(front, cfg.out / "front.csv");
    write_json_file(front_to_json(front, data.train.schema_digest()), cfg.out / "front.json");
    write_json_file(frozen_schema_json(data.train), cfg.out / "schema_frozen.json");

    const auto& pts = front.points();
    log << "front points: " << pts.size() << "\n"
        << "f1 range: [" << detail::format_double(pts.front().objectives.f1) << ", "
        << detail::format_double(pts.back().objectives.f1) << "]\n"
        << "f2 range: [" << detail::format_double(pts.back().objectives.f2) << ", "
        << detail::format_double(pts.front().objectives.f2) << "]\n"
        << "wrote " << (cfg.out / "front.csv").string() << ", " << (cfg.out / "front.json").string()
        << "\n";
}

inline void cmd_sharpe(const RunConfig& cfg, std::ostream& log = std::cout) {
    const PreparedData data = prepare_data(cfg);

    std::optional<StoredFront> stored;
    if (cfg.front_file) {
        stored = front_from_json(read_json_file(*cfg.front_file));
        if (stored->schema_digest != data.train.schema_digest())
            raise(errc::schema_mismatch,
                  "front was traced on a different encoding (digest " + stored->schema_digest +
                      " vs " + data.train.schema_digest() + ")");
    }

    SharpeConfig sc;
    sc.sgd = cfg.sgd;
    sc.loss = cfg.loss;
    sc.epsilon_f2 = cfg.epsilon_f2;
    if (cfg.ff)
        sc.ff = *cfg.ff;
    else if (stored)
        sc.ff = default_ff(stored->front, cfg.delta.value_or(0.02));
    else
        raise(errc::config_error, "need sharpe.ff, or a front file to derive it from");

    SharpeResult result = solve_sharpe(data.train, data.test, sc, stored ? &stored->front : nullptr);
    if (stored) verify_nondominated(result, stored->front);

    std::filesystem::create_directories(cfg.out);
    write_json_file(sharpe_result_to_json(result, data.train.schema_digest()),
                    cfg.out / "sharpe.json");
    write_json_file(model_to_json(result.model, data.train.schema_digest()),
                    cfg.out / "model.json");
    export_trajectory_jsonl(result.trajectory, cfg.out / "sharpe_trajectory.jsonl");
    write_json_file(frozen_schema_json(data.train), cfg.out / "schema_frozen.json");

    log << "ff: " << detail::format_double(result.ff) << "\n"
        << "ratio: " << detail::format_double(result.ratio) << "\n"
        << "f1: " << detail::format_double(result.f1)
        << "  f2_di: " << detail::format_double(result.f2) << "\n"
        << "train error: " << detail::format_double(result.error_train)
        << "  cv: " << detail::format_double(result.cv_train) << "\n"
        << "test error: " << detail::format_double(result.error_test)
        << "  cv: " << detail::format_double(result.cv_test) << "\n";
    if (result.floor_active) log << "note: denominator floor active (f2 below epsilon)\n";
    if (result.nondominated)
        log << "nondominated vs front: " << (*result.nondominated ? "true" : "false") << "\n";
    log << "wrote " << (cfg.out / "sharpe.json").string() << "\n";
}

inline void cmd_evaluate(const RunConfig& cfg, std::ostream& log = std::cout) {
    if (!cfg.model_file) raise(errc::config_error, "model path required");
    if (cfg.data.empty()) raise(errc::config_error, "data path required");
    if (cfg.schema.empty()) raise(errc::config_error, "schema path required");

    const StoredModel sm = model_from_json(read_json_file(*cfg.model_file));
    const json schema_json = read_json_file(cfg.schema);
    const FeatureSchema schema = schema_from_json(schema_json);
    Dataset d = load_csv(cfg.data, schema);
    if (const auto scaling = scaling_from_json(schema_json)) d = apply_scaling(d, *scaling);
    if (d.schema_digest() != sm.schema_digest)
        raise(errc::schema_mismatch, "model digest " + sm.schema_digest +
                                         " does not match data encoding " + d.schema_digest());

    const double f1 = logistic_loss(sm.model, d);
    const double err = error_rate(sm.model, d);
    const double cv = cv_score(sm.model, d);
    const double f2 = f2_di(sm.model, d);

    log << "f1: " << detail::format_double(f1) << "\n"
        << "error_rate: " << detail::format_double(err) << "\n"
        << "cv_score: " << detail::format_double(cv) << "\n"
        << "f2_di: " << detail::format_double(f2) << "\n";

    std::filesystem::create_directories(cfg.out);
    write_json_file(
        json{{"f1", f1}, {"error_rate", err}, {"cv_score", cv}, {"f2_di", f2}},
        cfg.out / "eval.json");
}

inline void cmd_synth(const SynthSpec& spec, std::uint64_t seed,
                      const std::filesystem::path& outdir, std::ostream& log = std::cout) {
    const Dataset d = synthesize(spec, seed);
    std::filesystem::create_directories(outdir);
    write_csv(d, outdir / "synth.csv");
    write_json_file(schema_to_json(d.schema()), outdir / "synth_schema.json");
    log << "wrote " << (outdir / "synth.csv").string() << " (N=" << d.size()
        << ", dim=" << d.dim() << ")\n";
}

/// 0 success, 2 input error, 3 benchmark violation, 4 schema mismatch,
/// 1 internal.
inline int exit_code_for(errc c) {
    switch (c) {
    case errc::benchmark_violated: return 3;
    case errc::schema_mismatch: return 4;
    case errc::non_finite_iterate: return 1;
    default: return 2;
    }
}

template <typename F>
int run_guarded(F&& f, std::ostream& err = std::cerr) {
    try {
        f();
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace fairsharpe
