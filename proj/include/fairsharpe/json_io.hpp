#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairsharpe/dataset.hpp"
#include "fairsharpe/errors.hpp"
#include "fairsharpe/fairness.hpp"
#include "fairsharpe/model.hpp"
#include "fairsharpe/pareto.hpp"
#include "fairsharpe/sharpe.hpp"

namespace fairsharpe {

using json = nlohmann::json;

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(errc::io_error, "cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        raise(errc::config_error, path.string() + ": " + e.what());
    }
    return j;
}

inline void write_json_file(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(errc::io_error, "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

// ---- feature schema ------------------------------------------------------

inline const char* column_kind_name(ColumnKind k) {
    switch (k) {
    case ColumnKind::numeric: return "numeric";
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::sensitive: return "sensitive";
    case ColumnKind::label: return "label";
    }
    return "numeric";
}

inline ColumnKind column_kind_from_name(const std::string& s) {
    if (s == "numeric") return ColumnKind::numeric;
    if (s == "categorical") return ColumnKind::categorical;
    if (s == "sensitive") return ColumnKind::sensitive;
    if (s == "label") return ColumnKind::label;
    raise(errc::config_error, "unknown column kind '" + s + "'");
}

inline json schema_to_json(const FeatureSchema& schema) {
    json cols = json::array();
    for (const auto& c : schema.columns) {
        json jc = {{"name", c.name}, {"kind", column_kind_name(c.kind)}};
        if (c.kind == ColumnKind::categorical && !c.levels.empty()) jc["levels"] = c.levels;
        cols.push_back(std::move(jc));
    }
    return {{"columns", std::move(cols)},
            {"positive_label", schema.positive_label},
            {"group1", schema.group1}};
}

inline FeatureSchema schema_from_json(const json& j) {
    FeatureSchema schema;
    try {
        for (const auto& jc : j.at("columns")) {
            ColumnSpec c;
            c.name = jc.at("name").get<std::string>();
            c.kind = column_kind_from_name(jc.at("kind").get<std::string>());
            if (jc.contains("levels")) c.levels = jc["levels"].get<std::vector<std::string>>();
            schema.columns.push_back(std::move(c));
        }
        schema.positive_label = j.at("positive_label").get<std::string>();
        schema.group1 = j.at("group1").get<std::string>();
    } catch (const json::exception& e) {
        raise(errc::config_error, std::string("schema json: ") + e.what());
    }
    schema.validate();
    return schema;
}

/// Frozen-schema artifact written next to a trained model: the fitted levels
/// plus the scaling, enough to encode held-out data identically.
inline json frozen_schema_json(const Dataset& d) {
    json j = schema_to_json(d.schema());
    if (d.scaling()) {
        j["scaling"] = {{"mean", d.scaling()->mean}, {"stddev", d.scaling()->stddev}};
    }
    j["digest"] = d.schema_digest();
    return j;
}

inline std::optional<ScalingParams> scaling_from_json(const json& j) {
    if (!j.contains("scaling")) return std::nullopt;
    ScalingParams p;
    try {
        p.mean = j["scaling"].at("mean").get<std::vector<double>>();
        p.stddev = j["scaling"].at("stddev").get<std::vector<double>>();
    } catch (const json::exception& e) {
        raise(errc::config_error, std::string("scaling json: ") + e.what());
    }
    return p;
}

// ---- model ---------------------------------------------------------------

inline json model_to_json(const LinearModel& m, const std::string& schema_digest) {
    return {{"c", m.weights},
            {"b", m.bias},
            {"n", m.dim()},
            {"schema_digest", schema_digest}};
}

struct StoredModel {
    LinearModel model;
    std::string schema_digest;
};

inline StoredModel model_from_json(const json& j) {
    StoredModel s;
    try {
        s.model.weights = j.at("c").get<std::vector<double>>();
        s.model.bias = j.at("b").get<double>();
        s.schema_digest = j.at("schema_digest").get<std::string>();
        if (j.at("n").get<std::size_t>() != s.model.dim())
            raise(errc::config_error, "model json: n disagrees with |c|");
    } catch (const json::exception& e) {
        raise(errc::config_error, std::string("model json: ") + e.what());
    }
    return s;
}

// ---- fairness report -----------------------------------------------------

inline json fairness_report_to_json(const FairnessReport& r) {
    return {{"cv_score", r.cv_score},
            {"p_pos_group0", r.p_pos_group0},
            {"p_pos_group1", r.p_pos_group1},
            {"boundary_covariance", r.boundary_covariance},
            {"f2_di", r.f2_di}};
}

inline FairnessReport fairness_report_from_json(const json& j) {
    FairnessReport r;
    try {
        r.cv_score = j.at("cv_score").get<double>();
        r.p_pos_group0 = j.at("p_pos_group0").get<double>();
        r.p_pos_group1 = j.at("p_pos_group1").get<double>();
        r.boundary_covariance = j.at("boundary_covariance").get<double>();
        r.f2_di = j.at("f2_di").get<double>();
    } catch (const json::exception& e) {
        raise(errc::config_error, std::string("fairness report json: ") + e.what());
    }
    return r;
}

// ---- pareto front --------------------------------------------------------

inline json front_to_json(const ParetoFront& front, const std::string& schema_digest) {
    json pts = json::array();
    for (const auto& p : front.points()) {
        pts.push_back({{"weight", p.weight},
                       {"f1", p.objectives.f1},
                       {"f2", p.objectives.f2},
                       {"error_train", p.error_train},
                       {"error_test", p.error_test},
                       {"train", fairness_report_to_json(p.train_report)},
                       {"test", fairness_report_to_json(p.test_report)},
                       {"model", model_to_json(p.model, schema_digest)}});
    }
    return {{"points", std::move(pts)}};
}

struct StoredFront {
    ParetoFront front;
    std::string schema_digest;
};

inline StoredFront front_from_json(const json& j) {
    StoredFront s;
    try {
        for (const auto& jp : j.at("points")) {
            FrontPoint p;
            p.weight = jp.at("weight").get<double>();
            p.objectives.f1 = jp.at("f1").get<double>();
            p.objectives.f2 = jp.at("f2").get<double>();
            p.error_train = jp.at("error_train").get<double>();
            p.error_test = jp.at("error_test").get<double>();
            p.train_report = fairness_report_from_json(jp.at("train"));
            p.test_report = fairness_report_from_json(jp.at("test"));
            StoredModel sm = model_from_json(jp.at("model"));
            p.model = std::move(sm.model);
            s.schema_digest = sm.schema_digest;
            s.front.insert(std::move(p));
        }
    } catch (const json::exception& e) {
        raise(errc::config_error, std::string("front json: ") + e.what());
    }
    if (s.front.empty()) raise(errc::empty_front, "front json has no points");
    return s;
}

// ---- sharpe result -------------------------------------------------------

inline json sharpe_result_to_json(const SharpeResult& r, const std::string& schema_digest) {
    json j = {{"model", model_to_json(r.model, schema_digest)},
              {"ratio", r.ratio},
              {"f1", r.f1},
              {"f2", r.f2},
              {"ff", r.ff},
              {"floor_active", r.floor_active}};
    if (r.nondominated) j["nondominated"] = *r.nondominated;
    return j;
}

// ---- synthetic data spec ---------------------------------------------------

inline SynthSpec synth_spec_from_json(const json& j) {
    SynthSpec spec;
    try {
        spec.noise_std = j.at("noise_std").get<double>();
        for (const auto& jc : j.at("cells")) {
            SynthCell cell;
            cell.group = jc.at("group").get<int>();
            cell.label = jc.at("label").get<int>();
            cell.count = jc.at("count").get<std::size_t>();
            cell.mean = jc.at("mean").get<std::vector<double>>();
            spec.cells.push_back(std::move(cell));
        }
    } catch (const json::exception& e) {
        raise(errc::config_error, std::string("synth spec json: ") + e.what());
    }
    return spec;
}

inline json synth_spec_to_json(const SynthSpec& spec) {
    json cells = json::array();
    for (const auto& c : spec.cells)
        cells.push_back(
            {{"group", c.group}, {"label", c.label}, {"count", c.count}, {"mean", c.mean}});
    return {{"noise_std", spec.noise_std}, {"cells", std::move(cells)}};
}

} // namespace fairsharpe
