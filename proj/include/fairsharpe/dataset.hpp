#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fairsharpe/errors.hpp"
#include "fairsharpe/rng.hpp"

namespace fairsharpe {

enum class ColumnKind { numeric, categorical, sensitive, label };

/// One raw input column. Categorical columns carry their level set once
/// frozen (levels sorted lexicographically so the encoded layout does not
/// depend on row order).
struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    std::vector<std::string> levels; // categorical only; empty until frozen
};

/// Declares how raw columns map onto the encoded sample: which column is the
/// sensitive attribute, which is the label, and the tokens for label +1 and
/// sensitive group 1. Tokens are declared, never inferred from data.
struct FeatureSchema {
    std::vector<ColumnSpec> columns;
    std::string positive_label;
    std::string group1;

    void validate() const {
        std::size_t n_sensitive = 0, n_label = 0;
        for (const auto& c : columns) {
            if (c.kind == ColumnKind::sensitive) ++n_sensitive;
            if (c.kind == ColumnKind::label) ++n_label;
        }
        if (n_sensitive != 1)
            raise(errc::invalid_spec, "schema must declare exactly one sensitive column");
        if (n_label != 1)
            raise(errc::invalid_spec, "schema must declare exactly one label column");
        if (positive_label.empty())
            raise(errc::invalid_spec, "schema missing positive_label token");
        if (group1.empty())
            raise(errc::invalid_spec, "schema missing group1 token");
    }

    bool frozen() const {
        for (const auto& c : columns)
            if (c.kind == ColumnKind::categorical && c.levels.empty()) return false;
        return true;
    }
};

/// One column of the encoded feature matrix. `numeric` columns are subject
/// to standardization; one-hot indicators are not.
struct EncodedColumn {
    std::string name;
    bool numeric = false;
};

/// Per-encoded-column affine transform x -> (x - mean) / stddev.
/// Indicator columns carry the identity (mean 0, stddev 1); stddev > 0 always.
struct ScalingParams {
    std::vector<double> mean;
    std::vector<double> stddev;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

/// Shortest representation that round-trips exactly.
inline std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

inline std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t fnv1a(std::uint64_t h, const std::string& s) {
    return fnv1a(h, s.data(), s.size());
}

} // namespace detail

/// Digest of the encoded layout plus the fitted scaling, used to refuse
/// evaluating a model against data encoded differently from its training run.
inline std::string encoding_digest(const std::vector<EncodedColumn>& columns,
                                   const FeatureSchema& schema,
                                   const std::optional<ScalingParams>& scaling) {
    std::uint64_t h = 14695981039346656037ULL;
    for (const auto& c : columns) {
        h = detail::fnv1a(h, c.name);
        const char tag = c.numeric ? 'n' : 'i';
        h = detail::fnv1a(h, &tag, 1);
    }
    h = detail::fnv1a(h, schema.positive_label);
    h = detail::fnv1a(h, schema.group1);
    if (scaling) {
        for (double v : scaling->mean) h = detail::fnv1a(h, &v, sizeof v);
        for (double v : scaling->stddev) h = detail::fnv1a(h, &v, sizeof v);
    }
    std::array<char, 17> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + 16, h, 16);
    std::string hex(buf.data(), ptr);
    return std::string(16 - hex.size(), '0') + hex;
}

/// Immutable encoded dataset: row-major feature matrix, {0,1} sensitive
/// attribute, {-1,+1} labels. Safe to share across threads once built.
class Dataset {
public:
    Dataset() = default;

    Dataset(std::vector<double> features, std::vector<std::uint8_t> sensitive,
            std::vector<std::int8_t> labels, std::vector<EncodedColumn> columns,
            FeatureSchema schema, std::optional<ScalingParams> scaling = std::nullopt)
        : features_(std::move(features)), sensitive_(std::move(sensitive)),
          labels_(std::move(labels)), columns_(std::move(columns)),
          schema_(std::move(schema)), scaling_(std::move(scaling)) {
        const std::size_t n = columns_.size();
        if (n == 0 || sensitive_.size() != labels_.size() ||
            features_.size() != sensitive_.size() * n)
            raise(errc::dimension_mismatch, "inconsistent dataset buffers");
        for (auto s : sensitive_)
            if (s != 0 && s != 1) raise(errc::invalid_spec, "sensitive attribute must be 0 or 1");
        for (auto y : labels_)
            if (y != -1 && y != 1) raise(errc::invalid_spec, "label must be -1 or +1");
        double acc = 0.0;
        for (auto s : sensitive_) acc += s;
        sensitive_mean_ = sensitive_.empty() ? 0.0 : acc / static_cast<double>(sensitive_.size());
        digest_ = encoding_digest(columns_, schema_, scaling_);
    }

    std::size_t size() const { return labels_.size(); }
    std::size_t dim() const { return columns_.size(); }

    std::span<const double> features(std::size_t i) const {
        return {features_.data() + i * dim(), dim()};
    }
    int sensitive(std::size_t i) const { return sensitive_[i]; }
    int label(std::size_t i) const { return labels_[i]; }

    const std::vector<EncodedColumn>& columns() const { return columns_; }
    const FeatureSchema& schema() const { return schema_; }
    const std::optional<ScalingParams>& scaling() const { return scaling_; }

    /// Mean of the sensitive attribute over the whole dataset.
    double sensitive_mean() const { return sensitive_mean_; }

    const std::string& schema_digest() const { return digest_; }

    Dataset subset(std::span<const std::size_t> indices) const {
        const std::size_t n = dim();
        std::vector<double> f(indices.size() * n);
        std::vector<std::uint8_t> s(indices.size());
        std::vector<std::int8_t> y(indices.size());
        for (std::size_t k = 0; k < indices.size(); ++k) {
            const std::size_t i = indices[k];
            std::copy_n(features_.data() + i * n, n, f.data() + k * n);
            s[k] = sensitive_[i];
            y[k] = labels_[i];
        }
        return Dataset(std::move(f), std::move(s), std::move(y), columns_, schema_, scaling_);
    }

private:
    std::vector<double> features_;
    std::vector<std::uint8_t> sensitive_;
    std::vector<std::int8_t> labels_;
    std::vector<EncodedColumn> columns_;
    FeatureSchema schema_;
    std::optional<ScalingParams> scaling_;
    double sensitive_mean_ = 0.0;
    std::string digest_;
};

/// Loads a comma-separated file under the given schema. Categorical levels
/// are frozen from the observed tokens on first use (sorted); a schema that
/// is already frozen rejects unseen tokens instead. Row order is preserved.
inline Dataset load_csv(const std::filesystem::path& path, FeatureSchema schema) {
    schema.validate();

    std::ifstream in(path);
    if (!in) raise(errc::io_error, "cannot open " + path.string());

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && detail::trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) raise(errc::empty_file, path.string() + " has no header row");
    if (lines.size() == 1) raise(errc::empty_file, path.string() + " has no data rows");

    const auto header = detail::split_line(lines[0]);
    std::vector<std::size_t> col_index(schema.columns.size());
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        const auto it = std::find(header.begin(), header.end(), schema.columns[c].name);
        if (it == header.end())
            raise(errc::missing_column, "'" + schema.columns[c].name + "' not in header of " + path.string());
        col_index[c] = static_cast<std::size_t>(it - header.begin());
    }

    const std::size_t n_rows = lines.size() - 1;
    std::vector<std::vector<std::string>> cells(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) {
        cells[r] = detail::split_line(lines[r + 1]);
        for (std::size_t c = 0; c < schema.columns.size(); ++c)
            if (col_index[c] >= cells[r].size())
                raise(errc::unparseable_value,
                      "row " + std::to_string(r) + " is missing column '" + schema.columns[c].name + "'");
    }

    // Freeze level sets from the observed tokens; columns that already carry
    // levels keep them and reject anything unseen during encoding below.
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        auto& col = schema.columns[c];
        if (col.kind != ColumnKind::categorical || !col.levels.empty()) continue;
        std::set<std::string> seen;
        for (std::size_t r = 0; r < n_rows; ++r) seen.insert(cells[r][col_index[c]]);
        col.levels.assign(seen.begin(), seen.end());
    }

    std::vector<EncodedColumn> columns;
    std::vector<std::pair<std::size_t, std::size_t>> feature_src; // (schema col, level or 0)
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        const auto& col = schema.columns[c];
        if (col.kind == ColumnKind::numeric) {
            columns.push_back({col.name, true});
            feature_src.emplace_back(c, 0);
        } else if (col.kind == ColumnKind::categorical) {
            for (std::size_t l = 0; l < col.levels.size(); ++l) {
                columns.push_back({col.name + "=" + col.levels[l], false});
                feature_src.emplace_back(c, l);
            }
        }
    }

    const std::size_t n = columns.size();
    std::vector<double> features(n_rows * n, 0.0);
    std::vector<std::uint8_t> sensitive(n_rows);
    std::vector<std::int8_t> labels(n_rows);

    for (std::size_t r = 0; r < n_rows; ++r) {
        for (std::size_t f = 0; f < n; ++f) {
            const auto [c, level] = feature_src[f];
            const auto& col = schema.columns[c];
            const std::string& tok = cells[r][col_index[c]];
            if (col.kind == ColumnKind::numeric) {
                double v = 0.0;
                auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
                if (ec != std::errc{} || ptr != tok.data() + tok.size())
                    raise(errc::unparseable_value,
                          "row " + std::to_string(r) + " col '" + col.name + "': '" + tok + "'");
                features[r * n + f] = v;
            } else {
                if (tok == col.levels[level]) {
                    features[r * n + f] = 1.0;
                } else if (level == 0 &&
                           std::find(col.levels.begin(), col.levels.end(), tok) == col.levels.end()) {
                    raise(errc::unknown_category,
                          "row " + std::to_string(r) + " col '" + col.name + "': '" + tok + "'");
                }
            }
        }
        for (std::size_t c = 0; c < schema.columns.size(); ++c) {
            const auto& col = schema.columns[c];
            const std::string& tok = cells[r][col_index[c]];
            if (col.kind == ColumnKind::sensitive)
                sensitive[r] = tok == schema.group1 ? 1 : 0;
            else if (col.kind == ColumnKind::label)
                labels[r] = tok == schema.positive_label ? 1 : -1;
        }
    }

    return Dataset(std::move(features), std::move(sensitive), std::move(labels),
                   std::move(columns), std::move(schema));
}

/// Fits per-column mean and population (1/N) standard deviation on the
/// numeric columns and returns the transformed dataset plus the fitted
/// parameters. A constant column gets stddev 1 and maps to zeros.
inline std::pair<Dataset, ScalingParams> standardize(const Dataset& d) {
    if (d.size() == 0) raise(errc::empty_dataset, "standardize");
    const std::size_t n = d.dim(), N = d.size();
    ScalingParams p;
    p.mean.assign(n, 0.0);
    p.stddev.assign(n, 1.0);

    for (std::size_t f = 0; f < n; ++f) {
        if (!d.columns()[f].numeric) continue;
        double sum = 0.0;
        for (std::size_t i = 0; i < N; ++i) sum += d.features(i)[f];
        const double mean = sum / static_cast<double>(N);
        double ss = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double dv = d.features(i)[f] - mean;
            ss += dv * dv;
        }
        const double var = ss / static_cast<double>(N);
        p.mean[f] = mean;
        p.stddev[f] = var == 0.0 ? 1.0 : std::sqrt(var);
    }

    std::vector<double> features(N * n);
    std::vector<std::uint8_t> sensitive(N);
    std::vector<std::int8_t> labels(N);
    for (std::size_t i = 0; i < N; ++i) {
        const auto row = d.features(i);
        for (std::size_t f = 0; f < n; ++f)
            features[i * n + f] = (row[f] - p.mean[f]) / p.stddev[f];
        sensitive[i] = static_cast<std::uint8_t>(d.sensitive(i));
        labels[i] = static_cast<std::int8_t>(d.label(i));
    }
    Dataset out(std::move(features), std::move(sensitive), std::move(labels),
                d.columns(), d.schema(), p);
    return {std::move(out), std::move(p)};
}

/// Applies previously fitted scaling, e.g. to held-out data.
inline Dataset apply_scaling(const Dataset& d, const ScalingParams& p) {
    const std::size_t n = d.dim(), N = d.size();
    if (p.mean.size() != n || p.stddev.size() != n)
        raise(errc::dimension_mismatch, "scaling params do not match dataset dimension");
    std::vector<double> features(N * n);
    std::vector<std::uint8_t> sensitive(N);
    std::vector<std::int8_t> labels(N);
    for (std::size_t i = 0; i < N; ++i) {
        const auto row = d.features(i);
        for (std::size_t f = 0; f < n; ++f)
            features[i * n + f] = (row[f] - p.mean[f]) / p.stddev[f];
        sensitive[i] = static_cast<std::uint8_t>(d.sensitive(i));
        labels[i] = static_cast<std::int8_t>(d.label(i));
    }
    return Dataset(std::move(features), std::move(sensitive), std::move(labels),
                   d.columns(), d.schema(), p);
}

struct SplitSpec {
    std::size_t n_train = 0;
    std::uint64_t seed = 0;
};

/// Uniform train/test partition without replacement: seeded shuffle of the
/// index range, prefix taken as train. Both parts keep original row order.
inline std::pair<Dataset, Dataset> split(const Dataset& d, const SplitSpec& spec) {
    if (spec.n_train < 1 || spec.n_train >= d.size())
        raise(errc::invalid_split,
              "n_train=" + std::to_string(spec.n_train) + " with N=" + std::to_string(d.size()));
    std::vector<std::size_t> idx(d.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Rng rng(spec.seed);
    shuffle_indices(idx, rng);
    std::vector<std::size_t> train_idx(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(spec.n_train));
    std::vector<std::size_t> test_idx(idx.begin() + static_cast<std::ptrdiff_t>(spec.n_train), idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {d.subset(train_idx), d.subset(test_idx)};
}

/// One Gaussian cluster of the synthetic generator: `count` samples with the
/// given mean, assigned to (group, label).
struct SynthCell {
    int group = 0;
    int label = 1;
    std::size_t count = 0;
    std::vector<double> mean;
};

struct SynthSpec {
    std::vector<SynthCell> cells;
    double noise_std = 1.0;
};

/// Deterministic Gaussian-cluster test fixture generator.
inline Dataset synthesize(const SynthSpec& spec, std::uint64_t seed) {
    if (spec.cells.empty()) raise(errc::invalid_spec, "no cells");
    if (!(spec.noise_std > 0.0)) raise(errc::invalid_spec, "noise_std must be > 0");
    const std::size_t n = spec.cells.front().mean.size();
    if (n == 0) raise(errc::invalid_spec, "zero-dimensional means");
    std::array<std::size_t, 2> group_total{0, 0};
    std::size_t total = 0;
    for (const auto& cell : spec.cells) {
        if (cell.group != 0 && cell.group != 1) raise(errc::invalid_spec, "group must be 0 or 1");
        if (cell.label != -1 && cell.label != 1) raise(errc::invalid_spec, "label must be -1 or +1");
        if (cell.mean.size() != n) raise(errc::invalid_spec, "cell means differ in dimension");
        group_total[static_cast<std::size_t>(cell.group)] += cell.count;
        total += cell.count;
    }
    if (group_total[0] == 0) raise(errc::invalid_spec, "group 0 has zero samples across labels");
    if (group_total[1] == 0) raise(errc::invalid_spec, "group 1 has zero samples across labels");

    std::vector<double> features(total * n);
    std::vector<std::uint8_t> sensitive(total);
    std::vector<std::int8_t> labels(total);
    Rng rng(seed);
    std::size_t r = 0;
    for (const auto& cell : spec.cells) {
        for (std::size_t k = 0; k < cell.count; ++k, ++r) {
            for (std::size_t f = 0; f < n; ++f)
                features[r * n + f] = cell.mean[f] + spec.noise_std * rng.gaussian();
            sensitive[r] = static_cast<std::uint8_t>(cell.group);
            labels[r] = static_cast<std::int8_t>(cell.label);
        }
    }

    FeatureSchema schema;
    schema.positive_label = "1";
    schema.group1 = "1";
    std::vector<EncodedColumn> columns;
    for (std::size_t f = 0; f < n; ++f) {
        const std::string name = "x" + std::to_string(f + 1);
        schema.columns.push_back({name, ColumnKind::numeric, {}});
        columns.push_back({name, true});
    }
    schema.columns.push_back({"g", ColumnKind::sensitive, {}});
    schema.columns.push_back({"y", ColumnKind::label, {}});

    return Dataset(std::move(features), std::move(sensitive), std::move(labels),
                   std::move(columns), std::move(schema));
}

/// Writes a dataset whose schema is plain numeric + sensitive + label back to
/// CSV, byte-reproducibly, so that load_csv recovers the exact values.
inline void write_csv(const Dataset& d, const std::filesystem::path& path,
                      const std::string& negative_label_token = "-1",
                      const std::string& group0_token = "0") {
    for (const auto& c : d.schema().columns)
        if (c.kind == ColumnKind::categorical)
            raise(errc::invalid_spec, "write_csv supports numeric feature schemas only");
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(errc::io_error, "cannot write " + path.string());

    std::string header;
    for (const auto& c : d.schema().columns) {
        if (!header.empty()) header += ',';
        header += c.name;
    }
    out << header << '\n';

    for (std::size_t i = 0; i < d.size(); ++i) {
        std::string row;
        std::size_t f = 0;
        for (const auto& c : d.schema().columns) {
            if (!row.empty()) row += ',';
            if (c.kind == ColumnKind::numeric)
                row += detail::format_double(d.features(i)[f++]);
            else if (c.kind == ColumnKind::sensitive)
                row += d.sensitive(i) == 1 ? d.schema().group1 : group0_token;
            else
                row += d.label(i) == 1 ? d.schema().positive_label : negative_label_token;
        }
        out << row << '\n';
    }
}

} // namespace fairsharpe
