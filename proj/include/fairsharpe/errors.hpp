#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fairsharpe {

enum class errc {
    missing_column,
    unparseable_value,
    unknown_category,
    empty_file,
    invalid_split,
    invalid_spec,
    dimension_mismatch,
    empty_dataset,
    empty_group,
    invalid_batch_size,
    non_finite_iterate,
    benchmark_violated,
    schema_mismatch,
    empty_front,
    io_error,
    config_error,
};

/// Library-wide exception. Every failure path throws one of these with a
/// typed code so callers (and the CLI) can map errors to behavior.
class Error : public std::runtime_error {
public:
    Error(errc code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

inline const char* errc_name(errc c) {
    switch (c) {
    case errc::missing_column: return "MissingColumn";
    case errc::unparseable_value: return "UnparseableValue";
    case errc::unknown_category: return "UnknownCategory";
    case errc::empty_file: return "EmptyFile";
    case errc::invalid_split: return "InvalidSplit";
    case errc::invalid_spec: return "InvalidSpec";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::empty_dataset: return "EmptyDataset";
    case errc::empty_group: return "EmptyGroup";
    case errc::invalid_batch_size: return "InvalidBatchSize";
    case errc::non_finite_iterate: return "NonFiniteIterate";
    case errc::benchmark_violated: return "BenchmarkViolated";
    case errc::schema_mismatch: return "SchemaMismatch";
    case errc::empty_front: return "EmptyFront";
    case errc::io_error: return "IoError";
    case errc::config_error: return "ConfigError";
    }
    return "Unknown";
}

[[noreturn]] inline void raise(errc code, const std::string& detail) {
    throw Error(code, std::string(errc_name(code)) + ": " + detail);
}

} // namespace fairsharpe
