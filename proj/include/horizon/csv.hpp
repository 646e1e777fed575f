#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "horizon/types.hpp"

namespace horizon {

enum class SpendUnit { flop, usd };

struct SpendRecord {
    double year;
    double value;
    SpendUnit unit;
};

struct FlopPerUsdRecord {
    double year;
    double flop_per_usd;
};

template <typename T>
struct Parsed {
    std::vector<T> records;
    std::vector<std::string> warnings;
};

// All parsers accept UTF-8 text with a header row, skip blank and `#` lines,
// and preserve row order. A missing required column throws SchemaError;
// bad rows are collected into a single ValidationError carrying line numbers.
Parsed<HorizonObservation> parse_horizons_csv(std::string_view text);
Parsed<SpendRecord> parse_compute_spend_csv(std::string_view text);
Parsed<FlopPerUsdRecord> parse_flop_per_usd_csv(std::string_view text);
Parsed<ModelBenchmarkObservation> parse_family_benchmarks_csv(std::string_view text);

std::string serialize_horizons_csv(const std::vector<HorizonObservation>& rows);
std::string serialize_compute_spend_csv(const std::vector<SpendRecord>& rows);
std::string serialize_flop_per_usd_csv(const std::vector<FlopPerUsdRecord>& rows);
std::string serialize_family_benchmarks_csv(const std::vector<ModelBenchmarkObservation>& rows);

std::string iso_from_instant(Instant t);

// Reads a whole file; throws InputError naming the path when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace horizon
