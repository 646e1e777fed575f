#include "horizon/csv.hpp"

#include <boost/tokenizer.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "horizon/errors.hpp"

namespace horizon {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

struct Row {
    std::size_t line;
    std::vector<std::string> cells;
};

struct Table {
    std::vector<std::string> header;
    std::vector<Row> rows;

    std::optional<std::size_t> find(std::string_view name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(std::distance(header.begin(), it));
    }

    std::size_t require(std::string_view name, std::string_view kind) const {
        if (auto idx = find(name)) return *idx;
        throw SchemaError(fmt::format("{}: missing required column '{}'", kind, name));
    }
};

std::vector<std::string> split_line(std::string_view line) {
    using Sep = boost::escaped_list_separator<char>;
    const std::string owned(line);
    boost::tokenizer<Sep> tok(owned, Sep('\\', ',', '"'));
    std::vector<std::string> out;
    for (const auto& cell : tok) out.emplace_back(trim(cell));
    return out;
}

Table read_table(std::string_view text, std::string_view kind) {
    Table table;
    bool have_header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    // Skip a UTF-8 byte-order mark.
    if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto raw = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            if (nl == text.size()) break;
            continue;
        }
        std::vector<std::string> cells;
        try {
            cells = split_line(line);
        } catch (const boost::escaped_list_error& e) {
            throw ValidationError(fmt::format("{}: line {}: malformed CSV ({})", kind, line_no, e.what()),
                                  {line_no});
        }
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
        } else {
            table.rows.push_back(Row{line_no, std::move(cells)});
        }
        if (nl == text.size()) break;
    }
    if (!have_header) {
        throw SchemaError(fmt::format("{}: missing header row", kind));
    }
    return table;
}

class RowErrors {
public:
    explicit RowErrors(std::string kind) : kind_(std::move(kind)) {}

    void add(std::size_t line, std::string message) {
        lines_.push_back(line);
        messages_.push_back(fmt::format("row {}: {}", line, message));
    }

    bool empty() const noexcept { return lines_.empty(); }

    void throw_if_any() const {
        if (lines_.empty()) return;
        std::string what = fmt::format("{}: {} invalid row(s)", kind_, lines_.size());
        for (const auto& m : messages_) what += "; " + m;
        throw ValidationError(what, lines_);
    }

private:
    std::string kind_;
    std::vector<std::size_t> lines_;
    std::vector<std::string> messages_;
};

const std::string& cell(const Row& row, std::size_t idx) {
    static const std::string empty;
    return idx < row.cells.size() ? row.cells[idx] : empty;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

// Blank is "absent"; anything else must be a finite number.
bool optional_number(const Row& row, std::size_t idx, std::string_view name, RowErrors& errors,
                     std::optional<double>& out) {
    const auto& text = cell(row, idx);
    if (trim(text).empty()) {
        out.reset();
        return true;
    }
    out = parse_double(text);
    if (!out) {
        errors.add(row.line, fmt::format("{} is not a number ('{}')", name, text));
        return false;
    }
    return true;
}

bool required_positive(const Row& row, std::size_t idx, std::string_view name, RowErrors& errors,
                       double& out) {
    const auto& text = cell(row, idx);
    const auto v = parse_double(text);
    if (!v) {
        errors.add(row.line, fmt::format("{} is missing or not a number ('{}')", name, text));
        return false;
    }
    if (!(*v > 0.0)) {
        errors.add(row.line, fmt::format("{} must be positive (got {})", name, text));
        return false;
    }
    out = *v;
    return true;
}

bool required_number(const Row& row, std::size_t idx, std::string_view name, RowErrors& errors,
                     double& out) {
    const auto& text = cell(row, idx);
    const auto v = parse_double(text);
    if (!v) {
        errors.add(row.line, fmt::format("{} is missing or not a number ('{}')", name, text));
        return false;
    }
    out = *v;
    return true;
}

std::optional<bool> parse_flag(std::string_view s) {
    s = trim(s);
    if (s.empty() || s == "1" || s == "true" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "no") return false;
    return std::nullopt;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string{}; }

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\\") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

template <typename Record>
void check_unique_years(const std::vector<Record>& records, const std::vector<std::size_t>& lines,
                        RowErrors& errors) {
    std::map<double, std::size_t> seen;
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto [it, inserted] = seen.emplace(records[i].year, lines[i]);
        if (!inserted) {
            errors.add(lines[i], fmt::format("duplicate year {} (first seen on row {})",
                                             num(records[i].year), it->second));
        }
    }
}

}  // namespace

Parsed<HorizonObservation> parse_horizons_csv(std::string_view text) {
    constexpr std::string_view kind = "horizons.csv";
    const Table table = read_table(text, kind);
    const auto c_model = table.require("model_id", kind);
    const auto c_dev = table.require("developer", kind);
    const auto c_date = table.require("release_date", kind);
    const auto c_p50 = table.require("p50_minutes", kind);
    const auto c_p80 = table.require("p80_minutes", kind);
    const auto c_flop = table.require("training_flop", kind);
    const auto c_sample = table.find("alg_progress_sample");

    Parsed<HorizonObservation> out;
    RowErrors errors{std::string(kind)};
    for (const auto& row : table.rows) {
        HorizonObservation obs;
        obs.model_id = cell(row, c_model);
        obs.developer = cell(row, c_dev);
        if (obs.model_id.empty()) {
            errors.add(row.line, "model_id is empty");
            continue;
        }
        try {
            obs.release = instant_from_iso(cell(row, c_date));
        } catch (const DomainError& e) {
            errors.add(row.line, e.what());
            continue;
        }
        bool ok = optional_number(row, c_p50, "p50_minutes", errors, obs.p50_minutes);
        ok = optional_number(row, c_p80, "p80_minutes", errors, obs.p80_minutes) && ok;
        ok = optional_number(row, c_flop, "training_flop", errors, obs.training_flop) && ok;
        if (!ok) continue;
        if (obs.p50_minutes && !(*obs.p50_minutes > 0.0)) {
            errors.add(row.line, fmt::format("p50_minutes must be positive (got {})", cell(row, c_p50)));
            continue;
        }
        if (obs.p80_minutes && !(*obs.p80_minutes > 0.0)) {
            errors.add(row.line, fmt::format("p80_minutes must be positive (got {})", cell(row, c_p80)));
            continue;
        }
        if (obs.training_flop && !(*obs.training_flop > 0.0)) {
            errors.add(row.line,
                       fmt::format("training_flop must be positive (got {})", cell(row, c_flop)));
            continue;
        }
        if (!obs.p50_minutes && !obs.p80_minutes) {
            errors.add(row.line, "at least one of p50_minutes / p80_minutes is required");
            continue;
        }
        if (obs.p50_minutes && obs.p80_minutes && *obs.p80_minutes > *obs.p50_minutes) {
            errors.add(row.line, "p80_minutes exceeds p50_minutes");
            continue;
        }
        if (c_sample) {
            const auto flag = parse_flag(cell(row, *c_sample));
            if (!flag) {
                errors.add(row.line, fmt::format("alg_progress_sample must be 0/1 (got '{}')",
                                                 cell(row, *c_sample)));
                continue;
            }
            obs.alg_progress_sample = *flag;
        }
        out.records.push_back(std::move(obs));
    }
    errors.throw_if_any();
    return out;
}

Parsed<SpendRecord> parse_compute_spend_csv(std::string_view text) {
    constexpr std::string_view kind = "compute_spend.csv";
    const Table table = read_table(text, kind);
    const auto c_year = table.require("year", kind);
    const auto c_value = table.require("value", kind);
    const auto c_unit = table.require("unit", kind);

    Parsed<SpendRecord> out;
    std::vector<std::size_t> lines;
    RowErrors errors{std::string(kind)};
    for (const auto& row : table.rows) {
        SpendRecord rec{};
        bool ok = required_number(row, c_year, "year", errors, rec.year);
        ok = ok && required_positive(row, c_value, "value", errors, rec.value);
        if (!ok) continue;
        const auto& unit = cell(row, c_unit);
        if (unit == "flop") {
            rec.unit = SpendUnit::flop;
        } else if (unit == "usd") {
            rec.unit = SpendUnit::usd;
        } else {
            errors.add(row.line, fmt::format("unit must be 'flop' or 'usd' (got '{}')", unit));
            continue;
        }
        out.records.push_back(rec);
        lines.push_back(row.line);
    }
    check_unique_years(out.records, lines, errors);
    errors.throw_if_any();
    return out;
}

Parsed<FlopPerUsdRecord> parse_flop_per_usd_csv(std::string_view text) {
    constexpr std::string_view kind = "flop_per_usd.csv";
    const Table table = read_table(text, kind);
    const auto c_year = table.require("year", kind);
    const auto c_value = table.require("flop_per_usd", kind);

    Parsed<FlopPerUsdRecord> out;
    std::vector<std::size_t> lines;
    RowErrors errors{std::string(kind)};
    for (const auto& row : table.rows) {
        FlopPerUsdRecord rec{};
        bool ok = required_number(row, c_year, "year", errors, rec.year);
        ok = ok && required_positive(row, c_value, "flop_per_usd", errors, rec.flop_per_usd);
        if (!ok) continue;
        out.records.push_back(rec);
        lines.push_back(row.line);
    }
    check_unique_years(out.records, lines, errors);
    errors.throw_if_any();
    return out;
}

Parsed<ModelBenchmarkObservation> parse_family_benchmarks_csv(std::string_view text) {
    constexpr std::string_view kind = "family_benchmarks.csv";
    const Table table = read_table(text, kind);
    const auto c_family = table.require("family", kind);
    const auto c_model = table.require("model_id", kind);
    const auto c_bench = table.require("benchmark", kind);
    const auto c_params = table.require("params", kind);
    const auto c_tokens = table.require("tokens", kind);
    const auto c_flop = table.require("training_flop", kind);
    const auto c_minutes = table.require("horizon_minutes", kind);

    Parsed<ModelBenchmarkObservation> out;
    RowErrors errors{std::string(kind)};
    std::set<std::pair<std::string, std::string>> keys;
    for (const auto& row : table.rows) {
        ModelBenchmarkObservation obs;
        obs.family = cell(row, c_family);
        obs.model_id = cell(row, c_model);
        obs.benchmark = cell(row, c_bench);
        if (obs.family.empty() || obs.model_id.empty() || obs.benchmark.empty()) {
            errors.add(row.line, "family, model_id and benchmark must be non-empty");
            continue;
        }
        bool ok = required_positive(row, c_params, "params", errors, obs.params_count);
        ok = ok && required_positive(row, c_tokens, "tokens", errors, obs.tokens_count);
        ok = ok && required_positive(row, c_flop, "training_flop", errors, obs.training_flop);
        ok = ok && required_positive(row, c_minutes, "horizon_minutes", errors, obs.horizon_minutes);
        if (!ok) continue;
        if (!keys.emplace(obs.model_id, obs.benchmark).second) {
            errors.add(row.line, fmt::format("duplicate (model_id, benchmark) = ({}, {})", obs.model_id,
                                             obs.benchmark));
            continue;
        }
        const double six_nd = 6.0 * obs.params_count * obs.tokens_count;
        const double ratio = obs.training_flop / six_nd;
        if (ratio > 3.0 || ratio < 1.0 / 3.0) {
            out.warnings.push_back(fmt::format(
                "row {}: training_flop {} differs from 6*params*tokens = {} by more than 3x", row.line,
                num(obs.training_flop), num(six_nd)));
        }
        out.records.push_back(std::move(obs));
    }
    errors.throw_if_any();
    return out;
}

std::string iso_from_instant(Instant t) {
    using namespace std::chrono;
    const int y = static_cast<int>(std::floor(t.year));
    const double days = std::chrono::year{y}.is_leap() ? 366.0 : 365.0;
    const auto offset = static_cast<int>(std::lround((t.year - y) * days));
    const year_month_day ymd{sys_days{std::chrono::year{y} / January / 1} + std::chrono::days{offset}};
    return fmt::format("{:04}-{:02}-{:02}", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

std::string serialize_horizons_csv(const std::vector<HorizonObservation>& rows) {
    std::string out =
        "model_id,developer,release_date,p50_minutes,p80_minutes,training_flop,alg_progress_sample\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{},{},{}\n", csv_field(r.model_id), csv_field(r.developer),
                           iso_from_instant(r.release), opt_num(r.p50_minutes), opt_num(r.p80_minutes),
                           opt_num(r.training_flop), r.alg_progress_sample ? 1 : 0);
    }
    return out;
}

std::string serialize_compute_spend_csv(const std::vector<SpendRecord>& rows) {
    std::string out = "year,value,unit\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{}\n", num(r.year), num(r.value),
                           r.unit == SpendUnit::flop ? "flop" : "usd");
    }
    return out;
}

std::string serialize_flop_per_usd_csv(const std::vector<FlopPerUsdRecord>& rows) {
    std::string out = "year,flop_per_usd\n";
    for (const auto& r : rows) out += fmt::format("{},{}\n", num(r.year), num(r.flop_per_usd));
    return out;
}

std::string serialize_family_benchmarks_csv(const std::vector<ModelBenchmarkObservation>& rows) {
    std::string out = "family,model_id,benchmark,params,tokens,training_flop,horizon_minutes\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{},{},{}\n", csv_field(r.family), csv_field(r.model_id),
                           csv_field(r.benchmark), num(r.params_count), num(r.tokens_count),
                           num(r.training_flop), num(r.horizon_minutes));
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError(fmt::format("cannot open file '{}'", path.string()));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace horizon
