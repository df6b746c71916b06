#include "arcadia/data_ingest.hpp"

#include "arcadia/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace arcadia {

std::string_view to_string(ColumnKind kind) noexcept {
    return kind == ColumnKind::binary ? "binary" : "continuous";
}

// --- TemporalTag --------------------------------------------------------------

TemporalTag TemporalTag::delta(int from_year, int to_year) {
    if (from_year >= to_year) {
        throw DataError(fmt::format("delta tag requires from < to, got {} >= {}", from_year, to_year));
    }
    return {Variant::delta, from_year, to_year};
}

TemporalTag TemporalTag::fixed(int year) noexcept { return {Variant::fixed, year, year}; }

std::int64_t TemporalTag::effective_time() const noexcept {
    switch (variant_) {
    case Variant::delta:
        return to_;
    case Variant::fixed:
        return from_;
    case Variant::atemporal:
        break;
    }
    return kBeforeAllYears;
}

std::string TemporalTag::to_string() const {
    switch (variant_) {
    case Variant::delta:
        return fmt::format("delta:{}:{}", from_, to_);
    case Variant::fixed:
        return fmt::format("static:{}", from_);
    case Variant::atemporal:
        break;
    }
    return "atemporal";
}

namespace {

std::optional<int> parse_int(std::string_view s) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

} // namespace

TemporalTag TemporalTag::parse(std::string_view text) {
    auto parts = split(text, ':');
    auto bad = [&] { return DataError(fmt::format("invalid temporal tag '{}'", text)); };
    if (parts[0] == "atemporal" && parts.size() == 1) return atemporal();
    if (parts[0] == "static" && parts.size() == 2) {
        auto y = parse_int(parts[1]);
        if (!y) throw bad();
        return fixed(*y);
    }
    if (parts[0] == "delta" && parts.size() == 3) {
        auto a = parse_int(parts[1]);
        auto b = parse_int(parts[2]);
        if (!a || !b) throw bad();
        return delta(*a, *b);
    }
    throw bad();
}

// --- tag_column ---------------------------------------------------------------

namespace {

struct YearToken {
    std::size_t begin;
    std::size_t end;
    int year;
};

std::vector<YearToken> year_tokens(std::string_view name) {
    std::vector<YearToken> tokens;
    std::size_t i = 0;
    while (i < name.size()) {
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < name.size() && std::isdigit(static_cast<unsigned char>(name[j]))) ++j;
        if (j - i == 4) {
            int y = *parse_int(name.substr(i, 4));
            if (y >= 1900 && y <= 2099) tokens.push_back({i, j, y});
        }
        i = j;
    }
    return tokens;
}

bool starts_with_delta(std::string_view name) {
    constexpr std::string_view prefix = "delta_";
    if (name.size() < prefix.size()) return false;
    for (std::size_t k = 0; k < prefix.size(); ++k) {
        if (std::tolower(static_cast<unsigned char>(name[k])) != prefix[k]) return false;
    }
    return true;
}

} // namespace

TemporalTag tag_column(std::string_view name) {
    auto tokens = year_tokens(name);

    // Trailing "<Y1>_<Y2>" range.
    if (tokens.size() >= 2) {
        const auto& a = tokens[tokens.size() - 2];
        const auto& b = tokens.back();
        bool trailing = b.end == name.size() && b.begin == a.end + 1 && name[a.end] == '_';
        if (trailing && tokens.size() == 2) {
            if (starts_with_delta(name)) {
                if (a.year < b.year) return TemporalTag::delta(a.year, b.year);
                return TemporalTag::atemporal();
            }
            return TemporalTag::fixed(b.year);
        }
        return TemporalTag::atemporal();
    }
    if (tokens.size() == 1) return TemporalTag::fixed(tokens.front().year);
    return TemporalTag::atemporal();
}

// --- IngestConfig -------------------------------------------------------------

IngestConfig IngestConfig::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open config '{}'", path.string()));
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(fmt::format("config '{}': {}", path.string(), e.what()));
    }
    IngestConfig cfg;
    try {
        cfg.treatment = j.value("treatment", std::string{});
        cfg.outcome = j.value("outcome", std::string{});
        if (j.contains("tag_overrides")) {
            for (auto& [name, tag] : j.at("tag_overrides").items()) {
                cfg.tag_overrides[name] = TemporalTag::parse(tag.get<std::string>());
            }
        }
        if (j.contains("binary_columns")) {
            for (auto& name : j.at("binary_columns")) cfg.binary_columns.insert(name.get<std::string>());
        }
        auto policy = j.value("missing_policy", std::string{"drop"});
        if (policy == "drop") {
            cfg.missing = MissingPolicy::drop_rows;
        } else if (policy == "strict") {
            cfg.missing = MissingPolicy::strict;
        } else {
            throw DataError(fmt::format("unknown missing_policy '{}'", policy));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(fmt::format("config '{}': {}", path.string(), e.what()));
    }
    return cfg;
}

// --- PanelDataset -------------------------------------------------------------

PanelDataset::PanelDataset(std::vector<ColumnMeta> columns, Eigen::MatrixXd values,
                           std::string treatment, std::string outcome)
    : columns_(std::move(columns)), values_(std::move(values)), treatment_(std::move(treatment)),
      outcome_(std::move(outcome)) {
    if (static_cast<std::size_t>(values_.cols()) != columns_.size()) {
        throw DataError("column metadata does not match value matrix width");
    }
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (!index_.emplace(columns_[i].name, i).second) {
            throw DataError(fmt::format("duplicate column name '{}'", columns_[i].name));
        }
    }
    if (!has_column(treatment_)) throw DataError(fmt::format("treatment column '{}' not found", treatment_));
    if (!has_column(outcome_)) throw DataError(fmt::format("outcome column '{}' not found", outcome_));
    if (treatment_ == outcome_) throw DataError("treatment and outcome must differ");
}

bool PanelDataset::has_column(std::string_view name) const {
    return index_.find(std::string(name)) != index_.end();
}

std::size_t PanelDataset::index_of(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw DataError(fmt::format("unknown column '{}'", name));
    return it->second;
}

const ColumnMeta& PanelDataset::meta(std::string_view name) const { return columns_[index_of(name)]; }

Eigen::VectorXd PanelDataset::column(std::string_view name) const {
    return values_.col(static_cast<Eigen::Index>(index_of(name)));
}

std::vector<std::string> PanelDataset::column_names() const {
    std::vector<std::string> names;
    names.reserve(columns_.size());
    for (const auto& c : columns_) names.push_back(c.name);
    return names;
}

std::map<std::string, TemporalTag> PanelDataset::tags() const {
    std::map<std::string, TemporalTag> out;
    for (const auto& c : columns_) out.emplace(c.name, c.tag);
    return out;
}

Eigen::MatrixXd PanelDataset::gather(std::span<const std::string> names) const {
    Eigen::MatrixXd m(values_.rows(), static_cast<Eigen::Index>(names.size()));
    for (std::size_t k = 0; k < names.size(); ++k) {
        m.col(static_cast<Eigen::Index>(k)) = values_.col(static_cast<Eigen::Index>(index_of(names[k])));
    }
    return m;
}

PanelDataset PanelDataset::select(std::span<const std::string> names) const {
    std::vector<ColumnMeta> cols;
    cols.reserve(names.size());
    for (const auto& n : names) cols.push_back(meta(n));
    PanelDataset out(std::move(cols), gather(names), treatment_, outcome_);
    out.dropped_rows_ = dropped_rows_;
    return out;
}

ColumnKind detect_kind(const Eigen::Ref<const Eigen::VectorXd>& values) {
    bool zero = false;
    bool one = false;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        double v = values[i];
        if (v == 0.0) {
            zero = true;
        } else if (v == 1.0) {
            one = true;
        } else {
            return ColumnKind::continuous;
        }
    }
    return zero && one ? ColumnKind::binary : ColumnKind::continuous;
}

PanelDataset make_dataset(std::span<const std::string> names, Eigen::MatrixXd values,
                          const IngestConfig& config) {
    if (config.treatment.empty() || config.outcome.empty()) {
        throw DataError("treatment and outcome names must be configured");
    }
    if (values.rows() == 0) throw DataError("empty dataset: no complete rows");
    std::vector<ColumnMeta> cols;
    cols.reserve(names.size());
    for (std::size_t k = 0; k < names.size(); ++k) {
        ColumnMeta m;
        m.name = names[k];
        auto col = values.col(static_cast<Eigen::Index>(k));
        if (config.binary_columns.count(m.name)) {
            for (Eigen::Index i = 0; i < col.size(); ++i) {
                if (col[i] != 0.0 && col[i] != 1.0) {
                    throw DataError(fmt::format("column '{}' configured binary but row {} holds {}", m.name,
                                                i + 1, col[i]));
                }
            }
            m.kind = ColumnKind::binary;
        } else {
            m.kind = detect_kind(col);
        }
        if (auto it = config.tag_overrides.find(m.name); it != config.tag_overrides.end()) {
            m.tag = it->second;
        } else {
            m.tag = tag_column(m.name);
            // An outcome observed over an event window is placed at the window's start.
            if (m.name == config.outcome && m.tag.variant() == TemporalTag::Variant::fixed) {
                auto tokens = year_tokens(m.name);
                if (tokens.size() == 2) m.tag = TemporalTag::fixed(tokens.front().year);
            }
        }
        cols.push_back(std::move(m));
    }
    for (const auto* required : {&config.treatment, &config.outcome}) {
        if (std::find(names.begin(), names.end(), *required) == names.end()) {
            throw DataError(fmt::format("configured column '{}' is missing from the data", *required));
        }
    }
    return PanelDataset(std::move(cols), std::move(values), config.treatment, config.outcome);
}

// --- CSV ----------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) throw DataError(fmt::format("line {}: unterminated quoted field", line_no));
    fields.push_back(std::move(cur));
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_missing(std::string_view cell) {
    return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "null";
}

} // namespace

PanelDataset parse_csv(std::string_view text, const IngestConfig& config) {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::size_t dropped = 0;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;

    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (trim(line).empty()) continue;

        auto fields = split_csv_line(line, line_no);
        if (header.empty()) {
            for (auto& f : fields) header.emplace_back(trim(f));
            continue;
        }
        if (fields.size() != header.size()) {
            throw DataError(fmt::format("line {}: expected {} fields, found {}", line_no, header.size(),
                                        fields.size()));
        }
        std::vector<double> row(fields.size());
        bool incomplete = false;
        for (std::size_t k = 0; k < fields.size(); ++k) {
            auto cell = trim(fields[k]);
            if (is_missing(cell)) {
                if (config.missing == MissingPolicy::strict) {
                    throw DataError(fmt::format("line {}, column '{}': missing value", line_no, header[k]));
                }
                incomplete = true;
                continue;
            }
            if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
                throw DataError(fmt::format("line {}, column '{}': non-numeric cell '{}'", line_no, header[k],
                                            cell));
            }
            row[k] = v;
        }
        if (incomplete) {
            ++dropped;
        } else {
            rows.push_back(std::move(row));
        }
    }
    if (header.empty()) throw DataError("empty dataset: no header row");

    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(header.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = 0; k < header.size(); ++k) {
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
        }
    }
    auto ds = make_dataset(header, std::move(values), config);
    ds.set_dropped_rows(dropped);
    return ds;
}

PanelDataset load_csv(const std::filesystem::path& path, const IngestConfig& config) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(fmt::format("cannot open data file '{}'", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), config);
}

void write_csv(const PanelDataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
    const auto& cols = ds.columns();
    for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k].name;
    out << '\n';
    const auto& v = ds.values();
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        for (Eigen::Index k = 0; k < v.cols(); ++k) out << (k ? "," : "") << fmt::format("{}", v(i, k));
        out << '\n';
    }
    if (!out) throw DataError(fmt::format("write failed for '{}'", path.string()));
}

// --- balanced sampling --------------------------------------------------------

std::array<TemporalTag, kBucketCount> default_buckets() {
    return {TemporalTag::delta(2015, 2016), TemporalTag::delta(2016, 2017), TemporalTag::fixed(2015),
            TemporalTag::fixed(2016), TemporalTag::fixed(2017)};
}

std::array<std::size_t, kBucketCount> bucket_quotas(std::size_t m) {
    if (m < 2) throw DataError("subset size must be at least 2");
    std::size_t rest = m - 2;
    std::array<std::size_t, kBucketCount> q{};
    q.fill(rest / kBucketCount);
    q.back() += rest % kBucketCount;
    return q;
}

std::array<std::size_t, kBucketCount>
allocate_buckets(std::size_t m, const std::array<std::size_t, kBucketCount>& supply) {
    auto quota = bucket_quotas(m);
    std::size_t total = std::accumulate(supply.begin(), supply.end(), std::size_t{0});
    if (total < m - 2) {
        throw DataError(fmt::format("need {} eligible columns besides treatment and outcome, found {}", m - 2, total));
    }
    std::array<std::size_t, kBucketCount> take{};
    std::size_t deficit = 0;
    for (std::size_t b = 0; b < kBucketCount; ++b) {
        take[b] = std::min(quota[b], supply[b]);
        deficit += quota[b] - take[b];
    }
    // Deficit goes to the last bucket first, then the others in order.
    std::array<std::size_t, kBucketCount> order{kBucketCount - 1, 0, 1, 2, 3};
    for (auto b : order) {
        std::size_t extra = std::min(deficit, supply[b] - take[b]);
        take[b] += extra;
        deficit -= extra;
    }
    return take;
}

BalancedSample sample_balanced_subset(const PanelDataset& ds, std::size_t m, std::uint64_t seed) {
    if (m < 2) throw DataError("subset size must be at least 2");
    const auto buckets = default_buckets();
    std::array<std::vector<std::string>, kBucketCount> members;
    for (const auto& c : ds.columns()) {
        if (c.name == ds.treatment() || c.name == ds.outcome()) continue;
        for (std::size_t b = 0; b < kBucketCount; ++b) {
            if (c.tag == buckets[b]) {
                members[b].push_back(c.name);
                break;
            }
        }
    }
    std::array<std::size_t, kBucketCount> supply{};
    for (std::size_t b = 0; b < kBucketCount; ++b) {
        std::sort(members[b].begin(), members[b].end());
        supply[b] = members[b].size();
    }
    auto take = allocate_buckets(m, supply);

    BalancedSample out;
    out.columns = {ds.treatment(), ds.outcome()};
    std::mt19937_64 rng(seed);
    for (std::size_t b = 0; b < kBucketCount; ++b) {
        std::shuffle(members[b].begin(), members[b].end(), rng);
        out.columns.insert(out.columns.end(), members[b].begin(),
                           members[b].begin() + static_cast<std::ptrdiff_t>(take[b]));
        out.bucket_counts[b] = take[b];
    }
    return out;
}

} // namespace arcadia
