#pragma once

#include <Eigen/Dense>

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace arcadia {

enum class ColumnKind { continuous, binary };

std::string_view to_string(ColumnKind kind) noexcept;

/// Temporal position of a column, derived from its name.
///
/// Delta(a, b) is a year-over-year change anchored to the later year b.
/// Static(y) is a level observed in year y. Atemporal columns (sector,
/// province dummies) precede every dated column.
class TemporalTag {
public:
    enum class Variant { delta, fixed, atemporal };

    static constexpr std::int64_t kBeforeAllYears = std::numeric_limits<std::int64_t>::min();

    TemporalTag() = default;

    /// Throws DataError unless from_year < to_year.
    static TemporalTag delta(int from_year, int to_year);
    static TemporalTag fixed(int year) noexcept;
    static TemporalTag atemporal() noexcept { return {}; }

    /// Parses "delta:2015:2016", "static:2016" or "atemporal".
    static TemporalTag parse(std::string_view text);

    Variant variant() const noexcept { return variant_; }
    int from_year() const noexcept { return from_; }
    int to_year() const noexcept { return to_; }
    std::int64_t effective_time() const noexcept;

    /// Inverse of parse().
    std::string to_string() const;

    bool operator==(const TemporalTag&) const = default;

private:
    TemporalTag(Variant v, int from, int to) noexcept : variant_(v), from_(from), to_(to) {}

    Variant variant_ = Variant::atemporal;
    int from_ = 0;
    int to_ = 0;
};

/// Tags a column from its name.
///
///   delta_<stem>_<Y1>_<Y2>   -> Delta(Y1, Y2)   (prefix is case-insensitive, Y1 < Y2)
///   <stem>_<Y1>_<Y2>         -> Static(Y2)      (year range without delta prefix)
///   exactly one year token    -> Static(year)
///   anything else             -> Atemporal
///
/// A year token is a maximal run of exactly four digits in [1900, 2099].
TemporalTag tag_column(std::string_view name);

struct ColumnMeta {
    std::string name;
    ColumnKind kind = ColumnKind::continuous;
    TemporalTag tag;
};

enum class MissingPolicy { drop_rows, strict };

struct IngestConfig {
    std::string treatment;
    std::string outcome;
    std::map<std::string, TemporalTag> tag_overrides;
    std::set<std::string> binary_columns;
    MissingPolicy missing = MissingPolicy::drop_rows;

    /// Reads {"treatment", "outcome", "tag_overrides": {name: tag}, "binary_columns": [...],
    /// "missing_policy": "drop" | "strict"}.
    static IngestConfig from_json_file(const std::filesystem::path& path);
};

/// Numeric panel with per-column metadata. Immutable once built.
class PanelDataset {
public:
    PanelDataset(std::vector<ColumnMeta> columns, Eigen::MatrixXd values, std::string treatment,
                 std::string outcome);

    std::size_t rows() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t cols() const noexcept { return columns_.size(); }

    const std::vector<ColumnMeta>& columns() const noexcept { return columns_; }
    const Eigen::MatrixXd& values() const noexcept { return values_; }
    const std::string& treatment() const noexcept { return treatment_; }
    const std::string& outcome() const noexcept { return outcome_; }

    bool has_column(std::string_view name) const;
    std::size_t index_of(std::string_view name) const;
    const ColumnMeta& meta(std::string_view name) const;
    Eigen::VectorXd column(std::string_view name) const;
    std::vector<std::string> column_names() const;
    std::map<std::string, TemporalTag> tags() const;

    /// Gathers the named columns into an n x k matrix.
    Eigen::MatrixXd gather(std::span<const std::string> names) const;

    /// Restricts to the given columns, keeping their order. Must contain treatment and outcome.
    PanelDataset select(std::span<const std::string> names) const;

    std::size_t dropped_rows() const noexcept { return dropped_rows_; }
    void set_dropped_rows(std::size_t n) noexcept { dropped_rows_ = n; }

private:
    std::vector<ColumnMeta> columns_;
    Eigen::MatrixXd values_;
    std::string treatment_;
    std::string outcome_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t dropped_rows_ = 0;
};

/// Binary iff every value is 0 or 1 and both occur.
ColumnKind detect_kind(const Eigen::Ref<const Eigen::VectorXd>& values);

/// Builds a dataset from in-memory columns, assigning kinds and tags the same
/// way load_csv does.
PanelDataset make_dataset(std::span<const std::string> names, Eigen::MatrixXd values,
                          const IngestConfig& config);

PanelDataset load_csv(const std::filesystem::path& path, const IngestConfig& config);
PanelDataset parse_csv(std::string_view text, const IngestConfig& config);

/// Writes a dataset back to CSV using round-trip precision.
void write_csv(const PanelDataset& ds, const std::filesystem::path& path);

// --- temporally balanced sampling -------------------------------------------

inline constexpr std::size_t kBucketCount = 5;

/// The five buckets in allocation order; the last one absorbs remainders.
std::array<TemporalTag, kBucketCount> default_buckets();

/// Quota per bucket before supply is considered: floor((M-2)/5) each and the
/// remainder added to the last bucket.
std::array<std::size_t, kBucketCount> bucket_quotas(std::size_t m);

/// Quotas adjusted for supply: a short bucket gives all it has and its
/// deficit moves to the last bucket, then to the others in order.
std::array<std::size_t, kBucketCount>
allocate_buckets(std::size_t m, const std::array<std::size_t, kBucketCount>& supply);

struct BalancedSample {
    std::vector<std::string> columns; ///< treatment, outcome, then bucket draws
    std::array<std::size_t, kBucketCount> bucket_counts{};
};

BalancedSample sample_balanced_subset(const PanelDataset& ds, std::size_t m, std::uint64_t seed);

} // namespace arcadia
