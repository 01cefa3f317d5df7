#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "datamech/dataset.hpp"
#include "datamech/gapped_histogram.hpp"

namespace datamech {

/// r x c table of joint category counts. Rows index the X variable, columns Y.
class ContingencyTable {
public:
    /// Throws DataError unless at least one row sum and one column sum are
    /// positive (grand total >= 1).
    ContingencyTable(std::size_t rows, std::size_t cols,
                     std::vector<std::uint64_t> counts);

    /// Cross-tabulates two aligned category vectors; entries < 0 in either
    /// vector mark a missing observation and drop the pair.
    static ContingencyTable from_assignments(std::span<const int> x, std::span<const int> y,
                                             int x_categories, int y_categories);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::uint64_t at(std::size_t i, std::size_t j) const { return counts_[i * cols_ + j]; }
    std::uint64_t total() const { return total_; }
    std::uint64_t row_sum(std::size_t i) const;
    std::uint64_t col_sum(std::size_t j) const;
    ContingencyTable transposed() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

enum class CeDirection {
    y_given_x, ///< target is Y (columns), conditioning on X (rows)
    x_given_y, ///< target is X (rows), conditioning on Y (columns)
};

/// Shannon entropy -sum p log2 p with 0 log 0 := 0. `dist` must be a
/// probability vector: entries >= 0, sum within 1e-9 of 1 (ArgumentError
/// otherwise). The base cancels in every downstream ratio.
double shannon_entropy(std::span<const double> dist);

/// Relative conditional entropy of the target variable given the source:
/// the per-source-category ratios H(target | source = i) / H(target), weighted
/// by source-category proportions. Empty source categories carry weight zero.
/// Always in [0, 1]; single local ratios may exceed 1. Throws DataError when
/// the target variable has a single category (H(target) == 0).
double directed_ce(const ContingencyTable& table, CeDirection direction);

/// Mutual conditional entropy: the average of the two directed values.
/// 0 = mutual determination, 1 = independence. When exactly one variable is
/// degenerate (single category) returns 1.0 and sets *degenerate_warning; a
/// constant feature carries no dependency information. Both degenerate throws
/// DataError.
double mutual_ce(const ContingencyTable& table, bool* degenerate_warning = nullptr);

/// Symmetric feature-by-feature MCE matrix with zero diagonal.
class MceMatrix {
public:
    MceMatrix(std::vector<std::string> feature_names, std::vector<double> entries);

    std::size_t size() const { return feature_names_.size(); }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    double at(std::size_t i, std::size_t j) const { return entries_[i * size() + j]; }

    /// Matrix restricted to `features` (subset, any order within the schema
    /// order is kept as given). Throws ArgumentError on unknown names.
    MceMatrix submatrix(std::span<const std::string> features) const;

    bool operator==(const MceMatrix&) const = default;

private:
    std::vector<std::string> feature_names_;
    std::vector<double> entries_; ///< row-major, size*size
};

struct MceBuildReport {
    std::vector<std::string> warnings;
};

/// Builds the MCE matrix of a dataset over the named features. Each feature is
/// categorized by its own possibly-gapped histogram (NaNs dropped before the
/// build); each pair's contingency table uses jointly observed records only.
/// Degenerate single-bin features yield MCE 1.0 against everything, with a
/// warning in `report`. Pair computations run in parallel up to the
/// DATAMECH_THREADS budget; the result is schedule-independent.
MceMatrix mce_matrix(const PitchDataset& dataset, std::span<const std::string> features,
                     const HistogramConfig& hist_config = {},
                     MceBuildReport* report = nullptr);

/// `{features:[...], entries:[[...]]}`
std::string to_json(const MceMatrix& matrix);
MceMatrix mce_from_json(const std::string& text);

/// CSV with feature names as header and row labels.
std::string to_csv(const MceMatrix& matrix);

} // namespace datamech
