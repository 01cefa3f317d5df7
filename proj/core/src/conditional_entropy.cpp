#include "datamech/conditional_entropy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "datamech/error.hpp"
#include "datamech/parallel.hpp"

#include "text_util.hpp"

namespace datamech {

ContingencyTable::ContingencyTable(std::size_t rows, std::size_t cols,
                                   std::vector<std::uint64_t> counts)
    : rows_(rows), cols_(cols), counts_(std::move(counts)) {
    if (rows_ == 0 || cols_ == 0 || counts_.size() != rows_ * cols_)
        throw ArgumentError("contingency table: shape/count mismatch");
    for (auto c : counts_) total_ += c;
    if (total_ == 0) throw DataError("contingency table: empty (grand total 0)");
}

ContingencyTable ContingencyTable::from_assignments(std::span<const int> x, std::span<const int> y,
                                                    int x_categories, int y_categories) {
    if (x.size() != y.size())
        throw ArgumentError("contingency table: assignment vectors differ in length");
    if (x_categories < 1 || y_categories < 1)
        throw ArgumentError("contingency table: category counts must be positive");
    auto r = static_cast<std::size_t>(x_categories);
    auto c = static_cast<std::size_t>(y_categories);
    std::vector<std::uint64_t> counts(r * c, 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < 0 || y[i] < 0) continue; // jointly unobserved
        if (x[i] >= x_categories || y[i] >= y_categories)
            throw ArgumentError("contingency table: assignment out of range");
        ++counts[static_cast<std::size_t>(x[i]) * c + static_cast<std::size_t>(y[i])];
    }
    return ContingencyTable(r, c, std::move(counts));
}

std::uint64_t ContingencyTable::row_sum(std::size_t i) const {
    std::uint64_t s = 0;
    for (std::size_t j = 0; j < cols_; ++j) s += at(i, j);
    return s;
}

std::uint64_t ContingencyTable::col_sum(std::size_t j) const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < rows_; ++i) s += at(i, j);
    return s;
}

ContingencyTable ContingencyTable::transposed() const {
    std::vector<std::uint64_t> t(rows_ * cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t[j * rows_ + i] = at(i, j);
    return ContingencyTable(cols_, rows_, std::move(t));
}

double shannon_entropy(std::span<const double> dist) {
    double sum = 0.0;
    double h = 0.0;
    for (double p : dist) {
        if (p < 0.0) throw ArgumentError("shannon_entropy: negative mass");
        sum += p;
        if (p > 0.0) h -= p * std::log2(p);
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ArgumentError("shannon_entropy: distribution sums to " +
                            detail::format_double(sum));
    return h < 0.0 ? 0.0 : h;
}

namespace {

// Entropy of integer counts via their probability vector. Conditional and
// marginal distributions of a product table round to identical doubles, so
// the endpoint values 0 and 1 come out exact downstream.
double count_entropy(std::span<const std::uint64_t> counts, std::uint64_t total) {
    double h = 0.0;
    auto tot = static_cast<double>(total);
    for (auto c : counts) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / tot;
        h -= p * std::log2(p);
    }
    return h < 0.0 ? 0.0 : h;
}

double directed_ce_rows_condition(const ContingencyTable& t) {
    // target = columns, conditioning on rows
    std::vector<std::uint64_t> col_marginal(t.cols());
    for (std::size_t j = 0; j < t.cols(); ++j) col_marginal[j] = t.col_sum(j);
    double h_target = count_entropy(col_marginal, t.total());
    if (h_target <= 0.0)
        throw DataError("directed_ce: target variable is degenerate (single category)");

    // Accumulate count-weighted local ratios and divide by N once, so exact
    // endpoint tables come out exactly 0 or 1.
    double weighted = 0.0;
    std::vector<std::uint64_t> row(t.cols());
    for (std::size_t i = 0; i < t.rows(); ++i) {
        std::uint64_t n_i = 0;
        for (std::size_t j = 0; j < t.cols(); ++j) {
            row[j] = t.at(i, j);
            n_i += row[j];
        }
        if (n_i == 0) continue; // empty source category, weight zero
        double local = count_entropy(row, n_i) / h_target;
        weighted += static_cast<double>(n_i) * local;
    }
    double value = weighted / static_cast<double>(t.total());
    return std::clamp(value, 0.0, 1.0);
}

} // namespace

double directed_ce(const ContingencyTable& table, CeDirection direction) {
    return direction == CeDirection::y_given_x ? directed_ce_rows_condition(table)
                                               : directed_ce_rows_condition(table.transposed());
}

double mutual_ce(const ContingencyTable& table, bool* degenerate_warning) {
    const std::size_t r = table.rows(), c = table.cols();
    const auto total = static_cast<double>(table.total());
    std::vector<std::uint64_t> rows(r, 0), cols(c, 0);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            rows[i] += table.at(i, j);
            cols[j] += table.at(i, j);
        }
    double h_x = count_entropy(rows, table.total());
    double h_y = count_entropy(cols, table.total());
    if (h_x <= 0.0 && h_y <= 0.0) throw DataError("mutual_ce: both variables are degenerate");
    if (h_x <= 0.0 || h_y <= 0.0) {
        if (degenerate_warning) *degenerate_warning = true;
        return 1.0; // a constant feature carries no dependency information
    }

    // Both directed terms in one pass, same arithmetic as directed_ce.
    double weighted_ygx = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i] == 0) continue;
        double h = 0.0;
        auto n_i = static_cast<double>(rows[i]);
        for (std::size_t j = 0; j < c; ++j) {
            auto cell = table.at(i, j);
            if (cell == 0) continue;
            double p = static_cast<double>(cell) / n_i;
            h -= p * std::log2(p);
        }
        weighted_ygx += n_i * ((h < 0.0 ? 0.0 : h) / h_y);
    }
    double weighted_xgy = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
        if (cols[j] == 0) continue;
        double h = 0.0;
        auto n_j = static_cast<double>(cols[j]);
        for (std::size_t i = 0; i < r; ++i) {
            auto cell = table.at(i, j);
            if (cell == 0) continue;
            double p = static_cast<double>(cell) / n_j;
            h -= p * std::log2(p);
        }
        weighted_xgy += n_j * ((h < 0.0 ? 0.0 : h) / h_x);
    }
    double ygx = std::clamp(weighted_ygx / total, 0.0, 1.0);
    double xgy = std::clamp(weighted_xgy / total, 0.0, 1.0);
    return 0.5 * (ygx + xgy);
}

MceMatrix::MceMatrix(std::vector<std::string> feature_names, std::vector<double> entries)
    : feature_names_(std::move(feature_names)), entries_(std::move(entries)) {
    std::size_t f = feature_names_.size();
    if (entries_.size() != f * f) throw ArgumentError("MceMatrix: entry count mismatch");
    for (std::size_t i = 0; i < f; ++i) {
        if (entries_[i * f + i] != 0.0) throw ArgumentError("MceMatrix: nonzero diagonal");
        for (std::size_t j = 0; j < i; ++j) {
            double a = entries_[i * f + j];
            double b = entries_[j * f + i];
            if (a != b) throw ArgumentError("MceMatrix: asymmetric entries");
            if (a < 0.0 || a > 1.0) throw ArgumentError("MceMatrix: entry outside [0,1]");
        }
    }
}

MceMatrix MceMatrix::submatrix(std::span<const std::string> features) const {
    std::vector<std::size_t> idx;
    idx.reserve(features.size());
    for (const auto& name : features) {
        auto it = std::find(feature_names_.begin(), feature_names_.end(), name);
        if (it == feature_names_.end())
            throw ArgumentError("MceMatrix: unknown feature '" + name + "'");
        idx.push_back(static_cast<std::size_t>(it - feature_names_.begin()));
    }
    std::size_t f = idx.size();
    std::vector<double> entries(f * f, 0.0);
    for (std::size_t i = 0; i < f; ++i)
        for (std::size_t j = 0; j < f; ++j) entries[i * f + j] = at(idx[i], idx[j]);
    return MceMatrix(std::vector<std::string>(features.begin(), features.end()),
                     std::move(entries));
}

MceMatrix mce_matrix(const PitchDataset& dataset, std::span<const std::string> features,
                     const HistogramConfig& hist_config, MceBuildReport* report) {
    if (features.size() < 2) throw ArgumentError("mce_matrix: need at least 2 features");
    if (dataset.size() < 2) throw DataError("mce_matrix: need at least 2 records");

    const std::size_t f = features.size();
    std::vector<std::vector<int>> assignment(f);
    std::vector<int> category_count(f, 0);
    std::vector<std::string> feature_warnings(f);

    parallel_for(f, [&](std::size_t i) {
        std::vector<double> column = dataset.feature_column(features[i]);
        std::vector<double> observed;
        std::vector<std::size_t> where;
        observed.reserve(column.size());
        for (std::size_t k = 0; k < column.size(); ++k) {
            if (std::isfinite(column[k])) {
                observed.push_back(column[k]);
                where.push_back(k);
            }
        }
        if (observed.empty())
            throw DataError("mce_matrix: feature '" + features[i] + "' has no finite values");
        GappedHistogram hist = build_histogram(observed, hist_config);
        category_count[i] = static_cast<int>(hist.bin_count());
        if (hist.bin_count() < 2)
            feature_warnings[i] = "feature '" + features[i] +
                                  "' is degenerate (single bin); its MCE entries are 1.0";
        assignment[i].assign(column.size(), -1);
        auto cats = categorize(hist, observed);
        for (std::size_t k = 0; k < where.size(); ++k) assignment[i][where[k]] = cats[k];
    });
    std::vector<std::string> warnings;
    for (auto& w : feature_warnings)
        if (!w.empty()) warnings.push_back(std::move(w));

    struct Pair {
        std::size_t i, j;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < f; ++i)
        for (std::size_t j = i + 1; j < f; ++j) pairs.push_back({i, j});

    std::vector<double> entries(f * f, 0.0);
    std::vector<std::string> pair_warnings(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t p) {
        auto [i, j] = pairs[p];
        try {
            auto table = ContingencyTable::from_assignments(assignment[i], assignment[j],
                                                            category_count[i], category_count[j]);
            bool degenerate = false;
            double value = mutual_ce(table, &degenerate);
            entries[i * f + j] = value;
            entries[j * f + i] = value;
            if (degenerate)
                pair_warnings[p] = "pair (" + features[i] + ", " + features[j] +
                                   ") involves a degenerate feature; entry set to 1.0";
        } catch (const Error& e) {
            throw DataError("mce_matrix: pair (" + features[i] + ", " + features[j] +
                            "): " + e.what());
        }
    });
    for (auto& w : pair_warnings)
        if (!w.empty()) warnings.push_back(std::move(w));
    if (report) report->warnings = std::move(warnings);

    return MceMatrix(std::vector<std::string>(features.begin(), features.end()),
                     std::move(entries));
}

std::string to_json(const MceMatrix& matrix) {
    nlohmann::ordered_json j;
    j["features"] = matrix.feature_names();
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        auto row = nlohmann::ordered_json::array();
        for (std::size_t k = 0; k < matrix.size(); ++k) row.push_back(matrix.at(i, k));
        rows.push_back(std::move(row));
    }
    j["entries"] = std::move(rows);
    return j.dump(2) + "\n";
}

MceMatrix mce_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        std::vector<std::string> names = j.at("features").get<std::vector<std::string>>();
        std::vector<double> entries;
        entries.reserve(names.size() * names.size());
        for (const auto& row : j.at("entries"))
            for (const auto& v : row) entries.push_back(v.get<double>());
        return MceMatrix(std::move(names), std::move(entries));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad MCE JSON: ") + e.what());
    }
}

std::string to_csv(const MceMatrix& matrix) {
    std::string out = "feature";
    for (const auto& name : matrix.feature_names()) out += "," + name;
    out += "\n";
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        out += matrix.feature_names()[i];
        for (std::size_t j = 0; j < matrix.size(); ++j)
            out += "," + detail::format_double(matrix.at(i, j));
        out += "\n";
    }
    return out;
}

} // namespace datamech
