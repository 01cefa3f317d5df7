#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace datamech {

struct HistogramConfig {
    /// Upper bound on the number of bins; the optimizer may use fewer.
    int max_bins = 10;
    /// Per-bin penalty added to the squared-deviation objective. Defaults to
    /// 2 * log(n) * sigma2 with sigma2 = 1/(4n), the worst-case sampling
    /// variance of an empirical CDF value, i.e. log(n)/(2n).
    std::optional<double> penalty;
    /// An adjacent spacing larger than gap_factor times the median spacing of a
    /// candidate bin forbids that bin, forcing a boundary there. Must be > 1.
    double gap_factor = 4.0;
};

struct HistogramBin {
    double lo = 0.0; ///< smallest training value in the bin
    double hi = 0.0; ///< largest training value in the bin
    std::size_t count = 0;
};

/// Open interval strictly between two consecutive bins that contains no
/// training value.
struct GapInterval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Ordered, possibly non-contiguous binning of one real feature. Each bin is
/// one ordinal category; bins are disjoint, sorted, and cover every training
/// value exactly once.
class GappedHistogram {
public:
    GappedHistogram(std::vector<HistogramBin> bins, std::vector<GapInterval> gaps,
                    double fit_error);

    const std::vector<HistogramBin>& bins() const { return bins_; }
    const std::vector<GapInterval>& gaps() const { return gaps_; }
    std::size_t total_count() const { return total_count_; }
    /// Unpenalized objective of the chosen segmentation: total squared deviation
    /// between the empirical CDF and its per-bin least-squares linear fits.
    double fit_error() const { return fit_error_; }
    std::size_t bin_count() const { return bins_.size(); }

private:
    std::vector<HistogramBin> bins_;
    std::vector<GapInterval> gaps_;
    std::size_t total_count_ = 0;
    double fit_error_ = 0.0;
};

/// Builds the possibly-gapped histogram minimizing
///
///     sum over bins of SSE(linear fit to ECDF points in bin) + penalty * #bins
///
/// over all segmentations of the order statistics into at most max_bins
/// contiguous runs, subject to the gap rule above. Boundaries fall only between
/// distinct values, so ties never straddle bins. Exact dynamic program,
/// O(n^2 max_bins); deterministic, permutation-invariant.
///
/// Throws ArgumentError on empty input or non-finite values.
GappedHistogram build_histogram(std::span<const double> values,
                                const HistogramConfig& config = {});

/// Bin index per value, aligned to input order. In-bin values (lo <= x <= hi)
/// map to their bin; values in gaps or outside the range map to the nearest bin
/// by boundary distance, ties to the lower bin. Throws ArgumentError on
/// non-finite input.
std::vector<int> categorize(const GappedHistogram& hist, std::span<const double> values);

/// Maximum absolute deviation between the empirical CDF of `values` and the
/// piecewise-linear CDF induced by the bins, evaluated at the data points.
/// Lower is better; 0 for degenerate single-value data.
double fit_quality(const GappedHistogram& hist, std::span<const double> values);

/// `{bins:[{lo,hi,count}], gaps:[{lo,hi}], fit_error}`
std::string to_json(const GappedHistogram& hist);
GappedHistogram histogram_from_json(const std::string& text);

} // namespace datamech
