#include "datamech/gapped_histogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "datamech/error.hpp"

namespace datamech {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Fenwick tree over spacing ranks; supports insert, k-th smallest, and
// count-below-rank queries.
class RankCounter {
public:
    explicit RankCounter(std::size_t ranks) : tree_(ranks + 1, 0) {}

    void clear() { std::fill(tree_.begin(), tree_.end(), 0); }

    void insert(std::size_t rank) {
        for (std::size_t i = rank + 1; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
    }

    // 1-based k; returns the rank holding the k-th smallest element.
    std::size_t kth(std::size_t k) const {
        std::size_t pos = 0;
        std::size_t mask = top_bit(tree_.size() - 1);
        while (mask != 0) {
            std::size_t next = pos + mask;
            if (next < tree_.size() && tree_[next] < k) {
                pos = next;
                k -= tree_[next];
            }
            mask >>= 1;
        }
        return pos; // 0-based rank
    }

    // number of inserted elements with rank <= r (r 0-based)
    std::size_t count_le(std::size_t r) const {
        std::size_t sum = 0;
        for (std::size_t i = r + 1; i > 0; i -= i & (~i + 1)) sum += tree_[i];
        return sum;
    }

private:
    static std::size_t top_bit(std::size_t n) {
        std::size_t b = 1;
        while ((b << 1) <= n) b <<= 1;
        return b;
    }
    std::vector<std::uint32_t> tree_;
};

// Squared deviation between the empirical CDF and the piecewise-linear CDF a
// candidate bin induces: the line anchored at (lo, mass entering the bin) and
// (hi, mass through the bin), evaluated at each distinct value and weighted by
// its multiplicity. A pure tie stack in its own bin costs exactly zero (the
// induced CDF is the matching step), so point masses separate cleanly.
struct SegmentCost {
    // prefix sums over distinct values t: count, c*u, c*u^2, c*g, c*g^2, c*u*g
    // with u the (globally centered) value and g the ECDF at it
    std::vector<double> sc, su, suu, sg, sgg, sug;
    std::vector<double> u;     // centered distinct values
    std::vector<double> g;     // ECDF at each distinct value
    std::vector<double> enter; // ECDF just below each distinct value

    SegmentCost(const std::vector<double>& centered, const std::vector<double>& ecdf,
                const std::vector<double>& counts) {
        std::size_t m = centered.size();
        u = centered;
        g = ecdf;
        enter.assign(m, 0.0);
        sc.assign(m + 1, 0.0);
        su.assign(m + 1, 0.0);
        suu.assign(m + 1, 0.0);
        sg.assign(m + 1, 0.0);
        sgg.assign(m + 1, 0.0);
        sug.assign(m + 1, 0.0);
        for (std::size_t t = 0; t < m; ++t) {
            enter[t] = t == 0 ? 0.0 : g[t - 1];
            double c = counts[t];
            sc[t + 1] = sc[t] + c;
            su[t + 1] = su[t] + c * u[t];
            suu[t + 1] = suu[t] + c * u[t] * u[t];
            sg[t + 1] = sg[t] + c * g[t];
            sgg[t + 1] = sgg[t] + c * g[t] * g[t];
            sug[t + 1] = sug[t] + c * u[t] * g[t];
        }
    }

    // cost of the bin covering distinct range [a, b]
    double operator()(std::size_t a, std::size_t b) const {
        if (a == b) return 0.0; // induced step matches the ECDF exactly
        double entering = enter[a];
        double width = u[b] - u[a];
        double slope = (g[b] - entering) / width;
        // sum of c * (g_t - entering - slope*(u_t - u_a))^2 via prefix sums
        double n = sc[b + 1] - sc[a];
        double Su = su[b + 1] - su[a];
        double Suu = suu[b + 1] - suu[a];
        double Sg = sg[b + 1] - sg[a];
        double Sgg = sgg[b + 1] - sgg[a];
        double Sug = sug[b + 1] - sug[a];
        double p = entering, ua = u[a];
        double term_gg = Sgg - 2.0 * p * Sg + p * p * n;
        double term_gu = Sug - ua * Sg - p * Su + p * ua * n;
        double term_uu = Suu - 2.0 * ua * Su + ua * ua * n;
        double cost = term_gg - 2.0 * slope * term_gu + slope * slope * term_uu;
        return cost > 0.0 ? cost : 0.0;
    }
};

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t h = v.size() / 2;
    return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

} // namespace

GappedHistogram::GappedHistogram(std::vector<HistogramBin> bins, std::vector<GapInterval> gaps,
                                 double fit_error)
    : bins_(std::move(bins)), gaps_(std::move(gaps)), fit_error_(fit_error) {
    for (const auto& b : bins_) total_count_ += b.count;
}

GappedHistogram build_histogram(std::span<const double> values, const HistogramConfig& config) {
    if (values.empty()) throw ArgumentError("build_histogram: empty input");
    if (config.max_bins < 1) throw ArgumentError("build_histogram: max_bins must be >= 1");
    if (!(config.gap_factor > 1.0)) throw ArgumentError("build_histogram: gap_factor must be > 1");
    for (double v : values)
        if (!std::isfinite(v)) throw ArgumentError("build_histogram: non-finite value");

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double penalty = config.penalty.value_or(
        std::log(static_cast<double>(n)) / (2.0 * static_cast<double>(n)));

    // Distinct values with 1-based rank of each group's last point. Boundaries
    // between bins are only allowed between distinct values, so ties never
    // straddle a bin edge.
    std::vector<double> distinct;
    std::vector<std::size_t> last_rank;
    for (std::size_t k = 0; k < n; ++k) {
        if (distinct.empty() || sorted[k] != distinct.back()) {
            distinct.push_back(sorted[k]);
            last_rank.push_back(k + 1);
        } else {
            last_rank.back() = k + 1;
        }
    }
    const std::size_t m = distinct.size();
    const std::size_t budget = std::min<std::size_t>(static_cast<std::size_t>(config.max_bins), m);

    double mean_x = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
    std::vector<double> centered(m), ecdf(m), multiplicity(m);
    for (std::size_t t = 0; t < m; ++t) {
        centered[t] = distinct[t] - mean_x;
        ecdf[t] = static_cast<double>(last_rank[t]) / static_cast<double>(n);
        multiplicity[t] =
            static_cast<double>(last_rank[t] - (t == 0 ? 0 : last_rank[t - 1]));
    }
    SegmentCost cost(centered, ecdf, multiplicity);
    auto rank_range = [&](std::size_t a, std::size_t b) {
        std::size_t p = a == 0 ? 1 : last_rank[a - 1] + 1;
        return std::pair<std::size_t, std::size_t>{p, last_rank[b]};
    };

    // A spacing larger than gap_factor times the candidate bin's median
    // spacing is a gap-rule violation. The DP minimizes (violations, SSE)
    // lexicographically, i.e. boundaries are forced wherever the bin budget
    // allows; when max_bins is too small to honor every forced boundary the
    // least-violating segmentation wins instead of failing.
    std::vector<double> spacing(m > 0 ? m - 1 : 0);
    for (std::size_t t = 0; t + 1 < m; ++t) spacing[t] = distinct[t + 1] - distinct[t];
    std::vector<double> spacing_sorted = spacing;
    std::sort(spacing_sorted.begin(), spacing_sorted.end());
    spacing_sorted.erase(std::unique(spacing_sorted.begin(), spacing_sorted.end()),
                         spacing_sorted.end());
    auto rank_of = [&](double d) {
        return static_cast<std::size_t>(
            std::lower_bound(spacing_sorted.begin(), spacing_sorted.end(), d) -
            spacing_sorted.begin());
    };

    struct Score {
        std::uint64_t violations;
        double sse;

        bool operator<(const Score& rhs) const {
            if (violations != rhs.violations) return violations < rhs.violations;
            return sse < rhs.sse;
        }
        Score operator+(const Score& rhs) const {
            return {violations + rhs.violations, sse + rhs.sse};
        }
    };
    const Score unreachable{std::numeric_limits<std::uint64_t>::max(), kInf};

    // dp[k][e]: best score covering distinct[0..e] with exactly k+1 bins.
    std::vector<std::vector<Score>> dp(budget, std::vector<Score>(m, unreachable));
    std::vector<std::int32_t> parent(budget * m, -1);
    RankCounter counter(std::max<std::size_t>(spacing_sorted.size(), 1));
    for (std::size_t s = 0; s < m; ++s) {
        counter.clear();
        double maxd = 0.0;
        for (std::size_t e = s; e < m; ++e) {
            std::uint64_t viol = 0;
            if (e > s) {
                double d = spacing[e - 1];
                counter.insert(rank_of(d));
                maxd = std::max(maxd, d);
                std::size_t count = e - s;
                double med;
                if (count % 2 == 1) {
                    med = spacing_sorted[counter.kth(count / 2 + 1)];
                } else {
                    med = 0.5 * (spacing_sorted[counter.kth(count / 2)] +
                                 spacing_sorted[counter.kth(count / 2 + 1)]);
                }
                double threshold = config.gap_factor * med;
                if (maxd > threshold) {
                    // violations = spacings above the threshold
                    std::size_t upper = static_cast<std::size_t>(
                        std::upper_bound(spacing_sorted.begin(), spacing_sorted.end(),
                                         threshold) -
                        spacing_sorted.begin());
                    viol = count - (upper == 0 ? 0 : counter.count_le(upper - 1));
                }
            }
            Score seg{viol, cost(s, e)};
            if (s == 0) {
                if (seg < dp[0][e]) {
                    dp[0][e] = seg;
                    parent[0 * m + e] = 0;
                }
            }
            if (s >= 1) {
                for (std::size_t k = 1; k < budget && k <= s; ++k) {
                    const Score& head = dp[k - 1][s - 1];
                    if (head.sse == kInf) continue;
                    Score total = head + seg;
                    if (total < dp[k][e]) {
                        dp[k][e] = total;
                        parent[k * m + e] = static_cast<std::int32_t>(s);
                    }
                }
            }
        }
    }

    std::size_t best_k = 0;
    Score best_obj = unreachable;
    for (std::size_t k = 0; k < budget; ++k) {
        if (dp[k][m - 1].sse == kInf) continue;
        Score obj{dp[k][m - 1].violations,
                  dp[k][m - 1].sse + penalty * static_cast<double>(k + 1)};
        if (obj < best_obj) {
            best_obj = obj;
            best_k = k;
        }
    }

    // Reconstruct bin boundaries in distinct-value space.
    std::vector<std::pair<std::size_t, std::size_t>> segments;
    {
        std::size_t e = m - 1;
        for (std::size_t k = best_k + 1; k-- > 0;) {
            auto s = static_cast<std::size_t>(parent[k * m + e]);
            segments.emplace_back(s, e);
            if (k > 0) e = s - 1;
        }
        std::reverse(segments.begin(), segments.end());
    }

    std::vector<HistogramBin> bins;
    bins.reserve(segments.size());
    for (auto [a, b] : segments) {
        auto [p, q] = rank_range(a, b);
        bins.push_back({distinct[a], distinct[b], q - p + 1});
    }

    std::vector<GapInterval> gaps;
    for (std::size_t s = 0; s + 1 < segments.size(); ++s) {
        auto [a0, b0] = segments[s];
        auto [a1, b1] = segments[s + 1];
        double boundary = spacing[b0];
        std::vector<double> merged(spacing.begin() + static_cast<std::ptrdiff_t>(a0),
                                   spacing.begin() + static_cast<std::ptrdiff_t>(b1));
        if (boundary > config.gap_factor * median_of(std::move(merged)))
            gaps.push_back({distinct[b0], distinct[a1]});
    }

    return GappedHistogram(std::move(bins), std::move(gaps), dp[best_k][m - 1].sse);
}

std::vector<int> categorize(const GappedHistogram& hist, std::span<const double> values) {
    const auto& bins = hist.bins();
    if (bins.empty()) throw ArgumentError("categorize: histogram has no bins");
    std::vector<int> out;
    out.reserve(values.size());
    for (double x : values) {
        if (!std::isfinite(x)) throw ArgumentError("categorize: non-finite value");
        // first bin whose hi >= x; candidates are it and its left neighbor
        std::size_t j = static_cast<std::size_t>(
            std::lower_bound(bins.begin(), bins.end(), x,
                             [](const HistogramBin& b, double v) { return b.hi < v; }) -
            bins.begin());
        if (j < bins.size() && x >= bins[j].lo) {
            out.push_back(static_cast<int>(j));
            continue;
        }
        double dist_right = j < bins.size() ? bins[j].lo - x
                                            : std::numeric_limits<double>::infinity();
        double dist_left = j > 0 ? x - bins[j - 1].hi : std::numeric_limits<double>::infinity();
        out.push_back(dist_left <= dist_right ? static_cast<int>(j - 1) : static_cast<int>(j));
    }
    return out;
}

double fit_quality(const GappedHistogram& hist, std::span<const double> values) {
    if (values.empty()) return 0.0;
    const auto& bins = hist.bins();
    if (bins.empty()) throw ArgumentError("fit_quality: histogram has no bins");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    const double total = static_cast<double>(hist.total_count());

    std::vector<double> mass_before(bins.size(), 0.0);
    double acc = 0.0;
    for (std::size_t j = 0; j < bins.size(); ++j) {
        mass_before[j] = acc;
        acc += static_cast<double>(bins[j].count) / total;
    }
    auto approx = [&](double x) {
        std::size_t j = static_cast<std::size_t>(
            std::lower_bound(bins.begin(), bins.end(), x,
                             [](const HistogramBin& b, double v) { return b.hi < v; }) -
            bins.begin());
        if (j == bins.size()) return 1.0;
        const auto& b = bins[j];
        double mass = static_cast<double>(b.count) / total;
        if (x < b.lo) return mass_before[j];
        if (b.hi == b.lo) return mass_before[j] + mass;
        return mass_before[j] + mass * (x - b.lo) / (b.hi - b.lo);
    };

    double worst = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        // upper ECDF: share of values <= sorted[k]
        if (k + 1 < sorted.size() && sorted[k + 1] == sorted[k]) continue;
        double emp = static_cast<double>(k + 1) / n;
        worst = std::max(worst, std::abs(emp - approx(sorted[k])));
    }
    return worst;
}

std::string to_json(const GappedHistogram& hist) {
    nlohmann::ordered_json j;
    j["bins"] = nlohmann::ordered_json::array();
    for (const auto& b : hist.bins())
        j["bins"].push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
    j["gaps"] = nlohmann::ordered_json::array();
    for (const auto& g : hist.gaps()) j["gaps"].push_back({{"lo", g.lo}, {"hi", g.hi}});
    j["fit_error"] = hist.fit_error();
    return j.dump(2) + "\n";
}

GappedHistogram histogram_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        std::vector<HistogramBin> bins;
        for (const auto& b : j.at("bins"))
            bins.push_back({b.at("lo").get<double>(), b.at("hi").get<double>(),
                            b.at("count").get<std::size_t>()});
        std::vector<GapInterval> gaps;
        for (const auto& g : j.at("gaps"))
            gaps.push_back({g.at("lo").get<double>(), g.at("hi").get<double>()});
        return GappedHistogram(std::move(bins), std::move(gaps), j.value("fit_error", 0.0));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad histogram JSON: ") + e.what());
    }
}

} // namespace datamech
