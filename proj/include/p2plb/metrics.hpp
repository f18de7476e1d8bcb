#pragma once

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "p2plb/errors.hpp"
#include "p2plb/ids.hpp"

namespace p2plb {

enum class ProgressNorm { Verbatim, Mean };

// Sample standard deviation of the per-host load: sqrt(sum (w - mean)^2 / (|H|-1)).
// Undefined for fewer than two hosts (absent, not zero).
inline std::optional<double> load_sigma(const std::vector<int>& loads) {
    const std::size_t n = loads.size();
    if (n < 2) return std::nullopt;
    double mean = 0.0;
    for (int w : loads) mean += w;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (int w : loads) ss += (w - mean) * (w - mean);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

// Application progress: sum of per-job iteration counts over |G|-1
// (Verbatim), or over |G| (Mean).  With a single job the verbatim form is
// undefined; it falls back to the mean with a one-time warning.
inline double average_progress(const std::vector<long>& iterations, ProgressNorm norm) {
    if (iterations.empty()) throw InvalidConfiguration("progress of zero jobs");
    double sum = 0.0;
    for (long i : iterations) sum += static_cast<double>(i);
    if (norm == ProgressNorm::Verbatim && iterations.size() == 1) {
        static bool warned = false;
        if (!warned) {
            std::cerr << "warning: progress normalization 1/(|G|-1) undefined for a "
                         "single job; using the mean instead\n";
            warned = true;
        }
        norm = ProgressNorm::Mean;
    }
    const double denom = norm == ProgressNorm::Verbatim
                             ? static_cast<double>(iterations.size() - 1)
                             : static_cast<double>(iterations.size());
    return sum / denom;
}

inline long migrations_total(const std::map<HostId, long>& by_host) {
    long total = 0;
    for (const auto& [h, m] : by_host) total += m;
    return total;
}

// Progress an ideally balanced system would reach by time t: every job runs
// at rate min(1, |H|/|G|), finishing an iteration every R units of work.
inline double theoretical_optimal_progress(double t, std::size_t n_jobs,
                                           std::size_t n_hosts, double work_per_iteration) {
    double rate = n_jobs <= n_hosts
                      ? 1.0
                      : static_cast<double>(n_hosts) / static_cast<double>(n_jobs);
    return t / work_per_iteration * rate;
}

struct MetricsSample {
    long t = 0;
    std::optional<double> sigma;
    double progress = 0.0;
    long migrations = 0;
};

struct AggregateRow {
    long t = 0;
    double sigma_mean = 0, sigma_se = 0;
    double progress_mean = 0, progress_se = 0;
    double migrations_mean = 0, migrations_se = 0;
};

struct TrialAggregate {
    std::size_t n_trials = 0;
    std::vector<AggregateRow> rows;
};

// Streaming per-step accumulator so sweeps don't have to hold every trial's
// series in memory.  Trials are added in index order; that fixed order is
// what makes the aggregate bit-stable.
class AggregateBuilder {
public:
    void add_trial(const std::vector<MetricsSample>& series) {
        if (n_ == 0) {
            acc_.resize(series.size());
            for (std::size_t i = 0; i < series.size(); ++i) acc_[i].t = series[i].t;
        }
        if (series.size() != acc_.size())
            throw SimError("trials disagree on series length");
        for (std::size_t i = 0; i < series.size(); ++i) {
            const MetricsSample& s = series[i];
            const double sg = s.sigma.value_or(std::nan(""));
            acc_[i].sigma += sg;
            acc_[i].sigma2 += sg * sg;
            acc_[i].progress += s.progress;
            acc_[i].progress2 += s.progress * s.progress;
            const double m = static_cast<double>(s.migrations);
            acc_[i].migrations += m;
            acc_[i].migrations2 += m * m;
        }
        ++n_;
    }

    TrialAggregate finish() const {
        TrialAggregate agg;
        agg.n_trials = n_;
        agg.rows.reserve(acc_.size());
        for (const Acc& a : acc_) {
            AggregateRow r;
            r.t = a.t;
            mean_se(a.sigma, a.sigma2, r.sigma_mean, r.sigma_se);
            mean_se(a.progress, a.progress2, r.progress_mean, r.progress_se);
            mean_se(a.migrations, a.migrations2, r.migrations_mean, r.migrations_se);
            agg.rows.push_back(r);
        }
        return agg;
    }

    std::size_t trials() const { return n_; }

private:
    struct Acc {
        long t = 0;
        double sigma = 0, sigma2 = 0;
        double progress = 0, progress2 = 0;
        double migrations = 0, migrations2 = 0;
    };

    void mean_se(double sum, double sumsq, double& mean, double& se) const {
        const double n = static_cast<double>(n_);
        mean = sum / n;
        if (n_ < 2) {
            se = 0.0; // single trial: the mean is the trial, no spread estimate
            return;
        }
        double var = (sumsq - n * mean * mean) / (n - 1.0);
        if (var < 0) var = 0; // fp cancellation
        se = std::sqrt(var / n);
    }

    std::vector<Acc> acc_;
    std::size_t n_ = 0;
};

// Fixed 6-decimal formatting used by every CSV we write.
inline std::string format_fixed(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline void write_trial_csv_header(std::ostream& os) {
    os << "trial,t,sigma,progress,migrations\n";
}

inline void write_trial_csv_rows(std::ostream& os, int trial,
                                 const std::vector<MetricsSample>& series) {
    for (const MetricsSample& s : series) {
        os << trial << ',' << s.t << ','
           << (s.sigma ? format_fixed(*s.sigma) : "nan") << ','
           << format_fixed(s.progress) << ',' << s.migrations << '\n';
    }
}

inline void write_aggregate_csv(std::ostream& os, const TrialAggregate& agg) {
    os << "t,sigma_mean,sigma_se,progress_mean,progress_se,migrations_mean,migrations_se\n";
    for (const AggregateRow& r : agg.rows) {
        os << r.t << ',' << format_fixed(r.sigma_mean) << ',' << format_fixed(r.sigma_se)
           << ',' << format_fixed(r.progress_mean) << ',' << format_fixed(r.progress_se)
           << ',' << format_fixed(r.migrations_mean) << ',' << format_fixed(r.migrations_se)
           << '\n';
    }
}

} // namespace p2plb
