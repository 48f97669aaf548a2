#pragma once

#include "rfcsim/sim.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rfcsim {

/// Default prominence floor relative to the series' peak-to-peak range.
inline constexpr double kDefaultRelativeProminence = 1e-6;
/// Series with a smaller absolute range count as flat under the default floor.
inline constexpr double kFlatRange = 1e-9;

struct PeakOptions {
    /// Minimum prominence; negative selects kDefaultRelativeProminence times the
    /// series' peak-to-peak range, and no peaks at all for a flat series.
    double min_prominence = -1.0;
    /// Half-width in samples of the least-squares parabola used to refine each
    /// peak time. 1 gives the classic three-point interpolation.
    int fit_half_width = 1;
};

/// Times of strict local maxima (plateaus count once) whose prominence is at
/// least the threshold, refined below the sample grid.
std::vector<double> find_peaks(std::span<const double> values, double t0, double dt,
                               const PeakOptions& opts = {});

/// Topographic prominence of the sample at `index`.
double peak_prominence(std::span<const double> values, std::size_t index);

inline constexpr int kMinFrequencyIntervals = 4;
inline constexpr int kMaxFrequencyIntervals = 10;

struct FrequencyEstimate {
    std::optional<double> hz;          ///< absent if fewer than n + 1 peaks
    std::vector<double> interval_hz;   ///< 1/dt of each interval used
    std::size_t peaks_available = 0;
};

/// Mean of 1/dt over the first `n` consecutive peak intervals.
/// Throws ParameterError unless 4 <= n <= 10.
FrequencyEstimate oscillation_frequency(std::span<const double> peak_times, int n);

struct Dip {
    double value = 0.0;
    double time = 0.0;
};

/// Global minimum over samples with t_from <= t <= t_to (first occurrence).
Dip dip(std::span<const double> values, std::span<const double> times, double t_from, double t_to);

struct StabilityVerdict {
    bool stable = false;
    double first_swing = 0.0;  ///< peak-to-peak in the first second after clearing
    double final_swing = 0.0;  ///< peak-to-peak in the last second of the run
};

/// Settled if the last second's peak-to-peak is below 10 % of the first
/// post-clearing swing (or negligible, below 1e-9, for an undisturbed run).
StabilityVerdict stability_verdict(const TimeSeries& ts, std::string_view channel, double t_clear);

struct OscillationReport {
    std::string channel;
    std::vector<double> peak_times;
    std::vector<double> interval_hz;
    std::optional<double> frequency_hz;
    double min_value = 0.0;
    double max_value = 0.0;
    StabilityVerdict verdict;
};

/// Peak-based frequency estimate of one channel over [t_from, t_to], using as
/// many intervals (4..10) as the peaks allow.
OscillationReport analyze_channel(const TimeSeries& ts, std::string_view channel, double t_from,
                                  double t_to, double t_clear, const PeakOptions& opts = {});

/// Lag (s) maximizing sum x(t) y(t + lag) of the mean-removed series, searched
/// over |lag| <= max_lag. Positive means y trails x.
double xcorr_peak_lag(std::span<const double> x, std::span<const double> y, double dt, double max_lag);

}  // namespace rfcsim
