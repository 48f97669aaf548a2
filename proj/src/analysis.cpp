#include "rfcsim/analysis.hpp"

#include "rfcsim/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rfcsim {

namespace {

// Vertex of a least-squares parabola through samples [center-w, center+w],
// returned as a fractional sample index.
double refine_vertex(std::span<const double> v, std::size_t center, int w)
{
    const auto n = static_cast<long>(v.size());
    double c = static_cast<double>(center);
    for (int pass = 0; pass < (w > 1 ? 3 : 1); ++pass) {
        const long mid = std::lround(c);
        const long lo = std::max(0L, mid - w);
        const long hi = std::min(n - 1, mid + w);
        if (hi - lo < 2)
            return c;
        Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
        Eigen::Vector3d b = Eigen::Vector3d::Zero();
        for (long i = lo; i <= hi; ++i) {
            const double x = static_cast<double>(i - mid);
            const Eigen::Vector3d phi(1.0, x, x * x);
            a += phi * phi.transpose();
            b += phi * v[static_cast<std::size_t>(i)];
        }
        const Eigen::Vector3d coef = a.ldlt().solve(b);
        if (!(coef(2) < 0.0))
            return c;
        const double offset = std::clamp(-coef(1) / (2.0 * coef(2)), -static_cast<double>(w),
                                         static_cast<double>(w));
        const double next = static_cast<double>(mid) + offset;
        if (std::abs(next - c) < 1e-9) {
            c = next;
            break;
        }
        c = next;
    }
    return c;
}

double peak_to_peak(std::span<const double> v)
{
    if (v.empty())
        return 0.0;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

std::pair<std::size_t, std::size_t> window_indices(std::span<const double> times, double t_from, double t_to)
{
    const double eps = 1e-9;
    const auto first = std::lower_bound(times.begin(), times.end(), t_from - eps);
    const auto last = std::upper_bound(times.begin(), times.end(), t_to + eps);
    return {static_cast<std::size_t>(first - times.begin()), static_cast<std::size_t>(last - times.begin())};
}

}  // namespace

double peak_prominence(std::span<const double> v, std::size_t index)
{
    const double h = v[index];
    double left_min = h;
    for (std::size_t i = index; i-- > 0;) {
        if (v[i] > h)
            break;
        left_min = std::min(left_min, v[i]);
    }
    double right_min = h;
    for (std::size_t i = index + 1; i < v.size(); ++i) {
        if (v[i] > h)
            break;
        right_min = std::min(right_min, v[i]);
    }
    return h - std::max(left_min, right_min);
}

std::vector<double> find_peaks(std::span<const double> v, double t0, double dt, const PeakOptions& opts)
{
    std::vector<double> times;
    if (v.size() < 3)
        return times;
    const double range = peak_to_peak(v);
    if (opts.min_prominence < 0.0 && range < kFlatRange)
        return times;
    const double threshold = opts.min_prominence >= 0.0 ? opts.min_prominence : kDefaultRelativeProminence * range;
    const int w = std::max(1, opts.fit_half_width);

    std::size_t i = 1;
    while (i + 1 < v.size()) {
        if (v[i] > v[i - 1]) {
            std::size_t j = i;
            while (j + 1 < v.size() && v[j + 1] == v[i])
                ++j;
            if (j + 1 < v.size() && v[j + 1] < v[i]) {
                const std::size_t p = i + (j - i) / 2;
                if (peak_prominence(v, p) >= threshold) {
                    const double idx = (j == i) ? refine_vertex(v, p, w) : static_cast<double>(i + j) / 2.0;
                    times.push_back(t0 + idx * dt);
                }
            }
            i = j + 1;
        } else {
            ++i;
        }
    }
    return times;
}

FrequencyEstimate oscillation_frequency(std::span<const double> peak_times, int n)
{
    if (n < kMinFrequencyIntervals || n > kMaxFrequencyIntervals)
        throw ParameterError("frequency averaging needs between 4 and 10 intervals, got " + std::to_string(n));
    FrequencyEstimate est;
    est.peaks_available = peak_times.size();
    if (peak_times.size() < static_cast<std::size_t>(n) + 1)
        return est;
    for (int k = 0; k < n; ++k)
        est.interval_hz.push_back(1.0 / (peak_times[k + 1] - peak_times[k]));
    est.hz = std::accumulate(est.interval_hz.begin(), est.interval_hz.end(), 0.0) / n;
    return est;
}

Dip dip(std::span<const double> values, std::span<const double> times, double t_from, double t_to)
{
    const auto [lo, hi] = window_indices(times, t_from, t_to);
    if (lo >= hi)
        throw ParameterError("dip window contains no samples");
    std::size_t best = lo;
    for (std::size_t i = lo; i < hi; ++i)
        if (values[i] < values[best])
            best = i;
    return {values[best], times[best]};
}

StabilityVerdict stability_verdict(const TimeSeries& ts, std::string_view channel, double t_clear)
{
    const auto& v = ts.channel(channel);
    const auto& t = ts.time();
    if (t.empty())
        return {};
    const std::span<const double> vs(v);
    const auto [a0, a1] = window_indices(t, t_clear, t_clear + 1.0);
    const auto [b0, b1] = window_indices(t, t.back() - 1.0, t.back());
    StabilityVerdict out;
    out.first_swing = peak_to_peak(vs.subspan(a0, a1 - a0));
    out.final_swing = peak_to_peak(vs.subspan(b0, b1 - b0));
    out.stable = out.final_swing < 0.1 * out.first_swing || out.final_swing < 1e-9;
    return out;
}

OscillationReport analyze_channel(const TimeSeries& ts, std::string_view channel, double t_from, double t_to,
                                  double t_clear, const PeakOptions& opts)
{
    OscillationReport rep;
    rep.channel = std::string(channel);
    const auto& v = ts.channel(channel);
    const auto& t = ts.time();
    const auto [lo, hi] = window_indices(t, t_from, t_to);
    if (hi <= lo)
        return rep;
    const std::span<const double> win = std::span<const double>(v).subspan(lo, hi - lo);
    const auto [mn, mx] = std::minmax_element(win.begin(), win.end());
    rep.min_value = *mn;
    rep.max_value = *mx;
    rep.peak_times = find_peaks(win, t[lo], ts.interval(), opts);
    const int n = std::min<int>(kMaxFrequencyIntervals, static_cast<int>(rep.peak_times.size()) - 1);
    if (n >= kMinFrequencyIntervals) {
        const auto est = oscillation_frequency(rep.peak_times, n);
        rep.frequency_hz = est.hz;
        rep.interval_hz = est.interval_hz;
    }
    rep.verdict = stability_verdict(ts, channel, t_clear);
    return rep;
}

double xcorr_peak_lag(std::span<const double> x, std::span<const double> y, double dt, double max_lag)
{
    const std::size_t n = std::min(x.size(), y.size());
    if (n == 0)
        throw ParameterError("cross-correlation of empty series");
    const double mx = std::accumulate(x.begin(), x.begin() + static_cast<long>(n), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.begin() + static_cast<long>(n), 0.0) / n;
    const long max_k = std::min<long>(static_cast<long>(n) - 1, std::lround(max_lag / dt));
    double best = -std::numeric_limits<double>::infinity();
    long best_k = 0;
    for (long k = -max_k; k <= max_k; ++k) {
        double acc = 0.0;
        for (long i = std::max(0L, -k); i < static_cast<long>(n) && i + k < static_cast<long>(n); ++i)
            acc += (x[i] - mx) * (y[i + k] - my);
        if (acc > best) {
            best = acc;
            best_k = k;
        }
    }
    return static_cast<double>(best_k) * dt;
}

}  // namespace rfcsim
