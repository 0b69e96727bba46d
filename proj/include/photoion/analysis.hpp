// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file photoion/analysis.hpp
//! Data-side tools: log-log regression, inflection detection, logarithmic
//! time derivatives, and least-squares fits of power laws and ion-yield
//! curves.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "units.hpp"

namespace photoion
{
//---------------------------------------------------------------------------//
// SERIES
//---------------------------------------------------------------------------//
struct Point
{
    double x;
    double y;
    bool operator==(Point const&) const = default;
};

/*!
 * Ordered (x, y) samples. x is strictly increasing, y finite, length >= 2.
 */
class Series
{
  public:
    Series() = default;

    Series(std::vector<Point> points,
           Unit x_unit = Unit::none,
           Unit y_unit = Unit::none,
           std::string label = {})
        : points_(std::move(points))
        , x_unit_(x_unit)
        , y_unit_(y_unit)
        , label_(std::move(label))
    {
        if (points_.size() < 2)
            throw DomainError("series needs at least two points");
        for (std::size_t i = 0; i < points_.size(); ++i)
        {
            if (!std::isfinite(points_[i].x) || !std::isfinite(points_[i].y))
                throw DomainError("series values must be finite");
            if (i > 0 && !(points_[i].x > points_[i - 1].x))
                throw DomainError("series x must be strictly increasing");
        }
    }

    //! Sample y = f(x) on the given abscissae.
    template<class F>
    static Series sample(F&& f,
                         std::vector<double> const& xs,
                         Unit x_unit = Unit::none,
                         Unit y_unit = Unit::none,
                         std::string label = {})
    {
        std::vector<Point> pts;
        pts.reserve(xs.size());
        for (double x : xs)
            pts.push_back({x, f(x)});
        return {std::move(pts), x_unit, y_unit, std::move(label)};
    }

    std::vector<Point> const& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    Point const& operator[](std::size_t i) const { return points_[i]; }
    Unit x_unit() const { return x_unit_; }
    Unit y_unit() const { return y_unit_; }
    std::string const& label() const { return label_; }

  private:
    std::vector<Point> points_;
    Unit x_unit_ = Unit::none;
    Unit y_unit_ = Unit::none;
    std::string label_;
};

inline std::vector<double> linear_grid(double lo, double hi, std::size_t n)
{
    if (n < 2 || !(lo < hi))
        throw DomainError("grid needs lo < hi and at least two points");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    g.back() = hi;
    return g;
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t n)
{
    if (!(lo > 0))
        throw DomainError("log grid needs lo > 0");
    auto g = linear_grid(std::log(lo), std::log(hi), n);
    for (auto& v : g)
        v = std::exp(v);
    g.front() = lo;
    g.back() = hi;
    return g;
}

/*!
 * Multiply each y by exp(sigma z), z standard normal, from a seeded stream.
 */
inline Series
add_lognormal_noise(Series const& s, double sigma, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Point> pts = s.points();
    for (auto& p : pts)
        p.y *= std::exp(sigma * normal(rng));
    return {std::move(pts), s.x_unit(), s.y_unit(), s.label()};
}

//---------------------------------------------------------------------------//
// FIT RESULT
//---------------------------------------------------------------------------//
struct FitResult
{
    std::vector<std::string> parameter_names;
    std::vector<double> values;
    std::vector<double> standard_errors;
    double residual_norm = 0;
    bool converged = false;
    int iterations = 0;

    double value(std::string const& name) const
    {
        for (std::size_t i = 0; i < parameter_names.size(); ++i)
        {
            if (parameter_names[i] == name)
                return values[i];
        }
        throw DomainError("no fit parameter named '" + name + "'");
    }
    double standard_error(std::string const& name) const
    {
        for (std::size_t i = 0; i < parameter_names.size(); ++i)
        {
            if (parameter_names[i] == name)
                return standard_errors[i];
        }
        throw DomainError("no fit parameter named '" + name + "'");
    }
};

//---------------------------------------------------------------------------//
// LOG-LOG REGRESSION
//---------------------------------------------------------------------------//
struct LogLogFit
{
    double slope;
    double intercept;  //!< natural-log intercept
    double r_squared;
    double slope_stderr;
    double intercept_stderr;
    std::size_t points_used;
};

struct Window
{
    double lo;
    double hi;
};

namespace detail
{
inline std::vector<std::size_t>
window_indices(Series const& s, std::optional<Window> const& window)
{
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < s.size(); ++i)
    {
        double x = s[i].x;
        if (!window || (x >= window->lo && x <= window->hi))
            idx.push_back(i);
    }
    std::vector<std::size_t> bad;
    for (auto i : idx)
    {
        if (!(s[i].x > 0) || !(s[i].y > 0))
            bad.push_back(i);
    }
    if (!bad.empty())
    {
        std::ostringstream os;
        os << "log-log analysis needs positive data; offending indices:";
        for (auto i : bad)
            os << ' ' << i;
        throw DomainError(os.str());
    }
    return idx;
}
}  // namespace detail

//! Ordinary least squares on (ln x, ln y), optionally restricted to a window.
inline LogLogFit
loglog_slope(Series const& s, std::optional<Window> window = std::nullopt)
{
    auto idx = detail::window_indices(s, window);
    if (idx.size() < 3)
        throw DomainError("log-log regression needs at least 3 points");
    double const n = static_cast<double>(idx.size());
    double mx = 0, my = 0;
    for (auto i : idx)
    {
        mx += std::log(s[i].x);
        my += std::log(s[i].y);
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (auto i : idx)
    {
        double dx = std::log(s[i].x) - mx;
        double dy = std::log(s[i].y) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 1e-24 * n))
        throw DomainError("degenerate x-range in log-log regression");
    LogLogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = std::max(syy - fit.slope * sxy, 0.0);
    fit.r_squared = syy > 0 ? 1 - rss / syy : 1.0;
    double s2 = rss / (n - 2);
    fit.slope_stderr = std::sqrt(s2 / sxx);
    fit.intercept_stderr = std::sqrt(s2 * (1 / n + mx * mx / sxx));
    fit.points_used = idx.size();
    return fit;
}

//---------------------------------------------------------------------------//
/*!
 * Knee of a log-log curve: the interior point where the discrete second
 * derivative of ln y against ln x has its largest magnitude.
 *
 * Returns nothing when the curve has no curvature above \c tolerance or the
 * extremum sits at the edge of the grid.
 */
inline std::optional<double>
inflection_point(Series const& s, double tolerance = 1e-6)
{
    if (s.size() < 7)
        throw DomainError("inflection detection needs at least 7 points",
                          "input");
    detail::window_indices(s, std::nullopt);
    std::size_t const n = s.size();
    std::vector<double> u(n), v(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        u[i] = std::log(s[i].x);
        v[i] = std::log(s[i].y);
    }
    std::vector<double> d2(n, 0.0);
    std::size_t best = 0;
    double best_mag = -1;
    for (std::size_t i = 1; i + 1 < n; ++i)
    {
        double h1 = u[i] - u[i - 1];
        double h2 = u[i + 1] - u[i];
        d2[i] = 2 * ((v[i + 1] - v[i]) / h2 - (v[i] - v[i - 1]) / h1)
                / (h1 + h2);
        if (std::abs(d2[i]) > best_mag)
        {
            best_mag = std::abs(d2[i]);
            best = i;
        }
    }
    if (best_mag <= tolerance)
        return std::nullopt;
    if (best == 1 || best == n - 2)
    {
        // A kink one step from the edge is still a junction if the curve is
        // flat elsewhere; a monotone trend running off the grid is not.
        std::size_t next = best == 1 ? 2 : n - 3;
        if (std::abs(d2[next]) > 0.5 * best_mag)
            return std::nullopt;
    }
    // Parabolic refinement of |d2| in ln x.
    double result = u[best];
    if (best >= 2 && best + 2 < n)
    {
        double f0 = std::abs(d2[best - 1]), f1 = best_mag,
               f2 = std::abs(d2[best + 1]);
        double denom = f0 - 2 * f1 + f2;
        if (denom < 0)
        {
            double offset = 0.5 * (f0 - f2) / denom;
            offset = std::clamp(offset, -1.0, 1.0);
            double h = offset < 0 ? u[best] - u[best - 1]
                                  : u[best + 1] - u[best];
            result = u[best] + offset * h;
        }
    }
    return std::exp(result);
}

//---------------------------------------------------------------------------//
/*!
 * d ln y / dx by second-order finite differences (three-point central on
 * the interior, three-point one-sided at the ends; two points fall back to
 * a plain difference).
 */
inline Series log_derivative_time(Series const& s)
{
    std::size_t const n = s.size();
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        if (!(s[i].x > 0) || !(s[i].y > 0))
        {
            std::ostringstream os;
            os << "log derivative needs positive t and N (index " << i << ")";
            throw DomainError(os.str());
        }
        f[i] = std::log(s[i].y);
    }
    std::vector<Point> out(n);
    auto x = [&](std::size_t i) { return s[i].x; };
    if (n == 2)
    {
        double d = (f[1] - f[0]) / (x(1) - x(0));
        return {{{x(0), d}, {x(1), d}}, s.x_unit(), Unit::none, "dlnN_dt"};
    }
    for (std::size_t i = 1; i + 1 < n; ++i)
    {
        double h1 = x(i) - x(i - 1);
        double h2 = x(i + 1) - x(i);
        double d = -h2 / (h1 * (h1 + h2)) * f[i - 1]
                   + (h2 - h1) / (h1 * h2) * f[i]
                   + h1 / (h2 * (h1 + h2)) * f[i + 1];
        out[i] = {x(i), d};
    }
    {
        double h1 = x(1) - x(0), h2 = x(2) - x(1);
        double d = -(2 * h1 + h2) / (h1 * (h1 + h2)) * f[0]
                   + (h1 + h2) / (h1 * h2) * f[1]
                   - h1 / (h2 * (h1 + h2)) * f[2];
        out[0] = {x(0), d};
    }
    {
        double h1 = x(n - 2) - x(n - 3), h2 = x(n - 1) - x(n - 2);
        double d = h2 / (h1 * (h1 + h2)) * f[n - 3]
                   - (h1 + h2) / (h1 * h2) * f[n - 2]
                   + (2 * h2 + h1) / (h2 * (h1 + h2)) * f[n - 1];
        out[n - 1] = {x(n - 1), d};
    }
    return {std::move(out), s.x_unit(), Unit::none, "dlnN_dt"};
}

//! y = prefactor x^exponent by log-log least squares.
inline FitResult fit_power_law(Series const& s)
{
    auto fit = loglog_slope(s);
    FitResult r;
    r.parameter_names = {"exponent", "prefactor"};
    double prefactor = std::exp(fit.intercept);
    r.values = {fit.slope, prefactor};
    r.standard_errors = {fit.slope_stderr, prefactor * fit.intercept_stderr};
    double rss = 0;
    for (auto const& p : s.points())
    {
        double d = std::log(p.y) - (fit.intercept + fit.slope * std::log(p.x));
        rss += d * d;
    }
    r.residual_norm = std::sqrt(rss);
    r.converged = true;
    r.iterations = 1;
    return r;
}

//---------------------------------------------------------------------------//
// LEVENBERG–MARQUARDT
//---------------------------------------------------------------------------//
struct LmOptions
{
    int max_iterations = 200;
    double step_tolerance = 1e-12;
    double cost_tolerance = 1e-15;
    double gradient_tolerance = 1e-14;
    double initial_damping = 1e-3;
};

template<std::size_t P>
struct LmResult
{
    std::array<double, P> params{};
    std::array<double, P> standard_errors{};
    double cost = 0;  //!< sum of squared residuals
    bool converged = false;
    int iterations = 0;
};

namespace detail
{
//! Solve A x = b for a small symmetric positive definite A (Cholesky).
template<std::size_t P>
bool cholesky_solve(std::array<std::array<double, P>, P> a,
                    std::array<double, P>& b)
{
    for (std::size_t j = 0; j < P; ++j)
    {
        double d = a[j][j];
        for (std::size_t k = 0; k < j; ++k)
            d -= a[j][k] * a[j][k];
        if (!(d > 0))
            return false;
        a[j][j] = std::sqrt(d);
        for (std::size_t i = j + 1; i < P; ++i)
        {
            double s = a[i][j];
            for (std::size_t k = 0; k < j; ++k)
                s -= a[i][k] * a[j][k];
            a[i][j] = s / a[j][j];
        }
    }
    for (std::size_t i = 0; i < P; ++i)
    {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k)
            s -= a[i][k] * b[k];
        b[i] = s / a[i][i];
    }
    for (std::size_t i = P; i-- > 0;)
    {
        double s = b[i];
        for (std::size_t k = i + 1; k < P; ++k)
            s -= a[k][i] * b[k];
        b[i] = s / a[i][i];
    }
    return true;
}
}  // namespace detail

/*!
 * Minimize sum r_i(p)² for P parameters and m residuals.
 *
 * \c model(params, residuals, jacobian) fills the m residuals and the
 * row-major m×P Jacobian.
 */
template<std::size_t P, class Model>
LmResult<P> levenberg_marquardt(Model&& model,
                                std::array<double, P> start,
                                std::size_t m,
                                LmOptions const& opts = {})
{
    using Mat = std::array<std::array<double, P>, P>;
    std::vector<double> r(m), r_trial(m), jac(m * P), jac_trial(m * P);
    auto cost_of = [](std::vector<double> const& v) {
        double c = 0;
        for (double x : v)
            c += x * x;
        return c;
    };
    auto normal_equations = [&](std::vector<double> const& j,
                                std::vector<double> const& res,
                                Mat& jtj,
                                std::array<double, P>& g) {
        for (auto& row : jtj)
            row.fill(0);
        g.fill(0);
        for (std::size_t i = 0; i < m; ++i)
        {
            for (std::size_t a = 0; a < P; ++a)
            {
                g[a] += j[i * P + a] * res[i];
                for (std::size_t b = 0; b < P; ++b)
                    jtj[a][b] += j[i * P + a] * j[i * P + b];
            }
        }
    };

    LmResult<P> result;
    auto p = start;
    model(p, r, jac);
    double cost = cost_of(r);
    if (!std::isfinite(cost))
    {
        result.params = p;
        result.cost = cost;
        return result;
    }
    double lambda = opts.initial_damping;
    Mat jtj;
    std::array<double, P> g;
    normal_equations(jac, r, jtj, g);

    int it = 0;
    bool converged = false;
    while (it < opts.max_iterations)
    {
        ++it;
        double gmax = 0;
        for (double gi : g)
            gmax = std::max(gmax, std::abs(gi));
        if (gmax < opts.gradient_tolerance)
        {
            converged = true;
            break;
        }
        Mat damped = jtj;
        for (std::size_t a = 0; a < P; ++a)
            damped[a][a] += lambda * std::max(jtj[a][a], 1e-300);
        std::array<double, P> step;
        for (std::size_t a = 0; a < P; ++a)
            step[a] = -g[a];
        if (!detail::cholesky_solve(damped, step))
        {
            lambda *= 10;
            continue;
        }
        auto trial = p;
        for (std::size_t a = 0; a < P; ++a)
            trial[a] += step[a];
        model(trial, r_trial, jac_trial);
        double trial_cost = cost_of(r_trial);
        if (std::isfinite(trial_cost) && trial_cost <= cost)
        {
            double step_norm = 0, p_norm = 0;
            for (std::size_t a = 0; a < P; ++a)
            {
                step_norm += step[a] * step[a];
                p_norm += trial[a] * trial[a];
            }
            bool small_step = std::sqrt(step_norm)
                              <= opts.step_tolerance * (std::sqrt(p_norm)
                                                        + opts.step_tolerance);
            bool small_gain = cost - trial_cost
                              <= opts.cost_tolerance * std::max(cost, 1e-300);
            p = trial;
            std::swap(r, r_trial);
            std::swap(jac, jac_trial);
            cost = trial_cost;
            normal_equations(jac, r, jtj, g);
            lambda = std::max(lambda / 10, 1e-15);
            if (small_step || small_gain || cost == 0)
            {
                converged = true;
                break;
            }
        }
        else
        {
            lambda *= 10;
            if (lambda > 1e16)
            {
                // No descent direction left: at a minimum to precision.
                converged = true;
                break;
            }
        }
    }

    result.params = p;
    result.cost = cost;
    result.iterations = it;
    result.converged = converged;
    // Covariance s² (JᵀJ)⁻¹ from the final Jacobian.
    double dof = m > P ? static_cast<double>(m - P) : 1.0;
    double s2 = cost / dof;
    for (std::size_t a = 0; a < P; ++a)
    {
        std::array<double, P> e{};
        e[a] = 1;
        if (detail::cholesky_solve(jtj, e))
            result.standard_errors[a] = std::sqrt(std::max(e[a] * s2, 0.0));
        else
            result.standard_errors[a] = std::numeric_limits<double>::infinity();
    }
    return result;
}

//---------------------------------------------------------------------------//
// ION-YIELD FIT
//---------------------------------------------------------------------------//
//! A N² I (1 - exp(-I_m / I)).
inline double ion_yield_model(double amplitude,
                              double photon_count,
                              double balance_intensity,
                              double intensity)
{
    return amplitude * photon_count * photon_count * intensity
           * -std::expm1(-balance_intensity / intensity);
}

//! Sum over points of (ln model - ln data)² for the product A N² and I_m.
inline double ion_yield_objective(Series const& s,
                                  double amplitude,
                                  double photon_count,
                                  double balance_intensity)
{
    double c = 0;
    for (auto const& p : s.points())
    {
        double d = std::log(ion_yield_model(
                       amplitude, photon_count, balance_intensity, p.x))
                   - std::log(p.y);
        c += d * d;
    }
    return c;
}

struct IonYieldFitOptions
{
    //! When given, A is separated from the fitted product A N².
    std::optional<double> photon_count;
    std::array<double, 3> start_factors{0.1, 1.0, 10.0};
    LmOptions lm{};
};

/*!
 * Fit A N² and I_m of the ion-yield curve in log space.
 *
 * Only the product A N² is identifiable. Starts from a 3×3 grid around
 * data-driven seeds: I_m at the detected knee (or the geometric centre of
 * the data) and the product from the low-intensity end.
 */
inline FitResult
fit_ion_yield(Series const& s, IonYieldFitOptions const& opts = {})
{
    if (s.size() < 8)
        throw DomainError("ion-yield fit needs at least 8 points", "input");
    detail::window_indices(s, std::nullopt);
    double span = std::log10(s.points().back().x / s.points().front().x);
    if (span < 1.5)
    {
        throw DomainError("ion-yield fit needs data spanning >= 1.5 decades",
                          "input");
    }
    std::size_t const m = s.size();
    std::vector<double> lx(m), ly(m);
    for (std::size_t i = 0; i < m; ++i)
    {
        lx[i] = s[i].x;
        ly[i] = std::log(s[i].y);
    }

    // Parameters: ln(A N²), ln(I_m).
    auto model = [&](std::array<double, 2> const& q,
                     std::vector<double>& r,
                     std::vector<double>& j) {
        double im = std::exp(q[1]);
        for (std::size_t i = 0; i < m; ++i)
        {
            double x = im / lx[i];
            double em = -std::expm1(-x);
            r[i] = q[0] + std::log(lx[i]) + std::log(em) - ly[i];
            j[2 * i] = 1;
            // d ln(1 - e^{-x}) / d ln I_m = x / (e^x - 1)
            j[2 * i + 1] = x < 700 ? x / std::expm1(x) : 0.0;
        }
    };

    double im_seed;
    if (auto knee = inflection_point(s))
        im_seed = *knee;
    else
        im_seed = std::sqrt(s.points().front().x * s.points().back().x);
    auto const& first = s.points().front();
    double product_seed = first.y
                          / (first.x * -std::expm1(-im_seed / first.x));

    LmResult<2> best;
    bool have_best = false;
    int total_iterations = 0;
    for (double fp : opts.start_factors)
    {
        for (double fi : opts.start_factors)
        {
            std::array<double, 2> start{std::log(product_seed * fp),
                                        std::log(im_seed * fi)};
            auto res = levenberg_marquardt<2>(model, start, m, opts.lm);
            total_iterations += res.iterations;
            bool better = !have_best || (res.converged && !best.converged)
                          || (res.converged == best.converged
                              && res.cost < best.cost);
            if (better && std::isfinite(res.cost))
            {
                best = res;
                have_best = true;
            }
        }
    }

    FitResult out;
    out.iterations = total_iterations;
    if (!have_best)
    {
        out.parameter_names = {"amplitude_product", "balance_intensity"};
        out.values = {std::nan(""), std::nan("")};
        out.standard_errors = out.values;
        out.residual_norm = std::numeric_limits<double>::infinity();
        return out;
    }
    double product = std::exp(best.params[0]);
    double im = std::exp(best.params[1]);
    out.parameter_names = {"amplitude_product", "balance_intensity"};
    out.values = {product, im};
    out.standard_errors = {product * best.standard_errors[0],
                           im * best.standard_errors[1]};
    if (opts.photon_count)
    {
        double n = *opts.photon_count;
        out.parameter_names.push_back("amplitude");
        out.values.push_back(product / (n * n));
        out.standard_errors.push_back(out.standard_errors[0] / (n * n));
        out.parameter_names.push_back("photon_count");
        out.values.push_back(n);
        out.standard_errors.push_back(0);
    }
    out.residual_norm = std::sqrt(best.cost);
    // Data that never bend over leave I_m unbounded: the optimizer parks it
    // where d ln N_i / d ln I_m has vanished at every point.
    double sensitivity = 0;
    for (std::size_t i = 0; i < m; ++i)
    {
        double x = im / lx[i];
        if (x < 700)
            sensitivity = std::max(sensitivity, x / std::expm1(x));
    }
    bool identified = std::isfinite(product) && std::isfinite(im)
                      && std::isfinite(out.standard_errors[1])
                      && sensitivity > 1e-6;
    out.converged = best.converged && identified;
    return out;
}

}  // namespace photoion
