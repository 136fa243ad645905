#pragma once

// Adaptive Dormand-Prince 5(4) stepper with the classic 4th-order dense
// interpolant. Kept deliberately small: fixed dimension, exception-based
// domain handling (a stage that throws std::domain_error rejects the step),
// FSAL reuse between accepted steps.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <utility>

#include "reluct/errors.hpp"

namespace reluct::detail {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N, class RHS>
class Dopri5 {
public:
    struct Options {
        double rel_tol = 1e-8;
        double abs_tol = 1e-12;
        double max_step = std::numeric_limits<double>::infinity();
        double init_step = 0.0;  ///< 0 = choose automatically
    };

    Dopri5(RHS rhs, double t0, const Vec<N>& y0, const Options& opts)
        : rhs_(std::move(rhs)), opts_(opts), t_(t0), y_(y0) {}

    double t() const { return t_; }
    double t_prev() const { return t_prev_; }
    const Vec<N>& y() const { return y_; }

    /// Drop cached derivative state (call after the solution or the rhs
    /// changed discontinuously, e.g. a jump or an input kink).
    void reset(double t, const Vec<N>& y) {
        t_ = t;
        y_ = y;
        have_k1_ = false;
        have_dense_ = false;
    }

    /// Take one accepted step, never stepping past t_limit. Returns the new
    /// time. Requires t() < t_limit.
    double step(double t_limit) {
        if (!have_k1_) {
            k_[0] = rhs_(t_, y_);
            have_k1_ = true;
        }
        if (h_ <= 0.0)
            h_ = opts_.init_step > 0.0 ? opts_.init_step : initial_step(t_limit);

        bool rejected = false;
        for (int attempt = 0; attempt < 400; ++attempt) {
            h_ = std::min({h_, opts_.max_step, t_limit - t_});
            const double hmin =
                64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t_), std::abs(t_limit));
            if (h_ < hmin)
                throw NumericError("dopri5: step size underflow");

            Vec<N> y1;
            double err;
            if (!try_step(h_, y1, err)) {
                // stage left the domain of the rhs; shrink hard and retry
                h_ *= 0.25;
                rejected = true;
                continue;
            }
            if (err <= 1.0) {
                double fac = 0.9 * std::pow(err > 1e-16 ? err : 1e-16, -0.2);
                fac = std::clamp(fac, 0.2, rejected ? 1.0 : 10.0);
                build_dense(h_, y1);
                t_prev_ = t_;
                t_ += h_;
                y_ = y1;
                k_[0] = k_[6];  // FSAL
                h_ *= fac;
                return t_;
            }
            h_ *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
            rejected = true;
        }
        throw NumericError("dopri5: no acceptable step after 400 attempts");
    }

    bool has_dense() const { return have_dense_; }

    /// Evaluate the dense interpolant of the last accepted step at s,
    /// with s in [t_prev(), t()].
    Vec<N> interpolate(double s) const {
        if (!have_dense_)
            throw NumericError("dopri5: no dense output available");
        const double h = t_ - t_prev_;
        const double th = (s - t_prev_) / h;
        const double th1 = 1.0 - th;
        Vec<N> out;
        for (std::size_t i = 0; i < N; ++i) {
            out[i] = cont_[0][i] +
                     th * (cont_[1][i] +
                           th1 * (cont_[2][i] + th * (cont_[3][i] + th1 * cont_[4][i])));
        }
        return out;
    }

private:
    // Dormand-Prince 5(4) tableau
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    // dense-output weights
    static constexpr double d1 = -12715105075.0 / 11282082432.0;
    static constexpr double d3 = 87487479700.0 / 32700410799.0;
    static constexpr double d4 = -10690763975.0 / 1880347072.0;
    static constexpr double d5 = 701980252875.0 / 199316789632.0;
    static constexpr double d6 = -1453857185.0 / 822651844.0;
    static constexpr double d7 = 69997945.0 / 29380423.0;

    RHS rhs_;
    Options opts_;
    double t_ = 0.0;
    double t_prev_ = 0.0;
    double h_ = 0.0;
    Vec<N> y_{};
    std::array<Vec<N>, 7> k_{};
    std::array<Vec<N>, 5> cont_{};
    bool have_k1_ = false;
    bool have_dense_ = false;

    static Vec<N> axpy(const Vec<N>& y, double h, std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
        Vec<N> out = y;
        for (const auto& [w, k] : terms)
            for (std::size_t i = 0; i < N; ++i) out[i] += h * w * (*k)[i];
        return out;
    }

    /// One trial step of size h. Returns false if a stage evaluation threw
    /// std::domain_error. On success fills y1 and the scaled error norm.
    bool try_step(double h, Vec<N>& y1, double& err) {
        try {
            k_[1] = rhs_(t_ + c2 * h, axpy(y_, h, {{a21, &k_[0]}}));
            k_[2] = rhs_(t_ + c3 * h, axpy(y_, h, {{a31, &k_[0]}, {a32, &k_[1]}}));
            k_[3] = rhs_(t_ + c4 * h, axpy(y_, h, {{a41, &k_[0]}, {a42, &k_[1]}, {a43, &k_[2]}}));
            k_[4] = rhs_(t_ + c5 * h,
                         axpy(y_, h, {{a51, &k_[0]}, {a52, &k_[1]}, {a53, &k_[2]}, {a54, &k_[3]}}));
            k_[5] = rhs_(t_ + h, axpy(y_, h, {{a61, &k_[0]}, {a62, &k_[1]}, {a63, &k_[2]},
                                              {a64, &k_[3]}, {a65, &k_[4]}}));
            y1 = axpy(y_, h, {{b1, &k_[0]}, {b3, &k_[2]}, {b4, &k_[3]}, {b5, &k_[4]}, {b6, &k_[5]}});
            k_[6] = rhs_(t_ + h, y1);
        } catch (const std::domain_error&) {
            return false;
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] +
                                   e5 * k_[4][i] + e6 * k_[5][i] + e7 * k_[6][i]);
            const double sc = opts_.abs_tol + opts_.rel_tol * std::max(std::abs(y_[i]), std::abs(y1[i]));
            sum += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(sum / static_cast<double>(N));
        return std::isfinite(err);
    }

    void build_dense(double h, const Vec<N>& y1) {
        for (std::size_t i = 0; i < N; ++i) {
            const double ydiff = y1[i] - y_[i];
            const double bspl = h * k_[0][i] - ydiff;
            cont_[0][i] = y_[i];
            cont_[1][i] = ydiff;
            cont_[2][i] = bspl;
            cont_[3][i] = ydiff - h * k_[6][i] - bspl;
            cont_[4][i] = h * (d1 * k_[0][i] + d3 * k_[2][i] + d4 * k_[3][i] +
                               d5 * k_[4][i] + d6 * k_[5][i] + d7 * k_[6][i]);
        }
        have_dense_ = true;
    }

    /// Hairer-style automatic initial step selection, with a conservative
    /// fallback when the heuristic degenerates.
    double initial_step(double t_limit) {
        const double span = t_limit - t_;
        double d0 = 0.0, d1n = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = opts_.abs_tol + opts_.rel_tol * std::abs(y_[i]);
            d0 += (y_[i] / sc) * (y_[i] / sc);
            d1n += (k_[0][i] / sc) * (k_[0][i] / sc);
        }
        d0 = std::sqrt(d0 / N);
        d1n = std::sqrt(d1n / N);
        double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 * span : 0.01 * (d0 / d1n);
        h0 = std::min(h0, span);
        // probe the second derivative with an explicit Euler step
        try {
            Vec<N> y1 = axpy(y_, h0, {{1.0, &k_[0]}});
            Vec<N> f1 = rhs_(t_ + h0, y1);
            double d2 = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double sc = opts_.abs_tol + opts_.rel_tol * std::abs(y_[i]);
                d2 += ((f1[i] - k_[0][i]) / sc) * ((f1[i] - k_[0][i]) / sc);
            }
            d2 = std::sqrt(d2 / N) / h0;
            const double dmax = std::max(d1n, d2);
            const double h1 = dmax > 1e-15 ? std::pow(0.01 / dmax, 0.2) : std::max(1e-6 * span, h0 * 1e3);
            return std::min({100.0 * h0, h1, span, opts_.max_step});
        } catch (const std::domain_error&) {
            return std::min(1e-8 * span, opts_.max_step);
        }
    }
};

}  // namespace reluct::detail
