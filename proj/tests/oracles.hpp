// SPDX-License-Identifier: Apache-2.0
//
// beamsteer: beam-steering MIMO WiFi backscatter simulator
// Copyright (C) 2026 The beamsteer authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's math; each routine takes a different algebraic route
// than the code it checks.

#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

inline double deg(double d) {
    return d * pi / 180.0;
}

// |sum_{k<N} e^{jk psi}|^2 via the Dirichlet kernel sin^2(N psi/2) / sin^2(psi/2).
inline double dirichlet_power(int n, double psi) {
    const double den = std::sin(psi / 2.0);
    if (std::abs(den) < 1e-12) {
        return static_cast<double>(n) * n;
    }
    const double num = std::sin(n * psi / 2.0);
    return (num * num) / (den * den);
}

// Real/imaginary accumulation of the reflective array factor, term by term.
struct ReIm {
    double re = 0.0;
    double im = 0.0;
    double abs() const { return std::hypot(re, im); }
};

inline ReIm direct_array_factor(int n, double d_over_lambda, double delta, double theta_in,
                                double theta) {
    ReIm out;
    for (int k = 0; k < n; ++k) {
        const double phase =
            k * delta - 2.0 * pi * d_over_lambda * k * (std::sin(theta) + std::sin(theta_in));
        out.re += std::cos(phase);
        out.im += std::sin(phase);
    }
    return out;
}

// Argmax of the reflective pattern over a uniform grid in degrees.
inline double brute_peak_deg(int n, double d_over_lambda, double delta, double theta_in,
                             double step_deg) {
    double best = -1.0;
    double best_deg = 0.0;
    const int count = static_cast<int>(std::lround(180.0 / step_deg));
    for (int i = 0; i <= count; ++i) {
        const double t = -90.0 + i * step_deg;
        const double psi =
            delta - 2.0 * pi * d_over_lambda * (std::sin(deg(t)) + std::sin(theta_in));
        const double p = dirichlet_power(n, psi);
        if (p > best + 1e-12) {
            best = p;
            best_deg = t;
        }
    }
    return best_deg;
}

// Smallest angular distance on the circle, by explicit enumeration of 2*pi shifts.
inline double circ_dist(double a, double b) {
    double best = 1e300;
    const int turns = static_cast<int>(std::abs(a - b) / (2.0 * pi)) + 2;
    for (int m = -turns; m <= turns; ++m) {
        best = std::min(best, std::abs(a - b + 2.0 * pi * m));
    }
    return best;
}

// Tap index nearest to delta by enumerating all K taps; ties to the lower index.
inline int nearest_tap(double delta, int k) {
    int best = 0;
    double best_d = 1e300;
    for (int m = 0; m < k; ++m) {
        const double d = circ_dist(delta, 2.0 * pi * m / k);
        if (d < best_d - 1e-9) {
            best_d = d;
            best = m;
        }
    }
    return best;
}

} // namespace oracle
