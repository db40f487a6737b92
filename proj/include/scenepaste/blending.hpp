// Copyright 2026 The scenepaste Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "scenepaste/error.hpp"
#include "scenepaste/instance_bank.hpp"
#include "scenepaste/raster.hpp"

namespace scenepaste {

enum class BlendMode { plain, gaussian, poisson };

struct BlendConfig {
    BlendMode mode = BlendMode::poisson;
    double feather_sigma = 2.0;   // gaussian mode only
    double poisson_tol = 1e-4;    // max-norm residual stop threshold
    int poisson_max_iters = 10000;
};

// Separable Gaussian blur of an alpha raster, kernel radius ceil(3*sigma),
// clamp-to-edge. Symmetric taps are paired before accumulation so the blur
// commutes bit-exactly with horizontal flips.
inline Raster<double> feather_alpha(const Raster<double>& alpha, double sigma) {
    if (alpha.channels() != 1)
        throw std::domain_error("feather_alpha: expected single-channel raster");
    if (sigma < 0.0)
        throw std::domain_error("feather_alpha: sigma must be non-negative");
    if (sigma == 0.0)
        return alpha;

    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> weights(static_cast<std::size_t>(radius) + 1);
    double norm = 0.0;
    for (int k = 0; k <= radius; ++k) {
        weights[static_cast<std::size_t>(k)] =
            std::exp(-0.5 * (static_cast<double>(k) * k) / (sigma * sigma));
        norm += (k == 0 ? 1.0 : 2.0) * weights[static_cast<std::size_t>(k)];
    }
    for (double& w : weights)
        w /= norm;

    const int w = alpha.width(), h = alpha.height();
    auto clampi = [](int v, int n) { return std::clamp(v, 0, n - 1); };

    Raster<double> horiz(w, h, 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = weights[0] * alpha.at(x, y);
            for (int k = 1; k <= radius; ++k)
                acc += weights[static_cast<std::size_t>(k)] *
                       (alpha.at(clampi(x - k, w), y) + alpha.at(clampi(x + k, w), y));
            horiz.at(x, y) = acc;
        }
    }
    Raster<double> out(w, h, 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = weights[0] * horiz.at(x, y);
            for (int k = 1; k <= radius; ++k)
                acc += weights[static_cast<std::size_t>(k)] *
                       (horiz.at(x, clampi(y - k, h)) + horiz.at(x, clampi(y + k, h)));
            out.at(x, y) = acc;
        }
    }
    return out;
}

inline Raster<double> cutout_alpha(const InstanceCutout& cutout) {
    Raster<double> alpha(cutout.width(), cutout.height(), 1);
    for (int y = 0; y < cutout.height(); ++y)
        for (int x = 0; x < cutout.width(); ++x)
            alpha.at(x, y) = cutout.pixels.at(x, y, 3);
    return alpha;
}

inline void check_paste_bounds(const ImageD& background, const InstanceCutout& cutout,
                               PixelPoint top_left, int margin) {
    if (top_left.x < margin || top_left.y < margin ||
        top_left.x + cutout.width() > background.width() - margin ||
        top_left.y + cutout.height() > background.height() - margin)
        throw std::domain_error("paste exceeds image bounds");
}

// out = alpha * src + (1 - alpha) * dst, per channel. Optional alpha
// override substitutes a feathered channel for the cutout's own.
inline void alpha_composite_into(ImageD& background, const InstanceCutout& cutout,
                                 PixelPoint top_left,
                                 const Raster<double>* alpha_override = nullptr) {
    check_paste_bounds(background, cutout, top_left, 0);
    for (int y = 0; y < cutout.height(); ++y) {
        for (int x = 0; x < cutout.width(); ++x) {
            const double a =
                alpha_override ? alpha_override->at(x, y) : cutout.pixels.at(x, y, 3);
            if (a <= 0.0)
                continue;
            for (int c = 0; c < 3; ++c) {
                double& dst = background.at(top_left.x + x, top_left.y + y, c);
                dst = clamp01(a * cutout.pixels.at(x, y, c) + (1.0 - a) * dst);
            }
        }
    }
}

inline ImageD alpha_composite(const ImageD& background, const InstanceCutout& cutout,
                              PixelPoint top_left,
                              const Raster<double>* alpha_override = nullptr) {
    ImageD out = background;
    alpha_composite_into(out, cutout, top_left, alpha_override);
    return out;
}

// One discrete Poisson problem on a small grid. Interior cells carry
// unknowns and a divergence right-hand side; every non-interior cell that
// touches an interior cell must carry a Dirichlet value.
struct PoissonSystem {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> interior;
    std::vector<double> rhs;
    std::vector<double> boundary;
    std::vector<std::uint8_t> has_boundary;

    std::size_t cell(int x, int y) const {
        return static_cast<std::size_t>(y) * width + x;
    }
};

struct PoissonSolution {
    std::vector<double> values;  // full grid; meaningful on interior cells
    int iterations = 0;
    double initial_residual = 0.0;
    double final_residual = 0.0;  // max-norm
    bool converged = false;
};

// Matrix-free conjugate gradient on the 5-point Laplacian, Dirichlet data
// folded into the right-hand side. Stops at max-norm residual <= tol.
inline PoissonSolution solve_poisson_system(const PoissonSystem& sys, double tol,
                                            int max_iters) {
    if (tol <= 0.0 || max_iters < 1)
        throw std::domain_error("solve_poisson_system: bad tolerance or iteration cap");

    const int w = sys.width, h = sys.height;
    std::vector<std::int32_t> unknown_of(static_cast<std::size_t>(w) * h, -1);
    std::vector<std::size_t> cells;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (sys.interior[sys.cell(x, y)]) {
                unknown_of[sys.cell(x, y)] = static_cast<std::int32_t>(cells.size());
                cells.push_back(sys.cell(x, y));
            }
    const std::size_t n = cells.size();
    if (n == 0)
        throw Error("solve_poisson_system: empty region");

    constexpr int dx[4] = {1, -1, 0, 0};
    constexpr int dy[4] = {0, 0, 1, -1};

    // Structural pass: fold boundary values into b, reject holes.
    std::vector<double> b(n);
    std::vector<std::array<std::int32_t, 4>> nbr(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int x = static_cast<int>(cells[i] % static_cast<std::size_t>(w));
        const int y = static_cast<int>(cells[i] / static_cast<std::size_t>(w));
        double bi = sys.rhs[cells[i]];
        for (int k = 0; k < 4; ++k) {
            const int qx = x + dx[k], qy = y + dy[k];
            std::int32_t qi = -1;
            if (qx >= 0 && qx < w && qy >= 0 && qy < h) {
                const std::size_t qc = sys.cell(qx, qy);
                qi = unknown_of[qc];
                if (qi < 0) {
                    if (!sys.has_boundary[qc])
                        throw Error("solve_poisson_system: interior cell (" +
                                    std::to_string(x) + "," + std::to_string(y) +
                                    ") has neighbor without boundary value");
                    bi += sys.boundary[qc];
                }
            } else {
                throw Error("solve_poisson_system: region touches the grid edge at (" +
                            std::to_string(x) + "," + std::to_string(y) + ")");
            }
            nbr[i][static_cast<std::size_t>(k)] = qi;
        }
        b[i] = bi;
    }

    auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 4.0 * v[i];
            for (int k = 0; k < 4; ++k) {
                const std::int32_t qi = nbr[i][static_cast<std::size_t>(k)];
                if (qi >= 0)
                    acc -= v[static_cast<std::size_t>(qi)];
            }
            out[i] = acc;
        }
    };
    auto dot = [n](const std::vector<double>& a, const std::vector<double>& c) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += a[i] * c[i];
        return s;
    };
    auto max_abs = [n](const std::vector<double>& v) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            m = std::max(m, std::abs(v[i]));
        return m;
    };

    std::vector<double> x(n, 0.0), r = b, p = b, ap(n);
    double rr = dot(r, r);
    double res = max_abs(r);

    PoissonSolution sol;
    sol.initial_residual = res;
    int iter = 0;
    while (res > tol && iter < max_iters) {
        apply(p, ap);
        const double pap = dot(p, ap);
        if (pap <= 0.0)
            break;  // p vanished; r is numerically zero
        const double alpha = rr / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i)
            p[i] = r[i] + beta * p[i];
        res = max_abs(r);
        ++iter;
    }

    sol.values.assign(static_cast<std::size_t>(w) * h, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        sol.values[cells[i]] = x[i];
    sol.iterations = iter;
    sol.final_residual = res;
    sol.converged = res <= tol;
    return sol;
}

struct ChannelSolveStats {
    int iterations = 0;
    double final_residual = 0.0;
    bool converged = true;
};

struct BlendOutcome {
    std::array<ChannelSolveStats, 3> channels{};

    bool converged() const {
        return channels[0].converged && channels[1].converged && channels[2].converged;
    }
    double max_residual() const {
        double m = 0.0;
        for (const auto& c : channels)
            m = std::max(m, c.final_residual);
        return m;
    }
};

// Seamless cloning over the opaque region (alpha >= 0.5): per channel, the
// Laplacian of the unknown matches the divergence of the cutout's gradient
// field, with Dirichlet values taken from the background around the region.
// Fractional alpha plays no role here; the solve replaces compositing.
inline BlendOutcome poisson_blend_into(ImageD& background, const InstanceCutout& cutout,
                                       PixelPoint top_left, const BlendConfig& cfg) {
    check_paste_bounds(background, cutout, top_left, 1);

    const int cw = cutout.width(), ch = cutout.height();
    // Local grid with a one-cell boundary ring around the cutout box.
    const int gw = cw + 2, gh = ch + 2;
    PoissonSystem sys;
    sys.width = gw;
    sys.height = gh;
    sys.interior.assign(static_cast<std::size_t>(gw) * gh, 0);
    sys.rhs.assign(static_cast<std::size_t>(gw) * gh, 0.0);
    sys.boundary.assign(static_cast<std::size_t>(gw) * gh, 0.0);
    sys.has_boundary.assign(static_cast<std::size_t>(gw) * gh, 0);

    std::int64_t region_size = 0;
    for (int y = 0; y < ch; ++y)
        for (int x = 0; x < cw; ++x)
            if (cutout.pixels.at(x, y, 3) >= 0.5) {
                sys.interior[sys.cell(x + 1, y + 1)] = 1;
                ++region_size;
            }
    if (region_size == 0)
        throw std::domain_error("poisson_blend: no opaque region at alpha >= 0.5");

    auto src = [&](int x, int y, int c) {
        // Clamp-to-edge source lookups keep the guidance field defined on
        // region cells that sit on the cutout border.
        return cutout.pixels.at(std::clamp(x, 0, cw - 1), std::clamp(y, 0, ch - 1), c);
    };

    BlendOutcome outcome;
    constexpr int dx[4] = {1, -1, 0, 0};
    constexpr int dy[4] = {0, 0, 1, -1};

    for (int c = 0; c < 3; ++c) {
        for (int gy = 0; gy < gh; ++gy) {
            for (int gx = 0; gx < gw; ++gx) {
                const std::size_t cell = sys.cell(gx, gy);
                if (sys.interior[cell]) {
                    const int x = gx - 1, y = gy - 1;
                    double div = 0.0;
                    for (int k = 0; k < 4; ++k)
                        div += src(x, y, c) - src(x + dx[k], y + dy[k], c);
                    sys.rhs[cell] = div;
                } else {
                    sys.boundary[cell] =
                        background.at(top_left.x + gx - 1, top_left.y + gy - 1, c);
                    sys.has_boundary[cell] = 1;
                }
            }
        }
        PoissonSolution sol = solve_poisson_system(sys, cfg.poisson_tol, cfg.poisson_max_iters);
        outcome.channels[static_cast<std::size_t>(c)] = ChannelSolveStats{
            sol.iterations, sol.final_residual, sol.converged};
        for (int y = 0; y < ch; ++y)
            for (int x = 0; x < cw; ++x)
                if (sys.interior[sys.cell(x + 1, y + 1)])
                    background.at(top_left.x + x, top_left.y + y, c) =
                        clamp01(sol.values[sys.cell(x + 1, y + 1)]);
    }
    return outcome;
}

inline ImageD poisson_blend(const ImageD& background, const InstanceCutout& cutout,
                            PixelPoint top_left, const BlendConfig& cfg,
                            BlendOutcome* outcome = nullptr) {
    ImageD out = background;
    BlendOutcome oc = poisson_blend_into(out, cutout, top_left, cfg);
    if (outcome)
        *outcome = oc;
    return out;
}

inline BlendMode parse_blend_mode(const std::string& text) {
    if (text == "plain") return BlendMode::plain;
    if (text == "gaussian") return BlendMode::gaussian;
    if (text == "poisson") return BlendMode::poisson;
    throw ConfigError("unknown blend_mode `" + text + "` (valid: plain, gaussian, poisson)");
}

inline const char* blend_mode_name(BlendMode mode) {
    switch (mode) {
        case BlendMode::plain: return "plain";
        case BlendMode::gaussian: return "gaussian";
        default: return "poisson";
    }
}

}  // namespace scenepaste
