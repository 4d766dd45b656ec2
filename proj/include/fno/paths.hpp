#pragma once

// Synthetic test paths on t in [0, 2 pi), so grid frequencies are integers.
// Random phases come straight from mt19937_64 bits, which keeps the output
// identical across standard libraries.

#include <fno/besov.hpp>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace fno {

enum class PathKind { Weierstrass, BandNoise, SmoothPoly };

inline PathKind parse_path_kind(const std::string& s) {
    if (s == "weierstrass") return PathKind::Weierstrass;
    if (s == "bandnoise") return PathKind::BandNoise;
    if (s == "smoothpoly") return PathKind::SmoothPoly;
    throw std::invalid_argument("unknown path kind: " + s);
}

namespace detail {
inline double unit_uniform(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }
}  // namespace detail

// Highest Weierstrass octave used at grid size M: 2^J = M/4.
inline int weierstrass_top(int M) {
    int j = 0;
    while ((4 << j) < M) ++j;
    return j;
}

inline SampledPath gen_path(PathKind kind, double alpha, std::uint64_t seed, int M, int d) {
    if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (!is_pow2(M) || M < 16) throw std::invalid_argument("grid size must be a power of two >= 16");
    if (d < 1) throw std::invalid_argument("dimension must be positive");
    std::mt19937_64 rng(seed);
    SampledPath p;
    p.t0 = 0.0;
    p.dt = 2 * M_PI / M;
    p.channels.assign(d, std::vector<double>(M, 0.0));
    for (int c = 0; c < d; ++c) {
        auto& x = p.channels[c];
        switch (kind) {
            case PathKind::Weierstrass: {
                const int J = weierstrass_top(M);
                for (int j = 0; j <= J; ++j) {
                    const double amp = std::pow(2.0, -alpha * j);
                    const double theta = 2 * M_PI * detail::unit_uniform(rng);
                    const long long f = 1LL << j;
                    for (int n = 0; n < M; ++n) x[n] += amp * std::cos(f * p.time(n) + theta);
                }
                break;
            }
            case PathKind::BandNoise: {
                // Random-phase series with |c_m| ~ m^{-(alpha + 1/2)} up to M/4.
                for (int m = 1; m <= M / 4; ++m) {
                    const double theta = 2 * M_PI * detail::unit_uniform(rng);
                    const double amp = std::pow(static_cast<double>(m), -(alpha + 0.5));
                    for (int n = 0; n < M; ++n) x[n] += amp * std::cos(m * p.time(n) + theta);
                }
                break;
            }
            case PathKind::SmoothPoly: {
                double a[4];
                for (double& v : a) v = 2 * detail::unit_uniform(rng) - 1;
                for (int n = 0; n < M; ++n) {
                    const double u = p.time(n) / (2 * M_PI);
                    x[n] = a[0] + u * (a[1] + u * (a[2] + u * a[3]));
                }
                break;
            }
        }
    }
    return p;
}

}  // namespace fno
