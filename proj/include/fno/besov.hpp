#pragma once

// Littlewood-Paley machinery on uniformly sampled, windowed paths.
//
// Frequency convention: a channel x_n (n = 0..M-1, t_n = t0 + n dt, L = M dt)
// has discrete spectrum c_m = (1/M) sum_n x_n e^{-2 pi i m n / M} for
// m in [-M/2, M/2]; the Nyquist coefficient is split evenly between +-M/2 so
// that the trigonometric interpolant is real. Angular frequency xi_m = m * 2pi/L.

#include <fno/fft.hpp>
#include <fno/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fno {

struct SampledPath {
    double t0 = 0.0;
    double dt = 1.0;
    Channels channels;  // channels[c][n]

    int size() const { return channels.empty() ? 0 : static_cast<int>(channels[0].size()); }
    int dim() const { return static_cast<int>(channels.size()); }
    double length() const { return dt * size(); }
    double time(int n) const { return t0 + dt * n; }
};

inline bool is_pow2(long long n) { return n > 0 && (n & (n - 1)) == 0; }

// CSV with a header row "t,x1,...,xd" and uniformly spaced t.
inline SampledPath read_path_csv(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("cannot open input file: " + file);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty CSV: " + file);
    int cols = 1 + static_cast<int>(std::count(line.begin(), line.end(), ','));
    if (cols < 2) throw std::invalid_argument("CSV needs columns t,x1..xd: " + file);
    std::vector<double> ts;
    Channels ch(cols - 1);
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::invalid_argument("bad number in " + file + " row " + std::to_string(row));
            }
        }
        if (static_cast<int>(vals.size()) != cols)
            throw std::invalid_argument("wrong column count in " + file + " row " + std::to_string(row));
        ts.push_back(vals[0]);
        for (int c = 1; c < cols; ++c) ch[c - 1].push_back(vals[c]);
    }
    if (ts.size() < 2) throw std::invalid_argument("CSV has fewer than two samples: " + file);
    SampledPath p;
    p.t0 = ts[0];
    p.dt = (ts.back() - ts[0]) / static_cast<double>(ts.size() - 1);
    if (!(p.dt > 0)) throw std::invalid_argument("time column must increase: " + file);
    for (std::size_t i = 1; i < ts.size(); ++i) {
        double step = ts[i] - ts[i - 1];
        if (std::abs(step - p.dt) > 1e-9 * std::max(std::abs(p.dt), std::abs(ts[i])))
            throw std::invalid_argument("non-uniform time grid in " + file + " near row " + std::to_string(i + 2));
    }
    p.channels = std::move(ch);
    return p;
}

inline void write_path_csv(std::ostream& os, const SampledPath& p) {
    os << "t";
    for (int c = 0; c < p.dim(); ++c) os << ",x" << (c + 1);
    os << "\n";
    char buf[64];
    for (int n = 0; n < p.size(); ++n) {
        std::snprintf(buf, sizeof buf, "%.17g", p.time(n));
        os << buf;
        for (int c = 0; c < p.dim(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", p.channels[c][n]);
            os << "," << buf;
        }
        os << "\n";
    }
}

// ---------------------------------------------------------------- window

// Smooth step: 0 for x <= 0, 1 for x >= 1.
inline double smooth_step(double x) {
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

// Cutoff on u = n/M in [0,1): zero within margin/2 of the ends, one on
// [margin, 1 - margin].
inline double window_weight(double u, double margin) {
    const double a = margin / 2;
    if (u <= a || u >= 1 - a) return 0.0;
    if (u >= margin && u <= 1 - margin) return 1.0;
    if (u < margin) return smooth_step((u - a) / (margin - a));
    return smooth_step((1 - a - u) / (margin - a));
}

inline SampledPath window_path(const SampledPath& raw, double margin) {
    if (!(margin > 0 && margin < 0.4)) throw std::invalid_argument("window margin must lie in (0, 0.4)");
    SampledPath out = raw;
    const int m = raw.size();
    for (int n = 0; n < m; ++n) {
        double w = window_weight(static_cast<double>(n) / m, margin);
        for (auto& c : out.channels) c[n] *= w;
    }
    return out;
}

// First and last fine index of the plateau where the window equals one.
inline std::pair<int, int> plateau(int m, double margin) {
    int lo = static_cast<int>(std::ceil(margin * m));
    int hi = static_cast<int>(std::floor((1 - margin) * m));
    return {lo, hi};
}

// ---------------------------------------------------------------- spectra

struct FrequencyGrid {
    int M = 0;
    double L = 1.0;
    double omega0() const { return 2 * M_PI / L; }
    double xi(int m) const { return omega0() * m; }
    int nyquist() const { return M / 2; }
};

// c[m + M/2] for m in [-M/2, M/2].
struct Spectrum {
    FrequencyGrid grid;
    std::vector<cplx> c;
    cplx at(int m) const { return c[static_cast<std::size_t>(m + grid.M / 2)]; }
};

inline Spectrum spectrum_of(const std::vector<double>& x, double length) {
    const int m = static_cast<int>(x.size());
    if (!is_pow2(m) || m < 4) throw std::invalid_argument("sample count must be a power of two >= 4");
    std::vector<cplx> a(x.begin(), x.end());
    fft_forward(a);
    Spectrum s;
    s.grid = {m, length};
    s.c.assign(m + 1, cplx{});
    for (int k = -m / 2 + 1; k < m / 2; ++k) s.c[k + m / 2] = a[(k + m) % m] / static_cast<double>(m);
    cplx ny = a[m / 2] / static_cast<double>(m);
    s.c[0] = 0.5 * ny;
    s.c[m] = 0.5 * ny;
    return s;
}

// Time samples of sum_m spec[i] e^{2 pi i (lo+i) n / M}.
inline std::vector<cplx> synthesize(int M, int lo, const std::vector<cplx>& spec) {
    std::vector<cplx> a(M);
    for (std::size_t i = 0; i < spec.size(); ++i) {
        int m = lo + static_cast<int>(i);
        a[((m % M) + M) % M] += spec[i];
    }
    fft_backward(a);
    return a;
}

// ---------------------------------------------------------------- partitions

enum class PartitionKind { Smooth, Sharp };

// Default bump: 1 on [-1,1], 0 outside [-2,2], smooth ramp in between.
inline double default_bump(double xi) {
    double a = std::abs(xi);
    if (a <= 1) return 1.0;
    if (a >= 2) return 0.0;
    return smooth_step(2 - a);
}

class DyadicPartition {
public:
    using Bump = std::function<double(double)>;

    DyadicPartition(PartitionKind kind, int kmax, Bump bump = default_bump)
        : kind_(kind), kmax_(kmax), bump_(std::move(bump)) {
        if (kmax < 0) throw std::invalid_argument("K_max must be nonnegative");
        if (kind_ == PartitionKind::Smooth) validate_bump();
    }

    PartitionKind kind() const { return kind_; }
    int kmax() const { return kmax_; }

    // phi_k(xi); blocks with |k| > K_max are still defined (no truncation here).
    double weight(int k, double xi) const {
        if (kind_ == PartitionKind::Sharp) return sharp_block(xi) == k ? 1.0 : 0.0;
        if (k == 0) return bump_(xi);
        if ((k > 0) != (xi > 0)) return 0.0;
        double a = std::abs(xi);
        int j = std::abs(k);
        return bump_(std::ldexp(a, -j)) - bump_(std::ldexp(a, 1 - j));
    }

    // Sharp block index of xi: 0 for |xi| < 1, +-k for |xi| in [2^{k-1}, 2^k).
    static int sharp_block(double xi) {
        double a = std::abs(xi);
        if (a < 1) return 0;
        int e;
        std::frexp(a, &e);  // a = f 2^e, f in [0.5,1) so a in [2^{e-1}, 2^e)
        return xi > 0 ? e : -e;
    }

    // Closed frequency interval containing supp phi_k.
    std::pair<double, double> support(int k) const {
        int j = std::abs(k);
        double lo, hi;
        if (kind_ == PartitionKind::Sharp) {
            if (j == 0) return {-1, 1};
            lo = std::ldexp(1.0, j - 1);
            hi = std::ldexp(1.0, j);
        } else {
            if (j == 0) return {-2, 2};
            lo = std::ldexp(1.0, j - 1);
            hi = std::ldexp(1.0, j + 1);
        }
        return k > 0 ? std::make_pair(lo, hi) : std::make_pair(-hi, -lo);
    }

    // Grid index range [lo, hi] (clamped to the grid) that may meet supp phi_k.
    std::pair<int, int> index_range(int k, const FrequencyGrid& g) const {
        auto [a, b] = support(k);
        int lo = static_cast<int>(std::ceil(a / g.omega0() - 1e-9));
        int hi = static_cast<int>(std::floor(b / g.omega0() + 1e-9));
        lo = std::max(lo, -g.M / 2);
        hi = std::min(hi, g.M / 2);
        return {lo, hi};
    }

private:
    void validate_bump() const {
        for (int i = 0; i <= 4000; ++i) {
            double x = -3.0 + 6.0 * i / 4000;
            double v = bump_(x), w = bump_(-x);
            if (std::abs(v - w) > 1e-14) throw std::invalid_argument("bump must be even");
            if (std::abs(x) <= 1 && std::abs(v - 1) > 1e-14) throw std::invalid_argument("bump must equal 1 on [-1,1]");
            if (std::abs(x) >= 2 && v != 0) throw std::invalid_argument("bump must vanish outside [-2,2]");
            if (v < -1e-14 || v > 1 + 1e-14) throw std::invalid_argument("bump must take values in [0,1]");
        }
    }

    PartitionKind kind_;
    int kmax_;
    Bump bump_;
};

// Largest k with 2^{k-1} strictly below the Nyquist frequency.
inline int default_kmax(const FrequencyGrid& g) {
    const double ny = g.xi(g.nyquist());
    int k = 0;
    while (std::ldexp(1.0, k) < ny) ++k;
    return k;
}

// Smallest K_max whose sharp blocks cover every grid frequency, the Nyquist
// pair included. One more than default_kmax.
inline int covering_kmax(const FrequencyGrid& g) { return DyadicPartition::sharp_block(g.xi(g.nyquist())); }

// ---------------------------------------------------------------- bands

// D(m) applied to a channel, restricted to grid indices [lo, lo + spec.size()).
struct BandSignal {
    int k = 0;
    int lo = 0;
    std::vector<cplx> spec;
    std::vector<cplx> samples;  // time samples on the fine grid

    int hi() const { return lo + static_cast<int>(spec.size()) - 1; }
    bool empty() const { return spec.empty(); }
};

inline BandSignal apply_multiplier(const Spectrum& s, int lo, int hi, const std::function<double(double)>& m, int k = 0) {
    BandSignal b;
    b.k = k;
    lo = std::max(lo, -s.grid.M / 2);
    hi = std::min(hi, s.grid.M / 2);
    if (lo > hi) return b;
    b.lo = lo;
    b.spec.resize(hi - lo + 1);
    for (int q = lo; q <= hi; ++q) b.spec[q - lo] = m(s.grid.xi(q)) * s.at(q);
    // Trim structural zeros at both ends.
    std::size_t first = 0, last = b.spec.size();
    while (first < last && b.spec[first] == cplx{}) ++first;
    while (last > first && b.spec[last - 1] == cplx{}) --last;
    b.spec = std::vector<cplx>(b.spec.begin() + first, b.spec.begin() + last);
    b.lo += static_cast<int>(first);
    b.samples = synthesize(s.grid.M, b.lo, b.spec);
    return b;
}

// Full-grid multiplier.
inline BandSignal apply_multiplier(const Spectrum& s, const std::function<double(double)>& m) {
    return apply_multiplier(s, -s.grid.M / 2, s.grid.M / 2, m);
}

struct BandDecomposition {
    PartitionKind kind = PartitionKind::Sharp;
    int kmax = 0;
    FrequencyGrid grid;
    std::vector<Spectrum> spectra;                // per channel
    std::vector<std::vector<BandSignal>> bands;   // bands[c][k + kmax]
    std::vector<double> tail_energy;              // relative L2 energy outside |k| <= kmax

    const BandSignal& band(int channel, int k) const { return bands.at(channel).at(k + kmax); }
};

inline BandDecomposition decompose(const SampledPath& p, const DyadicPartition& part) {
    BandDecomposition d;
    d.kind = part.kind();
    d.kmax = part.kmax();
    d.grid = {p.size(), p.length()};
    for (int c = 0; c < p.dim(); ++c) {
        Spectrum s = spectrum_of(p.channels[c], p.length());
        std::vector<BandSignal> bs;
        std::vector<double> covered(s.c.size(), 0.0);
        for (int k = -d.kmax; k <= d.kmax; ++k) {
            auto [lo, hi] = part.index_range(k, d.grid);
            auto w = [&](double xi) { return part.weight(k, xi); };
            bs.push_back(apply_multiplier(s, lo, hi, w, k));
            for (int q = lo; q <= hi; ++q) covered[q + d.grid.M / 2] += part.weight(k, d.grid.xi(q));
        }
        double tail = 0, total = 0;
        for (std::size_t i = 0; i < s.c.size(); ++i) {
            total += std::norm(s.c[i]);
            tail += std::norm((1.0 - covered[i]) * s.c[i]);
        }
        d.tail_energy.push_back(total > 0 ? tail / total : 0.0);
        d.spectra.push_back(std::move(s));
        d.bands.push_back(std::move(bs));
    }
    return d;
}

// sup_k 2^{alpha |k|} ||D(phi_k) f||_inf over |k| <= K_max.
inline double besov_norm(const std::vector<double>& f, double length, double alpha, const DyadicPartition& part) {
    if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("besov_norm: alpha must lie in (0,1)");
    SampledPath p;
    p.dt = length / static_cast<double>(f.size());
    p.channels = {f};
    auto d = decompose(p, part);
    double best = 0;
    for (int k = -d.kmax; k <= d.kmax; ++k) {
        double mx = 0;
        for (auto& v : d.band(0, k).samples) mx = std::max(mx, std::abs(v));
        best = std::max(best, mx * std::pow(2.0, alpha * std::abs(k)));
    }
    return best;
}

// Per-block sup norms ||D(phi_k) f||_inf for k = -K..K.
inline std::vector<double> band_sup_norms(const BandDecomposition& d, int channel) {
    std::vector<double> out;
    for (int k = -d.kmax; k <= d.kmax; ++k) {
        double mx = 0;
        for (auto& v : d.band(channel, k).samples) mx = std::max(mx, std::abs(v));
        out.push_back(mx);
    }
    return out;
}

// ---------------------------------------------------------------- S^0 diagnostic

enum class S0Weight {
    Inhomogeneous,  // (1 + |xi|)^j
    Homogeneous     // |xi|^j, exactly dilation invariant
};

// sup_{j <= l+5} sup_xi |w_j(xi) m^{(j)}(xi)| with derivatives by repeated
// central differences of step h on [a, b].
inline double s0_seminorm(const std::function<double(double)>& m, int l, double a, double b, double h,
                          S0Weight weight = S0Weight::Inhomogeneous) {
    const int order = l + 5;
    const int n = static_cast<int>(std::floor((b - a) / h)) + 1;
    std::vector<double> x(n + 2 * order), v(n + 2 * order);
    for (int i = 0; i < n + 2 * order; ++i) {
        x[i] = a + (i - order) * h;
        v[i] = m(x[i]);
    }
    double best = 0;
    for (int j = 0; j <= order; ++j) {
        for (int i = j; i < n + 2 * order - j; ++i) {
            if (x[i] < a || x[i] > b) continue;
            double ax = std::abs(x[i]);
            double w = weight == S0Weight::Homogeneous ? std::pow(ax, j) : std::pow(1 + ax, j);
            best = std::max(best, std::abs(w * v[i]));
        }
        // Next derivative: central difference (values shrink by one at each end).
        std::vector<double> nv(v.size(), 0.0);
        for (std::size_t i = 1; i + 1 < v.size(); ++i) nv[i] = (v[i + 1] - v[i - 1]) / (2 * h);
        v.swap(nv);
    }
    return best;
}

}  // namespace fno
