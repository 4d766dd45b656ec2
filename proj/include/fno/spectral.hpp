#pragma once

// Exact skeleton integrals of band-limited signals.
//
// A QuasiSpectrum represents f(x) = sum_j x^j sum_i c[j][i] e^{i w0 (lo+i) x},
// with x measured from the start of the sampling grid. Products are
// convolutions; the formal integral divides by i*eta off the zero mode and
// produces x^{j+1}/(j+1) on it, so it is a genuine antiderivative. Skeleton
// integrals of trees are then exact functions of one time variable.

#include <fno/besov.hpp>
#include <fno/fft.hpp>
#include <fno/tree.hpp>

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace fno {

struct QuasiSpectrum {
    int lo = 0;
    std::vector<std::vector<cplx>> poly;  // poly[degree][i], all rows of equal width

    int width() const { return poly.empty() ? 0 : static_cast<int>(poly[0].size()); }
    int degree() const { return static_cast<int>(poly.size()) - 1; }
    bool empty() const { return width() == 0; }

    static QuasiSpectrum constant(cplx c) { return QuasiSpectrum{0, {{c}}}; }
    static QuasiSpectrum from_band(const BandSignal& b) { return QuasiSpectrum{b.lo, {b.spec}}; }

    // Coefficient of x^j e^{i w0 m x}.
    cplx coeff(int j, int m) const {
        if (j < 0 || j > degree() || m < lo || m >= lo + width()) return {};
        return poly[j][m - lo];
    }
};

inline QuasiSpectrum multiply(const QuasiSpectrum& a, const QuasiSpectrum& b) {
    if (a.empty() || b.empty()) return {};
    QuasiSpectrum out;
    out.lo = a.lo + b.lo;
    const int w = a.width() + b.width() - 1;
    out.poly.assign(a.poly.size() + b.poly.size() - 1, std::vector<cplx>(w));
    for (std::size_t i = 0; i < a.poly.size(); ++i)
        for (std::size_t j = 0; j < b.poly.size(); ++j) {
            auto c = convolve(a.poly[i], b.poly[j]);
            auto& row = out.poly[i + j];
            for (int q = 0; q < w; ++q) row[q] += c[q];
        }
    return out;
}

// Derivative of a band: coefficients i w0 m c_m.
inline QuasiSpectrum derivative_band(const BandSignal& b, double w0) {
    QuasiSpectrum q{b.lo, {b.spec}};
    for (int i = 0; i < q.width(); ++i) q.poly[0][i] *= cplx(0, w0 * (b.lo + i));
    return q;
}

// Antiderivative A with A' = f.
//   m != 0: int x^j e^{i eta x} = e^{i eta x} sum_{p<=j} (-1)^{j-p} j!/p! x^p / (i eta)^{j-p+1}
//   m == 0: x^{j+1}/(j+1)
inline QuasiSpectrum antiderivative(const QuasiSpectrum& f, double w0) {
    if (f.empty()) return {};
    const int deg = f.degree();
    const int w = f.width();
    const bool has_zero = f.lo <= 0 && 0 < f.lo + w;
    QuasiSpectrum out;
    out.lo = f.lo;
    out.poly.assign(deg + (has_zero ? 2 : 1), std::vector<cplx>(w));
    for (int i = 0; i < w; ++i) {
        const int m = f.lo + i;
        if (m == 0) {
            for (int j = 0; j <= deg; ++j) out.poly[j + 1][i] += f.poly[j][i] / static_cast<double>(j + 1);
            continue;
        }
        const cplx ie(0, w0 * m);
        for (int j = 0; j <= deg; ++j) {
            const cplx c = f.poly[j][i];
            if (c == cplx{}) continue;
            // term for p = j down to 0
            cplx factor = 1.0 / ie;  // (-1)^{j-p} j!/p! / (i eta)^{j-p+1}
            for (int p = j; p >= 0; --p) {
                out.poly[p][i] += c * factor;
                factor *= -static_cast<double>(p) / ie;
            }
        }
    }
    // Drop an all-zero top degree.
    while (out.poly.size() > 1) {
        bool zero = true;
        for (auto& v : out.poly.back())
            if (v != cplx{}) {
                zero = false;
                break;
            }
        if (!zero) break;
        out.poly.pop_back();
    }
    return out;
}

// Evaluates quasi-spectra at fine-grid indices using a root-of-unity table.
class GridEvaluator {
public:
    GridEvaluator(int M, double dt, std::vector<int> indices) : M_(M), dt_(dt), idx_(std::move(indices)) {
        roots_.resize(M);
        for (int q = 0; q < M; ++q) roots_[q] = std::polar(1.0, 2 * M_PI * q / M);
    }

    const std::vector<int>& indices() const { return idx_; }
    int size() const { return static_cast<int>(idx_.size()); }

    std::vector<cplx> operator()(const QuasiSpectrum& f) const {
        std::vector<cplx> out(idx_.size());
        if (f.empty()) return out;
        for (std::size_t g = 0; g < idx_.size(); ++g) {
            const long long n = idx_[g];
            const double x = dt_ * static_cast<double>(n);
            cplx acc{};
            double xp = 1.0;
            for (int j = 0; j <= f.degree(); ++j, xp *= x) {
                cplx s{};
                long long ph = ((static_cast<long long>(f.lo) * n) % M_ + M_) % M_;
                const auto& row = f.poly[j];
                for (int i = 0; i < f.width(); ++i) {
                    s += row[i] * roots_[ph];
                    ph += n;
                    if (ph >= M_) ph %= M_;
                }
                acc += s * xp;
            }
            out[g] = acc;
        }
        return out;
    }

private:
    int M_;
    double dt_;
    std::vector<int> idx_;
    std::vector<cplx> roots_;
};

// Source of per-vertex band spectra: (channel, block key) -> band.
struct BandKey {
    int k = 0;   // block index entering the membership tests
    int kt = 0;  // sharp block index (equals k unless a composite split is used)
    bool operator<(const BandKey& o) const { return k != o.k ? k < o.k : kt < o.kt; }
    bool operator==(const BandKey& o) const { return k == o.k && kt == o.kt; }
};

class BandTable {
public:
    BandTable() = default;

    // Single partition (sharp or smooth): key.kt is ignored.
    explicit BandTable(const BandDecomposition& d) : grid_(d.grid), kmax_(d.kmax), composite_(false) {
        bands_.resize(d.bands.size());
        for (std::size_t c = 0; c < d.bands.size(); ++c)
            for (int k = -d.kmax; k <= d.kmax; ++k) bands_[c][{k, k}] = d.band(static_cast<int>(c), k);
    }

    // Composite split: smooth phi_k times sharp phi~_kt, for every pair that overlaps.
    BandTable(const std::vector<Spectrum>& spectra, const DyadicPartition& smooth, const DyadicPartition& sharp)
        : kmax_(sharp.kmax()), composite_(true) {
        if (spectra.empty()) throw std::invalid_argument("BandTable: no channels");
        grid_ = spectra[0].grid;
        bands_.resize(spectra.size());
        for (std::size_t c = 0; c < spectra.size(); ++c)
            for (int kt = -kmax_; kt <= kmax_; ++kt)
                for (int k : composite_partners(kt)) {
                    auto [lo, hi] = sharp.index_range(kt, grid_);
                    auto w = [&](double xi) { return smooth.weight(k, xi) * sharp.weight(kt, xi); };
                    bands_[c][{k, kt}] = apply_multiplier(spectra[c], lo, hi, w, k);
                }
    }

    // Smooth blocks that can overlap sharp block kt.
    static std::vector<int> composite_partners(int kt) {
        if (kt == 0) return {0};
        return kt > 0 ? std::vector<int>{kt - 1, kt} : std::vector<int>{kt, kt + 1};
    }

    const BandSignal& get(int channel, BandKey key) const {
        if (!composite_) key.kt = key.k;
        static const BandSignal empty_band;
        auto& m = bands_.at(channel);
        auto it = m.find(key);
        return it == m.end() ? empty_band : it->second;
    }

    const FrequencyGrid& grid() const { return grid_; }
    int kmax() const { return kmax_; }
    bool composite() const { return composite_; }
    int channels() const { return static_cast<int>(bands_.size()); }

private:
    FrequencyGrid grid_;
    int kmax_ = 0;
    bool composite_ = false;
    std::vector<std::map<BandKey, BandSignal>> bands_;
};

using BandAssignment = std::map<int, BandKey>;  // vertex id -> block

// Vertex rule: S_v = A[b_v' * c] + b_v(0) * [c]_{x^0, m=0}, where c is the
// product of the children's skeletons. The second term is the quotient
// convention for a vanishing frequency sum.
inline QuasiSpectrum vertex_rule(const BandSignal& b, const QuasiSpectrum& c, double w0) {
    if (b.empty() || c.empty()) return {};
    QuasiSpectrum out = antiderivative(multiply(derivative_band(b, w0), c), w0);
    cplx g0 = b.lo <= 0 && 0 <= b.hi() ? b.spec[-b.lo] : cplx{};
    cplx c0 = c.coeff(0, 0);
    if (g0 == cplx{} || c0 == cplx{}) return out;
    if (out.empty()) out = QuasiSpectrum::constant(0.0);
    if (0 < out.lo || 0 >= out.lo + out.width()) {
        int nlo = std::min(out.lo, 0), nhi = std::max(out.lo + out.width() - 1, 0);
        QuasiSpectrum w{nlo, std::vector<std::vector<cplx>>(out.poly.size(), std::vector<cplx>(nhi - nlo + 1))};
        for (std::size_t j = 0; j < out.poly.size(); ++j)
            for (int i = 0; i < out.width(); ++i) w.poly[j][out.lo - nlo + i] = out.poly[j][i];
        out = std::move(w);
    }
    out.poly[0][-out.lo] += g0 * c0;
    return out;
}

// Skeleton spectrum of the subtree rooted at v.
inline QuasiSpectrum skeleton_subtree(const DecoratedForest& t, int v, const BandAssignment& k, const BandTable& bt) {
    QuasiSpectrum c = QuasiSpectrum::constant(1.0);
    for (int ch : t.children(v)) {
        c = multiply(c, skeleton_subtree(t, ch, k, bt));
        if (c.empty()) return {};
    }
    return vertex_rule(bt.get(t.label(v) - 1, k.at(v)), c, bt.grid().omega0());
}

// Skeleton spectrum of a forest: product over components.
inline QuasiSpectrum skeleton_spectrum(const DecoratedForest& f, const BandAssignment& k, const BandTable& bt) {
    QuasiSpectrum out = QuasiSpectrum::constant(1.0);
    for (int r : f.roots()) {
        out = multiply(out, skeleton_subtree(f, r, k, bt));
        if (out.empty()) return {};
    }
    return out;
}

// Recursive evaluator at the given fine-grid indices.
inline std::vector<cplx> skeleton_eval_recursive(const DecoratedForest& f, const BandAssignment& k, const BandTable& bt,
                                                 const GridEvaluator& ev) {
    return ev(skeleton_spectrum(f, k, bt));
}

// Direct multi-frequency sum over all mode combinations in the chosen blocks;
// cost is the product of the block widths. Vertex factor
// eta_v / (eta_v + sum_{w above v} eta_w) * c_v(m_v), with 1 when both vanish.
inline std::vector<cplx> skeleton_eval_fourier(const DecoratedForest& f, const BandAssignment& k, const BandTable& bt,
                                               const std::vector<int>& indices) {
    const auto ids = f.ids();
    const int n = static_cast<int>(ids.size());
    std::vector<const BandSignal*> bands;
    for (int v : ids) bands.push_back(&bt.get(f.label(v) - 1, k.at(v)));
    std::vector<cplx> out(indices.size());
    for (auto* b : bands)
        if (b->empty()) return out;
    // above[i]: positions of vertices strictly above ids[i]
    std::vector<std::vector<int>> above(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (f.connects_to(ids[j], ids[i])) above[i].push_back(j);
    const int M = bt.grid().M;
    std::vector<int> pos(n, 0), m(n);
    while (true) {
        for (int i = 0; i < n; ++i) m[i] = bands[i]->lo + pos[i];
        cplx val = 1.0;
        bool singular = false;
        for (int i = 0; i < n && val != cplx{}; ++i) {
            long long sum = m[i];
            for (int j : above[i]) sum += m[j];
            cplx c = bands[i]->spec[pos[i]];
            if (sum == 0) {
                if (m[i] == 0)
                    val *= c;
                else
                    singular = true;
            } else {
                val *= c * (static_cast<double>(m[i]) / static_cast<double>(sum));
            }
        }
        if (singular && val != cplx{})
            throw std::domain_error("skeleton_eval_fourier: vanishing frequency sum with nonzero vertex frequency");
        if (val != cplx{}) {
            long long total = 0;
            for (int i = 0; i < n; ++i) total += m[i];
            for (std::size_t g = 0; g < indices.size(); ++g) {
                long long ph = ((total * indices[g]) % M + M) % M;
                out[g] += val * std::polar(1.0, 2 * M_PI * static_cast<double>(ph) / M);
            }
        }
        int i = 0;
        while (i < n && ++pos[i] == static_cast<int>(bands[i]->spec.size())) pos[i++] = 0;
        if (i == n) break;
    }
    return out;
}

// Formal integral of a band-limited zero-mean signal: spectral division by i*xi.
inline BandSignal formal_integral(const BandSignal& f, const FrequencyGrid& g, double tol = 1e-10) {
    BandSignal out = f;
    for (int i = 0; i < static_cast<int>(f.spec.size()); ++i) {
        int m = f.lo + i;
        if (m == 0) {
            if (std::abs(f.spec[i]) > tol) throw std::invalid_argument("formal_integral: nonzero mean");
            out.spec[i] = 0;
        } else {
            out.spec[i] = f.spec[i] / cplx(0, g.xi(m));
        }
    }
    out.samples = synthesize(g.M, out.lo, out.spec);
    return out;
}

}  // namespace fno
