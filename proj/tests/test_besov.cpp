#include <fno/besov.hpp>
#include <fno/paths.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

using namespace fno;

namespace {

SampledPath constant_path(int m, double c) {
    SampledPath p;
    p.dt = 2 * M_PI / m;
    p.channels = {std::vector<double>(m, c)};
    return p;
}

double l2(const std::vector<double>& v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); }

std::string temp_file(const std::string& name, const std::string& body) {
    auto path = ::testing::TempDir() + name;
    std::ofstream(path) << body;
    return path;
}

}  // namespace

TEST(Window, ConstantPathHasPlateauAndZeroFringes) {
    const int m = 1024;
    auto w = window_path(constant_path(m, 2.5), 0.25);
    auto [lo, hi] = plateau(m, 0.25);
    for (int n = 0; n < m; ++n) {
        double u = static_cast<double>(n) / m;
        if (n >= lo && n <= hi) { EXPECT_EQ(w.channels[0][n], 2.5); }
        if (u <= 0.125 || u >= 0.875) { EXPECT_EQ(w.channels[0][n], 0.0); }
    }
}

TEST(Window, SupportInsidePlateauIsUntouched) {
    const int m = 512;
    SampledPath p = constant_path(m, 0.0);
    for (int n = 200; n < 300; ++n) p.channels[0][n] = std::sin(0.1 * n);
    auto w = window_path(p, 0.2);
    EXPECT_EQ(w.channels[0], p.channels[0]);
}

TEST(Window, DerivativeHasNoZeroMode) {
    auto p = window_path(gen_path(PathKind::BandNoise, 0.4, 3, 1024, 1), 0.1);
    const auto& x = p.channels[0];
    double s = 0;
    for (int n = 0; n < p.size(); ++n) s += x[(n + 1) % p.size()] - x[n];
    EXPECT_NEAR(s, 0.0, 1e-12);
}

TEST(Window, RejectsBadMargin) {
    EXPECT_THROW(window_path(constant_path(64, 1), 0.0), std::invalid_argument);
    EXPECT_THROW(window_path(constant_path(64, 1), 0.45), std::invalid_argument);
}

TEST(Partition, SharpBlocks) {
    EXPECT_EQ(DyadicPartition::sharp_block(0.0), 0);
    EXPECT_EQ(DyadicPartition::sharp_block(0.999), 0);
    EXPECT_EQ(DyadicPartition::sharp_block(1.0), 1);
    EXPECT_EQ(DyadicPartition::sharp_block(1.999), 1);
    EXPECT_EQ(DyadicPartition::sharp_block(2.0), 2);
    EXPECT_EQ(DyadicPartition::sharp_block(-7.5), -3);
    EXPECT_EQ(DyadicPartition::sharp_block(8.0), 4);
}

TEST(Partition, SmoothSupports) {
    DyadicPartition part(PartitionKind::Smooth, 10);
    for (int k = 1; k <= 8; ++k) {
        for (int i = 0; i <= 4000; ++i) {
            double xi = 12.0 * std::ldexp(1.0, k) * i / 4000;
            double lo = std::ldexp(1.0, k - 1), hi = 5 * std::ldexp(1.0, k - 1);
            if (xi < lo || xi > hi) {
                EXPECT_EQ(part.weight(k, xi), 0.0) << k << " " << xi;
                EXPECT_EQ(part.weight(-k, -xi), 0.0);
            }
            EXPECT_EQ(part.weight(k, -xi), 0.0);
        }
    }
    for (double xi : {-2.5, 2.0, 3.0}) EXPECT_EQ(part.weight(0, xi), 0.0);
    EXPECT_EQ(part.weight(0, 0.7), 1.0);
}

TEST(Partition, SumsToOne) {
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> u(-1000, 1000);
    for (auto kind : {PartitionKind::Smooth, PartitionKind::Sharp}) {
        DyadicPartition part(kind, 11);
        for (int i = 0; i < 100; ++i) {
            double xi = std::round(u(g));
            double s = 0;
            for (int k = -11; k <= 11; ++k) s += part.weight(k, xi);
            if (kind == PartitionKind::Sharp)
                EXPECT_EQ(s, 1.0) << xi;
            else
                EXPECT_NEAR(s, 1.0, 1e-12) << xi;
        }
    }
}

TEST(Partition, RejectsBadBump) {
    EXPECT_THROW(DyadicPartition(PartitionKind::Smooth, 4, [](double x) { return std::abs(x) < 2.5 ? 1.0 : 0.0; }),
                 std::invalid_argument);
    EXPECT_THROW(DyadicPartition(PartitionKind::Smooth, 4, [](double x) { return x < 0 ? 0.0 : default_bump(x); }),
                 std::invalid_argument);
    EXPECT_THROW(DyadicPartition(PartitionKind::Smooth, 4, [](double x) { return 0.5 * default_bump(x); }),
                 std::invalid_argument);
    EXPECT_NO_THROW(DyadicPartition(PartitionKind::Sharp, 4, [](double) { return 7.0; }));
}

TEST(Partition, DefaultKmaxStopsBelowNyquist) {
    EXPECT_EQ(default_kmax(FrequencyGrid{4096, 2 * M_PI}), 11);
    EXPECT_EQ(default_kmax(FrequencyGrid{256, 2 * M_PI}), 7);
}

TEST(Multiplier, IdentityAndComposition) {
    auto p = gen_path(PathKind::BandNoise, 0.3, 9, 512, 1);
    auto s = spectrum_of(p.channels[0], p.length());
    auto id = apply_multiplier(s, [](double) { return 1.0; });
    for (int n = 0; n < p.size(); ++n) EXPECT_NEAR(id.samples[n].real(), p.channels[0][n], 1e-12);

    auto m1 = [](double xi) { return 1.0 / (1 + xi * xi); };
    auto m2 = [](double xi) { return std::cos(0.01 * xi); };
    auto a = apply_multiplier(s, m1);
    Spectrum sa = s;
    for (int q = -256; q <= 256; ++q) sa.c[q + 256] = a.spec[q - a.lo];
    auto ab = apply_multiplier(sa, m2);
    auto direct = apply_multiplier(s, [&](double xi) { return m1(xi) * m2(xi); });
    for (int n = 0; n < p.size(); ++n) EXPECT_NEAR(std::abs(ab.samples[n] - direct.samples[n]), 0.0, 1e-13);
}

TEST(Multiplier, SharpBlocksAreOrthogonal) {
    auto p = window_path(gen_path(PathKind::BandNoise, 0.3, 4, 1024, 1), 0.1);
    DyadicPartition part(PartitionKind::Sharp, default_kmax(FrequencyGrid{1024, p.length()}));
    auto d = decompose(p, part);
    for (int j = -d.kmax; j <= d.kmax; ++j) {
        // D(phi_j) D(phi_k) = 0: reapplying block k to band j leaves nothing.
        Spectrum sj = d.spectra[0];
        for (auto& c : sj.c) c = 0;
        const auto& bj = d.band(0, j);
        for (std::size_t i = 0; i < bj.spec.size(); ++i) sj.c[bj.lo + i + 512] = bj.spec[i];
        for (int k = -d.kmax; k <= d.kmax; ++k) {
            if (k == j) continue;
            auto bjk = apply_multiplier(sj, [&](double xi) { return part.weight(k, xi); });
            EXPECT_TRUE(bjk.empty());
            // Cross inner product of time samples.
            std::complex<double> ip = 0;
            const auto& bk = d.band(0, k);
            for (int n = 0; n < 1024; ++n) ip += bj.samples[n] * std::conj(bk.samples[n]);
            EXPECT_LT(std::abs(ip), 1e-11);
        }
    }
}

TEST(Multiplier, RecoversWindowedTone) {
    const int m = 4096;
    const double xi0 = 768;  // middle of sharp block 10 = [512, 1024)
    SampledPath p;
    p.dt = 2 * M_PI / m;
    p.channels = {std::vector<double>(m)};
    for (int n = 0; n < m; ++n) p.channels[0][n] = std::cos(xi0 * p.time(n));
    auto w = window_path(p, 0.25);
    auto d = decompose(w, DyadicPartition(PartitionKind::Sharp, 11));
    const auto& b = d.band(0, 10);
    double err = 0;
    for (int n = 0; n < m; ++n) {
        double win = window_weight(static_cast<double>(n) / m, 0.25);
        std::complex<double> want = 0.5 * win * std::exp(std::complex<double>(0, xi0 * p.time(n)));
        err = std::max(err, std::abs(b.samples[n] - want));
    }
    EXPECT_LT(err, 1e-6);
}

TEST(Decompose, ReconstructsWindowedSignal) {
    const int m = 4096;
    auto p = window_path(gen_path(PathKind::BandNoise, 0.3, 21, m, 2), 0.1);
    for (auto kind : {PartitionKind::Sharp, PartitionKind::Smooth}) {
        auto d = decompose(p, DyadicPartition(kind, default_kmax(FrequencyGrid{m, p.length()})));
        for (int c = 0; c < 2; ++c) {
            std::vector<double> sum(m, 0.0), diff(m);
            for (int k = -d.kmax; k <= d.kmax; ++k)
                for (int n = 0; n < m; ++n) sum[n] += d.band(c, k).samples[n].real();
            for (int n = 0; n < m; ++n) diff[n] = sum[n] - p.channels[c][n];
            EXPECT_LT(l2(diff) / l2(p.channels[c]), 1e-10);
            EXPECT_LT(d.tail_energy[c], 1e-10);
        }
    }
}

TEST(BesovNorm, ConstantLivesInBlockZero) {
    const int m = 2048;
    auto p = window_path(constant_path(m, 3.0), 0.25);
    auto d = decompose(p, DyadicPartition(PartitionKind::Sharp, 10));
    auto sups = band_sup_norms(d, 0);
    double zero = sups[d.kmax];
    for (int k = 1; k <= d.kmax; ++k) EXPECT_LT(sups[d.kmax + k], zero) << k;
    // Window leakage decays faster than any power once past the window's own scale.
    for (int k = 8; k <= d.kmax; ++k) EXPECT_LT(sups[d.kmax + k], 1e-3 * zero) << k;
    for (int k = 6; k < d.kmax; ++k) EXPECT_LT(sups[d.kmax + k + 1], sups[d.kmax + k]) << k;
}

TEST(BesovNorm, IsPositivelyHomogeneous) {
    auto p = gen_path(PathKind::Weierstrass, 0.3, 2, 1024, 1);
    DyadicPartition part(PartitionKind::Smooth, 9);
    auto x = p.channels[0];
    double a = besov_norm(x, p.length(), 0.3, part);
    for (auto& v : x) v *= 2.5;
    EXPECT_NEAR(besov_norm(x, p.length(), 0.3, part), 2.5 * a, 1e-12 * a);
    EXPECT_THROW(besov_norm(x, p.length(), 1.0, part), std::invalid_argument);
}

TEST(BesovNorm, WeierstrassBlocksScaleWithAlpha) {
    const double alpha = 0.3;
    const int m = 4096;
    auto p = gen_path(PathKind::Weierstrass, alpha, 17, m, 1);
    auto d = decompose(p, DyadicPartition(PartitionKind::Smooth, default_kmax(FrequencyGrid{m, p.length()})));
    auto sups = band_sup_norms(d, 0);
    double lo = 1e300, hi = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int k = 3; k <= 10; ++k) {
        double v = sups[d.kmax + k];
        double scaled = v * std::pow(2.0, alpha * k);
        lo = std::min(lo, scaled);
        hi = std::max(hi, scaled);
        double y = std::log2(v);
        sx += k, sy += y, sxx += k * k, sxy += k * y, ++n;
    }
    EXPECT_LT(hi / lo, 4.0);
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    EXPECT_NEAR(slope, -alpha, 0.05);
}

TEST(S0, ConstantSymbolIsOne) {
    EXPECT_NEAR(s0_seminorm([](double) { return 1.0; }, 1, -10, 10, 0.01), 1.0, 1e-12);
}

TEST(S0, SmoothBlocksAreDilationInvariantWithHomogeneousWeight) {
    DyadicPartition part(PartitionKind::Smooth, 12);
    std::vector<double> vals;
    for (int k = 1; k <= 6; ++k) {
        double scale = std::ldexp(1.0, k);
        vals.push_back(s0_seminorm([&](double xi) { return part.weight(k, xi); }, 1, scale / 4, scale * 4, scale / 1024,
                                   S0Weight::Homogeneous));
    }
    for (double v : vals) EXPECT_NEAR(v, vals[0], 1e-6 * vals[0]);
}

TEST(S0, SharpIndicatorBlowsUpUnderRefinement) {
    auto ind = [](double xi) { return DyadicPartition::sharp_block(xi) == 3 ? 1.0 : 0.0; };
    double coarse = s0_seminorm(ind, 1, 2, 10, 1e-2);
    double fine = s0_seminorm(ind, 1, 2, 10, 1e-3);
    EXPECT_GT(fine, 100 * coarse);
}

TEST(Csv, RoundTrip) {
    auto p = gen_path(PathKind::SmoothPoly, 0.3, 5, 64, 3);
    std::ostringstream os;
    write_path_csv(os, p);
    auto file = temp_file("fno_round.csv", os.str());
    auto q = read_path_csv(file);
    EXPECT_EQ(q.channels, p.channels);
    EXPECT_NEAR(q.dt, p.dt, 1e-15);
}

TEST(Csv, Errors) {
    EXPECT_THROW(read_path_csv("/nonexistent/fno.csv"), std::invalid_argument);
    EXPECT_THROW(read_path_csv(temp_file("fno_hdr.csv", "t\n0\n1\n")), std::invalid_argument);
    EXPECT_THROW(read_path_csv(temp_file("fno_num.csv", "t,x1\n0,1\n1,abc\n")), std::invalid_argument);
    EXPECT_THROW(read_path_csv(temp_file("fno_gap.csv", "t,x1\n0,1\n1,2\n2.5,3\n3.5,4\n")), std::invalid_argument);
    EXPECT_THROW(read_path_csv(temp_file("fno_cols.csv", "t,x1,x2\n0,1,2\n1,2\n")), std::invalid_argument);
}
