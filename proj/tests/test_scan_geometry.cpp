#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "galvomosaic/errors.hpp"
#include "galvomosaic/scan_geometry.hpp"

using namespace galvomosaic;

namespace {

ScanConfig bench(ScanStrategy s = ScanStrategy::Linear) {
    ScanConfig c;
    c.strategy = s;
    return c;
}

ScanConfig untilted(ScanStrategy s = ScanStrategy::Linear) {
    ScanConfig c = bench(s);
    c.alpha_x = 0.0;
    c.alpha_y = 0.0;
    return c;
}

}  // namespace

TEST(LinearOffset, OriginTileSitsAtZero) {
    const auto p = linear_offset(untilted(), 0, 0);
    EXPECT_EQ(p.dx, 0.0);
    EXPECT_EQ(p.dy, 0.0);
}

TEST(LinearOffset, SecondColumn) {
    const auto p = linear_offset(untilted(), 0, 1);
    EXPECT_NEAR(p.dx, 442.2, 1e-9);
    EXPECT_EQ(p.dy, 0.0);
}

TEST(LinearOffset, SecondRowWithTilt) {
    const auto p = linear_offset(bench(), 1, 0);
    EXPECT_NEAR(p.dx, 16.0, 1e-12);
    EXPECT_NEAR(p.dy, 514.8, 1e-9);
}

TEST(LinearOffset, IndexOutOfRangeThrows) {
    EXPECT_THROW(linear_offset(bench(), 10, 0), std::out_of_range);
    EXPECT_THROW(linear_offset(bench(), 0, -1), std::out_of_range);
}

TEST(LinearOffset, RejectsSinusoidalConfig) {
    EXPECT_THROW(linear_offset(bench(ScanStrategy::Sinusoidal), 0, 0), std::invalid_argument);
}

TEST(SinusoidalVoltage, Endpoints) {
    ScanConfig c = bench(ScanStrategy::Sinusoidal);
    c.v0 = 4.95;
    c.amplitude = 4.95;
    EXPECT_NEAR(sinusoidal_voltage(c, 0), 0.0, 1e-12);
    EXPECT_NEAR(sinusoidal_voltage(c, 9), 9.9, 1e-12);
}

TEST(SinusoidalVoltage, InteriorMatchesScalarOracle) {
    ScanConfig c = bench(ScanStrategy::Sinusoidal);
    c.v0 = 4.95;
    c.amplitude = 4.95;
    const double expected = 4.95 - 4.95 * std::sin(std::numbers::pi / 18.0);
    EXPECT_NEAR(sinusoidal_voltage(c, 4), expected, 1e-12);
}

TEST(SinusoidalVoltage, DefaultsSpanTheLinearRange) {
    const ScanConfig c = bench(ScanStrategy::Sinusoidal);
    EXPECT_NEAR(c.effective_v0(), 4.95, 1e-12);
    EXPECT_NEAR(c.effective_amplitude(), 4.95, 1e-12);
}

TEST(SinusoidalVoltage, SingleColumnIsDegenerate) {
    ScanConfig c = bench(ScanStrategy::Sinusoidal);
    c.n_cols = 1;
    EXPECT_THROW(sinusoidal_voltage(c, 0), std::domain_error);
    try {
        c.validate();
        FAIL() << "validate accepted a one-column sinusoidal grid";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "n_cols");
        EXPECT_NE(std::string(e.what()).find("degenerate"), std::string::npos);
    }
}

TEST(SinusoidalOffset, Examples) {
    const ScanConfig flat = untilted(ScanStrategy::Sinusoidal);
    const auto origin = sinusoidal_offset(flat, 0, 0);
    EXPECT_NEAR(origin.dx, 0.0, 1e-12);
    EXPECT_EQ(origin.dy, 0.0);
    EXPECT_NEAR(sinusoidal_offset(flat, 0, 9).dx, 3979.8, 1e-9);

    const auto p = sinusoidal_offset(bench(ScanStrategy::Sinusoidal), 2, 0);
    EXPECT_NEAR(p.dx, 32.0, 1e-9);
    EXPECT_NEAR(p.dy, 1029.6, 1e-9);
}

TEST(PlacementTable, SingleTile) {
    ScanConfig c = bench();
    c.n_rows = 1;
    c.n_cols = 1;
    const auto t = placement_table(c);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t[0].dx, 0.0);
    EXPECT_EQ(t[0].dy, 0.0);
}

TEST(PlacementTable, LinearSpacingAndFieldWidth) {
    const auto t = placement_table(untilted());
    ASSERT_EQ(t.size(), 100u);
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j + 1 < 10; ++j) {
            EXPECT_NEAR(t[i * 10 + j + 1].dx - t[i * 10 + j].dx, 442.2, 1e-9);
        }
    }
    EXPECT_NEAR(t[9].dx + 1000.0, 4979.8, 1e-9);
}

TEST(PlacementTable, RowMajorOrder) {
    const auto t = placement_table(bench());
    for (int k = 0; k < 100; ++k) {
        EXPECT_EQ(t[k].row, k / 10);
        EXPECT_EQ(t[k].col, k % 10);
    }
}

TEST(PlacementTable, OriginShiftedToNonnegative) {
    for (auto s : {ScanStrategy::Linear, ScanStrategy::Sinusoidal}) {
        const auto t = placement_table(bench(s));
        double min_x = 1e300;
        double min_y = 1e300;
        for (const auto& p : t) {
            min_x = std::min(min_x, p.dx);
            min_y = std::min(min_y, p.dy);
        }
        EXPECT_EQ(min_x, 0.0);
        EXPECT_EQ(min_y, 0.0);
    }
}

TEST(PlacementTable, SinusoidalEndColumnsMatchLinear) {
    const auto lin = placement_table(untilted());
    const auto sin = placement_table(untilted(ScanStrategy::Sinusoidal));
    for (int i = 0; i < 10; ++i) {
        EXPECT_NEAR(sin[i * 10].dx, lin[i * 10].dx, 1e-9);
        EXPECT_NEAR(sin[i * 10 + 9].dx, lin[i * 10 + 9].dx, 1e-9);
    }
    EXPECT_GT(std::abs((sin[5].dx - sin[4].dx) - (sin[1].dx - sin[0].dx)), 100.0);
}

TEST(ScanConfigValidate, RejectsBadFields) {
    auto expect_key = [](ScanConfig c, const std::string& key) {
        try {
            c.validate();
            FAIL() << "accepted invalid " << key;
        } catch (const ConfigError& e) {
            EXPECT_EQ(e.key(), key);
        }
    };
    ScanConfig c = bench();
    c.n_rows = 0;
    expect_key(c, "n_rows");
    c = bench();
    c.s_x = 0.0;
    expect_key(c, "s_x");
    c = bench();
    c.s_y = -1.0;
    expect_key(c, "s_y");
    c = bench();
    c.tile_width = 0;
    expect_key(c, "tile_width");
    c = bench(ScanStrategy::Sinusoidal);
    c.amplitude = -0.5;
    expect_key(c, "amplitude");
    c = bench();
    c.settle_ms = -1.0;
    expect_key(c, "settle_ms");
}

// Properties over randomized configurations.

class GeometryProperty : public ::testing::Test {
protected:
    std::mt19937_64 rng{12345};

    ScanConfig random_config(ScanStrategy s) {
        std::uniform_int_distribution<int> n(2, 12);
        std::uniform_real_distribution<double> u(0.2, 3.0);
        std::uniform_real_distribution<double> scale(50.0, 800.0);
        std::uniform_real_distribution<double> tilt(-40.0, 40.0);
        ScanConfig c;
        c.strategy = s;
        c.n_rows = n(rng);
        c.n_cols = n(rng);
        c.dv_x = u(rng);
        c.dv_y = u(rng);
        c.s_x = scale(rng);
        c.s_y = scale(rng);
        c.alpha_x = tilt(rng);
        c.alpha_y = tilt(rng);
        return c;
    }
};

TEST_F(GeometryProperty, LinearSpacingUniformWithoutVerticalTilt) {
    for (int trial = 0; trial < 50; ++trial) {
        ScanConfig c = random_config(ScanStrategy::Linear);
        c.alpha_y = 0.0;
        const double step = c.dv_x * c.s_x;
        for (int i = 0; i < c.n_rows; ++i) {
            for (int j = 0; j + 1 < c.n_cols; ++j) {
                const double d = linear_offset(c, i, j + 1).dx - linear_offset(c, i, j).dx;
                EXPECT_NEAR(d, step, 1e-9 * step);
            }
        }
    }
}

TEST_F(GeometryProperty, SinusoidalSpacingPositiveSymmetricUnimodal) {
    for (int trial = 0; trial < 50; ++trial) {
        const ScanConfig c = random_config(ScanStrategy::Sinusoidal);
        const int n = c.n_cols;
        std::vector<double> d;
        for (int j = 0; j + 1 < n; ++j) {
            d.push_back(sinusoidal_voltage(c, j + 1) - sinusoidal_voltage(c, j));
        }
        const double tol = 1e-12 * c.effective_amplitude() * 4;
        for (std::size_t k = 0; k < d.size(); ++k) {
            EXPECT_GT(d[k], 0.0);
            EXPECT_NEAR(d[k], d[d.size() - 1 - k], tol);
        }
        const std::size_t mid = (d.size() - 1) / 2;
        for (std::size_t k = 0; k < mid; ++k) EXPECT_LT(d[k], d[k + 1] + tol);
        for (std::size_t k = d.size() - 1; k > d.size() / 2; --k) EXPECT_LT(d[k], d[k - 1] + tol);
        const double peak = *std::max_element(d.begin(), d.end());
        EXPECT_NEAR(d[mid], peak, tol);
        EXPECT_NEAR(d[d.size() / 2], peak, tol);
    }
}

TEST_F(GeometryProperty, TiltIsExactlyAdditive) {
    for (auto s : {ScanStrategy::Linear, ScanStrategy::Sinusoidal}) {
        for (int trial = 0; trial < 30; ++trial) {
            const ScanConfig c = random_config(s);
            ScanConfig flat = c;
            flat.alpha_x = 0.0;
            flat.alpha_y = 0.0;
            for (int i = 0; i < c.n_rows; ++i) {
                for (int j = 0; j < c.n_cols; ++j) {
                    const auto p = tile_offset(c, i, j);
                    const auto q = tile_offset(flat, i, j);
                    EXPECT_EQ(p.dx, q.dx + c.alpha_x * i);
                    EXPECT_EQ(p.dy, q.dy + c.alpha_y * j);
                }
            }
        }
    }
}

TEST_F(GeometryProperty, OriginShiftPreservesPairwiseDifferences) {
    for (auto s : {ScanStrategy::Linear, ScanStrategy::Sinusoidal}) {
        for (int trial = 0; trial < 20; ++trial) {
            const ScanConfig c = random_config(s);
            const auto t = placement_table(c);
            std::vector<TilePlacement> raw;
            for (int i = 0; i < c.n_rows; ++i) {
                for (int j = 0; j < c.n_cols; ++j) raw.push_back(tile_offset(c, i, j));
            }
            double extent = 0.0;
            for (const auto& p : raw) extent = std::max({extent, std::abs(p.dx), std::abs(p.dy)});
            const double tol = 4 * extent * std::numeric_limits<double>::epsilon();
            for (std::size_t a = 0; a < t.size(); a += 3) {
                for (std::size_t b = 0; b < t.size(); b += 5) {
                    EXPECT_NEAR(t[a].dx - t[b].dx, raw[a].dx - raw[b].dx, tol);
                    EXPECT_NEAR(t[a].dy - t[b].dy, raw[a].dy - raw[b].dy, tol);
                }
            }
        }
    }
}

TEST_F(GeometryProperty, EndpointEquivalence) {
    for (int trial = 0; trial < 50; ++trial) {
        const ScanConfig c = random_config(ScanStrategy::Sinusoidal);
        const double span = (c.n_cols - 1) * c.dv_x * c.s_x;
        EXPECT_NEAR(sinusoidal_voltage(c, 0) * c.s_x, 0.0, 1e-9 * span);
        EXPECT_NEAR(sinusoidal_voltage(c, c.n_cols - 1) * c.s_x, span, 1e-9 * span);
    }
}
