#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "galvomosaic/scan_simulator.hpp"
#include "galvomosaic/tile_correction.hpp"

using namespace galvomosaic;

namespace {

ImageF constant(int w, int h, double v) { return ImageF(w, h, v); }

ResponseModel identity_model(const RectRoi& roi) {
    return ResponseModel{constant(roi.width, roi.height, 1.0), constant(roi.width, roi.height, 0.0),
                         0.0, ResponseMode::TwoPoint};
}

ImageF random_image(int w, int h, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    ImageF img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) img(x, y) = u(rng);
    }
    return img;
}

}  // namespace

TEST(FitTwoPoint, DirectSubstitution) {
    const RectRoi roi{0, 0, 1, 1};
    const ReferencePair refs{constant(1, 1, 150.0), constant(1, 1, 50.0), 100.0, 0.0};
    const auto m = fit_two_point(refs, roi, 0.0);
    EXPECT_DOUBLE_EQ(m.gain(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(m.offset(0, 0), 50.0);
    EXPECT_EQ(m.mode, ResponseMode::TwoPoint);
}

TEST(FitTwoPoint, EqualReferencesGiveZeroGain) {
    const RectRoi roi{0, 0, 4, 4};
    const ReferencePair refs{constant(4, 4, 0.3), constant(4, 4, 0.3), 1.0, 0.0};
    const auto m = fit_two_point(refs, roi);
    EXPECT_EQ(m.gain(2, 2), 0.0);
    EXPECT_FALSE(m.has_positive_gain());
}

TEST(FitTwoPoint, VignetteMatchesPerPixelOracle) {
    const int w = 64;
    const int h = 48;
    const double lb = 0.8;
    const double o0 = 0.03;
    const double eps = 1e-6;
    const ImageF v = sim::vignette_field(w, h, 0.6);
    ImageF bright(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) bright(x, y) = v(x, y) * lb;
    }
    const RectRoi roi{5, 7, 40, 30};
    const auto m = fit_two_point(ReferencePair{bright, constant(w, h, o0), lb, 0.0}, roi, eps);
    for (int y = 0; y < roi.height; ++y) {
        for (int x = 0; x < roi.width; ++x) {
            const double vb = v(x + roi.x0, y + roi.y0);
            const double oracle = (vb * lb - o0) / (lb + eps);
            EXPECT_NEAR(m.gain(x, y), oracle, 1e-15);
            EXPECT_NEAR(m.gain(x, y), vb - o0 / lb, 2 * eps);
            EXPECT_DOUBLE_EQ(m.offset(x, y), o0);
        }
    }
}

TEST(FitTwoPoint, Errors) {
    const RectRoi roi{0, 0, 2, 2};
    EXPECT_THROW(fit_two_point(ReferencePair{constant(2, 2, 1), std::nullopt, 1, 0}, roi),
                 std::invalid_argument);
    EXPECT_THROW(fit_two_point(ReferencePair{constant(2, 2, 1), constant(3, 2, 0), 1, 0}, roi),
                 std::invalid_argument);
    EXPECT_THROW(fit_two_point(ReferencePair{constant(2, 2, 1), constant(2, 2, 0), 0.2, 0.2}, roi),
                 std::invalid_argument);
    EXPECT_THROW(fit_two_point(ReferencePair{constant(2, 2, 1), constant(2, 2, 0), 1, 0},
                               RectRoi{1, 1, 2, 2}),
                 std::out_of_range);
}

TEST(FitBrightOnly, UniformFrame) {
    const RectRoi roi{1, 1, 3, 3};
    const double lb = 0.7;
    const auto m = fit_bright_only(constant(5, 5, lb), lb, roi);
    EXPECT_EQ(m.mode, ResponseMode::BrightOnly);
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 3; ++x) {
            EXPECT_NEAR(m.gain(x, y), 1.0, kDefaultEpsilon / lb);
            EXPECT_EQ(m.offset(x, y), 0.0);
        }
    }
}

TEST(FitBrightOnly, HalfLevel) {
    const auto m = fit_bright_only(constant(1, 1, 0.25), 0.5, RectRoi{0, 0, 1, 1}, 0.0);
    EXPECT_DOUBLE_EQ(m.gain(0, 0), 0.5);
}

TEST(FitBrightOnly, RoundTripRestoresLevel) {
    std::mt19937_64 rng(3);
    const double lb = 0.6;
    const ImageF bright = random_image(32, 32, rng, 0.7 * lb, 1.0 * lb);
    const RectRoi roi{4, 4, 24, 20};
    const auto m = fit_bright_only(bright, lb, roi);
    const ImageF out = correct_roi(bright, m, roi);
    for (int y = 0; y < roi.height; ++y) {
        for (int x = 0; x < roi.width; ++x) EXPECT_NEAR(out(x, y), lb, 1e-5);
    }
}

TEST(FitBrightOnly, ZeroLevelIsInvalid) {
    EXPECT_THROW(fit_bright_only(constant(2, 2, 0.5), -1e-6, RectRoi{0, 0, 2, 2}, 1e-6),
                 std::invalid_argument);
}

TEST(CorrectRoi, IdentityIsExact) {
    std::mt19937_64 rng(5);
    const ImageF tile = random_image(16, 16, rng);
    const RectRoi roi{2, 3, 10, 8};
    const ImageF out = correct_roi(tile, identity_model(roi), roi);
    ASSERT_EQ(out.width(), roi.width);
    ASSERT_EQ(out.height(), roi.height);
    for (int y = 0; y < roi.height; ++y) {
        for (int x = 0; x < roi.width; ++x) EXPECT_EQ(out(x, y), tile(x + 2, y + 3));
    }
}

TEST(CorrectRoi, InvertsTheFitExample) {
    const RectRoi roi{0, 0, 1, 1};
    const ResponseModel m{constant(1, 1, 1.0), constant(1, 1, 50.0), 0.0, ResponseMode::TwoPoint};
    EXPECT_DOUBLE_EQ(correct_roi(constant(1, 1, 150.0), m, roi)(0, 0), 100.0);
}

TEST(CorrectRoi, RoundTripProperty) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> gdist(0.5, 1.5);
    std::uniform_real_distribution<double> odist(-0.1, 0.1);
    const double eps = 1e-6;
    for (int trial = 0; trial < 20; ++trial) {
        const RectRoi roi{0, 0, 12, 9};
        const ImageF truth = random_image(12, 9, rng);
        ResponseModel m{ImageF(12, 9), ImageF(12, 9), eps, ResponseMode::TwoPoint};
        ImageF observed(12, 9);
        for (int y = 0; y < 9; ++y) {
            for (int x = 0; x < 12; ++x) {
                m.gain(x, y) = gdist(rng);
                m.offset(x, y) = odist(rng);
                observed(x, y) = m.gain(x, y) * truth(x, y) + m.offset(x, y);
            }
        }
        const ImageF back = correct_roi(observed, m, roi);
        for (int y = 0; y < 9; ++y) {
            for (int x = 0; x < 12; ++x) {
                const double tol = std::abs(eps * truth(x, y) / m.gain(x, y)) + 1e-15;
                EXPECT_NEAR(back(x, y), truth(x, y), tol);
            }
        }
    }
}

TEST(FeatherRoi, WeightExtremesAndMidpoint) {
    const RectRoi roi{0, 0, 1, 1};
    const ImageF tile = constant(1, 1, 0.1);
    const ImageF corr = constant(1, 1, 0.2);
    auto blend = [&](double w) {
        return feather_roi(tile, corr, WeightField{constant(1, 1, w), 1}, roi)(0, 0);
    };
    EXPECT_EQ(blend(1.0), 0.2);
    EXPECT_EQ(blend(0.0), 0.1);
    EXPECT_NEAR(blend(0.5), 0.15, 1e-15);
}

TEST(FeatherRoi, LeavesOutsideUntouchedAndClamps) {
    std::mt19937_64 rng(2);
    const ImageF tile = random_image(10, 10, rng);
    const RectRoi roi{2, 2, 4, 4};
    const ImageF corr = constant(4, 4, 1.7);
    const ImageF out = feather_roi(tile, corr, WeightField{constant(4, 4, 1.0), 1}, roi);
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x < 10; ++x) {
            if (roi.contains(x, y)) {
                EXPECT_EQ(out(x, y), 1.0);
            } else {
                EXPECT_EQ(out(x, y), tile(x, y));
            }
        }
    }
}

TEST(FeatherRoi, RejectsWeightsOutsideUnitInterval) {
    const RectRoi roi{0, 0, 1, 1};
    EXPECT_THROW(feather_roi(constant(1, 1, 0), constant(1, 1, 0),
                             WeightField{constant(1, 1, 1.5), 1}, roi),
                 std::domain_error);
    EXPECT_THROW(feather_roi(constant(1, 1, 0), constant(1, 1, 0),
                             WeightField{constant(1, 1, -0.1), 1}, roi),
                 std::domain_error);
}

TEST(FeatherRoi, OutputBetweenInputs) {
    std::mt19937_64 rng(9);
    const RectRoi roi{0, 0, 20, 20};
    for (int trial = 0; trial < 20; ++trial) {
        const ImageF tile = random_image(20, 20, rng);
        const ImageF corr = random_image(20, 20, rng);
        const ImageF w = random_image(20, 20, rng);
        const ImageF out = feather_roi(tile, corr, WeightField{w, 5}, roi);
        for (int y = 0; y < 20; ++y) {
            for (int x = 0; x < 20; ++x) {
                EXPECT_GE(out(x, y), std::min(tile(x, y), corr(x, y)));
                EXPECT_LE(out(x, y), std::max(tile(x, y), corr(x, y)));
            }
        }
    }
}

TEST(FeatherRoi, IdentityModelIsBitExactForAnyWeight) {
    std::mt19937_64 rng(4);
    const ImageF tile = random_image(30, 30, rng);
    const RectRoi roi{3, 5, 20, 18};
    const ImageF corr = correct_roi(tile, identity_model(roi), roi);
    const ImageF w = random_image(20, 18, rng);
    EXPECT_EQ(feather_roi(tile, corr, WeightField{w, 4}, roi), tile);
}

TEST(RoiWeights, ShapeOfTheRamp) {
    const RectRoi roi{0, 0, 40, 30};
    const int band = 10;
    const WeightField wf = make_roi_weights(roi, band);
    const ImageF& w = wf.weights;
    EXPECT_EQ(w(0, 15), 0.0);
    EXPECT_EQ(w(39, 15), 0.0);
    EXPECT_EQ(w(20, 0), 0.0);
    EXPECT_EQ(w(20, 29), 0.0);
    EXPECT_EQ(w(20, 15), 1.0);
    EXPECT_NEAR(w(5, 15), 0.5, 1e-15);
    for (int y = 0; y < 30; ++y) {
        for (int x = 0; x < 40; ++x) {
            EXPECT_GE(w(x, y), 0.0);
            EXPECT_LE(w(x, y), 1.0);
            const int d = std::min({x, 39 - x, y, 29 - y});
            if (d >= band) EXPECT_EQ(w(x, y), 1.0);
            if (x + 1 < 40) EXPECT_LE(std::abs(w(x + 1, y) - w(x, y)), 1.0 / band + 1e-15);
            if (y + 1 < 30) EXPECT_LE(std::abs(w(x, y + 1) - w(x, y)), 1.0 / band + 1e-15);
        }
    }
}

TEST(RoiWeights, InteriorEdgesOnlyRampAwayFromTheBorder) {
    const RectRoi roi{0, 40, 58, 60};  // lower-left corner of a 100 x 100 frame
    const RampEdges e = interior_edges(roi, 100, 100);
    EXPECT_FALSE(e.left);
    EXPECT_TRUE(e.right);
    EXPECT_TRUE(e.top);
    EXPECT_FALSE(e.bottom);
    const WeightField wf = make_roi_weights(roi, 10, e);
    EXPECT_EQ(wf.weights(0, 59), 1.0);
    EXPECT_EQ(wf.weights(57, 30), 0.0);
    EXPECT_EQ(wf.weights(20, 0), 0.0);
}

TEST(BuildReference, MeanOfFrames) {
    const std::vector<ImageF> one{constant(3, 3, 0.4)};
    EXPECT_EQ(build_reference(one), one[0]);
    const std::vector<ImageF> two{constant(3, 3, 10.0), constant(3, 3, 30.0)};
    EXPECT_EQ(build_reference(two), constant(3, 3, 20.0));
}

TEST(BuildReference, Errors) {
    EXPECT_THROW(build_reference(std::vector<ImageF>{}), std::invalid_argument);
    const std::vector<ImageF> bad{constant(3, 3, 0), constant(3, 4, 0)};
    EXPECT_THROW(build_reference(bad), std::invalid_argument);
}

TEST(BuildReference, NoiseShrinksWithFrameCount) {
    sim::DegradationSpec spec;
    spec.noise_sigma = 0.02;
    spec.rng_seed = 99;
    const TileDims dims{64, 64};
    auto spread = [&](int frames) {
        spec.reference_frames = frames;
        const auto refs = sim::make_references(dims, spec, {});
        double s = 0.0;
        double s2 = 0.0;
        for (double v : refs.bright) {
            s += v;
            s2 += v * v;
        }
        const double n = static_cast<double>(refs.bright.size());
        return std::sqrt(s2 / n - (s / n) * (s / n));
    };
    const double s1 = spread(1);
    const double s16 = spread(16);
    EXPECT_NEAR(s1, 0.02, 0.002);
    EXPECT_NEAR(s16 / s1, 0.25, 0.03);
}

TEST(ReferenceLevel, MeanOutsideRois) {
    ImageF f = constant(10, 10, 0.5);
    const RectRoi roi{0, 5, 5, 5};
    for (int y = 5; y < 10; ++y) {
        for (int x = 0; x < 5; ++x) f(x, y) = 0.9;
    }
    EXPECT_DOUBLE_EQ(reference_level(f, std::vector<RectRoi>{roi}), 0.5);
    EXPECT_NEAR(reference_level(f, std::vector<RectRoi>{}), 0.6, 1e-15);
}

TEST(DefaultRois, BenchLayout) {
    const auto lin = default_rois(ScanStrategy::Linear, 1000, 1000);
    ASSERT_EQ(lin.size(), 1u);
    EXPECT_EQ(lin[0], (RectRoi{0, 400, 580, 600}));
    const auto sin = default_rois(ScanStrategy::Sinusoidal, 1000, 1000);
    ASSERT_EQ(sin.size(), 2u);
    EXPECT_EQ(sin[0], (RectRoi{0, 600, 200, 400}));
    EXPECT_EQ(sin[1], (RectRoi{800, 600, 200, 400}));
    for (const auto& r : default_rois(ScanStrategy::Sinusoidal, 200, 120)) {
        EXPECT_TRUE(r.fits_within(200, 120));
    }
}

TEST(TileCorrector, MapsReferencesToTheirLevels) {
    const TileDims dims{120, 100};
    sim::DegradationSpec spec;
    spec.vignette_min = 0.7;
    spec.corner_offset = 0.05;
    const auto rois = default_rois(ScanStrategy::Linear, dims.width, dims.height);
    const auto refs = sim::make_references(dims, spec, rois);
    const double lb = reference_level(refs.bright, rois);
    const double ld = reference_level(refs.dark, rois);
    const ReferencePair pair{refs.bright, refs.dark, lb, ld};
    for (const auto& roi : rois) {
        const auto m = fit_two_point(pair, roi);
        EXPECT_TRUE(m.has_positive_gain());
        const ImageF b = correct_roi(refs.bright, m, roi);
        const ImageF d = correct_roi(refs.dark, m, roi);
        for (int y = 0; y < roi.height; ++y) {
            for (int x = 0; x < roi.width; ++x) {
                EXPECT_NEAR(b(x, y), lb, 1e-5);
                EXPECT_NEAR(d(x, y), ld, 1e-5);
            }
        }
    }
}

TEST(TileCorrector, RejectsDegenerateReferences) {
    const ImageF flat = constant(50, 50, 0.4);
    const std::vector<RectRoi> rois{RectRoi{0, 25, 20, 25}};
    EXPECT_THROW(TileCorrector(CorrectionMode::TwoPoint, flat, flat, rois, 5),
                 std::invalid_argument);
}

TEST(TileCorrector, OffIsIdentity) {
    std::mt19937_64 rng(1);
    const ImageF tile = random_image(20, 20, rng);
    EXPECT_EQ(TileCorrector().apply(tile), tile);
}

TEST(CorrectionModeNames, RoundTrip) {
    for (auto m : {CorrectionMode::Off, CorrectionMode::TwoPoint, CorrectionMode::BrightOnly}) {
        EXPECT_EQ(parse_correction_mode(to_string(m)), m);
    }
    EXPECT_THROW(parse_correction_mode("sometimes"), std::invalid_argument);
}
