#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "uwimg/formation.hpp"

namespace uwimg {
namespace {

RestorationParams uniform_params(std::size_t h, std::size_t w, double c, double t, double b) {
  return {ChannelTriple::uniform(c), ChannelTriple::uniform(b), TransmissionMap(h, w, t)};
}

TEST(WavelengthAttenuation, TypeIAtThreeMeters) {
  // exp(-alpha * 3) evaluated independently per channel.
  const auto c = wavelength_attenuation({0.334, 0.046, 0.018}, 3.0);
  EXPECT_NEAR(c.r, 0.36714441755772104, 1e-14);
  EXPECT_NEAR(c.g, 0.8710986917457983, 1e-14);
  EXPECT_NEAR(c.b, 0.9474321065017983, 1e-14);
}

TEST(WavelengthAttenuation, ZeroDepthIsIdentity) {
  EXPECT_EQ(wavelength_attenuation({0.456, 0.43, 0.943}, 0.0), ChannelTriple::uniform(1.0));
}

TEST(WavelengthAttenuation, TypeIIIAtTenMeters) {
  const auto c = wavelength_attenuation({0.336, 0.051, 0.039}, 10.0);
  EXPECT_NEAR(c.b, 0.6770568744981647, 1e-14);
  EXPECT_LT(c.r, c.g);
  EXPECT_LT(c.g, c.b);
}

TEST(WavelengthAttenuation, RejectsNegativeDepth) {
  EXPECT_THROW(wavelength_attenuation({0.1, 0.1, 0.1}, -0.5), DomainError);
  EXPECT_THROW(wavelength_attenuation({-0.1, 0.1, 0.1}, 1.0), DomainError);
}

TEST(WavelengthAttenuation, StrictlyDecreasingInDepth) {
  const ChannelTriple alpha{0.336, 0.051, 0.039};
  ChannelTriple prev = wavelength_attenuation(alpha, 0.0);
  for (double d = 0.25; d <= 20.0; d += 0.25) {
    const auto c = wavelength_attenuation(alpha, d);
    for (std::size_t ch = 0; ch < 3; ++ch) EXPECT_LT(c[ch], prev[ch]);
    prev = c;
  }
}

TEST(Transmission, TypeIIRedAtTwoMeters) {
  const auto t = transmission_from_depth({0.27, 0.387, 0.504}, DepthMap(3, 4, 2.0));
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(t.at(r, c, 0), 0.5827482523739896, 1e-14);
  }
}

TEST(Transmission, ZeroDepthAndPureWaterGiveUnity) {
  const auto t0 = transmission_from_depth({2.35, 3.38, 4.39}, DepthMap(2, 2, 0.0));
  for (double v : t0.values()) EXPECT_EQ(v, 1.0);
  const auto t1 = transmission_from_depth({0.0, 0.0, 0.0}, DepthMap(2, 2, 7.5));
  for (double v : t1.values()) EXPECT_EQ(v, 1.0);
}

TEST(Transmission, RejectsNegativeDepthAndKeepsShape) {
  DepthMap d(2, 3, 1.0);
  d.at(1, 2) = -0.1;
  EXPECT_THROW(transmission_from_depth({0.1, 0.1, 0.1}, d), DomainError);
  const auto t = transmission_from_depth({0.1, 0.1, 0.1}, DepthMap(5, 7, 1.0));
  EXPECT_EQ(t.height(), 5u);
  EXPECT_EQ(t.width(), 7u);
}

TEST(Transmission, StrictlyDecreasingInDistance) {
  DepthMap d(1, 40);
  for (std::size_t c = 0; c < 40; ++c) d.at(0, c) = 0.2 * static_cast<double>(c);
  const auto t = transmission_from_depth({0.74, 1.06, 1.38}, d);
  for (std::size_t c = 1; c < 40; ++c) {
    for (std::size_t ch = 0; ch < 3; ++ch) EXPECT_LT(t.at(0, c, ch), t.at(0, c - 1, ch));
  }
}

TEST(ObjectIrradiance, ChannelwiseProduct) {
  const auto j = object_irradiance(ImagePlane(2, 2, 1.0), {0.5, 0.8, 0.9});
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      EXPECT_DOUBLE_EQ(j.at(r, c, 0), 0.5);
      EXPECT_DOUBLE_EQ(j.at(r, c, 1), 0.8);
      EXPECT_DOUBLE_EQ(j.at(r, c, 2), 0.9);
    }
  }
  const auto e = testing::random_image(4, 4, 3);
  EXPECT_EQ(object_irradiance(e, ChannelTriple::uniform(1.0)), e);
  const auto dark = object_irradiance(ImagePlane(3, 3, 0.0), {0.3, 0.4, 0.5});
  for (double v : dark.values()) EXPECT_EQ(v, 0.0);
}

TEST(Degrade, WorkedExample) {
  const auto out = degrade(ImagePlane(2, 2, 1.0), uniform_params(2, 2, 0.5, 0.6, 0.8));
  for (double v : out.values()) EXPECT_NEAR(v, 0.62, 1e-15);
}

TEST(Degrade, TransmissionLimits) {
  const auto e = testing::random_image(5, 6, 11);
  const ChannelTriple c{0.4, 0.7, 0.9};
  const ChannelTriple b{0.6, 0.8, 0.95};
  const auto clear = degrade(e, {c, b, TransmissionMap(5, 6, 1.0)});
  EXPECT_EQ(clear, object_irradiance(e, c));
  const auto veiled = degrade(e, {c, b, TransmissionMap(5, 6, 0.0)});
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t col = 0; col < 6; ++col) {
      for (std::size_t ch = 0; ch < 3; ++ch) EXPECT_EQ(veiled.at(r, col, ch), b[ch]);
    }
  }
}

TEST(Degrade, ShapeMismatchThrows) {
  EXPECT_THROW(degrade(ImagePlane(4, 4), uniform_params(4, 5, 0.5, 0.5, 0.5)), ShapeError);
}

TEST(Degrade, OutputStaysInUnitRange) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto e = testing::random_image(6, 6, 100 + trial);
    TransmissionMap t(6, 6);
    for (double& v : t.values()) v = u(gen);
    const RestorationParams p{{u(gen), u(gen), u(gen)}, {u(gen), u(gen), u(gen)}, t};
    const auto out = degrade(e, p);
    for (double v : out.values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Restore, WorkedExample) {
  const auto out = restore(ImagePlane(2, 2, 0.62), uniform_params(2, 2, 0.5, 0.6, 0.8));
  for (double v : out.values()) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Restore, VeilOnlyPixelRestoresToBackgroundOverAttenuation) {
  // I = B gives numerator B*T, so E = B / C.
  const auto out = restore(ImagePlane(1, 1, 0.3), uniform_params(1, 1, 0.6, 0.4, 0.3),
                           {.clamp = false});
  EXPECT_NEAR(out.at(0, 0, 0), 0.3 / 0.6, 1e-15);
}

TEST(Restore, RejectsNonPositiveAttenuation) {
  EXPECT_THROW(restore(ImagePlane(2, 2, 0.5), uniform_params(2, 2, 0.0, 0.5, 0.5)), DomainError);
  EXPECT_THROW(restore(ImagePlane(2, 2, 0.5), uniform_params(2, 3, 0.5, 0.5, 0.5)), ShapeError);
}

TEST(Restore, FloorsTransmissionAndClampsByDefault) {
  const auto p = uniform_params(1, 1, 1.0, 1e-6, 0.2);
  // Unclamped value with T floored at 1e-3: (0.9 - 0.2 * 0.999) / 1e-3.
  const auto raw = restore(ImagePlane(1, 1, 0.9), p, {.clamp = false});
  EXPECT_NEAR(raw.at(0, 0, 0), (0.9 - 0.2 * 0.999) / 1e-3, 1e-9);
  const auto clamped = restore(ImagePlane(1, 1, 0.9), p);
  EXPECT_EQ(clamped.at(0, 0, 0), 1.0);
  EXPECT_EQ(count_floored(p.transmission), 3u);
  EXPECT_EQ(count_floored(p.transmission, 1e-7), 0u);
}

TEST(Restore, RoundTripAllWaterTypes) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> water_depth(2.0, 10.0);
  std::uniform_real_distribution<double> scene_depth(0.5, 8.0);
  std::uniform_real_distribution<double> bg(0.5, 1.0);
  for (WaterType type : kAllWaterTypes) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto iop = iop_lookup(type);
      const auto e = testing::random_image(16, 16, gen());
      DepthMap d(16, 16);
      for (double& v : d.values()) v = scene_depth(gen);
      const RestorationParams p{wavelength_attenuation(iop.alpha, water_depth(gen)),
                                {bg(gen), bg(gen), bg(gen)}, transmission_from_depth(iop.beta, d)};
      const auto back = restore(degrade(e, p), p, {.clamp = false});
      const auto ev = e.values();
      const auto bv = back.values();
      const auto tv = p.transmission.values();
      for (std::size_t i = 0; i < ev.size(); ++i) {
        // Exact inverse wherever the floor is inactive.
        if (tv[i] >= kDefaultTransmissionFloor) {
          ASSERT_NEAR(bv[i], ev[i], 1e-6) << to_string(type);
        }
      }
    }
  }
}

}  // namespace
}  // namespace uwimg
