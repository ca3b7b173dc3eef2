#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "synthrf/ofdm.hpp"
#include "synthrf/random.hpp"

using namespace synthrf;
using namespace synthrf::nr;

namespace {

std::vector<ResourceGrid> random_grids(const CarrierConfig& c, std::size_t slots, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<ResourceGrid> grids;
    for (std::size_t s = 0; s < slots; ++s) {
        ResourceGrid g(c.subcarriers(), c.symbols_per_slot);
        for (int l = 0; l < c.symbols_per_slot; ++l) {
            for (int k = 0; k < c.subcarriers(); ++k) g.set(k, l, Complex(rng.gaussian(), rng.gaussian()), CellLabel::pdsch);
        }
        grids.push_back(std::move(g));
    }
    return grids;
}

}  // namespace

TEST(Carrier, SampleRateAndSlotLengths) {
    const CarrierConfig c;
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.sample_rate_hz(), 15.36e6);
    EXPECT_EQ(c.subcarriers(), 624);
    EXPECT_EQ(c.cp_length(0, 0), 80);
    EXPECT_EQ(c.cp_length(0, 1), 72);
    EXPECT_EQ(c.cp_length(0, 7), 80);
    EXPECT_EQ(c.cp_length(3, 13), 72);
    EXPECT_EQ(c.slot_samples(0), 15360);
    std::int64_t frame = 0;
    for (int s = 0; s < c.slots_per_frame; ++s) frame += c.slot_samples(s);
    EXPECT_EQ(frame, 153600);
}

TEST(Carrier, ThirtyKilohertzLongCpEveryOtherSlot) {
    CarrierConfig c;
    c.scs_hz = 30e3;
    c.slots_per_frame = 20;
    c.n_rb = 51;
    c.n_fft = 1024;
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.numerology(), 1);
    EXPECT_EQ(c.cp_length(0, 0), 72 + 16);
    EXPECT_EQ(c.cp_length(0, 7), 72);
    EXPECT_EQ(c.cp_length(1, 0), 72 + 16);
    EXPECT_EQ(c.sample_rate_hz(), 30.72e6);
    EXPECT_EQ(c.slot_samples(0) + c.slot_samples(1), 30720);
}

TEST(Carrier, RejectsInvalid) {
    CarrierConfig c;
    c.n_fft = 512;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = CarrierConfig{};
    c.n_fft = 1000;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = CarrierConfig{};
    c.symbols_per_slot = 12;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = CarrierConfig{};
    c.scs_hz = 20e3;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(ResourceGridOps, OverlayAndCount) {
    ResourceGrid a(24, 14), b(24, 14);
    a.set(0, 0, 1.0, CellLabel::prs);
    b.set(1, 0, 2.0, CellLabel::pdsch);
    a.overlay(b);
    EXPECT_EQ(a.count(CellLabel::prs), 1u);
    EXPECT_EQ(a.count(CellLabel::pdsch), 1u);
    EXPECT_EQ(a.at(1, 0), Complex(2.0));
    ResourceGrid c(24, 14);
    c.set(0, 0, 3.0, CellLabel::pdsch);
    EXPECT_THROW(a.overlay(c), std::invalid_argument);
    EXPECT_THROW(ResourceGrid(0, 14), std::invalid_argument);
}

TEST(Modulate, SingleSubcarrierIsTone) {
    const CarrierConfig c;
    ResourceGrid g(c.subcarriers(), 14);
    const int offset = 5;
    g.set(c.subcarriers() / 2 + offset, 3, Complex(1.0, 0.0), CellLabel::pdsch);
    const std::vector<ResourceGrid> grids{g};
    const auto sig = ofdm_modulate(grids, c);
    ASSERT_EQ(sig.size(), 15360u);
    EXPECT_EQ(sig.sample_rate_hz(), 15.36e6);
    std::size_t start = 0;
    for (int l = 0; l < 3; ++l) start += static_cast<std::size_t>(c.n_fft + c.cp_length(0, l));
    const std::size_t body = start + static_cast<std::size_t>(c.cp_length(0, 3));
    const double expected_step = 2.0 * std::numbers::pi * offset * c.scs_hz / c.sample_rate_hz();
    for (std::size_t i = start; i + 1 < body + static_cast<std::size_t>(c.n_fft); ++i) {
        const auto a = sig.samples()[i];
        const auto b = sig.samples()[i + 1];
        ASSERT_NEAR(std::abs(a), 1.0 / std::sqrt(1024.0), 1e-12);
        ASSERT_NEAR(std::arg(b / a), expected_step, 1e-9) << i;
    }
    for (std::size_t i = 0; i < start; ++i) ASSERT_EQ(sig.samples()[i], Complex{});
}

TEST(Modulate, UnitaryEnergy) {
    const CarrierConfig c;
    const auto grids = random_grids(c, 1, 1);
    const auto sig = ofdm_modulate(grids, c);
    double grid_energy = 0.0;
    for (int l = 0; l < 14; ++l) {
        for (int k = 0; k < c.subcarriers(); ++k) grid_energy += std::norm(grids[0].at(k, l));
    }
    double body_energy = 0.0;
    std::size_t pos = 0;
    for (int l = 0; l < 14; ++l) {
        pos += static_cast<std::size_t>(c.cp_length(0, l));
        for (int i = 0; i < c.n_fft; ++i) body_energy += std::norm(sig.samples()[pos + static_cast<std::size_t>(i)]);
        pos += static_cast<std::size_t>(c.n_fft);
    }
    EXPECT_NEAR(body_energy, grid_energy, 1e-9 * grid_energy);
}

TEST(Modulate, RejectsOversizedGrid) {
    const CarrierConfig c;
    const std::vector<ResourceGrid> wrong{ResourceGrid(1200, 14)};
    EXPECT_THROW(ofdm_modulate(wrong, c), std::invalid_argument);
}

TEST(RoundTrip, RandomGridsRecovered) {
    const CarrierConfig c;
    const auto grids = random_grids(c, 10, 2);
    const auto sig = ofdm_modulate(grids, c);
    EXPECT_EQ(sig.size(), 153600u);
    const auto demod = ofdm_demodulate(sig, c);
    ASSERT_EQ(demod.grids.size(), 10u);
    EXPECT_TRUE(demod.cp_aligned);
    EXPECT_NEAR(demod.cp_correlation, 1.0, 1e-9);
    double worst = 0.0;
    for (std::size_t s = 0; s < 10; ++s) {
        for (int l = 0; l < 14; ++l) {
            for (int k = 0; k < c.subcarriers(); ++k) {
                const auto want = grids[s].at(k, l);
                worst = std::max(worst, std::abs(demod.grids[s].at(k, l) - want) / std::abs(want));
            }
        }
    }
    EXPECT_LT(worst, 1e-6);
}

TEST(RoundTrip, OddStartingSlotThirtyKilohertz) {
    CarrierConfig c;
    c.scs_hz = 30e3;
    c.slots_per_frame = 20;
    c.n_rb = 24;
    c.n_fft = 512;
    const auto grids = random_grids(c, 3, 3);
    const auto sig = ofdm_modulate(grids, c, 1);
    const auto demod = ofdm_demodulate(sig, c, 1);
    for (std::size_t s = 0; s < 3; ++s) {
        for (int k = 0; k < c.subcarriers(); ++k) {
            ASSERT_LT(std::abs(demod.grids[s].at(k, 0) - grids[s].at(k, 0)), 1e-9);
        }
    }
}

TEST(Demodulate, ZeroInputZeroGrid) {
    const CarrierConfig c;
    const dsp::SignalBuffer zeros(std::vector<Complex>(15360), c.sample_rate_hz());
    const auto demod = ofdm_demodulate(zeros, c);
    ASSERT_EQ(demod.grids.size(), 1u);
    for (int l = 0; l < 14; ++l) {
        for (int k = 0; k < c.subcarriers(); ++k) ASSERT_EQ(demod.grids[0].at(k, l), Complex{});
    }
    EXPECT_TRUE(demod.cp_aligned);
}

TEST(Demodulate, MisalignedCyclicPrefixFlagged) {
    const CarrierConfig c;
    const auto grids = random_grids(c, 2, 4);
    const auto sig = ofdm_modulate(grids, c);
    std::vector<Complex> shifted(sig.size());
    for (std::size_t i = 0; i < sig.size(); ++i) shifted[(i + 37) % sig.size()] = sig.samples()[i];
    const auto demod = ofdm_demodulate(sig.with_samples(shifted), c);
    EXPECT_FALSE(demod.cp_aligned);
    EXPECT_LT(demod.cp_correlation, kCpAlignedThreshold);
}

TEST(Demodulate, NonIntegerSlotCount) {
    const CarrierConfig c;
    const dsp::SignalBuffer part(std::vector<Complex>(15360 + 100), c.sample_rate_hz());
    EXPECT_THROW(ofdm_demodulate(part, c), std::invalid_argument);
}
