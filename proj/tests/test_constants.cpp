#include <gtest/gtest.h>

#include "wormsim/constants.hpp"

using namespace wormsim;

TEST(Constants, FluxQuantumFromCodata) {
    const auto k = default_constants();
    // h / (2e), exact CODATA 2018 inputs, evaluated in 30-digit arithmetic.
    EXPECT_NEAR(k.flux_quantum(), 2.06783384846192932e-15, 1e-30);
    EXPECT_NEAR(k.resistance_quantum(), 6453.20186482612667, 1e-9);
}

TEST(Constants, DerivedQuantitiesAreComputedNotStored) {
    const auto k = default_constants();
    EXPECT_DOUBLE_EQ(k.flux_quantum() * 2.0 * k.e, k.h);
    EXPECT_DOUBLE_EQ(k.resistance_quantum() * 4.0 * k.e * k.e, k.h);

    PhysicalConstants scaled = k;
    scaled.h *= 2.0;
    EXPECT_DOUBLE_EQ(scaled.flux_quantum(), 2.0 * k.flux_quantum());
}

TEST(Constants, DefaultLightSpeed) {
    EXPECT_EQ(default_constants().c_base, 1e8);
    PhysicalConstants bad;
    bad.c_base = 0.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}
