#include <gtest/gtest.h>

#include "wormsim/config.hpp"

using namespace wormsim;
using namespace wormsim::config;

TEST(Quantity, UnitsAndDimensions) {
    EXPECT_DOUBLE_EQ(parse_quantity("0.1mm", Dim::length, "p"), 1e-4);
    EXPECT_DOUBLE_EQ(parse_quantity(" 10 uA ", Dim::current, "p"), 1e-5);
    EXPECT_DOUBLE_EQ(parse_quantity("0.1pF", Dim::capacitance, "p"), 1e-13);
    EXPECT_DOUBLE_EQ(parse_quantity("20GHz", Dim::frequency, "p"), 2e10);
    EXPECT_DOUBLE_EQ(parse_quantity("1ns", Dim::time, "p"), 1e-9);
    EXPECT_DOUBLE_EQ(parse_quantity("2.5e18 m/s^2", Dim::acceleration, "p"), 2.5e18);
    EXPECT_DOUBLE_EQ(parse_quantity("3", Dim::length, "p"), 3.0);
    EXPECT_THROW((void)parse_quantity("1ns", Dim::length, "p"), ConfigError);
    EXPECT_THROW((void)parse_quantity("1 parsec", Dim::length, "p"), ConfigError);
    EXPECT_THROW((void)parse_quantity("mm", Dim::length, "p"), ConfigError);
}

TEST(Load, MinimalDocumentUsesDefaults) {
    const auto cfg = load(R"({"geometry": {"b0_m": 1e-4}})");
    ASSERT_EQ(cfg.b0.size(), 1u);
    EXPECT_EQ(cfg.b0[0], 1e-4);
    EXPECT_EQ(cfg.c_base, 1e8);
    EXPECT_EQ(cfg.array.I_c, 10e-6);
    EXPECT_EQ(cfg.experiment.extent, 5e-3);
    EXPECT_FALSE(cfg.time_machine.has_value());
    EXPECT_EQ(cfg.format, Format::csv);
}

TEST(Load, UnitStringsAndLists) {
    const auto cfg = load(R"({"geometry": {"b0_m": ["0.1mm", "0.5mm", "1mm"]},
                              "array": {"I_c_A": "10uA", "d_m": "50um"}})");
    ASSERT_EQ(cfg.b0.size(), 3u);
    EXPECT_DOUBLE_EQ(cfg.b0[2], 1e-3);
    EXPECT_DOUBLE_EQ(cfg.array.d, 5e-5);
}

TEST(Load, MissingGeometryNamesThePath) {
    for (const char* doc : {"{}", R"({"geometry": {}})"}) {
        try {
            (void)load(doc);
            FAIL() << doc;
        } catch (const ConfigError& e) {
            EXPECT_EQ(e.path(), "geometry.b0_m") << doc;
        }
    }
}

TEST(Load, UnknownFieldRejected) {
    try {
        (void)load(R"({"geometry": {"b0_m": 1e-4, "bo_m": 2}})");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.path(), "geometry.bo_m");
    }
    EXPECT_THROW((void)load(R"({"geometry": {"b0_m": 1e-4}, "extra": 1})"), ConfigError);
}

TEST(Load, ModuleInvariantsRevalidated) {
    try {
        (void)load(R"({"geometry": {"b0_m": 1e-4}, "array": {"threshold_flux_ratio": 0.7}})");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.path(), "array.threshold_flux_ratio");
    }
    EXPECT_THROW((void)load(R"({"geometry": {"b0_m": -1}})"), ConfigError);
    EXPECT_THROW((void)load("not json"), ConfigError);
    EXPECT_THROW((void)load(R"({"geometry": {"b0_m": 1e-4}, "output": {"format": "xml"}})"), ConfigError);
}

TEST(Load, TimeMachineBlock) {
    const auto cfg = load(R"({"geometry": {"b0_m": "0.1mm"},
        "time_machine": {"l0_m": "0.2mm", "schedule": [{"duration_s": "1ns", "g_m_per_s2": 2.5e18},
                                                      {"duration_s": "2ns", "g_m_per_s2": -2.5e18}]}})");
    ASSERT_TRUE(cfg.time_machine.has_value());
    EXPECT_DOUBLE_EQ(cfg.time_machine->T_total, 3e-9);
    EXPECT_NEAR(cfg.time_machine->x0, std::sqrt(5e-8) - 1e-4, 1e-18);
    EXPECT_FALSE(cfg.time_machine->quoted_traversal.has_value());

    try {
        (void)load(R"({"geometry": {"b0_m": "0.1mm"},
            "time_machine": {"l0_m": "0.2mm", "schedule": [{"duration_s": "1ns", "g_m_per_s2": 1e22}]}})");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.path(), "time_machine.schedule[0].g_m_per_s2");
    }
}

TEST(Override, DottedPathsAndTypes) {
    const auto cfg = load(R"({"geometry": {"b0_m": 1e-4}})",
                          {"geometry.b0_m=0.5mm", "array.N=40", "experiment.boundaries.right=open",
                           "output.format=json", "experiment.allow_failing=true"});
    EXPECT_DOUBLE_EQ(cfg.b0[0], 5e-4);
    EXPECT_EQ(cfg.array.N, 40u);
    EXPECT_EQ(cfg.experiment.boundaries.right, Boundary::open);
    EXPECT_EQ(cfg.format, Format::json);
    EXPECT_TRUE(cfg.experiment.allow_failing);
    EXPECT_EQ(cfg.resolved["array"]["N"], 40);
}

TEST(Override, Malformed) {
    EXPECT_THROW((void)load("{}", {"geometry.b0_m"}), ConfigError);
    EXPECT_THROW((void)load("{}", {"=1"}), ConfigError);
    EXPECT_THROW((void)load("{}", {"geometry..b0_m=1"}), ConfigError);
}

TEST(Hash, IgnoresOutputBlockOnly) {
    const auto a = load(R"({"geometry": {"b0_m": 1e-4}})", {"output.directory=a"});
    const auto b = load(R"({"geometry": {"b0_m": 1e-4}})", {"output.directory=b"});
    const auto c = load(R"({"geometry": {"b0_m": 2e-4}})");
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_NE(a.hash(), c.hash());
    EXPECT_EQ(a.hash().size(), 8u);
}
