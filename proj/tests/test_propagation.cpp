#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wormsim/propagation.hpp"

using namespace wormsim;

namespace {

constexpr double d = 0.05e-3;
constexpr double c = 1e8;
const ArrayConfig cfg{};

LadderModel flat_line(std::size_t cells, Boundaries bc = {}) {
    return uniform_ladder(cells, d, c, squid_inductance(0.0, cfg), bc);
}

LadderModel wormhole_line(double b0, double extent, Boundaries bc = {}) {
    return build_ladder(discretize_profile(make_geometry(b0, c), cfg, extent), cfg, bc);
}

PulseSpec fitted_pulse(const LadderModel& m, std::size_t node) {
    PulseSpec p;
    p.width = 3.0 / (2.0 * pi * 0.8 * m.band_limit);
    p.center_time = 6.0 * p.width;
    p.injection_node = node;
    return p;
}

}  // namespace

TEST(Ladder, UniformProfileIsHomogeneous) {
    std::vector<double> xs, phis;
    for (int n = 0; n < 50; ++n) {
        xs.push_back((n - 24.5) * d);
        phis.push_back(0.0);
    }
    const auto m = build_ladder(FluxProfile(xs, phis, d, {}), cfg);
    for (std::size_t n = 0; n < m.cells(); ++n)
        EXPECT_NEAR(m.spacing / std::sqrt(m.inductances[n] * m.cell_capacitance), c, 1e-9 * c);
    EXPECT_EQ(m.capacitances.front(), 0.5 * m.cell_capacitance);
    EXPECT_EQ(m.capacitances[1], m.cell_capacitance);
}

TEST(Ladder, CalibrationRescalesCapacitanceAndSaysSo) {
    const auto m = wormhole_line(1e-4, 5e-3);
    const double expected = (d / c) * (d / c) / squid_inductance(0.0, cfg);
    EXPECT_NEAR(m.cell_capacitance, expected, 1e-12 * expected);
    EXPECT_NEAR(m.capacitance_scale, expected / cfg.C0, 1e-12);
    bool noted = false;
    for (const auto& s : m.notes) noted |= s.find("C0 rescaled") != std::string::npos;
    EXPECT_TRUE(noted);
}

TEST(Ladder, InnermostCellsAreSlowest) {
    const auto m = wormhole_line(1e-4, 5e-3);
    ASSERT_EQ(m.cells(), 200u);
    auto speed = [&](std::size_t n) { return m.spacing / std::sqrt(m.inductances[n] * m.cell_capacitance); };
    EXPECT_NEAR(speed(99) / c, std::sqrt(0.36), 1e-12);
    EXPECT_NEAR(speed(100) / c, std::sqrt(0.36), 1e-12);
    for (std::size_t n = 0; n < m.cells(); ++n) EXPECT_GE(speed(n), speed(100) * (1 - 1e-15));
}

TEST(Ladder, FailingProfileRefusedUnlessOverridden) {
    const auto p = discretize_profile(make_geometry(1e-3, c), cfg, 5e-3);
    try {
        (void)build_ladder(p, cfg);
        FAIL() << "expected refusal";
    } catch (const LadderRefusal& e) {
        EXPECT_EQ(e.report().verdict, Verdict::fail);
    }
    const auto m = build_ladder(p, cfg, {}, true);
    EXPECT_EQ(m.cells(), p.size());
    EXPECT_EQ(m.notes.front(), "built from a failing profile under override");
}

TEST(Simulate, HandComputedThreeCellLadder) {
    // L = C = d = c = 1, terminal nodes carry C / 2, dt = 1/2, open ends.
    auto m = uniform_ladder(3, 1.0, 1.0, 1.0, {Boundary::open, Boundary::open});
    m.band_limit = 0.0;
    PulseSpec p;
    p.width = 1.0;
    p.center_time = 0.0;
    SimulationOptions opt;
    opt.dt = 0.5;
    const auto r = simulate(m, p, 1.5, {0, 1, 2, 3}, opt);
    ASSERT_EQ(r.steps, 3u);
    const double j0 = 2.0 * p.shape(0.25), j1 = 2.0 * p.shape(0.75), j2 = 2.0 * p.shape(1.25);
    const auto& V0 = r.probes[0].voltages;
    const auto& V1 = r.probes[1].voltages;
    const auto& V2 = r.probes[2].voltages;
    const auto& V3 = r.probes[3].voltages;
    EXPECT_DOUBLE_EQ(V0[1], j0);
    EXPECT_EQ(V1[1], 0.0);
    EXPECT_DOUBLE_EQ(V0[2], 0.5 * j0 + j1);
    EXPECT_DOUBLE_EQ(V1[2], 0.25 * j0);
    EXPECT_DOUBLE_EQ(V0[3], -0.125 * j0 + 0.5 * j1 + j2);
    EXPECT_DOUBLE_EQ(V1[3], 0.5 * j0 + 0.25 * j1);
    EXPECT_DOUBLE_EQ(V2[3], 0.0625 * j0);
    EXPECT_EQ(V3[2], 0.0);
    EXPECT_EQ(V3[3], 0.0);
}

TEST(Simulate, HomogeneousDelay) {
    const auto m = flat_line(600);
    const auto plan = plan_experiment(m, {-2e-3, 8e-3});
    const auto r = simulate(m, plan.pulse, plan.duration, plan.probe_nodes);
    const double expected = 10e-3 / c;
    EXPECT_NEAR(time_of_flight(r.probes[0], r.probes[1]), expected, 0.02 * expected);
}

TEST(Simulate, OpenEndEchoReturnsAfterTwiceOneWayTime) {
    for (Boundary far : {Boundary::open, Boundary::shorted}) {
        const std::size_t cells = 800;
        const auto m = flat_line(cells, {Boundary::matched, far});
        const PulseSpec p = fitted_pulse(m, 400);
        const double one_way = 400 * d / c;
        const auto r = simulate(m, p, p.center_time + 2.0 * one_way + 8.0 * p.width, {400});
        const auto& v = r.probes[0].voltages;

        // Split the record halfway between launch and echo.
        const auto split = static_cast<std::size_t>((p.center_time + one_way) / r.dt);
        ProbeSeries launch = r.probes[0], echo = r.probes[0];
        launch.voltages.assign(v.begin(), v.begin() + static_cast<long>(split));
        echo.voltages.assign(v.size(), 0.0);
        std::copy(v.begin() + static_cast<long>(split), v.end(), echo.voltages.begin() + static_cast<long>(split));

        const auto a = pulse_arrival(launch);
        const auto b = pulse_arrival(echo);
        EXPECT_NEAR(b.centroid - a.centroid, 2.0 * one_way, 0.02 * 2.0 * one_way) << to_string(far);

        std::size_t peak = split;
        for (std::size_t n = split; n < v.size(); ++n)
            if (std::abs(v[n]) > std::abs(v[peak])) peak = n;
        // The launched voltage is positive. An open end returns it with the same
        // voltage and inverted current; a short inverts the voltage.
        if (far == Boundary::open) {
            EXPECT_GT(v[peak], 0.5);
        } else {
            EXPECT_LT(v[peak], -0.5);
        }
    }
}

TEST(Simulate, EnergyConservedWithReflectingEnds) {
    const auto m = wormhole_line(1e-4, 5e-3);
    LadderModel open = m;
    open.boundaries = {Boundary::open, Boundary::open};
    const PulseSpec p = fitted_pulse(open, 30);
    SimulationOptions opt;
    opt.energy_every = 97;
    const double dt = open.default_time_step();
    const auto r = simulate(open, p, 20000 * dt, {}, opt);
    double e_ref = -1.0;
    for (std::size_t i = 0; i < r.energy.size(); ++i) {
        if (r.energy_times[i] <= r.source_off_time + dt) continue;
        if (e_ref < 0.0) e_ref = r.energy[i];
        EXPECT_NEAR(r.energy[i], e_ref, 1e-6 * e_ref) << "t=" << r.energy_times[i];
    }
    EXPECT_GT(e_ref, 0.0);
}

TEST(Simulate, EnergyNonIncreasingWithMatchedEnds) {
    const auto m = wormhole_line(1e-4, 5e-3);
    const PulseSpec p = fitted_pulse(m, 30);
    SimulationOptions opt;
    opt.energy_every = 1;
    const double dt = m.default_time_step();
    const auto r = simulate(m, p, 8000 * dt, {}, opt);
    double prev = -1.0;
    for (std::size_t i = 0; i < r.energy.size(); ++i) {
        if (r.energy_times[i] <= r.source_off_time + dt) continue;
        if (prev >= 0.0) {
            EXPECT_LE(r.energy[i], prev * (1.0 + 1e-12));
        }
        prev = r.energy[i];
    }
    EXPECT_LT(r.energy.back(), 1e-3 * r.energy[static_cast<std::size_t>(r.source_off_time / dt) + 2]);
}

TEST(Simulate, ReciprocalOnSymmetricProfile) {
    const auto m = wormhole_line(1e-4, 20e-3);
    const auto plan = plan_experiment(m, {-5e-3, 5e-3});
    const auto fwd = simulate(m, plan.pulse, plan.duration, plan.probe_nodes);
    const double t_fwd = time_of_flight(fwd.probes[0], fwd.probes[1]);

    PulseSpec back = plan.pulse;
    const std::size_t last = m.nodes() - 1;
    back.injection_node = last - plan.pulse.injection_node;
    const std::vector<std::size_t> probes = {last - plan.probe_nodes[1], last - plan.probe_nodes[0]};
    const auto rev = simulate(m, back, plan.duration, probes);
    const double t_rev = time_of_flight(rev.probes[1], rev.probes[0]);
    EXPECT_NEAR(t_fwd, t_rev, 0.01 * t_fwd);
}

TEST(Simulate, WormholeNeverSpeedsUpThePulse) {
    for (double b0 : {0.02e-3, 0.05e-3, 0.1e-3}) {
        const auto m = wormhole_line(b0, 20e-3);
        const auto rep = validate_against_ray(m, make_geometry(b0, c), {-5e-3, 5e-3});
        EXPECT_GE(rep.measured_time, rep.reference_time) << b0;
        EXPECT_GT(rep.measured_delay, 0.0) << b0;
    }
}

TEST(Simulate, BandLimitEnforced) {
    const auto m = flat_line(100);
    PulseSpec p;
    p.width = 1e-13;
    p.center_time = 1e-12;
    EXPECT_THROW((void)simulate(m, p, 1e-11, {0}), std::invalid_argument);
}

TEST(Simulate, OversizedStepIsUnstable) {
    const auto m = wormhole_line(1e-4, 5e-3);
    const PulseSpec p = fitted_pulse(m, 30);
    SimulationOptions opt;
    opt.dt = 3.0 * m.default_time_step();
    try {
        (void)simulate(m, p, 20000 * opt.dt, {10}, opt);
        FAIL() << "expected instability";
    } catch (const InstabilityError& e) {
        EXPECT_LT(e.step(), 20000u);
    }
}

TEST(Simulate, DefaultStepStableOnRandomFeasibleProfiles) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ub(0.01e-3, 0.1e-3);
    std::uniform_real_distribution<double> uo(-0.02e-3, 0.02e-3);
    for (int i = 0; i < 5; ++i) {
        ArrayConfig c2 = cfg;
        c2.grid_offset = uo(rng);
        const auto p = discretize_profile(make_geometry(ub(rng), c), c2, 2e-3);
        if (feasibility(p, c2).verdict == Verdict::fail) continue;
        const auto m = build_ladder(p, c2, {Boundary::open, Boundary::open});
        const PulseSpec pulse = fitted_pulse(m, 5);
        SimulationOptions opt;
        opt.energy_every = 1000;
        const double dt = m.default_time_step();
        const auto r = simulate(m, pulse, 20000 * dt, {}, opt);
        const double e_end = r.energy.back();
        double e_off = 0.0;
        for (std::size_t k = 0; k < r.energy.size(); ++k)
            if (r.energy_times[k] > r.source_off_time + dt) { e_off = r.energy[k]; break; }
        EXPECT_NEAR(e_end, e_off, 1e-6 * e_off);
    }
}

TEST(Simulate, MillionStepsWithReflectingEndsStayBounded) {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> ub(0.02e-3, 0.1e-3);
    std::uniform_real_distribution<double> uo(-0.02e-3, 0.02e-3);
    int runs = 0;
    while (runs < 2) {
        ArrayConfig c2 = cfg;
        c2.grid_offset = uo(rng);
        const auto p = discretize_profile(make_geometry(ub(rng), c), c2, 1e-3);
        if (feasibility(p, c2).verdict == Verdict::fail) continue;
        const auto m = build_ladder(p, c2, {Boundary::open, Boundary::shorted});
        SimulationOptions opt;
        opt.energy_every = 10000;
        const auto r = simulate(m, fitted_pulse(m, 3), 1e6 * m.default_time_step(), {}, opt);
        double e_off = -1.0;
        double worst = 0.0;
        for (std::size_t k = 0; k < r.energy.size(); ++k) {
            if (r.energy_times[k] <= r.source_off_time + m.default_time_step()) continue;
            if (e_off < 0.0) e_off = r.energy[k];
            worst = std::max(worst, std::abs(r.energy[k] - e_off) / e_off);
        }
        EXPECT_GE(r.energy.size(), 100u);
        EXPECT_GT(e_off, 0.0);
        EXPECT_LT(worst, 1e-6);
        ++runs;
    }
}

TEST(TimeOfFlight, Antisymmetric) {
    const auto m = flat_line(600);
    const auto plan = plan_experiment(m, {-2e-3, 8e-3});
    const auto r = simulate(m, plan.pulse, plan.duration, plan.probe_nodes);
    EXPECT_DOUBLE_EQ(time_of_flight(r.probes[0], r.probes[1]), -time_of_flight(r.probes[1], r.probes[0]));
}

TEST(TimeOfFlight, NoPulseIsAMeasurementError) {
    ProbeSeries s;
    s.dt = 1e-12;
    s.pulse_width = 1e-11;
    s.voltages.assign(1000, 0.0);
    EXPECT_THROW((void)pulse_arrival(s), MeasurementError);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (double& v : s.voltages) v = noise(rng);
    EXPECT_THROW((void)pulse_arrival(s), MeasurementError);
    s.voltages.clear();
    EXPECT_THROW((void)pulse_arrival(s), MeasurementError);
}

TEST(RayValidation, FlatLadderAgreesWithinTwoPercent) {
    const auto m = flat_line(800);
    const auto rep = validate_against_ray(m, make_geometry(0.0, c), {-5e-3, 5e-3});
    EXPECT_LT(rep.relative_discrepancy, 0.02);
    EXPECT_NEAR(rep.ray_time, 10e-3 / c, 1e-20);
    EXPECT_NEAR(rep.measured_time, rep.reference_time, 1e-18);
}

TEST(RayValidation, WormholeWithinTenPercent) {
    const auto m = wormhole_line(1e-4, 20e-3);
    const auto rep = validate_against_ray(m, make_geometry(1e-4, c), {-5e-3, 5e-3});
    EXPECT_LT(rep.relative_discrepancy, 0.10);
    EXPECT_GT(rep.predicted_delay, 0.0);
    EXPECT_EQ(rep.cells, 800u);
}

TEST(Convergence, HalvingSpacingApproachesRay) {
    const auto geom = make_geometry(1e-4, c);
    ArrayConfig c40 = cfg;
    const auto rows = convergence_study([&](const ArrayConfig& a) { return discretize_profile(geom, a, 20e-3); },
                                        c40, geom, {-5e-3, 5e-3}, 1);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1].spacing, 0.5 * rows[0].spacing);
    EXPECT_LT(rows[1].report.relative_discrepancy, rows[0].report.relative_discrepancy);
}
